#pragma once

#include <memory>
#include <string>

#include "calbem/barycentric.hpp"
#include "calbem/grid.hpp"
#include "calbem/types.hpp"

namespace calbem {

/// The four trace discretisations used by the Calderon framework.  All four
/// have one degree of freedom per *coarse* edge.
///
///  RWG  div-conforming Raviart-Thomas functions on the coarse grid,
///  SNC  their pointwise rotations (normal x RWG), curl-conforming,
///  BC   div-conforming dual functions on the barycentric refinement,
///       built so that the (RWG, rotated-BC) pairing is well conditioned,
///  RBC  rotated BC functions.
///
/// Pairings and potentials always work with the *unrotated* div-conforming
/// realization (RWG for RWG/SNC, BC for BC/RBC); the rotation of SNC/RBC is
/// carried by the pairing formula, never by the stored coefficients.
enum class SpaceKind { RWG, SNC, BC, RBC };

inline bool is_rotated(SpaceKind k) { return k == SpaceKind::SNC || k == SpaceKind::RBC; }
inline bool is_dual_family(SpaceKind k) { return k == SpaceKind::BC || k == SpaceKind::RBC; }
/// SNC -> RWG, RBC -> BC; identity on the div-conforming kinds.
inline SpaceKind unrotated_kind(SpaceKind k) {
    if (k == SpaceKind::SNC) return SpaceKind::RWG;
    if (k == SpaceKind::RBC) return SpaceKind::BC;
    return k;
}
/// The canonical biorthogonal partner: RWG<->RBC and BC<->SNC.
inline SpaceKind dual_kind(SpaceKind k) {
    switch (k) {
        case SpaceKind::RWG: return SpaceKind::RBC;
        case SpaceKind::RBC: return SpaceKind::RWG;
        case SpaceKind::BC: return SpaceKind::SNC;
        case SpaceKind::SNC: return SpaceKind::BC;
    }
    return SpaceKind::RWG;
}
std::string space_name(SpaceKind k);
SpaceKind parse_space_kind(const std::string& name);

/// Fixing of the per-vertex circulation freedom in the dual construction:
/// MinEnergy picks the L2-smallest representative (the default), None leaves
/// the circulation at zero.
enum class BcCirculation { MinEnergy, None };

/// A trace space over a grid.  Copyable value type; heavy state (refinement,
/// realization matrix) is shared.
class FunctionSpace {
public:
    FunctionSpace() = default;
    /// BC/RBC build (or adopt) a barycentric refinement; RWG/SNC only need
    /// one if their fine-grid realization is requested later, so passing a
    /// shared refinement is optional for them.
    FunctionSpace(std::shared_ptr<const TriangleGrid> grid, SpaceKind kind,
                  std::shared_ptr<const BarycentricRefinement> refinement = nullptr,
                  BcCirculation circulation = BcCirculation::MinEnergy);

    SpaceKind kind() const { return kind_; }
    bool rotated() const { return is_rotated(kind_); }
    bool dual_family() const { return is_dual_family(kind_); }
    int size() const { return grid_->num_edges(); }

    const TriangleGrid& grid() const { return *grid_; }
    std::shared_ptr<const TriangleGrid> grid_ptr() const { return grid_; }
    std::shared_ptr<const BarycentricRefinement> refinement() const { return ref_; }

    /// Grid the unrotated realization lives on: the coarse grid for RWG/SNC,
    /// the barycentric refinement for BC/RBC.
    const TriangleGrid& realization_grid() const;

    /// Dof -> coefficients of the unrotated realization in the RWG basis of
    /// realization_grid().  Identity for RWG/SNC.
    const SpMat& realization() const;

    /// Dof -> fine-grid RWG coefficients: the containment of coarse
    /// Raviart-Thomas functions in the refined Raviart-Thomas space for
    /// RWG/SNC (exact), the native realization for BC/RBC.  Requires a
    /// refinement.
    const SpMat& fine_realization() const;

    bool same_grid(const FunctionSpace& other) const { return grid_ == other.grid_; }

private:
    std::shared_ptr<const TriangleGrid> grid_;
    std::shared_ptr<const BarycentricRefinement> ref_;
    SpaceKind kind_ = SpaceKind::RWG;
    BcCirculation circulation_ = BcCirculation::MinEnergy;
    std::shared_ptr<const SpMat> realization_;           // null for coarse kinds
    mutable std::shared_ptr<const SpMat> coarse_identity_;
    mutable std::shared_ptr<const SpMat> fine_embedding_; // cached for coarse kinds
};

/// Coefficients of each coarse RWG function in the RWG basis of the
/// barycentric refinement (exact containment; 14 entries per row).
SpMat rwg_embedding(const BarycentricRefinement& ref);

/// The dual div-conforming construction: one function per coarse edge,
/// expressed in fine-grid RWG coefficients.  Guarantees, for the function of
/// coarse edge e = (lo, hi):
///  * support is the union of the barycentric dual cells of lo and hi,
///  * the divergence is +1/|cell| on the dual cell of lo and -1/|cell| on
///    the dual cell of hi (unit charge transfer),
///  * unit total flux crosses the dual-cell interface through the midpoint
///    of e, split equally between its two halves.
SpMat bc_coefficients(const BarycentricRefinement& ref,
                      BcCirculation circulation = BcCirculation::MinEnergy);

/// Value of the (global, signed) RWG function of edge `e` at point `x`,
/// which must lie in triangle `t` of `grid`; zero vector if `t` is not
/// adjacent to `e`.
Vec3 rwg_value(const TriangleGrid& grid, int e, int t, const Vec3& x);

} // namespace calbem
