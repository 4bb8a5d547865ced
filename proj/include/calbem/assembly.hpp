#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "calbem/quadrature.hpp"
#include "calbem/spaces.hpp"
#include "calbem/types.hpp"

namespace calbem {

/// Quadrature orders (points per dimension) for the Galerkin double
/// integrals.  `near_factor` widens the band, in units of the larger
/// triangle diameter, inside which separated pairs get the escalated order.
struct AssemblyOptions {
    int regular_order = 4;
    int singular_order = 5;
    int near_order = 5;
    double near_factor = 1.5;
};

enum class IntegralKind { Electric, Magnetic };

/// Per-triangle data of the grid's (global, signed) RWG functions: on
/// triangle t the function of local edge l is x -> chat[l]/(2 area) (x - p[l])
/// with divergence chat[l]/area; chat = orientation sign * edge length and
/// p[l] the vertex opposite edge l.
struct RwgLocal {
    std::array<int, 3> edge;
    std::array<double, 3> chat;
    std::array<Vec3, 3> p;
};
RwgLocal rwg_local(const TriangleGrid& g, int t);

// ---- exact sparse pairings ------------------------------------------------

/// T[i,j] = integral of RWG_j . (n x RWG_i) over the grid (test index first;
/// antisymmetric).
SpMat rotation_gram(const TriangleGrid& g);

/// L2 Gram of the grid's RWG basis (symmetric positive definite).
SpMat l2_gram(const TriangleGrid& g);

/// Galerkin pairing M[i,j] = integral of phi_j . (n x b_i), where phi_j runs
/// over the domain space and b_i over the *unrotated* realization of the
/// dual space.  Assembled on the coarse grid when both spaces are coarse,
/// through the fine-grid realizations otherwise.
SpMat pairing_mass(const FunctionSpace& domain, const FunctionSpace& dual);

/// Plain L2 cross mass between a space's functions and the fine-grid RWG
/// basis, assembled by direct pointwise evaluation on fine triangles:
/// M[i,f] = integral of phi_i . RWG_f.  Requires the space to carry a
/// refinement.
SpMat cross_l2_mass(const FunctionSpace& space);

// ---- dense Galerkin operators ---------------------------------------------

/// One accumulation target of a pair sweep: out += left . W . right^T where
/// W is the grid-RWG weak form of the requested operator and a null
/// left/right means the identity (out indexed by grid edges directly).
struct DenseTarget {
    IntegralKind kind;
    Mat* out;
    const SpMat* left = nullptr;
    const SpMat* right = nullptr;
};

/// Assembles all targets in a single sweep over unordered triangle pairs of
/// `g` (electric/magnetic kernel evaluations shared).  Weak-form convention,
/// with b the test and phi the trial function:
///   electric: -ik Int G b.phi - (1/ik) Int G (div b)(div phi)
///   magnetic: -Int b(x) . (grad_x G x phi(y))      (principal value)
/// Both are symmetric in the grid's RWG basis; the sweep computes each pair
/// once and mirrors.
void assemble_operators(const TriangleGrid& g, cplx k, const AssemblyOptions& opt,
                        const std::vector<DenseTarget>& targets);

/// Dense weak form of one operator in the grid's own RWG basis.
Mat assemble_dense(const TriangleGrid& g, cplx k, IntegralKind kind,
                   const AssemblyOptions& opt = {});

// ---- right-hand sides -----------------------------------------------------

/// Dual-pairing functional b[i] = integral of f(x,n) . (n x b_i) with b_i
/// the unrotated realization of `dual`.  Solving pairing_mass(domain, dual)
/// against this vector yields the oblique projection of f onto the domain.
Vec project_functional(const FunctionSpace& dual,
                       const std::function<CVec3(const Vec3&, const Vec3&)>& f,
                       int order = 6);

// ---- binary matrix dump ---------------------------------------------------

/// 32-byte header ("CBMX", dtype=1 complex128, int64 rows, cols, reserved)
/// followed by row-major complex values.
void write_matrix(const std::string& path, const Mat& m);
Mat read_matrix(const std::string& path);

} // namespace calbem
