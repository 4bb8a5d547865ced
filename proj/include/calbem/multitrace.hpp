#pragma once

#include <memory>

#include "calbem/operators.hpp"

namespace calbem {

/// A Cauchy trace pair (tangential trace, scaled magnetic trace).  In the
/// default pairing the Dirichlet part is expanded in RWG and the Neumann
/// part in BC; the swapped pairing exchanges the two families.
struct TracePair {
    Vec dirichlet;
    Vec neumann;
};

/// The 2x2 multitrace operator of the exterior/interior Calderon calculus,
/// discretised with dual pairings so that every block has a well-conditioned
/// pairing mass and the strong form of products is available.
///
/// Blocks (weak form, fine-grid assembly):
///   h1: magnetic,  domain RWG, tested against RBC
///   e1: electric,  domain BC,  tested against RBC
///   e2: electric,  domain RWG, tested against SNC
///   h2: magnetic,  domain BC,  tested against SNC
/// Default pairing acts as  [[h1, e1], [-e2, h2]]  on (RWG, BC) trace pairs;
/// the swapped pairing acts as  [[h2, e2], [-e1, h1]]  on (BC, RWG) pairs.
/// Fine-grid integral operators are only assembled when first referenced,
/// and all blocks requested together share one kernel sweep.
class MultitraceOperator {
public:
    MultitraceOperator(std::shared_ptr<const TriangleGrid> grid, cplx k,
                       AssemblyOptions opt = {}, bool swapped = false,
                       std::shared_ptr<const BarycentricRefinement> ref = nullptr);

    cplx wavenumber() const;
    bool swapped() const;
    const AssemblyOptions& options() const;
    std::shared_ptr<const TriangleGrid> grid() const;
    std::shared_ptr<const BarycentricRefinement> refinement() const;

    const FunctionSpace& rwg() const;
    const FunctionSpace& snc() const;
    const FunctionSpace& bc() const;
    const FunctionSpace& rbc() const;
    const FunctionSpace& dirichlet_space() const;
    const FunctionSpace& neumann_space() const;

    /// Assemble the requested kernel families now (one shared sweep for
    /// whatever is still missing).
    void ensure(bool electric, bool magnetic) const;

    const Mat& weak_h1() const;
    const Mat& weak_e1() const;
    const Mat& weak_e2() const;
    const Mat& weak_h2() const;

    BoundaryOperator op_h1() const;
    BoundaryOperator op_e1() const;
    BoundaryOperator op_e2() const;
    BoundaryOperator op_h2() const;
    /// Identities in the two row pairings: id1 on RWG tested RBC, id2 on BC
    /// tested SNC.
    BoundaryOperator id1() const;
    BoundaryOperator id2() const;

    const MassSolver& mass1() const; ///< (RWG, RBC) pairing
    const MassSolver& mass2() const; ///< (BC, SNC) pairing

    /// Strong-form action of the multitrace operator on a trace pair.
    TracePair apply(const TracePair& t) const;
    /// Calderon projector: t/2 - A t (exterior) or t/2 + A t (interior).
    TracePair calderon(const TracePair& t, bool exterior) const;

private:
    struct State;
    std::shared_ptr<State> s_;
};

} // namespace calbem
