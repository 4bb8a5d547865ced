#include "calbem/multitrace.hpp"

#include <stdexcept>

namespace calbem {

struct MultitraceOperator::State {
    std::shared_ptr<const TriangleGrid> grid;
    std::shared_ptr<const BarycentricRefinement> ref;
    cplx k;
    AssemblyOptions opt;
    bool swapped;

    FunctionSpace rwg, snc, bc, rbc;

    std::shared_ptr<Mat> h1, e1, e2, h2;
    bool have_e = false, have_h = false;

    MassSolver m1, m2; // lazy

    void ensure(bool electric, bool magnetic) {
        const bool need_e = electric && !have_e;
        const bool need_h = magnetic && !have_h;
        if (!need_e && !need_h) return;
        const SpMat& p_bc = bc.realization();
        const SpMat& p_rwg = rwg.fine_realization();
        std::vector<DenseTarget> targets;
        if (need_e) {
            e1 = std::make_shared<Mat>();
            e2 = std::make_shared<Mat>();
            targets.push_back({IntegralKind::Electric, e1.get(), &p_bc, &p_bc});
            targets.push_back({IntegralKind::Electric, e2.get(), &p_rwg, &p_rwg});
        }
        if (need_h) {
            h1 = std::make_shared<Mat>();
            h2 = std::make_shared<Mat>();
            targets.push_back({IntegralKind::Magnetic, h1.get(), &p_bc, &p_rwg});
            targets.push_back({IntegralKind::Magnetic, h2.get(), &p_rwg, &p_bc});
        }
        assemble_operators(ref->fine(), k, opt, targets);
        have_e = have_e || need_e;
        have_h = have_h || need_h;
    }

    const MassSolver& mass1() {
        if (!m1) m1 = MassSolver(pairing_mass(rwg, rbc));
        return m1;
    }
    const MassSolver& mass2() {
        if (!m2) m2 = MassSolver(pairing_mass(bc, snc));
        return m2;
    }
};

MultitraceOperator::MultitraceOperator(std::shared_ptr<const TriangleGrid> grid, cplx k,
                                       AssemblyOptions opt, bool swapped,
                                       std::shared_ptr<const BarycentricRefinement> ref) {
    if (!grid) throw std::invalid_argument("MultitraceOperator: null grid");
    s_ = std::make_shared<State>();
    s_->grid = grid;
    s_->ref = ref ? std::move(ref) : std::make_shared<const BarycentricRefinement>(*grid);
    s_->k = k;
    s_->opt = opt;
    s_->swapped = swapped;
    s_->rwg = FunctionSpace(grid, SpaceKind::RWG, s_->ref);
    s_->snc = FunctionSpace(grid, SpaceKind::SNC, s_->ref);
    s_->bc = FunctionSpace(grid, SpaceKind::BC, s_->ref);
    s_->rbc = FunctionSpace(grid, SpaceKind::RBC, s_->ref);
}

cplx MultitraceOperator::wavenumber() const { return s_->k; }
bool MultitraceOperator::swapped() const { return s_->swapped; }
const AssemblyOptions& MultitraceOperator::options() const { return s_->opt; }
std::shared_ptr<const TriangleGrid> MultitraceOperator::grid() const { return s_->grid; }
std::shared_ptr<const BarycentricRefinement> MultitraceOperator::refinement() const {
    return s_->ref;
}

const FunctionSpace& MultitraceOperator::rwg() const { return s_->rwg; }
const FunctionSpace& MultitraceOperator::snc() const { return s_->snc; }
const FunctionSpace& MultitraceOperator::bc() const { return s_->bc; }
const FunctionSpace& MultitraceOperator::rbc() const { return s_->rbc; }
const FunctionSpace& MultitraceOperator::dirichlet_space() const {
    return s_->swapped ? s_->bc : s_->rwg;
}
const FunctionSpace& MultitraceOperator::neumann_space() const {
    return s_->swapped ? s_->rwg : s_->bc;
}

void MultitraceOperator::ensure(bool electric, bool magnetic) const {
    s_->ensure(electric, magnetic);
}

const Mat& MultitraceOperator::weak_h1() const { ensure(false, true); return *s_->h1; }
const Mat& MultitraceOperator::weak_e1() const { ensure(true, false); return *s_->e1; }
const Mat& MultitraceOperator::weak_e2() const { ensure(true, false); return *s_->e2; }
const Mat& MultitraceOperator::weak_h2() const { ensure(false, true); return *s_->h2; }

BoundaryOperator MultitraceOperator::op_h1() const {
    ensure(false, true);
    return BoundaryOperator::weak_leaf(s_->h1, s_->rwg, s_->rwg, s_->rbc);
}
BoundaryOperator MultitraceOperator::op_e1() const {
    ensure(true, false);
    return BoundaryOperator::weak_leaf(s_->e1, s_->bc, s_->rwg, s_->rbc);
}
BoundaryOperator MultitraceOperator::op_e2() const {
    ensure(true, false);
    return BoundaryOperator::weak_leaf(s_->e2, s_->rwg, s_->bc, s_->snc);
}
BoundaryOperator MultitraceOperator::op_h2() const {
    ensure(false, true);
    return BoundaryOperator::weak_leaf(s_->h2, s_->bc, s_->bc, s_->snc);
}
BoundaryOperator MultitraceOperator::id1() const {
    return BoundaryOperator::identity(s_->rwg, s_->rwg, s_->rbc);
}
BoundaryOperator MultitraceOperator::id2() const {
    return BoundaryOperator::identity(s_->bc, s_->bc, s_->snc);
}

const MassSolver& MultitraceOperator::mass1() const { return s_->mass1(); }
const MassSolver& MultitraceOperator::mass2() const { return s_->mass2(); }

TracePair MultitraceOperator::apply(const TracePair& t) const {
    ensure(true, true);
    if (!s_->swapped) {
        // rows tested (RBC, SNC) on (RWG, BC) input
        Vec r1 = (*s_->h1) * t.dirichlet + (*s_->e1) * t.neumann;
        Vec r2 = (*s_->h2) * t.neumann - (*s_->e2) * t.dirichlet;
        return {s_->mass1().solve(r1), s_->mass2().solve(r2)};
    }
    // swapped pairing: (BC, RWG) input
    Vec r1 = (*s_->h2) * t.dirichlet + (*s_->e2) * t.neumann;
    Vec r2 = (*s_->h1) * t.neumann - (*s_->e1) * t.dirichlet;
    return {s_->mass2().solve(r1), s_->mass1().solve(r2)};
}

TracePair MultitraceOperator::calderon(const TracePair& t, bool exterior) const {
    const TracePair at = apply(t);
    const double s = exterior ? -1.0 : 1.0;
    return {0.5 * t.dirichlet + s * at.dirichlet, 0.5 * t.neumann + s * at.neumann};
}

} // namespace calbem
