#include "calbem/operators.hpp"

#include <Eigen/SparseLU>
#include <stdexcept>

namespace calbem {

// ---------------------------------------------------------------------------
// MassSolver

struct MassSolver::Impl {
    SpMat m;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
};

MassSolver::MassSolver(SpMat m) {
    auto impl = std::make_shared<Impl>();
    impl->m = std::move(m);
    if (impl->m.rows() != impl->m.cols())
        throw std::invalid_argument("MassSolver: matrix is not square");
    Eigen::SparseMatrix<double> a = impl->m; // column-major copy for the LU
    impl->lu.analyzePattern(a);
    impl->lu.factorize(a);
    if (impl->lu.info() != Eigen::Success)
        throw std::runtime_error("MassSolver: factorization failed (singular pairing?)");
    impl_ = std::move(impl);
}

Vec MassSolver::solve(const Vec& b) const {
    const Eigen::VectorXd re = impl_->lu.solve(b.real().eval());
    const Eigen::VectorXd im = impl_->lu.solve(b.imag().eval());
    return re.cast<cplx>() + I * im.cast<cplx>();
}

Mat MassSolver::solve(const Mat& b) const {
    const Eigen::MatrixXd re = impl_->lu.solve(b.real().eval());
    const Eigen::MatrixXd im = impl_->lu.solve(b.imag().eval());
    return re.cast<cplx>() + I * im.cast<cplx>();
}

const SpMat& MassSolver::matrix() const { return impl_->m; }

// ---------------------------------------------------------------------------
// operator expression nodes

namespace detail {

namespace {
bool compatible(const FunctionSpace& a, const FunctionSpace& b) {
    return a.same_grid(b) && a.kind() == b.kind();
}
} // namespace

struct OpNode {
    FunctionSpace dom, ran, dual;
    OpNode(FunctionSpace d, FunctionSpace r, FunctionSpace du)
        : dom(std::move(d)), ran(std::move(r)), dual(std::move(du)) {}
    virtual ~OpNode() = default;

    virtual Vec apply_weak(const Vec& x) const = 0;
    virtual Mat materialize() const = 0;

    mutable std::shared_ptr<const Mat> weak_cache;
    mutable MassSolver mass_cache;

    const Mat& weak_matrix() const {
        if (!weak_cache) weak_cache = std::make_shared<const Mat>(materialize());
        return *weak_cache;
    }
    const MassSolver& range_mass() const {
        if (!mass_cache) mass_cache = MassSolver(pairing_mass(ran, dual));
        return mass_cache;
    }
};

namespace {

struct WeakNode final : OpNode {
    std::shared_ptr<const Mat> w;
    WeakNode(std::shared_ptr<const Mat> m, FunctionSpace d, FunctionSpace r, FunctionSpace du)
        : OpNode(std::move(d), std::move(r), std::move(du)), w(std::move(m)) {
        if (!w) throw std::invalid_argument("BoundaryOperator: null weak matrix");
        if (w->rows() != dual.size() || w->cols() != dom.size())
            throw std::invalid_argument("BoundaryOperator: weak matrix shape mismatch");
        weak_cache = w;
    }
    Vec apply_weak(const Vec& x) const override { return (*w) * x; }
    Mat materialize() const override { return *w; }
};

struct IdentityNode final : OpNode {
    SpMatC m;
    IdentityNode(FunctionSpace d, FunctionSpace r, FunctionSpace du)
        : OpNode(std::move(d), std::move(r), std::move(du)) {
        m = pairing_mass(dom, dual).cast<cplx>();
    }
    Vec apply_weak(const Vec& x) const override { return m * x; }
    Mat materialize() const override { return Mat(m); }
};

struct ScaledNode final : OpNode {
    cplx a;
    std::shared_ptr<const OpNode> c;
    ScaledNode(cplx s, std::shared_ptr<const OpNode> n)
        : OpNode(n->dom, n->ran, n->dual), a(s), c(std::move(n)) {}
    Vec apply_weak(const Vec& x) const override { return a * c->apply_weak(x); }
    Mat materialize() const override { return a * c->weak_matrix(); }
};

struct SumNode final : OpNode {
    std::shared_ptr<const OpNode> l, r;
    double sign;
    SumNode(std::shared_ptr<const OpNode> a, std::shared_ptr<const OpNode> b, double s)
        : OpNode(a->dom, a->ran, a->dual), l(std::move(a)), r(std::move(b)), sign(s) {
        if (!compatible(l->dom, r->dom) || !compatible(l->ran, r->ran) ||
            !compatible(l->dual, r->dual))
            throw std::invalid_argument("BoundaryOperator: sum of operators on "
                                        "different spaces");
    }
    Vec apply_weak(const Vec& x) const override {
        return l->apply_weak(x) + sign * r->apply_weak(x);
    }
    Mat materialize() const override {
        return l->weak_matrix() + sign * r->weak_matrix();
    }
};

struct ComposeNode final : OpNode {
    std::shared_ptr<const OpNode> a, b;
    ComposeNode(std::shared_ptr<const OpNode> x, std::shared_ptr<const OpNode> y)
        : OpNode(y->dom, x->ran, x->dual), a(std::move(x)), b(std::move(y)) {
        if (!compatible(b->ran, a->dom))
            throw std::invalid_argument("BoundaryOperator: composition range/domain "
                                        "mismatch");
    }
    Vec apply_weak(const Vec& x) const override {
        return a->apply_weak(b->range_mass().solve(b->apply_weak(x)));
    }
    Mat materialize() const override {
        return a->weak_matrix() * b->range_mass().solve(b->weak_matrix());
    }
};

} // namespace
} // namespace detail

// ---------------------------------------------------------------------------
// BoundaryOperator

using detail::OpNode;

BoundaryOperator BoundaryOperator::weak_leaf(std::shared_ptr<const Mat> w,
                                             FunctionSpace domain, FunctionSpace range,
                                             FunctionSpace dual_to_range) {
    return BoundaryOperator(std::make_shared<detail::WeakNode>(
        std::move(w), std::move(domain), std::move(range), std::move(dual_to_range)));
}

BoundaryOperator BoundaryOperator::identity(FunctionSpace domain, FunctionSpace range,
                                            FunctionSpace dual_to_range) {
    return BoundaryOperator(std::make_shared<detail::IdentityNode>(
        std::move(domain), std::move(range), std::move(dual_to_range)));
}

const FunctionSpace& BoundaryOperator::domain() const { return node_->dom; }
const FunctionSpace& BoundaryOperator::range() const { return node_->ran; }
const FunctionSpace& BoundaryOperator::dual_to_range() const { return node_->dual; }

Vec BoundaryOperator::weak_apply(const Vec& x) const { return node_->apply_weak(x); }

Vec BoundaryOperator::strong_apply(const Vec& x) const {
    return node_->range_mass().solve(node_->apply_weak(x));
}

const Mat& BoundaryOperator::weak_matrix() const { return node_->weak_matrix(); }

Mat BoundaryOperator::strong_matrix() const {
    return node_->range_mass().solve(node_->weak_matrix());
}

const MassSolver& BoundaryOperator::range_mass() const { return node_->range_mass(); }

BoundaryOperator BoundaryOperator::operator-() const { return cplx(-1.0, 0.0) * (*this); }

BoundaryOperator operator*(cplx a, const BoundaryOperator& op) {
    return BoundaryOperator(std::make_shared<detail::ScaledNode>(a, op.node_));
}

BoundaryOperator operator+(const BoundaryOperator& a, const BoundaryOperator& b) {
    return BoundaryOperator(std::make_shared<detail::SumNode>(a.node_, b.node_, 1.0));
}

BoundaryOperator operator-(const BoundaryOperator& a, const BoundaryOperator& b) {
    return BoundaryOperator(std::make_shared<detail::SumNode>(a.node_, b.node_, -1.0));
}

BoundaryOperator operator*(const BoundaryOperator& a, const BoundaryOperator& b) {
    return BoundaryOperator(std::make_shared<detail::ComposeNode>(a.node_, b.node_));
}

} // namespace calbem
