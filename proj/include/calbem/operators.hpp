#pragma once

#include <memory>

#include "calbem/assembly.hpp"

namespace calbem {

/// Sparse LU of a (real) Galerkin mass, applied to complex data.  Copyable
/// value; the factorization is shared.
class MassSolver {
public:
    MassSolver() = default;
    explicit MassSolver(SpMat m);
    Vec solve(const Vec& b) const;
    Mat solve(const Mat& b) const;
    const SpMat& matrix() const;
    explicit operator bool() const { return impl_ != nullptr; }

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

namespace detail {
struct OpNode;
}

/// A Galerkin boundary operator between trace spaces, with a lazy expression
/// algebra.  Every operator knows its domain, its range and the space its
/// weak form is tested against (dual_to_range).  The strong form is the
/// (range, dual_to_range) pairing-mass inverse applied to the weak form;
/// composition `a * b` inserts that factor of `b` automatically, so chains
/// evaluate as  M_a^{-1} W_a M_b^{-1} W_b ...  without ever forming dense
/// inverses.
class BoundaryOperator {
public:
    BoundaryOperator() = default;

    /// Wraps an already assembled weak matrix (rows: dual_to_range dofs,
    /// cols: domain dofs).
    static BoundaryOperator weak_leaf(std::shared_ptr<const Mat> w, FunctionSpace domain,
                                      FunctionSpace range, FunctionSpace dual_to_range);
    /// The identity, whose weak form is the (domain, dual_to_range) pairing
    /// mass.
    static BoundaryOperator identity(FunctionSpace domain, FunctionSpace range,
                                     FunctionSpace dual_to_range);

    bool valid() const { return node_ != nullptr; }
    const FunctionSpace& domain() const;
    const FunctionSpace& range() const;
    const FunctionSpace& dual_to_range() const;

    Vec weak_apply(const Vec& x) const;
    Vec strong_apply(const Vec& x) const;
    /// Materialized (and cached) weak matrix of the whole expression.
    const Mat& weak_matrix() const;
    Mat strong_matrix() const;
    /// Cached solver for the (range, dual_to_range) pairing mass.
    const MassSolver& range_mass() const;

    BoundaryOperator operator-() const;
    friend BoundaryOperator operator*(cplx a, const BoundaryOperator& op);
    friend BoundaryOperator operator+(const BoundaryOperator& a, const BoundaryOperator& b);
    friend BoundaryOperator operator-(const BoundaryOperator& a, const BoundaryOperator& b);
    /// Composition a(b(.)); requires b.range == a.domain.
    friend BoundaryOperator operator*(const BoundaryOperator& a, const BoundaryOperator& b);

private:
    explicit BoundaryOperator(std::shared_ptr<const detail::OpNode> n) : node_(std::move(n)) {}
    std::shared_ptr<const detail::OpNode> node_;
};

} // namespace calbem
