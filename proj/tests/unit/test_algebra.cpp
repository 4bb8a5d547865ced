#include <doctest.h>

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <random>

#include "calbem/multitrace.hpp"
#include "calbem/operators.hpp"
#include "calbem/shapes.hpp"
#include "calbem/solvers.hpp"

using namespace calbem;

namespace {

Vec random_vec(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = cplx(u(rng), u(rng));
    return v;
}

}  // namespace

TEST_CASE("operator algebra on the multitrace blocks") {
    auto g = std::make_shared<const TriangleGrid>(make_regular_sphere(1));
    MultitraceOperator mt(g, cplx(2.0, 0.0), AssemblyOptions{3, 4, 4, 1.5});
    const int n = g->num_edges();
    const Vec x = random_vec(n, 11);

    SUBCASE("the two pairing masses are negative transposes of each other") {
        RealMat m1 = RealMat(mt.mass1().matrix());
        RealMat m2 = RealMat(mt.mass2().matrix());
        CHECK((m2 + m1.transpose()).norm() < 1e-12 * m1.norm());
    }

    SUBCASE("identity is the identity in strong form") {
        Vec y = mt.id1().strong_apply(x);
        CHECK((y - x).norm() < 1e-10 * x.norm());
        Vec z = mt.id2().strong_apply(x);
        CHECK((z - x).norm() < 1e-10 * x.norm());
        // Weak form is the pairing mass itself.
        Vec w = mt.id1().weak_apply(x);
        Vec wm = Mat(mt.mass1().matrix().cast<cplx>()) * x;
        CHECK((w - wm).norm() < 1e-12 * wm.norm());
    }

    SUBCASE("composition with the identity does not change an operator") {
        BoundaryOperator h1 = mt.op_h1();
        Vec direct = h1.strong_apply(x);
        Vec via_id = (h1 * mt.id1()).strong_apply(x);
        CHECK((via_id - direct).norm() < 1e-10 * direct.norm());
    }

    SUBCASE("weak matrices of scaled sums match weak application") {
        BoundaryOperator combo = cplx(0.0, 1.5) * mt.op_h1() - mt.id1();
        const Mat& w = combo.weak_matrix();
        Vec via_mat = w * x;
        Vec via_apply = combo.weak_apply(x);
        CHECK((via_mat - via_apply).norm() < 1e-11 * via_mat.norm());
        Mat expected = cplx(0.0, 1.5) * mt.weak_h1();
        expected -= Mat(mt.mass1().matrix().cast<cplx>());
        CHECK((w - expected).norm() < 1e-12 * expected.norm());
    }

    SUBCASE("strong matrix of a product is the mass-mediated chain") {
        BoundaryOperator prod = mt.op_e1() * mt.op_e2();
        Mat strong = prod.strong_matrix();
        Mat chain = mt.mass1().solve(Mat(mt.weak_e1())) * mt.mass2().solve(Mat(mt.weak_e2()));
        CHECK((strong - chain).norm() < 1e-10 * chain.norm());
        // ... and weak/strong application agree with the materialized forms.
        Vec sa = prod.strong_apply(x);
        CHECK((sa - chain * x).norm() < 1e-9 * sa.norm());
    }

    SUBCASE("mismatched composition throws") {
        // op_e2 maps RWG -> BC; composing with itself is ill-typed.
        CHECK_THROWS(mt.op_e2() * mt.op_e2());
        // Sum of operators with different row pairings is ill-typed.
        CHECK_THROWS(mt.op_h1() + mt.op_h2());
    }

    SUBCASE("reciprocity ties the two magnetic blocks together") {
        CHECK((mt.weak_h1() - mt.weak_h2().transpose()).norm() < 1e-12 * mt.weak_h1().norm());
        CHECK((mt.weak_e1() - mt.weak_e1().transpose()).norm() < 1e-12 * mt.weak_e1().norm());
        CHECK((mt.weak_e2() - mt.weak_e2().transpose()).norm() < 1e-12 * mt.weak_e2().norm());
    }
}

TEST_CASE("mass solver round trips and reports validity") {
    MassSolver empty;
    CHECK(!empty);
    auto g = std::make_shared<const TriangleGrid>(make_regular_sphere(1));
    MultitraceOperator mt(g, cplx(2.0, 0.0));
    const MassSolver& m = mt.mass1();
    CHECK(static_cast<bool>(m));
    Vec x = random_vec(g->num_edges(), 3);
    Vec b = Mat(m.matrix().cast<cplx>()) * x;
    CHECK((m.solve(b) - x).norm() < 1e-11 * x.norm());
}

TEST_CASE("direct operator solve inverts the strong form") {
    auto g = std::make_shared<const TriangleGrid>(make_regular_sphere(1));
    MultitraceOperator mt(g, cplx(2.0, 0.0), AssemblyOptions{3, 4, 4, 1.5});
    const int n = g->num_edges();

    SUBCASE("solving against the identity returns the data unchanged") {
        GridFunction f{mt.rwg(), random_vec(n, 21)};
        GridFunction x = lu_solve(mt.id1(), f);
        CHECK((x.coeffs - f.coeffs).norm() < 1e-10 * f.coeffs.norm());
    }

    SUBCASE("op applied to the solution reproduces the right-hand side") {
        GridFunction f{mt.bc(), random_vec(n, 22)};
        GridFunction x = lu_solve(mt.op_e2(), f);
        CHECK(x.space.kind() == SpaceKind::RWG);
        Vec back = mt.op_e2().strong_apply(x.coeffs);
        CHECK((back - f.coeffs).norm() < 1e-8 * f.coeffs.norm());
    }

    SUBCASE("a right-hand side from the wrong space is refused") {
        GridFunction f{mt.rwg(), random_vec(n, 23)};
        CHECK_THROWS_AS((void)lu_solve(mt.op_e2(), f), std::invalid_argument);
    }
}
