#include <doctest.h>

#include <array>
#include <cmath>
#include <set>
#include <vector>

#include "calbem/quadrature.hpp"
#include "calbem/shapes.hpp"
#include "calbem/vec3.hpp"

using namespace calbem;

namespace {

double ipow(double x, int p) {
    double r = 1.0;
    for (int i = 0; i < p; ++i) r *= x;
    return r;
}

Vec3 tri_map(const std::array<Vec3, 3>& t, double u, double v) {
    return t[0] + u * (t[1] - t[0]) + v * (t[2] - t[1]);
}

// Reference-measure integral of f over a pair of world triangles using the
// conical-product tensor rule (valid only for smooth integrands).
template <class F>
double tensor_pair(const std::array<Vec3, 3>& tx, const std::array<Vec3, 3>& ty, int m, F&& f) {
    const auto& q = triangle_rule(m);
    double s = 0.0;
    for (const auto& a : q)
        for (const auto& b : q)
            s += a.w * b.w * f(tri_map(tx, a.u, a.v), tri_map(ty, b.u, b.v));
    return s;
}

template <class F>
double ss_pair(const std::array<Vec3, 3>& tx, const std::array<Vec3, 3>& ty, PairCase c, int m,
               F&& f) {
    double s = 0.0;
    for (const auto& p : sauter_schwab_rule(c, m))
        s += p.w * f(tri_map(tx, p.ux, p.vx), tri_map(ty, p.uy, p.vy));
    return s;
}

}  // namespace

TEST_CASE("gauss_legendre: nodes inside (0,1), exact moments to degree 2n-1") {
    for (int n = 1; n <= 10; ++n) {
        Quad1D q = gauss_legendre(n);
        REQUIRE(q.x.size() == n);
        for (Eigen::Index i = 0; i < q.x.size(); ++i) {
            CHECK(q.x[i] > 0.0);
            CHECK(q.x[i] < 1.0);
            CHECK(q.w[i] > 0.0);
        }
        for (int p = 0; p <= 2 * n - 1; ++p) {
            double s = 0.0;
            for (Eigen::Index i = 0; i < q.x.size(); ++i) s += q.w[i] * ipow(q.x[i], p);
            CHECK(s == doctest::Approx(1.0 / (p + 1)).epsilon(5e-14));
        }
    }
}

TEST_CASE("gauss_jacobi01: weighted moments for weights x and x^2(1-x)") {
    for (int n = 1; n <= 8; ++n) {
        Quad1D q = gauss_jacobi01(n, 1.0, 0.0);
        for (int p = 0; p <= 2 * n - 1; ++p) {
            double s = 0.0;
            for (Eigen::Index i = 0; i < q.x.size(); ++i) s += q.w[i] * ipow(q.x[i], p);
            CHECK(s == doctest::Approx(1.0 / (p + 2)).epsilon(5e-14));
        }
    }
    for (int n = 1; n <= 6; ++n) {
        Quad1D q = gauss_jacobi01(n, 2.0, 1.0);
        for (int p = 0; p <= 2 * n - 1; ++p) {
            double s = 0.0;
            for (Eigen::Index i = 0; i < q.x.size(); ++i) s += q.w[i] * ipow(q.x[i], p);
            const double exact = 1.0 / (p + 3) - 1.0 / (p + 4);
            CHECK(s == doctest::Approx(exact).epsilon(5e-13));
        }
    }
}

TEST_CASE("triangle_rule: positive interior points, exact total degree 2m-1") {
    for (int m = 1; m <= 6; ++m) {
        const auto& q = triangle_rule(m);
        REQUIRE(static_cast<int>(q.size()) == m * m);
        double total = 0.0;
        for (const auto& p : q) {
            CHECK(p.w > 0.0);
            CHECK(p.u > 0.0);
            CHECK(p.u < 1.0);
            CHECK(p.v > 0.0);
            CHECK(p.v < p.u);
            total += p.w;
        }
        CHECK(total == doctest::Approx(0.5).epsilon(1e-14));
        for (int a = 0; a + 0 <= 2 * m - 1; ++a) {
            for (int b = 0; a + b <= 2 * m - 1; ++b) {
                double s = 0.0;
                for (const auto& p : q) s += p.w * ipow(p.u, a) * ipow(p.v, b);
                const double exact = 1.0 / double((b + 1) * (a + b + 2));
                CHECK(s == doctest::Approx(exact).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("sauter_schwab_rule: weights sum to the product measure 1/4") {
    for (PairCase c : {PairCase::Vertex, PairCase::Edge, PairCase::Coincident}) {
        for (int m : {2, 4}) {
            const auto& q = sauter_schwab_rule(c, m);
            const int subdomains = c == PairCase::Coincident ? 6 : (c == PairCase::Edge ? 5 : 2);
            REQUIRE(static_cast<int>(q.size()) == subdomains * m * m * m * m);
            double total = 0.0;
            for (const auto& p : q) {
                CHECK(p.w > 0.0);
                // Points must lie in the closed reference triangle on each leg.
                CHECK(p.ux >= -1e-14);
                CHECK(p.ux <= 1.0 + 1e-14);
                CHECK(p.vx <= p.ux + 1e-14);
                CHECK(p.vx >= -1e-14);
                CHECK(p.vy <= p.uy + 1e-14);
                total += p.w;
            }
            CHECK(total == doctest::Approx(0.25).epsilon(1e-13));
        }
    }
}

TEST_CASE("sauter_schwab_rule agrees with the tensor rule on smooth integrands") {
    // Convention placement: coincident uses the same triangle, edge shares
    // (v0, v1), vertex shares v0.  The integrand is smooth so the plain
    // tensor rule is an independent reference.
    const Vec3 A{0.0, 0.0, 0.0}, B{1.0, 0.1, 0.0}, C{0.3, 1.0, 0.4};
    const Vec3 D{0.2, -0.9, 0.5}, E{-1.0, 0.3, -0.2};
    auto f = [](const Vec3& x, const Vec3& y) {
        return 1.0 + dot(x, y) + x.x * x.x * y.z - 0.5 * y.y * x.z + dot(x, x) * y.x;
    };

    const std::array<Vec3, 3> t1{A, B, C};
    SUBCASE("coincident") {
        const double ref = tensor_pair(t1, t1, 10, f);
        CHECK(ss_pair(t1, t1, PairCase::Coincident, 6, f) == doctest::Approx(ref).epsilon(1e-10));
    }
    SUBCASE("edge") {
        const std::array<Vec3, 3> t2{A, B, D};
        const double ref = tensor_pair(t1, t2, 10, f);
        CHECK(ss_pair(t1, t2, PairCase::Edge, 6, f) == doctest::Approx(ref).epsilon(1e-10));
    }
    SUBCASE("vertex") {
        const std::array<Vec3, 3> t2{A, D, E};
        const double ref = tensor_pair(t1, t2, 10, f);
        CHECK(ss_pair(t1, t2, PairCase::Vertex, 6, f) == doctest::Approx(ref).epsilon(1e-10));
    }
}

TEST_CASE("classify_pair: case matches shared-vertex count, permutations align") {
    TriangleGrid g = make_regular_sphere(0);  // octahedron: all cases occur
    int seen_separated = 0, seen_vertex = 0, seen_edge = 0;
    for (int tx = 0; tx < g.num_triangles(); ++tx) {
        for (int ty = 0; ty < g.num_triangles(); ++ty) {
            const auto& a = g.triangle(tx);
            const auto& b = g.triangle(ty);
            int shared = 0;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    if (a[i] == b[j]) ++shared;

            TrianglePairGeometry geo = classify_pair(g, tx, ty);
            CHECK(static_cast<int>(geo.kind) ==
                  (shared == 3 ? 3 : shared));  // 0,1,2 map directly, 3 = coincident
            CHECK(std::set<int>(geo.perm_x.begin(), geo.perm_x.end()) == std::set<int>{0, 1, 2});
            CHECK(std::set<int>(geo.perm_y.begin(), geo.perm_y.end()) == std::set<int>{0, 1, 2});

            switch (geo.kind) {
                case PairCase::Coincident:
                    CHECK(tx == ty);
                    for (int i = 0; i < 3; ++i) CHECK(a[geo.perm_x[i]] == b[geo.perm_y[i]]);
                    break;
                case PairCase::Edge:
                    ++seen_edge;
                    CHECK(a[geo.perm_x[0]] == b[geo.perm_y[0]]);
                    CHECK(a[geo.perm_x[1]] == b[geo.perm_y[1]]);
                    CHECK(a[geo.perm_x[2]] != b[geo.perm_y[2]]);
                    break;
                case PairCase::Vertex:
                    ++seen_vertex;
                    CHECK(a[geo.perm_x[0]] == b[geo.perm_y[0]]);
                    break;
                case PairCase::Separated:
                    ++seen_separated;
                    CHECK(shared == 0);
                    break;
            }
        }
    }
    CHECK(seen_separated > 0);
    CHECK(seen_vertex > 0);
    CHECK(seen_edge > 0);
}
