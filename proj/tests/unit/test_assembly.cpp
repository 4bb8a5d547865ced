#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <random>
#include <vector>

#include "calbem/assembly.hpp"
#include "calbem/barycentric.hpp"
#include "calbem/shapes.hpp"
#include "calbem/spaces.hpp"
#include "support/oracles.hpp"

using namespace calbem;

namespace {

double rel_frob(const Mat& a, const Mat& b) { return (a - b).norm() / b.norm(); }

// Representative edge pairs: same edge, edges of one triangle, edges of
// neighbouring triangles, a vertex-touching pair and a far pair.
std::vector<std::pair<int, int>> representative_pairs(const TriangleGrid& g) {
    const auto& inc = g.edge_triangles();
    std::vector<std::pair<int, int>> out;
    const int e0 = 0;
    out.emplace_back(e0, e0);
    const int t0 = inc[e0][0];
    for (int l : g.triangle_edges(t0))
        if (l != e0) {
            out.emplace_back(e0, l);  // share triangle t0
            break;
        }
    const int a = g.edges()[e0][0], b = g.edges()[e0][1];
    int vertex_pair = -1, far_pair = -1;
    double far_dist = -1.0;
    for (int e = 0; e < g.num_edges(); ++e) {
        const auto& ee = g.edges()[e];
        const bool shares_vertex = ee[0] == a || ee[1] == a || ee[0] == b || ee[1] == b;
        const bool shares_tri = inc[e][0] == inc[e0][0] || inc[e][0] == inc[e0][1] ||
                                inc[e][1] == inc[e0][0] || inc[e][1] == inc[e0][1];
        if (shares_vertex && !shares_tri && vertex_pair < 0) vertex_pair = e;
        if (!shares_vertex) {
            Vec3 me = 0.5 * (g.vertex(ee[0]) + g.vertex(ee[1]));
            Vec3 m0 = 0.5 * (g.vertex(a) + g.vertex(b));
            const double d = norm(me - m0);
            if (d > far_dist) {
                far_dist = d;
                far_pair = e;
            }
        }
    }
    REQUIRE(vertex_pair >= 0);
    REQUIRE(far_pair >= 0);
    out.emplace_back(e0, vertex_pair);
    out.emplace_back(e0, far_pair);
    // And one moderately separated (near-band) pair.
    for (int e = 0; e < g.num_edges(); ++e) {
        const auto& ee = g.edges()[e];
        if (ee[0] == a || ee[1] == a || ee[0] == b || ee[1] == b) continue;
        Vec3 me = 0.5 * (g.vertex(ee[0]) + g.vertex(ee[1]));
        Vec3 m0 = 0.5 * (g.vertex(a) + g.vertex(b));
        if (norm(me - m0) < 0.6 * far_dist) {
            out.emplace_back(e0, e);
            break;
        }
    }
    return out;
}

}  // namespace

TEST_CASE("exact sparse pairings: antisymmetry, positivity, cross-mass identity") {
    auto g = std::make_shared<const TriangleGrid>(make_regular_sphere(1));
    auto ref = std::make_shared<const BarycentricRefinement>(*g);

    RealMat t = RealMat(rotation_gram(*g));
    CHECK((t + t.transpose()).norm() < 1e-13 * t.norm());

    RealMat gram = RealMat(l2_gram(*g));
    CHECK((gram - gram.transpose()).norm() < 1e-13 * gram.norm());
    Eigen::SelfAdjointEigenSolver<RealMat> es(gram);
    CHECK(es.eigenvalues().minCoeff() > 0.0);

    // cross_l2_mass must equal realization * fine Gram exactly: both sides
    // are exact integrals of piecewise-linear products.
    RealMat fine_gram = RealMat(l2_gram(ref->fine()));
    for (SpaceKind kind : {SpaceKind::RWG, SpaceKind::BC}) {
        CAPTURE(static_cast<int>(kind));
        FunctionSpace space(g, kind, ref);
        RealMat lhs = RealMat(cross_l2_mass(space));
        RealMat rhs = RealMat(space.fine_realization()) * fine_gram;
        CHECK((lhs - rhs).norm() < 1e-12 * rhs.norm());
    }
}

TEST_CASE("dense weak forms are symmetric in the RWG basis") {
    TriangleGrid g = make_regular_sphere(1);
    const cplx k{2.0, 0.0};
    for (IntegralKind kind : {IntegralKind::Electric, IntegralKind::Magnetic}) {
        CAPTURE(static_cast<int>(kind));
        Mat w = assemble_dense(g, k, kind);
        REQUIRE(w.rows() == g.num_edges());
        CHECK((w - w.transpose()).norm() < 1e-12 * w.norm());
    }
}

TEST_CASE("Galerkin entries match the adaptive reference in every adjacency case") {
    TriangleGrid g = make_regular_sphere(1);
    const cplx k{2.0, 0.0};
    auto pairs = representative_pairs(g);

    for (IntegralKind kind : {IntegralKind::Electric, IntegralKind::Magnetic}) {
        CAPTURE(static_cast<int>(kind));
        Mat w = assemble_dense(g, k, kind, AssemblyOptions{4, 5, 5, 1.5});
        double scale = 0.0;
        std::vector<cplx> expected(pairs.size());
        for (std::size_t n = 0; n < pairs.size(); ++n) {
            expected[n] = test::oracle_entry(g, k, kind, pairs[n].first, pairs[n].second, 1e-8);
            scale = std::max(scale, std::abs(expected[n]));
        }
        REQUIRE(scale > 0.0);
        for (std::size_t n = 0; n < pairs.size(); ++n) {
            CAPTURE(n);
            CAPTURE(pairs[n].first);
            CAPTURE(pairs[n].second);
            const double rel = std::abs(w(pairs[n].first, pairs[n].second) - expected[n]) / scale;
            CHECK(rel < 5e-6);
        }
        // Escalated orders must tighten the agreement by orders of magnitude.
        Mat wh = assemble_dense(g, k, kind, AssemblyOptions{6, 8, 8, 2.0});
        for (std::size_t n = 0; n < pairs.size(); ++n) {
            CAPTURE(n);
            const double rel = std::abs(wh(pairs[n].first, pairs[n].second) - expected[n]) / scale;
            CHECK(rel < 5e-8);
        }
    }
}

TEST_CASE("coarse assembly equals the fine-grid sandwich with the embedding") {
    auto g = std::make_shared<const TriangleGrid>(make_regular_sphere(1));
    auto ref = std::make_shared<const BarycentricRefinement>(*g);
    FunctionSpace rwg(g, SpaceKind::RWG, ref);
    const SpMat& p = rwg.fine_realization();
    const cplx k{2.0, 0.0};
    const AssemblyOptions opt{5, 6, 6, 2.0};

    Mat fine_e, fine_h;
    assemble_operators(ref->fine(), k, opt,
                       {{IntegralKind::Electric, &fine_e, &p, &p},
                        {IntegralKind::Magnetic, &fine_h, &p, &p}});
    Mat coarse_e = assemble_dense(*g, k, IntegralKind::Electric, opt);
    Mat coarse_h = assemble_dense(*g, k, IntegralKind::Magnetic, opt);

    CHECK(rel_frob(fine_e, coarse_e) < 2e-6);
    CHECK(rel_frob(fine_h, coarse_h) < 2e-6);
}

TEST_CASE("single-sweep multi-target run equals separate assemblies") {
    TriangleGrid g = make_regular_sphere(1);
    const cplx k{1.5, 0.0};
    Mat both_e, both_h;
    assemble_operators(g, k, {},
                       {{IntegralKind::Electric, &both_e, nullptr, nullptr},
                        {IntegralKind::Magnetic, &both_h, nullptr, nullptr}});
    CHECK(rel_frob(both_e, assemble_dense(g, k, IntegralKind::Electric)) < 1e-14);
    CHECK(rel_frob(both_h, assemble_dense(g, k, IntegralKind::Magnetic)) < 1e-14);
}

TEST_CASE("matrix dump round trip") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Mat m(5, 3);
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) m(i, j) = cplx(u(rng), u(rng));
    auto path = (std::filesystem::temp_directory_path() / "calbem_mat.bin").string();
    write_matrix(path, m);
    Mat r = read_matrix(path);
    std::remove(path.c_str());
    REQUIRE(r.rows() == 5);
    REQUIRE(r.cols() == 3);
    CHECK((r - m).norm() == 0.0);
    CHECK_THROWS(read_matrix("/nonexistent/calbem_mat.bin"));
}

TEST_CASE("assembly rejects invalid requests") {
    TriangleGrid g = make_regular_sphere(1);
    Mat out;
    CHECK_THROWS(assemble_operators(g, cplx(0.0, 0.0), {},
                                    {{IntegralKind::Electric, &out, nullptr, nullptr}}));
    AssemblyOptions bad;
    bad.regular_order = 0;
    CHECK_THROWS(assemble_operators(g, cplx(2.0, 0.0), bad,
                                    {{IntegralKind::Electric, &out, nullptr, nullptr}}));
    SpMat left(3, 3);  // wrong column count for the grid
    CHECK_THROWS(assemble_operators(g, cplx(2.0, 0.0), {},
                                    {{IntegralKind::Electric, &out, &left, nullptr}}));
}
