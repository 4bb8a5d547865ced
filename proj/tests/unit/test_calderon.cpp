#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "calbem/gridfunction.hpp"
#include "calbem/multitrace.hpp"
#include "calbem/potentials.hpp"
#include "calbem/shapes.hpp"

using namespace calbem;

namespace {

double rel(const Vec& err, const Vec& base) { return err.norm() / base.norm(); }

Vec random_vec(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = cplx(u(rng), u(rng));
    return v;
}

}  // namespace

TEST_CASE("Calderon calculus on the sphere") {
    auto g = std::make_shared<const TriangleGrid>(make_regular_sphere(2));
    const double k = 2.0;
    MultitraceOperator mt(g, cplx(k, 0.0));
    PlaneWave wave = PlaneWave::make({1.0, 0.0, 0.0}, {0.0, 0.0, 1.0}, k);

    // Traces of the incident wave: an entire solution, so its Cauchy data is
    // interior Calderon-invariant and exterior Calderon-annihilated.
    TracePair t;
    t.dirichlet = project(mt.rwg(), dirichlet_trace(wave)).coeffs;
    t.neumann = project(mt.bc(), neumann_trace(wave)).coeffs;
    REQUIRE(t.dirichlet.norm() > 0.0);
    REQUIRE(t.neumann.norm() > 0.0);

    // Structural identity: the two projectors sum to the identity.
    {
        TracePair plus = mt.calderon(t, true);
        TracePair minus = mt.calderon(t, false);
        CHECK(rel(plus.dirichlet + minus.dirichlet - t.dirichlet, t.dirichlet) < 1e-13);
        CHECK(rel(plus.neumann + minus.neumann - t.neumann, t.neumann) < 1e-13);
    }

    // Interior projector reproduces, exterior annihilates (up to the
    // discretisation error of this mesh).
    {
        TracePair rep = mt.calderon(t, false);
        CHECK(rel(rep.dirichlet - t.dirichlet, t.dirichlet) < 5e-2);
        CHECK(rel(rep.neumann - t.neumann, t.neumann) < 5e-2);
        TracePair ann = mt.calderon(t, true);
        CHECK(rel(ann.dirichlet, t.dirichlet) < 5e-2);
        CHECK(rel(ann.neumann, t.neumann) < 5e-2);
    }

    // A^2 = 1/4 on random trace pairs.
    for (unsigned seed : {1u, 2u, 3u}) {
        TracePair r{random_vec(g->num_edges(), seed), random_vec(g->num_edges(), seed + 100)};
        TracePair aar = mt.apply(mt.apply(r));
        CAPTURE(seed);
        CHECK(rel(aar.dirichlet - 0.25 * r.dirichlet, r.dirichlet) < 2e-2);
        CHECK(rel(aar.neumann - 0.25 * r.neumann, r.neumann) < 2e-2);
    }

    // Projector idempotence on a random pair.
    {
        TracePair r{random_vec(g->num_edges(), 9), random_vec(g->num_edges(), 10)};
        TracePair p1 = mt.calderon(r, true);
        TracePair p2 = mt.calderon(p1, true);
        CHECK(rel(p2.dirichlet - p1.dirichlet, p1.dirichlet) < 2e-2);
        CHECK(rel(p2.neumann - p1.neumann, p1.neumann) < 2e-2);
    }
}

TEST_CASE("swapped pairing is an equally valid Calderon calculus") {
    auto g = std::make_shared<const TriangleGrid>(make_regular_sphere(2));
    const double k = 2.0;
    auto ref = std::make_shared<const BarycentricRefinement>(*g);
    MultitraceOperator mt(g, cplx(k, 0.0), AssemblyOptions{}, true, ref);
    CHECK(mt.swapped());
    CHECK(mt.dirichlet_space().kind() == SpaceKind::BC);
    CHECK(mt.neumann_space().kind() == SpaceKind::RWG);

    PlaneWave wave = PlaneWave::make({1.0, 0.0, 0.0}, {0.0, 0.0, 1.0}, k);
    TracePair t;
    t.dirichlet = project(mt.bc(), dirichlet_trace(wave)).coeffs;
    t.neumann = project(mt.rwg(), neumann_trace(wave)).coeffs;

    TracePair rep = mt.calderon(t, false);
    CHECK(rel(rep.dirichlet - t.dirichlet, t.dirichlet) < 5e-2);
    CHECK(rel(rep.neumann - t.neumann, t.neumann) < 5e-2);

    TracePair r{random_vec(g->num_edges(), 21), random_vec(g->num_edges(), 22)};
    TracePair p1 = mt.calderon(r, true);
    TracePair p2 = mt.calderon(p1, true);
    CHECK(rel(p2.dirichlet - p1.dirichlet, p1.dirichlet) < 2e-2);
    CHECK(rel(p2.neumann - p1.neumann, p1.neumann) < 2e-2);
}

TEST_CASE("grid functions: projection accuracy and centroid values") {
    auto g = std::make_shared<const TriangleGrid>(make_regular_sphere(2));
    auto ref = std::make_shared<const BarycentricRefinement>(*g);
    const double k = 2.0;
    PlaneWave wave = PlaneWave::make({1.0, 0.0, 0.0}, {0.0, 0.0, 1.0}, k);

    // Projections into the primal and dual div-conforming spaces both
    // reproduce the tangential trace at centroids to discretisation accuracy.
    FunctionSpace rwg(g, SpaceKind::RWG, ref);
    FunctionSpace bc(g, SpaceKind::BC, ref);
    for (const FunctionSpace& space : {rwg, bc}) {
        CAPTURE(space_name(space.kind()));
        GridFunction gf = project(space, dirichlet_trace(wave));
        REQUIRE(gf.coeffs.size() == g->num_edges());
        const double nrm = l2_norm(gf);
        CHECK(nrm > 0.0);

        auto vals = centroid_values(gf);
        const TriangleGrid& rg = space.realization_grid();
        double err2 = 0.0, base2 = 0.0;
        for (int t = 0; t < rg.num_triangles(); ++t) {
            CVec3 exact = wave.dirichlet(rg.centroid(t), rg.normal(t));
            const double e = norm(vals[t] - exact), b = norm(exact);
            err2 += e * e * rg.area(t);
            base2 += b * b * rg.area(t);
        }
        CHECK(std::sqrt(err2 / base2) < 0.12);
    }
}
