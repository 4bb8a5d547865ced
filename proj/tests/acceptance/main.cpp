// Acceptance gate for the scattering library.  Every check prints exactly
// one PASS/FAIL line with the measured values and its pinned tolerance; the
// process exits nonzero if any check fails.  The checks are numbered and
// self-contained so a red line identifies the broken property directly.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "calbem/assembly.hpp"
#include "calbem/barycentric.hpp"
#include "calbem/gridfunction.hpp"
#include "calbem/multitrace.hpp"
#include "calbem/potentials.hpp"
#include "calbem/quadrature.hpp"
#include "calbem/shapes.hpp"
#include "calbem/solvers.hpp"
#include "calbem/spaces.hpp"
#include "support/oracles.hpp"

using namespace calbem;

namespace {

// ---------------------------------------------------------------------- //
// Pinned acceptance tolerances.                                          //
// ---------------------------------------------------------------------- //
constexpr double COND_DUAL_LO = 2.5;      // 1: dual pairing condition band
constexpr double COND_DUAL_HI = 5.0;
constexpr double COND_NAIVE_MIN = 1e10;   // 1: rotated-primal pairing floor
constexpr double COND_SECONDS_MAX = 60.0; // 1: runtime bound
constexpr double IDEMPOTENCE_TOL = 2e-2;  // 2: per-component projector defect
constexpr double CALDERON_SQUARE_TOL = 2e-2;   // 3
constexpr int CAL_EFIE_ITER_MAX = 10;          // 4: preconditioned iteration cap
constexpr double PLAIN_OVER_CAL_MIN = 10.0;    // 4: growth factor at finest level
constexpr double ITER_SECONDS_MAX = 600.0;     // 4: runtime bound
constexpr double EIG_CENTER = -0.25;           // 5
constexpr double EIG_RADIUS = 0.15;            // 5
constexpr double EIG_FRACTION_MIN = 0.90;      // 5
constexpr int CFIE_ITER_MAX = 25;              // 6
constexpr double RESONANCE_SPIKE_MIN = 3.0;    // 6
constexpr double ENTRY_ORACLE_TOL = 1e-6;      // 7
constexpr double EXTINCTION_TOL = 5e-2;        // 8
constexpr double CROSS_FORM_TOL = 5e-2;        // 8
constexpr double REPRESENTATION_TOL = 1e-2;    // 9
constexpr double EMBEDDING_IDENTITY_TOL = 1e-10; // 10
constexpr double SANDWICH_ROUTE_TOL = 1e-8;      // 10
// Smoke iteration bounds: three times the published convergence counts.
constexpr int SMOKE_MENGER_CAL = 57, SMOKE_MENGER_MFIE = 114, SMOKE_MENGER_CFIE = 99;
constexpr int SMOKE_ALMOND_CAL = 63, SMOKE_ALMOND_MFIE = 57, SMOKE_ALMOND_CFIE = 126;
// Mesh parameter giving the almond benchmark grid roughly 2.4k edges.
constexpr double ALMOND_H = 0.025;

const AssemblyOptions FAST_ORDERS{3, 4, 4, 1.5};   // large fine-grid sweeps
const AssemblyOptions ACCURATE_ORDERS{4, 5, 5, 1.5};
const GmresOptions GMRES{1e-5, 2000};

int failures = 0;

void report(bool pass, const std::string& name, const std::string& detail) {
    std::cout << (pass ? "PASS  " : "FAIL  ") << std::left << std::setw(30) << name << "  "
              << detail << std::endl;
    if (!pass) ++failures;
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(3) << v;
    return os.str();
}

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Vec random_cvec(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = cplx(u(rng), u(rng));
    return v;
}

double cond_bdc(const RealMat& m) {
    Eigen::BDCSVD<RealMat> svd(m);
    const auto& s = svd.singularValues();
    const double smin = s(s.size() - 1);
    return smin > 0.0 ? s(0) / smin : std::numeric_limits<double>::infinity();
}

PlaneWave standard_wave(double k) { return PlaneWave::make({1, 0, 0}, {0, 0, 1}, k); }

// ---------------------------------------------------------------------- //

void check_1_mass_conditioning() {
    const auto t0 = Clock::now();
    auto g = std::make_shared<const TriangleGrid>(make_regular_sphere(3));
    auto ref = std::make_shared<const BarycentricRefinement>(*g);
    FunctionSpace rwg(g, SpaceKind::RWG, ref);
    FunctionSpace rbc(g, SpaceKind::RBC, ref);
    FunctionSpace snc(g, SpaceKind::SNC);
    const double cdual = cond_bdc(RealMat(pairing_mass(rwg, rbc)));
    const double cnaive = cond_bdc(RealMat(pairing_mass(rwg, snc)));
    const double secs = seconds_since(t0);
    const bool pass = cdual >= COND_DUAL_LO && cdual <= COND_DUAL_HI &&
                      cnaive >= COND_NAIVE_MIN && secs < COND_SECONDS_MAX;
    report(pass, "1 mass-conditioning",
           "cond_dual=" + fmt(cdual) + " (band [" + fmt(COND_DUAL_LO) + "," +
               fmt(COND_DUAL_HI) + "]), cond_naive=" + fmt(cnaive) + " (floor " +
               fmt(COND_NAIVE_MIN) + "), " + fmt(secs) + "s (<" + fmt(COND_SECONDS_MAX) +
               "s)");
}

void check_2_projector_idempotence_cube() {
    auto g = std::make_shared<const TriangleGrid>(make_cube(1.0 / 11.0));
    MultitraceOperator mt(g, cplx(2.0, 0.0), FAST_ORDERS);
    const Vec3 e0{1.0, 0.0, 0.0};
    TracePair t;
    t.dirichlet = project(mt.rwg(), [&](const Vec3&, const Vec3& n) {
                      return CVec3(cross(e0, n));
                  }).coeffs;
    t.neumann = Vec::Zero(g->num_edges());

    TracePair once = mt.calderon(t, true);
    TracePair twice = mt.calderon(once, true);
    const double err_el = (twice.dirichlet - once.dirichlet).norm() / once.dirichlet.norm();
    const double err_mag = (twice.neumann - once.neumann).norm() / once.neumann.norm();
    const bool pass = err_el <= IDEMPOTENCE_TOL && err_mag <= IDEMPOTENCE_TOL;
    report(pass, "2 projector-idempotence-cube",
           std::to_string(g->num_edges()) + " edges, electric=" + fmt(err_el) +
               ", magnetic=" + fmt(err_mag) + " (tol " + fmt(IDEMPOTENCE_TOL) + ")");
}

void check_3_calderon_square(const MultitraceOperator& mt) {
    const int n = mt.grid()->num_edges();
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        TracePair t;
        t.dirichlet = random_cvec(n, 100 + 2 * trial);
        t.neumann = random_cvec(n, 101 + 2 * trial);
        TracePair a2 = mt.apply(mt.apply(t));
        const double num = std::sqrt((a2.dirichlet - 0.25 * t.dirichlet).squaredNorm() +
                                     (a2.neumann - 0.25 * t.neumann).squaredNorm());
        const double den =
            std::sqrt(t.dirichlet.squaredNorm() + t.neumann.squaredNorm());
        worst = std::max(worst, num / (0.25 * den));
    }
    report(worst <= CALDERON_SQUARE_TOL, "3 calderon-square",
           "worst of 10 random pairs: " + fmt(worst) + " (tol " +
               fmt(CALDERON_SQUARE_TOL) + ")");
}

void check_4_efie_iteration_bound() {
    const auto t0 = Clock::now();
    PlaneWave wave = standard_wave(2.0);
    std::vector<int> cal_iters, plain_iters, edges;
    bool all_converged = true;
    for (int level = 1; level <= 3; ++level) {
        auto g = std::make_shared<const TriangleGrid>(make_regular_sphere(level));
        MultitraceOperator mt(g, cplx(2.0, 0.0), FAST_ORDERS);
        SolveReport cal = solve_scattering(Formulation::EfieCalderon, mt, wave, GMRES);
        SolveReport plain = solve_scattering(Formulation::EfiePlain, mt, wave, GMRES);
        all_converged = all_converged && cal.iteration.converged && plain.iteration.converged;
        cal_iters.push_back(cal.iteration.iterations);
        plain_iters.push_back(plain.iteration.iterations);
        edges.push_back(g->num_edges());
    }
    const double secs = seconds_since(t0);
    bool cal_bounded = true;
    for (int it : cal_iters) cal_bounded = cal_bounded && it <= CAL_EFIE_ITER_MAX;
    const bool plain_monotone =
        plain_iters[0] < plain_iters[1] && plain_iters[1] < plain_iters[2];
    const bool separation = plain_iters[2] > PLAIN_OVER_CAL_MIN * cal_iters[2];
    const bool pass = all_converged && cal_bounded && plain_monotone && separation &&
                      secs < ITER_SECONDS_MAX;
    std::ostringstream os;
    os << "edges {" << edges[0] << "," << edges[1] << "," << edges[2] << "}: cal {"
       << cal_iters[0] << "," << cal_iters[1] << "," << cal_iters[2] << "} (max "
       << CAL_EFIE_ITER_MAX << "), plain {" << plain_iters[0] << "," << plain_iters[1] << ","
       << plain_iters[2] << "} (monotone, >" << fmt(PLAIN_OVER_CAL_MIN) << "x cal), "
       << fmt(secs) << "s (<" << fmt(ITER_SECONDS_MAX) << "s)";
    report(pass, "4 efie-iteration-bound", os.str());
}

void check_5_eigenvalue_clustering(const MultitraceOperator& mt) {
    const Mat strong = (mt.op_e1() * mt.op_e2()).strong_matrix();
    Eigen::ComplexEigenSolver<Mat> eig(strong, false);
    const auto& vals = eig.eigenvalues();
    int inside = 0;
    for (int i = 0; i < vals.size(); ++i)
        if (std::abs(vals(i) - cplx(EIG_CENTER, 0.0)) <= EIG_RADIUS) ++inside;
    const double fraction = double(inside) / double(vals.size());
    report(fraction >= EIG_FRACTION_MIN, "5 eigenvalue-clustering",
           fmt(100.0 * fraction) + "% of " + std::to_string(vals.size()) +
               " eigenvalues within " + fmt(EIG_RADIUS) + " of " + fmt(EIG_CENTER) +
               " (need " + fmt(100.0 * EIG_FRACTION_MIN) + "%)");
}

void check_6_resonance_immunity() {
    auto g = std::make_shared<const TriangleGrid>(make_regular_sphere(3));
    const std::vector<double> ks = {2.0, 2.744, 3.5, 4.493, 5.0};
    const std::vector<double> resonant = {2.744, 4.493};
    const std::vector<Formulation> forms = {Formulation::EfiePlain, Formulation::Mfie,
                                            Formulation::Cfie};
    auto points = resonance_sweep(g, ks, forms, {1, 0, 0}, {0, 0, 1}, FAST_ORDERS, GMRES);
    std::map<std::pair<double, Formulation>, int> iters;
    bool cfie_converged = true;
    for (const auto& p : points) {
        iters[{p.k, p.formulation}] = p.iterations;
        if (p.formulation == Formulation::Cfie)
            cfie_converged = cfie_converged && p.converged;
    }
    int cfie_max = 0;
    for (double k : ks) cfie_max = std::max(cfie_max, iters[{k, Formulation::Cfie}]);
    auto spike = [&](Formulation f) {
        int peak = 0;
        for (double k : resonant) peak = std::max(peak, iters[{k, f}]);
        return double(peak) / double(std::max(1, iters[{2.0, f}]));
    };
    const double spike_efie = spike(Formulation::EfiePlain);
    const double spike_mfie = spike(Formulation::Mfie);
    const bool pass = cfie_converged && cfie_max <= CFIE_ITER_MAX &&
                      std::max(spike_efie, spike_mfie) >= RESONANCE_SPIKE_MIN;
    report(pass, "6 resonance-immunity",
           "cfie max " + std::to_string(cfie_max) + " iters (cap " +
               std::to_string(CFIE_ITER_MAX) + "); resonant spike efie " + fmt(spike_efie) +
               "x, mfie " + fmt(spike_mfie) + "x (need >=" + fmt(RESONANCE_SPIKE_MIN) + "x)");
}

void check_7_quadrature_oracle() {
    auto g = std::make_shared<const TriangleGrid>(make_regular_sphere(2));
    const cplx k(2.0, 0.0);
    const Mat we = assemble_dense(*g, k, IntegralKind::Electric, ACCURATE_ORDERS);
    const Mat wh = assemble_dense(*g, k, IntegralKind::Magnetic, ACCURATE_ORDERS);

    std::mt19937 rng(7);
    std::uniform_int_distribution<int> pick(0, g->num_edges() - 1);
    // Entry (i, j) integrates over all support-triangle pairs; sampling the
    // diagonal guarantees the singular pair cases appear.
    std::vector<std::pair<int, int>> entries;
    for (int d = 0; d < 5; ++d) {
        const int i = pick(rng);
        entries.emplace_back(i, i);
    }
    while (entries.size() < 25) entries.emplace_back(pick(rng), pick(rng));

    std::array<int, 4> case_count{0, 0, 0, 0};
    const auto support = [&](int e) {
        return g->edge_triangles()[e];
    };
    for (const auto& [i, j] : entries)
        for (int ta : {support(i)[0], support(i)[1]})
            for (int tb : {support(j)[0], support(j)[1]})
                ++case_count[int(classify_pair(*g, ta, tb).kind)];

    double worst = 0.0;
    int compared = 0;
    for (const auto& [i, j] : entries) {
        for (IntegralKind kind : {IntegralKind::Electric, IntegralKind::Magnetic}) {
            const cplx got =
                (kind == IntegralKind::Electric) ? we(i, j) : wh(i, j);
            const cplx want = calbem::test::oracle_entry(*g, k, kind, i, j, 1e-8);
            worst = std::max(worst, std::abs(got - want) / std::abs(want));
            ++compared;
        }
    }
    const bool covered = case_count[0] > 0 && case_count[1] > 0 && case_count[2] > 0 &&
                         case_count[3] > 0;
    report(worst <= ENTRY_ORACLE_TOL && covered, "7 quadrature-oracle",
           std::to_string(compared) + " entries, worst rel " + fmt(worst) + " (tol " +
               fmt(ENTRY_ORACLE_TOL) + "); pair cases s/v/e/c " +
               std::to_string(case_count[0]) + "/" + std::to_string(case_count[1]) + "/" +
               std::to_string(case_count[2]) + "/" + std::to_string(case_count[3]));
}

void check_8_extinction(const MultitraceOperator& mt) {
    PlaneWave wave = standard_wave(2.0);
    const auto interior = ShapeSpec::parse("sphere:3").interior_points(20);
    const auto exterior = exterior_points(*mt.grid(), 10, 2.5);

    std::map<Formulation, std::vector<CVec3>> ext_fields;
    bool all_pass = true;
    std::ostringstream os;
    for (Formulation f :
         {Formulation::EfieCalderon, Formulation::Mfie, Formulation::Cfie}) {
        SolveReport rep = solve_scattering(f, mt, wave, GMRES);
        auto vals = scattered_field(rep, interior);
        double ratio_sum = 0.0;
        for (std::size_t i = 0; i < interior.size(); ++i)
            ratio_sum +=
                norm(vals[i] + wave.field(interior[i])) / norm(wave.field(interior[i]));
        const double extinction = ratio_sum / double(interior.size());
        ext_fields[f] = scattered_field(rep, exterior);
        all_pass = all_pass && rep.iteration.converged && extinction <= EXTINCTION_TOL;
        os << formulation_name(f) << " " << fmt(extinction) << " ";
    }
    double scale2 = 0.0;
    for (const auto& v : ext_fields[Formulation::EfieCalderon]) scale2 += norm(v) * norm(v);
    double cross_worst = 0.0;
    for (Formulation f : {Formulation::Mfie, Formulation::Cfie}) {
        double diff2 = 0.0;
        for (std::size_t i = 0; i < exterior.size(); ++i) {
            const double d = norm(ext_fields[f][i] - ext_fields[Formulation::EfieCalderon][i]);
            diff2 += d * d;
        }
        cross_worst = std::max(cross_worst, std::sqrt(diff2 / scale2));
    }
    all_pass = all_pass && cross_worst <= CROSS_FORM_TOL;
    report(all_pass, "8 extinction",
           "interior defect: " + os.str() + "(tol " + fmt(EXTINCTION_TOL) +
               "); exterior cross-formulation " + fmt(cross_worst) + " (tol " +
               fmt(CROSS_FORM_TOL) + ")");
}

void check_9_representation_formula(const MultitraceOperator& mt) {
    calbem::test::Dipole dip{{0.25, 0.10, -0.15}, {1.0, 0.5, -0.25}, 2.0};
    TracePair t;
    t.dirichlet = project(mt.rwg(), [&](const Vec3& x, const Vec3& n) {
                      return dip.dirichlet(x, n);
                  }).coeffs;
    t.neumann = project(mt.bc(), [&](const Vec3& x, const Vec3& n) {
                    return dip.neumann(x, n);
                }).coeffs;
    const auto pts = exterior_points(*mt.grid(), 10, 2.0);
    const auto rep = representation_field(mt, t, pts);
    double diff2 = 0.0, base2 = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const CVec3 exact = dip.field(pts[i]);
        const double d = norm(rep[i] - exact);
        diff2 += d * d;
        base2 += norm(exact) * norm(exact);
    }
    const double err = std::sqrt(diff2 / base2);
    report(err <= REPRESENTATION_TOL, "9 representation-formula",
           "dipole field error at 10 exterior probes: " + fmt(err) + " (tol " +
               fmt(REPRESENTATION_TOL) + ")");
}

void check_10_embedding_identity() {
    auto g = std::make_shared<const TriangleGrid>(make_regular_sphere(1));
    auto ref = std::make_shared<const BarycentricRefinement>(*g);
    const TriangleGrid& fine = ref->fine();
    const RealMat gram = RealMat(l2_gram(fine));
    const Mat wfine = assemble_dense(fine, cplx(2.0, 0.0), IntegralKind::Electric,
                                     ACCURATE_ORDERS);

    double worst_identity = 0.0, worst_routes = 0.0;
    for (SpaceKind kind : {SpaceKind::RWG, SpaceKind::BC}) {
        FunctionSpace space(g, kind, ref);
        const RealMat cross_mass = RealMat(cross_l2_mass(space));
        const RealMat embed = RealMat(space.fine_realization());
        worst_identity = std::max(
            worst_identity, (cross_mass - embed * gram).norm() / cross_mass.norm());

        // The same coarse Galerkin block through the two constructions:
        // the stored coefficient map, and the map recovered by fine-grid
        // mass solves against the cross mass.
        const RealMat solved = gram.ldlt().solve(cross_mass.transpose()).transpose();
        const Mat via_embed =
            embed.cast<cplx>() * wfine * embed.cast<cplx>().transpose();
        const Mat via_solve =
            solved.cast<cplx>() * wfine * solved.cast<cplx>().transpose();
        worst_routes =
            std::max(worst_routes, (via_embed - via_solve).norm() / via_embed.norm());
    }
    const bool pass =
        worst_identity <= EMBEDDING_IDENTITY_TOL && worst_routes <= SANDWICH_ROUTE_TOL;
    report(pass, "10 embedding-identity",
           "cross-mass identity " + fmt(worst_identity) + " (tol " +
               fmt(EMBEDDING_IDENTITY_TOL) + "); construction routes " + fmt(worst_routes) +
               " (tol " + fmt(SANDWICH_ROUTE_TOL) + ")");
}

// ---------------------------------------------------------------------- //

void smoke_runs(const std::string& label, std::shared_ptr<const TriangleGrid> g, double k,
                const Vec3& p, const Vec3& d, int cal_max, int mfie_max, int cfie_max) {
    PlaneWave wave = PlaneWave::make(p, d, k);
    MultitraceOperator mt(g, cplx(k, 0.0), FAST_ORDERS);
    mt.ensure(true, true);  // one shared kernel sweep for all three solves
    const std::vector<std::pair<Formulation, int>> runs = {
        {Formulation::EfieCalderon, cal_max},
        {Formulation::Mfie, mfie_max},
        {Formulation::Cfie, cfie_max},
    };
    for (const auto& [f, bound] : runs) {
        SolveReport rep = solve_scattering(f, mt, wave, GMRES);
        const bool pass = rep.iteration.converged && rep.iteration.iterations <= bound;
        report(pass, "smoke " + label + "-" + formulation_name(f),
               std::to_string(rep.iteration.iterations) + " iterations (bound " +
                   std::to_string(bound) + "), residual " +
                   fmt(rep.iteration.residual_history.empty()
                           ? 1.0
                           : rep.iteration.residual_history.back()));
    }
}

}  // namespace

int main() {
    const auto t0 = Clock::now();
    std::cout << "acceptance checks (tolerances pinned in source)\n";

    check_1_mass_conditioning();
    check_2_projector_idempotence_cube();
    {
        auto g2 = std::make_shared<const TriangleGrid>(make_regular_sphere(2));
        MultitraceOperator mt2(g2, cplx(2.0, 0.0), ACCURATE_ORDERS);
        check_3_calderon_square(mt2);
        check_5_eigenvalue_clustering(mt2);
    }
    check_4_efie_iteration_bound();
    check_6_resonance_immunity();
    check_7_quadrature_oracle();
    {
        auto g3 = std::make_shared<const TriangleGrid>(make_regular_sphere(3));
        MultitraceOperator mt3(g3, cplx(2.0, 0.0), ACCURATE_ORDERS);
        check_8_extinction(mt3);
        check_9_representation_formula(mt3);
    }
    check_10_embedding_identity();

    smoke_runs("menger", std::make_shared<const TriangleGrid>(make_menger_level1(0.08)),
               5.0, {-1, 2, 0}, {0.894, 0.447, 0}, SMOKE_MENGER_CAL, SMOKE_MENGER_MFIE,
               SMOKE_MENGER_CFIE);
    smoke_runs("almond", std::make_shared<const TriangleGrid>(make_almond(ALMOND_H)),
               20.0 * std::numbers::pi, {0, 0, 1}, {1, 0, 0}, SMOKE_ALMOND_CAL,
               SMOKE_ALMOND_MFIE, SMOKE_ALMOND_CFIE);

    std::cout << (failures == 0 ? "all acceptance checks passed"
                                : std::to_string(failures) + " check(s) failed")
              << " in " << fmt(seconds_since(t0)) << "s\n";
    return failures == 0 ? 0 : 1;
}
