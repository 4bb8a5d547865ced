#include "calbem/solvers.hpp"

#include <Eigen/Dense>
#include <chrono>
#include <stdexcept>

namespace calbem {

std::string formulation_name(Formulation f) {
    switch (f) {
        case Formulation::EfiePlain: return "efie";
        case Formulation::EfieCalderon: return "cal-efie";
        case Formulation::EfieDirect: return "direct-efie";
        case Formulation::Mfie: return "mfie";
        case Formulation::Cfie: return "cfie";
    }
    return "?";
}

Formulation parse_formulation(const std::string& name) {
    if (name == "efie") return Formulation::EfiePlain;
    if (name == "cal-efie" || name == "efie-cal") return Formulation::EfieCalderon;
    if (name == "direct-efie" || name == "efie-direct") return Formulation::EfieDirect;
    if (name == "mfie") return Formulation::Mfie;
    if (name == "cfie") return Formulation::Cfie;
    throw std::invalid_argument("unknown formulation '" + name +
                                "' (efie, cal-efie, direct-efie, mfie, cfie)");
}

GmresResult gmres(const std::function<Vec(const Vec&)>& apply, const Vec& b,
                  const GmresOptions& opt) {
    GmresResult res;
    const Eigen::Index n = b.size();
    const double bnorm = b.norm();
    res.residual_history.push_back(1.0);
    if (bnorm == 0.0) {
        res.x = Vec::Zero(n);
        res.converged = true;
        res.residual_history.back() = 0.0;
        return res;
    }

    std::vector<Vec> v;
    v.push_back(b / bnorm);
    std::vector<std::vector<cplx>> hcols;                 // column j: h(0..j+1, j)
    std::vector<Eigen::JacobiRotation<cplx>> rotations;
    std::vector<cplx> g{cplx(bnorm, 0.0)};

    const int maxit = std::max(1, std::min<int>(opt.max_iter, int(n)));
    double rel = 1.0;
    int j = 0;
    for (; j < maxit; ++j) {
        Vec w = apply(v[std::size_t(j)]);
        std::vector<cplx> h(std::size_t(j) + 2, cplx(0.0));
        for (int i = 0; i <= j; ++i) {
            const cplx hij = v[std::size_t(i)].dot(w); // conjugates v_i
            h[std::size_t(i)] = hij;
            w -= hij * v[std::size_t(i)];
        }
        const double wnorm = w.norm();
        h[std::size_t(j) + 1] = cplx(wnorm, 0.0);

        // Eigen's makeGivens(p, q) yields J with J^* [p;q] = [r;0], where
        // J^* = [[conj(c), -s], [conj(s), c]]; apply J^* throughout.
        for (int i = 0; i < j; ++i) {
            const auto& r = rotations[std::size_t(i)];
            const cplx a = h[std::size_t(i)], c = h[std::size_t(i) + 1];
            h[std::size_t(i)] = std::conj(r.c()) * a - r.s() * c;
            h[std::size_t(i) + 1] = std::conj(r.s()) * a + r.c() * c;
        }
        Eigen::JacobiRotation<cplx> rot;
        rot.makeGivens(h[std::size_t(j)], h[std::size_t(j) + 1]);
        h[std::size_t(j)] = std::conj(rot.c()) * h[std::size_t(j)] -
                            rot.s() * h[std::size_t(j) + 1];
        h[std::size_t(j) + 1] = cplx(0.0);
        const cplx gj = g[std::size_t(j)];
        g[std::size_t(j)] = std::conj(rot.c()) * gj;
        g.push_back(std::conj(rot.s()) * gj);
        rotations.push_back(rot);
        hcols.push_back(std::move(h));

        rel = std::abs(g.back()) / bnorm;
        res.residual_history.push_back(rel);
        if (rel <= opt.tol) {
            res.converged = true;
            ++j;
            break;
        }
        if (wnorm <= 1e-14 * bnorm) { // happy breakdown without hitting tol
            res.converged = rel <= opt.tol;
            ++j;
            break;
        }
        v.push_back(w / wnorm);
    }

    const int m = int(hcols.size());
    Eigen::VectorXcd y(m);
    for (int i = m - 1; i >= 0; --i) {
        cplx s = g[std::size_t(i)];
        for (int l = i + 1; l < m; ++l) s -= hcols[std::size_t(l)][std::size_t(i)] * y[l];
        y[i] = s / hcols[std::size_t(i)][std::size_t(i)];
    }
    Vec x = Vec::Zero(n);
    for (int i = 0; i < m; ++i) x += y[i] * v[std::size_t(i)];
    res.x = std::move(x);
    res.iterations = m;
    if (!res.converged && res.residual_history.size() > 100) {
        const double half_ago =
            res.residual_history[res.residual_history.size() / 2];
        res.stagnated = rel > 0.1 * half_ago;
    }
    return res;
}

Vec lu_solve(const Mat& a, const Vec& b) {
    if (a.rows() != a.cols() || a.rows() != b.size())
        throw std::invalid_argument("lu_solve: shape mismatch");
    return Eigen::PartialPivLU<Mat>(a).solve(b);
}

GridFunction lu_solve(const BoundaryOperator& op, const GridFunction& rhs) {
    if (!op.valid()) throw std::invalid_argument("lu_solve: empty operator");
    if (rhs.coeffs.size() != op.range().size() || !rhs.space.same_grid(op.range()) ||
        rhs.space.kind() != op.range().kind())
        throw std::invalid_argument("lu_solve: rhs must live in the operator's range space");
    // Galerkin system  W x = M_(range,dual) rhs  so that  op x == rhs in the
    // strong sense.
    Vec b = SpMatC(op.range_mass().matrix().cast<cplx>()) * rhs.coeffs;
    return {op.domain(), lu_solve(op.weak_matrix(), b)};
}

// ---------------------------------------------------------------------------
// formulations

namespace {

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

GmresResult run_gmres_operator(const BoundaryOperator& op, const Vec& rhs,
                               const GmresOptions& gopt) {
    return gmres([&op](const Vec& x) { return op.strong_apply(x); }, rhs, gopt);
}

} // namespace

SolveReport solve_scattering(Formulation f, const MultitraceOperator& mt,
                             const PlaneWave& wave, const GmresOptions& gopt,
                             const AssemblyOptions* coarse_opt) {
    const cplx k = mt.wavenumber();
    if (std::abs(k - cplx(wave.k)) > 1e-12 * std::abs(k))
        throw std::invalid_argument("solve_scattering: wave and operator wavenumbers "
                                    "disagree");
    SolveReport rep;
    rep.formulation = f;
    rep.k = k;
    const auto t0 = std::chrono::steady_clock::now();

    switch (f) {
        case Formulation::EfiePlain: {
            // Weak single-pairing system  W_E lambda = <dirichlet trace, .>.
            const AssemblyOptions aopt = coarse_opt ? *coarse_opt : mt.options();
            const Mat w = assemble_dense(*mt.grid(), k, IntegralKind::Electric, aopt);
            const Vec b = project_functional(mt.snc(), dirichlet_trace(wave));
            rep.assemble_seconds = seconds_since(t0);
            const auto t1 = std::chrono::steady_clock::now();
            rep.iteration = gmres([&w](const Vec& x) { return Vec(w * x); }, b, gopt);
            rep.solve_seconds = seconds_since(t1);
            rep.density = GridFunction{mt.rwg(), rep.iteration.x};
            return rep;
        }
        case Formulation::EfieCalderon: {
            const BoundaryOperator op = mt.op_e1() * mt.op_e2();
            const GridFunction g = project(mt.bc(), mt.snc(), dirichlet_trace(wave));
            const Vec rhs = mt.op_e1().strong_apply(g.coeffs);
            rep.assemble_seconds = seconds_since(t0);
            const auto t1 = std::chrono::steady_clock::now();
            rep.iteration = run_gmres_operator(op, rhs, gopt);
            rep.solve_seconds = seconds_since(t1);
            rep.density = GridFunction{mt.rwg(), rep.iteration.x};
            return rep;
        }
        case Formulation::EfieDirect: {
            // E2 pi = (Id/2 + H2) g  for the scattered Neumann trace pi,
            // with g the incident Dirichlet trace in BC.
            const GridFunction g = project(mt.bc(), mt.snc(), dirichlet_trace(wave));
            const BoundaryOperator op = mt.op_e2();
            const BoundaryOperator rhs_op = cplx(0.5) * mt.id2() + mt.op_h2();
            const Vec rhs = rhs_op.strong_apply(g.coeffs);
            rep.assemble_seconds = seconds_since(t0);
            const auto t1 = std::chrono::steady_clock::now();
            rep.iteration = run_gmres_operator(op, rhs, gopt);
            rep.solve_seconds = seconds_since(t1);
            rep.density = GridFunction{mt.rwg(), rep.iteration.x};
            rep.dirichlet_data = g;
            return rep;
        }
        case Formulation::Mfie: {
            // -(Id/2 - H1) xi = g  with g the incident Dirichlet trace in
            // RWG; the scattered field is -H xi.
            const GridFunction g = project(mt.rwg(), mt.rbc(), dirichlet_trace(wave));
            const BoundaryOperator op = mt.op_h1() - cplx(0.5) * mt.id1();
            rep.assemble_seconds = seconds_since(t0);
            const auto t1 = std::chrono::steady_clock::now();
            rep.iteration = run_gmres_operator(op, g.coeffs, gopt);
            rep.solve_seconds = seconds_since(t1);
            rep.density = GridFunction{mt.rwg(), rep.iteration.x};
            return rep;
        }
        case Formulation::Cfie: {
            // Direct efie row regularised by the electric block at ik, plus
            // the magnetic identity row:
            //   [-R E2 + (Id/2 + H1)] pi = -R (Id/2 + H2) g - E1 g.
            const GridFunction g = project(mt.bc(), mt.snc(), dirichlet_trace(wave));
            MultitraceOperator regmt(mt.grid(), I * k, mt.options(), false,
                                     mt.refinement());
            const BoundaryOperator r = regmt.op_e1();
            const BoundaryOperator op =
                (cplx(0.5) * mt.id1() + mt.op_h1()) - r * mt.op_e2();
            const BoundaryOperator rhs_row1 = cplx(0.5) * mt.id2() + mt.op_h2();
            const Vec rhs = -r.strong_apply(rhs_row1.strong_apply(g.coeffs)) -
                            mt.op_e1().strong_apply(g.coeffs);
            rep.assemble_seconds = seconds_since(t0);
            const auto t1 = std::chrono::steady_clock::now();
            rep.iteration = run_gmres_operator(op, rhs, gopt);
            rep.solve_seconds = seconds_since(t1);
            rep.density = GridFunction{mt.rwg(), rep.iteration.x};
            rep.dirichlet_data = g;
            return rep;
        }
    }
    throw std::logic_error("solve_scattering: unhandled formulation");
}

std::vector<CVec3> scattered_field(const SolveReport& rep,
                                   const std::vector<Vec3>& points, int quadrature_order) {
    const cplx k = rep.k;
    std::vector<CVec3> out(points.size());
    const auto add = [&](const std::vector<CVec3>& f, cplx scale) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += f[i] * scale;
    };
    switch (rep.formulation) {
        case Formulation::EfiePlain:
        case Formulation::EfieCalderon: {
            PotentialOperator e(PotentialKind::Electric, rep.density.space, points, k,
                                quadrature_order);
            add(e.evaluate(rep.density.coeffs), cplx(-1.0));
            return out;
        }
        case Formulation::Mfie: {
            PotentialOperator h(PotentialKind::Magnetic, rep.density.space, points, k,
                                quadrature_order);
            add(h.evaluate(rep.density.coeffs), cplx(-1.0));
            return out;
        }
        case Formulation::EfieDirect:
        case Formulation::Cfie: {
            PotentialOperator h(PotentialKind::Magnetic, rep.dirichlet_data.space, points,
                                k, quadrature_order);
            PotentialOperator e(PotentialKind::Electric, rep.density.space, points, k,
                                quadrature_order);
            add(h.evaluate(rep.dirichlet_data.coeffs), cplx(1.0));
            add(e.evaluate(rep.density.coeffs), cplx(-1.0));
            return out;
        }
    }
    throw std::logic_error("scattered_field: unhandled formulation");
}

std::vector<CVec3> representation_field(const MultitraceOperator& mt, const TracePair& t,
                                        const std::vector<Vec3>& points,
                                        int quadrature_order) {
    const cplx k = mt.wavenumber();
    PotentialOperator h(PotentialKind::Magnetic, mt.dirichlet_space(), points, k,
                        quadrature_order);
    PotentialOperator e(PotentialKind::Electric, mt.neumann_space(), points, k,
                        quadrature_order);
    const auto hf = h.evaluate(t.dirichlet);
    const auto ef = e.evaluate(t.neumann);
    std::vector<CVec3> out(points.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = -hf[i] - ef[i];
    return out;
}

std::vector<SweepPoint> resonance_sweep(std::shared_ptr<const TriangleGrid> grid,
                                        const std::vector<double>& ks,
                                        const std::vector<Formulation>& formulations,
                                        const Vec3& polarization, const Vec3& direction,
                                        const AssemblyOptions& opt,
                                        const GmresOptions& gopt) {
    std::vector<SweepPoint> out;
    std::shared_ptr<const BarycentricRefinement> ref;
    for (double kv : ks) {
        MultitraceOperator mt(grid, cplx(kv), opt, false, ref);
        if (!ref) ref = mt.refinement();
        const PlaneWave wave = PlaneWave::make(polarization, direction, kv);
        for (Formulation f : formulations) {
            const SolveReport rep = solve_scattering(f, mt, wave, gopt);
            SweepPoint pt;
            pt.k = kv;
            pt.formulation = f;
            pt.iterations = rep.iteration.iterations;
            pt.final_residual = rep.iteration.residual_history.back();
            pt.converged = rep.iteration.converged;
            out.push_back(pt);
        }
    }
    return out;
}

} // namespace calbem
