#pragma once

#include <functional>
#include <string>
#include <vector>

#include "calbem/gridfunction.hpp"
#include "calbem/multitrace.hpp"
#include "calbem/potentials.hpp"

namespace calbem {

/// The scattering formulations exposed by the solver layer.
///  efie           classical single-pairing electric-field equation (weak
///                 system, no preconditioning)
///  cal-efie       electric-field equation preconditioned by a second
///                 electric operator through the dual pairing
///  direct-efie    first-kind equation for the scattered Neumann trace
///  mfie           second-kind magnetic-field equation
///  cfie           combined field: direct-efie regularised at wavenumber ik
///                 plus the magnetic identity row (resonance free)
enum class Formulation { EfiePlain, EfieCalderon, EfieDirect, Mfie, Cfie };

std::string formulation_name(Formulation f);
Formulation parse_formulation(const std::string& name);

struct GmresOptions {
    double tol = 1e-5;
    int max_iter = 2000;
};

struct GmresResult {
    Vec x;
    int iterations = 0;
    bool converged = false;
    bool stagnated = false;
    /// Relative residual per Arnoldi step; entry 0 is the initial residual 1.
    std::vector<double> residual_history;
};

/// Unrestarted GMRES with modified Gram-Schmidt and Givens updates.
GmresResult gmres(const std::function<Vec(const Vec&)>& apply, const Vec& b,
                  const GmresOptions& opt = {});

/// Dense LU direct solve (reference path).
Vec lu_solve(const Mat& a, const Vec& b);

/// Direct Galerkin solve of  op x = rhs  (strong sense): factorizes the weak
/// matrix once and applies the range pairing mass to the right-hand side.
GridFunction lu_solve(const BoundaryOperator& op, const GridFunction& rhs);

struct SolveReport {
    Formulation formulation = Formulation::EfieCalderon;
    cplx k;
    /// The solved-for density: expansion coefficients in RWG for every
    /// formulation.
    GridFunction density;
    /// Incident Dirichlet trace projected into BC (kept for field evaluation
    /// of the direct-efie/cfie representations; empty otherwise).
    GridFunction dirichlet_data;
    GmresResult iteration;
    double assemble_seconds = 0.0;
    double solve_seconds = 0.0;
};

/// Solves the PEC scattering problem for the given incident wave.  The
/// multitrace operator supplies grid, wavenumber, spaces and (lazily) the
/// Galerkin blocks; formulations only assemble what they reference.
/// `coarse_opt`, if given, overrides the quadrature for the single-pairing
/// efie's coarse assembly.
SolveReport solve_scattering(Formulation f, const MultitraceOperator& mt,
                             const PlaneWave& wave, const GmresOptions& gopt = {},
                             const AssemblyOptions* coarse_opt = nullptr);

/// Scattered electric field of a solution at off-surface points.
std::vector<CVec3> scattered_field(const SolveReport& rep, const std::vector<Vec3>& points,
                                   int quadrature_order = 5);

/// Field radiated by a Cauchy trace pair:  -H(dirichlet) - E(neumann), the
/// representation of the interior-domain solution with those traces.
std::vector<CVec3> representation_field(const MultitraceOperator& mt, const TracePair& t,
                                        const std::vector<Vec3>& points,
                                        int quadrature_order = 5);

struct SweepPoint {
    double k = 0.0;
    Formulation formulation = Formulation::Cfie;
    int iterations = 0;
    double final_residual = 0.0;
    bool converged = false;
};

/// Iteration-count sweep over wavenumbers for a set of formulations; one
/// multitrace assembly per wavenumber, shared across formulations.
std::vector<SweepPoint> resonance_sweep(std::shared_ptr<const TriangleGrid> grid,
                                        const std::vector<double>& ks,
                                        const std::vector<Formulation>& formulations,
                                        const Vec3& polarization, const Vec3& direction,
                                        const AssemblyOptions& opt = {},
                                        const GmresOptions& gopt = {});

} // namespace calbem
