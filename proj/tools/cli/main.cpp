// Command line front end: conditioning reports, Calderon-identity checks,
// single scattering solves and wavenumber sweeps, with machine-readable
// outputs (run.json, CSV tables, legacy VTK dumps).
//
// Exit codes: 0 success, 2 numerical acceptance failure, 3 solver failure,
// 4 configuration error.

#include <CLI11.hpp>
#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "calbem/assembly.hpp"
#include "calbem/gridfunction.hpp"
#include "calbem/multitrace.hpp"
#include "calbem/potentials.hpp"
#include "calbem/shapes.hpp"
#include "calbem/solvers.hpp"
#include "calbem/spaces.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace calbem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAcceptance = 2;
constexpr int kExitSolver = 3;
constexpr int kExitConfig = 4;

struct Options {
    std::string shape = "sphere:3";
    double k = 2.0;
    double omega = 0.0;  // 0 = not given; otherwise overrides k
    double eps0 = 8.8541878128e-12;
    double mu0 = 1.25663706212e-6;
    std::string formulation = "cal-efie";
    double tol = 1e-5;
    int max_iter = 2000;
    std::vector<double> p = {1.0, 0.0, 0.0};
    std::vector<double> d = {0.0, 0.0, 1.0};
    int probe_count = 0;
    double probe_radius = 2.5;
    std::string probes_file;
    bool vtk = false;
    std::string slice_axis;  // "", "x", "y" or "z"
    double slice_coord = 0.0;
    double slice_extent = 2.0;
    int slice_n = 24;
    std::string ks = "2.0";
    std::string formulations = "cfie";
    double defect_tol = 2e-2;
    double band_lo = 2.5;
    double band_hi = 5.0;
    double naive_min = 1e10;
    int quad_regular = 4;
    int quad_singular = 5;
    int quad_near = 5;
    double near_factor = 1.5;
    int seed = 0;
    int threads = 1;
    std::string out = "calbem-run";
    std::string config;
};

void add_common_flags(CLI::App* sub, Options& o) {
    sub->add_option("--shape", o.shape,
                    "Scatterer: sphere:L, cube:H, menger:H, almond:H, msh:PATH");
    sub->add_option("--quad-regular", o.quad_regular, "Quadrature order, separated pairs");
    sub->add_option("--quad-singular", o.quad_singular, "Quadrature order, singular pairs");
    sub->add_option("--quad-near", o.quad_near, "Quadrature order, near pairs");
    sub->add_option("--near-factor", o.near_factor, "Near-band width in triangle diameters");
    sub->add_option("--seed", o.seed, "Random seed recorded with the run");
    sub->add_option("--threads", o.threads,
                    "Recorded with the run; this build executes single threaded");
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--config", o.config, "JSON file whose values override the flags");
}

void add_wave_flags(CLI::App* sub, Options& o) {
    sub->add_option("--k", o.k, "Wavenumber");
    sub->add_option("--omega", o.omega, "Angular frequency; k = omega*sqrt(eps0*mu0)");
    sub->add_option("--eps0", o.eps0, "Vacuum permittivity for the omega conversion");
    sub->add_option("--mu0", o.mu0, "Vacuum permeability for the omega conversion");
    sub->add_option("--p", o.p, "Polarization px,py,pz")->delimiter(',')->expected(-3);
    sub->add_option("--d", o.d, "Propagation direction dx,dy,dz")->delimiter(',')->expected(-3);
}

void add_solver_flags(CLI::App* sub, Options& o) {
    sub->add_option("--tol", o.tol, "GMRES relative residual tolerance");
    sub->add_option("--max-iter", o.max_iter, "GMRES iteration cap");
}

// The config file overrides whatever the flags said.
void overlay_config(Options& o) {
    if (o.config.empty()) return;
    std::ifstream in(o.config);
    if (!in.good()) throw std::invalid_argument("cannot read config file '" + o.config + "'");
    nlohmann::json j = nlohmann::json::parse(in);
    auto get = [&](const char* key, auto& slot) {
        if (j.contains(key)) slot = j.at(key).get<std::decay_t<decltype(slot)>>();
    };
    get("shape", o.shape);
    get("k", o.k);
    get("omega", o.omega);
    get("eps0", o.eps0);
    get("mu0", o.mu0);
    get("formulation", o.formulation);
    get("tol", o.tol);
    get("max_iter", o.max_iter);
    get("polarization", o.p);
    get("direction", o.d);
    get("probe_count", o.probe_count);
    get("probe_radius", o.probe_radius);
    get("probes_file", o.probes_file);
    get("vtk", o.vtk);
    get("slice_axis", o.slice_axis);
    get("slice_coord", o.slice_coord);
    get("slice_extent", o.slice_extent);
    get("slice_n", o.slice_n);
    get("ks", o.ks);
    get("formulations", o.formulations);
    get("defect_tol", o.defect_tol);
    get("band_lo", o.band_lo);
    get("band_hi", o.band_hi);
    get("naive_min", o.naive_min);
    get("quad_regular", o.quad_regular);
    get("quad_singular", o.quad_singular);
    get("quad_near", o.quad_near);
    get("near_factor", o.near_factor);
    get("seed", o.seed);
    get("threads", o.threads);
    get("out", o.out);
}

Vec3 to_vec3(const std::vector<double>& v, const char* what) {
    if (v.size() != 3) throw std::invalid_argument(std::string(what) + " needs three components");
    return {v[0], v[1], v[2]};
}

double resolved_k(const Options& o) {
    if (o.omega > 0.0) return o.omega * std::sqrt(o.eps0 * o.mu0);
    return o.k;
}

AssemblyOptions assembly_options(const Options& o) {
    return {o.quad_regular, o.quad_singular, o.quad_near, o.near_factor};
}

ordered_json config_json(const Options& o, bool wave, bool solver) {
    ordered_json c;
    c["shape"] = o.shape;
    if (wave) {
        c["k"] = o.k;
        if (o.omega > 0.0) {
            c["omega"] = o.omega;
            c["eps0"] = o.eps0;
            c["mu0"] = o.mu0;
        }
        c["polarization"] = o.p;
        c["direction"] = o.d;
    }
    if (solver) {
        c["formulation"] = o.formulation;
        c["tol"] = o.tol;
        c["max_iter"] = o.max_iter;
    }
    c["quad_regular"] = o.quad_regular;
    c["quad_singular"] = o.quad_singular;
    c["quad_near"] = o.quad_near;
    c["near_factor"] = o.near_factor;
    c["seed"] = o.seed;
    c["threads"] = o.threads;
    c["out"] = o.out;
    return c;
}

void write_run_json(const fs::path& dir, const std::string& command, const ordered_json& config,
                    const ordered_json& result) {
    ordered_json j;
    j["command"] = command;
    j["config"] = config;
    j["result"] = result;
    std::ofstream out(dir / "run.json");
    out << j.dump(2) << "\n";
}

fs::path prepare_out(const Options& o) {
    fs::path dir(o.out);
    fs::create_directories(dir);
    return dir;
}

double condition_number(const RealMat& m) {
    Eigen::BDCSVD<RealMat> svd(m);
    const auto& s = svd.singularValues();
    return s(0) / s(s.size() - 1);
}

void write_residuals_csv(const fs::path& dir, const std::vector<double>& history) {
    std::ofstream out(dir / "residuals.csv");
    out << "iteration,residual\n";
    out.precision(12);
    for (std::size_t i = 0; i < history.size(); ++i) out << i << "," << history[i] << "\n";
}

void write_fields_csv(const fs::path& path, const std::vector<Vec3>& pts,
                      const std::vector<CVec3>& vals) {
    std::ofstream out(path);
    out << "x,y,z,re_ex,im_ex,re_ey,im_ey,re_ez,im_ez\n";
    out.precision(12);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& x = pts[i];
        const auto& v = vals[i];
        out << x.x << "," << x.y << "," << x.z << "," << v.x.real() << "," << v.x.imag() << ","
            << v.y.real() << "," << v.y.imag() << "," << v.z.real() << "," << v.z.imag() << "\n";
    }
}

std::vector<Vec3> read_probes_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw std::invalid_argument("cannot read probe file '" + path + "'");
    std::vector<Vec3> pts;
    std::string line;
    while (std::getline(in, line)) {
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double x, y, z;
        if (ss >> x >> y >> z) pts.push_back({x, y, z});
    }
    if (pts.empty())
        throw std::invalid_argument("probe file '" + path + "' holds no x,y,z rows");
    return pts;
}

void write_surface_vtk(const fs::path& dir, const TriangleGrid& g,
                       const std::vector<CVec3>& current) {
    std::ofstream out(dir / "solution.vtk");
    out << "# vtk DataFile Version 3.0\n";
    out << "surface current density\n";
    out << "ASCII\n";
    out << "DATASET UNSTRUCTURED_GRID\n";
    out.precision(9);
    out << "POINTS " << g.num_vertices() << " double\n";
    for (int v = 0; v < g.num_vertices(); ++v) {
        const Vec3& x = g.vertex(v);
        out << x.x << " " << x.y << " " << x.z << "\n";
    }
    out << "CELLS " << g.num_triangles() << " " << 4 * g.num_triangles() << "\n";
    for (int t = 0; t < g.num_triangles(); ++t) {
        const auto& tri = g.triangle(t);
        out << "3 " << tri[0] << " " << tri[1] << " " << tri[2] << "\n";
    }
    out << "CELL_TYPES " << g.num_triangles() << "\n";
    for (int t = 0; t < g.num_triangles(); ++t) out << "5\n";
    out << "CELL_DATA " << g.num_triangles() << "\n";
    out << "SCALARS current_magnitude double 1\n";
    out << "LOOKUP_TABLE default\n";
    for (const auto& v : current) out << norm(v) << "\n";
    out << "VECTORS current_real double\n";
    for (const auto& v : current)
        out << v.x.real() << " " << v.y.real() << " " << v.z.real() << "\n";
}

struct SlicePoints {
    std::vector<Vec3> pts;
    std::array<int, 3> dims;
    Vec3 origin;
    Vec3 spacing;
};

SlicePoints slice_points(const Options& o) {
    const int n = std::max(2, o.slice_n);
    const double ext = o.slice_extent;
    const double step = 2.0 * ext / (n - 1);
    SlicePoints s;
    int axis;
    if (o.slice_axis == "x") axis = 0;
    else if (o.slice_axis == "y") axis = 1;
    else if (o.slice_axis == "z") axis = 2;
    else throw std::invalid_argument("--slice-axis must be x, y or z");
    s.dims = {n, n, n};
    s.dims[axis] = 1;
    s.origin = {-ext, -ext, -ext};
    s.spacing = {step, step, step};
    switch (axis) {
        case 0: s.origin.x = o.slice_coord; s.spacing.x = 1.0; break;
        case 1: s.origin.y = o.slice_coord; s.spacing.y = 1.0; break;
        default: s.origin.z = o.slice_coord; s.spacing.z = 1.0; break;
    }
    // VTK structured points run x fastest, then y, then z.
    for (int kz = 0; kz < s.dims[2]; ++kz)
        for (int ky = 0; ky < s.dims[1]; ++ky)
            for (int kx = 0; kx < s.dims[0]; ++kx)
                s.pts.push_back({s.origin.x + kx * s.spacing.x, s.origin.y + ky * s.spacing.y,
                                 s.origin.z + kz * s.spacing.z});
    return s;
}

void write_slice_vtk(const fs::path& dir, const SlicePoints& s,
                     const std::vector<CVec3>& scattered, const PlaneWave& wave) {
    std::ofstream out(dir / "slice.vtk");
    out << "# vtk DataFile Version 3.0\n";
    out << "scattered and total electric field slice\n";
    out << "ASCII\n";
    out << "DATASET STRUCTURED_POINTS\n";
    out << "DIMENSIONS " << s.dims[0] << " " << s.dims[1] << " " << s.dims[2] << "\n";
    out.precision(9);
    out << "ORIGIN " << s.origin.x << " " << s.origin.y << " " << s.origin.z << "\n";
    out << "SPACING " << s.spacing.x << " " << s.spacing.y << " " << s.spacing.z << "\n";
    out << "POINT_DATA " << s.pts.size() << "\n";
    out << "SCALARS scattered_magnitude double 1\n";
    out << "LOOKUP_TABLE default\n";
    for (const auto& v : scattered) out << norm(v) << "\n";
    out << "SCALARS total_magnitude double 1\n";
    out << "LOOKUP_TABLE default\n";
    for (std::size_t i = 0; i < s.pts.size(); ++i)
        out << norm(scattered[i] + wave.field(s.pts[i])) << "\n";
}

int run_condition(Options o) {
    overlay_config(o);
    const fs::path dir = prepare_out(o);
    auto grid = std::make_shared<const TriangleGrid>(ShapeSpec::parse(o.shape).build());
    auto ref = std::make_shared<const BarycentricRefinement>(*grid);
    FunctionSpace rwg(grid, SpaceKind::RWG, ref);
    FunctionSpace rbc(grid, SpaceKind::RBC, ref);
    FunctionSpace snc(grid, SpaceKind::SNC);

    const double cond_dual = condition_number(RealMat(pairing_mass(rwg, rbc)));
    const double cond_naive = condition_number(RealMat(pairing_mass(rwg, snc)));

    ordered_json result;
    result["edges"] = grid->num_edges();
    result["cond_dual"] = cond_dual;
    result["cond_naive"] = cond_naive;
    result["band"] = {o.band_lo, o.band_hi};
    result["naive_min"] = o.naive_min;
    const bool pass = cond_dual >= o.band_lo && cond_dual <= o.band_hi &&
                      cond_naive >= o.naive_min;
    result["pass"] = pass;
    write_run_json(dir, "condition", config_json(o, false, false), result);
    std::cout << "shape " << o.shape << ": " << grid->num_edges() << " edges\n"
              << "pairing condition, dual-space test functions:  " << cond_dual << "\n"
              << "pairing condition, rotated-primal test funcs:  " << cond_naive << "\n";
    if (!pass) {
        std::cerr << "error: conditioning outside the acceptance band [" << o.band_lo << ", "
                  << o.band_hi << "] / naive floor " << o.naive_min << "\n";
        return kExitAcceptance;
    }
    return kExitOk;
}

int run_calderon_check(Options o) {
    overlay_config(o);
    const fs::path dir = prepare_out(o);
    const double k = resolved_k(o);
    auto grid = std::make_shared<const TriangleGrid>(ShapeSpec::parse(o.shape).build());
    MultitraceOperator mt(grid, cplx(k, 0.0), assembly_options(o));
    PlaneWave wave = PlaneWave::make(to_vec3(o.p, "--p"), to_vec3(o.d, "--d"), k);

    TracePair t;
    t.dirichlet = project(mt.rwg(), dirichlet_trace(wave)).coeffs;
    t.neumann = project(mt.bc(), neumann_trace(wave)).coeffs;
    const double base = std::sqrt(t.dirichlet.squaredNorm() + t.neumann.squaredNorm());

    TracePair interior = mt.calderon(t, false);
    TracePair exterior = mt.calderon(t, true);
    const double reproduction =
        std::sqrt((interior.dirichlet - t.dirichlet).squaredNorm() +
                  (interior.neumann - t.neumann).squaredNorm()) /
        base;
    const double annihilation =
        std::sqrt(exterior.dirichlet.squaredNorm() + exterior.neumann.squaredNorm()) / base;

    // The acceptance gate: applying the exterior projector once more must
    // change nothing.  Both trace components are checked separately.
    TracePair once = mt.calderon(t, true);
    TracePair twice = mt.calderon(once, true);
    const double idem_electric =
        (twice.dirichlet - once.dirichlet).norm() / once.dirichlet.norm();
    const double idem_magnetic = (twice.neumann - once.neumann).norm() / once.neumann.norm();

    ordered_json result;
    result["k"] = k;
    result["reproduction_rel"] = reproduction;
    result["annihilation_rel"] = annihilation;
    result["idempotence_electric_rel"] = idem_electric;
    result["idempotence_magnetic_rel"] = idem_magnetic;
    result["defect_tol"] = o.defect_tol;
    write_run_json(dir, "calderon-check", config_json(o, true, false), result);
    std::cout << "interior projector reproduces the traces to  " << reproduction << "\n"
              << "exterior projector annihilates them to       " << annihilation << "\n"
              << "projector idempotence defect, electric trace " << idem_electric << "\n"
              << "projector idempotence defect, magnetic trace " << idem_magnetic << "\n";
    if (idem_electric > o.defect_tol || idem_magnetic > o.defect_tol) {
        std::cerr << "error: idempotence defect (" << idem_electric << ", " << idem_magnetic
                  << ") exceeds --defect-tol " << o.defect_tol << "\n";
        return kExitAcceptance;
    }
    return kExitOk;
}

int run_solve(Options o) {
    overlay_config(o);
    const fs::path dir = prepare_out(o);
    const double k = resolved_k(o);
    ShapeSpec shape = ShapeSpec::parse(o.shape);
    auto grid = std::make_shared<const TriangleGrid>(shape.build());
    const Formulation f = parse_formulation(o.formulation);
    PlaneWave wave = PlaneWave::make(to_vec3(o.p, "--p"), to_vec3(o.d, "--d"), k);
    MultitraceOperator mt(grid, cplx(k, 0.0), assembly_options(o));
    GmresOptions gopt{o.tol, o.max_iter};

    SolveReport rep = solve_scattering(f, mt, wave, gopt);

    ordered_json result;
    result["k"] = k;
    result["edges"] = grid->num_edges();
    result["converged"] = rep.iteration.converged;
    result["iterations"] = rep.iteration.iterations;
    result["final_residual"] = rep.iteration.residual_history.empty()
                                   ? 1.0
                                   : rep.iteration.residual_history.back();
    result["density_l2"] = l2_norm(rep.density);
    result["assemble_seconds"] = rep.assemble_seconds;
    result["solve_seconds"] = rep.solve_seconds;

    // Extinction diagnostic: inside a perfect conductor the total field is
    // zero, so scattered ~ -incident at interior probes.
    auto interior = shape.interior_points(20);
    if (!interior.empty() && rep.iteration.converged) {
        auto vals = scattered_field(rep, interior);
        double defect = 0.0, base = 0.0;
        for (std::size_t i = 0; i < interior.size(); ++i) {
            defect += norm(vals[i] + wave.field(interior[i]));
            base += norm(wave.field(interior[i]));
        }
        result["extinction_rel"] = defect / base;
    }

    write_run_json(dir, "solve", config_json(o, true, true), result);
    write_residuals_csv(dir, rep.iteration.residual_history);

    if (!o.probes_file.empty()) {
        auto pts = read_probes_csv(o.probes_file);
        write_fields_csv(dir / "fields.csv", pts, scattered_field(rep, pts));
    } else if (o.probe_count > 0) {
        auto pts = exterior_points(*grid, o.probe_count, o.probe_radius);
        write_fields_csv(dir / "fields.csv", pts, scattered_field(rep, pts));
    }
    if (!o.slice_axis.empty()) {
        SlicePoints s = slice_points(o);
        auto vals = scattered_field(rep, s.pts);
        write_fields_csv(dir / "slice.csv", s.pts, vals);
        write_slice_vtk(dir, s, vals, wave);
    }
    if (o.vtk) write_surface_vtk(dir, *grid, centroid_values(rep.density));

    std::cout << formulation_name(f) << " on " << o.shape << " at k=" << k << ": "
              << (rep.iteration.converged ? "converged" : "NOT converged") << " in "
              << rep.iteration.iterations << " iterations, residual "
              << result["final_residual"].get<double>() << "\n";
    return rep.iteration.converged ? kExitOk : kExitSolver;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stod(item));
    if (out.empty()) throw std::invalid_argument("empty list: '" + text + "'");
    return out;
}

std::vector<Formulation> parse_formulation_list(const std::string& text) {
    std::vector<Formulation> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(parse_formulation(item));
    if (out.empty()) throw std::invalid_argument("empty list: '" + text + "'");
    return out;
}

int run_sweep(Options o) {
    overlay_config(o);
    const fs::path dir = prepare_out(o);
    auto grid = std::make_shared<const TriangleGrid>(ShapeSpec::parse(o.shape).build());
    const auto ks = parse_double_list(o.ks);
    const auto fs_list = parse_formulation_list(o.formulations);
    GmresOptions gopt{o.tol, o.max_iter};

    auto points = resonance_sweep(grid, ks, fs_list, to_vec3(o.p, "--p"), to_vec3(o.d, "--d"),
                                  assembly_options(o), gopt);

    {
        std::ofstream csv(dir / "sweep.csv");
        csv << "k,formulation,iterations,final_residual\n";
        csv.precision(12);
        for (const auto& pt : points)
            csv << pt.k << "," << formulation_name(pt.formulation) << "," << pt.iterations << ","
                << pt.final_residual << "\n";
    }

    bool all_converged = true;
    for (const auto& pt : points) all_converged = all_converged && pt.converged;

    ordered_json result;
    result["points"] = points.size();
    result["all_converged"] = all_converged;
    write_run_json(dir, "sweep", config_json(o, true, true), result);

    for (const auto& pt : points)
        std::cout << "k=" << pt.k << " " << formulation_name(pt.formulation) << ": "
                  << pt.iterations << " iterations" << (pt.converged ? "" : " (NOT converged)")
                  << "\n";
    return all_converged ? kExitOk : kExitSolver;
}

void print_manifest() {
    ordered_json m;
    m["sphere-pairing-conditioning"] = "calbem condition --shape sphere:3";
    m["calderon-projector-defect"] = "calbem calderon-check --shape sphere:3 --k 2.0";
    m["cube-calderon-defect"] = "calbem calderon-check --shape cube:0.0909090909 --k 2.0";
    m["iteration-growth-sphere-level1"] =
        "calbem solve --shape sphere:1 --k 2.0 --formulation efie";
    m["iteration-growth-sphere-level2"] =
        "calbem solve --shape sphere:2 --k 2.0 --formulation efie";
    m["iteration-growth-sphere-level3"] =
        "calbem solve --shape sphere:3 --k 2.0 --formulation efie";
    m["preconditioned-sphere-level3"] =
        "calbem solve --shape sphere:3 --k 2.0 --formulation cal-efie";
    m["resonance-sweep-sphere"] =
        "calbem sweep --shape sphere:3 --ks 2.0,2.744,3.5,4.493,5.0 "
        "--formulations efie,mfie,cfie";
    m["menger-cavity-field-slice"] =
        "calbem solve --shape menger:0.08 --k 5.0 --p=-1,2,0 --d=0.894,0.447,0 "
        "--formulation cal-efie --slice-axis z --slice-coord 0.0 --slice-extent 1.0";
    m["menger-cavity-smoke"] =
        "calbem sweep --shape menger:0.08 --ks 5.0 --formulations cal-efie,mfie,cfie "
        "--p=-1,2,0 --d=0.894,0.447,0";
    m["almond-smoke"] =
        "calbem sweep --shape almond:0.028 --ks 5.0 --formulations cal-efie,mfie,cfie";
    std::cout << m.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Galerkin boundary element solver for perfectly conducting scatterers"};
    app.require_subcommand(0, 1);
    bool emit_manifest = false;
    app.add_flag("--emit-manifest", emit_manifest,
                 "Print the scenario -> command map as JSON and exit");

    Options o;
    CLI::App* cond = app.add_subcommand("condition", "Pairing-mass conditioning report");
    add_common_flags(cond, o);
    cond->add_option("--band-lo", o.band_lo, "Lower acceptance bound for the dual pairing");
    cond->add_option("--band-hi", o.band_hi, "Upper acceptance bound for the dual pairing");
    cond->add_option("--naive-min", o.naive_min,
                     "Acceptance floor for the rotated-primal pairing condition");

    CLI::App* cald = app.add_subcommand(
        "calderon-check", "Calderon projector consistency on incident-wave traces");
    add_common_flags(cald, o);
    add_wave_flags(cald, o);
    cald->add_option("--defect-tol", o.defect_tol,
                     "Fail (exit 2) if the reproduction defect exceeds this");

    CLI::App* solve = app.add_subcommand("solve", "Solve one scattering problem");
    add_common_flags(solve, o);
    add_wave_flags(solve, o);
    add_solver_flags(solve, o);
    solve->add_option("--formulation", o.formulation,
                      "efie, cal-efie, direct-efie, mfie or cfie");
    solve->add_option("--probe-count", o.probe_count,
                      "Evaluate the scattered field at this many exterior points");
    solve->add_option("--probe-radius", o.probe_radius, "Probe shell radius factor");
    solve->add_option("--probes", o.probes_file,
                      "CSV of x,y,z probe points (overrides --probe-count)");
    solve->add_option("--slice-axis", o.slice_axis, "Write a field slice normal to x, y or z");
    solve->add_option("--slice-coord", o.slice_coord, "Slice plane coordinate");
    solve->add_option("--slice-extent", o.slice_extent, "Slice half width");
    solve->add_option("--slice-n", o.slice_n, "Slice resolution per axis");
    solve->add_flag("--vtk", o.vtk, "Write the surface current as solution.vtk");

    CLI::App* sweep = app.add_subcommand("sweep", "Iteration counts over a wavenumber list");
    add_common_flags(sweep, o);
    add_wave_flags(sweep, o);
    add_solver_flags(sweep, o);
    sweep->add_option("--ks", o.ks, "Comma separated wavenumbers");
    sweep->add_option("--formulations", o.formulations, "Comma separated formulation names");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (emit_manifest) {
            print_manifest();
            return kExitOk;
        }
        if (cond->parsed()) return run_condition(o);
        if (cald->parsed()) return run_calderon_check(o);
        if (solve->parsed()) return run_solve(o);
        if (sweep->parsed()) return run_sweep(o);
        std::cout << app.help();
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}
