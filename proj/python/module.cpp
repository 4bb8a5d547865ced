// Python bindings for the main library operations: building grids, the
// multitrace/Calderon operator algebra, the scattering solvers, and field
// evaluation.  Heavy data crosses the boundary as numpy arrays via Eigen.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "calbem/assembly.hpp"
#include "calbem/gridfunction.hpp"
#include "calbem/msh_io.hpp"
#include "calbem/multitrace.hpp"
#include "calbem/potentials.hpp"
#include "calbem/shapes.hpp"
#include "calbem/solvers.hpp"
#include "calbem/spaces.hpp"

namespace py = pybind11;
using namespace calbem;

namespace {

struct PyGrid {
    std::shared_ptr<const TriangleGrid> g;
};

struct PyReport {
    SolveReport rep;
};

Vec3 to_vec3(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }

std::vector<Vec3> to_points(const Eigen::Ref<const Eigen::MatrixXd>& m) {
    if (m.cols() != 3) throw std::invalid_argument("points must have shape (n, 3)");
    std::vector<Vec3> pts(m.rows());
    for (Eigen::Index i = 0; i < m.rows(); ++i) pts[i] = {m(i, 0), m(i, 1), m(i, 2)};
    return pts;
}

Eigen::MatrixXcd to_matrix(const std::vector<CVec3>& v) {
    Eigen::MatrixXcd m(Eigen::Index(v.size()), 3);
    for (std::size_t i = 0; i < v.size(); ++i) {
        m(Eigen::Index(i), 0) = v[i].x;
        m(Eigen::Index(i), 1) = v[i].y;
        m(Eigen::Index(i), 2) = v[i].z;
    }
    return m;
}

struct PyMultitrace {
    std::shared_ptr<MultitraceOperator> mt;

    PyMultitrace(const PyGrid& grid, std::complex<double> k, int regular, int singular,
                 int near, double near_factor) {
        mt = std::make_shared<MultitraceOperator>(
            grid.g, k, AssemblyOptions{regular, singular, near, near_factor});
    }

    const BoundaryOperator& block(const std::string& name) const {
        if (name == "h1") return mt->op_h1();
        if (name == "e1") return mt->op_e1();
        if (name == "e2") return mt->op_e2();
        if (name == "h2") return mt->op_h2();
        throw std::invalid_argument("unknown block '" + name + "' (use h1, e1, e2, h2)");
    }

    std::pair<Vec, Vec> apply(const Vec& dirichlet, const Vec& neumann) const {
        TracePair out = mt->apply(TracePair{dirichlet, neumann});
        return {out.dirichlet, out.neumann};
    }

    std::pair<Vec, Vec> calderon(const Vec& dirichlet, const Vec& neumann,
                                 bool exterior) const {
        TracePair out = mt->calderon(TracePair{dirichlet, neumann}, exterior);
        return {out.dirichlet, out.neumann};
    }
};

std::pair<double, double> pairing_condition(const PyGrid& grid) {
    auto ref = std::make_shared<const BarycentricRefinement>(*grid.g);
    FunctionSpace rwg(grid.g, SpaceKind::RWG, ref);
    FunctionSpace rbc(grid.g, SpaceKind::RBC, ref);
    FunctionSpace snc(grid.g, SpaceKind::SNC);
    const auto cond = [](const RealMat& m) {
        Eigen::BDCSVD<RealMat> svd(m);
        const auto& s = svd.singularValues();
        const double smin = s(s.size() - 1);
        return smin > 0.0 ? s(0) / smin : std::numeric_limits<double>::infinity();
    };
    return {cond(RealMat(pairing_mass(rwg, rbc))), cond(RealMat(pairing_mass(rwg, snc)))};
}

PyReport solve(const PyMultitrace& mt, const std::string& formulation,
               const std::array<double, 3>& p, const std::array<double, 3>& d, double tol,
               int max_iter) {
    const double k = mt.mt->wavenumber().real();
    PlaneWave wave = PlaneWave::make(to_vec3(p), to_vec3(d), k);
    return {solve_scattering(parse_formulation(formulation), *mt.mt, wave,
                             GmresOptions{tol, max_iter})};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Galerkin boundary element solver for perfectly conducting scatterers";

    py::class_<PyGrid>(m, "Grid")
        .def_property_readonly("num_vertices", [](const PyGrid& g) { return g.g->num_vertices(); })
        .def_property_readonly("num_edges", [](const PyGrid& g) { return g.g->num_edges(); })
        .def_property_readonly("num_triangles",
                               [](const PyGrid& g) { return g.g->num_triangles(); })
        .def_property_readonly("area",
                               [](const PyGrid& g) {
                                   double a = 0.0;
                                   for (int t = 0; t < g.g->num_triangles(); ++t)
                                       a += g.g->area(t);
                                   return a;
                               })
        .def_property_readonly("vertices",
                               [](const PyGrid& g) {
                                   Eigen::MatrixXd v(g.g->num_vertices(), 3);
                                   for (int i = 0; i < g.g->num_vertices(); ++i) {
                                       const Vec3& x = g.g->vertex(i);
                                       v(i, 0) = x.x;
                                       v(i, 1) = x.y;
                                       v(i, 2) = x.z;
                                   }
                                   return v;
                               })
        .def_property_readonly("triangles",
                               [](const PyGrid& g) {
                                   Eigen::MatrixXi t(g.g->num_triangles(), 3);
                                   for (int i = 0; i < g.g->num_triangles(); ++i) {
                                       const auto& tri = g.g->triangle(i);
                                       t(i, 0) = tri[0];
                                       t(i, 1) = tri[1];
                                       t(i, 2) = tri[2];
                                   }
                                   return t;
                               })
        .def("export_msh",
             [](const PyGrid& g, const std::string& path) { export_msh(*g.g, path); },
             py::arg("path"))
        .def("__repr__", [](const PyGrid& g) {
            return "<calbem.Grid " + std::to_string(g.g->num_vertices()) + " vertices, " +
                   std::to_string(g.g->num_edges()) + " edges, " +
                   std::to_string(g.g->num_triangles()) + " triangles>";
        });

    m.def("regular_sphere",
          [](int level) { return PyGrid{std::make_shared<const TriangleGrid>(
                              make_regular_sphere(level))}; },
          py::arg("level"), "Unit sphere from refined-octahedron subdivision");
    m.def("cube",
          [](double h) {
              return PyGrid{std::make_shared<const TriangleGrid>(make_cube(h))};
          },
          py::arg("h"), "Unit cube meshed at edge length h");
    m.def("menger",
          [](double h) {
              return PyGrid{std::make_shared<const TriangleGrid>(make_menger_level1(h))};
          },
          py::arg("h"), "Level-1 Menger sponge meshed at edge length h");
    m.def("almond",
          [](double h) {
              return PyGrid{std::make_shared<const TriangleGrid>(make_almond(h))};
          },
          py::arg("h"), "Unit-length almond benchmark body meshed at edge length h");
    m.def("import_msh",
          [](const std::string& path) {
              return PyGrid{std::make_shared<const TriangleGrid>(import_msh(path))};
          },
          py::arg("path"), "Read a Gmsh v2 ASCII surface mesh");

    m.def("pairing_condition", &pairing_condition, py::arg("grid"),
          "Condition numbers (dual pairing, rotated-primal pairing) of the grid's "
          "duality masses");

    py::class_<PyMultitrace>(m, "Multitrace")
        .def(py::init<const PyGrid&, std::complex<double>, int, int, int, double>(),
             py::arg("grid"), py::arg("k"), py::arg("regular_order") = 4,
             py::arg("singular_order") = 5, py::arg("near_order") = 5,
             py::arg("near_factor") = 1.5)
        .def_property_readonly("k",
                               [](const PyMultitrace& m_) { return m_.mt->wavenumber(); })
        .def("apply", &PyMultitrace::apply, py::arg("dirichlet"), py::arg("neumann"),
             "Strong-form multitrace action on a (dirichlet, neumann) coefficient pair")
        .def("calderon", &PyMultitrace::calderon, py::arg("dirichlet"), py::arg("neumann"),
             py::arg("exterior"), "Apply the exterior or interior Calderon projector")
        .def("weak_block",
             [](const PyMultitrace& m_, const std::string& name) {
                 return m_.block(name).weak_matrix();
             },
             py::arg("name"), "Galerkin matrix of one block: h1, e1, e2 or h2")
        .def("strong_block",
             [](const PyMultitrace& m_, const std::string& name) {
                 return m_.block(name).strong_matrix();
             },
             py::arg("name"), "Mass-preconditioned matrix of one block");

    py::class_<PyReport>(m, "Report")
        .def_property_readonly("formulation",
                               [](const PyReport& r) {
                                   return std::string(formulation_name(r.rep.formulation));
                               })
        .def_property_readonly("k", [](const PyReport& r) { return r.rep.k; })
        .def_property_readonly("iterations",
                               [](const PyReport& r) { return r.rep.iteration.iterations; })
        .def_property_readonly("converged",
                               [](const PyReport& r) { return r.rep.iteration.converged; })
        .def_property_readonly(
            "residuals", [](const PyReport& r) { return r.rep.iteration.residual_history; })
        .def_property_readonly("coefficients",
                               [](const PyReport& r) { return r.rep.density.coeffs; })
        .def_property_readonly("assemble_seconds",
                               [](const PyReport& r) { return r.rep.assemble_seconds; })
        .def_property_readonly("solve_seconds",
                               [](const PyReport& r) { return r.rep.solve_seconds; })
        .def("__repr__", [](const PyReport& r) {
            return "<calbem.Report " + std::string(formulation_name(r.rep.formulation)) +
                   ", " + std::to_string(r.rep.iteration.iterations) + " iterations, " +
                   (r.rep.iteration.converged ? "converged" : "not converged") + ">";
        });

    m.def("solve", &solve, py::arg("multitrace"), py::arg("formulation"), py::arg("p"),
          py::arg("d"), py::arg("tol") = 1e-5, py::arg("max_iter") = 2000,
          "Solve plane-wave scattering; formulation is one of efie, cal-efie, "
          "direct-efie, mfie, cfie");

    m.def("scattered_field",
          [](const PyReport& r, const Eigen::Ref<const Eigen::MatrixXd>& pts) {
              return to_matrix(scattered_field(r.rep, to_points(pts)));
          },
          py::arg("report"), py::arg("points"),
          "Scattered electric field at (n, 3) points, returned as complex (n, 3)");

    m.def("plane_wave_field",
          [](const std::array<double, 3>& p, const std::array<double, 3>& d, double k,
             const Eigen::Ref<const Eigen::MatrixXd>& pts) {
              PlaneWave w = PlaneWave::make(to_vec3(p), to_vec3(d), k);
              std::vector<CVec3> vals;
              for (const Vec3& x : to_points(pts)) vals.push_back(w.field(x));
              return to_matrix(vals);
          },
          py::arg("p"), py::arg("d"), py::arg("k"), py::arg("points"),
          "Incident plane-wave field at (n, 3) points");
}
