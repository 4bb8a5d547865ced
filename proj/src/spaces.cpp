#include "calbem/spaces.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace calbem {

std::string space_name(SpaceKind k) {
    switch (k) {
        case SpaceKind::RWG: return "RWG";
        case SpaceKind::SNC: return "SNC";
        case SpaceKind::BC: return "BC";
        case SpaceKind::RBC: return "RBC";
    }
    return "?";
}

SpaceKind parse_space_kind(const std::string& name) {
    std::string u;
    for (char c : name) u.push_back(char(std::toupper(static_cast<unsigned char>(c))));
    if (u == "RWG") return SpaceKind::RWG;
    if (u == "SNC") return SpaceKind::SNC;
    if (u == "BC") return SpaceKind::BC;
    if (u == "RBC") return SpaceKind::RBC;
    throw std::invalid_argument("unknown space kind '" + name + "' (RWG|SNC|BC|RBC)");
}

Vec3 rwg_value(const TriangleGrid& grid, int e, int t, const Vec3& x) {
    const auto& et = grid.edge_triangles()[e];
    double sgn = 0.0;
    if (et[0] == t)
        sgn = 1.0;
    else if (et[1] == t)
        sgn = -1.0;
    else
        return {0.0, 0.0, 0.0};
    const auto& ev = grid.edges()[e];
    const auto& tv = grid.triangle(t);
    int opp = -1;
    for (int k = 0; k < 3; ++k)
        if (tv[k] != ev[0] && tv[k] != ev[1]) opp = tv[k];
    return (sgn * grid.edge_length(e) / (2.0 * grid.area(t))) * (x - grid.vertex(opp));
}

SpMat rwg_embedding(const BarycentricRefinement& ref) {
    const TriangleGrid& g = ref.coarse();
    const TriangleGrid& fine = ref.fine();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(std::size_t(g.num_edges()) * 14);
    std::vector<int> cand;
    for (int e = 0; e < g.num_edges(); ++e) {
        cand.clear();
        // Fine edges that can carry flux of the coarse function: the
        // midpoint and vertex spokes inside its two triangles plus the two
        // halves of the edge itself.  All other fine edges see zero normal
        // component.
        for (int side = 0; side < 2; ++side) {
            const int tau = g.edge_triangles()[e][side];
            const int c = ref.centroid_vertex(tau);
            for (int l = 0; l < 3; ++l) {
                cand.push_back(ref.fine_edge_between(ref.midpoint_vertex(g.triangle_edges(tau)[l]), c));
                cand.push_back(ref.fine_edge_between(g.triangle(tau)[l], c));
            }
        }
        const auto halves = ref.half_edges(e);
        cand.push_back(halves[0]);
        cand.push_back(halves[1]);
        for (int f : cand) {
            const int fine_plus = fine.edge_triangles()[f][0];
            const int tau = ref.coarse_triangle_of_fine(fine_plus);
            const auto& fe = fine.edges()[f];
            const Vec3 mid = 0.5 * (fine.vertex(fe[0]) + fine.vertex(fe[1]));
            const Vec3 tangent = (fine.vertex(fe[1]) - fine.vertex(fe[0])) / fine.edge_length(f);
            // Unit normal of the fine edge pointing out of its plus triangle.
            const Vec3 n = cross(tangent, fine.normal(fine_plus));
            const double c = dot(rwg_value(g, e, tau, mid), n);
            if (std::abs(c) > 1e-13) trip.emplace_back(e, f, c);
        }
    }
    SpMat P(g.num_edges(), fine.num_edges());
    P.setFromTriplets(trip.begin(), trip.end());
    return P;
}

namespace {

/// Adds `flux` crossing `edge` out of triangle `from_tri` to the RWG
/// coefficient map (RWG of an edge carries flux equal to its length from its
/// plus to its minus triangle).
void add_flux(const TriangleGrid& fine, std::unordered_map<int, double>& coeffs, int edge,
              int from_tri, double flux) {
    const double sgn = fine.edge_triangles()[edge][0] == from_tri ? 1.0 : -1.0;
    coeffs[edge] += sgn * flux / fine.edge_length(edge);
}

/// Cyclically ordered star of coarse triangles around a vertex, with the
/// fine entities the dual construction walks through.  Entry j of each list
/// belongs to the j-th coarse triangle; the walk starts at the triangle that
/// traverses `start_edge` leaving `v` and crosses one coarse edge per step.
struct VertexFan {
    std::vector<int> tris;   // coarse triangles, cyclic order
    std::vector<int> h;      // fine edge (v, midpoint of the leaving coarse edge)
    std::vector<int> s;      // fine edge (v, centroid)
    std::vector<int> A;      // fine corner triangle adjacent to h[j] and s[j]
    std::vector<int> B;      // fine corner triangle adjacent to s[j] and h[j+1]
    int size() const { return static_cast<int>(tris.size()); }
};

VertexFan build_fan(const BarycentricRefinement& ref, int v, int start_edge) {
    const TriangleGrid& g = ref.coarse();
    const auto& ev = g.edges()[start_edge];
    // The triangle whose circulation leaves v along start_edge: the plus
    // triangle when v is the low endpoint, the minus one otherwise.
    int t = (v == ev[0]) ? g.edge_triangles()[start_edge][0] : g.edge_triangles()[start_edge][1];
    const int t0 = t;
    VertexFan fan;
    int guard = 0;
    do {
        if (++guard > 1024) throw std::logic_error("vertex fan does not close");
        const auto& tri = g.triangle(t);
        int l = 0;
        while (tri[l] != v) ++l;
        const int e_leave = g.triangle_edges(t)[(l + 2) % 3]; // edge {v, tri[l+1]}
        fan.tris.push_back(t);
        fan.h.push_back(ref.fine_edge_between(v, ref.midpoint_vertex(e_leave)));
        fan.s.push_back(ref.fine_edge_between(v, ref.centroid_vertex(t)));
        const auto corner = ref.corner_fine_triangles(t, l);
        fan.B.push_back(corner[0]);
        fan.A.push_back(corner[1]);
        const int e_next = g.triangle_edges(t)[(l + 1) % 3]; // edge {v, tri[l+2]}
        const auto& et = g.edge_triangles()[e_next];
        t = (et[0] == t) ? et[1] : et[0];
    } while (t != t0);
    return fan;
}

/// Walks the dual cell once, distributing fluxes so every fine triangle gets
/// constant divergence s/|cell| and a total of s leaks out through the
/// dual-edge interface at the walk's start (half out of A[0], half out of
/// B[N-1]).  `circulation` shifts the whole solution by a divergence-free
/// loop of that strength.
void march_vertex(const BarycentricRefinement& ref, const VertexFan& fan, double s,
                  double circulation, std::unordered_map<int, double>& coeffs) {
    const TriangleGrid& fine = ref.fine();
    const int n = fan.size();
    double cell_area = 0.0;
    for (int j = 0; j < n; ++j) cell_area += fine.area(fan.A[j]) + fine.area(fan.B[j]);
    const double sigma = s / cell_area;
    double alpha = circulation; // flux entering A[j] across h[j]
    for (int j = 0; j < n; ++j) {
        add_flux(fine, coeffs, fan.h[j], fan.B[(j + n - 1) % n], alpha);
        const double beta =
            alpha - (j == 0 ? 0.5 * s : 0.0) + sigma * fine.area(fan.A[j]);
        add_flux(fine, coeffs, fan.s[j], fan.A[j], beta);
        alpha = beta - (j == n - 1 ? 0.5 * s : 0.0) + sigma * fine.area(fan.B[j]);
    }
    if (std::abs(alpha - circulation) > 1e-10)
        throw std::logic_error("dual-cell flux walk failed to close");
}

/// L2 inner product of two local RWG coefficient maps over the given fine
/// triangles (each triangle counted once).
double pair_energy(const TriangleGrid& fine, const std::vector<int>& tris,
                   const std::unordered_map<int, double>& u,
                   const std::unordered_map<int, double>& w) {
    double acc = 0.0;
    for (int t : tris) {
        const auto& le = fine.triangle_edges(t);
        const auto& sg = fine.triangle_edge_signs(t);
        double uc[3], wc[3];
        bool any_u = false, any_w = false;
        for (int k = 0; k < 3; ++k) {
            auto iu = u.find(le[k]);
            uc[k] = iu == u.end() ? 0.0 : iu->second;
            any_u = any_u || uc[k] != 0.0;
            auto iw = w.find(le[k]);
            wc[k] = iw == w.end() ? 0.0 : iw->second;
            any_w = any_w || wc[k] != 0.0;
        }
        if (!any_u || !any_w) continue;
        const auto& tv = fine.triangle(t);
        const double area = fine.area(t);
        // Vertex k is opposite edge le[k]; quadrature at edge midpoints is
        // exact for the quadratic integrand.
        const Vec3 p[3] = {fine.vertex(tv[0]), fine.vertex(tv[1]), fine.vertex(tv[2])};
        const Vec3 mids[3] = {0.5 * (p[0] + p[1]), 0.5 * (p[1] + p[2]), 0.5 * (p[2] + p[0])};
        for (int a = 0; a < 3; ++a) {
            if (uc[a] == 0.0) continue;
            for (int b = 0; b < 3; ++b) {
                if (wc[b] == 0.0) continue;
                double quad = 0.0;
                for (const Vec3& q : mids) quad += dot(q - p[a], q - p[b]);
                quad *= area / 3.0;
                const double fac = sg[a] * fine.edge_length(le[a]) * sg[b] *
                                   fine.edge_length(le[b]) / (4.0 * area * area);
                acc += uc[a] * wc[b] * fac * quad;
            }
        }
    }
    return acc;
}

/// Unit flux through both halves of the dual-cell interface at the midpoint
/// of `coarse_edge`, directed from the low-endpoint cell to the high one.
void add_interface(const BarycentricRefinement& ref, int coarse_edge,
                   std::unordered_map<int, double>& coeffs) {
    const TriangleGrid& g = ref.coarse();
    const TriangleGrid& fine = ref.fine();
    const auto& ev = g.edges()[coarse_edge];
    const int m = ref.midpoint_vertex(coarse_edge);
    for (int side = 0; side < 2; ++side) {
        const int tau = g.edge_triangles()[coarse_edge][side];
        const int f = ref.fine_edge_between(m, ref.centroid_vertex(tau));
        const auto& ft = fine.edge_triangles()[f];
        int lo_side = -1;
        for (int k = 0; k < 2; ++k) {
            const auto& tw = fine.triangle(ft[k]);
            if (tw[0] == ev[0] || tw[1] == ev[0] || tw[2] == ev[0]) lo_side = ft[k];
        }
        if (lo_side < 0) throw std::logic_error("interface fine edge misses the low corner");
        add_flux(fine, coeffs, f, lo_side, 0.5);
    }
}

} // namespace

SpMat bc_coefficients(const BarycentricRefinement& ref, BcCirculation circulation) {
    const TriangleGrid& g = ref.coarse();
    const TriangleGrid& fine = ref.fine();
    std::vector<Eigen::Triplet<double>> trip;
    for (int e = 0; e < g.num_edges(); ++e) {
        const auto& ev = g.edges()[e];
        const VertexFan lo = build_fan(ref, ev[0], e);
        const VertexFan hi = build_fan(ref, ev[1], e);
        std::unordered_map<int, double> phi;
        march_vertex(ref, lo, +1.0, 0.0, phi);
        march_vertex(ref, hi, -1.0, 0.0, phi);
        add_interface(ref, e, phi);
        if (circulation == BcCirculation::MinEnergy) {
            std::unordered_map<int, double> wlo, whi;
            march_vertex(ref, lo, 0.0, 1.0, wlo);
            march_vertex(ref, hi, 0.0, 1.0, whi);
            std::vector<int> tris;
            tris.reserve(std::size_t(2) * std::size_t(lo.size() + hi.size()));
            for (int j = 0; j < lo.size(); ++j) {
                tris.push_back(lo.A[j]);
                tris.push_back(lo.B[j]);
            }
            for (int j = 0; j < hi.size(); ++j) {
                tris.push_back(hi.A[j]);
                tris.push_back(hi.B[j]);
            }
            const double gll = pair_energy(fine, tris, wlo, wlo);
            const double ghh = pair_energy(fine, tris, whi, whi);
            const double glh = pair_energy(fine, tris, wlo, whi);
            const double bl = pair_energy(fine, tris, phi, wlo);
            const double bh = pair_energy(fine, tris, phi, whi);
            const double det = gll * ghh - glh * glh;
            const double a_lo = (-bl * ghh + bh * glh) / det;
            const double a_hi = (-bh * gll + bl * glh) / det;
            for (const auto& [f, c] : wlo) phi[f] += a_lo * c;
            for (const auto& [f, c] : whi) phi[f] += a_hi * c;
        }
        for (const auto& [f, c] : phi)
            if (std::abs(c) > 1e-13) trip.emplace_back(e, f, c);
    }
    SpMat P(g.num_edges(), fine.num_edges());
    P.setFromTriplets(trip.begin(), trip.end());
    return P;
}

FunctionSpace::FunctionSpace(std::shared_ptr<const TriangleGrid> grid, SpaceKind kind,
                             std::shared_ptr<const BarycentricRefinement> refinement,
                             BcCirculation circulation)
    : grid_(std::move(grid)), ref_(std::move(refinement)), kind_(kind),
      circulation_(circulation) {
    if (!grid_) throw std::invalid_argument("FunctionSpace: null grid");
    if (ref_ && &ref_->coarse() != grid_.get())
        throw std::invalid_argument("FunctionSpace: refinement built on a different grid");
    if (dual_family()) {
        if (!ref_) ref_ = std::make_shared<BarycentricRefinement>(*grid_);
        realization_ = std::make_shared<SpMat>(bc_coefficients(*ref_, circulation_));
    }
}

const TriangleGrid& FunctionSpace::realization_grid() const {
    return dual_family() ? ref_->fine() : *grid_;
}

const SpMat& FunctionSpace::realization() const {
    if (realization_) return *realization_;
    if (!coarse_identity_) {
        auto id = std::make_shared<SpMat>(size(), size());
        id->setIdentity();
        coarse_identity_ = id;
    }
    return *coarse_identity_;
}

const SpMat& FunctionSpace::fine_realization() const {
    if (dual_family()) return *realization_;
    if (!ref_)
        throw std::logic_error(
            "FunctionSpace::fine_realization: coarse space was built without a refinement");
    if (!fine_embedding_) fine_embedding_ = std::make_shared<SpMat>(rwg_embedding(*ref_));
    return *fine_embedding_;
}

} // namespace calbem
