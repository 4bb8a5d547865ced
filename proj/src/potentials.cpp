#include "calbem/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "calbem/kernels.hpp"

namespace calbem {

PlaneWave PlaneWave::make(const Vec3& p, const Vec3& d, double k) {
    const double dn = norm(d);
    if (dn == 0.0) throw std::invalid_argument("PlaneWave: zero direction");
    if (k <= 0.0) throw std::invalid_argument("PlaneWave: wavenumber must be positive");
    const Vec3 dh = d / dn;
    if (std::abs(dot(p, dh)) > 1e-10 * std::max(1.0, norm(p)))
        throw std::invalid_argument("PlaneWave: polarization must be transverse to the "
                                    "propagation direction");
    return PlaneWave{p, dh, k};
}

CVec3 PlaneWave::field(const Vec3& x) const {
    const cplx phase = std::exp(I * (k * dot(direction, x)));
    return polarization * phase;
}

CVec3 PlaneWave::curl_field(const Vec3& x) const {
    const cplx phase = std::exp(I * (k * dot(direction, x)));
    return cross(direction, polarization) * (I * k * phase);
}

CVec3 PlaneWave::dirichlet(const Vec3& x, const Vec3& n) const {
    return cross(field(x), n);
}

CVec3 PlaneWave::neumann(const Vec3& x, const Vec3& n) const {
    // (1/ik) curl = d x p * phase
    const cplx phase = std::exp(I * (k * dot(direction, x)));
    return cross(cross(direction, polarization) * phase, n);
}

std::function<CVec3(const Vec3&, const Vec3&)> dirichlet_trace(const PlaneWave& w) {
    return [w](const Vec3& x, const Vec3& n) { return w.dirichlet(x, n); };
}

std::function<CVec3(const Vec3&, const Vec3&)> neumann_trace(const PlaneWave& w) {
    return [w](const Vec3& x, const Vec3& n) { return w.neumann(x, n); };
}

double point_triangle_distance(const Vec3& x, const Vec3& a, const Vec3& b, const Vec3& c) {
    const auto seg = [&](const Vec3& p, const Vec3& q) {
        const Vec3 pq = q - p;
        const double t = std::clamp(dot(x - p, pq) / dot(pq, pq), 0.0, 1.0);
        return norm(x - (p + t * pq));
    };
    const Vec3 n = cross(b - a, c - a);
    const double nn = dot(n, n);
    if (nn > 0.0) {
        const double h = dot(x - a, n);
        const Vec3 foot = x - (h / nn) * n;
        // inside test via consistent orientation of the three sub-triangles
        const bool inside = dot(cross(b - a, foot - a), n) >= 0.0 &&
                            dot(cross(c - b, foot - b), n) >= 0.0 &&
                            dot(cross(a - c, foot - c), n) >= 0.0;
        if (inside) return std::abs(h) / std::sqrt(nn);
    }
    return std::min({seg(a, b), seg(b, c), seg(c, a)});
}

PotentialOperator::PotentialOperator(PotentialKind kind, const FunctionSpace& space,
                                     std::vector<Vec3> points, cplx k, int quadrature_order)
    : kind_(kind), points_(std::move(points)) {
    if (quadrature_order < 1)
        throw std::invalid_argument("PotentialOperator: quadrature order must be >= 1");
    const TriangleGrid& g = space.realization_grid();
    const std::size_t np = points_.size();

    near_.assign(np, false);
    for (std::size_t j = 0; j < np; ++j) {
        for (int t = 0; t < g.num_triangles(); ++t) {
            const auto& tv = g.triangle(t);
            const double dist = point_triangle_distance(points_[j], g.vertex(tv[0]),
                                                        g.vertex(tv[1]), g.vertex(tv[2]));
            if (dist < 0.1 * g.diameter(t)) {
                near_[j] = true;
                break;
            }
        }
    }

    Mat fine = Mat::Zero(Eigen::Index(3 * np), g.num_edges());
    const HelmholtzKernel kern{k};
    const auto& rule = triangle_rule(quadrature_order);
    const cplx ik = I * k;
    const cplx two_over_ik = 2.0 / ik;
    for (int t = 0; t < g.num_triangles(); ++t) {
        const RwgLocal lb = rwg_local(g, t);
        const auto& tv = g.triangle(t);
        const Vec3 a = g.vertex(tv[0]), b = g.vertex(tv[1]), c = g.vertex(tv[2]);
        for (const auto& q : rule) {
            const Vec3 y = a + q.u * (b - a) + q.v * (c - b);
            for (std::size_t j = 0; j < np; ++j) {
                const Vec3 d = points_[j] - y;
                const double r = norm(d);
                const cplx green = kern.green(r);
                const CVec3 grad = d * kern.grad_factor(r);
                for (int l = 0; l < 3; ++l) {
                    const double wc = q.w * lb.chat[l];
                    CVec3 v;
                    if (kind_ == PotentialKind::Electric) {
                        // phi = chat/(2A)(y-p), div = chat/A; the 2A jacobian
                        // cancels the area factors.
                        v = (y - lb.p[l]) * (wc * ik * green) - grad * (wc * two_over_ik);
                    } else {
                        v = cross(grad, CVec3(y - lb.p[l])) * cplx(wc);
                    }
                    const Eigen::Index row = Eigen::Index(3 * j);
                    fine(row + 0, lb.edge[l]) += v.x;
                    fine(row + 1, lb.edge[l]) += v.y;
                    fine(row + 2, lb.edge[l]) += v.z;
                }
            }
        }
    }

    if (space.dual_family()) {
        const SpMatC p = space.realization().cast<cplx>();
        m_ = fine * p.transpose();
    } else {
        m_ = std::move(fine);
    }
}

std::vector<CVec3> PotentialOperator::evaluate(const Vec& coeffs) const {
    if (coeffs.size() != m_.cols())
        throw std::invalid_argument("PotentialOperator: coefficient size mismatch");
    const Vec y = m_ * coeffs;
    std::vector<CVec3> out(points_.size());
    for (std::size_t j = 0; j < points_.size(); ++j)
        out[j] = CVec3{y[Eigen::Index(3 * j)], y[Eigen::Index(3 * j + 1)],
                       y[Eigen::Index(3 * j + 2)]};
    return out;
}

} // namespace calbem
