#include "calbem/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace calbem {

Quad1D gauss_jacobi01(int n, double a, double b) {
    if (n < 1) throw std::invalid_argument("gauss_jacobi01: need n >= 1");
    if (a <= -1.0 || b <= -1.0) throw std::invalid_argument("gauss_jacobi01: weight exponents must exceed -1");
    // Recurrence for the weight (1-t)^A (1+t)^B on [-1,1]; mapping
    // x = (1+t)/2 turns it into x^a (1-x)^b with A = b, B = a.
    const double A = b, B = a;
    RealVec diag(n), sub(std::max(n - 1, 0));
    diag[0] = (B - A) / (A + B + 2.0);
    for (int k = 1; k < n; ++k) {
        const double s = 2.0 * k + A + B;
        diag[k] = (B * B - A * A) / (s * (s + 2.0));
        sub[k - 1] = std::sqrt(4.0 * k * (k + A) * (k + B) * (k + A + B) /
                               (s * s * (s + 1.0) * (s - 1.0)));
    }
    const double mu0 =
        std::pow(2.0, A + B + 1.0) * std::tgamma(A + 1.0) * std::tgamma(B + 1.0) /
        std::tgamma(A + B + 2.0);

    Quad1D q;
    if (n == 1) {
        q.x = RealVec::Constant(1, (1.0 + diag[0]) / 2.0);
        q.w = RealVec::Constant(1, mu0 * std::pow(0.5, a + b + 1.0));
        return q;
    }
    Eigen::SelfAdjointEigenSolver<RealMat> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    q.x.resize(n);
    q.w.resize(n);
    const double scale = mu0 * std::pow(0.5, a + b + 1.0);
    for (int i = 0; i < n; ++i) {
        q.x[i] = (1.0 + es.eigenvalues()[i]) / 2.0;
        const double v0 = es.eigenvectors()(0, i);
        q.w[i] = scale * v0 * v0;
    }
    return q;
}

Quad1D gauss_legendre(int n) { return gauss_jacobi01(n, 0.0, 0.0); }

const std::vector<TrianglePoint>& triangle_rule(int m) {
    static std::mutex mtx;
    static std::map<int, std::unique_ptr<std::vector<TrianglePoint>>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto& slot = cache[m];
    if (!slot) {
        // Conical product: v = u t collapses the triangle onto [0,1]^2 with
        // jacobian u, absorbed into a Gauss-Jacobi rule in u.
        const Quad1D qu = gauss_jacobi01(m, 1.0, 0.0);
        const Quad1D qt = gauss_legendre(m);
        auto rule = std::make_unique<std::vector<TrianglePoint>>();
        rule->reserve(std::size_t(m) * std::size_t(m));
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                rule->push_back({qu.x[i], qu.x[i] * qt.x[j], qu.w[i] * qt.w[j]});
        slot = std::move(rule);
    }
    return *slot;
}

namespace {

using Map4 = void (*)(double xi, double e1, double e2, double e3, QuadPair& p);

// Regularizing subdomain maps: (xi,e1,e2,e3) in [0,1]^4 onto a piece of
// {v<=u} x {v<=u}; p.w receives the map's jacobian.

void co1(double xi, double e1, double e2, double e3, QuadPair& p) {
    p = {xi, xi * (1.0 - e1 + e1 * e2), xi * (1.0 - e1 * e2 * e3), xi * (1.0 - e1),
         xi * xi * xi * e1 * e1 * e2};
}
void co3(double xi, double e1, double e2, double e3, QuadPair& p) {
    p = {xi, xi * (e1 - e1 * e2 + e1 * e2 * e3), xi * (1.0 - e1 * e2), xi * (e1 - e1 * e2),
         xi * xi * xi * e1 * e1 * e2};
}
void co5(double xi, double e1, double e2, double e3, QuadPair& p) {
    p = {xi * (1.0 - e1 * e2 * e3), xi * (e1 - e1 * e2 * e3), xi, xi * (e1 - e1 * e2),
         xi * xi * xi * e1 * e1 * e2};
}
void ed1(double xi, double e1, double e2, double e3, QuadPair& p) {
    p = {xi, xi * e1 * e3, xi * (1.0 - e1 * e2), xi * e1 * (1.0 - e2),
         xi * xi * xi * e1 * e1};
}
void ed2(double xi, double e1, double e2, double e3, QuadPair& p) {
    p = {xi, xi * e1, xi * (1.0 - e1 * e2 * e3), xi * e1 * e2 * (1.0 - e3),
         xi * xi * xi * e1 * e1 * e2};
}
void ed3(double xi, double e1, double e2, double e3, QuadPair& p) {
    p = {xi * (1.0 - e1 * e2), xi * e1 * (1.0 - e2), xi, xi * e1 * e2 * e3,
         xi * xi * xi * e1 * e1 * e2};
}
void ed4(double xi, double e1, double e2, double e3, QuadPair& p) {
    p = {xi * (1.0 - e1 * e2 * e3), xi * e1 * e2 * (1.0 - e3), xi, xi * e1,
         xi * xi * xi * e1 * e1 * e2};
}
void ed5(double xi, double e1, double e2, double e3, QuadPair& p) {
    p = {xi * (1.0 - e1 * e2 * e3), xi * e1 * (1.0 - e2 * e3), xi, xi * e1 * e2,
         xi * xi * xi * e1 * e1 * e2};
}
void vx1(double xi, double e1, double e2, double e3, QuadPair& p) {
    p = {xi, xi * e1, xi * e2, xi * e2 * e3, xi * xi * xi * e2};
}

QuadPair swapped(const QuadPair& p) { return {p.uy, p.vy, p.ux, p.vx, p.w}; }

std::vector<QuadPair> build_sauter_schwab(PairCase c, int m) {
    const Quad1D q = gauss_legendre(m);
    std::vector<QuadPair> rule;
    const auto emit = [&](Map4 f, bool also_swapped) {
        QuadPair p;
        for (int i0 = 0; i0 < m; ++i0)
            for (int i1 = 0; i1 < m; ++i1)
                for (int i2 = 0; i2 < m; ++i2)
                    for (int i3 = 0; i3 < m; ++i3) {
                        f(q.x[i0], q.x[i1], q.x[i2], q.x[i3], p);
                        p.w *= q.w[i0] * q.w[i1] * q.w[i2] * q.w[i3];
                        rule.push_back(p);
                        if (also_swapped) rule.push_back(swapped(p));
                    }
    };
    switch (c) {
        case PairCase::Coincident:
            rule.reserve(std::size_t(6) * std::size_t(m) * m * m * m);
            emit(co1, true);
            emit(co3, true);
            emit(co5, true);
            break;
        case PairCase::Edge:
            rule.reserve(std::size_t(5) * std::size_t(m) * m * m * m);
            emit(ed1, false);
            emit(ed2, false);
            emit(ed3, false);
            emit(ed4, false);
            emit(ed5, false);
            break;
        case PairCase::Vertex:
            rule.reserve(std::size_t(2) * std::size_t(m) * m * m * m);
            emit(vx1, true);
            break;
        case PairCase::Separated:
            throw std::invalid_argument("sauter_schwab_rule: separated pairs use the plain rule");
    }
    return rule;
}

} // namespace

const std::vector<QuadPair>& sauter_schwab_rule(PairCase c, int m) {
    static std::mutex mtx;
    static std::map<std::pair<int, int>, std::unique_ptr<std::vector<QuadPair>>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto& slot = cache[{int(c), m}];
    if (!slot) slot = std::make_unique<std::vector<QuadPair>>(build_sauter_schwab(c, m));
    return *slot;
}

TrianglePairGeometry classify_pair(const TriangleGrid& g, int tx, int ty) {
    TrianglePairGeometry out;
    out.perm_x = {0, 1, 2};
    out.perm_y = {0, 1, 2};
    if (tx == ty) {
        out.kind = PairCase::Coincident;
        return out;
    }
    const auto& a = g.triangle(tx);
    const auto& b = g.triangle(ty);
    int sx[3], sy[3], shared = 0;
    for (int i = 0; i < 3 && shared < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (a[i] == b[j]) {
                sx[shared] = i;
                sy[shared] = j;
                ++shared;
                break;
            }
    if (shared == 0) {
        out.kind = PairCase::Separated;
        return out;
    }
    if (shared == 1) {
        out.kind = PairCase::Vertex;
        out.perm_x = {sx[0], (sx[0] + 1) % 3, (sx[0] + 2) % 3};
        out.perm_y = {sy[0], (sy[0] + 1) % 3, (sy[0] + 2) % 3};
        return out;
    }
    if (shared == 2) {
        out.kind = PairCase::Edge;
        const int ox = 3 - sx[0] - sx[1];
        const int oy = 3 - sy[0] - sy[1];
        // Shared edge first, identically directed in both triangles.
        out.perm_x = {sx[0], sx[1], ox};
        out.perm_y = {sy[0], sy[1], oy};
        return out;
    }
    // Distinct triangles over the same vertex set do not occur on the closed
    // manifolds this library accepts.
    throw std::logic_error("classify_pair: distinct triangles share all three vertices");
}

} // namespace calbem
