#include "calbem/assembly.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <numbers>
#include <stdexcept>

namespace calbem {

namespace {

constexpr double inv4pi = 1.0 / (4.0 * std::numbers::pi);

std::array<Vec3, 3> triangle_vertices(const TriangleGrid& g, int t) {
    const auto& tv = g.triangle(t);
    return {g.vertex(tv[0]), g.vertex(tv[1]), g.vertex(tv[2])};
}

} // namespace

RwgLocal rwg_local(const TriangleGrid& g, int t) {
    RwgLocal lb;
    const auto& le = g.triangle_edges(t);
    const auto& sg = g.triangle_edge_signs(t);
    const auto& tv = g.triangle(t);
    for (int l = 0; l < 3; ++l) {
        lb.edge[l] = le[l];
        lb.chat[l] = sg[l] * g.edge_length(le[l]);
        lb.p[l] = g.vertex(tv[l]);
    }
    return lb;
}

SpMat rotation_gram(const TriangleGrid& g) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(std::size_t(g.num_triangles()) * 9);
    for (int t = 0; t < g.num_triangles(); ++t) {
        const RwgLocal lb = rwg_local(g, t);
        const Vec3 n = g.normal(t);
        const double area = g.area(t);
        const Vec3 m01 = 0.5 * (lb.p[0] + lb.p[1]);
        const Vec3 m12 = 0.5 * (lb.p[1] + lb.p[2]);
        const Vec3 m20 = 0.5 * (lb.p[2] + lb.p[0]);
        const Vec3 mids[3] = {m01, m12, m20};
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                if (a == b) continue; // x-p_a is radial: (n x r).r form vanishes
                double s = 0.0;
                for (const Vec3& m : mids) s += dot(m - lb.p[b], cross(n, m - lb.p[a]));
                // test index first: entry (a,b) = Int RWG_b . (n x RWG_a)
                trip.emplace_back(lb.edge[a], lb.edge[b],
                                  lb.chat[a] * lb.chat[b] / (12.0 * area) * s);
            }
    }
    SpMat T(g.num_edges(), g.num_edges());
    T.setFromTriplets(trip.begin(), trip.end());
    return T;
}

SpMat l2_gram(const TriangleGrid& g) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(std::size_t(g.num_triangles()) * 9);
    for (int t = 0; t < g.num_triangles(); ++t) {
        const RwgLocal lb = rwg_local(g, t);
        const double area = g.area(t);
        const Vec3 mids[3] = {0.5 * (lb.p[0] + lb.p[1]), 0.5 * (lb.p[1] + lb.p[2]),
                              0.5 * (lb.p[2] + lb.p[0])};
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                double s = 0.0;
                for (const Vec3& m : mids) s += dot(m - lb.p[a], m - lb.p[b]);
                trip.emplace_back(lb.edge[a], lb.edge[b],
                                  lb.chat[a] * lb.chat[b] / (12.0 * area) * s);
            }
    }
    SpMat G(g.num_edges(), g.num_edges());
    G.setFromTriplets(trip.begin(), trip.end());
    return G;
}

SpMat pairing_mass(const FunctionSpace& domain, const FunctionSpace& dual) {
    if (!domain.same_grid(dual))
        throw std::invalid_argument("pairing_mass: spaces live on different grids");
    if (!domain.dual_family() && !dual.dual_family()) return rotation_gram(domain.grid());

    std::shared_ptr<const BarycentricRefinement> ref =
        domain.refinement() ? domain.refinement() : dual.refinement();
    SpMat dom_local, dual_local;
    const SpMat* P_dom;
    const SpMat* P_dual;
    if (domain.dual_family() || domain.refinement()) {
        P_dom = &domain.fine_realization();
    } else {
        dom_local = rwg_embedding(*ref);
        P_dom = &dom_local;
    }
    if (dual.dual_family() || dual.refinement()) {
        P_dual = &dual.fine_realization();
    } else {
        dual_local = rwg_embedding(*ref);
        P_dual = &dual_local;
    }
    const SpMat T = rotation_gram(ref->fine());
    return SpMat((*P_dual) * T * P_dom->transpose());
}

SpMat cross_l2_mass(const FunctionSpace& space) {
    auto ref = space.refinement();
    if (!ref) throw std::invalid_argument("cross_l2_mass: space carries no refinement");
    const TriangleGrid& fine = ref->fine();
    const TriangleGrid& coarse = ref->coarse();
    std::vector<Eigen::Triplet<double>> trip;

    if (!space.dual_family()) {
        // Coarse functions evaluated through their closed form on the parent
        // triangle: independent of the sparse embedding this cross mass is
        // meant to validate.
        for (int t = 0; t < fine.num_triangles(); ++t) {
            const int parent = t / 6;
            const RwgLocal lb = rwg_local(fine, t);
            const double area = fine.area(t);
            const Vec3 mids[3] = {0.5 * (lb.p[0] + lb.p[1]), 0.5 * (lb.p[1] + lb.p[2]),
                                  0.5 * (lb.p[2] + lb.p[0])};
            for (int ce : coarse.triangle_edges(parent)) {
                for (int b = 0; b < 3; ++b) {
                    double s = 0.0;
                    for (const Vec3& m : mids)
                        s += dot(rwg_value(coarse, ce, parent, m), m - lb.p[b]);
                    trip.emplace_back(ce, lb.edge[b],
                                      lb.chat[b] / (2.0 * area) * (area / 3.0) * s);
                }
            }
        }
    } else {
        // Dual functions evaluated pointwise from their fine-RWG expansion.
        const SpMat& P = space.realization();
        std::vector<std::vector<std::pair<int, double>>> cols(fine.num_edges());
        for (int i = 0; i < P.outerSize(); ++i)
            for (SpMat::InnerIterator it(P, i); it; ++it)
                cols[it.col()].emplace_back(int(it.row()), it.value());
        std::map<int, std::array<double, 3>> rows; // dof -> local expansion
        for (int t = 0; t < fine.num_triangles(); ++t) {
            const RwgLocal lb = rwg_local(fine, t);
            const double area = fine.area(t);
            rows.clear();
            for (int a = 0; a < 3; ++a)
                for (const auto& [i, v] : cols[lb.edge[a]]) {
                    auto [it, fresh] = rows.try_emplace(i, std::array<double, 3>{});
                    it->second[a] += v;
                }
            const Vec3 mids[3] = {0.5 * (lb.p[0] + lb.p[1]), 0.5 * (lb.p[1] + lb.p[2]),
                                  0.5 * (lb.p[2] + lb.p[0])};
            for (const auto& [i, coef] : rows) {
                for (int b = 0; b < 3; ++b) {
                    double s = 0.0;
                    for (int mi = 0; mi < 3; ++mi) {
                        Vec3 phi{0, 0, 0};
                        for (int a = 0; a < 3; ++a)
                            if (coef[a] != 0.0)
                                phi += (coef[a] * lb.chat[a] / (2.0 * area)) *
                                       (mids[mi] - lb.p[a]);
                        s += dot(phi, mids[mi] - lb.p[b]);
                    }
                    trip.emplace_back(i, lb.edge[b], lb.chat[b] / (2.0 * area) * (area / 3.0) * s);
                }
            }
        }
    }
    SpMat M(space.size(), fine.num_edges());
    M.setFromTriplets(trip.begin(), trip.end());
    return M;
}

// ---------------------------------------------------------------------------
// dense pair sweep

namespace {

struct ColSlices {
    std::vector<std::vector<std::pair<int, double>>> cols;
    int rows = 0;
    ColSlices(const SpMat& P, int num_edges) : cols(num_edges), rows(int(P.rows())) {
        if (int(P.cols()) != num_edges)
            throw std::invalid_argument("assemble_operators: realization column count "
                                        "does not match the grid's edge count");
        for (int i = 0; i < P.outerSize(); ++i)
            for (SpMat::InnerIterator it(P, i); it; ++it)
                cols[it.col()].emplace_back(int(it.row()), it.value());
    }
};

struct Sink {
    IntegralKind kind;
    Mat* out;
    const ColSlices* left;
    const ColSlices* right;
};

struct Moments {
    cplx S0{}, Sxy{};
    CVec3 Sx{}, Sy{};
    cplx T0{};
    CVec3 U{}, V{}, W0{};
};

struct Scratch {
    std::vector<double> xx, xy, xz, yx, yy, yz, w;
    std::size_t n = 0;
    void resize(std::size_t m) {
        n = m;
        xx.resize(m); xy.resize(m); xz.resize(m);
        yx.resize(m); yy.resize(m); yz.resize(m);
        w.resize(m);
    }
    void set(std::size_t q, const Vec3& x, const Vec3& y, double wq) {
        xx[q] = x.x; xy[q] = x.y; xz[q] = x.z;
        yx[q] = y.x; yy[q] = y.y; yz[q] = y.z;
        w[q] = wq;
    }
};

inline Vec3 map_ref(const std::array<Vec3, 3>& v, double u, double t) {
    return v[0] + u * (v[1] - v[0]) + t * (v[2] - v[1]);
}

template <bool WE, bool WH>
void accumulate(const Scratch& s, cplx k, Moments& mom) {
    const bool real_k = (k.imag() == 0.0);
    const double kr = k.real();
    const cplx ik = I * k;
    for (std::size_t q = 0; q < s.n; ++q) {
        const Vec3 x{s.xx[q], s.xy[q], s.xz[q]};
        const Vec3 y{s.yx[q], s.yy[q], s.yz[q]};
        const Vec3 d = x - y;
        const double r = std::sqrt(dot(d, d));
        const double invr = 1.0 / r;
        cplx G;
        if (real_k) {
            const double f = inv4pi * invr;
            G = cplx{std::cos(kr * r) * f, std::sin(kr * r) * f};
        } else {
            G = std::exp(I * k * r) * (inv4pi * invr);
        }
        if constexpr (WE) {
            const cplx wG = s.w[q] * G;
            mom.S0 += wG;
            mom.Sxy += wG * dot(x, y);
            mom.Sx += x * wG;
            mom.Sy += y * wG;
        }
        if constexpr (WH) {
            const cplx wF = s.w[q] * ((ik - invr) * G * invr);
            const Vec3 cdy = cross(d, y);
            mom.T0 += wF * dot(x, cdy);
            mom.V += cdy * wF;
            mom.U += cross(x, d) * wF;
            mom.W0 += d * wF;
        }
    }
}

using Block = std::array<std::array<cplx, 3>, 3>;

void make_blocks(const Moments& mom, cplx k, const RwgLocal& ba, const RwgLocal& bb,
                 bool we, bool wh, Block& eblk, Block& hblk) {
    const cplx mik = -I * k;
    const cplx fiok = 4.0 * I / k;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            const double cc = ba.chat[a] * bb.chat[b];
            const Vec3& pa = ba.p[a];
            const Vec3& pb = bb.p[b];
            if (we)
                eblk[a][b] = cc * (mik * (mom.Sxy - dot(mom.Sx, pb) - dot(pa, mom.Sy) +
                                          mom.S0 * dot(pa, pb)) +
                                   fiok * mom.S0);
            if (wh)
                hblk[a][b] = -cc * (mom.T0 - dot(mom.U, pb) - dot(pa, mom.V) -
                                    dot(mom.W0, cross(pa, pb)));
        }
}

void scatter(const Sink& s, const Block& blk, const RwgLocal& ba, const RwgLocal& bb,
             bool mirror) {
    Mat& O = *s.out;
    if (!s.left) {
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) O(ba.edge[a], bb.edge[b]) += blk[a][b];
        if (mirror)
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) O(bb.edge[b], ba.edge[a]) += blk[a][b];
        return;
    }
    for (int a = 0; a < 3; ++a) {
        const auto& ca = s.left->cols[ba.edge[a]];
        if (ca.empty()) continue;
        for (int b = 0; b < 3; ++b) {
            const auto& cb = s.right->cols[bb.edge[b]];
            if (cb.empty()) continue;
            const cplx v = blk[a][b];
            for (const auto& [i, xa] : ca) {
                const cplx xv = xa * v;
                for (const auto& [j, yb] : cb) O(i, j) += xv * yb;
            }
        }
    }
    if (!mirror) return;
    for (int b = 0; b < 3; ++b) {
        const auto& ca = s.left->cols[bb.edge[b]];
        if (ca.empty()) continue;
        for (int a = 0; a < 3; ++a) {
            const auto& cb = s.right->cols[ba.edge[a]];
            if (cb.empty()) continue;
            const cplx v = blk[a][b];
            for (const auto& [i, xa] : ca) {
                const cplx xv = xa * v;
                for (const auto& [j, yb] : cb) O(i, j) += xv * yb;
            }
        }
    }
}

} // namespace

void assemble_operators(const TriangleGrid& g, cplx k, const AssemblyOptions& opt,
                        const std::vector<DenseTarget>& targets) {
    if (targets.empty()) return;
    if (opt.regular_order < 1 || opt.singular_order < 1 || opt.near_order < 1)
        throw std::invalid_argument("assemble_operators: quadrature orders must be >= 1");
    if (k == 0.0) throw std::invalid_argument("assemble_operators: zero wavenumber");

    // Deduplicate realization views across targets.
    std::map<const SpMat*, std::unique_ptr<ColSlices>> views;
    const auto view = [&](const SpMat* P) -> const ColSlices* {
        if (!P) return nullptr;
        auto& slot = views[P];
        if (!slot) slot = std::make_unique<ColSlices>(*P, g.num_edges());
        return slot.get();
    };
    std::vector<Sink> sinks;
    bool we = false, wh = false;
    for (const auto& t : targets) {
        if (!t.out) throw std::invalid_argument("assemble_operators: null output");
        if ((t.left == nullptr) != (t.right == nullptr))
            throw std::invalid_argument("assemble_operators: one-sided sandwich");
        Sink s{t.kind, t.out, view(t.left), view(t.right)};
        const int rows = s.left ? s.left->rows : g.num_edges();
        const int cols = s.right ? s.right->rows : g.num_edges();
        t.out->setZero(rows, cols);
        (t.kind == IntegralKind::Electric ? we : wh) = true;
        sinks.push_back(s);
    }

    const int nt = g.num_triangles();
    std::vector<RwgLocal> basis(nt);
    std::vector<std::array<Vec3, 3>> verts(nt);
    for (int t = 0; t < nt; ++t) {
        basis[t] = rwg_local(g, t);
        verts[t] = triangle_vertices(g, t);
    }

    Scratch scratch;
    std::vector<Vec3> xpts, ypts;
    std::vector<double> xw, yw;
    Block eblk{}, hblk{};

    for (int ta = 0; ta < nt; ++ta) {
        const Vec3 ca = g.centroid(ta);
        const double da = g.diameter(ta);
        for (int tb = ta; tb < nt; ++tb) {
            const TrianglePairGeometry pg = classify_pair(g, ta, tb);

            if (pg.kind == PairCase::Separated) {
                const Vec3 diff = ca - g.centroid(tb);
                const double dmax = std::max(da, g.diameter(tb));
                const double thresh = opt.near_factor * dmax;
                const int order =
                    (dot(diff, diff) < thresh * thresh) ? opt.near_order : opt.regular_order;
                const auto& rule = triangle_rule(order);
                const std::size_t nq = rule.size();
                xpts.resize(nq); ypts.resize(nq);
                xw.resize(nq); yw.resize(nq);
                for (std::size_t q = 0; q < nq; ++q) {
                    xpts[q] = map_ref(verts[ta], rule[q].u, rule[q].v);
                    ypts[q] = map_ref(verts[tb], rule[q].u, rule[q].v);
                    xw[q] = rule[q].w;
                }
                scratch.resize(nq * nq);
                std::size_t idx = 0;
                for (std::size_t qa = 0; qa < nq; ++qa)
                    for (std::size_t qb = 0; qb < nq; ++qb, ++idx)
                        scratch.set(idx, xpts[qa], ypts[qb], xw[qa] * xw[qb]);
            } else {
                const auto& rule = sauter_schwab_rule(pg.kind, opt.singular_order);
                const auto& tvx = g.triangle(ta);
                const auto& tvy = g.triangle(tb);
                const std::array<Vec3, 3> pvx = {g.vertex(tvx[pg.perm_x[0]]),
                                                 g.vertex(tvx[pg.perm_x[1]]),
                                                 g.vertex(tvx[pg.perm_x[2]])};
                const std::array<Vec3, 3> pvy = {g.vertex(tvy[pg.perm_y[0]]),
                                                 g.vertex(tvy[pg.perm_y[1]]),
                                                 g.vertex(tvy[pg.perm_y[2]])};
                scratch.resize(rule.size());
                for (std::size_t q = 0; q < rule.size(); ++q) {
                    const QuadPair& qp = rule[q];
                    scratch.set(q, map_ref(pvx, qp.ux, qp.vx), map_ref(pvy, qp.uy, qp.vy),
                                qp.w);
                }
            }

            Moments mom;
            if (we && wh)
                accumulate<true, true>(scratch, k, mom);
            else if (we)
                accumulate<true, false>(scratch, k, mom);
            else
                accumulate<false, true>(scratch, k, mom);

            make_blocks(mom, k, basis[ta], basis[tb], we, wh, eblk, hblk);
            const bool mirror = (ta != tb);
            for (const Sink& s : sinks)
                scatter(s, s.kind == IntegralKind::Electric ? eblk : hblk, basis[ta],
                        basis[tb], mirror);
        }
    }
}

Mat assemble_dense(const TriangleGrid& g, cplx k, IntegralKind kind,
                   const AssemblyOptions& opt) {
    Mat out;
    assemble_operators(g, k, opt, {DenseTarget{kind, &out, nullptr, nullptr}});
    return out;
}

Vec project_functional(const FunctionSpace& dual,
                       const std::function<CVec3(const Vec3&, const Vec3&)>& f,
                       int order) {
    const TriangleGrid& g = dual.realization_grid();
    Eigen::VectorXcd btilde = Eigen::VectorXcd::Zero(g.num_edges());
    const auto& rule = triangle_rule(order);
    for (int t = 0; t < g.num_triangles(); ++t) {
        const RwgLocal lb = rwg_local(g, t);
        const Vec3 n = g.normal(t);
        const double area = g.area(t);
        const auto v = triangle_vertices(g, t);
        for (const auto& q : rule) {
            const Vec3 x = map_ref(v, q.u, q.v);
            const CVec3 fv = f(x, n);
            for (int a = 0; a < 3; ++a) {
                const Vec3 bas = (lb.chat[a] / (2.0 * area)) * (x - lb.p[a]);
                btilde[lb.edge[a]] += q.w * 2.0 * area * dot(fv, cross(n, bas));
            }
        }
    }
    if (!dual.dual_family()) return btilde; // identity realization on the coarse grid
    const SpMat& P = dual.realization();
    if (int(P.cols()) != g.num_edges()) throw std::logic_error("project_functional: size mismatch");
    Vec out = P.cast<cplx>() * btilde;
    return out;
}

void write_matrix(const std::string& path, const Mat& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_matrix: cannot open '" + path + "'");
    const char magic[4] = {'C', 'B', 'M', 'X'};
    const std::int32_t dtype = 1; // complex128
    const std::int64_t rows = m.rows(), cols = m.cols(), reserved = 0;
    out.write(magic, 4);
    out.write(reinterpret_cast<const char*>(&dtype), 4);
    out.write(reinterpret_cast<const char*>(&rows), 8);
    out.write(reinterpret_cast<const char*>(&cols), 8);
    out.write(reinterpret_cast<const char*>(&reserved), 8);
    std::vector<cplx> row(std::size_t(m.cols()));
    for (std::int64_t i = 0; i < rows; ++i) {
        for (std::int64_t j = 0; j < cols; ++j) row[std::size_t(j)] = m(i, j);
        out.write(reinterpret_cast<const char*>(row.data()),
                  std::streamsize(row.size() * sizeof(cplx)));
    }
    if (!out) throw std::runtime_error("write_matrix: write failed for '" + path + "'");
}

Mat read_matrix(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_matrix: cannot open '" + path + "'");
    char magic[4];
    std::int32_t dtype = 0;
    std::int64_t rows = 0, cols = 0, reserved = 0;
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(&dtype), 4);
    in.read(reinterpret_cast<char*>(&rows), 8);
    in.read(reinterpret_cast<char*>(&cols), 8);
    in.read(reinterpret_cast<char*>(&reserved), 8);
    if (!in || std::memcmp(magic, "CBMX", 4) != 0 || dtype != 1)
        throw std::runtime_error("read_matrix: bad header in '" + path + "'");
    Mat m(rows, cols);
    std::vector<cplx> row(static_cast<std::size_t>(cols));
    for (std::int64_t i = 0; i < rows; ++i) {
        in.read(reinterpret_cast<char*>(row.data()), std::streamsize(row.size() * sizeof(cplx)));
        for (std::int64_t j = 0; j < cols; ++j) m(i, j) = row[std::size_t(j)];
    }
    if (!in) throw std::runtime_error("read_matrix: truncated file '" + path + "'");
    return m;
}

} // namespace calbem
