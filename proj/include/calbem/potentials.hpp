#pragma once

#include <functional>
#include <vector>

#include "calbem/assembly.hpp"

namespace calbem {

/// Time-harmonic incident plane wave p exp(ik d.x) with transverse
/// polarization (p.d = 0, |d| = 1).
struct PlaneWave {
    Vec3 polarization{1.0, 0.0, 0.0};
    Vec3 direction{0.0, 0.0, 1.0};
    double k = 1.0;

    /// Validates transversality and normalizes the direction.
    static PlaneWave make(const Vec3& p, const Vec3& d, double k);

    CVec3 field(const Vec3& x) const;
    CVec3 curl_field(const Vec3& x) const;
    /// Tangential (Dirichlet) trace  field x n.
    CVec3 dirichlet(const Vec3& x, const Vec3& n) const;
    /// Scaled magnetic (Neumann) trace  (1/ik) curl_field x n.
    CVec3 neumann(const Vec3& x, const Vec3& n) const;
};

/// (x, n) -> trace functionals suitable for project()/project_functional().
std::function<CVec3(const Vec3&, const Vec3&)> dirichlet_trace(const PlaneWave& w);
std::function<CVec3(const Vec3&, const Vec3&)> neumann_trace(const PlaneWave& w);

enum class PotentialKind { Electric, Magnetic };

/// Exact distance from a point to a (closed) triangle.
double point_triangle_distance(const Vec3& x, const Vec3& a, const Vec3& b, const Vec3& c);

/// Dense map from space coefficients to field values at fixed off-surface
/// points.  Electric: ik Int G p - (1/ik) grad Int G div p;  magnetic:
/// Int grad_x G x p.  Points closer to the surface than a tenth of the
/// local element size are flagged (evaluation proceeds, accuracy degrades).
class PotentialOperator {
public:
    PotentialOperator(PotentialKind kind, const FunctionSpace& space,
                      std::vector<Vec3> points, cplx k, int quadrature_order = 5);

    PotentialKind kind() const { return kind_; }
    const std::vector<Vec3>& points() const { return points_; }
    /// (3 * num_points) x space.size() matrix, components interleaved per
    /// point.
    const Mat& matrix() const { return m_; }
    const std::vector<bool>& near_surface() const { return near_; }

    std::vector<CVec3> evaluate(const Vec& coeffs) const;

private:
    PotentialKind kind_;
    std::vector<Vec3> points_;
    Mat m_;
    std::vector<bool> near_;
};

} // namespace calbem
