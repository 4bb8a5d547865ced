#pragma once

#include "calbem/types.hpp"
#include "calbem/vec3.hpp"

namespace calbem {

/// Helmholtz kernel G(x,y) = e^{ik|x-y|} / (4 pi |x-y|).  The wavenumber may
/// be complex (the combined-field regulariser evaluates at ik).
struct HelmholtzKernel {
    cplx k;

    cplx green(double r) const;

    /// Scalar factor F(r) with grad_x G(x,y) = F(r) (x - y);
    /// F = (ik - 1/r) G / r.
    cplx grad_factor(double r) const;

    CVec3 grad_x(const Vec3& x, const Vec3& y) const;
};

} // namespace calbem
