#include "calbem/kernels.hpp"

#include <cmath>
#include <numbers>

namespace calbem {

cplx HelmholtzKernel::green(double r) const {
    const double inv = 1.0 / (4.0 * std::numbers::pi * r);
    if (k.imag() == 0.0) {
        const double kr = k.real() * r;
        return {std::cos(kr) * inv, std::sin(kr) * inv};
    }
    return std::exp(I * k * r) * inv;
}

cplx HelmholtzKernel::grad_factor(double r) const {
    return (I * k - 1.0 / r) * green(r) / r;
}

CVec3 HelmholtzKernel::grad_x(const Vec3& x, const Vec3& y) const {
    const Vec3 d = x - y;
    return grad_factor(norm(d)) * CVec3(d);
}

} // namespace calbem
