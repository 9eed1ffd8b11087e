#include "scfconv/kernels.hpp"

#include <cstddef>

namespace scfconv::kernels::scalar {

void scale_real(std::span<cxd> z, std::span<const double> w) {
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = cxd(z[i].real() * w[i], z[i].imag() * w[i]);
}

void hadamard(std::span<const cxd> a, std::span<const cxd> b, std::span<cxd> out) {
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        out[i] = cxd(ar * br - ai * bi, ai * br + ar * bi);
    }
}

double norm2_sq(std::span<const cxd> z) {
    double s = 0.0;
    for (const cxd& v : z) s += v.real() * v.real() + v.imag() * v.imag();
    return s;
}

}  // namespace scfconv::kernels::scalar
