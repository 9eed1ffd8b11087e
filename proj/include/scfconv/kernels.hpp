// kernels.hpp - elementwise complex kernels with scalar reference and SIMD variants
//
// The scalar versions are the reference. SIMD variants are picked once at
// start-up from the CPU feature set; SCFCONV_SIMD=scalar|avx2 overrides the
// choice (an unsupported request falls back to scalar).
#pragma once

#include <complex>
#include <span>
#include <string_view>

namespace scfconv::kernels {

using cxd = std::complex<double>;

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

// ISA used by the dispatching entry points below.
Isa active_isa();

// True if the running CPU can execute the given ISA.
bool isa_available(Isa isa);

// z[i] *= w[i]
void scale_real(std::span<cxd> z, std::span<const double> w);
// out[i] = a[i] * b[i]; out may alias a or b.
void hadamard(std::span<const cxd> a, std::span<const cxd> b, std::span<cxd> out);
// sum |z[i]|^2
double norm2_sq(std::span<const cxd> z);

// Explicit variants, used by the equivalence tests and benchmarks.
namespace scalar {
void scale_real(std::span<cxd> z, std::span<const double> w);
void hadamard(std::span<const cxd> a, std::span<const cxd> b, std::span<cxd> out);
double norm2_sq(std::span<const cxd> z);
}  // namespace scalar

#if defined(SCFCONV_HAVE_AVX2)
namespace avx2 {
void scale_real(std::span<cxd> z, std::span<const double> w);
void hadamard(std::span<const cxd> a, std::span<const cxd> b, std::span<cxd> out);
double norm2_sq(std::span<const cxd> z);
}  // namespace avx2
#endif

}  // namespace scfconv::kernels
