#include "scfconv/kernels.hpp"

#include <cstdlib>
#include <string>

namespace scfconv::kernels {

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
    }
    return "unknown";
}

bool isa_available(Isa isa) {
    switch (isa) {
        case Isa::scalar: return true;
        case Isa::avx2:
#if defined(SCFCONV_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
            return __builtin_cpu_supports("avx2") != 0;
#else
            return false;
#endif
    }
    return false;
}

namespace {

struct Table {
    Isa isa;
    void (*scale_real)(std::span<cxd>, std::span<const double>);
    void (*hadamard)(std::span<const cxd>, std::span<const cxd>, std::span<cxd>);
    double (*norm2_sq)(std::span<const cxd>);
};

Table make_table(Isa isa) {
#if defined(SCFCONV_HAVE_AVX2)
    if (isa == Isa::avx2) return {Isa::avx2, &avx2::scale_real, &avx2::hadamard, &avx2::norm2_sq};
#endif
    (void)isa;
    return {Isa::scalar, &scalar::scale_real, &scalar::hadamard, &scalar::norm2_sq};
}

Isa choose_isa() {
    if (const char* env = std::getenv("SCFCONV_SIMD")) {
        const std::string want(env);
        if (want == "avx2" && isa_available(Isa::avx2)) return Isa::avx2;
        return Isa::scalar;
    }
    return isa_available(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

const Table& table() {
    static const Table t = make_table(choose_isa());
    return t;
}

}  // namespace

Isa active_isa() { return table().isa; }

void scale_real(std::span<cxd> z, std::span<const double> w) { table().scale_real(z, w); }

void hadamard(std::span<const cxd> a, std::span<const cxd> b, std::span<cxd> out) {
    table().hadamard(a, b, out);
}

double norm2_sq(std::span<const cxd> z) { return table().norm2_sq(z); }

}  // namespace scfconv::kernels
