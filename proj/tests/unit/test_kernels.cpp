#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <string>
#include <vector>

#include "../support.hpp"
#include "scfconv/kernels.hpp"

using namespace scfconv;
using namespace testing_support;
namespace k = scfconv::kernels;

namespace {

std::vector<cxd> random_complex(Gen& g, std::size_t n) {
    std::vector<cxd> v(n);
    for (auto& z : v) z = g.complex();
    return v;
}

std::vector<double> random_real(Gen& g, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = g.normal();
    return v;
}

// Lengths around the vector width, including empty and odd tails.
const std::vector<std::size_t> kLengths = {0, 1, 2, 3, 4, 5, 7, 8, 9, 16, 31, 64, 100, 1023};

}  // namespace

TEST_CASE("isa names and availability") {
    CHECK(k::isa_name(k::Isa::scalar) == "scalar");
    CHECK(k::isa_name(k::Isa::avx2) == "avx2");
    CHECK(k::isa_available(k::Isa::scalar));
    CHECK(k::isa_available(k::active_isa()));
}

TEST_CASE("SCFCONV_SIMD selects the dispatched variant") {
    const char* env = std::getenv("SCFCONV_SIMD");
    if (env && std::string(env) == "scalar") {
        CHECK(k::active_isa() == k::Isa::scalar);
    } else if (env && std::string(env) == "avx2") {
        CHECK(k::active_isa() == (k::isa_available(k::Isa::avx2) ? k::Isa::avx2 : k::Isa::scalar));
    } else if (!env) {
        CHECK(k::active_isa() == (k::isa_available(k::Isa::avx2) ? k::Isa::avx2 : k::Isa::scalar));
    }
    MESSAGE("active isa: " << k::isa_name(k::active_isa()));
}

TEST_CASE("scalar reference kernels") {
    std::vector<cxd> z = {{1.0, 2.0}, {-3.0, 0.5}};
    const std::vector<double> w = {2.0, -1.0};
    k::scalar::scale_real(z, w);
    CHECK(z[0] == cxd(2.0, 4.0));
    CHECK(z[1] == cxd(3.0, -0.5));

    const std::vector<cxd> a = {{1.0, 1.0}, {0.0, 2.0}}, b = {{1.0, -1.0}, {0.0, 2.0}};
    std::vector<cxd> out(2);
    k::scalar::hadamard(a, b, out);
    CHECK(out[0] == cxd(2.0, 0.0));
    CHECK(out[1] == cxd(-4.0, 0.0));

    CHECK(k::scalar::norm2_sq(a) == 6.0);
    CHECK(k::scalar::norm2_sq(std::span<const cxd>{}) == 0.0);
}

TEST_CASE("dispatched kernels match the scalar reference") {
    Gen g(21);
    for (std::size_t n : kLengths) {
        const auto a = random_complex(g, n), b = random_complex(g, n);
        const auto w = random_real(g, n);

        auto z1 = a, z2 = a;
        k::scalar::scale_real(z1, w);
        k::scale_real(z2, w);
        REQUIRE(z1 == z2);

        std::vector<cxd> h1(n), h2(n);
        k::scalar::hadamard(a, b, h1);
        k::hadamard(a, b, h2);
        for (std::size_t i = 0; i < n; ++i) REQUIRE(std::abs(h1[i] - h2[i]) <= 8e-16 * std::abs(a[i]) * std::abs(b[i]));

        const double s1 = k::scalar::norm2_sq(a), s2 = k::norm2_sq(a);
        REQUIRE(std::abs(s1 - s2) <= 1e-15 * static_cast<double>(n + 1) * s1);
    }
}

#if defined(SCFCONV_HAVE_AVX2)
TEST_CASE("avx2 kernels match the scalar reference") {
    if (!k::isa_available(k::Isa::avx2)) {
        MESSAGE("CPU lacks AVX2; skipping");
        return;
    }
    Gen g(22);
    for (int rep = 0; rep < 20; ++rep) {
        for (std::size_t n : kLengths) {
            const auto a = random_complex(g, n), b = random_complex(g, n);
            const auto w = random_real(g, n);

            // Scaling by a real is one multiply per component in both variants.
            auto z1 = a, z2 = a;
            k::scalar::scale_real(z1, w);
            k::avx2::scale_real(z2, w);
            REQUIRE(z1 == z2);

            std::vector<cxd> h1(n), h2(n);
            k::scalar::hadamard(a, b, h1);
            k::avx2::hadamard(a, b, h2);
            for (std::size_t i = 0; i < n; ++i)
                REQUIRE(std::abs(h1[i] - h2[i]) <= 8e-16 * std::abs(a[i]) * std::abs(b[i]));

            // In-place output aliasing the first operand.
            auto alias = a;
            k::avx2::hadamard(alias, b, alias);
            for (std::size_t i = 0; i < n; ++i) REQUIRE(std::abs(alias[i] - h1[i]) <= 8e-16 * std::abs(a[i]) * std::abs(b[i]));

            // Summation order differs, so allow a relative error of a few ulps per term.
            const double s1 = k::scalar::norm2_sq(a), s2 = k::avx2::norm2_sq(a);
            REQUIRE(std::abs(s1 - s2) <= 1e-15 * static_cast<double>(n + 1) * s1);
        }
    }
}

TEST_CASE("avx2 handles special values like the scalar path") {
    if (!k::isa_available(k::Isa::avx2)) return;
    std::vector<cxd> z = {{0.0, -0.0}, {1e300, -1e-300}, {5.0, 6.0}};
    const std::vector<double> w = {-1.0, 1e10, 0.0};
    auto z1 = z, z2 = z;
    k::scalar::scale_real(z1, w);
    k::avx2::scale_real(z2, w);
    for (std::size_t i = 0; i < z.size(); ++i) {
        CHECK(z1[i].real() == z2[i].real());
        CHECK(z1[i].imag() == z2[i].imag());
        CHECK(std::signbit(z1[i].real()) == std::signbit(z2[i].real()));
    }
}
#endif

TEST_CASE("library results do not depend on the kernel variant") {
    // apply_L (hadamard) and the norms inside the bounds go through the dispatcher;
    // compare against formulas evaluated here without it.
    Gen g(23);
    const Index n = 9;
    const MatC mask = g.hermitian(n), P = g.hermitian(n);
    const MatC direct = mask.cwiseProduct(P);
    CHECK(max_abs(apply_L(HadamardMask{mask}, P) - direct) <= 1e-15 * max_abs(mask) * max_abs(P));
}
