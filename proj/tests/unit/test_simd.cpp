#include "catch_amalgamated.hpp"

#include "torus_atlas/simd/kernels.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace torus_atlas;

namespace {

// Relative to the scalar table; accumulation order differs between ISAs.
void check_equivalent(const simd::Kernels& ref, const simd::Kernels& k) {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> u(-1.0, 1.0);

    for (long count : {1L, 3L, 4L, 7L, 64L, 401L}) {
        std::vector<double> w(count);
        for (auto& x : w) x = 1.0 + std::abs(u(rng));
        double a = 0.7 + 0.1 * u(rng), b = 3.0 * u(rng);
        double r0 = ref.resonance_min(a, b, -count / 2, count, w.data());
        double r1 = k.resonance_min(a, b, -count / 2, count, w.data());
        CHECK(r1 == r0);  // min of identical products
    }

    for (std::size_t n : {std::size_t(1), std::size_t(5), std::size_t(1000), std::size_t(4099)}) {
        std::vector<double> re(n), im(n), w(n);
        for (std::size_t i = 0; i < n; ++i) {
            re[i] = u(rng);
            im[i] = u(rng);
            w[i] = 0.5 + 0.5 * u(rng);
        }
        for (const double* imp : {static_cast<const double*>(nullptr), static_cast<const double*>(im.data())}) {
            double o0[6], o1[6];
            ref.dft_moments(re.data(), imp, w.data(), n, 1.37, -12.5, 0.01, o0);
            k.dft_moments(re.data(), imp, w.data(), n, 1.37, -12.5, 0.01, o1);
            double scale = 0.0;
            for (double x : o0) scale = std::max(scale, std::abs(x));
            for (int c = 0; c < 6; ++c) CHECK(std::abs(o1[c] - o0[c]) <= 1e-12 * (scale + 1.0));
        }
        std::vector<double> v(n);
        for (auto& x : v) x = u(rng);
        CHECK(k.max_abs_diff(re.data(), v.data(), n) == ref.max_abs_diff(re.data(), v.data(), n));
    }
}

}  // namespace

TEST_CASE("scalar table is always available", "[simd]") {
    REQUIRE(simd::table(simd::Isa::Scalar) != nullptr);
    auto isas = simd::available();
    REQUIRE_FALSE(isas.empty());
    CHECK(isas.front() == simd::Isa::Scalar);
    CHECK(simd::to_string(simd::active().isa) == simd::active().name);
}

TEST_CASE("vector kernels match the scalar reference", "[simd]") {
    const simd::Kernels& ref = *simd::table(simd::Isa::Scalar);
    for (simd::Isa isa : simd::available()) {
        CAPTURE(simd::to_string(isa));
        check_equivalent(ref, *simd::table(isa));
    }
}

TEST_CASE("scalar dft moments against a direct sum", "[simd]") {
    const simd::Kernels& ref = *simd::table(simd::Isa::Scalar);
    std::vector<double> x = {1.0, -0.5, 0.25, 2.0, 0.0, 1.5};
    std::vector<double> w = {0.1, 0.5, 1.0, 1.0, 0.5, 0.1};
    double nu = 0.9, t0 = -1.0, dt = 0.4;
    double o[6];
    ref.dft_moments(x.data(), nullptr, w.data(), x.size(), nu, t0, dt, o);
    double s[6] = {0, 0, 0, 0, 0, 0};
    for (std::size_t k = 0; k < x.size(); ++k) {
        double t = t0 + dt * double(k);
        double c = std::cos(nu * t), sn = -std::sin(nu * t);
        for (int p = 0; p < 3; ++p) {
            double f = w[k] * x[k] * std::pow(t, p);
            s[2 * p] += f * c;
            s[2 * p + 1] += f * sn;
        }
    }
    for (int c = 0; c < 6; ++c) CHECK(o[c] == Catch::Approx(s[c]).margin(1e-13));
}
