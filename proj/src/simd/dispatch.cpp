#include "simd/kernels_impl.hpp"

#include <cstdlib>
#include <string_view>

namespace torus_atlas::simd {

namespace {

using namespace detail;

const Kernels kScalar{Isa::Scalar, "scalar", resonance_min_scalar, dft_moments_scalar, max_abs_diff_scalar};
#if defined(TA_HAVE_AVX2)
const Kernels kAvx2{Isa::Avx2, "avx2", resonance_min_avx2, dft_moments_avx2, max_abs_diff_avx2};
#endif
#if defined(TA_HAVE_NEON)
const Kernels kNeon{Isa::Neon, "neon", resonance_min_neon, dft_moments_neon, max_abs_diff_neon};
#endif

bool cpu_has(Isa isa) {
    switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(TA_HAVE_AVX2)
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
        return false;
#endif
    case Isa::Neon:
#if defined(TA_HAVE_NEON)
        return true;  // mandatory on aarch64
#else
        return false;
#endif
    }
    return false;
}

const Kernels& choose() {
    const char* env = std::getenv("TORUS_ATLAS_SIMD");
    std::string_view want = env ? env : "";
    if (want == "scalar") return kScalar;
    if (want == "avx2" && table(Isa::Avx2)) return *table(Isa::Avx2);
    if (want == "neon" && table(Isa::Neon)) return *table(Isa::Neon);
    if (table(Isa::Avx2)) return *table(Isa::Avx2);
    if (table(Isa::Neon)) return *table(Isa::Neon);
    return kScalar;
}

}  // namespace

const Kernels* table(Isa isa) {
    if (!cpu_has(isa)) return nullptr;
    switch (isa) {
    case Isa::Scalar: return &kScalar;
#if defined(TA_HAVE_AVX2)
    case Isa::Avx2: return &kAvx2;
#endif
#if defined(TA_HAVE_NEON)
    case Isa::Neon: return &kNeon;
#endif
    default: return nullptr;
    }
}

const Kernels& active() {
    static const Kernels& k = choose();
    return k;
}

std::vector<Isa> available() {
    std::vector<Isa> out;
    for (Isa i : {Isa::Scalar, Isa::Avx2, Isa::Neon})
        if (table(i)) out.push_back(i);
    return out;
}

std::string to_string(Isa isa) {
    switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
    }
    return "?";
}

}  // namespace torus_atlas::simd
