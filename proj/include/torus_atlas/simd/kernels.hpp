#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace torus_atlas::simd {

enum class Isa { Scalar, Avx2, Neon };

struct Kernels {
    Isa isa;
    const char* name;
    // min over m in [m0, m0 + count) of |a m + b| * w[m - m0]
    double (*resonance_min)(double a, double b, long m0, long count, const double* w);
    // Windowed DFT moments at frequency nu with t_k = t0 + k dt:
    // out = {Re, Im} of sum w x e^{-i nu t}, of sum t w x e^{-i nu t}, of sum t^2 w x e^{-i nu t}.
    // im may be null for real input.
    void (*dft_moments)(const double* re, const double* im, const double* w, std::size_t n, double nu, double t0,
                        double dt, double* out);
    double (*max_abs_diff)(const double* a, const double* b, std::size_t n);
};

// Selected once: the best ISA the CPU supports, unless TORUS_ATLAS_SIMD
// names one of "scalar", "avx2", "neon".
const Kernels& active();
// Table for a given ISA, or nullptr when it is not built or not supported here.
const Kernels* table(Isa isa);
std::vector<Isa> available();
std::string to_string(Isa isa);

}  // namespace torus_atlas::simd
