#pragma once

#include "torus_atlas/action_angle.hpp"
#include "torus_atlas/geometry.hpp"

#include <string_view>
#include <vector>

namespace torus_atlas {

enum class Observable {
    Height,     // q3
    Q1,         // q1
    Azimuthal,  // q1 + i q2, complex
};

Observable parse_observable(std::string_view name);

struct FrequencyComponent {
    double frequency = 0.0;
    double amplitude = 0.0;
};

struct FrequencyEstimate {
    std::vector<FrequencyComponent> components;  // by decreasing amplitude
    double window_length = 0.0;
    // |nu(full window) - nu(first half)| for the dominant component
    double error_estimate = 0.0;
    bool empty = false;  // no significant peak
};

struct ExtractOptions {
    // Components weaker than this fraction of the dominant one are dropped.
    double min_relative_amplitude = 1e-8;
    int refinement_passes = 3;
    bool estimate_error = true;
};

inline constexpr std::size_t kMinSignalLength = 4096;

// Hann-windowed spectrum, zero-padded peak search, then Newton on |S(nu)|^2
// with every other fitted component subtracted. im may be null (real input,
// positive frequencies reported).
FrequencyEstimate extract_frequencies(const std::vector<double>& re, const std::vector<double>* im, double dt,
                                      int n_freq, const ExtractOptions& opt = {});
FrequencyEstimate extract_frequencies(const Trajectory& tr, Observable obs, int n_freq,
                                      const ExtractOptions& opt = {});

struct TrajectoryFrequencies {
    FrequencyVector omega;  // omega2 reduced to (0, omega1]
    FrequencyEstimate height;
    FrequencyEstimate azimuthal;
};

// omega1 from the height signal, omega2 from the dominant azimuthal line
// reduced modulo omega1.
TrajectoryFrequencies trajectory_frequencies(const PhasePoint& x0, const HamiltonianSpec& spec, double t_end = 500.0,
                                             double h = 0.01, int stride = 5);

}  // namespace torus_atlas
