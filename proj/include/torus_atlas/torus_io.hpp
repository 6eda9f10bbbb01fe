#pragma once

#include "torus_atlas/kam.hpp"

#include <string>
#include <vector>

namespace torus_atlas {

// One JSON header line (N, omega, epsilon, residual, value per torus), then
// for each torus and each of the six components the n x (n/2+1) half-complex
// spectrum as interleaved little-endian f64 (re, im).
void write_tori(const std::string& path, const std::vector<SolvedTorus>& tori);
std::vector<SolvedTorus> read_tori(const std::string& path);

}  // namespace torus_atlas
