#pragma once

#include <cstdint>
#include <vector>

#include "thermo/spectrum.hpp"

namespace thermo {

struct MoranBlock {
  int end = 0;                  // g_j
  double target = 0.0;          // α_w on the grid Δ_j
  double block_average = 0.0;   // Birkhoff average over the block alone
  double running_average = 0.0; // φ_{g_j}/g_j over the windows inside the prefix
  double log_mass = 0.0;        // log ρ([x|g_j])
  double log_diameter = 0.0;    // log Ψ[x|g_j]
  double ratio = 0.0;           // log_mass / log_diameter
};

struct MoranSample {
  Word word;
  int n0 = 0;
  double alpha0 = 0.0;
  std::vector<MoranBlock> blocks;
};

struct MoranOptions {
  std::vector<int> schedule;  // block lengths L_1 < L_2 < ...
  std::uint64_t seed = 0x5EED;
  Word start;                 // ϑ; chosen automatically when empty
};

// One draw from the concatenated measure ρ built from witness chains of the
// solver (d = 1) targeting a k-step function ξ.
MoranSample moran_sample(const SpectrumSolver& solver, const KStepPotential& xi, const MoranOptions& options);

}  // namespace thermo
