#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "thermo/graph.hpp"
#include "thermo/potential.hpp"
#include "thermo/pressure.hpp"

namespace thermo {

// Stationary Markov measure of order s: transitions live on the edges of the
// order-s de Bruijn graph, the stationary law on its states.
class MarkovMeasure {
 public:
  // Stationary vector is solved for.
  MarkovMeasure(GraphPtr graph, std::vector<double> transitions);
  MarkovMeasure(GraphPtr graph, std::vector<double> transitions, std::vector<double> stationary);

  static MarkovMeasure bernoulli(const SftPtr& full_shift, const std::vector<double>& p);
  static MarkovMeasure random(const SftPtr& sft, int order, std::mt19937_64& rng);
  // Measure carried by the periodic orbit of `cycle` (cycle·cycle[0] admissible).
  // The order is raised to at least the period so the chain is deterministic.
  static MarkovMeasure periodic(const SftPtr& sft, const Word& cycle, int order = 1);

  const DeBruijnGraph& graph() const { return *graph_; }
  const GraphPtr& graph_ptr() const { return graph_; }
  int order() const { return graph_->state_length(); }
  const std::vector<double>& transitions() const { return t_; }
  const std::vector<double>& stationary() const { return pi_; }

  double transition(std::size_t edge) const { return t_[edge]; }
  double entropy() const;
  // Φ_*(μ) for a k-step generator; the measure is lifted when k > order + 1.
  std::vector<double> potential_average(const KStepPotential& pot) const;
  double potential_average(const ScalarPotential& pot) const;
  double cylinder_mass(WordView w) const;
  MarkovMeasure lifted(int order) const;

  // Appends `length` symbols to `prefix` (|prefix| >= order) following the chain.
  void extend(Word& prefix, std::size_t length, std::mt19937_64& rng) const;
  Word sample(std::size_t length, std::mt19937_64& rng) const;

  double max_row_error() const;
  double stationarity_error() const;

 private:
  GraphPtr graph_;
  std::vector<double> t_;
  std::vector<double> pi_;
};

MarkovMeasure equilibrium_state(const KStepPotential& scalar);
MarkovMeasure parry_measure(const SftPtr& sft);
double entropy(const MarkovMeasure& mu);

// Birkhoff average of a k-step generator along the periodic point cycle^∞.
std::vector<double> periodic_average(const KStepPotential& pot, const Word& cycle);
// All primitive cycles (lexicographically least rotation) up to `max_length`.
std::vector<Word> admissible_cycles(const Sft& sft, int max_length);

int lphi_affine_dim(const PotentialBundle& pot, int samples, std::uint64_t seed = 0x5EED);

}  // namespace thermo
