#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "thermo/graph.hpp"
#include "thermo/potential.hpp"

namespace thermo {

// Shared de Bruijn graph of window `window` (states are (window-1)-words).
GraphPtr window_graph(const SftPtr& sft, int window);

// Per-edge generator values of `pot` on `graph` (edge words lifted to the graph
// window), laid out [edge * dim + c].
std::vector<double> edge_values(const KStepPotential& pot, const DeBruijnGraph& graph);

struct PerronData {
  double log_rho = 0.0;
  double log_lower = 0.0;  // Collatz–Wielandt enclosure of log ρ
  double log_upper = 0.0;
  Eigen::VectorXd right;   // normalized to max 1
  Eigen::VectorXd left;    // empty unless requested; normalized so left·right = 1
};

// Perron root of the nonnegative matrix W(u,v) = Σ_{edges u→v} exp(log_w[e]).
PerronData perron(const DeBruijnGraph& graph, std::span<const double> log_w, bool want_left = false,
                  double tol = 1e-12);

class TransferMatrix {
 public:
  explicit TransferMatrix(const KStepPotential& scalar);
  const DeBruijnGraph& graph() const { return *graph_; }
  const GraphPtr& graph_ptr() const { return graph_; }
  std::span<const double> log_weights() const { return log_w_; }
  PerronData perron(bool want_left = false, double tol = 1e-12) const;

 private:
  GraphPtr graph_;
  std::vector<double> log_w_;
};

struct PressureBracket {
  double lower = 0.0;
  double upper = 0.0;
  int n_used = 0;
  double width() const { return upper - lower; }
  double midpoint() const { return 0.5 * (lower + upper); }
};

struct PressureTerm {
  double coeff = 1.0;
  const ScalarPotential* potential = nullptr;
};

struct PressureValue {
  double value = 0.0;
  bool exact = false;
  PressureBracket bracket;
};

double pressure_exact(const KStepPotential& scalar);

// a_n = log Σ_{w∈Σ_{A,n}} exp(sup_{[w]} φ_n) for a linear combination of potentials.
double log_partition_sum(std::span<const PressureTerm> terms, int n);
double log_partition_sum(const ScalarPotential& pot, int n);

PressureBracket pressure_bracket(const ScalarPotential& pot, int n);
PressureBracket pressure_bracket(std::span<const PressureTerm> terms, int n);

// (a_{2n} - a_n)/n: removes the O(1/n) term of a_n/n.
double pressure_extrapolated(std::span<const PressureTerm> terms, int n);

// Single k-step generator equal to Σ coeff·φ (all terms must be k-step).
KStepPotential merge_terms(std::span<const PressureTerm> terms);

// Exact when every term is k-step, otherwise a bracket at `bracket_n` (midpoint reported).
PressureValue pressure_combined(std::span<const PressureTerm> terms, int bracket_n = 24);

}  // namespace thermo
