#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "thermo/measures.hpp"
#include "thermo/metric.hpp"
#include "thermo/potential.hpp"

namespace thermo {

struct SpectrumOptions {
  double root_tol = 1e-10;     // width of the τ root bracket
  double min_tol = 1e-8;       // minimizer step
  double z_cap = 65536.0;      // |z| beyond which the infimum is reported as a boundary value
  double lphi_inflation = 1e-9;
  int grid_points = 201;       // d = 1
  int grid_side = 41;          // d = 2
  int cycle_cap = 12;          // longest cycle used for the d = 2 hull
  int hull_samples = 200;      // random Markov measures added to the d = 2 hull
  std::uint64_t seed = 0x5EED;
  int threads = 1;
  std::uint64_t ball_cap = kDefaultBallCap;
};

using Point = std::vector<double>;

// L_Φ: an interval for d = 1, a convex polygon (counter-clockwise) for d = 2.
struct LPhi {
  int dim = 1;
  double lo = 0.0, hi = 0.0;
  std::vector<Point> polygon;
  bool approximate = false;
  bool contains(std::span<const double> alpha, double tol) const;
  // Signed distance to the boundary (positive inside).
  double depth(std::span<const double> alpha) const;
};

struct Witness {
  double entropy = 0.0;
  double psi_avg = 0.0;
  Point phi_avg;
};

struct TauEval {
  double tau = 0.0;
  Point gradient;  // ∇_z τ(z, α) = (Φ_*(μ) - α)/(-Ψ_*(μ))
  Witness witness; // equilibrium state of ⟨z, Φ-α⟩ + τΨ
};

struct LegendrePoint {
  Point alpha;
  double tau_star = 0.0;
  Point z_star;
  bool boundary = false;
  std::optional<Witness> witness;
};

struct SpectrumCurve {
  int dim = 1;
  LPhi l_phi;
  double d_psi = 0.0;
  std::vector<LegendrePoint> grid;
};

struct CountRow {
  int n = 0;
  double eps = 0.0;
  std::uint64_t count = 0;
  double rate = 0.0;  // log f / n
};

struct LambdaEstimate {
  std::vector<CountRow> rows;
  double extrapolated = 0.0;
};

struct ConditionalResult {
  double value = 0.0;
  MarkovMeasure measure;
  Point phi_avg;
  double residual = 0.0;  // |Φ_*(μ) - α|
};

// Multifractal analysis of a k-step bundle Φ (d <= 2) against a k-step weak Gibbs metric.
class SpectrumSolver {
 public:
  SpectrumSolver(PotentialBundle phi, WeakGibbsMetric metric, SpectrumOptions options = {});

  int dim() const { return d_; }
  const PotentialBundle& phi() const { return phi_; }
  const WeakGibbsMetric& metric() const { return metric_; }
  const SpectrumOptions& options() const { return options_; }
  const KStepPotential& merged_phi() const { return merged_; }
  int window() const { return window_; }

  // P(⟨z, Φ-α⟩ + tΨ).
  double pressure(std::span<const double> z, std::span<const double> alpha, double t) const;
  double tau(std::span<const double> z, std::span<const double> alpha) const;
  TauEval tau_eval(std::span<const double> z, std::span<const double> alpha) const;
  double d_psi() const { return d_psi_; }
  // Φ_* of the measure of maximal Ψ-dimension, where τ* attains D(Ψ).
  const Point& alpha_max() const { return alpha_max_; }

  const LPhi& l_phi() const { return l_phi_; }
  LegendrePoint legendre(std::span<const double> alpha) const;
  SpectrumCurve curve() const;
  // Curve over caller-provided α values (d = 1).
  SpectrumCurve curve(const std::vector<double>& alphas) const;

  double tau_metric_estimate(std::span<const double> z, std::span<const double> alpha, int n) const;
  std::uint64_t ld_count(std::span<const double> alpha, int n, double eps) const;
  LambdaEstimate lambda_estimate(std::span<const double> alpha, const std::vector<int>& n_list,
                                 const std::vector<double>& eps_list) const;

  ConditionalResult conditional_variational(std::span<const double> alpha) const;
  // Equilibrium state of ⟨z, Φ-α⟩ + tΨ as a Markov measure.
  MarkovMeasure equilibrium(std::span<const double> z, std::span<const double> alpha, double t) const;

  // sup of τ* over ξ(Σ_A): the closed range [min ξ, max ξ] when interval_valued,
  // otherwise the finite set of table values.
  double localized_dimension(const KStepPotential& xi, bool interval_valued) const;

 private:
  std::vector<double> log_weights(std::span<const double> z, std::span<const double> alpha, double t) const;
  LegendrePoint legendre_1d(double alpha) const;
  LegendrePoint legendre_2d(std::span<const double> alpha) const;
  const std::vector<std::vector<double>>& tail_values(std::size_t suffix) const;
  bool tail_hits(std::span<const double> fixed, WordView word, int len, std::span<const double> alpha,
                 double eps) const;
  double tail_max(std::span<const double> z, std::span<const double> fixed, WordView word) const;

  PotentialBundle phi_;
  WeakGibbsMetric metric_;
  SpectrumOptions options_;
  int d_;
  int window_;
  KStepPotential merged_;
  KStepPotential psi_;
  GraphPtr graph_;
  std::vector<double> phi_e_;
  std::vector<double> psi_e_;
  double psi_min_, psi_max_;
  double d_psi_ = 0.0;
  Point alpha_max_;
  LPhi l_phi_;
  int affine_dim_ = 0;
  std::shared_ptr<const WordIndex> tail_index_;
  std::vector<std::vector<std::vector<double>>> tail_sets_;  // per (k-1)-suffix: possible tail sums
};

// Minimum and maximum cycle mean of per-edge weights on a de Bruijn graph.
std::pair<double, double> cycle_mean_range(const DeBruijnGraph& graph, std::span<const double> weights);

// Convex hull (counter-clockwise, no collinear points) of planar points.
std::vector<Point> convex_hull(std::vector<Point> points);

// Quasi-concavity and monotone-from-max of a sampled d = 1 curve; returns the worst violation.
double quasi_concavity_violation(const std::vector<double>& values);

}  // namespace thermo
