#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "thermo/potential.hpp"

namespace thermo {

// d_Ψ(x, y) = Ψ[x ∧ y] for a scalar potential with Ψ_max < 0.
class WeakGibbsMetric {
 public:
  explicit WeakGibbsMetric(ScalarPotential psi);

  const ScalarPotential& psi() const { return psi_; }
  const Sft& sft() const { return psi_.sft(); }
  const SftPtr& sft_ptr() const { return psi_.sft_ptr(); }
  double c1() const { return 1.0 / std::abs(psi_.min_bound()); }
  double c2() const { return 1.0 + 1.0 / std::abs(psi_.max_bound()); }
  double psi_max() const { return psi_.max_bound(); }
  double psi_min() const { return psi_.min_bound(); }
  // log Ψ[w]; log Ψ[ε] = 0.
  double log_weight(WordView w) const { return psi_.range(w).hi; }
  double distance(WordView x, WordView y) const;

 private:
  ScalarPotential psi_;
};

struct BallFamily {
  int n = 0;
  std::vector<Word> words;  // lexicographic
};

inline constexpr std::uint64_t kDefaultBallCap = 10'000'000;

BallFamily ball_family(const WeakGibbsMetric& metric, int n, std::uint64_t cap = kDefaultBallCap);

// Leaves of B_n(Ψ) are visited with the fixed part of an optional k-step
// potential Φ (sum of the windows lying inside the word). Callbacks must depend
// on the word only through its length and last (K-1) symbols, K the largest
// window in play; subtrees are then shared between equal states.
class BallWalker {
 public:
  using Accept = std::function<bool(int length, std::span<const double> fixed, WordView word)>;
  using LogValue = std::function<double(int length, std::span<const double> fixed, WordView word)>;

  BallWalker(const WeakGibbsMetric& metric, const KStepPotential* phi = nullptr,
             std::uint64_t cap = kDefaultBallCap);

  std::uint64_t count(int n, const Accept& accept) const;
  // log Σ_{leaves} exp(value(...)).
  double log_sum(int n, const LogValue& value) const;

  int state_length() const { return state_length_; }

 private:
  template <class Acc, class Leaf>
  Acc walk(int n, const Leaf& leaf) const;

  const WeakGibbsMetric* metric_;
  const KStepPotential* phi_;
  std::uint64_t cap_;
  int state_length_;
};

std::uint64_t count_balls(const WeakGibbsMetric& metric, int n, std::uint64_t cap = kDefaultBallCap);

enum class DimensionMethod { root, count };

struct MetricDimension {
  double value = 0.0;
  double error = 0.0;
  DimensionMethod method = DimensionMethod::root;
};

// Root of λ ↦ P(λΨ) (k-step Ψ) or the log-count slope over n ≤ n_max.
MetricDimension metric_dimension(const WeakGibbsMetric& metric, DimensionMethod method, int n_max = 20);

}  // namespace thermo
