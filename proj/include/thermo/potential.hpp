#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "thermo/graph.hpp"
#include "thermo/sft.hpp"

namespace thermo {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  bool contains(double x, double tol = 0.0) const { return x >= lo - tol && x <= hi + tol; }
};

// Birkhoff sums of a function of k consecutive coordinates:
//   φ_n(x) = Σ_{t<n} g(x_{t+1} … x_{t+k}),
// with a d-dimensional generator g tabulated on the admissible k-words.
class KStepPotential {
 public:
  using Generator = std::function<void(WordView kword, std::span<double> out)>;

  // table[i * d + c] is component c of g on the i-th admissible k-word.
  KStepPotential(SftPtr sft, int k, int d, std::vector<double> table);
  static KStepPotential from_function(SftPtr sft, int k, int d, const Generator& g);
  static KStepPotential one_step(SftPtr sft, std::vector<double> values);
  static KStepPotential constant(SftPtr sft, double value);

  const Sft& sft() const { return *sft_; }
  const SftPtr& sft_ptr() const { return sft_; }
  int k() const { return k_; }
  int dim() const { return d_; }
  const WordIndex& windows() const { return *windows_; }
  std::span<const double> table() const { return table_; }

  double value(WordView kword, int c = 0) const;
  double value_at(std::size_t window_index, int c = 0) const { return table_[window_index * d_ + c]; }

  // φ_n at a point described by a prefix of length >= n + k - 1.
  double evaluate(WordView x, int n, int c = 0) const;
  // Exact [min, max] of φ_{|w|} over the cylinder [w].
  Interval range(WordView w, int c = 0) const;
  // Sum of the windows lying entirely inside w (the part of φ_{|w|} fixed by w).
  double fixed_sum(WordView w, int c = 0) const;
  // Range of the k-1 window terms that overhang a word ending in `suffix`
  // (|suffix| == k-1).
  Interval tail_range(WordView suffix, int c = 0) const;
  // ‖φ_n‖_n: sup of |φ_n(x) - φ_n(y)| over x|_n = y|_n.
  double variation(int n, int c = 0) const;
  double max_value(int c = 0) const;
  double min_value(int c = 0) const;

  KStepPotential component(int c) const;
  KStepPotential lift(int k) const;
  KStepPotential scaled(double factor) const;
  KStepPotential shifted(double offset) const;

 private:
  void build_tails();
  Interval short_range(WordView w, int c) const;

  SftPtr sft_;
  int k_;
  int d_;
  std::shared_ptr<const WordIndex> windows_;
  std::shared_ptr<const WordIndex> suffixes_;
  std::vector<double> table_;
  // tail_{max,min}_[c][j * #suffixes + s]: extreme sum of j overhanging terms.
  std::vector<std::vector<double>> tail_max_, tail_min_;
};

// φ_n(x) = log ‖M_{x_1} ⋯ M_{x_n}‖ with ‖·‖ the sum of all entries.
class MatrixCocyclePotential {
 public:
  MatrixCocyclePotential(SftPtr sft, std::vector<Eigen::MatrixXd> matrices);

  const Sft& sft() const { return *sft_; }
  const SftPtr& sft_ptr() const { return sft_; }
  int size() const { return static_cast<int>(matrices_.front().rows()); }
  const std::vector<Eigen::MatrixXd>& matrices() const { return matrices_; }

  double log_norm(WordView w) const;
  double constant() const { return constant_; }
  double max_value() const;
  double min_value() const;

 private:
  SftPtr sft_;
  std::vector<Eigen::MatrixXd> matrices_;
  double constant_ = 0.0;
};

// A scalar almost-additive potential of either supported kind.
class ScalarPotential {
 public:
  ScalarPotential(KStepPotential p);  // NOLINT: implicit by design of the variant wrapper
  ScalarPotential(MatrixCocyclePotential p);  // NOLINT

  const Sft& sft() const;
  const SftPtr& sft_ptr() const;
  bool is_kstep() const { return std::holds_alternative<KStepPotential>(impl_); }
  const KStepPotential* kstep() const { return std::get_if<KStepPotential>(&impl_); }
  const MatrixCocyclePotential* cocycle() const { return std::get_if<MatrixCocyclePotential>(&impl_); }
  // Number of coordinates φ_1 depends on.
  int window() const;

  Interval range(WordView w) const;
  double evaluate(WordView x, int n) const;
  double constant() const;      // C(Φ)
  double max_bound() const;     // Φ_max
  double min_bound() const;     // Φ_min
  double norm() const;          // ‖Φ‖
  double variation(int n) const;

 private:
  std::variant<KStepPotential, MatrixCocyclePotential> impl_;
};

// A vector potential as a list of scalar components.
class PotentialBundle {
 public:
  explicit PotentialBundle(std::vector<ScalarPotential> components);
  explicit PotentialBundle(const KStepPotential& vector_potential);

  int dim() const { return static_cast<int>(components_.size()); }
  const ScalarPotential& operator[](int c) const { return components_[c]; }
  const std::vector<ScalarPotential>& components() const { return components_; }
  const Sft& sft() const { return components_.front().sft(); }
  const SftPtr& sft_ptr() const { return components_.front().sft_ptr(); }
  bool all_kstep() const;
  int max_window() const;

  std::vector<double> max_bounds() const { return max_; }
  std::vector<double> min_bounds() const { return min_; }
  std::vector<double> constants() const;
  double norm() const;  // Euclidean combination of the component norms

  // Merge the k-step components into one d-dimensional generator on a common window.
  KStepPotential merged() const;

 private:
  std::vector<ScalarPotential> components_;
  std::vector<double> max_, min_;
};

std::vector<Interval> birkhoff_range(const PotentialBundle& pot, WordView w);
double sup_weight(const ScalarPotential& pot, WordView w);

// ‖Φ‖_n for a bundle, bounded by the Euclidean norm of the component variations.
double var_norm(const PotentialBundle& pot, int n);
// ‖Φ‖_n^⋆ = max{‖Φ‖_l : c1 n <= l <= c2 n}.
double var_norm_star(const PotentialBundle& pot, int n, double c1, double c2);

struct HolderApproximation {
  KStepPotential potential;
  double bound = 0.0;  // certified bound on ‖Φ - Φ^k‖_lim
};

// Generator w ↦ φ_k(x_w)/k with x_w the smallest admissible extension of w.
HolderApproximation holder_approx(const PotentialBundle& pot, int k);

}  // namespace thermo
