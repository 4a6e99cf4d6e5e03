#pragma once

#include <optional>
#include <vector>

#include "thermo/spectrum.hpp"

namespace thermo {

// f_j(x) = ρ_j x + c_j on R^{d'}, d' ∈ {1, 2}, coded by the full m-shift.
class SelfSimilarIFS {
 public:
  SelfSimilarIFS(std::vector<double> ratios, std::vector<Point> offsets, bool sosc_asserted = false);

  // {x/m + j/m : j < m}
  static SelfSimilarIFS base(int m);
  // Maps x/n + cell/n for the listed integer cells of the n×n grid.
  static SelfSimilarIFS grid_carpet(int n, const std::vector<std::pair<int, int>>& cells);

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(ratios_.size()); }
  double ratio(int j) const { return ratios_[j]; }
  const Point& offset(int j) const { return offsets_[j]; }
  Point fixed_point(int j) const;
  bool sosc_asserted() const { return sosc_; }
  bool homogeneous() const;
  const SftPtr& sft() const { return sft_; }

  Point apply(int j, const Point& x) const;
  // f_{w_1} ∘ ⋯ ∘ f_{w_n}(x)
  Point apply(WordView w, const Point& x) const;
  // Σ_n (∏_{i<n} ρ_{w_i}) c_{w_n} over the finite word
  Point chi(WordView w) const;
  // Bounding box [lo, hi] of the fixed points; it contains J and every f_j maps it into itself.
  std::pair<Point, Point> box() const;

  // For ρ_j = 1/n with n c_j integral: whether the cells f_j([0,1]^{d'}) have
  // disjoint interiors. nullopt when the IFS is not of that form.
  std::optional<bool> grid_sosc() const;

 private:
  int dim_;
  std::vector<double> ratios_;
  std::vector<Point> offsets_;
  bool sosc_;
  SftPtr sft_;
};

SelfSimilarIFS product(const SelfSimilarIFS& a, const SelfSimilarIFS& b);

struct CodingPotential {
  KStepPotential psi;  // log ρ_{x_1}
  KStepPotential phi;  // k-step truncation of the additive potential generated by χ
  double error = 0.0;  // bound on |g - χ| in the sup norm
};

CodingPotential coding_potential(const SelfSimilarIFS& ifs, int k);

// Solver for D_Φ: the exact 1-step generator x_{x_1} when the IFS is homogeneous,
// the k-step coding truncation otherwise.
SpectrumSolver birkhoff_solver(const SelfSimilarIFS& ifs, int k, SpectrumOptions options = {});

struct BirkhoffPoint {
  double value = 0.0;
  int k = 0;
  bool converged = true;
  bool boundary = false;
};

// D_Φ(α). Non-homogeneous systems run the ladder k = 4, 6, ..., k_max until
// successive values agree within 1e-4.
BirkhoffPoint birkhoff_spectrum_point(const SelfSimilarIFS& ifs, const Point& alpha, int k_max = 12,
                                      SpectrumOptions options = {});

bool in_attractor(const SelfSimilarIFS& ifs, const Point& p, int depth = 12);

struct FixedPointDimension {
  double value = 0.0;
  Point argmax;
  bool full_dim = false;
};

// sup{D_Φ(α) : α ∈ J}.
FixedPointDimension fixed_point_average_dimension(const SelfSimilarIFS& ifs, int k = 8, int membership_depth = 12,
                                                  SpectrumOptions options = {});

struct LocalDimensionSpectrum {
  double beta_lo = 0.0, beta_hi = 0.0;
  double log_ratio = 0.0;
  std::vector<std::pair<double, double>> points;  // (β, dim E_μ(β)), ascending β
  std::shared_ptr<const SpectrumSolver> solver;   // Φ = φ, Ψ = log ρ

  // dim{x : d_μ(x) = ξ(x)} for a k-step target ξ of local dimensions.
  double localized(const KStepPotential& xi, bool interval_valued) const;
};

// Local-dimension spectrum of the Gibbs measure of φ projected through a homogeneous IFS.
LocalDimensionSpectrum gibbs_local_dimension_spectrum(const SelfSimilarIFS& ifs, const KStepPotential& phi,
                                                      bool normalize = false, SpectrumOptions options = {});

}  // namespace thermo
