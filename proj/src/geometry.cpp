#include "thermo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "thermo/error.hpp"
#include "thermo/parallel.hpp"
#include "thermo/pressure.hpp"

namespace thermo {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool near_integer(double x) { return std::abs(x - std::round(x)) <= 1e-9 * std::max(1.0, std::abs(x)); }

double point_distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// f_w as y ↦ r y + t
struct Cell {
  double r = 1.0;
  Point t;
};

}  // namespace

SelfSimilarIFS::SelfSimilarIFS(std::vector<double> ratios, std::vector<Point> offsets, bool sosc_asserted)
    : ratios_(std::move(ratios)), offsets_(std::move(offsets)), sosc_(sosc_asserted) {
  if (ratios_.size() < 2 || ratios_.size() != offsets_.size()) throw InvalidArgument("an IFS needs >= 2 maps");
  dim_ = static_cast<int>(offsets_.front().size());
  if (dim_ < 1 || dim_ > 2) throw InvalidArgument("ambient dimension must be 1 or 2");
  for (std::size_t j = 0; j < ratios_.size(); ++j) {
    if (!(ratios_[j] > 0.0 && ratios_[j] < 1.0)) throw InvalidArgument("contraction ratios must lie in (0, 1)");
    if (static_cast<int>(offsets_[j].size()) != dim_) throw InvalidArgument("offsets have mixed dimensions");
  }
  sft_ = std::make_shared<const Sft>(Sft::full_shift(size()));
}

SelfSimilarIFS SelfSimilarIFS::base(int m) {
  std::vector<Point> c;
  for (int j = 0; j < m; ++j) c.push_back({double(j) / m});
  return SelfSimilarIFS(std::vector<double>(static_cast<std::size_t>(m), 1.0 / m), std::move(c));
}

SelfSimilarIFS SelfSimilarIFS::grid_carpet(int n, const std::vector<std::pair<int, int>>& cells) {
  std::vector<Point> c;
  for (auto [i, j] : cells) c.push_back({double(i) / n, double(j) / n});
  return SelfSimilarIFS(std::vector<double>(cells.size(), 1.0 / n), std::move(c));
}

Point SelfSimilarIFS::fixed_point(int j) const {
  Point x = offsets_[j];
  for (double& v : x) v /= 1.0 - ratios_[j];
  return x;
}

bool SelfSimilarIFS::homogeneous() const {
  return std::all_of(ratios_.begin(), ratios_.end(), [&](double r) { return std::abs(r - ratios_[0]) <= 1e-15; });
}

Point SelfSimilarIFS::apply(int j, const Point& x) const {
  Point y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = ratios_[j] * x[i] + offsets_[j][i];
  return y;
}

Point SelfSimilarIFS::apply(WordView w, const Point& x) const {
  Point y = x;
  for (std::size_t n = w.size(); n-- > 0;) y = apply(w[n], y);
  return y;
}

Point SelfSimilarIFS::chi(WordView w) const {
  Point s(static_cast<std::size_t>(dim_), 0.0);
  double scale = 1.0;
  for (Symbol a : w) {
    for (int i = 0; i < dim_; ++i) s[i] += scale * offsets_[a][i];
    scale *= ratios_[a];
  }
  return s;
}

std::pair<Point, Point> SelfSimilarIFS::box() const {
  Point lo = fixed_point(0), hi = lo;
  for (int j = 1; j < size(); ++j) {
    const Point x = fixed_point(j);
    for (int i = 0; i < dim_; ++i) {
      lo[i] = std::min(lo[i], x[i]);
      hi[i] = std::max(hi[i], x[i]);
    }
  }
  return {lo, hi};
}

std::optional<bool> SelfSimilarIFS::grid_sosc() const {
  if (!homogeneous() || !near_integer(1.0 / ratios_[0])) return std::nullopt;
  const auto n = std::llround(1.0 / ratios_[0]);
  std::vector<std::vector<long long>> cells;
  for (const Point& c : offsets_) {
    std::vector<long long> cell;
    for (double v : c) {
      if (!near_integer(v * n)) return std::nullopt;
      cell.push_back(std::llround(v * n));
    }
    cells.push_back(cell);
  }
  std::sort(cells.begin(), cells.end());
  return std::adjacent_find(cells.begin(), cells.end()) == cells.end();
}

SelfSimilarIFS product(const SelfSimilarIFS& a, const SelfSimilarIFS& b) {
  if (a.dim() != 1 || b.dim() != 1) throw InvalidArgument("products are formed from one-dimensional factors");
  std::vector<double> r;
  std::vector<Point> c;
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < b.size(); ++j) {
      if (std::abs(a.ratio(i) - b.ratio(j)) > 1e-15)
        throw NotHomogeneous("factor maps with different ratios give a self-affine product");
      r.push_back(a.ratio(i));
      c.push_back({a.offset(i)[0], b.offset(j)[0]});
    }
  return SelfSimilarIFS(std::move(r), std::move(c), a.sosc_asserted() && b.sosc_asserted());
}

CodingPotential coding_potential(const SelfSimilarIFS& ifs, int k) {
  if (k < 1) throw InvalidArgument("approximation order must be >= 1");
  const Point x0 = ifs.fixed_point(0);
  std::vector<double> logs;
  double rmax = 0.0;
  for (int j = 0; j < ifs.size(); ++j) {
    logs.push_back(std::log(ifs.ratio(j)));
    rmax = std::max(rmax, ifs.ratio(j));
  }
  double diam = 0.0;
  for (int i = 0; i < ifs.size(); ++i)
    for (int j = 0; j < ifs.size(); ++j) diam = std::max(diam, point_distance(ifs.fixed_point(i), ifs.fixed_point(j)));
  auto phi = KStepPotential::from_function(ifs.sft(), k, ifs.dim(), [&](WordView w, std::span<double> out) {
    const Point y = ifs.apply(w, x0);
    std::copy(y.begin(), y.end(), out.begin());
  });
  return CodingPotential{KStepPotential::one_step(ifs.sft(), logs), std::move(phi),
                         diam * std::pow(rmax, k) / (1.0 - rmax)};
}

SpectrumSolver birkhoff_solver(const SelfSimilarIFS& ifs, int k, SpectrumOptions options) {
  if (ifs.homogeneous()) {
    auto phi = KStepPotential::from_function(ifs.sft(), 1, ifs.dim(), [&](WordView w, std::span<double> out) {
      const Point x = ifs.fixed_point(w[0]);
      std::copy(x.begin(), x.end(), out.begin());
    });
    return SpectrumSolver(PotentialBundle(phi),
                          WeakGibbsMetric(ScalarPotential(KStepPotential::constant(ifs.sft(), std::log(ifs.ratio(0))))),
                          options);
  }
  CodingPotential cp = coding_potential(ifs, k);
  return SpectrumSolver(PotentialBundle(cp.phi), WeakGibbsMetric(ScalarPotential(cp.psi)), options);
}

BirkhoffPoint birkhoff_spectrum_point(const SelfSimilarIFS& ifs, const Point& alpha, int k_max,
                                      SpectrumOptions options) {
  if (static_cast<int>(alpha.size()) != ifs.dim()) throw InvalidArgument("α has the wrong dimension");
  BirkhoffPoint out;
  if (ifs.homogeneous()) {
    const auto lp = birkhoff_solver(ifs, 1, options).legendre(alpha);
    out.value = lp.tau_star;
    out.k = 1;
    out.boundary = lp.boundary;
    return out;
  }
  out.converged = false;
  bool have = false;
  for (int k = 4; k <= k_max; k += 2) {
    LegendrePoint lp;
    try {
      lp = birkhoff_solver(ifs, k, options).legendre(alpha);
    } catch (const TableTooLarge&) {
      if (!have) throw;
      break;
    }
    const bool settled = have && std::abs(lp.tau_star - out.value) < 1e-4;
    out.value = lp.tau_star;
    out.k = k;
    out.boundary = lp.boundary;
    have = true;
    if (settled) {
      out.converged = true;
      break;
    }
  }
  return out;
}

bool in_attractor(const SelfSimilarIFS& ifs, const Point& p, int depth) {
  const auto [lo, hi] = ifs.box();
  const int d = ifs.dim();
  double diam = 0.0;
  for (int i = 0; i < d; ++i) diam = std::max(diam, hi[i] - lo[i]);
  std::vector<Cell> frontier{{1.0, Point(static_cast<std::size_t>(d), 0.0)}};
  auto inside = [&](const Cell& c) {
    const double tol = 1e-9 * c.r * diam + 1e-14;
    for (int i = 0; i < d; ++i)
      if (p[i] < c.r * lo[i] + c.t[i] - tol || p[i] > c.r * hi[i] + c.t[i] + tol) return false;
    return true;
  };
  if (!inside(frontier[0])) return false;
  for (int level = 0; level < depth; ++level) {
    std::vector<Cell> next;
    for (const Cell& c : frontier)
      for (int j = 0; j < ifs.size(); ++j) {
        Cell child{c.r * ifs.ratio(j), c.t};
        for (int i = 0; i < d; ++i) child.t[i] += c.r * ifs.offset(j)[i];
        if (!inside(child)) continue;
        const bool seen = std::any_of(next.begin(), next.end(), [&](const Cell& o) {
          return std::abs(o.r - child.r) <= 1e-15 && point_distance(o.t, child.t) <= 1e-14;
        });
        if (!seen) next.push_back(std::move(child));
      }
    if (next.empty()) return false;
    frontier = std::move(next);
  }
  return true;
}

FixedPointDimension fixed_point_average_dimension(const SelfSimilarIFS& ifs, int k, int membership_depth,
                                                  SpectrumOptions options) {
  const auto grid = ifs.grid_sosc();
  if (grid && !*grid) throw InvalidArgument("the grid cells of the IFS overlap");
  if (!grid && !ifs.sosc_asserted()) throw InvalidArgument("the strong open set condition must be asserted");
  const SpectrumSolver solver = birkhoff_solver(ifs, k, options);
  const int d = ifs.dim();

  FixedPointDimension out;
  const Point& top = solver.alpha_max();
  if (in_attractor(ifs, top, membership_depth)) {
    out.value = solver.d_psi();
    out.argmax = top;
    out.full_dim = true;
    return out;
  }

  std::map<Point, double> cache;
  auto evaluate = [&](std::vector<Point> pts) {
    std::vector<Point> fresh;
    for (Point& p : pts)
      if (!cache.count(p)) fresh.push_back(std::move(p));
    std::sort(fresh.begin(), fresh.end());
    fresh.erase(std::unique(fresh.begin(), fresh.end()), fresh.end());
    std::vector<double> vals(fresh.size(), kNegInf);
    parallel_for(fresh.size(), options.threads, [&](std::size_t i) {
      try {
        vals[i] = solver.legendre(fresh[i]).tau_star;
      } catch (const NotInLPhi&) {
      }
    });
    for (std::size_t i = 0; i < fresh.size(); ++i) cache.emplace(fresh[i], vals[i]);
  };
  auto representatives = [&](const Cell& c) {
    std::vector<Point> pts;
    for (int j = 0; j < ifs.size(); ++j) {
      Point x = ifs.fixed_point(j);
      for (int i = 0; i < d; ++i) x[i] = c.r * x[i] + c.t[i];
      pts.push_back(std::move(x));
    }
    return pts;
  };
  auto better = [](double v, const Point& p, double bv, const Point& bp) {
    return v > bv + 1e-12 || (v >= bv - 1e-12 && p < bp);
  };

  constexpr std::size_t kBeam = 6;
  out.value = kNegInf;
  std::vector<Cell> beam{{1.0, Point(static_cast<std::size_t>(d), 0.0)}};
  for (int level = 0; level <= membership_depth && !beam.empty(); ++level) {
    std::vector<Cell> cells;
    if (level == 0) {
      cells = beam;
    } else {
      for (const Cell& c : beam)
        for (int j = 0; j < ifs.size(); ++j) {
          Cell child{c.r * ifs.ratio(j), c.t};
          for (int i = 0; i < d; ++i) child.t[i] += c.r * ifs.offset(j)[i];
          cells.push_back(std::move(child));
        }
    }
    std::vector<Point> pts;
    for (const Cell& c : cells)
      for (Point& p : representatives(c)) pts.push_back(std::move(p));
    evaluate(pts);

    std::vector<std::pair<double, std::size_t>> scored;
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
      double s = kNegInf;
      for (const Point& p : representatives(cells[ci])) {
        const double v = cache.at(p);
        s = std::max(s, v);
        if (out.argmax.empty() || better(v, p, out.value, out.argmax)) {
          out.value = v;
          out.argmax = p;
        }
      }
      scored.emplace_back(s, ci);
    }
    std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    beam.clear();
    for (std::size_t i = 0; i < scored.size() && i < kBeam; ++i) beam.push_back(cells[scored[i].second]);
  }
  return out;
}

double LocalDimensionSpectrum::localized(const KStepPotential& xi, bool interval_valued) const {
  return solver->localized_dimension(xi.scaled(log_ratio), interval_valued);
}

LocalDimensionSpectrum gibbs_local_dimension_spectrum(const SelfSimilarIFS& ifs, const KStepPotential& phi,
                                                      bool normalize, SpectrumOptions options) {
  if (!ifs.homogeneous()) throw NotHomogeneous("local-dimension spectra need a common contraction ratio");
  if (phi.dim() != 1 || !(phi.sft() == *ifs.sft())) throw InvalidArgument("φ must be scalar on the coding shift");
  KStepPotential pot = phi;
  const double p = pressure_exact(phi);
  if (std::abs(p) > 1e-8) {
    if (!normalize) throw NotNormalized("P(φ) = " + std::to_string(p) + " is not 0");
    pot = phi.shifted(-p);
  }
  LocalDimensionSpectrum out;
  out.log_ratio = std::log(ifs.ratio(0));
  out.solver = std::make_shared<const SpectrumSolver>(
      PotentialBundle({ScalarPotential(pot)}),
      WeakGibbsMetric(ScalarPotential(KStepPotential::constant(ifs.sft(), out.log_ratio))), options);
  const LPhi& l = out.solver->l_phi();
  out.beta_lo = l.hi / out.log_ratio;
  out.beta_hi = l.lo / out.log_ratio;
  const SpectrumCurve curve = out.solver->curve();
  for (auto it = curve.grid.rbegin(); it != curve.grid.rend(); ++it)
    out.points.emplace_back(it->alpha[0] / out.log_ratio, it->tau_star);
  return out;
}

}  // namespace thermo
