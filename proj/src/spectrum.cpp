#include "thermo/spectrum.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <mutex>

#include "thermo/error.hpp"
#include "thermo/parallel.hpp"
#include "thermo/pressure.hpp"

namespace thermo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kKarpLimit = 2048;
constexpr std::size_t kTailSetCap = 4096;
const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double cross(const Point& o, const Point& a, const Point& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

double karp_max_mean(const DeBruijnGraph& g, std::span<const double> w) {
  const std::size_t n = g.state_count();
  std::vector<double> d((n + 1) * n, -kInf);
  std::fill(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(n), 0.0);
  for (std::size_t k = 1; k <= n; ++k) {
    const double* prev = d.data() + (k - 1) * n;
    double* cur = d.data() + k * n;
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      const double v = prev[g.edge_source(e)] + w[e];
      double& slot = cur[g.edge_target(e)];
      if (v > slot) slot = v;
    }
  }
  double best = -kInf;
  for (std::size_t v = 0; v < n; ++v) {
    const double dn = d[n * n + v];
    if (dn == -kInf) continue;
    double worst = kInf;
    for (std::size_t k = 0; k < n; ++k) {
      const double dk = d[k * n + v];
      if (dk == -kInf) continue;
      worst = std::min(worst, (dn - dk) / static_cast<double>(n - k));
    }
    best = std::max(best, worst);
  }
  return best;
}

double maxplus_mean(const DeBruijnGraph& g, std::span<const double> w) {
  const std::size_t n = g.state_count();
  std::vector<double> v(n, 0.0), next(n);
  double lo = -kInf, hi = kInf;
  for (int it = 1; it <= 5000 && hi - lo > 1e-12; ++it) {
    for (std::size_t u = 0; u < n; ++u) {
      double best = -kInf;
      for (std::size_t e = g.out_begin(u); e < g.out_end(u); ++e) best = std::max(best, w[e] + v[g.edge_target(e)]);
      next[u] = best;
    }
    double step_lo = kInf, step_hi = -kInf;
    for (std::size_t u = 0; u < n; ++u) {
      step_lo = std::min(step_lo, next[u] - v[u]);
      step_hi = std::max(step_hi, next[u] - v[u]);
    }
    lo = std::max(lo, step_lo);
    hi = std::min(hi, step_hi);
    const double shift = next[0];
    for (std::size_t u = 0; u < n; ++u) v[u] = next[u] - shift;
  }
  return 0.5 * (lo + hi);
}

double golden_min(const std::function<double(double)>& f, double a, double b, double tol, double* fmin) {
  double c = b - kGolden * (b - a), d = a + kGolden * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = f(d);
    }
  }
  if (fc <= fd) {
    if (fmin) *fmin = fc;
    return c;
  }
  if (fmin) *fmin = fd;
  return d;
}

}  // namespace

bool LPhi::contains(std::span<const double> alpha, double tol) const { return depth(alpha) >= -tol; }

double LPhi::depth(std::span<const double> alpha) const {
  if (dim == 1) return std::min(alpha[0] - lo, hi - alpha[0]);
  const Point a(alpha.begin(), alpha.end());
  if (polygon.size() == 1) return -std::hypot(a[0] - polygon[0][0], a[1] - polygon[0][1]);
  if (polygon.size() == 2) {
    const Point& p = polygon[0];
    const Point& q = polygon[1];
    const double len2 = (q[0] - p[0]) * (q[0] - p[0]) + (q[1] - p[1]) * (q[1] - p[1]);
    const double t = std::clamp(((a[0] - p[0]) * (q[0] - p[0]) + (a[1] - p[1]) * (q[1] - p[1])) / len2, 0.0, 1.0);
    return -std::hypot(a[0] - p[0] - t * (q[0] - p[0]), a[1] - p[1] - t * (q[1] - p[1]));
  }
  double best = kInf;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Point& p = polygon[i];
    const Point& q = polygon[(i + 1) % polygon.size()];
    best = std::min(best, cross(p, q, a) / std::hypot(q[0] - p[0], q[1] - p[1]));
  }
  return best;
}

std::pair<double, double> cycle_mean_range(const DeBruijnGraph& graph, std::span<const double> weights) {
  std::vector<double> neg(weights.size());
  for (std::size_t e = 0; e < neg.size(); ++e) neg[e] = -weights[e];
  if (graph.state_count() <= kKarpLimit) return {-karp_max_mean(graph, neg), karp_max_mean(graph, weights)};
  return {-maxplus_mean(graph, neg), maxplus_mean(graph, weights)};
}

std::vector<Point> convex_hull(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() <= 2) return pts;
  double scale = 0.0;
  for (const auto& p : pts) scale = std::max({scale, std::abs(p[0]), std::abs(p[1])});
  const double eps = 1e-12 * std::max(scale * scale, 1e-300);
  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= eps) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= eps) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

double quasi_concavity_violation(const std::vector<double>& v) {
  if (v.size() < 3) return 0.0;
  const auto top = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 <= top; ++i) worst = std::max(worst, v[i] - v[i + 1]);
  for (std::size_t i = top; i + 1 < v.size(); ++i) worst = std::max(worst, v[i + 1] - v[i]);
  return worst;
}

SpectrumSolver::SpectrumSolver(PotentialBundle phi, WeakGibbsMetric metric, SpectrumOptions options)
    : phi_(std::move(phi)),
      metric_(std::move(metric)),
      options_(options),
      d_(phi_.dim()),
      window_(std::max(phi_.max_window(), metric_.psi().window())),
      merged_(phi_.all_kstep() ? phi_.merged() : throw InvalidArgument("spectrum needs k-step components; "
                                                                        "use a Hölder approximation for cocycles")),
      psi_(metric_.psi().kstep() ? *metric_.psi().kstep()
                                 : throw InvalidArgument("spectrum needs a k-step metric potential")) {
  if (d_ > 2) throw InvalidArgument("vector potentials of dimension > 2 are not supported");
  if (!(phi_.sft() == metric_.sft())) throw InvalidArgument("potential and metric live on different shifts");
  graph_ = window_graph(phi_.sft_ptr(), window_);
  phi_e_ = edge_values(merged_, *graph_);
  psi_e_ = edge_values(psi_, *graph_);
  psi_min_ = metric_.psi_min();
  psi_max_ = metric_.psi_max();

  const Point zero(static_cast<std::size_t>(d_), 0.0);
  const TauEval at_zero = tau_eval(zero, zero);
  d_psi_ = at_zero.tau;
  alpha_max_ = at_zero.witness.phi_avg;

  l_phi_.dim = d_;
  if (d_ == 1) {
    const auto [lo, hi] = cycle_mean_range(*graph_, phi_e_);
    l_phi_.lo = lo;
    l_phi_.hi = hi;
    l_phi_.approximate = graph_->state_count() > kKarpLimit;
    affine_dim_ = hi - lo > 1e-12 * std::max(1.0, std::abs(hi)) ? 1 : 0;
  } else {
    std::vector<Point> pts;
    const Sft& sft = phi_.sft();
    int len = 1;
    while (len < options_.cycle_cap && sft.count_words(len + 1) <= 20000) ++len;
    for (const Word& c : admissible_cycles(sft, len)) pts.push_back(periodic_average(merged_, c));
    if (graph_->state_count() <= 4096) {
      std::mt19937_64 rng(options_.seed);
      for (int i = 0; i < options_.hull_samples; ++i)
        pts.push_back(MarkovMeasure::random(phi_.sft_ptr(), graph_->state_length(), rng).potential_average(merged_));
    }
    l_phi_.polygon = convex_hull(pts);
    l_phi_.approximate = true;
    double area = 0.0;
    const auto& poly = l_phi_.polygon;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Point& p = poly[i];
      const Point& q = poly[(i + 1) % poly.size()];
      area += p[0] * q[1] - q[0] * p[1];
    }
    double extent = 0.0;
    for (const auto& p : poly)
      for (const auto& q : poly) extent = std::max(extent, std::hypot(p[0] - q[0], p[1] - q[1]));
    affine_dim_ = poly.size() >= 3 && std::abs(area) > 1e-10 * std::max(extent * extent, 1e-300) ? 2
                  : extent > 1e-12                                                              ? 1
                                                                                                : 0;
  }

  if (merged_.k() > 1) {
    tail_index_ = std::make_shared<const WordIndex>(phi_.sft(), merged_.k() - 1);
    tail_sets_.resize(tail_index_->size());
  }
}

std::vector<double> SpectrumSolver::log_weights(std::span<const double> z, std::span<const double> alpha,
                                                double t) const {
  const double shift = -dot(z, alpha);
  std::vector<double> lw(graph_->edge_count());
  for (std::size_t e = 0; e < lw.size(); ++e) {
    double v = shift + t * psi_e_[e];
    for (int c = 0; c < d_; ++c) v += z[c] * phi_e_[e * d_ + c];
    lw[e] = v;
  }
  return lw;
}

double SpectrumSolver::pressure(std::span<const double> z, std::span<const double> alpha, double t) const {
  return perron(*graph_, log_weights(z, alpha, t)).log_rho;
}

double SpectrumSolver::tau(std::span<const double> z, std::span<const double> alpha) const {
  auto f = [&](double t) { return pressure(z, alpha, t); };
  const double p0 = f(0.0);
  if (p0 == 0.0) return 0.0;
  double lo = p0 / std::abs(psi_min_), hi = p0 / std::abs(psi_max_);
  if (lo > hi) std::swap(lo, hi);
  if (hi - lo <= options_.root_tol) return 0.5 * (lo + hi);
  double flo = f(lo), fhi = f(hi);
  for (double step = options_.root_tol; flo < 0.0; step *= 2) flo = f(lo -= step);
  for (double step = options_.root_tol; fhi > 0.0; step *= 2) fhi = f(hi += step);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  std::uintmax_t iters = 200;
  const double tol = options_.root_tol;
  const auto r = boost::math::tools::toms748_solve(
      f, lo, hi, flo, fhi, [tol](double a, double b) { return std::abs(b - a) <= tol; }, iters);
  return 0.5 * (r.first + r.second);
}

TauEval SpectrumSolver::tau_eval(std::span<const double> z, std::span<const double> alpha) const {
  TauEval out;
  out.tau = tau(z, alpha);
  const auto lw = log_weights(z, alpha, out.tau);
  const PerronData pd = perron(*graph_, lw, true);
  const double shift = *std::max_element(lw.begin(), lw.end());
  const double rho = std::exp(pd.log_rho - shift);
  Point phi_avg(static_cast<std::size_t>(d_), 0.0);
  double psi_avg = 0.0, f_avg = 0.0, mass = 0.0;
  for (std::size_t e = 0; e < lw.size(); ++e) {
    const double flow = pd.left[static_cast<Eigen::Index>(graph_->edge_source(e))] * std::exp(lw[e] - shift) *
                        pd.right[static_cast<Eigen::Index>(graph_->edge_target(e))] / rho;
    if (!(flow > 0.0)) continue;
    mass += flow;
    psi_avg += flow * psi_e_[e];
    f_avg += flow * lw[e];
    for (int c = 0; c < d_; ++c) phi_avg[c] += flow * phi_e_[e * d_ + c];
  }
  psi_avg /= mass;
  f_avg /= mass;
  for (double& v : phi_avg) v /= mass;
  out.witness.phi_avg = phi_avg;
  out.witness.psi_avg = psi_avg;
  out.witness.entropy = std::max(0.0, pd.log_rho - f_avg);
  out.gradient.resize(static_cast<std::size_t>(d_));
  for (int c = 0; c < d_; ++c) out.gradient[c] = (phi_avg[c] - alpha[c]) / (-psi_avg);
  return out;
}

LegendrePoint SpectrumSolver::legendre(std::span<const double> alpha) const {
  if (static_cast<int>(alpha.size()) != d_) throw InvalidArgument("α has the wrong dimension");
  return d_ == 1 ? legendre_1d(alpha[0]) : legendre_2d(alpha);
}

LegendrePoint SpectrumSolver::legendre_1d(double a) const {
  LegendrePoint out;
  out.alpha = {a};
  const double infl = options_.lphi_inflation * std::max(1.0, std::abs(l_phi_.hi) + std::abs(l_phi_.lo));
  if (a < l_phi_.lo - infl || a > l_phi_.hi + infl)
    throw NotInLPhi("α=" + std::to_string(a) + " lies outside L_Φ=[" + std::to_string(l_phi_.lo) + ", " +
                    std::to_string(l_phi_.hi) + "]");
  const Point alpha{a};
  if (affine_dim_ == 0) {
    out.tau_star = d_psi_;
    out.z_star = {0.0};
    return out;
  }
  auto f = [&](double z) { return tau(std::span(&z, 1), alpha); };
  auto grad = [&](double z) { return tau_eval(std::span(&z, 1), alpha).gradient[0]; };
  if (a <= l_phi_.lo + infl || a >= l_phi_.hi - infl) {
    // equilibrium states are fully supported, so endpoints are never attained
    out.boundary = true;
    const double dir = a <= l_phi_.lo + infl ? -1.0 : 1.0;
    double z = dir, value = f(z);
    while (std::abs(z) < options_.z_cap) {
      double next;
      try {
        next = f(2 * z);
      } catch (const NonIrreducible&) {
        break;
      }
      z *= 2;
      const bool settled = std::abs(next - value) <= options_.root_tol;
      value = std::min(value, next);
      if (settled) break;
    }
    out.z_star = {z};
    out.tau_star = std::max(0.0, value);
    return out;
  }

  const double g0 = grad(0.0);
  double zstar = 0.0;
  if (std::abs(g0) > 1e-15) {
    const double dir = g0 > 0.0 ? -1.0 : 1.0;
    double inner = 0.0, outer = dir;
    while (grad(outer) * dir < 0.0) {
      if (std::abs(outer) >= options_.z_cap) {
        out.boundary = true;
        out.z_star = {dir * options_.z_cap};
        out.tau_star = f(out.z_star[0]);
        return out;
      }
      inner = outer;
      outer *= 2.0;
    }
    const double lo = std::min(inner, outer), hi = std::max(inner, outer);
    zstar = golden_min(f, lo, hi, options_.min_tol * std::max(1.0, std::abs(hi)), nullptr);
    // polish: the minimizer is the zero of the increasing gradient
    double h = 4.0 * options_.min_tol * std::max(1.0, std::abs(zstar));
    double a0 = std::max(lo, zstar - h), b0 = std::min(hi, zstar + h);
    double ga = grad(a0), gb = grad(b0);
    for (double w = h; ga > 0.0 && a0 > lo; w *= 2) ga = grad(a0 = std::max(lo, zstar - w));
    for (double w = h; gb < 0.0 && b0 < hi; w *= 2) gb = grad(b0 = std::min(hi, zstar + w));
    if (ga == 0.0) {
      zstar = a0;
    } else if (gb == 0.0) {
      zstar = b0;
    } else if (ga < 0.0 && gb > 0.0) {
      std::uintmax_t iters = 100;
      const auto r = boost::math::tools::toms748_solve(
          grad, a0, b0, ga, gb,
          [](double x, double y) { return std::abs(y - x) <= 1e-15 * std::max(1.0, std::abs(x)); }, iters);
      zstar = 0.5 * (r.first + r.second);
    }
  }
  const TauEval ev = tau_eval(std::span(&zstar, 1), alpha);
  out.z_star = {zstar};
  out.tau_star = ev.tau;
  out.witness = ev.witness;
  return out;
}

LegendrePoint SpectrumSolver::legendre_2d(std::span<const double> alpha) const {
  LegendrePoint out;
  out.alpha.assign(alpha.begin(), alpha.end());
  double extent = 1.0;
  for (const auto& p : l_phi_.polygon) extent = std::max({extent, std::abs(p[0]), std::abs(p[1])});
  if (!l_phi_.contains(alpha, options_.lphi_inflation * extent))
    throw NotInLPhi("α=(" + std::to_string(alpha[0]) + ", " + std::to_string(alpha[1]) + ") lies outside L_Φ");
  if (affine_dim_ < 2)
    throw NotFullDimensional("L_Φ has affine dimension " + std::to_string(affine_dim_) + " < 2");

  Eigen::Vector2d z(0.0, 0.0);
  auto eval = [&](const Eigen::Vector2d& p) {
    const double zz[2] = {p[0], p[1]};
    return tau_eval(zz, alpha);
  };
  auto value = [&](const Eigen::Vector2d& p) {
    const double zz[2] = {p[0], p[1]};
    return tau(zz, alpha);
  };
  TauEval cur = eval(z);
  bool converged = false;
  for (int it = 0; it < 200; ++it) {
    const Eigen::Vector2d g(cur.gradient[0], cur.gradient[1]);
    if (g.norm() <= 1e-13) {
      converged = true;
      break;
    }
    const double h = 1e-5 * std::max(1.0, z.norm());
    Eigen::Matrix2d hess;
    for (int j = 0; j < 2; ++j) {
      Eigen::Vector2d e = Eigen::Vector2d::Zero();
      e[j] = h;
      const TauEval up = eval(z + e), dn = eval(z - e);
      hess(0, j) = (up.gradient[0] - dn.gradient[0]) / (2 * h);
      hess(1, j) = (up.gradient[1] - dn.gradient[1]) / (2 * h);
    }
    hess = 0.5 * (hess + hess.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(hess);
    const double floor = 1e-10 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    Eigen::Vector2d ev = es.eigenvalues().cwiseMax(floor);
    Eigen::Vector2d step = -(es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose()) * g;
    const double max_step = std::max(4.0, z.norm());
    if (step.norm() > max_step) step *= max_step / step.norm();
    double t = 1.0;
    Eigen::Vector2d next = z + step;
    double fnext = value(next);
    const double slope = g.dot(step);
    while (fnext > cur.tau + 1e-4 * t * slope && t > 1e-12) {
      t *= 0.5;
      next = z + t * step;
      fnext = value(next);
    }
    if (fnext > cur.tau) break;
    const double moved = (next - z).norm();
    z = next;
    if (z.norm() > options_.z_cap) break;
    cur = eval(z);
    if (moved <= options_.min_tol * std::max(1.0, z.norm())) {
      converged = true;
      break;
    }
  }
  if (!converged && z.norm() <= options_.z_cap) {
    // coordinate golden-section cycles
    for (int cycle = 0; cycle < 100; ++cycle) {
      double moved = 0.0;
      for (int j = 0; j < 2; ++j) {
        auto along = [&](double s) {
          Eigen::Vector2d p = z;
          p[j] = s;
          return value(p);
        };
        double lo = z[j] - 1.0, hi = z[j] + 1.0;
        while (along(lo) < along(lo + 0.5) && std::abs(lo) < options_.z_cap) lo -= 2 * (hi - lo);
        while (along(hi) < along(hi - 0.5) && std::abs(hi) < options_.z_cap) hi += 2 * (hi - lo);
        const double s = golden_min(along, lo, hi, options_.min_tol, nullptr);
        moved = std::max(moved, std::abs(s - z[j]));
        z[j] = s;
      }
      if (moved <= options_.min_tol) {
        converged = true;
        break;
      }
    }
    cur = eval(z);
  }
  out.z_star = {z[0], z[1]};
  if (z.norm() > options_.z_cap || !converged) {
    out.boundary = true;
    out.tau_star = value(z);
    return out;
  }
  out.tau_star = cur.tau;
  out.witness = cur.witness;
  return out;
}

SpectrumCurve SpectrumSolver::curve(const std::vector<double>& alphas) const {
  if (d_ != 1) throw InvalidArgument("explicit α lists are for d = 1");
  SpectrumCurve out;
  out.dim = 1;
  out.l_phi = l_phi_;
  out.d_psi = d_psi_;
  out.grid.resize(alphas.size());
  parallel_for(alphas.size(), options_.threads, [&](std::size_t i) { out.grid[i] = legendre(std::span(&alphas[i], 1)); });
  return out;
}

SpectrumCurve SpectrumSolver::curve() const {
  if (d_ == 1) {
    std::vector<double> alphas;
    if (affine_dim_ == 0) {
      alphas = {l_phi_.lo};
    } else {
      const int n = std::max(options_.grid_points, 2);
      for (int i = 0; i < n; ++i) alphas.push_back(l_phi_.lo + (l_phi_.hi - l_phi_.lo) * i / (n - 1));
      alphas.back() = l_phi_.hi;
    }
    return curve(alphas);
  }
  if (affine_dim_ < 2) throw NotFullDimensional("L_Φ has affine dimension " + std::to_string(affine_dim_) + " < 2");
  double x0 = kInf, x1 = -kInf, y0 = kInf, y1 = -kInf;
  for (const auto& p : l_phi_.polygon) {
    x0 = std::min(x0, p[0]);
    x1 = std::max(x1, p[0]);
    y0 = std::min(y0, p[1]);
    y1 = std::max(y1, p[1]);
  }
  std::vector<Point> pts;
  const int n = std::max(options_.grid_side, 2);
  const double tol = 1e-12 * std::max({1.0, std::abs(x0), std::abs(x1), std::abs(y0), std::abs(y1)});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Point p{x0 + (x1 - x0) * i / (n - 1), y0 + (y1 - y0) * j / (n - 1)};
      if (l_phi_.contains(p, tol)) pts.push_back(p);
    }
  SpectrumCurve out;
  out.dim = 2;
  out.l_phi = l_phi_;
  out.d_psi = d_psi_;
  out.grid.resize(pts.size());
  parallel_for(pts.size(), options_.threads, [&](std::size_t i) { out.grid[i] = legendre(pts[i]); });
  return out;
}

const std::vector<std::vector<double>>& SpectrumSolver::tail_values(std::size_t suffix) const {
  static std::mutex mutex;
  std::lock_guard lock(mutex);
  auto& slot = const_cast<std::vector<std::vector<double>>&>(tail_sets_[suffix]);
  if (!slot.empty()) return slot;
  const Sft& sft = phi_.sft();
  const int k = merged_.k();
  const std::uint64_t total = sft.count_words(2 * k - 2);
  std::vector<std::vector<double>> values;
  const Word u = tail_index_->word(suffix);
  if (total > kTailSetCap * tail_index_->size() * 4) {
    // too many completions: keep the corners of the componentwise box
    std::vector<Interval> box;
    for (int c = 0; c < d_; ++c) box.push_back(merged_.tail_range(u, c));
    if (d_ == 1) {
      values = {{box[0].lo}, {box[0].hi}};
    } else {
      values = {{box[0].lo, box[1].lo}, {box[0].hi, box[1].hi}, {box[0].lo, box[1].hi}, {box[0].hi, box[1].lo}};
    }
    slot = values;
    return slot;
  }
  Word x = u;
  std::vector<double> acc(static_cast<std::size_t>(d_), 0.0);
  std::function<void()> rec = [&] {
    if (static_cast<int>(x.size()) == 2 * k - 2) {
      values.push_back(acc);
      return;
    }
    for (Symbol a : sft.successors(x.back())) {
      x.push_back(a);
      const auto wi = static_cast<std::size_t>(merged_.windows().index_of(WordView(x).last(k)));
      for (int c = 0; c < d_; ++c) acc[c] += merged_.value_at(wi, c);
      rec();
      for (int c = 0; c < d_; ++c) acc[c] -= merged_.value_at(wi, c);
      x.pop_back();
    }
  };
  rec();
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  slot = std::move(values);
  return slot;
}

bool SpectrumSolver::tail_hits(std::span<const double> fixed, WordView word, int len, std::span<const double> alpha,
                               double eps) const {
  auto hit = [&](std::span<const double> v) {
    if (len == 0) {
      double s = 0.0;
      for (int c = 0; c < d_; ++c) s += alpha[c] * alpha[c];
      return std::sqrt(s) < eps;
    }
    double s = 0.0;
    for (int c = 0; c < d_; ++c) {
      const double diff = (fixed[c] + v[c]) / len - alpha[c];
      s += diff * diff;
    }
    return std::sqrt(s) < eps;
  };
  const int k = merged_.k();
  if (k == 1) {
    const std::vector<double> zero(static_cast<std::size_t>(d_), 0.0);
    return hit(zero);
  }
  if (len >= k - 1) {
    const auto s = static_cast<std::size_t>(tail_index_->index_of(word.last(static_cast<std::size_t>(k - 1))));
    for (const auto& v : tail_values(s))
      if (hit(v)) return true;
    return false;
  }
  // short word: φ_len over every completion, fixed part is empty
  for (std::size_t s = 0; s < tail_index_->size(); ++s) {
    const Word u = tail_index_->word(s);
    if (!std::equal(word.begin(), word.end(), u.begin())) continue;
    const Word x = u;
    // φ_len(x) for x ∈ [u]: the first len overhanging windows
    std::vector<std::vector<double>> vals;
    Word y = x;
    std::vector<double> acc(static_cast<std::size_t>(d_), 0.0);
    std::function<bool()> rec = [&]() -> bool {
      if (static_cast<int>(y.size()) == len + k - 1) {
        std::vector<double> v(static_cast<std::size_t>(d_), 0.0);
        for (int t = 0; t < len; ++t) {
          const auto wi = static_cast<std::size_t>(merged_.windows().index_of(WordView(y).subspan(t, k)));
          for (int c = 0; c < d_; ++c) v[c] += merged_.value_at(wi, c);
        }
        return hit(v);
      }
      for (Symbol a : phi_.sft().successors(y.back())) {
        y.push_back(a);
        const bool found = rec();
        y.pop_back();
        if (found) return true;
      }
      return false;
    };
    if (static_cast<int>(y.size()) > len + k - 1) y.resize(static_cast<std::size_t>(len + k - 1));
    if (rec()) return true;
  }
  return false;
}

double SpectrumSolver::tail_max(std::span<const double> z, std::span<const double>, WordView word) const {
  const int k = merged_.k();
  if (k == 1) return 0.0;
  const int len = static_cast<int>(word.size());
  if (len >= k - 1) {
    const auto s = static_cast<std::size_t>(tail_index_->index_of(word.last(static_cast<std::size_t>(k - 1))));
    double best = -kInf;
    for (const auto& v : tail_values(s)) best = std::max(best, dot(z, v));
    return best;
  }
  // short word: maximize ⟨z, φ_len⟩ over completions directly
  double best = -kInf;
  Word y(word.begin(), word.end());
  std::function<void()> rec = [&] {
    if (static_cast<int>(y.size()) == len + k - 1) {
      double v = 0.0;
      for (int t = 0; t < len; ++t) {
        const auto wi = static_cast<std::size_t>(merged_.windows().index_of(WordView(y).subspan(t, k)));
        for (int c = 0; c < d_; ++c) v += z[c] * merged_.value_at(wi, c);
      }
      best = std::max(best, v);
      return;
    }
    if (y.empty()) {
      for (int a = 0; a < phi_.sft().alphabet_size(); ++a) {
        y.push_back(static_cast<Symbol>(a));
        rec();
        y.pop_back();
      }
      return;
    }
    for (Symbol a : phi_.sft().successors(y.back())) {
      y.push_back(a);
      rec();
      y.pop_back();
    }
  };
  rec();
  return best;
}

double SpectrumSolver::tau_metric_estimate(std::span<const double> z, std::span<const double> alpha, int n) const {
  if (n < 1) throw InvalidArgument("resolution must be >= 1");
  const BallWalker walker(metric_, &merged_, options_.ball_cap);
  const double za = dot(z, alpha);
  const double total = walker.log_sum(n, [&](int len, std::span<const double> fixed, WordView word) {
    return dot(z, fixed) - len * za + tail_max(z, fixed, word);
  });
  return total / n;
}

std::uint64_t SpectrumSolver::ld_count(std::span<const double> alpha, int n, double eps) const {
  const BallWalker walker(metric_, &merged_, options_.ball_cap);
  return walker.count(n, [&](int len, std::span<const double> fixed, WordView word) {
    return tail_hits(fixed, word, len, alpha, eps);
  });
}

LambdaEstimate SpectrumSolver::lambda_estimate(std::span<const double> alpha, const std::vector<int>& n_list,
                                               const std::vector<double>& eps_list) const {
  LambdaEstimate out;
  for (int n : n_list)
    for (double eps : eps_list) {
      CountRow row;
      row.n = n;
      row.eps = eps;
      row.count = ld_count(alpha, n, eps);
      row.rate = row.count > 0 ? std::log(static_cast<double>(row.count)) / n : -kInf;
      out.rows.push_back(row);
    }
  if (!out.rows.empty()) {
    const int n_top = *std::max_element(n_list.begin(), n_list.end());
    const double eps_min = *std::min_element(eps_list.begin(), eps_list.end());
    for (const auto& row : out.rows)
      if (row.n == n_top && row.eps == eps_min) out.extrapolated = row.rate;
  }
  return out;
}

MarkovMeasure SpectrumSolver::equilibrium(std::span<const double> z, std::span<const double> alpha, double t) const {
  const auto lw = log_weights(z, alpha, t);
  // transition weights on the solver graph coincide with the lifted scalar potential
  const int k = graph_->state_length() + 1;
  std::vector<double> table(lw.begin(), lw.end());
  return equilibrium_state(KStepPotential(phi_.sft_ptr(), k, 1, std::move(table)));
}

ConditionalResult SpectrumSolver::conditional_variational(std::span<const double> alpha) const {
  const LegendrePoint lp = legendre(alpha);
  if (lp.boundary)
    throw BoundaryAlpha("the Legendre infimum is not attained at this α; no witness measure exists");
  MarkovMeasure mu = equilibrium(lp.z_star, alpha, lp.tau_star);
  Point avg = mu.potential_average(merged_);
  const double psi_avg = mu.potential_average(psi_)[0];
  double res = 0.0;
  for (int c = 0; c < d_; ++c) res = std::max(res, std::abs(avg[c] - alpha[c]));
  const double value = mu.entropy() / (-psi_avg);
  return ConditionalResult{value, std::move(mu), std::move(avg), res};
}

double SpectrumSolver::localized_dimension(const KStepPotential& xi, bool interval_valued) const {
  if (d_ != 1) throw InvalidArgument("localized dimensions need d = 1");
  if (xi.dim() != 1 || !(xi.sft() == phi_.sft())) throw InvalidArgument("ξ must be a scalar potential on the same shift");
  const double lo = xi.min_value(), hi = xi.max_value();
  const double tol = std::max(options_.lphi_inflation, 1e-9) * std::max(1.0, std::abs(l_phi_.lo) + std::abs(l_phi_.hi));
  if (lo < l_phi_.lo - tol || hi > l_phi_.hi + tol)
    throw RangeEscapesLPhi("ξ takes values in [" + std::to_string(lo) + ", " + std::to_string(hi) +
                           "] outside L_Φ=[" + std::to_string(l_phi_.lo) + ", " + std::to_string(l_phi_.hi) + "]");
  auto tstar = [&](double a) {
    a = std::clamp(a, l_phi_.lo, l_phi_.hi);
    return legendre(std::span(&a, 1)).tau_star;
  };
  if (!interval_valued) {
    std::vector<double> vals(xi.table().begin(), xi.table().end());
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    double best = -kInf;
    for (double v : vals) best = std::max(best, tstar(v));
    return best;
  }
  double best = std::max(tstar(lo), tstar(hi));
  if (alpha_max_[0] >= lo && alpha_max_[0] <= hi) best = std::max(best, d_psi_);
  if (hi - lo > options_.min_tol) {
    double fmin = 0.0;
    golden_min([&](double a) { return -tstar(a); }, lo, hi, options_.min_tol, &fmin);
    best = std::max(best, -fmin);
  }
  return best;
}

}  // namespace thermo
