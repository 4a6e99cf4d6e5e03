#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <json.hpp>
#include <map>
#include <random>

#include "thermo/cli.hpp"
#include "thermo/error.hpp"
#include "thermo/measures.hpp"
#include "thermo/moran.hpp"
#include "thermo/pressure.hpp"

namespace thermo::cli {

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", v);
}

class Csv {
 public:
  Csv(const RunConfig& config, const std::string& command, std::vector<std::string> columns)
      : width_(columns.size()) {
    out_ = fmt::format("# thermospec {} command={} config-sha256={} seed={}\n", kVersion, command, config.digest(),
                       config.seed());
    out_ += fmt::format("{}\n", fmt::join(columns, ","));
  }
  void row(const std::vector<std::string>& cells) {
    if (cells.size() != width_) throw std::logic_error("csv row width mismatch");
    out_ += fmt::format("{}\n", fmt::join(cells, ","));
  }
  std::string str() const { return out_; }

 private:
  std::size_t width_;
  std::string out_;
};

std::string svg_plot(const std::vector<std::pair<double, double>>& pts, const std::string& xlabel,
                     const std::string& ylabel, bool polyline) {
  const double w = 640, h = 400, pad = 48;
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (auto [x, y] : pts) {
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  }
  if (pts.empty()) x0 = x1 = y0 = y1 = 0;
  if (x1 - x0 < 1e-12) x1 = x0 + 1;
  y0 = std::min(y0, 0.0);
  if (y1 - y0 < 1e-12) y1 = y0 + 1;
  auto sx = [&](double x) { return pad + (x - x0) / (x1 - x0) * (w - 2 * pad); };
  auto sy = [&](double y) { return h - pad - (y - y0) / (y1 - y0) * (h - 2 * pad); };
  std::string s = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
      "<line x1=\"{2}\" y1=\"{3}\" x2=\"{4}\" y2=\"{3}\" stroke=\"black\"/>\n"
      "<line x1=\"{2}\" y1=\"{3}\" x2=\"{2}\" y2=\"{2}\" stroke=\"black\"/>\n"
      "<text x=\"{5}\" y=\"{6}\" font-size=\"12\">{7}</text>\n"
      "<text x=\"4\" y=\"{8}\" font-size=\"12\">{9}</text>\n"
      "<text x=\"{2}\" y=\"{10}\" font-size=\"10\">{11:.4g}</text>\n"
      "<text x=\"{12}\" y=\"{10}\" font-size=\"10\">{13:.4g}</text>\n"
      "<text x=\"4\" y=\"{3}\" font-size=\"10\">{14:.4g}</text>\n"
      "<text x=\"4\" y=\"{15}\" font-size=\"10\">{16:.4g}</text>\n",
      w, h, pad, h - pad, w - pad, w / 2, h - 8, xlabel, pad - 12, ylabel, h - pad + 14, x0, w - pad - 20, x1, y0,
      pad + 4, y1);
  if (polyline) {
    s += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
    for (auto [x, y] : pts) s += fmt::format("{:.2f},{:.2f} ", sx(x), sy(y));
    s += "\"/>\n";
  } else {
    for (auto [x, y] : pts) s += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2\" fill=\"steelblue\"/>\n", sx(x), sy(y));
  }
  return s + "</svg>\n";
}

SpectrumSolver make_solver(const RunConfig& c) {
  const SpectrumOptions opt = c.spectrum_options();
  if (c.has_section("ifs") && !c.has_section("phi")) return birkhoff_solver(*c.ifs(), c.integer("run.k", 8), opt);
  PotentialBundle phi = c.bundle("phi");
  if (!phi.all_kstep()) {
    const int k = c.integer("run.holder_k", 0);
    if (k < 1) throw ConfigError("cocycle potentials need run.holder_k for spectrum commands");
    phi = PotentialBundle(holder_approx(phi, k).potential);
  }
  return SpectrumSolver(std::move(phi), c.metric(), opt);
}

std::vector<double> alpha_of(const RunConfig& c, int d) {
  auto a = c.numbers("run.alpha");
  if (static_cast<int>(a.size()) != d) throw ConfigError(fmt::format("run.alpha needs {} value(s)", d));
  return a;
}

Artifacts cmd_pressure(const RunConfig& c) {
  const ScalarPotential phi = c.scalar("phi");
  const int n = c.integer("run.n", 24);
  Csv csv(c, "pressure", {"value", "exact", "lower", "upper", "n"});
  const PressureBracket b = pressure_bracket(phi, n);
  if (const KStepPotential* k = phi.kstep())
    csv.row({num(pressure_exact(*k)), "1", num(b.lower), num(b.upper), std::to_string(b.n_used)});
  else
    csv.row({num(b.midpoint()), "0", num(b.lower), num(b.upper), std::to_string(b.n_used)});
  return {csv.str(), {}};
}

Artifacts cmd_dimension(const RunConfig& c) {
  const WeakGibbsMetric metric = c.metric();
  const int n = c.integer("run.n_max", 20);
  Csv csv(c, "dimension", {"method", "value", "error"});
  if (metric.psi().is_kstep()) {
    const auto r = metric_dimension(metric, DimensionMethod::root, n);
    csv.row({"root", num(r.value), num(r.error)});
  }
  const auto k = metric_dimension(metric, DimensionMethod::count, n);
  csv.row({"count", num(k.value), num(k.error)});
  return {csv.str(), {}};
}

Artifacts cmd_tau(const RunConfig& c) {
  const SpectrumSolver s = make_solver(c);
  const auto z = c.numbers("run.z");
  if (static_cast<int>(z.size()) != s.dim()) throw ConfigError(fmt::format("run.z needs {} value(s)", s.dim()));
  const auto a = alpha_of(c, s.dim());
  const TauEval ev = s.tau_eval(z, a);
  const int n = c.integer("run.n", 0);
  Csv csv(c, "tau", {"tau", "d_psi", "metric_estimate", "n"});
  csv.row({num(ev.tau), num(s.d_psi()), n > 0 ? num(s.tau_metric_estimate(z, a, n)) : "", std::to_string(n)});
  return {csv.str(), {}};
}

Artifacts cmd_spectrum(const RunConfig& c) {
  const SpectrumSolver s = make_solver(c);
  const SpectrumCurve curve = s.curve();
  std::vector<std::string> cols;
  for (int i = 1; i <= s.dim(); ++i) cols.push_back(fmt::format("alpha_{}", i));
  cols.push_back("tau_star");
  for (int i = 1; i <= s.dim(); ++i) cols.push_back(fmt::format("z_star_{}", i));
  cols.insert(cols.end(), {"witness_entropy", "witness_psi_avg", "boundary_flag"});
  Csv csv(c, "spectrum", cols);
  std::vector<std::pair<double, double>> plot;
  for (const auto& p : curve.grid) {
    std::vector<std::string> row;
    for (double v : p.alpha) row.push_back(num(v));
    row.push_back(num(p.tau_star));
    for (double v : p.z_star) row.push_back(num(v));
    row.push_back(p.witness ? num(p.witness->entropy) : "");
    row.push_back(p.witness ? num(p.witness->psi_avg) : "");
    row.push_back(p.boundary ? "1" : "0");
    csv.row(row);
    if (s.dim() == 1) plot.emplace_back(p.alpha[0], p.tau_star);
  }
  if (s.dim() == 2) {
    for (const auto& p : curve.grid) plot.emplace_back(p.alpha[0], p.alpha[1]);
    return {csv.str(), svg_plot(plot, "alpha_1", "alpha_2", false)};
  }
  return {csv.str(), svg_plot(plot, "alpha", "tau*", true)};
}

Artifacts cmd_count(const RunConfig& c) {
  const SpectrumSolver s = make_solver(c);
  const auto a = alpha_of(c, s.dim());
  std::vector<int> ns;
  for (double v : c.numbers("run.n_list")) ns.push_back(static_cast<int>(v));
  const auto eps = c.numbers("run.eps_list");
  const LambdaEstimate est = s.lambda_estimate(a, ns, eps);
  Csv csv(c, "count", {"n", "eps", "count", "rate"});
  for (const auto& r : est.rows) csv.row({std::to_string(r.n), num(r.eps), std::to_string(r.count), num(r.rate)});
  return {csv.str(), {}};
}

Artifacts cmd_localized(const RunConfig& c) {
  const SpectrumSolver s = make_solver(c);
  const bool interval = c.flag("run.interval_valued", false);
  Csv csv(c, "localized", {"value", "interval_valued"});
  csv.row({num(s.localized_dimension(c.kstep("xi"), interval)), interval ? "1" : "0"});
  return {csv.str(), {}};
}

Artifacts cmd_fixed_points(const RunConfig& c) {
  const auto ifs = c.ifs();
  if (!ifs) throw ConfigError("fixed-points needs an [ifs] section");
  const auto r = fixed_point_average_dimension(*ifs, c.integer("run.k", 8), c.integer("run.depth", 12),
                                               c.spectrum_options());
  std::vector<std::string> cols{"value"};
  for (int i = 1; i <= ifs->dim(); ++i) cols.push_back(fmt::format("argmax_{}", i));
  cols.push_back("full_dim");
  Csv csv(c, "fixed-points", cols);
  std::vector<std::string> row{num(r.value)};
  for (double v : r.argmax) row.push_back(num(v));
  row.push_back(r.full_dim ? "1" : "0");
  csv.row(row);
  return {csv.str(), {}};
}

Artifacts cmd_gibbs(const RunConfig& c) {
  const auto ifs = c.ifs();
  if (!ifs) throw ConfigError("gibbs-spectrum needs an [ifs] section");
  const auto spec =
      gibbs_local_dimension_spectrum(*ifs, c.kstep("phi"), c.flag("run.normalize", false), c.spectrum_options());
  Csv csv(c, "gibbs-spectrum", {"beta", "dimension"});
  for (auto [b, v] : spec.points) csv.row({num(b), num(v)});
  return {csv.str(), svg_plot(spec.points, "local dimension", "dim", true)};
}

Artifacts cmd_check(const RunConfig& c) {
  Csv csv(c, "check", {"check", "worst", "tolerance", "pass"});
  bool all = true;
  auto record = [&](const std::string& name, double worst, double tol) {
    const bool ok = worst <= tol;
    all = all && ok;
    csv.row({name, num(worst), num(tol), ok ? "1" : "0"});
  };
  const WeakGibbsMetric metric = c.metric();
  std::mt19937_64 rng(c.seed());
  if (const KStepPotential* psi = metric.psi().kstep()) {
    const MarkovMeasure eq = equilibrium_state(*psi);
    record("equilibrium_rows", eq.max_row_error(), 1e-12);
    record("equilibrium_stationarity", eq.stationarity_error(), 1e-10);
    const double p = pressure_exact(*psi);
    record("equilibrium_variational_equality", std::abs(eq.entropy() + eq.potential_average(*psi)[0] - p), 1e-9);
    double excess = 0.0;
    for (int i = 0; i < 100; ++i) {
      const auto mu = MarkovMeasure::random(psi->sft_ptr(), std::max(1, psi->k() - 1), rng);
      excess = std::max(excess, mu.entropy() + mu.potential_average(*psi)[0] - p);
    }
    record("variational_inequality", excess, 1e-9);
  }
  if (!c.has_section("phi") && !c.has_section("ifs")) return {csv.str(), {}, all};

  const SpectrumSolver s = make_solver(c);
  if (s.dim() == 1) {
    const double lo = s.l_phi().lo, hi = s.l_phi().hi;
    std::uniform_real_distribution<double> ua(lo, hi), uz(-4.0, 4.0), ut(-3.0, 3.0);
    auto tau1 = [&](double z, double a) { return s.tau(std::span(&z, 1), std::span(&a, 1)); };
    double slope_worst = 0.0, control_worst = 0.0, convex_worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const double z = uz(rng), a = ua(rng), t = ut(rng), t2 = t + 0.5 + std::abs(ut(rng));
      const double slope =
          (s.pressure(std::span(&z, 1), std::span(&a, 1), t2) - s.pressure(std::span(&z, 1), std::span(&a, 1), t)) /
          (t2 - t);
      slope_worst = std::max({slope_worst, slope - metric.psi_max(), metric.psi_min() - slope});
      double b = ua(rng), aa = a;
      if (z * (b - aa) < 0) std::swap(aa, b);
      const double gap = z * (b - aa), diff = tau1(z, aa) - tau1(z, b);
      control_worst = std::max({control_worst, gap / std::abs(metric.psi_min()) - diff,
                                diff - gap / std::abs(metric.psi_max())});
      convex_worst = std::max(convex_worst, 2 * tau1(z, a) - tau1(z - 0.25, a) - tau1(z + 0.25, a));
    }
    record("pressure_slope_containment", slope_worst, 1e-8);
    record("slope_control", control_worst, 1e-6);
    record("tau_convexity", convex_worst, 1e-8);
  }
  const SpectrumCurve curve = s.curve();
  double top = -1e300, bound = 0.0;
  std::vector<double> vals;
  for (const auto& p : curve.grid) {
    vals.push_back(p.tau_star);
    top = std::max(top, p.tau_star);
    bound = std::max({bound, p.tau_star - curve.d_psi, -p.tau_star});
  }
  record("spectrum_bounds", bound, 1e-8);
  if (s.dim() == 1) {
    record("spectrum_max_equals_d_psi", std::abs(top - curve.d_psi), 1e-4);
    record("quasi_concavity", quasi_concavity_violation(vals), 1e-6);
  }
  return {csv.str(), {}, all};
}

Artifacts cmd_attractor(const RunConfig& c) {
  const auto ifs = c.ifs();
  if (!ifs) throw ConfigError("attractor needs an [ifs] section");
  const int depth = c.integer("run.cloud_depth", 6);
  if (std::pow(double(ifs->size()), depth) > 2e6) throw TableTooLarge("run.cloud_depth gives more than 2e6 points");
  std::vector<std::string> cols;
  for (int i = 1; i <= ifs->dim(); ++i) cols.push_back(fmt::format("x_{}", i));
  Csv csv(c, "attractor", cols);
  std::vector<std::pair<double, double>> plot;
  const Point x0 = ifs->fixed_point(0);
  for (const Word& w : ifs->sft()->words(depth)) {
    const Point p = ifs->apply(w, x0);
    std::vector<std::string> row;
    for (double v : p) row.push_back(num(v));
    csv.row(row);
    plot.emplace_back(p[0], ifs->dim() == 2 ? p[1] : 0.0);
  }
  return {csv.str(), svg_plot(plot, "x_1", ifs->dim() == 2 ? "x_2" : "", false)};
}

const std::map<std::string, std::function<Artifacts(const RunConfig&)>>& table() {
  static const std::map<std::string, std::function<Artifacts(const RunConfig&)>> t = {
      {"pressure", cmd_pressure}, {"dimension", cmd_dimension},       {"tau", cmd_tau},
      {"spectrum", cmd_spectrum}, {"count", cmd_count},               {"localized", cmd_localized},
      {"fixed-points", cmd_fixed_points}, {"attractor", cmd_attractor}, {"gibbs-spectrum", cmd_gibbs}, {"check", cmd_check},
  };
  return t;
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, _] : table()) v.push_back(k);
    return v;
  }();
  return names;
}

Artifacts run(const std::string& command, const RunConfig& config) {
  const auto it = table().find(command);
  if (it == table().end()) throw ConfigError("unknown command '" + command + "'");
  return it->second(config);
}

int report_error(const std::exception& e, std::ostream& diag) {
  nlohmann::json rec;
  int code = 1;
  if (const auto* te = dynamic_cast<const Error*>(&e)) {
    code = static_cast<int>(te->kind());
    rec["error"] = te->name();
    rec["kind"] = code == 2 ? "config" : code == 3 ? "numerical_cap" : "domain";
  } else {
    rec["error"] = "internal";
    rec["kind"] = "internal";
  }
  rec["message"] = e.what();
  rec["exit"] = code;
  diag << rec.dump() << '\n';
  return code;
}

}  // namespace thermo::cli
