#include "thermo/moran.hpp"

#include <cmath>
#include <map>
#include <random>

#include "thermo/error.hpp"

namespace thermo {

namespace {

double window_sum(const KStepPotential& phi, WordView w, std::size_t from, std::size_t to) {
  const auto k = static_cast<std::size_t>(phi.k());
  double s = 0.0;
  for (std::size_t t = from; t + k <= to; ++t)
    s += phi.value_at(static_cast<std::size_t>(phi.windows().index_of(w.subspan(t, k))));
  return s;
}

Word choose_start(const SpectrumSolver& solver, const KStepPotential& xi) {
  const LPhi& l = solver.l_phi();
  Word best;
  double best_value = -1.0;
  for (const Word& w : xi.sft().words(xi.k())) {
    const double a = xi.value(w);
    if (!(a > l.lo && a < l.hi)) continue;
    const double v = solver.legendre(std::span(&a, 1)).tau_star;
    if (v > best_value) {
      best_value = v;
      best = w;
    }
  }
  if (best.empty()) throw InvalidArgument("ξ takes no value in the interior of L_Φ");
  return best;
}

}  // namespace

MoranSample moran_sample(const SpectrumSolver& solver, const KStepPotential& xi, const MoranOptions& options) {
  if (solver.dim() != 1) throw InvalidArgument("the Moran sampler needs d = 1");
  if (xi.dim() != 1 || !(xi.sft() == solver.phi().sft())) throw InvalidArgument("ξ must be scalar on the same shift");
  for (std::size_t j = 1; j < options.schedule.size(); ++j)
    if (options.schedule[j] <= options.schedule[j - 1]) throw InvalidArgument("block lengths must increase");

  const Sft& sft = xi.sft();
  const LPhi& l = solver.l_phi();
  MoranSample out;
  Word theta = options.start.empty() ? choose_start(solver, xi) : options.start;
  if (static_cast<int>(theta.size()) < xi.k() || !sft.admissible(theta))
    throw InvalidArgument("start word must be admissible with length >= the window of ξ");

  const double a0 = xi.value(WordView(theta).first(static_cast<std::size_t>(xi.k())));
  out.alpha0 = a0;
  const double eta = std::min(a0 - l.lo, l.hi - a0);
  if (!(eta > 0.0)) throw InvalidArgument("ξ(ϑ) must lie in the interior of L_Φ");
  while (std::ldexp(1.0, -out.n0) >= eta) ++out.n0;

  std::mt19937_64 rng(options.seed);
  std::map<double, MarkovMeasure> witnesses;
  auto witness = [&](double a) -> const MarkovMeasure& {
    auto it = witnesses.find(a);
    if (it == witnesses.end()) it = witnesses.emplace(a, solver.conditional_variational(std::span(&a, 1)).measure).first;
    return it->second;
  };

  Word& x = out.word;
  x = theta;
  const KStepPotential& phi = solver.merged_phi();
  const WeakGibbsMetric& metric = solver.metric();
  double log_mass = 0.0;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t j = 0; j < options.schedule.size(); ++j) {
    const double spacing = std::ldexp(1.0, -static_cast<int>(j + 1) - out.n0);
    const double at_x = xi.value(WordView(x).first(static_cast<std::size_t>(xi.k())));
    const double target = a0 + spacing * std::round((at_x - a0) / spacing);
    const MarkovMeasure& nu = witness(target);
    const DeBruijnGraph& g = nu.graph();
    const auto order = static_cast<std::size_t>(g.state_length());
    if (x.size() < order) sft.extend_min(x, order);
    const std::size_t begin = x.size();
    for (int step = 0; step < options.schedule[j]; ++step) {
      const auto state = static_cast<std::size_t>(g.states().index_of(WordView(x).last(order)));
      double r = unif(rng);
      std::size_t e = g.out_begin(state);
      for (; e + 1 < g.out_end(state); ++e) {
        if (r < nu.transition(e)) break;
        r -= nu.transition(e);
      }
      log_mass += std::log(nu.transition(e));
      x.push_back(g.edge_symbol(e));
    }
    MoranBlock b;
    b.end = static_cast<int>(x.size());
    b.target = target;
    const std::size_t k = static_cast<std::size_t>(phi.k());
    const std::size_t lead = begin >= k - 1 ? begin - (k - 1) : 0;
    b.block_average = window_sum(phi, x, lead, x.size()) / static_cast<double>(x.size() - lead - k + 1);
    b.running_average = window_sum(phi, x, 0, x.size()) / static_cast<double>(x.size() - k + 1);
    b.log_mass = log_mass;
    b.log_diameter = metric.log_weight(x);
    b.ratio = b.log_mass / b.log_diameter;
    out.blocks.push_back(b);
  }
  return out;
}

}  // namespace thermo
