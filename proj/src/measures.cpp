#include "thermo/measures.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "thermo/error.hpp"

namespace thermo {

namespace {

constexpr std::size_t kDirectSolveLimit = 512;

std::vector<double> solve_stationary(const DeBruijnGraph& g, const std::vector<double>& t) {
  const std::size_t n = g.state_count();
  if (n <= kDirectSolveLimit) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t e = 0; e < t.size(); ++e) a(g.edge_target(e), g.edge_source(e)) += t[e];
    a -= Eigen::MatrixXd::Identity(a.rows(), a.cols());
    a.row(0).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(a.rows());
    b[0] = 1.0;
    Eigen::VectorXd pi = a.fullPivLu().solve(b);
    std::vector<double> out(n);
    for (std::size_t u = 0; u < n; ++u) out[u] = std::max(0.0, pi[u]);
    const double s = std::accumulate(out.begin(), out.end(), 0.0);
    for (double& v : out) v /= s;
    return out;
  }
  std::vector<double> pi(n, 1.0 / n), next(n);
  for (int it = 0; it < 200000; ++it) {
    for (std::size_t u = 0; u < n; ++u) next[u] = 0.5 * pi[u];
    for (std::size_t e = 0; e < t.size(); ++e) next[g.edge_target(e)] += 0.5 * pi[g.edge_source(e)] * t[e];
    double diff = 0.0;
    for (std::size_t u = 0; u < n; ++u) diff = std::max(diff, std::abs(next[u] - pi[u]));
    pi.swap(next);
    if (diff < 1e-16) break;
  }
  return pi;
}

void normalize_rows(const DeBruijnGraph& g, std::vector<double>& t) {
  for (std::size_t u = 0; u < g.state_count(); ++u) {
    double s = 0.0;
    for (std::size_t e = g.out_begin(u); e < g.out_end(u); ++e) s += t[e];
    const double count = static_cast<double>(g.out_end(u) - g.out_begin(u));
    for (std::size_t e = g.out_begin(u); e < g.out_end(u); ++e) t[e] = s > 0.0 ? t[e] / s : 1.0 / count;
  }
}

}  // namespace

MarkovMeasure::MarkovMeasure(GraphPtr graph, std::vector<double> transitions)
    : graph_(std::move(graph)), t_(std::move(transitions)) {
  if (t_.size() != graph_->edge_count()) throw InvalidArgument("one transition probability per edge expected");
  normalize_rows(*graph_, t_);
  pi_ = solve_stationary(*graph_, t_);
}

MarkovMeasure::MarkovMeasure(GraphPtr graph, std::vector<double> transitions, std::vector<double> stationary)
    : graph_(std::move(graph)), t_(std::move(transitions)), pi_(std::move(stationary)) {
  if (t_.size() != graph_->edge_count() || pi_.size() != graph_->state_count())
    throw InvalidArgument("measure data does not match the graph");
  normalize_rows(*graph_, t_);
  const double s = std::accumulate(pi_.begin(), pi_.end(), 0.0);
  for (double& v : pi_) v /= s;
}

MarkovMeasure MarkovMeasure::bernoulli(const SftPtr& full_shift, const std::vector<double>& p) {
  if (!full_shift->is_full_shift()) throw InvalidArgument("Bernoulli measures need a full shift");
  if (static_cast<int>(p.size()) != full_shift->alphabet_size()) throw InvalidArgument("one weight per symbol");
  const GraphPtr g = window_graph(full_shift, 2);
  std::vector<double> t(g->edge_count());
  for (std::size_t e = 0; e < t.size(); ++e) t[e] = p[g->edge_symbol(e)];
  return MarkovMeasure(g, std::move(t), p);
}

MarkovMeasure MarkovMeasure::random(const SftPtr& sft, int order, std::mt19937_64& rng) {
  const GraphPtr g = window_graph(sft, order + 1);
  std::exponential_distribution<double> gamma1(1.0);
  std::vector<double> t(g->edge_count());
  for (double& v : t) v = gamma1(rng);
  return MarkovMeasure(g, std::move(t));
}

MarkovMeasure MarkovMeasure::periodic(const SftPtr& sft, const Word& cycle, int order) {
  const std::size_t p = cycle.size();
  if (p == 0) throw InvalidArgument("empty cycle");
  Word loop = cycle;
  loop.push_back(cycle.front());
  if (!sft->admissible(loop)) throw InvalidArgument("'" + to_string(cycle) + "' is not a cycle of the shift");
  order = std::max<int>(order, static_cast<int>(p));
  const GraphPtr g = window_graph(sft, order + 1);
  std::vector<double> count(g->edge_count(), 0.0), pi(g->state_count(), 0.0);
  Word window(static_cast<std::size_t>(order) + 1);
  for (std::size_t t = 0; t < p; ++t) {
    for (std::size_t i = 0; i <= static_cast<std::size_t>(order); ++i) window[i] = cycle[(t + i) % p];
    const auto e = static_cast<std::size_t>(g->edges().index_of(window));
    count[e] += 1.0;
    pi[g->edge_source(e)] += 1.0 / static_cast<double>(p);
  }
  return MarkovMeasure(g, std::move(count), std::move(pi));
}

double MarkovMeasure::entropy() const {
  double h = 0.0;
  for (std::size_t e = 0; e < t_.size(); ++e) {
    const double w = pi_[graph_->edge_source(e)] * t_[e];
    if (w > 0.0 && t_[e] > 0.0) h -= w * std::log(t_[e]);
  }
  return h;
}

std::vector<double> MarkovMeasure::potential_average(const KStepPotential& pot) const {
  if (!(pot.sft() == graph_->sft())) throw OrderMismatch("potential and measure live on different shifts");
  if (pot.k() > order() + 1) return lifted(pot.k() - 1).potential_average(pot);
  const auto vals = edge_values(pot, *graph_);
  const int d = pot.dim();
  std::vector<double> avg(d, 0.0);
  for (std::size_t e = 0; e < t_.size(); ++e) {
    const double w = pi_[graph_->edge_source(e)] * t_[e];
    if (w == 0.0) continue;
    for (int c = 0; c < d; ++c) avg[c] += w * vals[e * d + c];
  }
  return avg;
}

double MarkovMeasure::potential_average(const ScalarPotential& pot) const {
  if (!pot.is_kstep()) throw OrderMismatch("averages of matrix cocycles need a k-step approximation");
  return potential_average(*pot.kstep()).front();
}

double MarkovMeasure::cylinder_mass(WordView w) const {
  const int s = order();
  const auto& sft = graph_->sft();
  if (!sft.admissible(w)) return 0.0;
  if (static_cast<int>(w.size()) < s) {
    const auto m = static_cast<std::uint64_t>(sft.alphabet_size());
    std::uint64_t span = 1;
    for (std::size_t i = w.size(); i < static_cast<std::size_t>(s); ++i) span *= m;
    const std::uint64_t base = word_code(w, sft.alphabet_size()) * span;
    double mass = 0.0;
    for (std::uint64_t code = base; code < base + span; ++code) {
      const auto u = graph_->states().index_of_code(code);
      if (u >= 0) mass += pi_[static_cast<std::size_t>(u)];
    }
    return mass;
  }
  auto u = static_cast<std::size_t>(graph_->states().index_of(w.first(static_cast<std::size_t>(s))));
  double mass = pi_[u];
  for (std::size_t i = static_cast<std::size_t>(s); i < w.size() && mass > 0.0; ++i) {
    const auto e = static_cast<std::size_t>(graph_->edge_from(u, w[i]));
    mass *= t_[e];
    u = graph_->edge_target(e);
  }
  return mass;
}

MarkovMeasure MarkovMeasure::lifted(int new_order) const {
  if (new_order < order()) throw OrderMismatch("cannot lower the order of a Markov measure");
  if (new_order == order()) return *this;
  const GraphPtr g = window_graph(graph_->sft_ptr(), new_order + 1);
  const auto m = static_cast<std::uint64_t>(g->sft().alphabet_size());
  std::uint64_t space = 1;
  for (int i = 0; i <= order(); ++i) space *= m;
  std::vector<double> t(g->edge_count()), pi(g->state_count());
  for (std::size_t e = 0; e < t.size(); ++e)
    t[e] = t_[static_cast<std::size_t>(graph_->edges().index_of_code(g->edges().code_of(e) % space))];
  for (std::size_t u = 0; u < pi.size(); ++u) pi[u] = cylinder_mass(g->states().word(u));
  return MarkovMeasure(g, std::move(t), std::move(pi));
}

void MarkovMeasure::extend(Word& prefix, std::size_t length, std::mt19937_64& rng) const {
  const auto s = static_cast<std::size_t>(order());
  if (prefix.size() < s) throw InvalidArgument("prefix shorter than the measure order");
  auto u = static_cast<std::size_t>(graph_->states().index_of(WordView(prefix).last(s)));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t i = 0; i < length; ++i) {
    double r = unif(rng);
    std::size_t e = graph_->out_begin(u);
    const std::size_t last = graph_->out_end(u) - 1;
    while (e < last && r >= t_[e]) r -= t_[e++];
    prefix.push_back(graph_->edge_symbol(e));
    u = graph_->edge_target(e);
  }
}

Word MarkovMeasure::sample(std::size_t length, std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double r = unif(rng);
  std::size_t u = 0;
  while (u + 1 < pi_.size() && r >= pi_[u]) r -= pi_[u++];
  Word w = graph_->states().word(u);
  if (length <= w.size()) {
    w.resize(length);
    return w;
  }
  extend(w, length - w.size(), rng);
  return w;
}

double MarkovMeasure::max_row_error() const {
  double err = 0.0;
  for (std::size_t u = 0; u < graph_->state_count(); ++u) {
    double s = 0.0;
    for (std::size_t e = graph_->out_begin(u); e < graph_->out_end(u); ++e) s += t_[e];
    err = std::max(err, std::abs(s - 1.0));
  }
  return err;
}

double MarkovMeasure::stationarity_error() const {
  std::vector<double> next(pi_.size(), 0.0);
  for (std::size_t e = 0; e < t_.size(); ++e) next[graph_->edge_target(e)] += pi_[graph_->edge_source(e)] * t_[e];
  double err = 0.0;
  for (std::size_t u = 0; u < pi_.size(); ++u) err = std::max(err, std::abs(next[u] - pi_[u]));
  return err;
}

MarkovMeasure equilibrium_state(const KStepPotential& scalar) {
  const TransferMatrix tm(scalar);
  const PerronData pd = tm.perron(true);
  const auto& g = tm.graph();
  const auto lw = tm.log_weights();
  std::vector<double> t(g.edge_count());
  for (std::size_t e = 0; e < t.size(); ++e) {
    const double ru = pd.right[static_cast<Eigen::Index>(g.edge_source(e))];
    const double rv = pd.right[static_cast<Eigen::Index>(g.edge_target(e))];
    t[e] = ru > 0.0 ? std::exp(lw[e] - pd.log_rho) * rv / ru : 0.0;
  }
  std::vector<double> pi(g.state_count());
  for (std::size_t u = 0; u < pi.size(); ++u)
    pi[u] = std::max(0.0, pd.left[static_cast<Eigen::Index>(u)] * pd.right[static_cast<Eigen::Index>(u)]);
  return MarkovMeasure(tm.graph_ptr(), std::move(t), std::move(pi));
}

MarkovMeasure parry_measure(const SftPtr& sft) { return equilibrium_state(KStepPotential::constant(sft, 0.0)); }

double entropy(const MarkovMeasure& mu) { return mu.entropy(); }

std::vector<double> periodic_average(const KStepPotential& pot, const Word& cycle) {
  const std::size_t p = cycle.size();
  const auto k = static_cast<std::size_t>(pot.k());
  std::vector<double> avg(pot.dim(), 0.0);
  Word window(k);
  for (std::size_t t = 0; t < p; ++t) {
    for (std::size_t i = 0; i < k; ++i) window[i] = cycle[(t + i) % p];
    for (int c = 0; c < pot.dim(); ++c) avg[c] += pot.value(window, c);
  }
  for (double& v : avg) v /= static_cast<double>(p);
  return avg;
}

std::vector<Word> admissible_cycles(const Sft& sft, int max_length) {
  std::vector<Word> out;
  for (int len = 1; len <= max_length; ++len) {
    for (const Word& w : sft.words(len)) {
      if (!sft.allowed(w.back(), w.front())) continue;
      bool keep = true;
      for (int r = 1; r < len && keep; ++r) {
        // reject non-least rotations and proper powers
        int cmp = 0;
        for (int i = 0; i < len && cmp == 0; ++i) {
          const Symbol a = w[(i + r) % len], b = w[i];
          cmp = a < b ? -1 : (a > b ? 1 : 0);
        }
        if (cmp <= 0) keep = false;
      }
      if (keep) out.push_back(w);
    }
  }
  return out;
}

int lphi_affine_dim(const PotentialBundle& pot, int samples, std::uint64_t seed) {
  const KStepPotential merged = pot.merged();
  const int d = merged.dim();
  std::vector<std::vector<double>> points;
  int cycle_len = 1;
  while (cycle_len < 12 && pot.sft().count_words(cycle_len + 1) <= 4096) ++cycle_len;
  for (const Word& c : admissible_cycles(pot.sft(), cycle_len)) points.push_back(periodic_average(merged, c));
  std::mt19937_64 rng(seed);
  const int order = std::max(merged.k() - 1, 1);
  for (int i = 0; i < samples; ++i)
    points.push_back(MarkovMeasure::random(pot.sft_ptr(), order, rng).potential_average(merged));
  Eigen::MatrixXd a(static_cast<Eigen::Index>(points.size()), d);
  for (std::size_t i = 0; i < points.size(); ++i)
    for (int c = 0; c < d; ++c) a(static_cast<Eigen::Index>(i), c) = points[i][c];
  const Eigen::RowVectorXd mean = a.colwise().mean();
  a.rowwise() -= mean;
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues();
  if (sv.size() == 0 || sv[0] < 1e-10) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > 1e-8 * sv[0]) ++rank;
  return rank;
}

}  // namespace thermo
