#include "thermo/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <optional>

#include "thermo/error.hpp"

namespace thermo {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kDenseLimit = 96;
constexpr std::uint64_t kEnumerationLimit = std::uint64_t{1} << 24;

class LogSum {
 public:
  void add(double v) {
    if (v == kNegInf) return;
    if (v > max_) {
      sum_ = sum_ * std::exp(max_ - v) + 1.0;
      max_ = v;
    } else {
      sum_ += std::exp(v - max_);
    }
  }
  double value() const { return max_ == kNegInf ? kNegInf : max_ + std::log(sum_); }

 private:
  double max_ = kNegInf;
  double sum_ = 0.0;
};

void collatz_wielandt(const DeBruijnGraph& g, const std::vector<double>& w, const Eigen::VectorXd& x,
                      double& lo, double& hi) {
  const double floor = x.maxCoeff() * 1e-250;
  lo = std::numeric_limits<double>::infinity();
  hi = 0.0;
  for (std::size_t u = 0; u < g.state_count(); ++u) {
    if (!(x[u] > floor)) continue;
    double y = 0.0;
    for (std::size_t e = g.out_begin(u); e < g.out_end(u); ++e) y += w[e] * x[g.edge_target(e)];
    const double r = y / x[u];
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
}

Eigen::VectorXd real_perron_vector(const Eigen::MatrixXd& mat, double& root) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(mat, true);
  const auto& values = es.eigenvalues();
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i)
    if (values[i].real() > values[best].real()) best = i;
  root = values[best].real();
  Eigen::VectorXd v = es.eigenvectors().col(best).real().cwiseAbs();
  const double mx = v.maxCoeff();
  if (mx > 0) v /= mx;
  return v;
}

}  // namespace

GraphPtr window_graph(const SftPtr& sft, int window) {
  static std::mutex mutex;
  static std::map<std::pair<const Sft*, int>, std::pair<SftPtr, GraphPtr>> cache;
  const int state_length = std::max(window, 2) - 1;
  std::lock_guard lock(mutex);
  auto& slot = cache[{sft.get(), state_length}];
  if (!slot.second) slot = {sft, std::make_shared<const DeBruijnGraph>(sft, state_length)};
  return slot.second;
}

std::vector<double> edge_values(const KStepPotential& pot, const DeBruijnGraph& graph) {
  const int window = graph.state_length() + 1;
  if (window < pot.k()) throw OrderMismatch("graph window shorter than the potential window");
  const int d = pot.dim();
  const auto m = static_cast<std::uint64_t>(graph.sft().alphabet_size());
  std::uint64_t drop = 1;
  for (int i = pot.k(); i < window; ++i) drop *= m;
  std::vector<double> out(graph.edge_count() * d);
  for (std::size_t e = 0; e < graph.edge_count(); ++e) {
    const auto wi = static_cast<std::size_t>(pot.windows().index_of_code(graph.edges().code_of(e) / drop));
    for (int c = 0; c < d; ++c) out[e * d + c] = pot.value_at(wi, c);
  }
  return out;
}

PerronData perron(const DeBruijnGraph& g, std::span<const double> log_w, bool want_left, double tol) {
  const std::size_t n = g.state_count();
  const double shift = *std::max_element(log_w.begin(), log_w.end());
  std::vector<double> w(log_w.size());
  for (std::size_t e = 0; e < w.size(); ++e) w[e] = std::exp(log_w[e] - shift);

  PerronData out;
  double root = 0.0;
  if (n <= kDenseLimit) {
    Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t e = 0; e < w.size(); ++e) mat(g.edge_source(e), g.edge_target(e)) += w[e];
    out.right = real_perron_vector(mat, root);
    if (want_left) {
      double root_t = 0.0;
      out.left = real_perron_vector(mat.transpose(), root_t);
    }
  } else {
    Eigen::VectorXd x = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
    Eigen::VectorXd y(x.size());
    double lo = 0.0, hi = 0.0;
    for (int it = 0; it < 20000; ++it) {
      for (std::size_t u = 0; u < n; ++u) {
        double s = 0.0;
        for (std::size_t e = g.out_begin(u); e < g.out_end(u); ++e) s += w[e] * x[g.edge_target(e)];
        y[u] = 0.5 * (s + x[u] * root);
      }
      x = y / y.maxCoeff();
      collatz_wielandt(g, w, x, lo, hi);
      root = 0.5 * (lo + hi);
      if (std::log(hi) - std::log(lo) <= tol) break;
    }
    out.right = x;
    if (want_left) {
      Eigen::VectorXd l = Eigen::VectorXd::Ones(x.size());
      for (int it = 0; it < 20000; ++it) {
        Eigen::VectorXd z = 0.5 * root * l;
        for (std::size_t e = 0; e < w.size(); ++e) z[g.edge_target(e)] += 0.5 * l[g.edge_source(e)] * w[e];
        z /= z.maxCoeff();
        const double diff = (z - l).cwiseAbs().maxCoeff();
        l = z;
        if (diff <= 1e-14) break;
      }
      out.left = l;
    }
  }
  double lo = 0.0, hi = 0.0;
  collatz_wielandt(g, w, out.right, lo, hi);
  if (!(root > 0.0)) throw NonIrreducible("transfer matrix has no positive Perron root");
  out.log_rho = std::log(root) + shift;
  out.log_lower = std::log(std::min(lo, root)) + shift;
  out.log_upper = std::log(std::max(hi, root)) + shift;
  if (want_left) {
    const double dot = out.left.dot(out.right);
    out.left /= dot;
  }
  return out;
}

TransferMatrix::TransferMatrix(const KStepPotential& scalar) {
  if (scalar.dim() != 1) throw InvalidArgument("transfer matrix needs a scalar potential");
  graph_ = window_graph(scalar.sft_ptr(), scalar.k());
  log_w_ = edge_values(scalar, *graph_);
}

PerronData TransferMatrix::perron(bool want_left, double tol) const {
  return thermo::perron(*graph_, log_w_, want_left, tol);
}

double pressure_exact(const KStepPotential& scalar) { return TransferMatrix(scalar).perron().log_rho; }

KStepPotential merge_terms(std::span<const PressureTerm> terms) {
  if (terms.empty()) throw InvalidArgument("empty potential combination");
  int k = 1;
  for (const auto& t : terms) {
    if (!t.potential->is_kstep()) throw InvalidArgument("only k-step terms can be merged");
    k = std::max(k, t.potential->window());
  }
  const SftPtr& sft = terms.front().potential->sft_ptr();
  WordIndex index(*sft, k);
  std::vector<double> table(index.size(), 0.0);
  for (const auto& t : terms) {
    const KStepPotential lifted = t.potential->kstep()->lift(k);
    for (std::size_t i = 0; i < table.size(); ++i) table[i] += t.coeff * lifted.value_at(i);
  }
  return KStepPotential(sft, k, 1, std::move(table));
}

namespace {

double kstep_partition(const KStepPotential& p, int n) {
  const int k = p.k();
  const Sft& sft = p.sft();
  const int s = std::max(k - 1, 1);
  if (n < s) {
    LogSum sum;
    for (const Word& w : sft.words(n)) sum.add(p.range(w).hi);
    return sum.value();
  }
  const GraphPtr g = window_graph(p.sft_ptr(), s + 1);
  // window ending at the appended symbol
  const std::uint64_t space = p.windows().code_space();
  std::vector<double> vals(g->edge_count());
  for (std::size_t e = 0; e < vals.size(); ++e)
    vals[e] = p.value_at(static_cast<std::size_t>(p.windows().index_of_code(g->edges().code_of(e) % space)));
  std::vector<double> f(g->state_count());
  for (std::size_t u = 0; u < f.size(); ++u) f[u] = p.fixed_sum(g->states().word(u));
  std::vector<LogSum> next(f.size());
  for (int len = s; len < n; ++len) {
    std::fill(next.begin(), next.end(), LogSum{});
    for (std::size_t e = 0; e < g->edge_count(); ++e) next[g->edge_target(e)].add(f[g->edge_source(e)] + vals[e]);
    for (std::size_t u = 0; u < f.size(); ++u) f[u] = next[u].value();
  }
  LogSum total;
  for (std::size_t u = 0; u < f.size(); ++u) {
    const double tail = k > 1 ? p.tail_range(g->states().word(u)).hi : 0.0;
    total.add(f[u] + tail);
  }
  return total.value();
}

double cocycle_partition(const MatrixCocyclePotential& p, int n) {
  const Sft& sft = p.sft();
  const int m = sft.alphabet_size();
  if (n == 0) return 0.0;
  std::vector<Eigen::RowVectorXd> v(m);
  double acc = 0.0;
  for (int j = 0; j < m; ++j) v[j] = Eigen::RowVectorXd::Ones(p.size()) * p.matrices()[j];
  for (int len = 1; len < n; ++len) {
    std::vector<Eigen::RowVectorXd> nv(m, Eigen::RowVectorXd::Zero(p.size()));
    for (int i = 0; i < m; ++i)
      for (Symbol j : sft.successors(static_cast<Symbol>(i))) nv[j] += v[i];
    double total = 0.0;
    for (int j = 0; j < m; ++j) {
      nv[j] = nv[j] * p.matrices()[j];
      total += nv[j].sum();
    }
    for (auto& r : nv) r /= total;
    acc += std::log(total);
    v = std::move(nv);
  }
  double total = 0.0;
  for (const auto& r : v) total += r.sum();
  return acc + std::log(total);
}

double enumerated_partition(std::span<const PressureTerm> terms, int n) {
  const Sft& sft = terms.front().potential->sft();
  if (sft.count_words(n) > kEnumerationLimit)
    throw TableTooLarge("too many words of length " + std::to_string(n) + " to enumerate");
  std::vector<PressureTerm> ksteps;
  std::vector<PressureTerm> cocycles;
  for (const auto& t : terms) (t.potential->is_kstep() ? ksteps : cocycles).push_back(t);
  std::optional<KStepPotential> merged;
  if (!ksteps.empty()) merged = merge_terms(ksteps);
  LogSum sum;
  for (const Word& w : sft.words(n)) {
    double v = merged ? merged->range(w).hi : 0.0;
    for (const auto& t : cocycles) v += t.coeff * t.potential->cocycle()->log_norm(w);
    sum.add(v);
  }
  return sum.value();
}

struct Constants {
  double c = 0.0;
  double norm = 0.0;
  double var_n = 0.0;
};

Constants combination_constants(std::span<const PressureTerm> terms, int n) {
  Constants out;
  std::vector<PressureTerm> ksteps;
  for (const auto& t : terms) {
    out.c += std::abs(t.coeff) * t.potential->constant();
    out.norm += std::abs(t.coeff) * t.potential->norm();
    if (t.potential->is_kstep()) ksteps.push_back(t);
  }
  if (!ksteps.empty()) out.var_n = merge_terms(ksteps).variation(n);
  return out;
}

}  // namespace

double log_partition_sum(std::span<const PressureTerm> terms, int n) {
  if (terms.empty()) throw InvalidArgument("empty potential combination");
  if (n < 0) throw InvalidArgument("word length must be >= 0");
  if (n == 0) return 0.0;
  const bool all_kstep =
      std::all_of(terms.begin(), terms.end(), [](const auto& t) { return t.potential->is_kstep(); });
  if (all_kstep) return kstep_partition(merge_terms(terms), n);
  if (terms.size() == 1 && terms.front().coeff == 1.0) return cocycle_partition(*terms.front().potential->cocycle(), n);
  return enumerated_partition(terms, n);
}

double log_partition_sum(const ScalarPotential& pot, int n) {
  const PressureTerm t{1.0, &pot};
  return log_partition_sum(std::span(&t, 1), n);
}

PressureBracket pressure_bracket(std::span<const PressureTerm> terms, int n) {
  if (n < 1) throw InvalidArgument("bracket length must be >= 1");
  const double a = log_partition_sum(terms, n);
  const Constants k = combination_constants(terms, n);
  const int p0 = terms.front().potential->sft().primitivity_exponent();
  PressureBracket b;
  b.n_used = n;
  b.upper = (a + k.c) / n;
  b.lower = (a - k.c - k.var_n - p0 * (k.norm + k.c)) / (n + p0);
  return b;
}

PressureBracket pressure_bracket(const ScalarPotential& pot, int n) {
  const PressureTerm t{1.0, &pot};
  return pressure_bracket(std::span(&t, 1), n);
}

double pressure_extrapolated(std::span<const PressureTerm> terms, int n) {
  return (log_partition_sum(terms, 2 * n) - log_partition_sum(terms, n)) / n;
}

PressureValue pressure_combined(std::span<const PressureTerm> terms, int bracket_n) {
  PressureValue out;
  const bool all_kstep =
      std::all_of(terms.begin(), terms.end(), [](const auto& t) { return t.potential->is_kstep(); });
  if (all_kstep) {
    out.value = pressure_exact(merge_terms(terms));
    out.exact = true;
    out.bracket = {out.value, out.value, 0};
    return out;
  }
  out.bracket = pressure_bracket(terms, bracket_n);
  out.value = out.bracket.midpoint();
  return out;
}

}  // namespace thermo
