#include "thermo/metric.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstring>
#include <limits>
#include <unordered_map>

#include "thermo/error.hpp"
#include "thermo/pressure.hpp"

namespace thermo {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct CountAcc {
  std::uint64_t v = 0;
  void merge(const CountAcc& o) { v += o.v; }
};

struct LogAcc {
  double v = kNegInf;
  void merge(const LogAcc& o) {
    if (o.v == kNegInf) return;
    if (v == kNegInf) {
      v = o.v;
      return;
    }
    const double hi = std::max(v, o.v), lo = std::min(v, o.v);
    v = hi + std::log1p(std::exp(lo - hi));
  }
};

struct StateKey {
  int len = 0;
  std::uint64_t code = 0;
  std::vector<double> sums;
  bool operator==(const StateKey&) const = default;
};

struct StateKeyHash {
  std::size_t operator()(const StateKey& k) const {
    std::size_t h = std::hash<std::uint64_t>{}(k.code) ^ (static_cast<std::size_t>(k.len) * 0x9E3779B97F4A7C15ULL);
    for (double d : k.sums) {
      std::uint64_t bits = 0;
      std::memcpy(&bits, &d, sizeof bits);
      h ^= std::hash<std::uint64_t>{}(bits) + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

}  // namespace

WeakGibbsMetric::WeakGibbsMetric(ScalarPotential psi) : psi_(std::move(psi)) {
  if (!(psi_.max_bound() < 0.0))
    throw InvalidArgument("metric potential must satisfy Ψ_max < 0 (got " + std::to_string(psi_.max_bound()) + ")");
}

double WeakGibbsMetric::distance(WordView x, WordView y) const {
  std::size_t n = 0;
  while (n < x.size() && n < y.size() && x[n] == y[n]) ++n;
  if (n == x.size() && n == y.size()) return 0.0;
  return std::exp(log_weight(x.first(n)));
}

BallFamily ball_family(const WeakGibbsMetric& metric, int n, std::uint64_t cap) {
  if (n < 0) throw InvalidArgument("resolution must be >= 0");
  BallFamily out;
  out.n = n;
  const Sft& sft = metric.sft();
  Word w;
  const double level = -static_cast<double>(n);
  std::function<void()> visit = [&] {
    if (!(metric.log_weight(w) > level)) {
      if (out.words.size() >= cap)
        throw ResolutionTooFine("ball family at n=" + std::to_string(n) + " exceeds " + std::to_string(cap) + " words");
      out.words.push_back(w);
      return;
    }
    const int m = sft.alphabet_size();
    if (w.empty()) {
      for (int a = 0; a < m; ++a) {
        w.push_back(static_cast<Symbol>(a));
        visit();
        w.pop_back();
      }
      return;
    }
    for (Symbol a : sft.successors(w.back())) {
      w.push_back(a);
      visit();
      w.pop_back();
    }
  };
  visit();
  return out;
}

BallWalker::BallWalker(const WeakGibbsMetric& metric, const KStepPotential* phi, std::uint64_t cap)
    : metric_(&metric), phi_(phi), cap_(cap) {
  int k = metric.psi().window();
  if (phi_) {
    if (!(phi_->sft() == metric.sft())) throw InvalidArgument("potential and metric live on different shifts");
    k = std::max(k, phi_->k());
  }
  state_length_ = std::max(k - 1, 1);
}

template <class Acc, class Leaf>
Acc BallWalker::walk(int n, const Leaf& leaf) const {
  if (n < 0) throw InvalidArgument("resolution must be >= 0");
  const Sft& sft = metric_->sft();
  const auto m = static_cast<std::uint64_t>(sft.alphabet_size());
  const KStepPotential* psi = metric_->psi().kstep();
  const int kpsi = metric_->psi().window();
  const int d = phi_ ? phi_->dim() : 0;
  const int kphi = phi_ ? phi_->k() : 1;
  const double level = -static_cast<double>(n);
  std::uint64_t space = 1;
  for (int i = 0; i < state_length_; ++i) space *= m;

  std::unordered_map<StateKey, Acc, StateKeyHash> memo;
  std::uint64_t work = 0;
  Word w;
  std::vector<double> fixed(static_cast<std::size_t>(d), 0.0);
  double fixed_psi = 0.0;

  std::function<Acc()> visit = [&]() -> Acc {
    if (++work > cap_)
      throw ResolutionTooFine("ball walk at n=" + std::to_string(n) + " exceeds " + std::to_string(cap_) + " nodes");
    const int len = static_cast<int>(w.size());
    double log_w;
    if (psi && len >= kpsi - 1 && len > 0)
      log_w = kpsi == 1 ? fixed_psi : fixed_psi + psi->tail_range(WordView(w).last(kpsi - 1)).hi;
    else
      log_w = metric_->log_weight(w);
    if (!(log_w > level)) return leaf(len, std::span<const double>(fixed), WordView(w));

    const bool memoize = psi && len >= state_length_;
    StateKey key;
    if (memoize) {
      key.len = len;
      key.code = word_code(WordView(w).last(state_length_), sft.alphabet_size()) % space;
      key.sums.reserve(static_cast<std::size_t>(d) + 1);
      key.sums.push_back(fixed_psi);
      key.sums.insert(key.sums.end(), fixed.begin(), fixed.end());
      if (auto it = memo.find(key); it != memo.end()) return it->second;
    }

    Acc acc;
    auto child = [&](Symbol a) {
      w.push_back(a);
      const double saved_psi = fixed_psi;
      const std::vector<double> saved = fixed;
      if (psi && static_cast<int>(w.size()) >= kpsi) fixed_psi += psi->value(WordView(w).last(kpsi));
      if (phi_ && static_cast<int>(w.size()) >= kphi) {
        const auto idx = static_cast<std::size_t>(phi_->windows().index_of(WordView(w).last(kphi)));
        for (int c = 0; c < d; ++c) fixed[c] += phi_->value_at(idx, c);
      }
      acc.merge(visit());
      fixed_psi = saved_psi;
      fixed = saved;
      w.pop_back();
    };
    if (w.empty()) {
      for (std::uint64_t a = 0; a < m; ++a) child(static_cast<Symbol>(a));
    } else {
      for (Symbol a : sft.successors(w.back())) child(a);
    }
    if (memoize) memo.emplace(std::move(key), acc);
    return acc;
  };
  return visit();
}

std::uint64_t BallWalker::count(int n, const Accept& accept) const {
  return walk<CountAcc>(n, [&](int len, std::span<const double> fixed, WordView word) {
           return CountAcc{accept(len, fixed, word) ? 1u : 0u};
         }).v;
}

double BallWalker::log_sum(int n, const LogValue& value) const {
  return walk<LogAcc>(n, [&](int len, std::span<const double> fixed, WordView word) {
           return LogAcc{value(len, fixed, word)};
         }).v;
}

std::uint64_t count_balls(const WeakGibbsMetric& metric, int n, std::uint64_t cap) {
  return BallWalker(metric, nullptr, cap).count(n, [](int, std::span<const double>, WordView) { return true; });
}

MetricDimension metric_dimension(const WeakGibbsMetric& metric, DimensionMethod method, int n_max) {
  MetricDimension out;
  out.method = method;
  if (method == DimensionMethod::root) {
    const KStepPotential* psi = metric.psi().kstep();
    if (!psi) throw InvalidArgument("root method needs a k-step metric potential");
    auto f = [&](double lambda) { return pressure_exact(psi->scaled(lambda)); };
    const double p0 = f(0.0);
    double lo = p0 / std::abs(metric.psi_min());
    double hi = p0 / std::abs(metric.psi_max());
    if (hi - lo <= 1e-15 * std::max(1.0, hi)) {
      out.value = 0.5 * (lo + hi);
      return out;
    }
    double flo = f(lo), fhi = f(hi);
    while (flo < 0.0) flo = f(lo -= 1e-9 * std::max(1.0, std::abs(lo)));
    while (fhi > 0.0) fhi = f(hi += 1e-9 * std::max(1.0, std::abs(hi)));
    if (flo == 0.0 || fhi == 0.0) {
      out.value = flo == 0.0 ? lo : hi;
      return out;
    }
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(
        f, lo, hi, flo, fhi, [](double a, double b) { return std::abs(b - a) <= 1e-13; }, iters);
    out.value = 0.5 * (r.first + r.second);
    out.error = r.second - r.first;
    return out;
  }
  if (n_max < 4) throw InvalidArgument("count method needs n_max >= 4");
  std::vector<double> logc(static_cast<std::size_t>(n_max) + 1);
  for (int n = 1; n <= n_max; ++n) logc[n] = std::log(static_cast<double>(count_balls(metric, n)));
  const int first = std::max(1, n_max / 2);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (int n = first; n <= n_max; ++n) {
    sx += n;
    sy += logc[n];
    sxx += static_cast<double>(n) * n;
    sxy += n * logc[n];
    ++cnt;
  }
  out.value = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  for (int n = first + 1; n <= n_max; ++n) out.error = std::max(out.error, std::abs(logc[n] - logc[n - 1] - out.value));
  return out;
}

}  // namespace thermo
