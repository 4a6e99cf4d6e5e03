#include "thermo/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "thermo/error.hpp"

namespace thermo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t ipow(std::uint64_t base, int e) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace

KStepPotential::KStepPotential(SftPtr sft, int k, int d, std::vector<double> table)
    : sft_(std::move(sft)), k_(k), d_(d), table_(std::move(table)) {
  if (!sft_) throw InvalidArgument("potential needs a shift");
  if (k_ < 1) throw InvalidArgument("step length must be >= 1");
  if (d_ < 1) throw InvalidArgument("value dimension must be >= 1");
  windows_ = std::make_shared<const WordIndex>(*sft_, k_);
  suffixes_ = std::make_shared<const WordIndex>(*sft_, k_ - 1);
  if (table_.size() != windows_->size() * static_cast<std::size_t>(d_))
    throw InvalidArgument("potential table has " + std::to_string(table_.size()) + " entries, expected " +
                          std::to_string(windows_->size() * d_));
  for (double v : table_)
    if (!std::isfinite(v)) throw InvalidArgument("potential table contains a non-finite value");
  build_tails();
}

KStepPotential KStepPotential::from_function(SftPtr sft, int k, int d, const Generator& g) {
  WordIndex index(*sft, k);
  std::vector<double> table(index.size() * static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < index.size(); ++i) {
    const Word w = index.word(i);
    g(w, std::span<double>(table.data() + i * d, static_cast<std::size_t>(d)));
  }
  return KStepPotential(std::move(sft), k, d, std::move(table));
}

KStepPotential KStepPotential::one_step(SftPtr sft, std::vector<double> values) {
  if (static_cast<int>(values.size()) != sft->alphabet_size())
    throw InvalidArgument("one-step potential needs one value per symbol");
  return KStepPotential(std::move(sft), 1, 1, std::move(values));
}

KStepPotential KStepPotential::constant(SftPtr sft, double value) {
  const auto m = static_cast<std::size_t>(sft->alphabet_size());
  return KStepPotential(std::move(sft), 1, 1, std::vector<double>(m, value));
}

void KStepPotential::build_tails() {
  const std::size_t ns = suffixes_->size();
  const auto m = static_cast<std::uint64_t>(sft_->alphabet_size());
  const std::uint64_t space = suffixes_->code_space();
  tail_max_.assign(d_, std::vector<double>(ns * k_, 0.0));
  tail_min_.assign(d_, std::vector<double>(ns * k_, 0.0));
  for (int j = 1; j < k_; ++j) {
    for (std::size_t s = 0; s < ns; ++s) {
      const std::uint64_t code = suffixes_->code_of(s);
      const Symbol last = static_cast<Symbol>(code % m);
      for (int c = 0; c < d_; ++c) {
        double hi = -kInf, lo = kInf;
        for (Symbol a : sft_->successors(last)) {
          const std::uint64_t wcode = code * m + a;
          const auto wi = static_cast<std::size_t>(windows_->index_of_code(wcode));
          const auto next = static_cast<std::size_t>(suffixes_->index_of_code(wcode % space));
          const double g = table_[wi * d_ + c];
          hi = std::max(hi, g + tail_max_[c][(j - 1) * ns + next]);
          lo = std::min(lo, g + tail_min_[c][(j - 1) * ns + next]);
        }
        tail_max_[c][j * ns + s] = hi;
        tail_min_[c][j * ns + s] = lo;
      }
    }
  }
}

double KStepPotential::value(WordView kword, int c) const {
  const auto i = windows_->index_of(kword);
  if (i < 0) throw InvalidArgument("'" + to_string(kword) + "' is not an admissible window");
  return table_[static_cast<std::size_t>(i) * d_ + c];
}

double KStepPotential::evaluate(WordView x, int n, int c) const {
  if (static_cast<int>(x.size()) < n + k_ - 1)
    throw InvalidArgument("point prefix too short to evaluate the Birkhoff sum");
  double sum = 0.0;
  for (int t = 0; t < n; ++t) sum += value(x.subspan(t, k_), c);
  return sum;
}

double KStepPotential::fixed_sum(WordView w, int c) const {
  double sum = 0.0;
  const int n = static_cast<int>(w.size());
  for (int t = 0; t + k_ <= n; ++t) sum += value(w.subspan(t, k_), c);
  return sum;
}

Interval KStepPotential::tail_range(WordView suffix, int c) const {
  const auto s = suffixes_->index_of(suffix);
  if (s < 0) throw InvalidArgument("'" + to_string(suffix) + "' is not an admissible suffix");
  const std::size_t at = static_cast<std::size_t>(k_ - 1) * suffixes_->size() + static_cast<std::size_t>(s);
  return {tail_min_[c][at], tail_max_[c][at]};
}

Interval KStepPotential::short_range(WordView w, int c) const {
  const int n = static_cast<int>(w.size());
  const auto m = static_cast<std::uint64_t>(sft_->alphabet_size());
  const std::uint64_t span = ipow(m, k_ - 1 - n);
  const std::uint64_t base = word_code(w, sft_->alphabet_size()) * span;
  const std::size_t ns = suffixes_->size();
  Interval out{kInf, -kInf};
  for (std::uint64_t code = base; code < base + span; ++code) {
    const auto s = suffixes_->index_of_code(code);
    if (s < 0) continue;
    out.lo = std::min(out.lo, tail_min_[c][n * ns + static_cast<std::size_t>(s)]);
    out.hi = std::max(out.hi, tail_max_[c][n * ns + static_cast<std::size_t>(s)]);
  }
  return out;
}

Interval KStepPotential::range(WordView w, int c) const {
  const int n = static_cast<int>(w.size());
  if (n == 0) return {0.0, 0.0};
  if (!sft_->admissible(w)) throw InvalidArgument("'" + to_string(w) + "' is not admissible");
  if (n < k_ - 1) return short_range(w, c);
  const double fixed = fixed_sum(w, c);
  const Interval tail = tail_range(w.subspan(n - (k_ - 1)), c);
  return {fixed + tail.lo, fixed + tail.hi};
}

double KStepPotential::variation(int n, int c) const {
  if (n <= 0 || k_ == 1) return 0.0;
  double best = 0.0;
  if (n >= k_ - 1) {
    const std::size_t ns = suffixes_->size();
    const std::size_t at = static_cast<std::size_t>(k_ - 1) * ns;
    for (std::size_t s = 0; s < ns; ++s) best = std::max(best, tail_max_[c][at + s] - tail_min_[c][at + s]);
    return best;
  }
  for (const Word& w : sft_->words(n)) best = std::max(best, short_range(w, c).width());
  return best;
}

double KStepPotential::max_value(int c) const {
  double best = -kInf;
  for (std::size_t i = 0; i < windows_->size(); ++i) best = std::max(best, table_[i * d_ + c]);
  return best;
}

double KStepPotential::min_value(int c) const {
  double best = kInf;
  for (std::size_t i = 0; i < windows_->size(); ++i) best = std::min(best, table_[i * d_ + c]);
  return best;
}

KStepPotential KStepPotential::component(int c) const {
  if (c < 0 || c >= d_) throw InvalidArgument("component index out of range");
  std::vector<double> t(windows_->size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = table_[i * d_ + c];
  return KStepPotential(sft_, k_, 1, std::move(t));
}

KStepPotential KStepPotential::lift(int k) const {
  if (k < k_) throw InvalidArgument("cannot lift to a shorter window");
  if (k == k_) return *this;
  return from_function(sft_, k, d_, [this](WordView w, std::span<double> out) {
    const auto i = static_cast<std::size_t>(windows_->index_of(w.first(k_)));
    for (int c = 0; c < d_; ++c) out[c] = table_[i * d_ + c];
  });
}

KStepPotential KStepPotential::scaled(double factor) const {
  std::vector<double> t = table_;
  for (double& v : t) v *= factor;
  return KStepPotential(sft_, k_, d_, std::move(t));
}

KStepPotential KStepPotential::shifted(double offset) const {
  std::vector<double> t = table_;
  for (double& v : t) v += offset;
  return KStepPotential(sft_, k_, d_, std::move(t));
}

MatrixCocyclePotential::MatrixCocyclePotential(SftPtr sft, std::vector<Eigen::MatrixXd> matrices)
    : sft_(std::move(sft)), matrices_(std::move(matrices)) {
  if (!sft_) throw InvalidArgument("potential needs a shift");
  if (static_cast<int>(matrices_.size()) != sft_->alphabet_size())
    throw InvalidArgument("cocycle needs one matrix per symbol");
  const auto q = matrices_.front().rows();
  double ratio = 1.0;
  for (const auto& mat : matrices_) {
    if (mat.rows() != q || mat.cols() != q || q == 0)
      throw InvalidArgument("cocycle matrices must be square of a common size");
    if (!(mat.array() > 0.0).all() || !mat.allFinite())
      throw InvalidArgument("cocycle matrices must be strictly positive");
    for (Eigen::Index a = 0; a < q; ++a) ratio = std::max(ratio, mat.row(a).maxCoeff() / mat.row(a).minCoeff());
  }
  constant_ = std::log(ratio) + 2.0 * std::log(static_cast<double>(q));
}

double MatrixCocyclePotential::log_norm(WordView w) const {
  if (w.empty()) return 0.0;
  Eigen::RowVectorXd r = Eigen::RowVectorXd::Ones(size());
  double acc = 0.0;
  for (Symbol s : w) {
    r = r * matrices_[s];
    const double scale = r.sum();
    acc += std::log(scale);
    r /= scale;
  }
  return acc;
}

double MatrixCocyclePotential::max_value() const {
  double best = -kInf;
  for (const auto& mat : matrices_) best = std::max(best, std::log(mat.sum()));
  return best;
}

double MatrixCocyclePotential::min_value() const {
  double best = kInf;
  for (const auto& mat : matrices_) best = std::min(best, std::log(mat.sum()));
  return best;
}

ScalarPotential::ScalarPotential(KStepPotential p) : impl_(std::move(p)) {
  if (std::get<KStepPotential>(impl_).dim() != 1)
    throw InvalidArgument("scalar potential must have value dimension 1");
}

ScalarPotential::ScalarPotential(MatrixCocyclePotential p) : impl_(std::move(p)) {}

const Sft& ScalarPotential::sft() const {
  return std::visit([](const auto& p) -> const Sft& { return p.sft(); }, impl_);
}

const SftPtr& ScalarPotential::sft_ptr() const {
  return std::visit([](const auto& p) -> const SftPtr& { return p.sft_ptr(); }, impl_);
}

int ScalarPotential::window() const { return kstep() ? kstep()->k() : 1; }

Interval ScalarPotential::range(WordView w) const {
  if (const auto* p = kstep()) return p->range(w);
  const double v = cocycle()->log_norm(w);
  return {v, v};
}

double ScalarPotential::evaluate(WordView x, int n) const {
  if (const auto* p = kstep()) return p->evaluate(x, n);
  return cocycle()->log_norm(x.first(static_cast<std::size_t>(n)));
}

double ScalarPotential::constant() const { return kstep() ? 0.0 : cocycle()->constant(); }

double ScalarPotential::max_bound() const {
  if (const auto* p = kstep()) return p->max_value();
  return cocycle()->max_value() + cocycle()->constant();
}

double ScalarPotential::min_bound() const {
  if (const auto* p = kstep()) return p->min_value();
  return cocycle()->min_value() - cocycle()->constant();
}

double ScalarPotential::norm() const { return std::max(std::abs(max_bound()), std::abs(min_bound())); }

double ScalarPotential::variation(int n) const { return kstep() ? kstep()->variation(n) : 0.0; }

PotentialBundle::PotentialBundle(std::vector<ScalarPotential> components) : components_(std::move(components)) {
  if (components_.empty()) throw InvalidArgument("potential bundle is empty");
  for (const auto& c : components_)
    if (!(c.sft() == components_.front().sft()))
      throw InvalidArgument("bundle components live on different shifts");
  for (const auto& c : components_) {
    max_.push_back(c.max_bound());
    min_.push_back(c.min_bound());
  }
}

PotentialBundle::PotentialBundle(const KStepPotential& vector_potential)
    : PotentialBundle([&] {
        std::vector<ScalarPotential> parts;
        for (int c = 0; c < vector_potential.dim(); ++c) parts.emplace_back(vector_potential.component(c));
        return parts;
      }()) {}

bool PotentialBundle::all_kstep() const {
  return std::all_of(components_.begin(), components_.end(), [](const auto& c) { return c.is_kstep(); });
}

int PotentialBundle::max_window() const {
  int k = 1;
  for (const auto& c : components_) k = std::max(k, c.window());
  return k;
}

std::vector<double> PotentialBundle::constants() const {
  std::vector<double> out;
  for (const auto& c : components_) out.push_back(c.constant());
  return out;
}

double PotentialBundle::norm() const {
  double s = 0.0;
  for (const auto& c : components_) s += c.norm() * c.norm();
  return std::sqrt(s);
}

KStepPotential PotentialBundle::merged() const {
  if (!all_kstep()) throw InvalidArgument("only k-step components can be merged into one generator");
  const int k = max_window();
  const int d = dim();
  std::vector<KStepPotential> lifted;
  for (const auto& c : components_) lifted.push_back(c.kstep()->lift(k));
  const std::size_t nw = lifted.front().windows().size();
  std::vector<double> table(nw * d);
  for (std::size_t i = 0; i < nw; ++i)
    for (int c = 0; c < d; ++c) table[i * d + c] = lifted[c].value_at(i);
  return KStepPotential(sft_ptr(), k, d, std::move(table));
}

std::vector<Interval> birkhoff_range(const PotentialBundle& pot, WordView w) {
  std::vector<Interval> out;
  for (const auto& c : pot.components()) out.push_back(c.range(w));
  return out;
}

double sup_weight(const ScalarPotential& pot, WordView w) { return std::exp(pot.range(w).hi); }

double var_norm(const PotentialBundle& pot, int n) {
  double s = 0.0;
  for (const auto& c : pot.components()) {
    const double v = c.variation(n);
    s += v * v;
  }
  return std::sqrt(s);
}

double var_norm_star(const PotentialBundle& pot, int n, double c1, double c2) {
  const int lo = std::max(1, static_cast<int>(std::ceil(c1 * n)));
  const int hi = static_cast<int>(std::floor(c2 * n));
  // ‖Φ‖_l is constant once l exceeds every window length.
  const int stop = std::min(hi, lo + pot.max_window());
  double best = 0.0;
  for (int l = lo; l <= stop; ++l) best = std::max(best, var_norm(pot, l));
  return best;
}

HolderApproximation holder_approx(const PotentialBundle& pot, int k) {
  if (k < 1) throw InvalidArgument("approximation order must be >= 1");
  const auto& sft = pot.sft();
  const int d = pot.dim();
  const int extra = pot.max_window() - 1;
  auto gen = [&](WordView w, std::span<double> out) {
    Word x(w.begin(), w.end());
    sft.extend_min(x, w.size() + static_cast<std::size_t>(extra));
    for (int c = 0; c < d; ++c) out[c] = pot[c].evaluate(x, k) / k;
  };
  HolderApproximation result{KStepPotential::from_function(pot.sft_ptr(), k, d, gen), 0.0};
  double c2 = 0.0;
  for (double c : pot.constants()) c2 += c * c;
  result.bound = std::sqrt(c2) / k + var_norm(pot, k) / k;
  return result;
}

}  // namespace thermo
