#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "oracles.hpp"
#include "thermo/error.hpp"
#include "thermo/measures.hpp"
#include "thermo/metric.hpp"

using namespace thermo;

namespace {

const Sft::Matrix kGolden = {{1, 1}, {1, 0}};

// Exhaustive frontier: minimal words with Ψ[w] <= e^{-n}, by brute-force checks on every word.
std::vector<Word> brute_frontier(const Sft::Matrix& a, const WeakGibbsMetric& metric, int n, int max_len) {
  std::vector<Word> out;
  if (n == 0) return {Word{}};
  for (int len = 1; len <= max_len; ++len)
    for (const Word& w : oracle::words(a, len)) {
      const bool small = std::exp(metric.log_weight(w)) <= std::exp(-static_cast<double>(n));
      const bool parent_big = std::exp(metric.log_weight(WordView(w).first(len - 1))) > std::exp(-static_cast<double>(n));
      if (small && parent_big) out.push_back(w);
    }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<WeakGibbsMetric> test_metrics() {
  std::mt19937_64 rng(4);
  std::vector<WeakGibbsMetric> out;
  auto full = build_sft({{1, 1}, {1, 1}});
  out.emplace_back(ScalarPotential(KStepPotential::one_step(full, {-1.0, -2.0})));
  auto golden = build_sft(kGolden);
  out.emplace_back(ScalarPotential(KStepPotential::from_function(golden, 2, 1, [](WordView w, std::span<double> o) {
    o[0] = -0.4 - 0.3 * w[0] - 0.5 * w[1];
  })));
  auto three = build_sft({{1, 1, 0}, {1, 1, 1}, {1, 0, 1}});
  std::uniform_real_distribution<double> u(0.3, 1.5);
  out.emplace_back(ScalarPotential(
      KStepPotential::from_function(three, 3, 1, [&](WordView, std::span<double> o) { o[0] = -u(rng); })));
  Eigen::MatrixXd m0(2, 2), m1(2, 2);
  m0 << 0.004, 0.002, 0.003, 0.004;
  m1 << 0.002, 0.003, 0.004, 0.003;
  out.emplace_back(ScalarPotential(MatrixCocyclePotential(full, {m0, m1})));
  return out;
}

}  // namespace

TEST_CASE("ball_family examples") {
  auto full = build_sft({{1, 1}, {1, 1}});
  const WeakGibbsMetric unit(ScalarPotential(KStepPotential::constant(full, -1.0)));
  const auto b3 = ball_family(unit, 3);
  CHECK(b3.words.size() == 8);
  for (const Word& w : b3.words) CHECK(w.size() == 3);

  auto full3 = build_sft(Sft::Matrix(3, std::vector<int>(3, 1)));
  const WeakGibbsMetric third(ScalarPotential(KStepPotential::constant(full3, -std::log(3.0))));
  const auto b1 = ball_family(third, 1);
  CHECK(b1.words.size() == 3);
  for (const Word& w : b1.words) CHECK(w.size() == 1);

  const WeakGibbsMetric uneven(ScalarPotential(KStepPotential::one_step(full, {-1.0, -2.0})));
  const auto b2 = ball_family(uneven, 2);
  CHECK(b2.words == std::vector<Word>{{0, 0}, {0, 1}, {1}});
  CHECK(b2.words == brute_frontier({{1, 1}, {1, 1}}, uneven, 2, 4));

  const auto b0 = ball_family(unit, 0);
  CHECK(b0.words == std::vector<Word>{Word{}});
  CHECK_THROWS_AS(ball_family(unit, 12, 1000), ResolutionTooFine);
  CHECK_THROWS_AS(WeakGibbsMetric(ScalarPotential(KStepPotential::one_step(full, {-1.0, 0.0}))), InvalidArgument);
}

TEST_CASE("ball family invariants") {
  const std::vector<Sft::Matrix> mats = {{{1, 1}, {1, 1}}, kGolden, {{1, 1, 0}, {1, 1, 1}, {1, 0, 1}}, {{1, 1}, {1, 1}}};
  const auto metrics = test_metrics();
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    const auto& metric = metrics[i];
    const double c = metric.psi().constant();
    const MarkovMeasure parry = parry_measure(metric.sft_ptr());
    std::vector<Word> prev;
    for (int n = 0; n <= 8; ++n) {
      const auto fam = ball_family(metric, n);
      CHECK(std::is_sorted(fam.words.begin(), fam.words.end()));
      CHECK(count_balls(metric, n) == fam.words.size());
      double mass = 0.0;
      for (const Word& w : fam.words) mass += parry.cylinder_mass(w);
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
      for (const Word& w : fam.words) {
        const double len = static_cast<double>(w.size());
        CHECK(metric.c1() * n <= len + 1e-12);
        CHECK(len <= metric.c2() * n + 1e-12);
        const double lw = metric.log_weight(w);
        CHECK(lw <= -n + 1e-12);
        CHECK(lw >= metric.psi_min() - c - metric.psi().variation(static_cast<int>(w.size())) - n - 1e-9);
      }
      if (metric.c2() * n <= 12.0)
        CHECK(fam.words == brute_frontier(mats[i], metric, n, static_cast<int>(metric.c2() * n) + 1));
      if (n > 0) {
        for (const Word& w : fam.words) {
          int parents = 0;
          for (const Word& p : prev)
            if (p.size() <= w.size() && std::equal(p.begin(), p.end(), w.begin())) ++parents;
          CHECK(parents == 1);
        }
      }
      prev = fam.words;
    }
  }
}

TEST_CASE("metric_dimension examples") {
  for (int m : {2, 3, 5}) {
    auto full = build_sft(Sft::Matrix(m, std::vector<int>(m, 1)));
    const WeakGibbsMetric metric(ScalarPotential(KStepPotential::constant(full, -std::log(m))));
    CHECK(metric_dimension(metric, DimensionMethod::root).value == doctest::Approx(1.0).epsilon(1e-12));
  }
  auto golden = build_sft(kGolden);
  const WeakGibbsMetric gm(ScalarPotential(KStepPotential::constant(golden, -1.0)));
  CHECK(std::abs(metric_dimension(gm, DimensionMethod::root).value - std::log((1 + std::sqrt(5.0)) / 2)) < 1e-9);
  auto full = build_sft({{1, 1}, {1, 1}});
  const WeakGibbsMetric uneven(ScalarPotential(KStepPotential::one_step(full, {-1.0, -2.0})));
  const double root = metric_dimension(uneven, DimensionMethod::root).value;
  // e^{-D} + e^{-2D} = 1
  CHECK(root == doctest::Approx(std::log((1 + std::sqrt(5.0)) / 2)).epsilon(1e-10));
  const auto counted = metric_dimension(uneven, DimensionMethod::count, 20);
  CHECK(std::abs(counted.value - root) < 0.05);
}

TEST_CASE("ball walker memoization agrees with materialized families") {
  auto full = build_sft({{1, 1}, {1, 1}});
  const WeakGibbsMetric metric(ScalarPotential(KStepPotential::constant(full, -std::log(2.0))));
  const auto digit = KStepPotential::one_step(full, {0.0, 1.0});
  const BallWalker walker(metric, &digit);
  for (int n : {3, 6, 9}) {
    const auto fam = ball_family(metric, n);
    std::uint64_t expect = 0;
    for (const Word& w : fam.words) {
      double s = 0;
      for (Symbol x : w) s += x;
      if (s / w.size() < 0.5) ++expect;
    }
    const auto got = walker.count(n, [](int len, std::span<const double> fixed, WordView) {
      return fixed[0] / len < 0.5;
    });
    CHECK(got == expect);
    const double lsum = walker.log_sum(n, [](int, std::span<const double> fixed, WordView) { return fixed[0]; });
    double direct = 0.0;
    for (const Word& w : fam.words) {
      double s = 0;
      for (Symbol x : w) s += x;
      direct += std::exp(s);
    }
    CHECK(lsum == doctest::Approx(std::log(direct)).epsilon(1e-12));
  }
  // n = 16 has 2^24 balls: only feasible through shared subtrees
  CHECK(count_balls(metric, 16) == (std::uint64_t{1} << 24));
}
