#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "thermo/error.hpp"
#include "thermo/potential.hpp"

using namespace thermo;

namespace {

const Sft::Matrix kGolden = {{1, 1}, {1, 0}};

KStepPotential random_kstep(const SftPtr& sft, int k, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, scale);
  return KStepPotential::from_function(sft, k, 1, [&](WordView, std::span<double> out) { out[0] = gauss(rng); });
}

MatrixCocyclePotential random_cocycle(const SftPtr& sft, int q, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.2, 2.0);
  std::vector<Eigen::MatrixXd> mats;
  for (int j = 0; j < sft->alphabet_size(); ++j) {
    Eigen::MatrixXd mat(q, q);
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b) mat(a, b) = u(rng);
    mats.push_back(mat);
  }
  return MatrixCocyclePotential(sft, mats);
}

Word random_word(const Sft& sft, int n, std::mt19937_64& rng) {
  Word w;
  std::uniform_int_distribution<int> pick(0, 1 << 20);
  for (int i = 0; i < n; ++i) {
    if (w.empty()) {
      w.push_back(static_cast<Symbol>(pick(rng) % sft.alphabet_size()));
    } else {
      const auto succ = sft.successors(w.back());
      w.push_back(succ[pick(rng) % succ.size()]);
    }
  }
  return w;
}

}  // namespace

TEST_CASE("birkhoff_range examples") {
  auto full = build_sft({{1, 1}, {1, 1}});
  const auto g1 = KStepPotential::one_step(full, {0.0, 1.0});
  const Interval r1 = g1.range(Word{0, 1});
  CHECK(r1.lo == 1.0);
  CHECK(r1.hi == 1.0);

  const KStepPotential g2(full, 2, 1, {0.0, 1.0, 2.0, 3.0});
  const Interval r2 = g2.range(Word{0});
  CHECK(r2.lo == 0.0);
  CHECK(r2.hi == 1.0);

  const MatrixCocyclePotential unit(full, {Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Ones(1, 1)});
  const ScalarPotential s(unit);
  for (const Word& w : full->words(4)) {
    CHECK(s.range(w).lo == 0.0);
    CHECK(s.range(w).hi == 0.0);
  }
}

TEST_CASE("k-step range equals brute force over extensions") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 6; ++trial) {
    const int m = 2 + trial % 2;
    const auto a = oracle::random_mixing_matrix(m, rng);
    auto sft = build_sft(a);
    const int k = 1 + trial % 4;
    const auto pot = random_kstep(sft, k, rng);
    auto g = [&](const Word& w) { return pot.value(w); };
    for (int n = 0; n <= 6; ++n) {
      double var = 0.0;
      for (const Word& w : sft->words(n)) {
        double lo = 1e300, hi = -1e300;
        for (const Word& x : oracle::extensions(a, w, k - 1)) {
          const double v = oracle::kstep_sum(g, k, x, n);
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
        const Interval r = pot.range(w);
        CHECK(r.lo == doctest::Approx(lo).epsilon(1e-12));
        CHECK(r.hi == doctest::Approx(hi).epsilon(1e-12));
        var = std::max(var, hi - lo);
      }
      CHECK(pot.variation(n) == doctest::Approx(var).epsilon(1e-12));
    }
  }
}

TEST_CASE("sup_weight examples") {
  auto full = build_sft({{1, 1}, {1, 1}});
  const ScalarPotential half(KStepPotential::constant(full, -std::log(2.0)));
  CHECK(sup_weight(half, Word{0, 1, 1}) == doctest::Approx(0.125).epsilon(1e-14));
  const ScalarPotential digit(KStepPotential::one_step(full, {0.0, 1.0}));
  CHECK(sup_weight(digit, Word{1, 0, 1}) == doctest::Approx(std::exp(2.0)).epsilon(1e-14));
  auto golden = build_sft(kGolden);
  const ScalarPotential neg(KStepPotential::one_step(golden, {-1.0, -2.0}));
  CHECK(sup_weight(neg, Word{1, 0, 1}) == doctest::Approx(std::exp(-5.0)).epsilon(1e-14));
}

TEST_CASE("holder_approx examples") {
  auto full = build_sft({{1, 1}, {1, 1}});
  const PotentialBundle one({ScalarPotential(KStepPotential::one_step(full, {0.3, -1.2}))});
  const auto h1 = holder_approx(one, 1);
  CHECK(h1.bound == 0.0);
  CHECK(h1.potential.value(Word{0}) == doctest::Approx(0.3));
  CHECK(h1.potential.value(Word{1}) == doctest::Approx(-1.2));

  Eigen::MatrixXd mat(2, 2);
  mat << 2.0, 1.0, 0.5, 3.0;
  const MatrixCocyclePotential coc(full, {mat, mat});
  const PotentialBundle cb({ScalarPotential(coc)});
  for (int k : {1, 2, 5}) {
    const auto h = holder_approx(cb, k);
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(2, 2);
    for (int i = 0; i < k; ++i) power *= mat;
    const double expect = std::log(power.sum()) / k;
    for (std::size_t i = 0; i < h.potential.windows().size(); ++i)
      CHECK(h.potential.value_at(i) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(h.bound == doctest::Approx(coc.constant() / k));
  }
  std::mt19937_64 rng(9);
  const PotentialBundle rb({ScalarPotential(random_cocycle(full, 2, rng))});
  for (int k : {1, 2, 4, 8}) CHECK(holder_approx(rb, 2 * k).bound <= holder_approx(rb, k).bound);
}

TEST_CASE("var_norm examples") {
  auto full = build_sft({{1, 1}, {1, 1}});
  const PotentialBundle one({ScalarPotential(KStepPotential::one_step(full, {0.0, 1.0}))});
  for (int n = 1; n < 6; ++n) CHECK(var_norm(one, n) == 0.0);
  // pair potential g(ab) = a + 2b: at n=1 the free symbol moves the value by 2
  const auto pair = KStepPotential::from_function(full, 2, 1, [](WordView w, std::span<double> out) {
    out[0] = w[0] + 2.0 * w[1];
  });
  const PotentialBundle pb({ScalarPotential(pair)});
  CHECK(var_norm(pb, 1) == doctest::Approx(2.0));
  std::mt19937_64 rng(1);
  const PotentialBundle cb({ScalarPotential(random_cocycle(full, 3, rng))});
  double prev = var_norm(cb, 1);
  for (int n = 2; n < 12; ++n) {
    const double v = var_norm(cb, n);
    CHECK(v <= prev + 1e-15);
    prev = v;
  }
  CHECK(var_norm_star(pb, 4, 0.5, 2.0) == doctest::Approx(2.0));
}

TEST_CASE("cocycle almost additivity") {
  std::mt19937_64 rng(2024);
  auto sft = build_sft({{1, 1, 0}, {1, 1, 1}, {1, 0, 1}});
  for (int q : {1, 2, 3}) {
    const auto coc = random_cocycle(sft, q, rng);
    std::uniform_int_distribution<int> len(1, 20);
    for (int trial = 0; trial < 1000; ++trial) {
      const int n = len(rng), p = len(rng);
      const Word x = random_word(*sft, n + p, rng);
      const double whole = coc.log_norm(x);
      const double head = coc.log_norm(WordView(x).first(n));
      const double tail = coc.log_norm(WordView(x).subspan(n));
      CHECK(std::abs(whole - head - tail) <= coc.constant() + 1e-12);
    }
  }
}

TEST_CASE("max-min envelope and multiplicative bounds") {
  std::mt19937_64 rng(77);
  auto full = build_sft({{1, 1}, {1, 1}});
  std::vector<ScalarPotential> pots;
  pots.emplace_back(random_kstep(full, 1, rng));
  pots.emplace_back(random_kstep(full, 3, rng));
  pots.emplace_back(random_cocycle(full, 2, rng));
  for (const auto& p : pots) {
    for (int n = 1; n <= 8; ++n)
      for (const Word& w : full->words(n)) {
        const Interval r = p.range(w);
        CHECK(r.lo >= n * p.min_bound() - 1e-9);
        CHECK(r.hi <= n * p.max_bound() + 1e-9);
      }
    const double c = p.constant();
    for (int lu = 1; lu <= 8; lu += 3)
      for (int lv = 1; lv <= 8; lv += 2)
        for (const Word& u : full->words(lu))
          for (const Word& v : full->words(lv)) {
            Word uv = u;
            uv.insert(uv.end(), v.begin(), v.end());
            const double luv = p.range(uv).hi;
            const double lsum = p.range(u).hi + p.range(v).hi;
            CHECK(luv <= lsum + c + 1e-9);
            CHECK(luv >= lsum - c - p.variation(lu) - 1e-9);
          }
  }
}

TEST_CASE("negative potentials: sup_weight decreases along extensions") {
  std::mt19937_64 rng(5);
  auto golden = build_sft(kGolden);
  const auto raw = random_kstep(golden, 2, rng, 0.3);
  const ScalarPotential neg(raw.shifted(-(raw.max_value() + 0.1)));
  for (int n = 1; n <= 8; ++n)
    for (const Word& w : golden->words(n))
      for (Symbol a : golden->successors(w.back())) {
        Word x = w;
        x.push_back(a);
        CHECK(sup_weight(neg, x) <= sup_weight(neg, w) * (1 + 1e-12));
      }
}

TEST_CASE("variation over n vanishes along doubling") {
  std::mt19937_64 rng(8);
  auto full = build_sft({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}});
  const PotentialBundle b({ScalarPotential(random_kstep(full, 4, rng)), ScalarPotential(random_cocycle(full, 2, rng))});
  for (int n = 1; n <= 16; n *= 2) CHECK(var_norm(b, 2 * n) / (2 * n) <= var_norm(b, n) / n + 1e-9);
}

TEST_CASE("bundle constants") {
  std::mt19937_64 rng(3);
  auto full = build_sft({{1, 1}, {1, 1}});
  const auto coc = random_cocycle(full, 2, rng);
  const PotentialBundle b({ScalarPotential(KStepPotential::one_step(full, {0.0, 1.0})), ScalarPotential(coc)});
  CHECK(b.max_bounds()[0] == 1.0);
  CHECK(b.min_bounds()[0] == 0.0);
  CHECK(b.max_bounds()[1] == doctest::Approx(coc.max_value() + coc.constant()));
  CHECK(b.norm() == doctest::Approx(std::hypot(1.0, std::max(std::abs(b.max_bounds()[1]), std::abs(b.min_bounds()[1])))));
  CHECK_THROWS_AS(KStepPotential(full, 2, 1, {1.0, 2.0}), InvalidArgument);
  CHECK_THROWS_AS(MatrixCocyclePotential(full, {Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Ones(1, 1)}),
                  InvalidArgument);
  const KStepPotential lifted = KStepPotential::one_step(full, {0.5, 2.0}).lift(3);
  CHECK(lifted.value(Word{1, 0, 0}) == 2.0);
}
