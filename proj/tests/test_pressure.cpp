#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "thermo/measures.hpp"
#include "thermo/pressure.hpp"

using namespace thermo;

namespace {

const Sft::Matrix kGolden = {{1, 1}, {1, 0}};
const double kPhi = (1 + std::sqrt(5.0)) / 2;

KStepPotential random_kstep(const SftPtr& sft, int k, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, scale);
  return KStepPotential::from_function(sft, k, 1, [&](WordView, std::span<double> out) { out[0] = gauss(rng); });
}

// Brute-force pressure of a k-step potential: spectral radius of the matrix
// on (k)-words built directly from the admissibility matrix.
double oracle_pressure(const Sft::Matrix& a, const KStepPotential& pot) {
  const int k = std::max(pot.k(), 2);
  const auto states = oracle::words(a, k - 1);
  std::vector<std::vector<double>> mat(states.size(), std::vector<double>(states.size(), 0.0));
  for (std::size_t i = 0; i < states.size(); ++i)
    for (std::size_t j = 0; j < states.size(); ++j) {
      const Word& u = states[i];
      const Word& v = states[j];
      if (!std::equal(u.begin() + 1, u.end(), v.begin(), v.end() - 1)) continue;
      Word e = u;
      e.push_back(v.back());
      if (!oracle::admissible(a, e)) continue;
      mat[i][j] = std::exp(pot.value(WordView(e).first(pot.k())));
    }
  return std::log(oracle::spectral_radius(mat));
}

}  // namespace

TEST_CASE("pressure_exact examples") {
  for (int m = 2; m <= 4; ++m) {
    auto full = build_sft(Sft::Matrix(m, std::vector<int>(m, 1)));
    CHECK(pressure_exact(KStepPotential::constant(full, 0.0)) == doctest::Approx(std::log(m)).epsilon(1e-13));
  }
  auto full3 = build_sft(Sft::Matrix(3, std::vector<int>(3, 1)));
  CHECK(std::abs(pressure_exact(KStepPotential::one_step(full3, {std::log(0.2), std::log(0.5), std::log(0.3)}))) <
        1e-13);
  auto golden = build_sft(kGolden);
  CHECK(pressure_exact(KStepPotential::constant(golden, 0.0)) == doctest::Approx(std::log(kPhi)).epsilon(1e-13));
}

TEST_CASE("pressure_exact against an independent spectral radius") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const int m = 2 + trial % 3;
    const auto a = oracle::random_mixing_matrix(m, rng);
    auto sft = build_sft(a);
    const auto pot = random_kstep(sft, 1 + trial % 3, rng);
    CHECK(pressure_exact(pot) == doctest::Approx(oracle_pressure(a, pot)).epsilon(1e-10));
  }
}

TEST_CASE("Collatz-Wielandt enclosure is tight") {
  std::mt19937_64 rng(4);
  auto sft = build_sft({{1, 1, 0}, {0, 1, 1}, {1, 1, 1}});
  for (int k : {1, 2, 3, 5}) {
    const TransferMatrix tm(random_kstep(sft, k, rng));
    const PerronData pd = tm.perron();
    CHECK(pd.log_lower <= pd.log_rho);
    CHECK(pd.log_rho <= pd.log_upper);
    CHECK(pd.log_upper - pd.log_lower <= 1e-11);
  }
  // large graph: sparse path
  auto full = build_sft(Sft::Matrix(4, std::vector<int>(4, 1)));
  const TransferMatrix big(random_kstep(full, 5, rng, 0.2));
  const PerronData pd = big.perron();
  CHECK(pd.log_upper - pd.log_lower <= 1e-11);
}

TEST_CASE("pressure_bracket") {
  std::mt19937_64 rng(21);
  auto golden = build_sft(kGolden);
  for (int k : {1, 2, 3}) {
    const ScalarPotential pot(random_kstep(golden, k, rng));
    const double exact = pressure_exact(*pot.kstep());
    for (int n = k; n <= 24; n += 3) {
      const auto b = pressure_bracket(pot, n);
      CHECK(b.lower <= exact + 1e-12);
      CHECK(exact <= b.upper + 1e-12);
      const auto half = pressure_bracket(pot, std::max(1, n / 2));
      CHECK(b.lower <= half.upper + 1e-12);
      CHECK(half.lower <= b.upper + 1e-12);
    }
  }
  for (int m : {2, 3}) {
    auto full = build_sft(Sft::Matrix(m, std::vector<int>(m, 1)));
    const ScalarPotential zero(KStepPotential::constant(full, 0.0));
    for (int n = 1; n <= 12; ++n) {
      const auto b = pressure_bracket(zero, n);
      CHECK(b.upper == doctest::Approx(std::log(m)).epsilon(1e-14));
      CHECK(b.lower <= std::log(m));
    }
  }
}

TEST_CASE("log partition sum against enumeration") {
  std::mt19937_64 rng(31);
  const Sft::Matrix a = {{1, 1, 0}, {1, 0, 1}, {1, 1, 1}};
  auto sft = build_sft(a);
  for (int k : {1, 2, 4}) {
    const ScalarPotential pot(random_kstep(sft, k, rng));
    for (int n : {1, 2, 5, 7}) {
      double s = 0.0;
      for (const Word& w : oracle::words(a, n)) {
        double best = -1e300;
        for (const Word& x : oracle::extensions(a, w, k - 1))
          best = std::max(best, oracle::kstep_sum([&](const Word& u) { return pot.kstep()->value(u); }, k, x, n));
        s += std::exp(best);
      }
      CHECK(log_partition_sum(pot, n) == doctest::Approx(std::log(s)).epsilon(1e-12));
    }
  }
}

TEST_CASE("cocycle bracket for the all-ones matrices") {
  for (int m : {2, 3}) {
    auto full = build_sft(Sft::Matrix(m, std::vector<int>(m, 1)));
    const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(2, 2);
    const ScalarPotential coc(MatrixCocyclePotential(full, std::vector<Eigen::MatrixXd>(m, ones)));
    // ‖M_w‖ = 2^{n+1}, so a_n = n log(2m) + log 2 exactly
    const double p = std::log(2.0 * m);
    for (int n : {1, 5, 10, 30})
      CHECK(log_partition_sum(coc, n) == doctest::Approx(n * p + std::log(2.0)).epsilon(1e-12));
    double prev = 1e300;
    for (int n : {5, 10, 20, 30, 60}) {
      const auto b = pressure_bracket(coc, n);
      CHECK(b.lower <= p);
      CHECK(p <= b.upper);
      CHECK(b.width() < prev);
      CHECK(b.width() * n <= 40.0);
      prev = b.width();
    }
    const PressureTerm t{1.0, &coc};
    CHECK(std::abs(pressure_extrapolated(std::span(&t, 1), 30) - p) <= 1e-2);
  }
}

TEST_CASE("pressure_combined examples") {
  for (int m : {2, 3}) {
    auto full = build_sft(Sft::Matrix(m, std::vector<int>(m, 1)));
    const ScalarPotential psi(KStepPotential::constant(full, -1.0));
    const ScalarPotential phi(KStepPotential::one_step(full, std::vector<double>(m, 0.7)));
    for (double lambda : {-1.0, 0.0, 0.5, 2.0}) {
      const PressureTerm terms[] = {{0.0, &phi}, {lambda, &psi}};
      const auto pv = pressure_combined(terms);
      CHECK(pv.exact);
      CHECK(pv.value == doctest::Approx(std::log(m) - lambda).epsilon(1e-12));
    }
  }
  auto full = build_sft({{1, 1}, {1, 1}});
  const ScalarPotential digit(KStepPotential::one_step(full, {0.0, 1.0}));
  const ScalarPotential half(KStepPotential::constant(full, -std::log(2.0)));
  const PressureTerm t1[] = {{1.0, &digit}, {0.0, &half}};
  CHECK(pressure_combined(t1).value == doctest::Approx(std::log(1 + std::exp(1.0))).epsilon(1e-13));

  std::mt19937_64 rng(17);
  auto golden = build_sft(kGolden);
  const ScalarPotential p1(random_kstep(golden, 1, rng));
  const ScalarPotential p2(random_kstep(golden, 2, rng));
  const PressureTerm t2[] = {{0.4, &p1}, {-1.3, &p2}};
  const KStepPotential merged = KStepPotential::from_function(golden, 2, 1, [&](WordView w, std::span<double> out) {
    out[0] = 0.4 * p1.kstep()->value(w.first(1)) - 1.3 * p2.kstep()->value(w);
  });
  CHECK(pressure_combined(t2).value == doctest::Approx(pressure_exact(merged)).epsilon(1e-12));
}

TEST_CASE("mixed cocycle combination brackets") {
  std::mt19937_64 rng(3);
  auto full = build_sft({{1, 1}, {1, 1}});
  Eigen::MatrixXd m0(2, 2), m1(2, 2);
  m0 << 1.0, 0.5, 0.3, 1.2;
  m1 << 0.7, 1.1, 0.9, 0.4;
  const ScalarPotential coc(MatrixCocyclePotential(full, {m0, m1}));
  const ScalarPotential digit(KStepPotential::one_step(full, {0.0, 1.0}));
  const PressureTerm terms[] = {{0.5, &coc}, {1.0, &digit}};
  const auto b10 = pressure_bracket(terms, 10);
  const auto b16 = pressure_bracket(terms, 16);
  CHECK(b10.lower <= b16.upper);
  CHECK(b16.lower <= b10.upper);
  CHECK(b16.width() < b10.width());
}

TEST_CASE("slope of the pressure lies in [Psi_min, Psi_max]") {
  std::mt19937_64 rng(99);
  auto sft = build_sft({{1, 1, 0}, {1, 1, 1}, {0, 1, 1}});
  const ScalarPotential phi(random_kstep(sft, 2, rng));
  const auto raw = random_kstep(sft, 2, rng, 0.5);
  const ScalarPotential psi(raw.shifted(-raw.max_value() - 0.2));
  std::uniform_real_distribution<double> lam(-3.0, 3.0);
  for (int i = 0; i < 20; ++i) {
    double l1 = lam(rng), l2 = lam(rng);
    if (l1 > l2) std::swap(l1, l2);
    const PressureTerm a[] = {{1.0, &phi}, {l1, &psi}};
    const PressureTerm b[] = {{1.0, &phi}, {l2, &psi}};
    const double diff = pressure_combined(b).value - pressure_combined(a).value;
    CHECK(diff >= psi.min_bound() * (l2 - l1) - 1e-8);
    CHECK(diff <= psi.max_bound() * (l2 - l1) + 1e-8);
  }
}

TEST_CASE("variational principle") {
  std::mt19937_64 rng(123);
  for (const Sft::Matrix& a : {Sft::Matrix{{1, 1}, {1, 1}}, kGolden, Sft::Matrix{{1, 1, 0}, {0, 1, 1}, {1, 1, 1}}}) {
    auto sft = build_sft(a);
    for (int k : {1, 2, 3}) {
      const auto pot = random_kstep(sft, k, rng);
      const double p = pressure_exact(pot);
      const MarkovMeasure eq = equilibrium_state(pot);
      CHECK(eq.entropy() + eq.potential_average(pot)[0] == doctest::Approx(p).epsilon(1e-9));
      for (int i = 0; i < 50; ++i) {
        const MarkovMeasure mu = MarkovMeasure::random(sft, 1 + i % 3, rng);
        CHECK(mu.entropy() + mu.potential_average(pot)[0] <= p + 1e-9);
      }
    }
  }
}
