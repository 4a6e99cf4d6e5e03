#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "thermo/measures.hpp"

using namespace thermo;

namespace {
const Sft::Matrix kGolden = {{1, 1}, {1, 0}};
const double kPhi = (1 + std::sqrt(5.0)) / 2;
}  // namespace

TEST_CASE("entropy examples") {
  auto full = build_sft({{1, 1}, {1, 1}});
  CHECK(parry_measure(full).entropy() == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(MarkovMeasure::bernoulli(full, {0.25, 0.75}).entropy() == doctest::Approx(0.562335144618).epsilon(1e-11));
  CHECK(MarkovMeasure::periodic(full, Word{0, 1, 1}).entropy() == doctest::Approx(0.0));
  CHECK(MarkovMeasure::periodic(full, Word{0, 1, 1}, 3).entropy() == doctest::Approx(0.0));
}

TEST_CASE("potential_average examples") {
  auto full = build_sft({{1, 1}, {1, 1}});
  const auto digit = KStepPotential::one_step(full, {0.0, 1.0});
  for (double p : {0.1, 0.5, 0.8})
    CHECK(MarkovMeasure::bernoulli(full, {1 - p, p}).potential_average(digit)[0] == doctest::Approx(p));
  const auto half = KStepPotential::constant(full, -std::log(2.0));
  std::mt19937_64 rng(8);
  for (int i = 0; i < 5; ++i)
    CHECK(MarkovMeasure::random(full, 1 + i, rng).potential_average(half)[0] ==
          doctest::Approx(-std::log(2.0)).epsilon(1e-12));

  // pair count "01" under the golden-mean Parry measure, checked by simulation
  auto golden = build_sft(kGolden);
  const auto pair = KStepPotential::from_function(golden, 2, 1, [](WordView w, std::span<double> out) {
    out[0] = (w[0] == 0 && w[1] == 1) ? 1.0 : 0.0;
  });
  const MarkovMeasure parry = parry_measure(golden);
  std::mt19937_64 sim(2);
  const Word path = parry.sample(1'000'001, sim);
  double hits = 0.0;
  for (std::size_t t = 0; t + 1 < path.size(); ++t) hits += (path[t] == 0 && path[t + 1] == 1) ? 1.0 : 0.0;
  CHECK(std::abs(parry.potential_average(pair)[0] - hits / 1e6) < 1e-2);
  // closed form: π(0) P(0→1) = (φ²/(1+φ²))·(1/φ²)
  CHECK(parry.potential_average(pair)[0] == doctest::Approx(1.0 / (1.0 + kPhi * kPhi)).epsilon(1e-12));
}

TEST_CASE("order mismatch lifts the measure") {
  std::mt19937_64 rng(6);
  auto golden = build_sft(kGolden);
  const MarkovMeasure mu = MarkovMeasure::random(golden, 1, rng);
  const auto g3 = KStepPotential::from_function(golden, 3, 1, [](WordView w, std::span<double> out) {
    out[0] = w[0] + 10.0 * w[2];
  });
  // Φ_*(μ) by cylinder masses
  double expect = 0.0;
  for (const Word& w : golden->words(3)) expect += mu.cylinder_mass(w) * g3.value(w);
  CHECK(mu.potential_average(g3)[0] == doctest::Approx(expect).epsilon(1e-12));
  const MarkovMeasure lifted = mu.lifted(3);
  CHECK(lifted.entropy() == doctest::Approx(mu.entropy()).epsilon(1e-12));
  for (const Word& w : golden->words(5)) CHECK(lifted.cylinder_mass(w) == doctest::Approx(mu.cylinder_mass(w)));
}

TEST_CASE("equilibrium_state examples") {
  auto full = build_sft({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}});
  const MarkovMeasure parry = equilibrium_state(KStepPotential::constant(full, 0.0));
  CHECK(parry.entropy() == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  const std::vector<double> p = {0.2, 0.5, 0.3};
  const MarkovMeasure bern =
      equilibrium_state(KStepPotential::one_step(full, {std::log(p[0]), std::log(p[1]), std::log(p[2])}));
  for (std::size_t e = 0; e < bern.graph().edge_count(); ++e)
    CHECK(bern.transition(e) == doctest::Approx(p[bern.graph().edge_symbol(e)]).epsilon(1e-12));
  auto golden = build_sft(kGolden);
  const MarkovMeasure gm = parry_measure(golden);
  CHECK(gm.entropy() == doctest::Approx(std::log(kPhi)).epsilon(1e-12));
}

TEST_CASE("measure invariants") {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 12; ++trial) {
    const auto a = oracle::random_mixing_matrix(2 + trial % 3, rng);
    auto sft = build_sft(a);
    std::normal_distribution<double> gauss;
    const auto pot = KStepPotential::from_function(sft, 1 + trial % 3, 1,
                                                   [&](WordView, std::span<double> out) { out[0] = gauss(rng); });
    for (const MarkovMeasure& mu :
         {equilibrium_state(pot), MarkovMeasure::random(sft, 1 + trial % 2, rng), parry_measure(sft)}) {
      CHECK(mu.max_row_error() <= 1e-12);
      CHECK(mu.stationarity_error() <= 1e-10);
      // support respects admissibility and masses are consistent
      for (int n = 1; n <= 4; ++n) {
        double total = 0.0;
        for (const Word& w : sft->words(n)) total += mu.cylinder_mass(w);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("Gibbs property: mass ratio bounded uniformly in length") {
  std::mt19937_64 rng(19);
  auto sft = build_sft({{1, 1, 0}, {1, 1, 1}, {1, 0, 1}});
  std::normal_distribution<double> gauss;
  const auto pot =
      KStepPotential::from_function(sft, 2, 1, [&](WordView, std::span<double> out) { out[0] = gauss(rng); });
  const double p = pressure_exact(pot);
  const MarkovMeasure mu = equilibrium_state(pot);
  auto spread = [&](int n) {
    double lo = 1e300, hi = -1e300;
    for (const Word& w : sft->words(n)) {
      const double r = std::log(mu.cylinder_mass(w)) - (pot.range(w).hi - n * p);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    return std::pair{lo, hi};
  };
  const auto s4 = spread(4);
  for (int n = 5; n <= 12; ++n) {
    const auto s = spread(n);
    CHECK(s.first >= s4.first - 1e-9);
    CHECK(s.second <= s4.second + 1e-9);
  }
}

TEST_CASE("lphi_affine_dim examples") {
  auto full = build_sft({{1, 1}, {1, 1}});
  const auto pairpot = KStepPotential::from_function(full, 1, 2, [](WordView w, std::span<double> out) {
    out[0] = w[0];
    out[1] = 1.0 - w[0];
  });
  CHECK(lphi_affine_dim(PotentialBundle(pairpot), 30) == 1);
  auto full4 = build_sft(Sft::Matrix(4, std::vector<int>(4, 1)));
  const auto coords = KStepPotential::from_function(full4, 1, 2, [](WordView w, std::span<double> out) {
    out[0] = w[0] % 2;
    out[1] = w[0] / 2;
  });
  CHECK(lphi_affine_dim(PotentialBundle(coords), 30) == 2);
  CHECK(lphi_affine_dim(PotentialBundle({ScalarPotential(KStepPotential::constant(full, 0.3))}), 30) == 0);
}

TEST_CASE("cycles") {
  auto golden = build_sft(kGolden);
  const auto cycles = admissible_cycles(*golden, 4);
  // primitive necklaces of the golden mean shift up to length 4: 0, 01, 001, 0001, 0101? (not primitive)
  std::vector<std::string> names;
  for (const Word& c : cycles) names.push_back(to_string(c));
  CHECK(names == std::vector<std::string>{"0", "01", "001", "0001"});
  const auto digit = KStepPotential::one_step(golden, {0.0, 1.0});
  CHECK(periodic_average(digit, Word{0, 1})[0] == doctest::Approx(0.5));
  CHECK(MarkovMeasure::periodic(golden, Word{0, 0, 1}).potential_average(digit)[0] == doctest::Approx(1.0 / 3));
}
