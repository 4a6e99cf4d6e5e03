#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "thermo/error.hpp"
#include "thermo/graph.hpp"
#include "thermo/sft.hpp"

using namespace thermo;

namespace {
const Sft::Matrix kGolden = {{1, 1}, {1, 0}};
}

TEST_CASE("build_sft primitivity exponent") {
  CHECK(Sft::build({{1, 1}, {1, 1}}).primitivity_exponent() == 1);
  CHECK(Sft::build(kGolden).primitivity_exponent() == 2);
  CHECK_THROWS_AS(Sft::build({{1, 1}, {0, 0}}), DegenerateRow);
  CHECK_THROWS_AS(Sft::build({{0, 1}, {1, 0}}), NotPrimitive);
  CHECK_THROWS_AS(Sft::build({{1, 2}, {1, 1}}), InvalidArgument);
  CHECK_THROWS_AS(Sft::build({{1}}), InvalidArgument);
  // the cap is honoured
  CHECK_THROWS_AS(Sft::build(kGolden, 1), NotPrimitive);
}

TEST_CASE("A^(p0-1) has a zero entry") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 2 + trial % 3;
    const auto a = oracle::random_mixing_matrix(m, rng);
    const Sft sft = Sft::build(a);
    const int p0 = sft.primitivity_exponent();
    if (p0 == 1) continue;
    // count paths of length p0-1 between every pair by brute force
    bool has_zero = false;
    for (int i = 0; i < m && !has_zero; ++i)
      for (int j = 0; j < m && !has_zero; ++j) {
        bool reach = false;
        for (const Word& w : oracle::words(a, p0 - 1 + 1))
          if (w.front() == i && w.back() == j) reach = true;
        has_zero = !reach;
      }
    CHECK(has_zero);
  }
}

TEST_CASE("admissible word counts") {
  CHECK(Sft::full_shift(2).count_words(3) == 8);
  const Sft golden = Sft::build(kGolden);
  CHECK(golden.count_words(3) == 5);
  CHECK(golden.count_words(0) == 1);
  int seen = 0;
  for (const Word& w : golden.words(0)) {
    CHECK(w.empty());
    ++seen;
  }
  CHECK(seen == 1);
}

TEST_CASE("enumeration matches brute force and is lexicographic") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 8; ++trial) {
    const int m = 2 + trial % 3;
    const auto a = oracle::random_mixing_matrix(m, rng);
    const Sft sft = Sft::build(a);
    for (int n = 0; n <= (m == 4 ? 6 : 10); ++n) {
      const auto expect = n == 0 ? std::vector<Word>{Word{}} : oracle::words(a, n);
      std::vector<Word> got;
      for (const Word& w : sft.words(n)) got.push_back(w);
      CHECK(got == expect);
      CHECK(sft.count_words(n) == expect.size());
    }
  }
}

TEST_CASE("bridges") {
  const Sft full = Sft::full_shift(2);
  CHECK(full.bridge(0, 1) == Word{0});
  const Sft golden = Sft::build(kGolden);
  CHECK(golden.bridge(1, 1) == Word{0, 0});
  CHECK(golden.bridge(0, 0) == Word{0, 0});
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 2 + trial % 4;
    const auto a = oracle::random_mixing_matrix(m, rng);
    const Sft sft = Sft::build(a);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const Word& b = sft.bridge(static_cast<Symbol>(i), static_cast<Symbol>(j));
        REQUIRE(static_cast<int>(b.size()) == sft.primitivity_exponent());
        Word full_word{static_cast<Symbol>(i)};
        full_word.insert(full_word.end(), b.begin(), b.end());
        full_word.push_back(static_cast<Symbol>(j));
        CHECK(oracle::admissible(a, full_word));
        // smallest among all valid candidates
        for (const Word& c : oracle::words(a, sft.primitivity_exponent())) {
          Word x{static_cast<Symbol>(i)};
          x.insert(x.end(), c.begin(), c.end());
          x.push_back(static_cast<Symbol>(j));
          if (oracle::admissible(a, x)) {
            CHECK(b <= c);
            break;
          }
        }
      }
  }
}

TEST_CASE("factor closure") {
  std::mt19937_64 rng(5);
  const auto a = oracle::random_mixing_matrix(3, rng);
  const Sft sft = Sft::build(a);
  for (int n = 1; n <= 5; ++n)
    for (int p = 0; p <= 3; ++p)
      for (const Word& w : sft.words(n + p)) CHECK(sft.admissible(WordView(w).first(n)));
}

TEST_CASE("extend_min") {
  const Sft golden = Sft::build(kGolden);
  Word w{1};
  golden.extend_min(w, 4);
  CHECK(w == Word{1, 0, 0, 0});
  Word e;
  golden.extend_min(e, 2);
  CHECK(e == Word{0, 0});
}

TEST_CASE("word index and de Bruijn graph") {
  auto sft = build_sft(kGolden);
  const DeBruijnGraph g(sft, 2);
  CHECK(g.state_count() == 3);
  CHECK(g.edge_count() == 5);
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const Word w = g.edge_word(e);
    CHECK(g.states().word(g.edge_source(e)) == Word(w.begin(), w.begin() + 2));
    CHECK(g.states().word(g.edge_target(e)) == Word(w.begin() + 1, w.end()));
    CHECK(g.edge_symbol(e) == w.back());
  }
  CHECK(g.states().index_of(Word{1, 1}) == -1);
  CHECK(parse_word("0101") == Word{0, 1, 0, 1});
  CHECK(to_string(Word{1, 0}) == "10");
}
