#include "thermo/sft.hpp"

#include <limits>

#include "thermo/error.hpp"

namespace thermo {

namespace {

using BoolMatrix = std::vector<char>;

BoolMatrix bool_product(const BoolMatrix& x, const BoolMatrix& y, int m) {
  BoolMatrix out(static_cast<std::size_t>(m) * m, 0);
  for (int i = 0; i < m; ++i)
    for (int l = 0; l < m; ++l)
      if (x[i * m + l])
        for (int j = 0; j < m; ++j)
          if (y[l * m + j]) out[i * m + j] = 1;
  return out;
}

bool all_positive(const BoolMatrix& x) {
  for (char c : x)
    if (!c) return false;
  return true;
}

}  // namespace

std::string to_string(WordView w) {
  std::string out;
  bool wide = false;
  for (Symbol s : w) wide = wide || s >= 10;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (wide) {
      if (i) out += '.';
      out += std::to_string(w[i]);
    } else {
      out += static_cast<char>('0' + w[i]);
    }
  }
  return out;
}

Word parse_word(const std::string& digits) {
  Word w;
  for (char c : digits) {
    if (c < '0' || c > '9') throw ConfigError("bad symbol in word '" + digits + "'");
    w.push_back(static_cast<Symbol>(c - '0'));
  }
  return w;
}

Sft Sft::build(const Matrix& transitions, int p_cap) {
  const int m = static_cast<int>(transitions.size());
  if (m < 2) throw InvalidArgument("alphabet must have at least two symbols");
  if (m > 255) throw InvalidArgument("alphabet larger than 255 symbols");
  Sft sft;
  sft.m_ = m;
  sft.matrix_ = transitions;
  sft.a_.assign(static_cast<std::size_t>(m) * m, 0);
  for (int i = 0; i < m; ++i) {
    if (static_cast<int>(transitions[i].size()) != m)
      throw InvalidArgument("transition matrix is not square");
    for (int j = 0; j < m; ++j) {
      const int v = transitions[i][j];
      if (v != 0 && v != 1) throw InvalidArgument("transition matrix entries must be 0 or 1");
      sft.a_[i * m + j] = static_cast<char>(v);
    }
  }
  for (int i = 0; i < m; ++i) {
    bool row = false, col = false;
    for (int j = 0; j < m; ++j) {
      row = row || sft.a_[i * m + j];
      col = col || sft.a_[j * m + i];
    }
    if (!row || !col)
      throw DegenerateRow("symbol " + std::to_string(i) + " has an empty row or column");
  }
  sft.successors_.resize(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (sft.a_[i * m + j]) sft.successors_[i].push_back(static_cast<Symbol>(j));

  const int cap = p_cap > 0 ? p_cap : (m - 1) * (m - 1) + 1;
  // powers[r] = boolean A^r, r = 0..p0+1
  std::vector<BoolMatrix> powers;
  BoolMatrix identity(static_cast<std::size_t>(m) * m, 0);
  for (int i = 0; i < m; ++i) identity[i * m + i] = 1;
  powers.push_back(identity);
  powers.push_back(sft.a_);
  int p0 = all_positive(sft.a_) ? 1 : 0;
  while (p0 == 0) {
    if (static_cast<int>(powers.size()) > cap)
      throw NotPrimitive("no power A^p with p <= " + std::to_string(cap) + " is positive");
    powers.push_back(bool_product(powers.back(), sft.a_, m));
    if (all_positive(powers.back())) p0 = static_cast<int>(powers.size()) - 1;
  }
  sft.p0_ = p0;
  while (static_cast<int>(powers.size()) <= p0 + 1)
    powers.push_back(bool_product(powers.back(), sft.a_, m));

  // Greedy lexicographic bridge: at each step take the smallest symbol that can
  // still reach j in exactly the remaining number of steps.
  sft.bridges_.resize(static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      Word w;
      int prev = i;
      for (int t = 1; t <= p0; ++t) {
        const int remaining = p0 + 1 - t;
        for (Symbol s : sft.successors_[prev]) {
          if (powers[remaining][s * m + j]) {
            w.push_back(s);
            prev = s;
            break;
          }
        }
      }
      sft.bridges_[i * m + j] = std::move(w);
    }
  }
  return sft;
}

Sft Sft::full_shift(int m) {
  return build(Matrix(static_cast<std::size_t>(m), std::vector<int>(static_cast<std::size_t>(m), 1)));
}

bool Sft::admissible(WordView w) const {
  for (Symbol s : w)
    if (s >= m_) return false;
  for (std::size_t t = 1; t < w.size(); ++t)
    if (!allowed(w[t - 1], w[t])) return false;
  return true;
}

bool Sft::is_full_shift() const {
  for (char c : a_)
    if (!c) return false;
  return true;
}

std::uint64_t Sft::count_words(int n) const {
  if (n <= 0) return 1;
  std::vector<std::uint64_t> ending(m_, 1), next(m_);
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  for (int len = 1; len < n; ++len) {
    std::fill(next.begin(), next.end(), 0);
    for (int a = 0; a < m_; ++a)
      for (Symbol b : successors_[a]) {
        if (next[b] > kMax - ending[a]) throw TableTooLarge("word count overflows 64 bits");
        next[b] += ending[a];
      }
    ending.swap(next);
  }
  std::uint64_t total = 0;
  for (auto c : ending) {
    if (total > kMax - c) throw TableTooLarge("word count overflows 64 bits");
    total += c;
  }
  return total;
}

void Sft::extend_min(Word& w, std::size_t length) const {
  if (w.empty() && length > 0) w.push_back(0);
  while (w.size() < length) w.push_back(successors_[w.back()].front());
}

WordEnumerator::iterator::iterator(const Sft* sft, int n) : sft_(sft), done_(false) {
  if (n > 0) sft_->extend_min(word_, static_cast<std::size_t>(n));
}

WordEnumerator::iterator& WordEnumerator::iterator::operator++() {
  // Odometer: bump the last position that has a larger admissible choice, then
  // refill the tail with the smallest extension.
  for (std::size_t pos = word_.size(); pos-- > 0;) {
    const Symbol cur = word_[pos];
    int next = -1;
    if (pos == 0) {
      if (cur + 1 < sft_->alphabet_size()) next = cur + 1;
    } else {
      for (Symbol s : sft_->successors(word_[pos - 1]))
        if (s > cur) {
          next = s;
          break;
        }
    }
    if (next >= 0) {
      const std::size_t n = word_.size();
      word_.resize(pos);
      word_.push_back(static_cast<Symbol>(next));
      sft_->extend_min(word_, n);
      return *this;
    }
  }
  done_ = true;
  return *this;
}

}  // namespace thermo
