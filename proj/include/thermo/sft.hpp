#pragma once

#include <cstdint>
#include <iterator>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace thermo {

// Symbols are 0-based: the alphabet of an m-symbol shift is {0, ..., m-1}.
using Symbol = std::uint8_t;
using Word = std::vector<Symbol>;
using WordView = std::span<const Symbol>;

std::string to_string(WordView w);
Word parse_word(const std::string& digits);

class Sft;

// Streaming lexicographic enumeration of the admissible words of one length.
class WordEnumerator {
 public:
  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = Word;
    using difference_type = std::ptrdiff_t;
    using pointer = const Word*;
    using reference = const Word&;

    iterator() = default;
    reference operator*() const { return word_; }
    pointer operator->() const { return &word_; }
    iterator& operator++();
    void operator++(int) { ++*this; }
    bool operator==(const iterator& other) const { return done_ == other.done_; }

   private:
    friend class WordEnumerator;
    iterator(const Sft* sft, int n);
    const Sft* sft_ = nullptr;
    Word word_;
    bool done_ = true;
  };

  WordEnumerator(const Sft& sft, int n) : sft_(&sft), n_(n) {}
  iterator begin() const { return iterator(sft_, n_); }
  iterator end() const { return iterator(); }

 private:
  const Sft* sft_;
  int n_;
};

// A topologically mixing one-sided subshift of finite type.
class Sft {
 public:
  using Matrix = std::vector<std::vector<int>>;

  // p_cap <= 0 selects the Wielandt bound (m-1)^2 + 1.
  static Sft build(const Matrix& transitions, int p_cap = 0);
  static Sft full_shift(int m);

  int alphabet_size() const { return m_; }
  bool allowed(Symbol a, Symbol b) const { return a_[a * m_ + b] != 0; }
  const Matrix& matrix() const { return matrix_; }
  std::span<const Symbol> successors(Symbol a) const { return successors_[a]; }

  int primitivity_exponent() const { return p0_; }
  // Lexicographically smallest w of length p0 with i.w.j admissible.
  const Word& bridge(Symbol i, Symbol j) const { return bridges_[i * m_ + j]; }

  bool admissible(WordView w) const;
  bool is_full_shift() const;
  // Exact #Σ_{A,n}; throws TableTooLarge on 64-bit overflow.
  std::uint64_t count_words(int n) const;
  WordEnumerator words(int n) const { return WordEnumerator(*this, n); }

  // Appends symbols greedily (smallest admissible successor) until |w| == length.
  void extend_min(Word& w, std::size_t length) const;

  bool operator==(const Sft& other) const { return matrix_ == other.matrix_; }

 private:
  Sft() = default;
  int m_ = 0;
  int p0_ = 0;
  Matrix matrix_;
  std::vector<char> a_;
  std::vector<std::vector<Symbol>> successors_;
  std::vector<Word> bridges_;
};

using SftPtr = std::shared_ptr<const Sft>;

inline SftPtr build_sft(const Sft::Matrix& transitions, int p_cap = 0) {
  return std::make_shared<const Sft>(Sft::build(transitions, p_cap));
}

}  // namespace thermo
