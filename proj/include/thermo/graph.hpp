#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "thermo/sft.hpp"

namespace thermo {

// Dense index of the admissible words of a fixed length, in lexicographic order.
// A word's code is its base-m value with the first symbol most significant.
class WordIndex {
 public:
  static constexpr std::uint64_t kMaxCodes = std::uint64_t{1} << 26;

  WordIndex(const Sft& sft, int length);

  int length() const { return length_; }
  std::size_t size() const { return codes_.size(); }
  std::uint64_t code_space() const { return lookup_.size(); }
  std::uint64_t code_of(std::size_t index) const { return codes_[index]; }
  std::int64_t index_of_code(std::uint64_t code) const { return lookup_[code]; }
  std::int64_t index_of(WordView w) const;
  Word word(std::size_t index) const;

 private:
  int m_;
  int length_;
  std::vector<std::uint64_t> codes_;
  std::vector<std::int64_t> lookup_;
};

std::uint64_t word_code(WordView w, int m);

// States are the admissible words of length s; edges are the admissible words of
// length s+1, running from their length-s prefix to their length-s suffix.
// Out-edges of a state are contiguous in edge order.
class DeBruijnGraph {
 public:
  DeBruijnGraph(SftPtr sft, int state_length);

  const Sft& sft() const { return *sft_; }
  const SftPtr& sft_ptr() const { return sft_; }
  int state_length() const { return states_.length(); }
  const WordIndex& states() const { return states_; }
  const WordIndex& edges() const { return edges_; }
  std::size_t state_count() const { return states_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::size_t edge_source(std::size_t e) const { return source_[e]; }
  std::size_t edge_target(std::size_t e) const { return target_[e]; }
  Symbol edge_symbol(std::size_t e) const { return last_[e]; }
  std::size_t out_begin(std::size_t state) const { return out_offset_[state]; }
  std::size_t out_end(std::size_t state) const { return out_offset_[state + 1]; }
  Word edge_word(std::size_t e) const { return edges_.word(e); }
  // Edge leaving `state` by appending `s`, or -1.
  std::int64_t edge_from(std::size_t state, Symbol s) const;

 private:
  SftPtr sft_;
  WordIndex states_;
  WordIndex edges_;
  std::vector<std::size_t> source_, target_, out_offset_;
  std::vector<Symbol> last_;
};

using GraphPtr = std::shared_ptr<const DeBruijnGraph>;

}  // namespace thermo
