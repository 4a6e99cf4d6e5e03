#include "thermo/graph.hpp"

#include "thermo/error.hpp"

namespace thermo {

std::uint64_t word_code(WordView w, int m) {
  std::uint64_t code = 0;
  for (Symbol s : w) code = code * static_cast<std::uint64_t>(m) + s;
  return code;
}

WordIndex::WordIndex(const Sft& sft, int length) : m_(sft.alphabet_size()), length_(length) {
  std::uint64_t space = 1;
  for (int i = 0; i < length; ++i) {
    space *= static_cast<std::uint64_t>(m_);
    if (space > kMaxCodes)
      throw TableTooLarge("word table of length " + std::to_string(length) + " exceeds 2^26 codes");
  }
  lookup_.assign(space, -1);
  for (const Word& w : sft.words(length)) {
    const auto code = word_code(w, m_);
    lookup_[code] = static_cast<std::int64_t>(codes_.size());
    codes_.push_back(code);
  }
}

std::int64_t WordIndex::index_of(WordView w) const {
  if (static_cast<int>(w.size()) != length_) return -1;
  for (Symbol s : w)
    if (s >= m_) return -1;
  return lookup_[word_code(w, m_)];
}

Word WordIndex::word(std::size_t index) const {
  Word w(static_cast<std::size_t>(length_));
  auto code = codes_[index];
  for (int i = length_; i-- > 0;) {
    w[i] = static_cast<Symbol>(code % m_);
    code /= m_;
  }
  return w;
}

DeBruijnGraph::DeBruijnGraph(SftPtr sft, int state_length)
    : sft_(std::move(sft)),
      states_(*sft_, state_length < 1 ? throw InvalidArgument("state length must be >= 1") : state_length),
      edges_(*sft_, state_length + 1) {
  const auto m = static_cast<std::uint64_t>(sft_->alphabet_size());
  const std::uint64_t suffix_space = states_.code_space();
  source_.resize(edges_.size());
  target_.resize(edges_.size());
  last_.resize(edges_.size());
  out_offset_.assign(states_.size() + 1, 0);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto code = edges_.code_of(e);
    source_[e] = static_cast<std::size_t>(states_.index_of_code(code / m));
    target_[e] = static_cast<std::size_t>(states_.index_of_code(code % suffix_space));
    last_[e] = static_cast<Symbol>(code % m);
    ++out_offset_[source_[e] + 1];
  }
  for (std::size_t i = 0; i < states_.size(); ++i) out_offset_[i + 1] += out_offset_[i];
}

std::int64_t DeBruijnGraph::edge_from(std::size_t state, Symbol s) const {
  for (std::size_t e = out_begin(state); e < out_end(state); ++e)
    if (last_[e] == s) return static_cast<std::int64_t>(e);
  return -1;
}

}  // namespace thermo
