#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coarselab/errors.hpp"

namespace coarse {

// Letters are signed 1-based generator indices: +k is generator k-1,
// -k its formal inverse. 0 is not a letter.

inline int inverse_letter(int letter) { return -letter; }

/// Rank used for all deterministic letter orderings: a < a^-1 < b < b^-1 < ...
inline int letter_rank(int letter) {
  int g = letter > 0 ? letter : -letter;
  return 2 * (g - 1) + (letter < 0 ? 1 : 0);
}

inline bool letter_less(int a, int b) { return letter_rank(a) < letter_rank(b); }

/// A word in the free group: a sequence of signed generator indices.
class Word {
 public:
  Word() = default;
  explicit Word(std::vector<int> letters);

  const std::vector<int>& letters() const noexcept { return letters_; }
  std::size_t size() const noexcept { return letters_.size(); }
  bool empty() const noexcept { return letters_.empty(); }
  int at(std::size_t i) const { return letters_.at(i); }

  bool is_freely_reduced() const noexcept;
  bool is_cyclically_reduced() const noexcept;

  Word inverse() const;
  Word prefix(std::size_t len) const;
  Word appended(int letter) const;

  bool operator==(const Word&) const = default;

 private:
  std::vector<int> letters_;
};

Word operator*(const Word& a, const Word& b);  // concatenation, no reduction

bool lex_less(const Word& a, const Word& b);       // by letter_rank
bool shortlex_less(const Word& a, const Word& b);  // length first, then lex

Word free_reduce(const Word& w);
Word cyclic_reduce(const Word& w);

/// All rotations of r and of r^-1, deduplicated and sorted lexicographically.
std::vector<Word> cyclic_conjugates(const Word& r);

/// Ordered, distinct generator symbols. Order is load-bearing: BFS and all
/// lexicographic enumerations derive their determinism from it.
class GeneratorSet {
 public:
  explicit GeneratorSet(std::vector<std::string> names);

  std::size_t size() const noexcept { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  /// Text for a single letter, e.g. "a" or "a^-1".
  std::string letter_text(int letter) const;

  /// Signed letters in rank order: g1, g1^-1, g2, g2^-1, ...
  std::vector<int> alphabet() const;

  bool operator==(const GeneratorSet&) const = default;

 private:
  std::vector<std::string> names_;
};

class Presentation {
 public:
  /// Relators are freely and cyclically reduced on construction; a relator
  /// that reduces to the empty word is rejected.
  Presentation(GeneratorSet generators, std::vector<Word> relators);

  const GeneratorSet& generators() const noexcept { return generators_; }
  const std::vector<Word>& relators() const noexcept { return relators_; }

  std::string render() const;

  bool operator==(const Presentation&) const = default;

 private:
  GeneratorSet generators_;
  std::vector<Word> relators_;
};

/// Grammar: "<" gens "|" relators ">", gens a comma list of identifiers,
/// relators a comma list of words, a word a concatenation of `name` or
/// `name^k` atoms. Whitespace is insignificant outside identifiers.
Presentation parse_presentation(const std::string& text);

/// Inverse of parse for a single word; exponent runs are collapsed.
std::string render_word(const GeneratorSet& gens, const Word& w);

/// Parse a single word over the given generators (same atom grammar).
Word parse_word(const GeneratorSet& gens, const std::string& text);

std::size_t max_relator_length(const Presentation& p);

}  // namespace coarse
