#ifndef OBD_WORDS_HPP
#define OBD_WORDS_HPP

#include <optional>
#include <utility>
#include <vector>

#include "obd/error.hpp"

namespace obd {

/// A letter is an index into the alphabet of one diagram level.
using Sym = int;

/// A word over one alphabet. Concatenation is vector concatenation.
using Word = std::vector<Sym>;

Word concat(const Word& a, const Word& b);

/// True iff w_i = w_{i+p} for every valid i. Vacuously true when p >= |w|.
bool has_period(const Word& w, int p);

/// Finite set of nonempty, pairwise distinct words over one alphabet.
/// Insertion order is preserved; duplicates are dropped on insert.
class Code {
 public:
  Code() = default;
  explicit Code(std::vector<Word> words);

  /// Inserts unless already present; returns true if inserted.
  bool add(Word w);

  bool contains(const Word& w) const { return index_of(w) >= 0; }
  int index_of(const Word& w) const;

  const std::vector<Word>& words() const { return words_; }
  const Word& operator[](int i) const { return words_[static_cast<size_t>(i)]; }
  int size() const { return static_cast<int>(words_.size()); }
  bool empty() const { return words_.empty(); }

  bool operator==(const Code& other) const { return words_ == other.words_; }

 private:
  std::vector<Word> words_;
};

/// A factorization of a word over a code, as a sequence of code indices.
using Factorization = std::vector<int>;

Word expand(const Code& c, const Factorization& f);

/// Periodicity reduction: if every p in `periods` is a period of w
/// (verified; PeriodViolation otherwise) and |w| >= sum(p) - gcd(p),
/// returns gcd(p). Returns nullopt when the length hypothesis fails.
std::optional<int> fine_wilf_reduce(const Word& w, const std::vector<int>& periods);

/// Generating set of cardinality <= 3 for the cut pairs of a doubly
/// anchored word: w = s_i t_i with every s_i a suffix of s and every
/// t_i a prefix of t, |s|,|t| >= |w|. Preconditions are verified and
/// reported via HypothesisViolation.
Code three_word_basis(const Word& w, const std::vector<std::pair<Word, Word>>& pairs,
                      const Word& s, const Word& t);

struct IndependenceResult {
  bool independent = true;
  // On failure: a word with two distinct factorizations over the code.
  Word witness;
  Factorization parse_a;
  Factorization parse_b;
};

/// Unique-decipherability test by the dangling-suffix fixpoint.
IndependenceResult is_independent(const Code& c);

enum class FactorizeMode {
  Unique,  // the sole factorization, or none; requires an independent code
  Greedy,  // leftmost-longest with backtracking; deterministic
  All,     // every factorization
};

/// Factorizations of w over c. Unique/Greedy yield zero or one entry.
std::vector<Factorization> factorize(const Word& w, const Code& c, FactorizeMode mode);

/// Inclusion-minimal subset of c over which every target still has a
/// factorization. Throws Ungenerated if some target has none over c.
Code minimal_generating_subset(const Code& c, const std::vector<Word>& targets);

}  // namespace obd

#endif
