#ifndef OBD_DIAGRAM_HPP
#define OBD_DIAGRAM_HPP

#include <optional>
#include <string>
#include <vector>

#include "obd/error.hpp"
#include "obd/words.hpp"

namespace obd {

/// Total map from the letters of one level to nonempty words over the
/// previous level; images[v] is read left to right in edge order.
struct LevelMorphism {
  std::vector<Word> images;

  int size() const { return static_cast<int>(images.size()); }
  const Word& image(Sym v) const { return images[static_cast<size_t>(v)]; }
  bool operator==(const LevelMorphism&) const = default;
};

/// Beyond the explicit top level L, level n repeats level
/// start + ((n - start) mod period), with letters relabelled.
struct Tail {
  int start = 1;
  int period = 1;
  bool operator==(const Tail&) const = default;
};

/// An ordered Bratteli diagram, encoded as its morphism reading: level
/// alphabets V_0..V_L with V_0 = {@}, one LevelMorphism per level, and
/// an optional periodic tail. The edge order is the left-to-right order
/// of the image words.
class Diagram {
 public:
  Diagram();

  /// Appends level L+1 with its alphabet and morphism into level L.
  void add_level(std::vector<std::string> names, LevelMorphism m);

  /// Declares the periodic tail; requires 1 <= start, period >= 1,
  /// start + period <= L + 1 and matching alphabet sizes at the wrap.
  void set_tail(Tail t);

  int top_level() const { return static_cast<int>(morphisms_.size()); }
  const std::optional<Tail>& tail() const { return tail_; }

  bool representable(int n) const;
  /// The explicit level whose data backs level n.
  int ref_level(int n) const;

  int alphabet_size(int n) const;
  const std::vector<std::string>& level_names(int n) const;
  const std::string& letter_name(int n, Sym v) const;
  /// Index of a named letter at a level, or -1.
  Sym letter_index(int n, const std::string& name) const;

  /// Morphism at any representable level n >= 1.
  const LevelMorphism& morphism(int n) const;

  bool operator==(const Diagram&) const = default;

 private:
  std::vector<std::vector<std::string>> alphabets_;  // [0] = {"@"}
  std::vector<LevelMorphism> morphisms_;             // [n-1] = level n
  std::optional<Tail> tail_;
};

struct Violation {
  int level = 0;
  std::string subject;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

/// Checks every level invariant (nonempty images, no unused letter) on
/// the explicit prefix; empty report iff valid.
ValidationReport validate_diagram(const Diagram& d);

/// sigma_{[i,j]}: V_j -> V_i^*, the identity when i == j.
LevelMorphism compose_morphisms(const Diagram& d, int i, int j);

struct IncidenceMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<unsigned long long> entries;  // row-major

  static IncidenceMatrix zero(int r, int c);
  unsigned long long at(int r, int c) const {
    return entries[static_cast<size_t>(r) * static_cast<size_t>(cols) + static_cast<size_t>(c)];
  }
  unsigned long long& at(int r, int c) {
    return entries[static_cast<size_t>(r) * static_cast<size_t>(cols) + static_cast<size_t>(c)];
  }
  bool positive() const;
  bool operator==(const IncidenceMatrix&) const = default;
};

/// A_n, the |V_n| x |V_{n-1}| occurrence-count matrix.
IncidenceMatrix incidence_matrix(const Diagram& d, int n);

/// a * b with overflow checking.
IncidenceMatrix matrix_product(const IncidenceMatrix& a, const IncidenceMatrix& b);

/// A_j x A_{j-1} x ... x A_{i+1}; identity when i == j.
IncidenceMatrix incidence_product(const Diagram& d, int i, int j);

/// Structural equality of the unrolled level sequences (names ignored).
/// Periodic representations are compared over one common period beyond
/// both prefixes.
bool equal_unrolled(const Diagram& a, const Diagram& b);

struct DiagramDiff {
  bool equal = true;
  int level = 0;
  std::string subject;
  std::string expected;
  std::string actual;
};
DiagramDiff diff_unrolled(const Diagram& a, const Diagram& b);

/// Renders a word over level n-1 of d as space-separated letter names.
std::string render_word(const Diagram& d, int level_of_letters, const Word& w);

Diagram parse_obd(const std::string& text, const std::string& source = "<obd>");
Diagram load_obd(const std::string& path);
std::string emit_obd(const Diagram& d);
void save_obd(const Diagram& d, const std::string& path);

}  // namespace obd

#endif
