#include "obd/diagram.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "textio.hpp"

namespace obd {

namespace {

// Composed words and counts stay within a budget so a runaway depth
// fails loudly instead of exhausting memory.
constexpr size_t kComposeLetterBudget = 1u << 26;

unsigned long long checked_add(unsigned long long a, unsigned long long b) {
  unsigned long long r;
  if (__builtin_add_overflow(a, b, &r)) throw Error(Errc::Overflow, "count overflow");
  return r;
}

unsigned long long checked_mul(unsigned long long a, unsigned long long b) {
  unsigned long long r;
  if (__builtin_mul_overflow(a, b, &r)) throw Error(Errc::Overflow, "count overflow");
  return r;
}

}  // namespace

Diagram::Diagram() { alphabets_.push_back({"@"}); }

void Diagram::add_level(std::vector<std::string> names, LevelMorphism m) {
  if (names.empty()) throw Error(Errc::InvalidArgument, "level alphabet must be nonempty");
  for (size_t i = 0; i < names.size(); ++i) {
    for (size_t j = i + 1; j < names.size(); ++j) {
      if (names[i] == names[j]) {
        throw Error(Errc::InvalidArgument, "duplicate letter name '" + names[i] + "'");
      }
    }
  }
  if (m.size() != static_cast<int>(names.size())) {
    throw Error(Errc::InvalidArgument, "morphism size does not match alphabet size");
  }
  int prev = static_cast<int>(alphabets_.back().size());
  for (const auto& img : m.images) {
    for (Sym v : img) {
      if (v < 0 || v >= prev) throw Error(Errc::InvalidArgument, "image letter out of range");
    }
  }
  if (tail_) throw Error(Errc::InvalidArgument, "cannot add levels after the tail");
  alphabets_.push_back(std::move(names));
  morphisms_.push_back(std::move(m));
}

void Diagram::set_tail(Tail t) {
  int L = top_level();
  if (t.start < 1 || t.period < 1 || t.start + t.period > L + 1) {
    throw Error(Errc::InvalidArgument, "tail out of range: from " + std::to_string(t.start) +
                                           " period " + std::to_string(t.period));
  }
  if (alphabets_[static_cast<size_t>(t.start - 1)].size() !=
      alphabets_[static_cast<size_t>(t.start + t.period - 1)].size()) {
    throw Error(Errc::InvalidArgument, "tail wrap needs equal alphabet sizes at levels " +
                                           std::to_string(t.start - 1) + " and " +
                                           std::to_string(t.start + t.period - 1));
  }
  tail_ = t;
}

bool Diagram::representable(int n) const {
  if (n < 0) return false;
  return tail_.has_value() || n <= top_level();
}

int Diagram::ref_level(int n) const {
  if (n < 0 || (!tail_ && n > top_level())) {
    throw Error(Errc::LevelOutOfRange, "level " + std::to_string(n) + " not represented");
  }
  if (n <= top_level()) return n;
  return tail_->start + static_cast<int>((static_cast<long long>(n) - tail_->start) % tail_->period);
}

int Diagram::alphabet_size(int n) const {
  return static_cast<int>(alphabets_[static_cast<size_t>(ref_level(n))].size());
}

const std::vector<std::string>& Diagram::level_names(int n) const {
  return alphabets_[static_cast<size_t>(ref_level(n))];
}

const std::string& Diagram::letter_name(int n, Sym v) const {
  const auto& names = level_names(n);
  if (v < 0 || static_cast<size_t>(v) >= names.size()) {
    throw Error(Errc::InvalidArgument, "letter index out of range");
  }
  return names[static_cast<size_t>(v)];
}

Sym Diagram::letter_index(int n, const std::string& name) const {
  const auto& names = level_names(n);
  for (size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<Sym>(i);
  }
  return -1;
}

const LevelMorphism& Diagram::morphism(int n) const {
  if (n < 1) throw Error(Errc::LevelOutOfRange, "morphism level must be >= 1");
  return morphisms_[static_cast<size_t>(ref_level(n)) - 1];
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& v : violations) {
    os << "level " << v.level << " " << v.subject << ": " << v.message << "\n";
  }
  return os.str();
}

ValidationReport validate_diagram(const Diagram& d) {
  ValidationReport report;
  for (int n = 1; n <= d.top_level(); ++n) {
    const auto& m = d.morphism(n);
    int prev = d.alphabet_size(n - 1);
    std::vector<char> used(static_cast<size_t>(prev), 0);
    for (Sym v = 0; v < m.size(); ++v) {
      if (m.image(v).empty()) {
        report.violations.push_back({n, d.letter_name(n, v), "empty row: image word is empty"});
      }
      for (Sym w : m.image(v)) used[static_cast<size_t>(w)] = 1;
    }
    for (Sym w = 0; w < prev; ++w) {
      if (!used[static_cast<size_t>(w)]) {
        report.violations.push_back(
            {n, d.letter_name(n - 1, w), "zero column: letter never occurs in an image"});
      }
    }
  }
  return report;
}

LevelMorphism compose_morphisms(const Diagram& d, int i, int j) {
  if (i < 0 || j < i) throw Error(Errc::InvalidArgument, "need 0 <= i <= j");
  if (!d.representable(j)) {
    throw Error(Errc::LevelOutOfRange, "level " + std::to_string(j) + " not represented");
  }
  LevelMorphism cur;
  cur.images.resize(static_cast<size_t>(d.alphabet_size(j)));
  for (Sym v = 0; v < static_cast<Sym>(cur.images.size()); ++v) {
    cur.images[static_cast<size_t>(v)] = {v};
  }
  for (int m = j; m > i; --m) {
    const auto& step = d.morphism(m);
    LevelMorphism next;
    next.images.resize(cur.images.size());
    size_t total = 0;
    for (size_t v = 0; v < cur.images.size(); ++v) {
      Word& out = next.images[v];
      for (Sym letter : cur.images[v]) {
        const Word& img = step.image(letter);
        out.insert(out.end(), img.begin(), img.end());
      }
      total += out.size();
      if (total > kComposeLetterBudget) {
        throw Error(Errc::Overflow, "composed morphism exceeds the letter budget");
      }
    }
    cur = std::move(next);
  }
  return cur;
}

IncidenceMatrix IncidenceMatrix::zero(int r, int c) {
  IncidenceMatrix m;
  m.rows = r;
  m.cols = c;
  m.entries.assign(static_cast<size_t>(r) * static_cast<size_t>(c), 0);
  return m;
}

bool IncidenceMatrix::positive() const {
  return std::all_of(entries.begin(), entries.end(), [](unsigned long long e) { return e > 0; });
}

IncidenceMatrix incidence_matrix(const Diagram& d, int n) {
  if (n < 1 || !d.representable(n)) {
    throw Error(Errc::LevelOutOfRange, "level " + std::to_string(n) + " not represented");
  }
  const auto& m = d.morphism(n);
  auto a = IncidenceMatrix::zero(m.size(), d.alphabet_size(n - 1));
  for (Sym v = 0; v < m.size(); ++v) {
    for (Sym w : m.image(v)) a.at(v, w) += 1;
  }
  return a;
}

IncidenceMatrix matrix_product(const IncidenceMatrix& a, const IncidenceMatrix& b) {
  if (a.cols != b.rows) throw Error(Errc::InvalidArgument, "matrix shape mismatch");
  auto r = IncidenceMatrix::zero(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    for (int k = 0; k < a.cols; ++k) {
      unsigned long long aik = a.at(i, k);
      if (aik == 0) continue;
      for (int j = 0; j < b.cols; ++j) {
        r.at(i, j) = checked_add(r.at(i, j), checked_mul(aik, b.at(k, j)));
      }
    }
  }
  return r;
}

IncidenceMatrix incidence_product(const Diagram& d, int i, int j) {
  if (i < 0 || j < i) throw Error(Errc::InvalidArgument, "need 0 <= i <= j");
  int n = d.alphabet_size(i);
  auto acc = IncidenceMatrix::zero(n, n);
  for (int k = 0; k < n; ++k) acc.at(k, k) = 1;
  for (int m = i + 1; m <= j; ++m) {
    acc = matrix_product(incidence_matrix(d, m), acc);
  }
  return acc;
}

namespace {

struct TailShape {
  int prefix;
  long long period;
};

// Two eventually periodic level sequences agreeing on
// max(prefix) + lcm(periods) levels agree everywhere.
long long compare_window(const Diagram& a, const Diagram& b) {
  long long pa = a.tail() ? a.tail()->period : 1;
  long long pb = b.tail() ? b.tail()->period : 1;
  long long l = std::lcm(pa, pb);
  return std::max(a.top_level(), b.top_level()) + l;
}

}  // namespace

DiagramDiff diff_unrolled(const Diagram& a, const Diagram& b) {
  DiagramDiff diff;
  if (a.tail().has_value() != b.tail().has_value()) {
    diff.equal = false;
    diff.subject = "extent";
    diff.expected = a.tail() ? "periodic tail" : "finite";
    diff.actual = b.tail() ? "periodic tail" : "finite";
    return diff;
  }
  long long window = a.tail() ? compare_window(a, b) : a.top_level();
  if (!a.tail() && a.top_level() != b.top_level()) {
    diff.equal = false;
    diff.subject = "top level";
    diff.expected = std::to_string(a.top_level());
    diff.actual = std::to_string(b.top_level());
    return diff;
  }
  for (int n = 1; n <= window; ++n) {
    if (a.alphabet_size(n) != b.alphabet_size(n)) {
      diff.equal = false;
      diff.level = n;
      diff.subject = "alphabet size";
      diff.expected = std::to_string(a.alphabet_size(n));
      diff.actual = std::to_string(b.alphabet_size(n));
      return diff;
    }
    const auto& ma = a.morphism(n);
    const auto& mb = b.morphism(n);
    for (Sym v = 0; v < ma.size(); ++v) {
      if (ma.image(v) != mb.image(v)) {
        diff.equal = false;
        diff.level = n;
        diff.subject = a.letter_name(n, v);
        diff.expected = render_word(a, n - 1, ma.image(v));
        diff.actual = render_word(b, n - 1, mb.image(v));
        return diff;
      }
    }
  }
  return diff;
}

bool equal_unrolled(const Diagram& a, const Diagram& b) { return diff_unrolled(a, b).equal; }

std::string render_word(const Diagram& d, int level_of_letters, const Word& w) {
  std::ostringstream os;
  for (size_t i = 0; i < w.size(); ++i) {
    if (i) os << " ";
    os << d.letter_name(level_of_letters, w[i]);
  }
  return os.str();
}

Diagram parse_obd(const std::string& text, const std::string& source) {
  using namespace textio;
  auto lines = tokenize(text);
  if (lines.empty() || lines[0].tokens != std::vector<std::string>{"obd", "1"}) {
    fail(source, lines.empty() ? 1 : lines[0].number, "expected 'obd 1' header");
  }

  Diagram d;
  size_t li = 1;
  int next_level = 1;
  std::vector<std::string> pending_names;
  bool have_pending = false;

  while (li < lines.size()) {
    const auto& line = lines[li];
    const auto& t = line.tokens;
    if (t[0] == "level") {
      if (have_pending) fail(source, line.number, "level without a morphism before it");
      if (t.size() < 4 || t[2] != "=") fail(source, line.number, "expected 'level <n> = <letters...>'");
      if (parse_int(source, line.number, t[1]) != next_level) {
        fail(source, line.number, "expected level " + std::to_string(next_level));
      }
      pending_names.assign(t.begin() + 3, t.end());
      for (const auto& name : pending_names) {
        if (!valid_letter_token(name) || name == "@") {
          fail(source, line.number, "invalid letter name '" + name + "'");
        }
      }
      have_pending = true;
      ++li;
    } else if (t[0] == "morphism") {
      if (!have_pending) fail(source, line.number, "morphism before its level line");
      if (t.size() < 2 || t[1].size() < 2 || t[1].back() != ':') {
        fail(source, line.number, "expected 'morphism <n>:'");
      }
      if (parse_int(source, line.number, t[1].substr(0, t[1].size() - 1)) != next_level) {
        fail(source, line.number, "expected morphism " + std::to_string(next_level));
      }
      auto assignments = parse_assignments(source, line.number, t, 2);
      LevelMorphism m;
      m.images.resize(pending_names.size());
      std::vector<char> defined(pending_names.size(), 0);
      std::vector<std::string> prev =
          next_level == 1 ? std::vector<std::string>{"@"} : d.level_names(next_level - 1);
      auto prev_index = [&](const std::string& name) -> Sym {
        for (size_t i = 0; i < prev.size(); ++i) {
          if (prev[i] == name) return static_cast<Sym>(i);
        }
        return -1;
      };
      for (const auto& asg : assignments) {
        Sym v = -1;
        for (size_t i = 0; i < pending_names.size(); ++i) {
          if (pending_names[i] == asg.lhs) v = static_cast<Sym>(i);
        }
        if (v < 0) fail(source, line.number, "unknown letter '" + asg.lhs + "'");
        if (defined[static_cast<size_t>(v)]) {
          fail(source, line.number, "duplicate image for '" + asg.lhs + "'");
        }
        defined[static_cast<size_t>(v)] = 1;
        for (const auto& token : asg.rhs) {
          Sym w = prev_index(token);
          if (w < 0) fail(source, line.number, "unknown image letter '" + token + "'");
          m.images[static_cast<size_t>(v)].push_back(w);
        }
      }
      for (size_t i = 0; i < defined.size(); ++i) {
        if (!defined[i]) fail(source, line.number, "missing image for '" + pending_names[i] + "'");
      }
      try {
        d.add_level(pending_names, std::move(m));
      } catch (const Error& e) {
        fail(source, line.number, e.what());
      }
      have_pending = false;
      ++next_level;
      ++li;
    } else if (t[0] == "tail") {
      if (have_pending) fail(source, line.number, "level without a morphism before the tail");
      if (t.size() != 5 || t[1] != "from" || t[3] != "period") {
        fail(source, line.number, "expected 'tail from <s> period <p>'");
      }
      Tail tail;
      tail.start = static_cast<int>(parse_int(source, line.number, t[2]));
      tail.period = static_cast<int>(parse_int(source, line.number, t[4]));
      try {
        d.set_tail(tail);
      } catch (const Error& e) {
        fail(source, line.number, e.what());
      }
      ++li;
      if (li < lines.size()) fail(source, lines[li].number, "content after the tail line");
    } else {
      fail(source, line.number, "unexpected '" + t[0] + "'");
    }
  }
  if (have_pending) fail(source, lines.back().number, "level without a morphism");
  if (d.top_level() == 0) fail(source, lines.back().number, "diagram has no levels");
  return d;
}

Diagram load_obd(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::ParseError, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_obd(buf.str(), path);
}

std::string emit_obd(const Diagram& d) {
  std::ostringstream os;
  os << "obd 1\n";
  for (int n = 1; n <= d.top_level(); ++n) {
    os << "level " << n << " =";
    for (const auto& name : d.level_names(n)) os << " " << name;
    os << "\n";
    os << "morphism " << n << ":";
    const auto& m = d.morphism(n);
    for (Sym v = 0; v < m.size(); ++v) {
      if (v) os << " ;";
      os << " " << d.letter_name(n, v) << " =";
      for (Sym w : m.image(v)) os << " " << d.letter_name(n - 1, w);
    }
    os << "\n";
  }
  if (d.tail()) {
    os << "tail from " << d.tail()->start << " period " << d.tail()->period << "\n";
  }
  return os.str();
}

void save_obd(const Diagram& d, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::ParseError, "cannot write '" + path + "'");
  out << emit_obd(d);
}

}  // namespace obd
