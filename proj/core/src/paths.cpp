#include "obd/paths.hpp"

#include <sstream>

namespace obd {

namespace {

unsigned long long checked_add(unsigned long long a, unsigned long long b) {
  unsigned long long r;
  if (__builtin_add_overflow(a, b, &r)) throw Error(Errc::Overflow, "path count overflow");
  return r;
}

// counts[m][v] = number of paths from the root into v at level m.
std::vector<std::vector<unsigned long long>> level_counts(const Diagram& d, int n) {
  std::vector<std::vector<unsigned long long>> counts(static_cast<size_t>(n) + 1);
  counts[0] = {1};
  for (int m = 1; m <= n; ++m) {
    const auto& mor = d.morphism(m);
    counts[static_cast<size_t>(m)].resize(static_cast<size_t>(mor.size()), 0);
    for (Sym v = 0; v < mor.size(); ++v) {
      unsigned long long total = 0;
      for (Sym w : mor.image(v)) {
        total = checked_add(total, counts[static_cast<size_t>(m) - 1][static_cast<size_t>(w)]);
      }
      counts[static_cast<size_t>(m)][static_cast<size_t>(v)] = total;
    }
  }
  return counts;
}

}  // namespace

bool path_valid(const Diagram& d, const PathPrefix& p) {
  if (p.steps.empty()) return false;
  int k = p.depth();
  if (!d.representable(k)) return false;
  for (int i = k; i >= 1; --i) {
    const auto& step = p.steps[static_cast<size_t>(i) - 1];
    if (step.range < 0 || step.range >= d.alphabet_size(i)) return false;
    const Word& img = d.morphism(i).image(step.range);
    if (step.ordinal < 0 || static_cast<size_t>(step.ordinal) >= img.size()) return false;
    Sym source = img[static_cast<size_t>(step.ordinal)];
    Sym below = i == 1 ? 0 : p.steps[static_cast<size_t>(i) - 2].range;
    if (source != below) return false;
  }
  return true;
}

void check_path(const Diagram& d, const PathPrefix& p) {
  if (!path_valid(d, p)) throw Error(Errc::InvalidArgument, "invalid path prefix");
}

unsigned long long path_count(const Diagram& d, int n, Sym v) {
  if (n < 0 || !d.representable(n)) {
    throw Error(Errc::LevelOutOfRange, "level " + std::to_string(n) + " not represented");
  }
  if (v < 0 || v >= d.alphabet_size(n)) throw Error(Errc::InvalidArgument, "letter out of range");
  return level_counts(d, n)[static_cast<size_t>(n)][static_cast<size_t>(v)];
}

PathPrefix extreme_path(const Diagram& d, int depth, Extreme which, Sym range) {
  if (depth < 1 || !d.representable(depth)) {
    throw Error(Errc::LevelOutOfRange, "depth " + std::to_string(depth) + " not represented");
  }
  if (range < 0 || range >= d.alphabet_size(depth)) {
    throw Error(Errc::InvalidArgument, "range letter out of range");
  }
  PathPrefix p;
  p.steps.resize(static_cast<size_t>(depth));
  Sym v = range;
  for (int i = depth; i >= 1; --i) {
    const Word& img = d.morphism(i).image(v);
    if (img.empty()) throw Error(Errc::InvalidArgument, "empty image word on the path");
    int o = which == Extreme::Min ? 0 : static_cast<int>(img.size()) - 1;
    p.steps[static_cast<size_t>(i) - 1] = {v, o};
    v = img[static_cast<size_t>(o)];
  }
  return p;
}

unsigned long long path_ordinal(const Diagram& d, const PathPrefix& p) {
  check_path(d, p);
  auto counts = level_counts(d, p.depth());
  unsigned long long j = 0;
  for (int i = p.depth(); i >= 1; --i) {
    const auto& step = p.steps[static_cast<size_t>(i) - 1];
    const Word& img = d.morphism(i).image(step.range);
    for (int q = 0; q < step.ordinal; ++q) {
      j = checked_add(j, counts[static_cast<size_t>(i) - 1][static_cast<size_t>(img[static_cast<size_t>(q)])]);
    }
  }
  return j;
}

PathPrefix path_from_ordinal(const Diagram& d, int depth, Sym v, unsigned long long j) {
  if (depth < 1 || !d.representable(depth)) {
    throw Error(Errc::LevelOutOfRange, "depth " + std::to_string(depth) + " not represented");
  }
  auto counts = level_counts(d, depth);
  if (v < 0 || v >= d.alphabet_size(depth)) throw Error(Errc::InvalidArgument, "letter out of range");
  if (j >= counts[static_cast<size_t>(depth)][static_cast<size_t>(v)]) {
    throw Error(Errc::OrdinalOutOfRange,
                "ordinal " + std::to_string(j) + " >= path count " +
                    std::to_string(counts[static_cast<size_t>(depth)][static_cast<size_t>(v)]));
  }
  PathPrefix p;
  p.steps.resize(static_cast<size_t>(depth));
  for (int i = depth; i >= 1; --i) {
    const Word& img = d.morphism(i).image(v);
    int q = 0;
    for (;; ++q) {
      unsigned long long c = counts[static_cast<size_t>(i) - 1][static_cast<size_t>(img[static_cast<size_t>(q)])];
      if (j < c) break;
      j -= c;
    }
    p.steps[static_cast<size_t>(i) - 1] = {v, q};
    v = img[static_cast<size_t>(q)];
  }
  return p;
}

PathPrefix vershik_successor(const Diagram& d, const PathPrefix& p) {
  check_path(d, p);
  int k = 0;
  for (int i = 1; i <= p.depth(); ++i) {
    const auto& step = p.steps[static_cast<size_t>(i) - 1];
    if (static_cast<size_t>(step.ordinal) + 1 < d.morphism(i).image(step.range).size()) {
      k = i;
      break;
    }
  }
  if (k == 0) {
    throw Error(Errc::AllMax, "all edges maximal at depth " + std::to_string(p.depth()) +
                                  "; the successor needs a deeper prefix");
  }
  PathPrefix out = p;
  auto& bumped = out.steps[static_cast<size_t>(k) - 1];
  bumped.ordinal += 1;
  Sym v = d.morphism(k).image(bumped.range)[static_cast<size_t>(bumped.ordinal)];
  for (int i = k - 1; i >= 1; --i) {
    out.steps[static_cast<size_t>(i) - 1] = {v, 0};
    v = d.morphism(i).image(v)[0];
  }
  return out;
}

std::string render_path(const Diagram& d, const PathPrefix& p) {
  std::ostringstream os;
  for (int i = 1; i <= p.depth(); ++i) {
    if (i > 1) os << " ";
    const auto& step = p.steps[static_cast<size_t>(i) - 1];
    os << d.letter_name(i, step.range) << "[" << step.ordinal << "]";
  }
  return os.str();
}

}  // namespace obd
