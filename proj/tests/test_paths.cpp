#include <algorithm>

#include "doctest.h"
#include "test_support.hpp"

using namespace obd;
using testsupport::chacon;

namespace {

// Brute-force enumeration of every valid path prefix into v, ordered by
// the deepest-differing-edge rule; independent of the ordinal code.
void enumerate_into(const Diagram& d, int depth, Sym v, PathPrefix cur,
                    std::vector<PathPrefix>* out) {
  if (depth == 0) {
    std::reverse(cur.steps.begin(), cur.steps.end());
    out->push_back(std::move(cur));
    return;
  }
  const Word& img = d.morphism(depth).image(v);
  for (int o = 0; o < static_cast<int>(img.size()); ++o) {
    PathPrefix next = cur;
    next.steps.push_back({v, o});
    enumerate_into(d, depth - 1, img[static_cast<size_t>(o)], std::move(next), out);
  }
}

std::vector<PathPrefix> all_paths_into(const Diagram& d, int depth, Sym v) {
  std::vector<PathPrefix> out;
  enumerate_into(d, depth, v, PathPrefix{}, &out);
  std::sort(out.begin(), out.end(), [](const PathPrefix& a, const PathPrefix& b) {
    for (int i = a.depth(); i >= 1; --i) {
      int oa = a.steps[static_cast<size_t>(i) - 1].ordinal;
      int ob = b.steps[static_cast<size_t>(i) - 1].ordinal;
      if (oa != ob) return oa < ob;
    }
    return false;
  });
  return out;
}

}  // namespace

TEST_CASE("path_count matches exhaustive enumeration on Chacon") {
  Diagram d = chacon();
  CHECK(path_count(d, 2, 0) == 5);  // five paths into x at depth 2
  CHECK(path_count(d, 1, 0) == 2);  // root multiplicity
  CHECK(path_count(d, 1, 1) == 1);
  for (int depth = 1; depth <= 4; ++depth) {
    for (Sym v = 0; v < d.alphabet_size(depth); ++v) {
      auto brute = all_paths_into(d, depth, v);
      CHECK(path_count(d, depth, v) == brute.size());
      CHECK(path_count(d, depth, v) == compose_morphisms(d, 0, depth).image(v).size());
    }
  }
}

TEST_CASE("ordinals and paths are mutually inverse in enumeration order") {
  Diagram d = chacon();
  for (int depth = 1; depth <= 4; ++depth) {
    for (Sym v = 0; v < d.alphabet_size(depth); ++v) {
      auto brute = all_paths_into(d, depth, v);
      for (size_t j = 0; j < brute.size(); ++j) {
        CHECK(path_ordinal(d, brute[j]) == j);
        CHECK(path_from_ordinal(d, depth, v, j) == brute[j]);
      }
      CHECK_THROWS_AS(path_from_ordinal(d, depth, v, brute.size()), Error);
    }
  }
}

TEST_CASE("extreme paths sit at the ends of the enumeration") {
  Diagram d = chacon();
  for (int depth = 1; depth <= 4; ++depth) {
    for (Sym v = 0; v < d.alphabet_size(depth); ++v) {
      auto mn = extreme_path(d, depth, Extreme::Min, v);
      auto mx = extreme_path(d, depth, Extreme::Max, v);
      for (const auto& step : mn.steps) CHECK(step.ordinal == 0);
      CHECK(path_ordinal(d, mn) == 0);
      CHECK(path_ordinal(d, mx) == path_count(d, depth, v) - 1);
    }
  }
}

TEST_CASE("vershik_successor is the ordinal increment within a range vertex") {
  Diagram d = chacon();
  for (int depth = 1; depth <= 4; ++depth) {
    for (Sym v = 0; v < d.alphabet_size(depth); ++v) {
      auto count = path_count(d, depth, v);
      auto p = extreme_path(d, depth, Extreme::Min, v);
      for (unsigned long long j = 0; j + 1 < count; ++j) {
        auto next = vershik_successor(d, p);
        CHECK(next.range() == v);
        CHECK(path_ordinal(d, next) == j + 1);
        CHECK(next == path_from_ordinal(d, depth, v, j + 1));
        p = next;
      }
      CHECK_THROWS_AS(vershik_successor(d, p), Error);  // all-max now
    }
  }
}

TEST_CASE("all-max input raises AllMax immediately") {
  Diagram d = chacon();
  auto mx = extreme_path(d, 3, Extreme::Max, 1);
  try {
    vershik_successor(d, mx);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::AllMax);
  }
}

TEST_CASE("min paths are compatible across depths on a proper diagram") {
  // Chacon is proper as given: every image starts with x and ends
  // with y, so the depth-(k+1) min path restricts to the depth-k one.
  Diagram d = chacon();
  auto pf = proper_form_search(d, 4);
  REQUIRE(pf.has_value());
  for (int depth = 1; depth <= 3; ++depth) {
    for (Sym v = 0; v < d.alphabet_size(depth + 1); ++v) {
      auto deep = extreme_path(d, depth + 1, Extreme::Min, v);
      PathPrefix shallow;
      shallow.steps.assign(deep.steps.begin(), deep.steps.end() - 1);
      CHECK(shallow == extreme_path(d, depth, Extreme::Min, 0));  // v_min = x
    }
  }
}
