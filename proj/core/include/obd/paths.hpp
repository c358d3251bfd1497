#ifndef OBD_PATHS_HPP
#define OBD_PATHS_HPP

#include <vector>

#include "obd/diagram.hpp"

namespace obd {

/// A finite path from the root into a level-k vertex, stored as one
/// (range letter, edge ordinal) record per level. The ordinal is the
/// edge's position in the image word of its range letter, so the source
/// letter at level i-1 is morphism(i).image(range)[ordinal].
struct PathPrefix {
  struct Step {
    Sym range = 0;
    int ordinal = 0;
    bool operator==(const Step&) const = default;
  };
  std::vector<Step> steps;  // steps[i-1] describes level i

  int depth() const { return static_cast<int>(steps.size()); }
  Sym range() const { return steps.back().range; }
  bool operator==(const PathPrefix&) const = default;
};

bool path_valid(const Diagram& d, const PathPrefix& p);
void check_path(const Diagram& d, const PathPrefix& p);

/// Number of paths from the root into v at level n; equals
/// |sigma_{[0,n]}(v)|.
unsigned long long path_count(const Diagram& d, int n, Sym v);

enum class Extreme { Min, Max };

/// The all-min or all-max path into `range` at the given depth.
PathPrefix extreme_path(const Diagram& d, int depth, Extreme which, Sym range = 0);

/// Rank of p among the paths sharing its range, in the order where the
/// deepest differing edge dominates.
unsigned long long path_ordinal(const Diagram& d, const PathPrefix& p);

/// Inverse of path_ordinal for the given range vertex.
PathPrefix path_from_ordinal(const Diagram& d, int depth, Sym v, unsigned long long j);

/// The successor path: bumps the shallowest non-max edge and resets the
/// levels below it to the min path into the new source. Throws AllMax
/// when every edge is maximal (the prefix carries no information about
/// the successor; deepen the cylinder).
PathPrefix vershik_successor(const Diagram& d, const PathPrefix& p);

/// Renders a path as "v1[o1] v2[o2] ..." with letter names.
std::string render_path(const Diagram& d, const PathPrefix& p);

}  // namespace obd

#endif
