#ifndef OBD_TRANSFORMS_HPP
#define OBD_TRANSFORMS_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "obd/diagram.hpp"

namespace obd {

/// Strictly increasing level indices n_0 = 0 < n_1 < ..., optionally
/// continued forever: beyond the explicit list the increments cycle
/// through tail_steps ("tail +2" or "tail +2 +3").
struct TelescopeSpec {
  std::vector<long long> indices{0};
  std::vector<long long> tail_steps;

  static TelescopeSpec identity_spec(long long upto, bool tailed);

  bool infinite() const { return !tail_steps.empty(); }
  long long at(long long k) const;
  size_t explicit_count() const { return indices.size(); }
  void validate() const;
  std::string to_string() const;
  bool operator==(const TelescopeSpec&) const = default;
};

TelescopeSpec parse_telescope_spec(const std::vector<std::string>& tokens,
                                   const std::string& source = "<spec>", int line = 0);

/// compose(s1, s2).at(k) == s1.at(s2.at(k)); telescoping first by s1
/// and then by s2 equals telescoping once by the composite.
TelescopeSpec compose_specs(const TelescopeSpec& s1, const TelescopeSpec& s2);

/// Collapses levels along the spec; the level-k morphism of the result
/// is sigma_{[n_{k-1}, n_k]} and incidence matrices multiply.
Diagram telescope(const Diagram& d, const TelescopeSpec& spec);

/// Copies d with the periodic tail unrolled far enough that it starts
/// strictly above `level`.
Diagram unroll_past(const Diagram& d, int level);

/// Microscoping: inserts the words of W as a new level between k-1 and
/// k. Every sigma_k(v) must factorize over W (NotCovered otherwise) and
/// W must be inclusion-minimal for that property (NotMinimal otherwise).
/// The new level maps each word to itself, and the level above it reads
/// the fixed greedy factorization, so composing through the insertion
/// reproduces sigma_k exactly.
Diagram pack(const Diagram& d, int k, const Code& W,
             std::vector<std::string> names = {});

struct ProperForm {
  TelescopeSpec spec;
  // (min, max) source letters per telescoped level, from level 0 up; on
  // a periodic result the listed entries cover prefix plus one period.
  std::vector<std::pair<Sym, Sym>> level_min_max;
};

/// Searches for a telescoping after which every image word at each
/// level starts with one fixed letter and ends with one fixed letter.
/// nullopt when no step closes within max_depth.
std::optional<ProperForm> proper_form_search(const Diagram& d, int max_depth);

/// Smallest N <= n + max_depth with A_N x ... x A_{n+1} entrywise
/// positive, or nullopt.
std::optional<int> positive_reach(const Diagram& d, int n, int max_depth);

/// sup of |V_n| over the represented levels, excluding the root.
int diagram_rank(const Diagram& d);

/// Replayable witness that two diagrams are equivalent: an interleaved
/// diagram whose odd levels telescope to A (along spec_a) and whose
/// even levels telescope to B (along spec_b).
struct EquivalenceCertificate {
  std::string path_a;
  std::string path_b;
  Diagram interleaved;
  TelescopeSpec spec_a;
  TelescopeSpec spec_b;
};

struct CertCounterexample {
  std::string side;  // "odd" or "even"
  int level = 0;
  std::string letter;
  std::string expected;
  std::string actual;
};

struct CertVerdict {
  bool verified = false;
  std::string message;
  std::optional<CertCounterexample> counterexample;
};

CertVerdict verify_equivalence_certificate(const EquivalenceCertificate& cert,
                                           const Diagram& a, const Diagram& b);

EquivalenceCertificate parse_cert(const std::string& text, const std::string& source = "<cert>");
EquivalenceCertificate load_cert(const std::string& path);
std::string emit_cert(const EquivalenceCertificate& cert);
void save_cert(const EquivalenceCertificate& cert, const std::string& path);

/// Loads the two referenced diagrams, resolving relative paths against
/// the directory containing the certificate.
std::pair<Diagram, Diagram> load_cert_diagrams(const EquivalenceCertificate& cert,
                                               const std::string& cert_path);

}  // namespace obd

#endif
