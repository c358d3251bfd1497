#ifndef OBD_CONJUGACY_HPP
#define OBD_CONJUGACY_HPP

#include <optional>
#include <string>
#include <vector>

#include "obd/premorphism.hpp"
#include "obd/transforms.hpp"

namespace obd {

/// G_n of the conjugacy construction: maps each letter of V_ell to the
/// index word of the unique D_n-factorization of sigma_{[n,ell]}.
struct BridgeMorphism {
  int level = 0;          // n
  int witness_level = 0;  // ell
  LevelMorphism map;      // V_ell -> W_n^*
};

struct CriterionTried {
  int ell = 0;
  bool generated = false;
  bool minimal = false;
};

struct CriterionLevel {
  int n = 0;
  bool duplicate_images = false;
  bool independent = false;
  Word dependence_witness;  // word over V_n with two factorizations
  std::vector<CriterionTried> tried;
  std::optional<int> ell;  // first level where generation and minimality hold
};

enum class CriterionStatus { Satisfied, Refuted, Inconclusive };

struct CriterionResult {
  CriterionStatus status = CriterionStatus::Inconclusive;
  bool partial = false;  // finite input: verified on the prefix only
  std::string note;
  std::vector<CriterionLevel> levels;
  // When satisfied: the telescoping chain n_1 < n_2 < ... the
  // construction follows; chain_steps is the periodic step pattern
  // (empty for finite inputs).
  std::vector<long long> chain;
  std::vector<long long> chain_steps;
};

/// Tests, level by level, whether the tau images form an independent
/// code that minimally generates the composed B1 morphisms at some
/// deeper level. Requires an identity-scale premorphism.
CriterionResult criterion_check(const Premorphism& f, int max_depth);

/// Builds the bridge at (n, ell); letterwise postconditions
///   tau_n . bridge = sigma^{B1}_{[n,ell]}   and
///   bridge . tau_ell = sigma^{B2}_{[n,ell]}
/// are verified before returning.
BridgeMorphism build_bridge(const Premorphism& f, int n, int ell);

/// Assembles the alternating diagram E, F, G, F, G, ... and the two
/// telescope specs; the result passes verify_equivalence_certificate
/// against the premorphism's diagrams.
EquivalenceCertificate interleave_and_certify(const Premorphism& f,
                                              const std::vector<long long>& chain,
                                              const std::vector<long long>& chain_steps,
                                              const std::vector<BridgeMorphism>& bridges);

struct ConjugacyOutcome {
  CriterionStatus status = CriterionStatus::Inconclusive;
  bool partial = false;
  std::string note;
  CriterionResult criterion;
  std::optional<EquivalenceCertificate> certificate;
};

/// Full pipeline: normalize the scale, run the criterion, build the
/// bridges along the chain, emit and re-verify the certificate against
/// the original diagrams.
ConjugacyOutcome conjugacy_certify(const Premorphism& f, int max_depth);

}  // namespace obd

#endif
