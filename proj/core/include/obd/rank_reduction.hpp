#ifndef OBD_RANK_REDUCTION_HPP
#define OBD_RANK_REDUCTION_HPP

#include <optional>
#include <string>
#include <vector>

#include "obd/premorphism.hpp"
#include "obd/transforms.hpp"

namespace obd {

/// Per-level evidence that the four preprocessing assumptions hold on
/// the telescoped pair: (1) the B1 step matrix is positive, (2) every
/// image at the step shares its first and last letter, (3) the level
/// keeps at least two letters, (4) every tau image contains every
/// letter of its level.
struct LevelWitness {
  long long b1_level = 0;  // source level in the pre-telescoping B1
  long long b2_level = 0;  // source level in the pre-telescoping B2
  Sym vmin = 0;
  Sym vmax = 0;
  bool card_ge2 = false;
  bool tau_full = false;
};

struct PreparedTriple {
  Premorphism f;  // scale identity; both diagrams telescoped
  TelescopeSpec b1_spec;
  TelescopeSpec b2_spec;
  std::vector<LevelWitness> witnesses;  // per prepared level, prefix + period
};

enum class PrepareStatus { Prepared, RankOne, Inconclusive };

struct PrepareResult {
  PrepareStatus status = PrepareStatus::Inconclusive;
  std::string note;
  std::optional<PreparedTriple> triple;
};

/// Telescopes both diagrams and the tau sequence until assumptions
/// (1)-(4) hold at every represented level, recording witnesses.
PrepareResult preprocess_assumptions(const Premorphism& f, int max_depth);

/// A level-n generating set C_n with card <= 3 |W_n| over which every
/// sigma_{[n,ell]} image factorizes, together with the boundary cuts
/// that produced it.
struct CoverCut {
  int z_index = 0;  // which tau-block the boundary splits
  Word s;
  Word t;
};

struct CoverBasis {
  int level = 0;
  int witness_level = 0;  // ell
  Code code;
  std::vector<Factorization> target_factorizations;  // per letter of V_ell
  std::vector<CoverCut> cuts;
};

CoverBasis cover_basis(const PreparedTriple& t, int n, int max_depth);

struct RankReduceResult {
  PrepareStatus status = PrepareStatus::Inconclusive;
  std::string note;
  std::optional<Diagram> reduced;
  std::optional<EquivalenceCertificate> certificate;
  int output_rank = 0;
  int b2_rank = 0;
};

/// Rank-reduction pipeline: iterates cover_basis along a chain of
/// levels, inserts each cover as a new level, telescopes the even
/// levels, and emits a replayable equivalence certificate for the
/// result. Guarantees rank(reduced) <= 3 rank(B2) on success.
RankReduceResult reduce_rank(const Premorphism& f, int max_depth);

/// Certificate interleaving a diagram with identity morphisms; always
/// verifies against (d, d).
EquivalenceCertificate self_certificate(const Diagram& d, const std::string& path_a,
                                        const std::string& path_b);

}  // namespace obd

#endif
