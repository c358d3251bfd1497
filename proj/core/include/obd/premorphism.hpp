#ifndef OBD_PREMORPHISM_HPP
#define OBD_PREMORPHISM_HPP

#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "obd/diagram.hpp"
#include "obd/paths.hpp"
#include "obd/transforms.hpp"

namespace obd {

/// The scale f_0 = 0 <= f_1 <= f_2 <= ... of a premorphism: explicit
/// prefix values f_1..f_m, then arithmetic continuation by tail_step.
struct ScaleSpec {
  bool identity = true;
  std::vector<long long> prefix;
  std::optional<long long> tail_step;

  long long at(long long n) const;
  bool representable(long long n) const;
  /// Strictly increasing within one represented window.
  bool cofinal() const;
  std::string to_string() const;
  bool operator==(const ScaleSpec&) const = default;
};

/// An ordered premorphism f: B1 -> B2, stored as its induced morphism
/// sequence: tau_n maps each letter of W_{f_n} (in B2) to a nonempty
/// word over V_n (in B1). Ordered commutativity
///   tau_n . sigma^{B2}_{[f_n, f_{n+1}]} = sigma^{B1}_{n+1} . tau_{n+1}
/// is what validate_premorphism replays.
struct Premorphism {
  Diagram b1;
  Diagram b2;
  std::string b1_path;
  std::string b2_path;
  ScaleSpec scale;
  std::vector<LevelMorphism> taus;  // taus[n-1] = tau_n
  std::optional<Tail> tau_tail;

  int tau_top() const { return static_cast<int>(taus.size()); }
  bool tau_representable(int n) const;
  const LevelMorphism& tau(int n) const;

  bool operator==(const Premorphism&) const = default;
};

/// Deepest level (exclusive) and period such that checking levels
/// 0..start+period-1 covers every represented level by periodicity.
struct CheckWindow {
  int levels = 0;       // validate n in [0, levels)
  bool periodic = false;
};
CheckWindow premorphism_window(const Premorphism& f);

ValidationReport validate_premorphism(const Premorphism& f);

struct NormalizeResult {
  Premorphism f;
  // The telescoping applied to B2; nullopt when the scale already was
  // the identity and B2 is untouched.
  std::optional<TelescopeSpec> b2_spec;
};

/// Rewrites the premorphism so that f_n = n, telescoping B2 along a
/// strictly increasing subsequence of the scale and composing each tau
/// down to its own level. Throws NonCofinal when the represented scale
/// never increases.
Premorphism normalize_scale(const Premorphism& f);
NormalizeResult normalize_scale_with_spec(const Premorphism& f);

/// Assembles tau_n from figure-style edge tuples
/// (source in V_n, range in W_{f_n}, order index); order indices must
/// form 0..m-1 per range letter.
LevelMorphism tau_from_edge_list(const std::vector<std::tuple<Sym, Sym, int>>& edges,
                                 int domain_size);

/// Image of a B2-path at depth f_n under the induced factor map: the
/// path_ordinal-th element of the E_{0,n} o F_n composite enumeration,
/// whose deepest coordinate is the position inside tau_n(range).
PathPrefix factor_image(const Premorphism& f, const PathPrefix& p, int n);

Premorphism parse_opm(const std::string& text, const std::string& source,
                      const std::string& base_dir);
Premorphism load_opm(const std::string& path);
std::string emit_opm(const Premorphism& f);
void save_opm(const Premorphism& f, const std::string& path);

}  // namespace obd

#endif
