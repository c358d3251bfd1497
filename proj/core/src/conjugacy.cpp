#include "obd/conjugacy.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

namespace obd {

namespace {

Word apply_morphism(const LevelMorphism& m, const Word& w) {
  Word out;
  for (Sym x : w) {
    const Word& img = m.image(x);
    out.insert(out.end(), img.begin(), img.end());
  }
  return out;
}

// D_n as a code whose index i is exactly letter i of W_n; duplicates
// make the bridge ill-defined and are reported instead of deduplicated.
std::optional<Code> tau_code(const LevelMorphism& tau) {
  Code d;
  for (Sym w = 0; w < tau.size(); ++w) {
    if (!d.add(tau.image(w))) return std::nullopt;
  }
  return d;
}

}  // namespace

CriterionResult criterion_check(const Premorphism& f, int max_depth) {
  if (!f.scale.identity) {
    throw Error(Errc::InvalidArgument, "criterion_check expects a normalized (identity) scale");
  }
  if (max_depth < 1) throw Error(Errc::InvalidArgument, "max_depth must be >= 1");

  CriterionResult res;
  bool infinite = f.b1.tail() && f.b2.tail() && f.tau_tail.has_value();
  long long S = 0, P = 1;
  if (infinite) {
    S = std::max<long long>({f.b1.tail()->start, f.b2.tail()->start, f.tau_tail->start});
    P = std::lcm(std::lcm<long long>(f.b1.tail()->period, f.b2.tail()->period),
                 static_cast<long long>(f.tau_tail->period));
  }
  auto window = premorphism_window(f);
  int upto = std::max(1, window.levels);

  bool data_ended = false;
  for (int n = 1; n <= upto; ++n) {
    CriterionLevel row;
    row.n = n;
    auto code = tau_code(f.tau(n));
    if (!code) {
      row.duplicate_images = true;
      res.levels.push_back(std::move(row));
      continue;
    }
    auto ir = is_independent(*code);
    row.independent = ir.independent;
    if (!ir.independent) {
      row.dependence_witness = ir.witness;
      res.levels.push_back(std::move(row));
      continue;
    }
    for (int ell = n + 1; ell <= n + max_depth; ++ell) {
      if (!f.b1.representable(ell)) {
        data_ended = true;
        break;
      }
      auto composed = compose_morphisms(f.b1, n, ell);
      std::vector<Word> targets;
      for (Sym v = 0; v < composed.size(); ++v) targets.push_back(composed.image(v));
      bool generated = true;
      for (const auto& target : targets) {
        if (factorize(target, *code, FactorizeMode::Greedy).empty()) {
          generated = false;
          break;
        }
      }
      bool minimal = false;
      if (generated) {
        minimal = minimal_generating_subset(*code, targets).size() == code->size();
      }
      row.tried.push_back({ell, generated, minimal});
      if (generated && minimal) {
        row.ell = ell;
        break;
      }
    }
    res.levels.push_back(std::move(row));
  }

  // A level's verdict beyond the represented window repeats its residue
  // class; chains extend through that shift.
  auto row_for = [&](long long n) -> const CriterionLevel* {
    if (n <= upto) return &res.levels[static_cast<size_t>(n) - 1];
    if (!infinite) return nullptr;
    long long base = S + (n - S) % P;
    return &res.levels[static_cast<size_t>(base) - 1];
  };
  auto ell_for = [&](long long n) -> std::optional<long long> {
    const CriterionLevel* row = row_for(n);
    if (!row || !row->ell) return std::nullopt;
    return *row->ell + (n - row->n);
  };

  if (infinite) {
    bool any_independent = false;
    for (long long n = S; n < S + P; ++n) {
      const CriterionLevel* row = row_for(n);
      if (row && row->independent) any_independent = true;
    }
    if (!any_independent) {
      res.status = CriterionStatus::Refuted;
      res.note = "independence fails at every level of the tail period";
      return res;
    }
  }

  // Greedy chain: start at the first level that carries a witness ell
  // and keep jumping to it.
  long long start = -1;
  for (long long n = 1; n <= upto; ++n) {
    if (ell_for(n)) {
      start = n;
      break;
    }
  }
  if (start < 0) {
    res.status = CriterionStatus::Inconclusive;
    res.note = data_ended ? "representation too shallow to test the criterion"
                          : "no level admits a generating depth within max_depth";
    return res;
  }

  std::map<long long, size_t> seen;
  std::vector<long long> chain{start};
  while (true) {
    long long cur = chain.back();
    if (infinite && cur >= S) {
      long long residue = (cur - S) % P;
      auto it = seen.find(residue);
      if (it != seen.end()) {
        size_t pos0 = it->second;
        size_t pos = chain.size() - 1;
        for (size_t i = pos0; i < pos; ++i) {
          res.chain_steps.push_back(chain[i + 1] - chain[i]);
        }
        res.chain = std::move(chain);
        res.status = CriterionStatus::Satisfied;
        res.note = "criterion holds along a periodic chain";
        return res;
      }
      seen[residue] = chain.size() - 1;
    }

    auto nxt = ell_for(cur);
    if (!infinite) {
      // Finite data: follow the chain to the edge of the prefix. The
      // last link may land on a level with no witness of its own.
      if (!nxt) {
        res.chain = std::move(chain);
        res.status = CriterionStatus::Satisfied;
        res.partial = true;
        res.note = "criterion verified on the finite prefix only";
        return res;
      }
      chain.push_back(*nxt);
      continue;
    }

    if (!nxt) {
      res.status = CriterionStatus::Inconclusive;
      res.note = "chain broke at level " + std::to_string(cur);
      return res;
    }
    // The jump target must itself satisfy the criterion to keep going;
    // otherwise scan the remaining witnesses at this level.
    if (!ell_for(*nxt)) {
      const CriterionLevel* row = row_for(cur);
      long long shift = cur - row->n;
      std::optional<long long> alt;
      for (const auto& tr : row->tried) {
        long long cand = tr.ell + shift;
        if (tr.generated && tr.minimal && cand > cur && ell_for(cand)) {
          alt = cand;
          break;
        }
      }
      if (!alt) {
        res.status = CriterionStatus::Inconclusive;
        res.note = "no continuable generating depth at level " + std::to_string(cur);
        return res;
      }
      nxt = alt;
    }
    chain.push_back(*nxt);
    if (chain.size() > static_cast<size_t>(S + P * (max_depth + 2) + 8)) {
      res.status = CriterionStatus::Inconclusive;
      res.note = "chain did not close a period";
      return res;
    }
  }
}

BridgeMorphism build_bridge(const Premorphism& f, int n, int ell) {
  if (!f.scale.identity) {
    throw Error(Errc::InvalidArgument, "build_bridge expects a normalized (identity) scale");
  }
  auto code = tau_code(f.tau(n));
  if (!code) {
    throw Error(Errc::NotIndependent,
                "duplicate tau images at level " + std::to_string(n) +
                    "; the bridge factorization is ill-defined");
  }
  auto ir = is_independent(*code);
  if (!ir.independent) {
    throw Error(Errc::NotIndependent,
                "tau images at level " + std::to_string(n) + " are not independent");
  }

  BridgeMorphism bridge;
  bridge.level = n;
  bridge.witness_level = ell;
  auto composed = compose_morphisms(f.b1, n, ell);
  for (Sym v = 0; v < composed.size(); ++v) {
    auto fs = factorize(composed.image(v), *code, FactorizeMode::Greedy);
    if (fs.empty()) {
      throw Error(Errc::PostconditionFailure,
                  "sigma_[n,ell](" + f.b1.letter_name(ell, v) + ") is not generated by D_n");
    }
    Word img(fs[0].begin(), fs[0].end());
    bridge.map.images.push_back(std::move(img));
  }

  // (3): tau_n o bridge reproduces sigma^{B1}_{[n,ell]} letterwise.
  const LevelMorphism& tau_n = f.tau(n);
  for (Sym v = 0; v < composed.size(); ++v) {
    if (apply_morphism(tau_n, bridge.map.image(v)) != composed.image(v)) {
      throw Error(Errc::PostconditionFailure,
                  "bridge fails tau o G = E at letter " + f.b1.letter_name(ell, v));
    }
  }
  // (4): bridge o tau_ell reproduces sigma^{B2}_{[n,ell]} letterwise.
  auto b2_composed = compose_morphisms(f.b2, n, ell);
  const LevelMorphism& tau_ell = f.tau(ell);
  for (Sym w = 0; w < b2_composed.size(); ++w) {
    if (apply_morphism(bridge.map, tau_ell.image(w)) != b2_composed.image(w)) {
      throw Error(Errc::PostconditionFailure,
                  "bridge fails G o F = S at letter " + f.b2.letter_name(ell, w));
    }
  }
  return bridge;
}

EquivalenceCertificate interleave_and_certify(const Premorphism& f,
                                              const std::vector<long long>& chain,
                                              const std::vector<long long>& chain_steps,
                                              const std::vector<BridgeMorphism>& bridges) {
  if (chain.empty()) throw Error(Errc::InvalidArgument, "empty chain");
  if (bridges.size() + 1 != chain.size()) {
    throw Error(Errc::InvalidArgument, "need one bridge per consecutive chain pair");
  }

  EquivalenceCertificate cert;
  Diagram inter;
  auto root = compose_morphisms(f.b1, 0, static_cast<int>(chain[0]));
  for (size_t i = 0; i < chain.size(); ++i) {
    int level = static_cast<int>(chain[i]);
    if (i == 0) {
      inter.add_level(f.b1.level_names(level), root);
    } else {
      inter.add_level(f.b1.level_names(level), bridges[i - 1].map);
    }
    inter.add_level(f.b2.level_names(level), f.tau(level));
  }

  // Base identity: the even side's first level must read the B2 root
  // multiplicities.
  {
    const LevelMorphism& tau0 = f.tau(static_cast<int>(chain[0]));
    auto b2_root = compose_morphisms(f.b2, 0, static_cast<int>(chain[0]));
    for (Sym w = 0; w < tau0.size(); ++w) {
      if (apply_morphism(root, tau0.image(w)).size() != b2_root.image(w).size()) {
        throw Error(Errc::AssumptionDrift, "base identity E1 o F1 = S1 fails");
      }
    }
  }

  if (!chain_steps.empty()) {
    int c = static_cast<int>(chain_steps.size());
    int pos0 = static_cast<int>(chain.size()) - 1 - c;
    if (pos0 < 0) throw Error(Errc::InvalidArgument, "chain shorter than its step pattern");
    inter.set_tail(Tail{2 * pos0 + 3, 2 * c});
  }
  cert.interleaved = std::move(inter);

  cert.spec_a.indices = {0};
  for (long long e : chain) cert.spec_a.indices.push_back(e);
  cert.spec_a.tail_steps = chain_steps;
  cert.spec_a.validate();
  cert.spec_b = cert.spec_a;
  return cert;
}

ConjugacyOutcome conjugacy_certify(const Premorphism& input, int max_depth) {
  ConjugacyOutcome out;
  auto normalized = normalize_scale_with_spec(input);
  const Premorphism& f = normalized.f;
  auto report = validate_premorphism(f);
  if (!report.ok()) {
    throw Error(Errc::InvalidArgument, "premorphism does not validate: " + report.to_string());
  }

  out.criterion = criterion_check(f, max_depth);
  out.status = out.criterion.status;
  out.partial = out.criterion.partial;
  out.note = out.criterion.note;
  if (out.status != CriterionStatus::Satisfied) return out;

  std::vector<BridgeMorphism> bridges;
  for (size_t i = 0; i + 1 < out.criterion.chain.size(); ++i) {
    bridges.push_back(build_bridge(f, static_cast<int>(out.criterion.chain[i]),
                                   static_cast<int>(out.criterion.chain[i + 1])));
  }
  auto cert = interleave_and_certify(f, out.criterion.chain, out.criterion.chain_steps, bridges);
  cert.path_a = input.b1_path;
  cert.path_b = input.b2_path;
  if (normalized.b2_spec) {
    cert.spec_b = compose_specs(*normalized.b2_spec, cert.spec_b);
  }
  auto verdict = verify_equivalence_certificate(cert, input.b1, input.b2);
  if (!verdict.verified) {
    throw Error(Errc::AssumptionDrift,
                "emitted conjugacy certificate failed to verify: " + verdict.message);
  }
  out.certificate = std::move(cert);
  return out;
}

}  // namespace obd
