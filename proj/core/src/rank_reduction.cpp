#include "obd/rank_reduction.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
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

// Assumption (4) at (n, m): sigma_{[n,m]} o tau_m connects every letter
// of V_n to every letter of W_m. Decided on letter supports so deep
// compositions never materialize words.
bool tau_fully_connecting(const Premorphism& f, long long n, long long m) {
  if (!f.tau_representable(static_cast<int>(m))) return false;
  const LevelMorphism& tau = f.tau(static_cast<int>(m));
  int base = f.b1.alphabet_size(static_cast<int>(n));
  // support[v] = letters of V_n occurring in sigma_{[n,m]}(v)
  std::vector<std::vector<char>> support(static_cast<size_t>(base));
  for (int v = 0; v < base; ++v) {
    support[static_cast<size_t>(v)].assign(static_cast<size_t>(base), 0);
    support[static_cast<size_t>(v)][static_cast<size_t>(v)] = 1;
  }
  for (long long lvl = n + 1; lvl <= m; ++lvl) {
    const auto& mor = f.b1.morphism(static_cast<int>(lvl));
    std::vector<std::vector<char>> next(static_cast<size_t>(mor.size()));
    for (Sym v = 0; v < mor.size(); ++v) {
      auto& row = next[static_cast<size_t>(v)];
      row.assign(static_cast<size_t>(base), 0);
      for (Sym w : mor.image(v)) {
        const auto& src = support[static_cast<size_t>(w)];
        for (int u = 0; u < base; ++u) row[static_cast<size_t>(u)] |= src[static_cast<size_t>(u)];
      }
    }
    support = std::move(next);
  }
  for (Sym w = 0; w < tau.size(); ++w) {
    std::vector<char> hit(static_cast<size_t>(base), 0);
    for (Sym v : tau.image(w)) {
      const auto& src = support[static_cast<size_t>(v)];
      for (int u = 0; u < base; ++u) hit[static_cast<size_t>(u)] |= src[static_cast<size_t>(u)];
    }
    for (int u = 0; u < base; ++u) {
      if (!hit[static_cast<size_t>(u)]) return false;
    }
  }
  return true;
}

struct ProperStep {
  long long next;
  Sym vmin;
  Sym vmax;
};

// Assumptions (1)-(3) for one telescoped step out of `n`: the smallest
// n' >= lo whose composed matrix is positive, whose composed images all
// share first and last letters, and whose alphabet keeps two letters.
std::optional<ProperStep> select_next_level(const Diagram& b1, long long n, long long lo,
                                            int max_depth, std::string* why) {
  auto pos = positive_reach(b1, static_cast<int>(n), max_depth);
  if (!pos) {
    *why = "assumption (1): no positive incidence product within max_depth of level " +
           std::to_string(n);
    return std::nullopt;
  }
  std::vector<Sym> first, last;
  bool proper_seen = false;
  for (long long nxt = n + 1; nxt <= n + max_depth; ++nxt) {
    if (!b1.representable(static_cast<int>(nxt))) break;
    const auto& mor = b1.morphism(static_cast<int>(nxt));
    std::vector<Sym> nf(static_cast<size_t>(mor.size())), nl(static_cast<size_t>(mor.size()));
    for (Sym v = 0; v < mor.size(); ++v) {
      const Word& img = mor.image(v);
      nf[static_cast<size_t>(v)] = nxt == n + 1 ? img.front() : first[static_cast<size_t>(img.front())];
      nl[static_cast<size_t>(v)] = nxt == n + 1 ? img.back() : last[static_cast<size_t>(img.back())];
    }
    first = std::move(nf);
    last = std::move(nl);
    bool proper = std::all_of(first.begin(), first.end(), [&](Sym x) { return x == first[0]; }) &&
                  std::all_of(last.begin(), last.end(), [&](Sym x) { return x == last[0]; });
    if (!proper) continue;
    proper_seen = true;
    if (nxt < std::max(lo, static_cast<long long>(*pos))) continue;
    if (b1.alphabet_size(static_cast<int>(nxt)) < 2) continue;
    return ProperStep{nxt, first[0], last[0]};
  }
  *why = proper_seen
             ? "assumption (3): no proper level with two letters within max_depth of level " +
                   std::to_string(n)
             : "assumption (2): no telescoped step out of level " + std::to_string(n) +
                   " has common first and last letters within max_depth";
  return std::nullopt;
}

std::vector<std::string> word_names(const Diagram& d, int level_of_letters, const Code& W) {
  bool single = true;
  for (const auto& name : d.level_names(level_of_letters)) {
    if (name.size() != 1) single = false;
  }
  if (single) {
    std::set<std::string> seen;
    std::vector<std::string> names;
    bool distinct = true;
    for (int i = 0; i < W.size(); ++i) {
      std::string joined;
      for (Sym v : W[i]) joined += d.letter_name(level_of_letters, v);
      distinct = distinct && seen.insert(joined).second;
      names.push_back(joined);
    }
    if (distinct) return names;
  }
  std::vector<std::string> names;
  for (int i = 0; i < W.size(); ++i) names.push_back("c" + std::to_string(i));
  return names;
}

const LevelWitness& witness_at(const PreparedTriple& t, long long level) {
  if (level < static_cast<long long>(t.witnesses.size())) {
    return t.witnesses[static_cast<size_t>(level)];
  }
  if (!t.f.tau_tail) {
    throw Error(Errc::LevelOutOfRange,
                "no witness for prepared level " + std::to_string(level));
  }
  return t.witnesses.back();
}

}  // namespace

PrepareResult preprocess_assumptions(const Premorphism& input, int max_depth) {
  if (max_depth < 1) throw Error(Errc::InvalidArgument, "max_depth must be >= 1");
  PrepareResult res;

  Premorphism norm = normalize_scale(input);
  auto report = validate_premorphism(norm);
  if (!report.ok()) {
    throw Error(Errc::InvalidArgument, "premorphism does not validate: " + report.to_string());
  }
  if (diagram_rank(norm.b1) == 1) {
    res.status = PrepareStatus::RankOne;
    res.note = "B1 has rank one; nothing to prove";
    return res;
  }

  bool infinite = norm.b1.tail() && norm.b2.tail() && norm.tau_tail;
  long long S = 0, P = 1;
  if (infinite) {
    S = std::max<long long>({norm.b1.tail()->start, norm.b2.tail()->start, norm.tau_tail->start});
    P = std::lcm(std::lcm<long long>(norm.b1.tail()->period, norm.b2.tail()->period),
                 static_cast<long long>(norm.tau_tail->period));
  }

  std::vector<long long> ns{0};
  std::vector<long long> ms{0};
  std::vector<LevelWitness> witnesses;
  witnesses.push_back(LevelWitness{0, 0, 0, 0, false, true});

  // State for periodic closure: level residue plus the tau lookahead.
  std::map<std::pair<long long, long long>, size_t> seen;
  long long close_at = -1;  // index j whose state recurs
  long long hard_cap = S + P * (static_cast<long long>(max_depth) + 2) + 8;

  while (true) {
    long long k = static_cast<long long>(ns.size());  // selecting n_k, m_k
    std::string why;
    auto step = select_next_level(norm.b1, ns.back(), std::max(ms.back(), ns.back() + 1),
                                  max_depth, &why);
    if (!step) {
      if (!infinite && !norm.b1.representable(static_cast<int>(ns.back()) + 1)) break;
      res.status = PrepareStatus::Inconclusive;
      res.note = why;
      return res;
    }
    witnesses.back().vmin = step->vmin;
    witnesses.back().vmax = step->vmax;

    long long m = -1;
    for (long long cand = std::max(step->next, ms.back() + 1);
         cand <= step->next + max_depth; ++cand) {
      if (!norm.b1.representable(static_cast<int>(cand)) ||
          !norm.b2.representable(static_cast<int>(cand))) {
        break;
      }
      if (tau_fully_connecting(norm, step->next, cand)) {
        m = cand;
        break;
      }
    }
    if (m < 0) {
      if (!infinite) break;
      res.status = PrepareStatus::Inconclusive;
      // Positivity forces full connection, so a missing positive
      // product is the sharper diagnosis.
      if (!positive_reach(norm.b1, static_cast<int>(step->next), max_depth)) {
        res.note = "assumption (1): no positive incidence product within max_depth of level " +
                   std::to_string(step->next);
      } else {
        res.note = "assumption (4): tau does not connect every pair within max_depth of level " +
                   std::to_string(step->next);
      }
      return res;
    }

    ns.push_back(step->next);
    ms.push_back(m);
    witnesses.push_back(LevelWitness{step->next, m, 0, 0,
                                     norm.b1.alphabet_size(static_cast<int>(step->next)) >= 2,
                                     true});

    if (infinite && step->next >= S) {
      auto state = std::make_pair((step->next - S) % P, m - step->next);
      auto it = seen.find(state);
      if (it != seen.end()) {
        close_at = static_cast<long long>(it->second);
        break;
      }
      seen[state] = static_cast<size_t>(k);
    }
    if (k > hard_cap) {
      res.status = PrepareStatus::Inconclusive;
      res.note = "telescoping search did not close a period";
      return res;
    }
  }

  if (infinite && close_at < 0) {
    res.status = PrepareStatus::Inconclusive;
    res.note = "telescoping search did not close a period";
    return res;
  }
  if (ns.size() < 2) {
    res.status = PrepareStatus::Inconclusive;
    res.note = "diagram too shallow to prepare even one level";
    return res;
  }

  PreparedTriple triple;
  triple.b1_spec.indices.assign(ns.begin(), ns.end());
  triple.b2_spec.indices.assign(ms.begin(), ms.end());

  long long levels;  // prepared levels to materialize tau for
  if (infinite) {
    // Merge the detected cycle into one arithmetic step; compositions of
    // proper positive steps stay proper and positive.
    long long j = close_at;
    long long T = ns.back() - ns[static_cast<size_t>(j)];
    triple.b1_spec.indices.resize(static_cast<size_t>(j) + 1);
    triple.b2_spec.indices.resize(static_cast<size_t>(j) + 1);
    triple.b1_spec.tail_steps = {T};
    triple.b2_spec.tail_steps = {T};
    witnesses.resize(static_cast<size_t>(j) + 1);
    witnesses.push_back(LevelWitness{ns[static_cast<size_t>(j)] + T,
                                     ms[static_cast<size_t>(j)] + T, witnesses.back().vmin,
                                     witnesses.back().vmax, witnesses.back().card_ge2, true});
    levels = j + 1;
  } else {
    levels = static_cast<long long>(ns.size()) - 1;
  }

  triple.f.b1 = telescope(norm.b1, triple.b1_spec);
  triple.f.b2 = telescope(norm.b2, triple.b2_spec);
  triple.f.b1_path = norm.b1_path;
  triple.f.scale.identity = true;
  for (long long k = 1; k <= levels; ++k) {
    long long nk = triple.b1_spec.at(k);
    long long mk = triple.b2_spec.at(k);
    auto down = compose_morphisms(norm.b1, static_cast<int>(nk), static_cast<int>(mk));
    const LevelMorphism& tau = norm.tau(static_cast<int>(mk));
    LevelMorphism prepared_tau;
    for (Sym w = 0; w < tau.size(); ++w) {
      prepared_tau.images.push_back(apply_morphism(down, tau.image(w)));
    }
    triple.f.taus.push_back(std::move(prepared_tau));
  }
  if (infinite) triple.f.tau_tail = Tail{static_cast<int>(levels), 1};
  triple.witnesses = std::move(witnesses);

  auto check = validate_premorphism(triple.f);
  if (!check.ok()) {
    throw Error(Errc::AssumptionDrift,
                "prepared premorphism fails validation: " + check.to_string());
  }
  res.status = PrepareStatus::Prepared;
  res.triple = std::move(triple);
  return res;
}

CoverBasis cover_basis(const PreparedTriple& t, int n, int max_depth) {
  const Premorphism& f = t.f;
  if (n < 1 || !f.tau_representable(n)) {
    throw Error(Errc::LevelOutOfRange, "prepared level " + std::to_string(n) + " unavailable");
  }
  const LevelMorphism& tau_n = f.tau(n);
  size_t tau_max = 0;
  for (Sym w = 0; w < tau_n.size(); ++w) tau_max = std::max(tau_max, tau_n.image(w).size());

  // Condition (7): first ell whose boundary anchors outgrow every tau
  // image at level n.
  int ell = -1;
  for (int cand = n + 2; cand <= n + max_depth; ++cand) {
    if (!f.b1.representable(cand) || !f.tau_representable(cand)) {
      throw Error(Errc::LevelOutOfRange, "representation ends before condition (7) is met");
    }
    const LevelWitness& wit = witness_at(t, cand - 1);
    auto prod = incidence_product(f.b1, n, cand - 1);
    unsigned long long len_min = 0, len_max = 0;
    for (int c = 0; c < prod.cols; ++c) {
      len_min += prod.at(wit.vmin, c);
      len_max += prod.at(wit.vmax, c);
    }
    if (len_min > tau_max && len_max > tau_max) {
      ell = cand;
      break;
    }
  }
  if (ell < 0) {
    throw Error(Errc::LevelOutOfRange, "condition (7) not reached within max_depth");
  }

  const Sym w0 = 0;
  const Word& tau_w0 = f.tau(ell).image(w0);
  {
    std::vector<char> hit(static_cast<size_t>(f.b1.alphabet_size(ell)), 0);
    for (Sym v : tau_w0) hit[static_cast<size_t>(v)] = 1;
    for (size_t i = 0; i < hit.size(); ++i) {
      if (!hit[i]) {
        throw Error(Errc::AssumptionDrift, "tau(w0) misses a letter of V_ell");
      }
    }
  }

  auto imgs = compose_morphisms(f.b1, n, ell);          // V_ell -> V_n^*
  auto sigma_b2 = compose_morphisms(f.b2, n, ell);      // W_ell -> W_n^*
  const Word& b2_word = sigma_b2.image(w0);

  Word Z;
  std::vector<size_t> vbounds;  // interior boundaries of the V-blocks
  for (size_t q = 0; q < tau_w0.size(); ++q) {
    const Word& block = imgs.image(tau_w0[q]);
    Z.insert(Z.end(), block.begin(), block.end());
    if (q + 1 < tau_w0.size()) vbounds.push_back(Z.size());
  }
  std::vector<size_t> zstart;  // start offset of each tau-block
  {
    Word flat;
    for (Sym wj : b2_word) {
      zstart.push_back(flat.size());
      const Word& z = tau_n.image(wj);
      flat.insert(flat.end(), z.begin(), z.end());
    }
    if (flat != Z) {
      throw Error(Errc::AssumptionDrift, "ordered commutativity failed on the cover word");
    }
  }

  std::vector<CoverCut> cuts;
  for (size_t b : vbounds) {
    size_t j = static_cast<size_t>(
                   std::upper_bound(zstart.begin(), zstart.end(), b) - zstart.begin()) - 1;
    CoverCut cut;
    cut.z_index = static_cast<int>(j);
    if (zstart[j] != b) {
      size_t zend = j + 1 < zstart.size() ? zstart[j + 1] : Z.size();
      cut.s.assign(Z.begin() + static_cast<long>(zstart[j]), Z.begin() + static_cast<long>(b));
      cut.t.assign(Z.begin() + static_cast<long>(b), Z.begin() + static_cast<long>(zend));
    }
    cuts.push_back(std::move(cut));
  }

  const LevelWitness& wit = witness_at(t, ell - 1);
  auto anchors = compose_morphisms(f.b1, n, ell - 1);
  const Word& s_anchor = anchors.image(wit.vmax);
  const Word& t_anchor = anchors.image(wit.vmin);

  Code cover;
  for (Sym w = 0; w < tau_n.size(); ++w) {
    const Word& word = tau_n.image(w);
    std::vector<std::pair<Word, Word>> pairs;
    for (const auto& cut : cuts) {
      if (cut.s.empty()) continue;
      if (concat(cut.s, cut.t) == word) pairs.emplace_back(cut.s, cut.t);
    }
    if (pairs.empty()) {
      cover.add(word);
      continue;
    }
    Code basis;
    try {
      basis = three_word_basis(word, pairs, s_anchor, t_anchor);
    } catch (const Error& e) {
      throw Error(Errc::AssumptionDrift,
                  std::string("three-word basis rejected engineered cuts: ") + e.what());
    }
    for (int i = 0; i < basis.size(); ++i) cover.add(basis[i]);
  }

  std::vector<Word> targets;
  for (Sym v = 0; v < imgs.size(); ++v) targets.push_back(imgs.image(v));
  Code pruned = minimal_generating_subset(cover, targets);

  if (pruned.size() > 3 * f.b2.alphabet_size(n)) {
    throw Error(Errc::AssumptionDrift, "cover basis exceeds 3 card(W_n)");
  }

  CoverBasis out;
  out.level = n;
  out.witness_level = ell;
  out.code = std::move(pruned);
  for (const auto& target : targets) {
    auto fs = factorize(target, out.code, FactorizeMode::Greedy);
    if (fs.empty()) throw Error(Errc::AssumptionDrift, "pruned cover lost a target");
    out.target_factorizations.push_back(fs[0]);
  }
  out.cuts = std::move(cuts);
  return out;
}

EquivalenceCertificate self_certificate(const Diagram& d, const std::string& path_a,
                                        const std::string& path_b) {
  EquivalenceCertificate cert;
  cert.path_a = path_a;
  cert.path_b = path_b;
  Diagram inter;
  for (int k = 1; k <= d.top_level(); ++k) {
    inter.add_level(d.level_names(k), d.morphism(k));
    LevelMorphism identity;
    for (Sym v = 0; v < d.alphabet_size(k); ++v) identity.images.push_back({v});
    inter.add_level(d.level_names(k), identity);
  }
  if (d.tail()) {
    inter.set_tail(Tail{2 * d.tail()->start - 1, 2 * d.tail()->period});
  }
  cert.interleaved = std::move(inter);
  cert.spec_a = TelescopeSpec::identity_spec(d.top_level(), d.tail().has_value());
  cert.spec_b = cert.spec_a;
  return cert;
}

RankReduceResult reduce_rank(const Premorphism& input, int max_depth) {
  RankReduceResult res;
  res.b2_rank = diagram_rank(input.b2);

  auto prep = preprocess_assumptions(input, max_depth);
  if (prep.status == PrepareStatus::RankOne) {
    res.status = PrepareStatus::RankOne;
    res.note = prep.note;
    res.reduced = input.b1;
    res.certificate = self_certificate(input.b1, input.b1_path, "");
    res.output_rank = diagram_rank(input.b1);
    return res;
  }
  if (prep.status == PrepareStatus::Inconclusive) {
    res.status = PrepareStatus::Inconclusive;
    res.note = prep.note;
    return res;
  }
  const PreparedTriple& t = *prep.triple;
  const Premorphism& f = t.f;

  bool infinite = f.tau_tail.has_value();
  long long S = 0, P = 1;
  if (infinite) {
    S = std::max<long long>({f.b1.tail()->start, f.b2.tail()->start, f.tau_tail->start});
    P = std::lcm(std::lcm<long long>(f.b1.tail()->period, f.b2.tail()->period),
                 static_cast<long long>(f.tau_tail->period));
  }

  std::vector<long long> ells{1};
  std::vector<CoverBasis> covers;
  std::map<long long, size_t> seen;  // residue -> position in ells
  long long cycle_start = -1, cycle_len = -1;

  while (true) {
    long long cur = ells.back();
    if (infinite && cur >= S) {
      long long residue = (cur - S) % P;
      auto it = seen.find(residue);
      if (it != seen.end()) {
        cycle_start = static_cast<long long>(it->second);
        cycle_len = static_cast<long long>(ells.size()) - 1 - cycle_start;
        break;
      }
      seen[residue] = ells.size() - 1;
    }
    CoverBasis cb;
    try {
      cb = cover_basis(t, static_cast<int>(cur), max_depth);
    } catch (const Error& e) {
      if (e.code() == Errc::LevelOutOfRange && !infinite && covers.size() >= 1) break;
      res.status = PrepareStatus::Inconclusive;
      res.note = e.what();
      return res;
    }
    ells.push_back(cb.witness_level);
    covers.push_back(std::move(cb));
    if (static_cast<long long>(covers.size()) > S + P * (max_depth + 2) + 8) {
      res.status = PrepareStatus::Inconclusive;
      res.note = "cover chain did not close a period";
      return res;
    }
  }

  long long emit;  // number of covers the output materializes
  if (infinite) {
    // One extra cover re-derives the period representative; its data
    // must replay the cycle start exactly.
    emit = cycle_start + cycle_len + 1;
    while (static_cast<long long>(covers.size()) < emit) {
      covers.push_back(cover_basis(t, static_cast<int>(ells[covers.size()]), max_depth));
      if (static_cast<long long>(ells.size()) == static_cast<long long>(covers.size())) {
        ells.push_back(covers.back().witness_level);
      }
    }
    const CoverBasis& a = covers[static_cast<size_t>(cycle_start)];
    const CoverBasis& b = covers[static_cast<size_t>(cycle_start + cycle_len)];
    if (a.code != b.code || a.target_factorizations != b.target_factorizations ||
        a.witness_level - ells[static_cast<size_t>(cycle_start)] !=
            b.witness_level - ells[static_cast<size_t>(cycle_start + cycle_len)]) {
      res.status = PrepareStatus::Inconclusive;
      res.note = "cover data did not repeat over the detected period";
      return res;
    }
  } else {
    emit = static_cast<long long>(covers.size());
  }

  // The reduced diagram: level i reads cover i-1, each vertex one code
  // word, images factorized over the previous cover.
  Diagram reduced;
  Diagram inter;
  for (long long i = 0; i < emit; ++i) {
    const CoverBasis& cb = covers[static_cast<size_t>(i)];
    auto names = word_names(f.b1, static_cast<int>(ells[static_cast<size_t>(i)]), cb.code);

    LevelMorphism down;  // C_i -> previous reduced level
    if (i == 0) {
      const auto& root = f.b1.morphism(1);
      for (int c = 0; c < cb.code.size(); ++c) {
        down.images.push_back(apply_morphism(root, cb.code[c]));
      }
    } else {
      const CoverBasis& prev = covers[static_cast<size_t>(i) - 1];
      for (int c = 0; c < cb.code.size(); ++c) {
        Word img;
        for (Sym v : cb.code[c]) {
          const auto& fs = prev.target_factorizations[static_cast<size_t>(v)];
          img.insert(img.end(), fs.begin(), fs.end());
        }
        down.images.push_back(std::move(img));
      }
    }
    reduced.add_level(names, down);

    // Interleaved: V_{ell_i} then C_{ell_i}.
    LevelMorphism into_v;
    if (i == 0) {
      into_v = f.b1.morphism(1);
    } else {
      const CoverBasis& prev = covers[static_cast<size_t>(i) - 1];
      for (const auto& fs : prev.target_factorizations) {
        Word img(fs.begin(), fs.end());
        into_v.images.push_back(std::move(img));
      }
    }
    inter.add_level(f.b1.level_names(static_cast<int>(ells[static_cast<size_t>(i)])), into_v);
    LevelMorphism embed;
    for (int c = 0; c < cb.code.size(); ++c) embed.images.push_back(cb.code[c]);
    inter.add_level(names, embed);
  }

  TelescopeSpec chain;  // prepared-level indices the odd side follows
  chain.indices = {0};
  for (long long i = 0; i < emit; ++i) chain.indices.push_back(ells[static_cast<size_t>(i)]);

  if (infinite) {
    reduced.set_tail(Tail{static_cast<int>(cycle_start) + 2, static_cast<int>(cycle_len)});
    inter.set_tail(Tail{2 * static_cast<int>(cycle_start) + 3, 2 * static_cast<int>(cycle_len)});
    std::vector<long long> steps;
    for (long long i = cycle_start; i < cycle_start + cycle_len; ++i) {
      steps.push_back(ells[static_cast<size_t>(i) + 1] - ells[static_cast<size_t>(i)]);
    }
    // Phase: the explicit chain ends at ells[emit-1] = position
    // cycle_start + cycle_len, so the next step starts the cycle anew.
    chain.tail_steps = steps;
  }
  chain.validate();

  EquivalenceCertificate cert;
  cert.path_a = input.b1_path;
  cert.interleaved = std::move(inter);
  cert.spec_a = compose_specs(t.b1_spec, chain);
  cert.spec_b = TelescopeSpec::identity_spec(reduced.top_level(), infinite);

  auto verdict = verify_equivalence_certificate(cert, input.b1, reduced);
  if (!verdict.verified) {
    throw Error(Errc::AssumptionDrift, "emitted certificate failed to verify: " + verdict.message);
  }

  res.status = PrepareStatus::Prepared;
  res.output_rank = diagram_rank(reduced);
  if (res.output_rank > 3 * res.b2_rank) {
    throw Error(Errc::AssumptionDrift, "rank bound violated");
  }
  res.note = infinite ? "reduced over prefix plus one period"
                      : "finite input; reduced over the represented prefix";
  res.reduced = std::move(reduced);
  res.certificate = std::move(cert);
  return res;
}

}  // namespace obd
