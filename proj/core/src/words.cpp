#include "obd/words.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace obd {

namespace {

std::string word_str(const Word& w) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < w.size(); ++i) {
    if (i) os << " ";
    os << w[i];
  }
  os << "]";
  return os.str();
}

bool is_prefix(const Word& p, const Word& w) {
  return p.size() <= w.size() && std::equal(p.begin(), p.end(), w.begin());
}

bool is_suffix(const Word& s, const Word& w) {
  return s.size() <= w.size() && std::equal(s.rbegin(), s.rend(), w.rbegin());
}

Word slice(const Word& w, size_t from, size_t to) {
  return Word(w.begin() + static_cast<long>(from), w.begin() + static_cast<long>(to));
}

}  // namespace

Word concat(const Word& a, const Word& b) {
  Word r = a;
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

bool has_period(const Word& w, int p) {
  if (p < 1) throw Error(Errc::InvalidArgument, "period must be >= 1");
  for (size_t i = 0; i + static_cast<size_t>(p) < w.size(); ++i) {
    if (w[i] != w[i + static_cast<size_t>(p)]) return false;
  }
  return true;
}

Code::Code(std::vector<Word> words) {
  for (auto& w : words) add(std::move(w));
}

bool Code::add(Word w) {
  if (w.empty()) throw Error(Errc::InvalidArgument, "code words must be nonempty");
  if (contains(w)) return false;
  words_.push_back(std::move(w));
  return true;
}

int Code::index_of(const Word& w) const {
  for (size_t i = 0; i < words_.size(); ++i) {
    if (words_[i] == w) return static_cast<int>(i);
  }
  return -1;
}

Word expand(const Code& c, const Factorization& f) {
  Word r;
  for (int idx : f) {
    const Word& w = c[idx];
    r.insert(r.end(), w.begin(), w.end());
  }
  return r;
}

std::optional<int> fine_wilf_reduce(const Word& w, const std::vector<int>& periods) {
  if (periods.empty()) throw Error(Errc::InvalidArgument, "empty period set");
  std::set<int> ps(periods.begin(), periods.end());
  long long sum = 0;
  int g = 0;
  for (int p : ps) {
    if (p < 1) throw Error(Errc::InvalidArgument, "period must be >= 1");
    if (!has_period(w, p)) {
      throw Error(Errc::PeriodViolation,
                  "claimed period " + std::to_string(p) + " is not a period of " + word_str(w));
    }
    sum += p;
    g = std::gcd(g, p);
  }
  if (static_cast<long long>(w.size()) < sum - g) return std::nullopt;
  if (!has_period(w, g)) {
    throw Error(Errc::AssumptionDrift, "gcd period failed despite length hypothesis");
  }
  return g;
}

Code three_word_basis(const Word& w, const std::vector<std::pair<Word, Word>>& pairs,
                      const Word& s, const Word& t) {
  if (s.size() < w.size() || t.size() < w.size()) {
    throw Error(Errc::HypothesisViolation, "|s| and |t| must be at least |w|");
  }
  for (const auto& [si, ti] : pairs) {
    if (concat(si, ti) != w) {
      throw Error(Errc::HypothesisViolation, "pair does not cut w: " + word_str(si) + " + " + word_str(ti));
    }
    if (!is_suffix(si, s)) {
      throw Error(Errc::HypothesisViolation, "s_i is not a suffix of s: " + word_str(si));
    }
    if (!is_prefix(ti, t)) {
      throw Error(Errc::HypothesisViolation, "t_i is not a prefix of t: " + word_str(ti));
    }
  }

  // Empty-sided cuts only require w itself to be generated. Since every
  // s_i is the prefix of w of its own length, equal lengths mean equal
  // pairs, so deduplication goes by |s_i|.
  std::vector<std::pair<Word, Word>> cuts;
  std::set<size_t> seen_lengths;
  for (const auto& pr : pairs) {
    if (pr.first.empty() || pr.second.empty()) continue;
    if (seen_lengths.insert(pr.first.size()).second) cuts.push_back(pr);
  }
  Code basis;
  if (cuts.empty()) {
    if (!pairs.empty() && !w.empty()) basis.add(w);
    return basis;
  }
  if (cuts.size() == 1) {
    basis.add(cuts[0].first);
    basis.add(cuts[0].second);
    return basis;
  }

  std::sort(cuts.begin(), cuts.end(),
            [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });

  std::vector<int> diffs;
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    diffs.push_back(static_cast<int>(cuts[i].first.size() - cuts[i + 1].first.size()));
  }
  auto h_opt = fine_wilf_reduce(w, diffs);
  if (!h_opt) throw Error(Errc::AssumptionDrift, "Fine-Wilf length hypothesis failed on cut differences");
  size_t h = static_cast<size_t>(*h_opt);

  // w = u^k u' with |u| = h and u' a proper prefix of u.
  size_t rem = w.size() % h;
  Word u = slice(w, 0, h);
  Word u_rest = slice(w, 0, rem);

  // All s_i share the residue d = |s_i| mod h, so they end in the same
  // prefix u_1 of u.
  size_t d = cuts[0].first.size() % h;
  Word u1 = slice(w, 0, d);
  Word u1p = slice(u, d, h);
  const Word& t1 = cuts[0].second;

  if (d == 0) {
    basis.add(u);
    if (!u_rest.empty()) basis.add(u_rest);
  } else if (d + t1.size() < h) {
    basis.add(u1);
    basis.add(u1p);
    basis.add(t1);
  } else {
    basis.add(u1);
    basis.add(u1p);
    if (!u_rest.empty()) basis.add(u_rest);
  }

  if (basis.size() > 3) throw Error(Errc::AssumptionDrift, "basis exceeded three words");
  for (const auto& [si, ti] : cuts) {
    if (factorize(si, basis, FactorizeMode::Greedy).empty() ||
        factorize(ti, basis, FactorizeMode::Greedy).empty()) {
      throw Error(Errc::AssumptionDrift, "constructed basis fails to generate a cut");
    }
  }
  return basis;
}

IndependenceResult is_independent(const Code& c) {
  IndependenceResult res;

  // Dangling-suffix search. A state is the overhang of one partial parse
  // over another; reaching the empty overhang closes two distinct parses
  // of the same word.
  struct StateInfo {
    int parent;   // -1 for an initial state
    int code;     // codeword appended to the trailing side (or the longer initial word)
    int init_short;
    bool swapped;
  };
  std::map<Word, int> id_of;
  std::vector<Word> states;
  std::vector<StateInfo> info;
  std::vector<int> queue;

  auto intern = [&](const Word& d, StateInfo si) -> bool {
    if (id_of.count(d)) return false;
    int id = static_cast<int>(states.size());
    id_of[d] = id;
    states.push_back(d);
    info.push_back(si);
    queue.push_back(id);
    return true;
  };

  auto reconstruct = [&](const StateInfo& last) {
    std::vector<std::pair<int, bool>> steps;  // (code appended, swapped-after)
    StateInfo cur = last;
    while (cur.parent >= 0) {
      steps.emplace_back(cur.code, cur.swapped);
      cur = info[static_cast<size_t>(cur.parent)];
    }
    steps.emplace_back(cur.code, cur.swapped);
    std::reverse(steps.begin(), steps.end());

    Factorization ahead{steps[0].first};   // the side currently in front
    Factorization behind{cur.init_short};  // the side being completed
    for (size_t i = 1; i < steps.size(); ++i) {
      behind.push_back(steps[i].first);
      if (steps[i].second) std::swap(ahead, behind);
    }
    res.independent = false;
    res.parse_a = ahead;
    res.parse_b = behind;
    res.witness = expand(c, ahead);
  };

  for (int i = 0; i < c.size(); ++i) {
    for (int j = 0; j < c.size(); ++j) {
      if (i == j) continue;
      if (is_prefix(c[i], c[j])) {
        Word d = slice(c[j], c[i].size(), c[j].size());
        intern(d, StateInfo{-1, j, i, false});
      }
    }
  }

  for (size_t qi = 0; qi < queue.size(); ++qi) {
    int sid = queue[qi];
    Word d = states[static_cast<size_t>(sid)];
    for (int k = 0; k < c.size(); ++k) {
      const Word& cw = c[k];
      if (cw.size() <= d.size()) {
        if (!is_prefix(cw, d)) continue;
        Word nd = slice(d, cw.size(), d.size());
        StateInfo si{sid, k, -1, false};
        if (nd.empty()) {
          reconstruct(si);
          return res;
        }
        intern(nd, si);
      } else {
        if (!is_prefix(d, cw)) continue;
        Word nd = slice(cw, d.size(), cw.size());
        intern(nd, StateInfo{sid, k, -1, true});
      }
    }
  }
  return res;
}

namespace {

std::vector<int> candidates_by_length(const Code& c) {
  std::vector<int> order(static_cast<size_t>(c.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return c[a].size() > c[b].size(); });
  return order;
}

bool greedy_search(const Word& w, const Code& c, const std::vector<int>& order, size_t pos,
                   std::vector<char>& dead, Factorization& out) {
  if (pos == w.size()) return true;
  if (dead[pos]) return false;
  for (int k : order) {
    const Word& cw = c[k];
    if (pos + cw.size() > w.size()) continue;
    if (!std::equal(cw.begin(), cw.end(), w.begin() + static_cast<long>(pos))) continue;
    out.push_back(k);
    if (greedy_search(w, c, order, pos + cw.size(), dead, out)) return true;
    out.pop_back();
  }
  dead[pos] = 1;
  return false;
}

void all_search(const Word& w, const Code& c, size_t pos, const std::vector<char>& reachable,
                Factorization& cur, std::vector<Factorization>& out) {
  if (pos == w.size()) {
    out.push_back(cur);
    return;
  }
  for (int k = 0; k < c.size(); ++k) {
    const Word& cw = c[k];
    if (pos + cw.size() > w.size()) continue;
    if (!reachable[pos + cw.size()]) continue;
    if (!std::equal(cw.begin(), cw.end(), w.begin() + static_cast<long>(pos))) continue;
    cur.push_back(k);
    all_search(w, c, pos + cw.size(), reachable, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<Factorization> factorize(const Word& w, const Code& c, FactorizeMode mode) {
  if (mode == FactorizeMode::Unique) {
    auto ir = is_independent(c);
    if (!ir.independent) {
      throw Error(Errc::NotIndependent, "code is not independent; witness " + word_str(ir.witness));
    }
  }
  if (w.empty()) return {Factorization{}};

  if (mode == FactorizeMode::All) {
    // Backward reachability prunes the enumeration.
    std::vector<char> reachable(w.size() + 1, 0);
    reachable[w.size()] = 1;
    for (size_t pos = w.size(); pos-- > 0;) {
      for (int k = 0; k < c.size() && !reachable[pos]; ++k) {
        const Word& cw = c[k];
        if (pos + cw.size() > w.size()) continue;
        if (!reachable[pos + cw.size()]) continue;
        if (std::equal(cw.begin(), cw.end(), w.begin() + static_cast<long>(pos))) reachable[pos] = 1;
      }
    }
    std::vector<Factorization> out;
    if (!reachable[0]) return out;
    Factorization cur;
    all_search(w, c, 0, reachable, cur, out);
    return out;
  }

  std::vector<char> dead(w.size() + 1, 0);
  Factorization f;
  auto order = candidates_by_length(c);
  if (!greedy_search(w, c, order, 0, dead, f)) return {};
  return {f};
}

Code minimal_generating_subset(const Code& c, const std::vector<Word>& targets) {
  auto generates = [&](const Code& sub) {
    for (const auto& t : targets) {
      if (factorize(t, sub, FactorizeMode::Greedy).empty()) return false;
    }
    return true;
  };
  if (!generates(c)) {
    throw Error(Errc::Ungenerated, "some target has no factorization over the code");
  }

  Code current = c;
  bool changed = true;
  while (changed) {
    changed = false;
    // Longest candidates are offered for removal first.
    std::vector<int> order(static_cast<size_t>(current.size()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      if (current[a].size() != current[b].size()) return current[a].size() > current[b].size();
      return current[a] > current[b];
    });
    for (int drop : order) {
      Code trial;
      for (int i = 0; i < current.size(); ++i) {
        if (i != drop) trial.add(current[i]);
      }
      if (generates(trial)) {
        current = trial;
        changed = true;
        break;
      }
    }
  }
  return current;
}

}  // namespace obd
