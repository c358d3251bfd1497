#include "obd/transforms.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "textio.hpp"

namespace obd {

TelescopeSpec TelescopeSpec::identity_spec(long long upto, bool tailed) {
  TelescopeSpec s;
  s.indices.clear();
  for (long long i = 0; i <= upto; ++i) s.indices.push_back(i);
  if (tailed) s.tail_steps = {1};
  return s;
}

long long TelescopeSpec::at(long long k) const {
  if (k < 0) throw Error(Errc::InvalidArgument, "negative spec index");
  if (k < static_cast<long long>(indices.size())) return indices[static_cast<size_t>(k)];
  if (tail_steps.empty()) {
    throw Error(Errc::LevelOutOfRange, "telescope spec has no index " + std::to_string(k));
  }
  long long g = static_cast<long long>(tail_steps.size());
  long long sum = 0;
  for (long long s : tail_steps) sum += s;
  long long d = k - static_cast<long long>(indices.size()) + 1;
  long long value = indices.back() + (d / g) * sum;
  for (long long i = 0; i < d % g; ++i) value += tail_steps[static_cast<size_t>(i)];
  return value;
}

void TelescopeSpec::validate() const {
  if (indices.empty() || indices[0] != 0) {
    throw Error(Errc::InvalidArgument, "telescope spec must start at 0");
  }
  for (size_t i = 1; i < indices.size(); ++i) {
    if (indices[i] <= indices[i - 1]) {
      throw Error(Errc::InvalidArgument, "telescope spec must be strictly increasing");
    }
  }
  for (long long s : tail_steps) {
    if (s < 1) throw Error(Errc::InvalidArgument, "telescope tail steps must be >= 1");
  }
}

std::string TelescopeSpec::to_string() const {
  std::ostringstream os;
  for (size_t i = 0; i < indices.size(); ++i) {
    if (i) os << " ";
    os << indices[i];
  }
  if (!tail_steps.empty()) {
    os << " tail";
    for (long long s : tail_steps) os << " +" << s;
  }
  return os.str();
}

TelescopeSpec parse_telescope_spec(const std::vector<std::string>& tokens,
                                   const std::string& source, int line) {
  TelescopeSpec s;
  s.indices.clear();
  size_t i = 0;
  while (i < tokens.size() && tokens[i] != "tail") {
    s.indices.push_back(textio::parse_int(source, line, tokens[i]));
    ++i;
  }
  if (i < tokens.size()) {
    ++i;
    if (i == tokens.size()) textio::fail(source, line, "expected 'tail +<step>...'");
    for (; i < tokens.size(); ++i) {
      if (tokens[i].size() < 2 || tokens[i][0] != '+') {
        textio::fail(source, line, "expected '+<step>' in telescope tail");
      }
      s.tail_steps.push_back(textio::parse_int(source, line, tokens[i].substr(1)));
    }
  }
  try {
    s.validate();
  } catch (const Error& e) {
    textio::fail(source, line, e.what());
  }
  return s;
}

TelescopeSpec compose_specs(const TelescopeSpec& s1, const TelescopeSpec& s2) {
  s1.validate();
  s2.validate();
  TelescopeSpec out;
  out.indices.clear();
  if (!s2.infinite()) {
    for (long long k = 0; k < static_cast<long long>(s2.indices.size()); ++k) {
      out.indices.push_back(s1.at(s2.at(k)));
    }
    return out;
  }
  if (!s1.infinite()) {
    throw Error(Errc::LevelOutOfRange, "inner spec is finite but outer spec extends forever");
  }
  if (s1.tail_steps.size() != 1) {
    throw Error(Errc::InvalidArgument,
                "composition through a patterned inner tail is not supported");
  }
  long long t1 = s1.tail_steps[0];
  long long len1 = static_cast<long long>(s1.indices.size());
  long long len2 = static_cast<long long>(s2.indices.size());
  long long kstar = std::max<long long>(1, len2 - 1);
  while (s2.at(kstar) < len1 - 1) ++kstar;
  for (long long k = 0; k <= kstar; ++k) out.indices.push_back(s1.at(s2.at(k)));
  // Beyond kstar every outer increment sits in the arithmetic zone of
  // s1, so the step pattern of s2 scales by t1. Align the phase of the
  // pattern with kstar + 1.
  long long g = static_cast<long long>(s2.tail_steps.size());
  long long phase = (kstar + 1 - len2) % g;
  for (long long i = 0; i < g; ++i) {
    out.tail_steps.push_back(t1 * s2.tail_steps[static_cast<size_t>((phase + i) % g)]);
  }
  out.validate();
  return out;
}

Diagram telescope(const Diagram& d, const TelescopeSpec& spec) {
  spec.validate();
  if (spec.infinite() && !d.tail()) {
    throw Error(Errc::LevelOutOfRange, "spec extends forever but the diagram is finite");
  }

  long long emit_upto;  // number of output levels materialized
  std::optional<Tail> out_tail;
  if (!spec.infinite()) {
    emit_upto = static_cast<long long>(spec.indices.size()) - 1;
    if (emit_upto == 0) throw Error(Errc::InvalidArgument, "telescope spec selects no level");
  } else {
    long long s = d.tail()->start;
    long long p = d.tail()->period;
    long long g = static_cast<long long>(spec.tail_steps.size());
    long long sum = 0;
    for (long long st : spec.tail_steps) sum += st;
    long long q = g * (p / std::gcd(sum, p));
    long long k0 = static_cast<long long>(spec.indices.size());
    if (k0 < 1) k0 = 1;
    while (spec.at(k0 - 1) < s) ++k0;
    emit_upto = k0 + q - 1;
    out_tail = Tail{static_cast<int>(k0), static_cast<int>(q)};
  }

  Diagram out;
  for (long long k = 1; k <= emit_upto; ++k) {
    long long lo = spec.at(k - 1);
    long long hi = spec.at(k);
    if (!d.representable(static_cast<int>(hi))) {
      throw Error(Errc::LevelOutOfRange, "telescope index " + std::to_string(hi) + " not represented");
    }
    out.add_level(d.level_names(static_cast<int>(hi)),
                  compose_morphisms(d, static_cast<int>(lo), static_cast<int>(hi)));
  }
  if (out_tail) out.set_tail(*out_tail);
  return out;
}

Diagram unroll_past(const Diagram& d, int level) {
  if (!d.tail() || d.tail()->start > level) return d;
  Diagram out;
  int s = d.tail()->start;
  int p = d.tail()->period;
  int new_start = s;
  while (new_start <= level) new_start += p;
  for (int n = 1; n < new_start + p; ++n) {
    out.add_level(d.level_names(n), d.morphism(n));
  }
  out.set_tail(Tail{new_start, p});
  return out;
}

namespace {

std::vector<std::string> generated_pack_names(const Diagram& d, int k, const Code& W) {
  bool single = true;
  for (const auto& name : d.level_names(k - 1)) {
    if (name.size() != 1) single = false;
  }
  std::vector<std::string> names;
  if (single) {
    std::map<std::string, int> seen;
    for (int i = 0; i < W.size(); ++i) {
      std::string joined;
      for (Sym v : W[i]) joined += d.letter_name(k - 1, v);
      seen[joined] += 1;
      names.push_back(joined);
    }
    bool distinct = true;
    for (const auto& [_, count] : seen) {
      if (count > 1) distinct = false;
    }
    if (distinct) return names;
  }
  names.clear();
  for (int i = 0; i < W.size(); ++i) names.push_back("c" + std::to_string(i));
  return names;
}

}  // namespace

Diagram pack(const Diagram& d, int k, const Code& W, std::vector<std::string> names) {
  if (k < 1 || !d.representable(k)) {
    throw Error(Errc::LevelOutOfRange, "pack level " + std::to_string(k) + " not represented");
  }
  if (W.empty()) throw Error(Errc::InvalidArgument, "empty packing set");
  int prev = d.alphabet_size(k - 1);
  for (int i = 0; i < W.size(); ++i) {
    for (Sym v : W[i]) {
      if (v < 0 || v >= prev) throw Error(Errc::InvalidArgument, "packing word letter out of range");
    }
  }

  const auto& mor = d.morphism(k);
  std::vector<Factorization> fixed(static_cast<size_t>(mor.size()));
  for (Sym v = 0; v < mor.size(); ++v) {
    auto f = factorize(mor.image(v), W, FactorizeMode::Greedy);
    if (f.empty()) {
      throw Error(Errc::NotCovered,
                  "sigma_" + std::to_string(k) + "(" + d.letter_name(k, v) +
                      ") has no factorization over the packing set");
    }
    fixed[static_cast<size_t>(v)] = f[0];
  }
  for (int drop = 0; drop < W.size(); ++drop) {
    Code trial;
    for (int i = 0; i < W.size(); ++i) {
      if (i != drop) trial.add(W[i]);
    }
    if (trial.empty()) continue;
    bool covers = true;
    for (Sym v = 0; v < mor.size() && covers; ++v) {
      covers = !factorize(mor.image(v), trial, FactorizeMode::Greedy).empty();
    }
    if (covers) {
      throw Error(Errc::NotMinimal, "packing set stays covering without word index " +
                                        std::to_string(drop) + "; prune it first");
    }
  }

  if (names.empty()) names = generated_pack_names(d, k, W);
  if (static_cast<int>(names.size()) != W.size()) {
    throw Error(Errc::InvalidArgument, "packing names do not match the packing set");
  }

  // Unrolling first keeps the shifted tail aligned, and admits packing
  // at a level inside the periodic zone.
  Diagram base = unroll_past(d, k);
  Diagram out;
  for (int n = 1; n < k; ++n) out.add_level(base.level_names(n), base.morphism(n));

  LevelMorphism insert;
  for (int i = 0; i < W.size(); ++i) insert.images.push_back(W[i]);
  out.add_level(names, insert);

  LevelMorphism above;
  for (Sym v = 0; v < mor.size(); ++v) {
    Word img;
    for (int idx : fixed[static_cast<size_t>(v)]) img.push_back(idx);
    above.images.push_back(img);
  }
  out.add_level(base.level_names(k), above);

  for (int n = k + 1; n <= base.top_level(); ++n) {
    out.add_level(base.level_names(n), base.morphism(n));
  }
  if (base.tail()) out.set_tail(Tail{base.tail()->start + 1, base.tail()->period});
  return out;
}

namespace {

// First/last letters of sigma_{[cur,n']}(v) for all v, advanced one
// level at a time.
struct EdgeLetterMaps {
  std::vector<Sym> first;
  std::vector<Sym> last;
};

bool constant(const std::vector<Sym>& xs) {
  return std::all_of(xs.begin(), xs.end(), [&](Sym x) { return x == xs[0]; });
}

}  // namespace

std::optional<ProperForm> proper_form_search(const Diagram& d, int max_depth) {
  if (max_depth < 1) throw Error(Errc::InvalidArgument, "max_depth must be >= 1");
  ProperForm result;
  result.spec.indices = {0};

  long long cur = 0;
  // Residue of a tail level at the moment the search first leaves the
  // prefix; meeting it again closes the period.
  std::map<long long, size_t> seen_residue;

  while (true) {
    if (!d.tail() && cur >= d.top_level()) break;
    if (d.tail() && cur >= d.tail()->start) {
      long long residue = (cur - d.tail()->start) % d.tail()->period;
      auto it = seen_residue.find(residue);
      if (it != seen_residue.end()) {
        long long prior = result.spec.indices[it->second];
        result.spec.tail_steps = {cur - prior};
        // Entries from it->second onward repeat; keep prefix + one period.
        result.spec.indices.resize(it->second + 1);
        result.level_min_max.resize(it->second + 1);
        result.spec.validate();
        return result;
      }
      seen_residue[residue] = result.spec.indices.size() - 1;
    }

    EdgeLetterMaps maps;
    bool found = false;
    for (int step = 1; step <= max_depth; ++step) {
      long long nxt = cur + step;
      if (!d.representable(static_cast<int>(nxt))) break;
      const auto& mor = d.morphism(static_cast<int>(nxt));
      EdgeLetterMaps next;
      next.first.resize(static_cast<size_t>(mor.size()));
      next.last.resize(static_cast<size_t>(mor.size()));
      for (Sym v = 0; v < mor.size(); ++v) {
        const Word& img = mor.image(v);
        if (img.empty()) return std::nullopt;
        Sym f = img.front();
        Sym l = img.back();
        next.first[static_cast<size_t>(v)] = step == 1 ? f : maps.first[static_cast<size_t>(f)];
        next.last[static_cast<size_t>(v)] = step == 1 ? l : maps.last[static_cast<size_t>(l)];
      }
      maps = std::move(next);
      if (constant(maps.first) && constant(maps.last)) {
        result.level_min_max.emplace_back(maps.first[0], maps.last[0]);
        result.spec.indices.push_back(nxt);
        cur = nxt;
        found = true;
        break;
      }
    }
    if (!found) return std::nullopt;
  }
  return result;
}

std::optional<int> positive_reach(const Diagram& d, int n, int max_depth) {
  if (max_depth < 1) throw Error(Errc::InvalidArgument, "max_depth must be >= 1");
  if (!d.representable(n)) throw Error(Errc::LevelOutOfRange, "level not represented");
  int base = d.alphabet_size(n);
  // reach[v][w]: some path connects w in V_n to v at the current level.
  std::vector<std::vector<char>> reach(static_cast<size_t>(base));
  for (int v = 0; v < base; ++v) {
    reach[static_cast<size_t>(v)].assign(static_cast<size_t>(base), 0);
    reach[static_cast<size_t>(v)][static_cast<size_t>(v)] = 1;
  }
  for (int N = n + 1; N <= n + max_depth; ++N) {
    if (!d.representable(N)) return std::nullopt;
    const auto& mor = d.morphism(N);
    std::vector<std::vector<char>> next(static_cast<size_t>(mor.size()));
    bool all = true;
    for (Sym v = 0; v < mor.size(); ++v) {
      auto& row = next[static_cast<size_t>(v)];
      row.assign(static_cast<size_t>(base), 0);
      for (Sym w : mor.image(v)) {
        const auto& src = reach[static_cast<size_t>(w)];
        for (int u = 0; u < base; ++u) row[static_cast<size_t>(u)] |= src[static_cast<size_t>(u)];
      }
      for (int u = 0; u < base; ++u) all = all && row[static_cast<size_t>(u)];
    }
    reach = std::move(next);
    if (all) return N;
  }
  return std::nullopt;
}

int diagram_rank(const Diagram& d) {
  int r = 0;
  for (int n = 1; n <= d.top_level(); ++n) r = std::max(r, d.alphabet_size(n));
  return r;
}

CertVerdict verify_equivalence_certificate(const EquivalenceCertificate& cert,
                                           const Diagram& a, const Diagram& b) {
  CertVerdict verdict;
  auto report = validate_diagram(cert.interleaved);
  if (!report.ok()) {
    verdict.message = "interleaved diagram invalid: " + report.to_string();
    return verdict;
  }
  const Diagram& inter = cert.interleaved;
  if (inter.tail() && inter.tail()->period % 2 != 0) {
    verdict.message = "interleaved tail period must be even to preserve alternation";
    return verdict;
  }

  TelescopeSpec odd;
  TelescopeSpec even;
  odd.indices = {0, 1};
  even.indices = {0};
  if (inter.tail()) {
    odd.tail_steps = {2};
    even.tail_steps = {2};
  } else {
    for (long long i = 3; i <= inter.top_level(); i += 2) odd.indices.push_back(i);
    for (long long i = 2; i <= inter.top_level(); i += 2) even.indices.push_back(i);
    if (even.indices.size() < 2) {
      verdict.message = "interleaved diagram too shallow to extract the even side";
      return verdict;
    }
  }

  try {
    Diagram odd_side = telescope(inter, odd);
    Diagram even_side = telescope(inter, even);
    Diagram expected_a = telescope(a, cert.spec_a);
    Diagram expected_b = telescope(b, cert.spec_b);

    auto diff_a = diff_unrolled(expected_a, odd_side);
    if (!diff_a.equal) {
      verdict.message = "odd side disagrees with diagram A along its spec";
      verdict.counterexample =
          CertCounterexample{"odd", diff_a.level, diff_a.subject, diff_a.expected, diff_a.actual};
      return verdict;
    }
    auto diff_b = diff_unrolled(expected_b, even_side);
    if (!diff_b.equal) {
      verdict.message = "even side disagrees with diagram B along its spec";
      verdict.counterexample =
          CertCounterexample{"even", diff_b.level, diff_b.subject, diff_b.expected, diff_b.actual};
      return verdict;
    }
  } catch (const Error& e) {
    verdict.message = e.what();
    return verdict;
  }
  verdict.verified = true;
  verdict.message = "certificate verified";
  return verdict;
}

EquivalenceCertificate parse_cert(const std::string& text, const std::string& source) {
  using namespace textio;
  auto lines = tokenize(text);
  if (lines.empty() || lines[0].tokens != std::vector<std::string>{"cert", "1"}) {
    fail(source, lines.empty() ? 1 : lines[0].number, "expected 'cert 1' header");
  }
  EquivalenceCertificate cert;
  std::ostringstream body;
  body << "obd 1\n";
  bool have_a = false, have_b = false, have_odd = false, have_even = false;
  for (size_t li = 1; li < lines.size(); ++li) {
    const auto& t = lines[li].tokens;
    if (t[0] == "A" || t[0] == "B") {
      if (t.size() != 3 || t[1] != "=") fail(source, lines[li].number, "expected 'A = <path>'");
      (t[0] == "A" ? cert.path_a : cert.path_b) = t[2];
      (t[0] == "A" ? have_a : have_b) = true;
    } else if (t[0] == "level" || t[0] == "morphism" || t[0] == "tail") {
      for (size_t i = 0; i < t.size(); ++i) body << (i ? " " : "") << t[i];
      body << "\n";
    } else if (t[0] == "telescope") {
      if (t.size() < 4 || (t[1] != "odd" && t[1] != "even") || t[2] != "=") {
        fail(source, lines[li].number, "expected 'telescope odd|even = <indices...>'");
      }
      auto spec = parse_telescope_spec(std::vector<std::string>(t.begin() + 3, t.end()), source,
                                       lines[li].number);
      (t[1] == "odd" ? cert.spec_a : cert.spec_b) = spec;
      (t[1] == "odd" ? have_odd : have_even) = true;
    } else {
      fail(source, lines[li].number, "unexpected '" + t[0] + "'");
    }
  }
  if (!have_a || !have_b) fail(source, 1, "certificate must reference diagrams A and B");
  if (!have_odd || !have_even) fail(source, 1, "certificate must carry both telescope specs");
  cert.interleaved = parse_obd(body.str(), source + ":interleaved");
  return cert;
}

EquivalenceCertificate load_cert(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::ParseError, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_cert(buf.str(), path);
}

std::string emit_cert(const EquivalenceCertificate& cert) {
  std::ostringstream os;
  os << "cert 1\n";
  os << "A = " << cert.path_a << "\n";
  os << "B = " << cert.path_b << "\n";
  std::string body = emit_obd(cert.interleaved);
  os << body.substr(body.find('\n') + 1);
  os << "telescope odd = " << cert.spec_a.to_string() << "\n";
  os << "telescope even = " << cert.spec_b.to_string() << "\n";
  return os.str();
}

void save_cert(const EquivalenceCertificate& cert, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::ParseError, "cannot write '" + path + "'");
  out << emit_cert(cert);
}

std::pair<Diagram, Diagram> load_cert_diagrams(const EquivalenceCertificate& cert,
                                               const std::string& cert_path) {
  namespace fs = std::filesystem;
  fs::path base = fs::path(cert_path).parent_path();
  auto resolve = [&](const std::string& p) {
    fs::path candidate(p);
    if (candidate.is_absolute()) return candidate.string();
    return (base / candidate).string();
  };
  return {load_obd(resolve(cert.path_a)), load_obd(resolve(cert.path_b))};
}

}  // namespace obd
