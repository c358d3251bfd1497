#include "obd/premorphism.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "obd/transforms.hpp"
#include "textio.hpp"

namespace obd {

long long ScaleSpec::at(long long n) const {
  if (n < 0) throw Error(Errc::InvalidArgument, "scale index must be >= 0");
  if (n == 0) return 0;
  if (identity) return n;
  if (n <= static_cast<long long>(prefix.size())) return prefix[static_cast<size_t>(n) - 1];
  if (!tail_step) {
    throw Error(Errc::LevelOutOfRange, "scale has no value at " + std::to_string(n));
  }
  long long base = prefix.empty() ? 0 : prefix.back();
  return base + (n - static_cast<long long>(prefix.size())) * *tail_step;
}

bool ScaleSpec::representable(long long n) const {
  return n >= 0 && (identity || tail_step || n <= static_cast<long long>(prefix.size()));
}

bool ScaleSpec::cofinal() const {
  if (identity) return true;
  return tail_step.has_value() && *tail_step >= 1;
}

std::string ScaleSpec::to_string() const {
  if (identity) return "identity";
  std::ostringstream os;
  for (size_t i = 0; i < prefix.size(); ++i) {
    if (i) os << " ";
    os << prefix[i];
  }
  if (tail_step) {
    if (!prefix.empty()) os << " ";
    os << "tail +" << *tail_step;
  }
  return os.str();
}

bool Premorphism::tau_representable(int n) const {
  if (n < 1) return false;
  return tau_tail.has_value() || n <= tau_top();
}

const LevelMorphism& Premorphism::tau(int n) const {
  if (!tau_representable(n)) {
    throw Error(Errc::LevelOutOfRange, "tau level " + std::to_string(n) + " not represented");
  }
  int ref = n <= tau_top()
                ? n
                : tau_tail->start + static_cast<int>((static_cast<long long>(n) - tau_tail->start) %
                                                     tau_tail->period);
  return taus[static_cast<size_t>(ref) - 1];
}

CheckWindow premorphism_window(const Premorphism& f) {
  CheckWindow w;
  bool b1_inf = f.b1.tail().has_value();
  bool b2_inf = f.b2.tail().has_value();
  bool tau_inf = f.tau_tail.has_value();
  bool scale_inf = f.scale.identity || f.scale.tail_step.has_value();

  // The finite ceiling: the largest n such that the check at n-1 still
  // has all its data.
  long long ceiling = std::numeric_limits<long long>::max();
  if (!b1_inf) ceiling = std::min(ceiling, static_cast<long long>(f.b1.top_level()));
  if (!tau_inf) ceiling = std::min(ceiling, static_cast<long long>(f.tau_top()));
  if (!scale_inf) ceiling = std::min(ceiling, static_cast<long long>(f.scale.prefix.size()));
  if (!b2_inf) {
    long long n = 0;
    while (f.scale.representable(n + 1) && f.scale.at(n + 1) <= f.b2.top_level() &&
           n + 1 <= ceiling) {
      ++n;
    }
    ceiling = std::min(ceiling, n);
  }

  if (b1_inf && b2_inf && tau_inf && scale_inf && f.scale.cofinal()) {
    long long p1 = f.b1.tail()->period;
    long long pt = f.tau_tail->period;
    long long t = f.scale.identity ? 1 : *f.scale.tail_step;
    long long p2 = f.b2.tail()->period;
    long long pscale = t == 0 ? 1 : p2 / std::gcd(t, p2);
    long long period = std::lcm(std::lcm(p1, pt), pscale);
    long long start = std::max<long long>(f.b1.tail()->start, f.tau_tail->start);
    start = std::max<long long>(start, static_cast<long long>(f.scale.prefix.size()) + 1);
    long long n0 = 1;
    while (f.scale.at(n0) < f.b2.tail()->start) ++n0;
    start = std::max(start, n0);
    w.levels = static_cast<int>(start + period);
    w.periodic = true;
    return w;
  }
  // A degenerate unbounded-but-aperiodic combination (a non-cofinal
  // scale over infinite diagrams) gets a finite spot check.
  w.levels = static_cast<int>(std::min<long long>(ceiling, 256));
  w.periodic = false;
  return w;
}

namespace {

// tau_n applied letterwise to a word over W_{f_n}.
Word apply_tau(const LevelMorphism& tau, const Word& w) {
  Word out;
  for (Sym x : w) {
    const Word& img = tau.image(x);
    out.insert(out.end(), img.begin(), img.end());
  }
  return out;
}

bool tau_structurally_ok(const Premorphism& f, int n, ValidationReport* report) {
  const LevelMorphism& tau = f.tau(n);
  long long fn = f.scale.at(n);
  int domain = f.b2.alphabet_size(static_cast<int>(fn));
  int codomain = f.b1.alphabet_size(n);
  bool ok = true;
  if (tau.size() != domain) {
    if (report) {
      report->violations.push_back({n, "tau",
                                    "tau domain has " + std::to_string(tau.size()) +
                                        " letters but W_" + std::to_string(fn) + " has " +
                                        std::to_string(domain)});
    }
    return false;
  }
  std::vector<char> covered(static_cast<size_t>(codomain), 0);
  for (Sym w = 0; w < tau.size(); ++w) {
    const Word& img = tau.image(w);
    if (img.empty()) {
      if (report) {
        report->violations.push_back(
            {n, f.b2.letter_name(static_cast<int>(fn), w), "empty tau image"});
      }
      ok = false;
    }
    for (Sym v : img) {
      if (v < 0 || v >= codomain) {
        if (report) {
          report->violations.push_back({n, f.b2.letter_name(static_cast<int>(fn), w),
                                        "tau image letter out of range"});
        }
        return false;
      }
      covered[static_cast<size_t>(v)] = 1;
    }
  }
  for (Sym v = 0; v < codomain; ++v) {
    if (!covered[static_cast<size_t>(v)]) {
      if (report) {
        report->violations.push_back(
            {n, f.b1.letter_name(n, v), "letter of V_n not connected by the premorphism"});
      }
      ok = false;
    }
  }
  return ok;
}

}  // namespace

ValidationReport validate_premorphism(const Premorphism& f) {
  ValidationReport report;
  auto r1 = validate_diagram(f.b1);
  for (auto& v : r1.violations) {
    report.violations.push_back({v.level, "B1 " + v.subject, v.message});
  }
  auto r2 = validate_diagram(f.b2);
  for (auto& v : r2.violations) {
    report.violations.push_back({v.level, "B2 " + v.subject, v.message});
  }
  if (!report.ok()) return report;

  if (f.taus.empty()) {
    report.violations.push_back({0, "tau", "premorphism carries no tau levels"});
    return report;
  }
  if (!f.scale.identity) {
    long long prev = 0;
    for (size_t i = 0; i < f.scale.prefix.size(); ++i) {
      if (f.scale.prefix[i] < prev) {
        report.violations.push_back(
            {static_cast<int>(i) + 1, "scale", "scale must be nondecreasing"});
        return report;
      }
      prev = f.scale.prefix[i];
    }
    if (f.scale.tail_step && *f.scale.tail_step < 0) {
      report.violations.push_back({0, "scale", "scale tail step must be >= 0"});
      return report;
    }
  }

  bool all_infinite = f.b1.tail() && f.b2.tail() && f.tau_tail &&
                      (f.scale.identity || f.scale.tail_step.has_value());
  if (all_infinite && !f.scale.cofinal()) {
    report.violations.push_back({0, "scale", "scale is not cofinal"});
  }

  auto window = premorphism_window(f);
  for (int n = 1; n <= window.levels; ++n) {
    tau_structurally_ok(f, n, &report);
  }
  if (!report.ok()) return report;

  for (int n = 0; n < window.levels; ++n) {
    long long fn = f.scale.at(n);
    long long fn1 = f.scale.at(n + 1);
    const LevelMorphism& tau_next = f.tau(n + 1);
    auto sigma_b2 = compose_morphisms(f.b2, static_cast<int>(fn), static_cast<int>(fn1));
    if (n == 0) {
      auto root_b1 = f.b1.morphism(1);
      for (Sym w = 0; w < sigma_b2.size(); ++w) {
        size_t lhs = sigma_b2.image(w).size();
        size_t rhs = 0;
        for (Sym v : tau_next.image(w)) rhs += root_b1.image(v).size();
        if (lhs != rhs) {
          report.violations.push_back(
              {0, f.b2.letter_name(static_cast<int>(fn1), w),
               "root commutativity fails: " + std::to_string(lhs) + " root edges in B2 vs " +
                   std::to_string(rhs) + " through tau"});
        }
      }
      continue;
    }
    const LevelMorphism& tau_here = f.tau(n);
    auto sigma_b1 = f.b1.morphism(n + 1);
    for (Sym w = 0; w < sigma_b2.size(); ++w) {
      Word lhs = apply_tau(tau_here, sigma_b2.image(w));
      Word rhs = apply_tau(sigma_b1, tau_next.image(w));
      if (lhs != rhs) {
        report.violations.push_back({n, f.b2.letter_name(static_cast<int>(fn1), w),
                                     "ordered commutativity fails: tau.sigma_B2 = [" +
                                         render_word(f.b1, n, lhs) + "] but sigma_B1.tau = [" +
                                         render_word(f.b1, n, rhs) + "]"});
      }
    }
  }
  return report;
}

Premorphism normalize_scale(const Premorphism& f) { return normalize_scale_with_spec(f).f; }

NormalizeResult normalize_scale_with_spec(const Premorphism& f) {
  if (f.scale.identity) return NormalizeResult{f, std::nullopt};
  if (f.scale.tail_step && *f.scale.tail_step == 0) {
    throw Error(Errc::NonCofinal, "scale is constant beyond its prefix");
  }

  // Indices i_k where the scale strictly increases; tau'_k reads
  // tau_{i_k} composed down to level k through B1.
  std::vector<long long> values;   // v_k = f_{i_k}, strictly increasing
  std::vector<long long> indices;  // i_k
  long long n = 1;
  long long last = 0;
  bool infinite = f.scale.tail_step.has_value();
  long long explicit_needed;
  long long tail_start = 0, tail_period = 0;
  if (infinite) {
    // Beyond the scale prefix every step is strictly increasing, so
    // i_k - k becomes constant; the new tau repeats with the lcm of the
    // remaining periods once every reference is inside its tail.
    if (!f.b1.tail() || !f.tau_tail) {
      throw Error(Errc::NonCofinal,
                  "scale extends forever but B1 or tau is finite; cannot normalize");
    }
    explicit_needed = -1;  // decided below
  } else {
    explicit_needed = static_cast<long long>(f.scale.prefix.size());
  }

  auto collect_upto = [&](long long count) {
    while (static_cast<long long>(values.size()) < count) {
      if (!f.scale.representable(n)) break;
      long long v = f.scale.at(n);
      if (v > last) {
        values.push_back(v);
        indices.push_back(n);
        last = v;
      }
      ++n;
    }
  };

  if (!infinite) {
    collect_upto(explicit_needed);
    if (values.empty()) {
      throw Error(Errc::NonCofinal, "scale never increases within its representation");
    }
  } else {
    // Consume the prefix, then enough of the arithmetic zone.
    collect_upto(static_cast<long long>(f.scale.prefix.size()) + 2);
    if (values.empty()) {
      throw Error(Errc::NonCofinal, "scale never increases within its representation");
    }
    long long k0 = static_cast<long long>(values.size());
    long long c = indices.back() - k0;  // constant offset beyond here
    long long p = std::lcm(static_cast<long long>(f.b1.tail()->period),
                           static_cast<long long>(f.tau_tail->period));
    tail_start = std::max<long long>(
        {k0, f.b1.tail()->start, static_cast<long long>(f.tau_tail->start) - c, 1});
    tail_period = p;
    collect_upto(tail_start + 2 * tail_period);
  }

  Premorphism out;
  out.b1 = f.b1;
  out.b1_path = f.b1_path;
  out.scale.identity = true;

  TelescopeSpec spec;
  spec.indices = {0};
  for (long long v : values) spec.indices.push_back(v);
  if (infinite) spec.tail_steps = {*f.scale.tail_step};
  out.b2 = telescope(f.b2, spec);
  out.b2_path = "";

  long long emit = static_cast<long long>(values.size());
  for (long long k = 1; k <= emit; ++k) {
    const LevelMorphism& tau_src = f.tau(static_cast<int>(indices[static_cast<size_t>(k) - 1]));
    auto down = compose_morphisms(f.b1, static_cast<int>(k),
                                  static_cast<int>(indices[static_cast<size_t>(k) - 1]));
    LevelMorphism tau_new;
    for (Sym w = 0; w < tau_src.size(); ++w) {
      tau_new.images.push_back(apply_tau(down, tau_src.image(w)));
    }
    out.taus.push_back(std::move(tau_new));
  }

  if (infinite) {
    for (long long j = 0; j < tail_period; ++j) {
      if (out.taus[static_cast<size_t>(tail_start + j) - 1] !=
          out.taus[static_cast<size_t>(tail_start + tail_period + j) - 1]) {
        throw Error(Errc::AssumptionDrift, "normalized tau failed to close its period");
      }
    }
    out.taus.resize(static_cast<size_t>(tail_start + tail_period - 1));
    out.tau_tail = Tail{static_cast<int>(tail_start), static_cast<int>(tail_period)};
  }

  auto report = validate_premorphism(out);
  if (!report.ok()) {
    throw Error(Errc::AssumptionDrift,
                "normalized premorphism fails validation: " + report.to_string());
  }
  return NormalizeResult{std::move(out), spec};
}

LevelMorphism tau_from_edge_list(const std::vector<std::tuple<Sym, Sym, int>>& edges,
                                 int domain_size) {
  LevelMorphism tau;
  tau.images.resize(static_cast<size_t>(domain_size));
  std::vector<std::map<int, Sym>> by_range(static_cast<size_t>(domain_size));
  for (const auto& [source, range, order] : edges) {
    if (range < 0 || range >= domain_size) {
      throw Error(Errc::InvalidArgument, "edge range letter out of domain");
    }
    auto& slot = by_range[static_cast<size_t>(range)];
    if (slot.count(order)) {
      throw Error(Errc::InvalidArgument,
                  "duplicate order index " + std::to_string(order) + " on one range letter");
    }
    slot[order] = source;
  }
  for (Sym w = 0; w < domain_size; ++w) {
    const auto& slot = by_range[static_cast<size_t>(w)];
    int expected = 0;
    for (const auto& [order, source] : slot) {
      if (order != expected) {
        throw Error(Errc::InvalidArgument, "order indices must form 0..m-1; missing " +
                                               std::to_string(expected));
      }
      ++expected;
      tau.images[static_cast<size_t>(w)].push_back(source);
    }
  }
  return tau;
}

PathPrefix factor_image(const Premorphism& f, const PathPrefix& p, int n) {
  if (n < 1) throw Error(Errc::InvalidArgument, "factor image needs n >= 1");
  check_path(f.b2, p);
  if (static_cast<long long>(p.depth()) != f.scale.at(n)) {
    throw Error(Errc::InvalidArgument, "path depth " + std::to_string(p.depth()) +
                                           " does not match f_" + std::to_string(n) + " = " +
                                           std::to_string(f.scale.at(n)));
  }
  unsigned long long j = path_ordinal(f.b2, p);
  const Word& tau_w = f.tau(n).image(p.range());
  for (Sym v : tau_w) {
    unsigned long long c = path_count(f.b1, n, v);
    if (j < c) return path_from_ordinal(f.b1, n, v, j);
    j -= c;
  }
  throw Error(Errc::AssumptionDrift,
              "path ordinal exceeds the composite count; commutativity does not hold");
}

Premorphism parse_opm(const std::string& text, const std::string& source,
                      const std::string& base_dir) {
  using namespace textio;
  namespace fs = std::filesystem;
  auto lines = tokenize(text);
  if (lines.empty() || lines[0].tokens != std::vector<std::string>{"opm", "1"}) {
    fail(source, lines.empty() ? 1 : lines[0].number, "expected 'opm 1' header");
  }
  Premorphism f;
  bool have_b1 = false, have_b2 = false, have_scale = false;
  int next_tau = 1;

  auto resolve = [&](const std::string& p) {
    fs::path candidate(p);
    if (candidate.is_absolute() || base_dir.empty()) return candidate.string();
    return (fs::path(base_dir) / candidate).string();
  };

  for (size_t li = 1; li < lines.size(); ++li) {
    const auto& line = lines[li];
    const auto& t = line.tokens;
    if (t[0] == "B1" || t[0] == "B2") {
      if (t.size() != 3 || t[1] != "=") fail(source, line.number, "expected 'B1 = <path>'");
      if (t[0] == "B1") {
        f.b1_path = t[2];
        f.b1 = load_obd(resolve(t[2]));
        have_b1 = true;
      } else {
        f.b2_path = t[2];
        f.b2 = load_obd(resolve(t[2]));
        have_b2 = true;
      }
    } else if (t[0] == "scale") {
      if (t.size() < 3 || t[1] != "=") fail(source, line.number, "expected 'scale = ...'");
      if (t[2] == "identity") {
        if (t.size() != 3) fail(source, line.number, "unexpected tokens after 'identity'");
        f.scale.identity = true;
      } else {
        f.scale.identity = false;
        size_t i = 2;
        while (i < t.size() && t[i] != "tail") {
          f.scale.prefix.push_back(parse_int(source, line.number, t[i]));
          ++i;
        }
        if (i < t.size()) {
          if (i + 2 != t.size() || t[i + 1].empty() || t[i + 1][0] != '+') {
            fail(source, line.number, "expected 'tail +<step>' in scale");
          }
          f.scale.tail_step = parse_int(source, line.number, t[i + 1].substr(1));
          if (*f.scale.tail_step < 0) fail(source, line.number, "scale step must be >= 0");
        }
        if (f.scale.prefix.empty() && !f.scale.tail_step) {
          fail(source, line.number, "empty scale");
        }
      }
      have_scale = true;
    } else if (t[0] == "tau") {
      if (!have_b1 || !have_b2 || !have_scale) {
        fail(source, line.number, "tau lines must follow B1, B2 and scale");
      }
      if (t.size() < 2 || t[1].size() < 2 || t[1].back() != ':') {
        fail(source, line.number, "expected 'tau <n>:'");
      }
      if (parse_int(source, line.number, t[1].substr(0, t[1].size() - 1)) != next_tau) {
        fail(source, line.number, "expected tau " + std::to_string(next_tau));
      }
      long long fn;
      try {
        fn = f.scale.at(next_tau);
      } catch (const Error& e) {
        fail(source, line.number, e.what());
      }
      if (!f.b2.representable(static_cast<int>(fn))) {
        fail(source, line.number, "tau " + std::to_string(next_tau) + " needs B2 level " +
                                      std::to_string(fn) + " which is not represented");
      }
      if (!f.b1.representable(next_tau)) {
        fail(source, line.number, "tau " + std::to_string(next_tau) +
                                      " needs B1 level beyond its representation");
      }
      int domain = f.b2.alphabet_size(static_cast<int>(fn));
      LevelMorphism tau;
      tau.images.resize(static_cast<size_t>(domain));
      std::vector<char> defined(static_cast<size_t>(domain), 0);
      auto assignments = parse_assignments(source, line.number, t, 2);
      for (const auto& asg : assignments) {
        Sym w = f.b2.letter_index(static_cast<int>(fn), asg.lhs);
        if (w < 0) fail(source, line.number, "unknown B2 letter '" + asg.lhs + "'");
        if (defined[static_cast<size_t>(w)]) {
          fail(source, line.number, "duplicate tau image for '" + asg.lhs + "'");
        }
        defined[static_cast<size_t>(w)] = 1;
        for (const auto& token : asg.rhs) {
          Sym v = f.b1.letter_index(next_tau, token);
          if (v < 0) fail(source, line.number, "unknown B1 letter '" + token + "'");
          tau.images[static_cast<size_t>(w)].push_back(v);
        }
      }
      for (size_t i = 0; i < defined.size(); ++i) {
        if (!defined[i]) {
          fail(source, line.number,
               "missing tau image for '" + f.b2.letter_name(static_cast<int>(fn), static_cast<Sym>(i)) + "'");
        }
      }
      f.taus.push_back(std::move(tau));
      ++next_tau;
    } else if (t[0] == "tail") {
      if (t.size() != 5 || t[1] != "from" || t[3] != "period") {
        fail(source, line.number, "expected 'tail from <s> period <p>'");
      }
      int s = static_cast<int>(parse_int(source, line.number, t[2]));
      int p = static_cast<int>(parse_int(source, line.number, t[4]));
      if (s < 1 || p < 1 || s + p > f.tau_top() + 1) {
        fail(source, line.number, "tau tail out of range");
      }
      f.tau_tail = Tail{s, p};
      if (li + 1 < lines.size()) fail(source, lines[li + 1].number, "content after the tail line");
    } else {
      fail(source, line.number, "unexpected '" + t[0] + "'");
    }
  }
  if (!have_b1 || !have_b2) fail(source, 1, "premorphism must reference B1 and B2");
  if (!have_scale) fail(source, 1, "premorphism must declare its scale");
  if (f.taus.empty()) fail(source, 1, "premorphism must carry at least one tau level");
  return f;
}

Premorphism load_opm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::ParseError, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_opm(buf.str(), path, std::filesystem::path(path).parent_path().string());
}

std::string emit_opm(const Premorphism& f) {
  if (f.b1_path.empty() || f.b2_path.empty()) {
    throw Error(Errc::InvalidArgument, "premorphism has no file references to emit");
  }
  std::ostringstream os;
  os << "opm 1\n";
  os << "B1 = " << f.b1_path << "\n";
  os << "B2 = " << f.b2_path << "\n";
  os << "scale = " << f.scale.to_string() << "\n";
  for (int n = 1; n <= f.tau_top(); ++n) {
    long long fn = f.scale.at(n);
    os << "tau " << n << ":";
    const auto& tau = f.taus[static_cast<size_t>(n) - 1];
    for (Sym w = 0; w < tau.size(); ++w) {
      if (w) os << " ;";
      os << " " << f.b2.letter_name(static_cast<int>(fn), w) << " =";
      for (Sym v : tau.image(w)) os << " " << f.b1.letter_name(n, v);
    }
    os << "\n";
  }
  if (f.tau_tail) {
    os << "tail from " << f.tau_tail->start << " period " << f.tau_tail->period << "\n";
  }
  return os.str();
}

void save_opm(const Premorphism& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::ParseError, "cannot write '" + path + "'");
  out << emit_opm(f);
}

}  // namespace obd
