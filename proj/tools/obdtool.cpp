// obdtool: command-line front end for ordered Bratteli diagrams,
// premorphisms and equivalence certificates.
//
// Exit codes: 0 success/verified, 1 property refuted (counterexample
// printed), 2 inconclusive (depth exhausted), 3 input or parse error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "obd/conjugacy.hpp"
#include "obd/diagram.hpp"
#include "obd/paths.hpp"
#include "obd/premorphism.hpp"
#include "obd/rank_reduction.hpp"
#include "obd/transforms.hpp"
#include "obd/words.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kRefuted = 1;
constexpr int kInconclusive = 2;
constexpr int kInputError = 3;

int exit_code_for(const obd::Error& e) {
  switch (e.code()) {
    case obd::Errc::ParseError:
    case obd::Errc::InvalidArgument:
    case obd::Errc::LevelOutOfRange:
    case obd::Errc::OrdinalOutOfRange:
    case obd::Errc::MalformedCertificate:
    case obd::Errc::NonCofinal:
      return kInputError;
    case obd::Errc::AllMax:
    case obd::Errc::Overflow:
      return kInconclusive;
    default:
      return kRefuted;
  }
}

std::string first_header_token(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream is(line);
    std::string token;
    if (is >> token && !token.empty() && token[0] != '#') return token;
  }
  return "";
}

std::vector<std::string> split_tokens(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string token;
  while (is >> token) out.push_back(token);
  return out;
}

// "x x y, x y y" -> words over the named alphabet.
std::vector<obd::Word> parse_words_option(const obd::Diagram& d, int level,
                                          const std::string& text) {
  std::vector<obd::Word> words;
  obd::Word current;
  for (const auto& token : split_tokens(text)) {
    std::string t = token;
    bool ends_word = false;
    if (!t.empty() && t.back() == ',') {
      t.pop_back();
      ends_word = true;
    }
    if (!t.empty()) {
      obd::Sym v = d.letter_index(level, t);
      if (v < 0) throw obd::Error(obd::Errc::InvalidArgument, "unknown letter '" + t + "'");
      current.push_back(v);
    }
    if (ends_word) {
      words.push_back(current);
      current.clear();
    }
  }
  if (!current.empty()) words.push_back(current);
  return words;
}

std::string relative_to(const std::string& target, const std::string& dir) {
  std::error_code ec;
  fs::path rel = fs::proximate(fs::absolute(target), fs::absolute(dir), ec);
  if (ec || rel.empty()) return fs::absolute(target).string();
  return rel.string();
}

void emit_report(bool as_json, const json& j, const std::string& text) {
  if (as_json) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << text;
  }
}

int cmd_validate(const std::string& file, bool as_json) {
  std::string kind = first_header_token(file);
  obd::ValidationReport report;
  if (kind == "obd") {
    report = obd::validate_diagram(obd::load_obd(file));
  } else if (kind == "opm") {
    report = obd::validate_premorphism(obd::load_opm(file));
  } else {
    throw obd::Error(obd::Errc::ParseError, "unrecognized header in '" + file + "'");
  }
  json j;
  j["file"] = file;
  j["valid"] = report.ok();
  j["violations"] = json::array();
  for (const auto& v : report.violations) {
    j["violations"].push_back({{"level", v.level}, {"subject", v.subject}, {"message", v.message}});
  }
  std::ostringstream text;
  if (report.ok()) {
    text << "valid\n";
  } else {
    text << report.to_string();
  }
  emit_report(as_json, j, text.str());
  return report.ok() ? kOk : kRefuted;
}

int cmd_telescope(const std::string& file, const std::string& along, const std::string& out_path) {
  auto d = obd::load_obd(file);
  auto spec = obd::parse_telescope_spec(split_tokens(along), "--along");
  auto result = obd::telescope(d, spec);
  if (out_path.empty()) {
    std::cout << obd::emit_obd(result);
  } else {
    obd::save_obd(result, out_path);
    std::cout << "telescoped along " << spec.to_string() << " -> " << out_path << "\n";
  }
  return kOk;
}

int cmd_pack(const std::string& file, int level, const std::string& words_text,
             const std::string& out_path) {
  auto d = obd::load_obd(file);
  auto words = parse_words_option(d, level - 1, words_text);
  obd::Code w(words);
  auto result = obd::pack(d, level, w);
  if (out_path.empty()) {
    std::cout << obd::emit_obd(result);
  } else {
    obd::save_obd(result, out_path);
    std::cout << "packed " << w.size() << " words at level " << level << " -> " << out_path
              << "\n";
  }
  return kOk;
}

int cmd_vershik(const std::string& file, int depth, int steps, const std::string& letter,
                bool as_json) {
  auto d = obd::load_obd(file);
  obd::Sym v = 0;
  if (!letter.empty()) {
    v = d.letter_index(depth, letter);
    if (v < 0) throw obd::Error(obd::Errc::InvalidArgument, "unknown letter '" + letter + "'");
  }
  auto p = obd::extreme_path(d, depth, obd::Extreme::Min, v);
  json j;
  j["file"] = file;
  j["depth"] = depth;
  j["orbit"] = json::array();
  std::ostringstream text;
  bool exhausted = false;
  for (int i = 0; i <= steps; ++i) {
    auto ordinal = obd::path_ordinal(d, p);
    j["orbit"].push_back({{"step", i},
                          {"range", d.letter_name(depth, p.range())},
                          {"ordinal", ordinal},
                          {"path", obd::render_path(d, p)}});
    text << i << ": " << obd::render_path(d, p) << "  (ordinal " << ordinal << " into "
         << d.letter_name(depth, p.range()) << ")\n";
    if (i == steps) break;
    try {
      p = obd::vershik_successor(d, p);
    } catch (const obd::Error& e) {
      if (e.code() != obd::Errc::AllMax) throw;
      text << "all-max path reached after " << i << " steps; deepen the prefix\n";
      j["exhausted_after"] = i;
      exhausted = true;
      break;
    }
  }
  emit_report(as_json, j, text.str());
  return exhausted ? kInconclusive : kOk;
}

int cmd_word(const std::string& file, int level, int length, const std::string& letter, int at,
             int max_depth) {
  auto d = obd::load_obd(file);
  auto letter_at = [&](int lvl) -> obd::Sym {
    if (letter.empty()) return 0;
    obd::Sym v = d.letter_index(lvl, letter);
    if (v < 0) throw obd::Error(obd::Errc::InvalidArgument, "unknown letter '" + letter + "'");
    return v;
  };
  int from = at;
  if (from < 0) {
    // Deepen until the composed image is long enough.
    for (int cand = level + 1; cand <= level + max_depth; ++cand) {
      if (!d.representable(cand)) break;
      auto prod = obd::incidence_product(d, level, cand);
      unsigned long long len = 0;
      for (int c = 0; c < prod.cols; ++c) len += prod.at(letter_at(cand), c);
      if (length <= 0 || len >= static_cast<unsigned long long>(length)) {
        from = cand;
        break;
      }
    }
    if (from < 0) {
      std::cout << "no represented level reaches length " << length << " within max-depth\n";
      return kInconclusive;
    }
  }
  obd::Sym v = letter_at(from);
  auto composed = obd::compose_morphisms(d, level, from);
  obd::Word w = composed.image(v);
  if (length > 0 && static_cast<size_t>(length) < w.size()) w.resize(static_cast<size_t>(length));
  std::cout << obd::render_word(d, level, w) << "\n";
  if (length > 0 && w.size() < static_cast<size_t>(length)) return kInconclusive;
  return kOk;
}

int cmd_matrix(const std::string& file, int level, int from, int to, bool as_json) {
  auto d = obd::load_obd(file);
  obd::IncidenceMatrix m;
  if (from >= 0 && to >= 0) {
    m = obd::incidence_product(d, from, to);
  } else {
    m = obd::incidence_matrix(d, level);
  }
  json j;
  j["rows"] = m.rows;
  j["cols"] = m.cols;
  j["entries"] = json::array();
  std::ostringstream text;
  for (int r = 0; r < m.rows; ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols; ++c) {
      row.push_back(m.at(r, c));
      text << (c ? " " : "") << m.at(r, c);
    }
    j["entries"].push_back(row);
    text << "\n";
  }
  emit_report(as_json, j, text.str());
  return kOk;
}

int cmd_rank(const std::string& file, bool as_json) {
  auto d = obd::load_obd(file);
  int r = obd::diagram_rank(d);
  emit_report(as_json, json{{"file", file}, {"rank", r}}, std::to_string(r) + "\n");
  return kOk;
}

int cmd_factor_map(const std::string& file, int level, const std::string& letter,
                   long long ordinal, bool all, bool as_json) {
  auto f = obd::load_opm(file);
  auto report = obd::validate_premorphism(f);
  if (!report.ok()) {
    std::cout << report.to_string();
    return kRefuted;
  }
  long long depth = f.scale.at(level);
  json j;
  j["level"] = level;
  j["depth"] = depth;
  j["images"] = json::array();
  std::ostringstream text;
  auto emit_one = [&](obd::Sym w, unsigned long long jdx) {
    auto p = obd::path_from_ordinal(f.b2, static_cast<int>(depth), w, jdx);
    auto img = obd::factor_image(f, p, level);
    j["images"].push_back({{"letter", f.b2.letter_name(static_cast<int>(depth), w)},
                           {"ordinal", jdx},
                           {"b2_path", obd::render_path(f.b2, p)},
                           {"b1_path", obd::render_path(f.b1, img)}});
    text << f.b2.letter_name(static_cast<int>(depth), w) << "[" << jdx
         << "] -> " << obd::render_path(f.b1, img) << "\n";
  };
  if (all) {
    for (obd::Sym w = 0; w < f.b2.alphabet_size(static_cast<int>(depth)); ++w) {
      auto count = obd::path_count(f.b2, static_cast<int>(depth), w);
      for (unsigned long long jdx = 0; jdx < count; ++jdx) emit_one(w, jdx);
    }
  } else {
    obd::Sym w = f.b2.letter_index(static_cast<int>(depth), letter);
    if (w < 0) throw obd::Error(obd::Errc::InvalidArgument, "unknown letter '" + letter + "'");
    emit_one(w, static_cast<unsigned long long>(ordinal));
  }
  emit_report(as_json, j, text.str());
  return kOk;
}

int cmd_premorphism_check(const std::string& file, bool as_json) {
  auto f = obd::load_opm(file);
  auto report = obd::validate_premorphism(f);
  json j;
  j["file"] = file;
  j["valid"] = report.ok();
  j["violations"] = json::array();
  for (const auto& v : report.violations) {
    j["violations"].push_back({{"level", v.level}, {"subject", v.subject}, {"message", v.message}});
  }
  emit_report(as_json, j, report.ok() ? "valid\n" : report.to_string());
  return report.ok() ? kOk : kRefuted;
}

int cmd_rank_reduce(const std::string& file, int max_depth, const std::string& out_base,
                    bool as_json) {
  auto f = obd::load_opm(file);
  auto result = obd::reduce_rank(f, max_depth);
  if (result.status == obd::PrepareStatus::Inconclusive) {
    emit_report(as_json, json{{"status", "inconclusive"}, {"note", result.note}},
                "inconclusive: " + result.note + "\n");
    return kInconclusive;
  }
  std::string obd_path = out_base + ".obd";
  std::string cert_path = out_base + ".cert";
  obd::save_obd(*result.reduced, obd_path);

  auto cert = *result.certificate;
  std::string cert_dir = fs::path(cert_path).parent_path().string();
  if (cert_dir.empty()) cert_dir = ".";
  std::string b1_abs = f.b1_path;
  if (!fs::path(b1_abs).is_absolute()) {
    b1_abs = (fs::path(file).parent_path() / b1_abs).string();
  }
  cert.path_a = relative_to(b1_abs, cert_dir);
  cert.path_b = fs::path(obd_path).filename().string();
  obd::save_cert(cert, cert_path);

  json j{{"status", result.status == obd::PrepareStatus::RankOne ? "rank-one" : "reduced"},
         {"note", result.note},
         {"output", obd_path},
         {"certificate", cert_path},
         {"output_rank", result.output_rank},
         {"b2_rank", result.b2_rank},
         {"bound", 3 * result.b2_rank}};
  std::ostringstream text;
  text << "rank " << result.output_rank << " <= 3 * " << result.b2_rank << " = "
       << 3 * result.b2_rank << "\n";
  text << "diagram -> " << obd_path << "\ncertificate -> " << cert_path << "\n";
  emit_report(as_json, j, text.str());
  return kOk;
}

int cmd_conjugacy(const std::string& file, int max_depth, const std::string& out_base,
                  bool as_json) {
  auto f = obd::load_opm(file);
  auto outcome = obd::conjugacy_certify(f, max_depth);

  json j;
  std::ostringstream text;
  j["levels"] = json::array();
  for (const auto& row : outcome.criterion.levels) {
    json r{{"n", row.n},
           {"independent", row.independent},
           {"duplicate_images", row.duplicate_images}};
    if (row.ell) r["ell"] = *row.ell;
    r["tried"] = json::array();
    for (const auto& tr : row.tried) {
      r["tried"].push_back({{"ell", tr.ell}, {"generated", tr.generated}, {"minimal", tr.minimal}});
    }
    if (!row.independent && !row.duplicate_images) {
      r["witness"] = obd::render_word(f.b1, row.n, row.dependence_witness);
    }
    j["levels"].push_back(r);
    text << "level " << row.n << ": ";
    if (row.duplicate_images) {
      text << "duplicate tau images\n";
      continue;
    }
    if (!row.independent) {
      text << "D_n not independent (witness: "
           << obd::render_word(f.b1, row.n, row.dependence_witness) << ")\n";
      continue;
    }
    text << "independent";
    for (const auto& tr : row.tried) {
      text << "; ell=" << tr.ell << (tr.generated ? (tr.minimal ? " ok" : " not-minimal")
                                                  : " not-generated");
    }
    text << "\n";
  }

  switch (outcome.status) {
    case obd::CriterionStatus::Satisfied: {
      j["status"] = outcome.partial ? "satisfied-partial" : "satisfied";
      j["note"] = outcome.note;
      text << (outcome.partial ? "satisfied (partial): " : "satisfied: ") << outcome.note << "\n";
      std::string cert_path = out_base + ".cert";
      auto cert = *outcome.certificate;
      std::string cert_dir = fs::path(cert_path).parent_path().string();
      if (cert_dir.empty()) cert_dir = ".";
      auto resolve_input = [&](const std::string& p) {
        if (fs::path(p).is_absolute()) return p;
        return (fs::path(file).parent_path() / p).string();
      };
      cert.path_a = relative_to(resolve_input(f.b1_path), cert_dir);
      cert.path_b = relative_to(resolve_input(f.b2_path), cert_dir);
      obd::save_cert(cert, cert_path);
      j["certificate"] = cert_path;
      text << "certificate -> " << cert_path << "\n";
      emit_report(as_json, j, text.str());
      return kOk;
    }
    case obd::CriterionStatus::Refuted:
      j["status"] = "refuted";
      j["note"] = outcome.note;
      text << "refuted: " << outcome.note << "\n";
      emit_report(as_json, j, text.str());
      return kRefuted;
    case obd::CriterionStatus::Inconclusive:
    default:
      j["status"] = "inconclusive";
      j["note"] = outcome.note;
      text << "inconclusive: " << outcome.note << "\n";
      emit_report(as_json, j, text.str());
      return kInconclusive;
  }
}

int cmd_verify_cert(const std::string& file, bool as_json) {
  auto cert = obd::load_cert(file);
  auto [a, b] = obd::load_cert_diagrams(cert, file);
  auto verdict = obd::verify_equivalence_certificate(cert, a, b);
  json j;
  j["file"] = file;
  j["verified"] = verdict.verified;
  j["message"] = verdict.message;
  std::ostringstream text;
  text << verdict.message << "\n";
  if (verdict.counterexample) {
    const auto& cx = *verdict.counterexample;
    j["counterexample"] = {{"side", cx.side},
                           {"level", cx.level},
                           {"letter", cx.letter},
                           {"expected", cx.expected},
                           {"actual", cx.actual}};
    text << "counterexample on the " << cx.side << " side, level " << cx.level << ", letter "
         << cx.letter << ": expected [" << cx.expected << "] got [" << cx.actual << "]\n";
  }
  emit_report(as_json, j, text.str());
  return verdict.verified ? kOk : kRefuted;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ordered Bratteli diagram toolkit"};
  app.require_subcommand(1);

  std::string file, out, along, words_text, letter;
  std::string out_base = "out";
  int level = 1, depth = 1, steps = 10, length = 0, at = -1, from = -1, to = -1;
  int max_depth = 12;
  long long ordinal = 0;
  long long seed = 0;  // reserved for reproducible sweeps
  bool as_json = false, all = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_flag("--json", as_json, "emit a JSON report");
    cmd->add_option("--seed", seed, "reserved");
  };

  auto* validate = app.add_subcommand("validate", "check diagram or premorphism invariants");
  validate->add_option("file", file)->required();
  add_common(validate);

  auto* telescope = app.add_subcommand("telescope", "collapse levels along a spec");
  telescope->add_option("file", file)->required();
  telescope->add_option("--along", along, "e.g. \"0 1 3 tail +2\"")->required();
  telescope->add_option("--out", out);
  add_common(telescope);

  auto* pack = app.add_subcommand("pack", "insert a word level (microscoping)");
  pack->add_option("file", file)->required();
  pack->add_option("--level", level)->required();
  pack->add_option("--words", words_text, "comma-separated words, letters space-separated")
      ->required();
  pack->add_option("--out", out);
  add_common(pack);

  auto* vershik = app.add_subcommand("vershik", "iterate the successor map at a fixed depth");
  vershik->add_option("file", file)->required();
  vershik->add_option("--depth", depth)->required();
  vershik->add_option("--steps", steps);
  vershik->add_option("--letter", letter, "range letter of the starting min path");
  add_common(vershik);

  auto* word = app.add_subcommand("word", "emit a composed image word (S-adic reading)");
  word->add_option("file", file)->required();
  word->add_option("--level", level, "alphabet the word is read over")->required();
  word->add_option("--length", length, "truncate to this many letters");
  word->add_option("--letter", letter, "source letter (default: first)");
  word->add_option("--at", at, "source level (default: deepen until long enough)");
  word->add_option("--max-depth", max_depth);
  add_common(word);

  auto* matrix = app.add_subcommand("matrix", "incidence matrix or a product over a range");
  matrix->add_option("file", file)->required();
  matrix->add_option("--level", level);
  matrix->add_option("--from", from);
  matrix->add_option("--to", to);
  add_common(matrix);

  auto* rank = app.add_subcommand("rank", "sup of level sizes");
  rank->add_option("file", file)->required();
  add_common(rank);

  auto* pcheck = app.add_subcommand("premorphism-check", "replay ordered commutativity");
  pcheck->add_option("file", file)->required();
  add_common(pcheck);

  auto* fmap = app.add_subcommand("factor-map", "image of finite paths under the factor map");
  fmap->add_option("file", file)->required();
  fmap->add_option("--level", level, "B1 depth n; paths live at B2 depth f_n")->required();
  fmap->add_option("--letter", letter);
  fmap->add_option("--ordinal", ordinal);
  fmap->add_flag("--all", all, "map every path at this depth");
  add_common(fmap);

  auto* rreduce = app.add_subcommand("rank-reduce", "equivalent diagram with rank <= 3 rank(B2)");
  rreduce->add_option("file", file)->required();
  rreduce->add_option("--max-depth", max_depth);
  rreduce->add_option("--out", out_base, "basename for .obd and .cert outputs")->required();
  add_common(rreduce);

  auto* conj = app.add_subcommand("conjugacy", "combinatorial conjugacy criterion");
  conj->add_option("file", file)->required();
  conj->add_option("--max-depth", max_depth);
  conj->add_option("--out", out_base, "basename for the .cert output")->required();
  add_common(conj);

  auto* vcert = app.add_subcommand("verify-cert", "replay an equivalence certificate");
  vcert->add_option("file", file)->required();
  add_common(vcert);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (validate->parsed()) return cmd_validate(file, as_json);
    if (telescope->parsed()) return cmd_telescope(file, along, out);
    if (pack->parsed()) return cmd_pack(file, level, words_text, out);
    if (vershik->parsed()) return cmd_vershik(file, depth, steps, letter, as_json);
    if (word->parsed()) return cmd_word(file, level, length, letter, at, max_depth);
    if (matrix->parsed()) return cmd_matrix(file, level, from, to, as_json);
    if (rank->parsed()) return cmd_rank(file, as_json);
    if (pcheck->parsed()) return cmd_premorphism_check(file, as_json);
    if (fmap->parsed()) return cmd_factor_map(file, level, letter, ordinal, all, as_json);
    if (rreduce->parsed()) return cmd_rank_reduce(file, max_depth, out_base, as_json);
    if (conj->parsed()) return cmd_conjugacy(file, max_depth, out_base, as_json);
    if (vcert->parsed()) return cmd_verify_cert(file, as_json);
  } catch (const obd::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
