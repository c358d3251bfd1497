#ifndef OBD_SRC_TEXTIO_HPP
#define OBD_SRC_TEXTIO_HPP

#include <string>
#include <vector>

#include "obd/error.hpp"

namespace obd::textio {

struct Line {
  int number = 0;
  std::vector<std::string> tokens;
};

// Splits into whitespace-separated tokens, dropping '#' comments and
// blank lines.
inline std::vector<Line> tokenize(const std::string& text) {
  std::vector<Line> lines;
  int number = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    std::string raw = text.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos);
    pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
    ++number;
    size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.resize(hash);
    Line line;
    line.number = number;
    size_t i = 0;
    while (i < raw.size()) {
      while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
      size_t start = i;
      while (i < raw.size() && !std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
      if (i > start) line.tokens.push_back(raw.substr(start, i - start));
    }
    if (!line.tokens.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

[[noreturn]] inline void fail(const std::string& source, int line, const std::string& message) {
  throw Error(Errc::ParseError, source + ":" + std::to_string(line) + ": " + message);
}

inline long long parse_int(const std::string& source, int line, const std::string& token) {
  try {
    size_t used = 0;
    long long v = std::stoll(token, &used);
    if (used != token.size()) fail(source, line, "not an integer: '" + token + "'");
    return v;
  } catch (const Error&) {
    throw;
  } catch (...) {
    fail(source, line, "not an integer: '" + token + "'");
  }
}

// Splits "name = w1 w2 ; name2 = ..." assignment groups after a prefix.
struct Assignment {
  std::string lhs;
  std::vector<std::string> rhs;
};

inline std::vector<Assignment> parse_assignments(const std::string& source, int line,
                                                 const std::vector<std::string>& tokens,
                                                 size_t from) {
  std::vector<Assignment> out;
  size_t i = from;
  while (i < tokens.size()) {
    if (i + 1 >= tokens.size() || tokens[i + 1] != "=") {
      fail(source, line, "expected '<letter> = ...' at '" + tokens[i] + "'");
    }
    Assignment a;
    a.lhs = tokens[i];
    i += 2;
    while (i < tokens.size() && tokens[i] != ";") {
      a.rhs.push_back(tokens[i]);
      ++i;
    }
    if (i < tokens.size() && tokens[i] == ";") ++i;
    out.push_back(std::move(a));
  }
  return out;
}

inline bool valid_letter_token(const std::string& t) {
  if (t.empty() || t == "=" || t == ";") return false;
  for (char c : t) {
    if (c == '=' || c == ';' || c == ':' || c == '#') return false;
  }
  return true;
}

}  // namespace obd::textio

#endif
