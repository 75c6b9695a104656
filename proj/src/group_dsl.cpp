#include "carnot/group_dsl.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace carnot {

std::string ParseDiagnostic::to_string(const std::string& provenance) const {
  std::ostringstream out;
  if (!provenance.empty()) out << provenance << ':';
  out << line << ':' << column << ": " << (severity == Severity::error ? "error" : "warning") << ": " << message;
  return out.str();
}

namespace {

struct Token {
  std::string text;
  int column = 0;
};

std::vector<Token> tokenize(const std::string& line) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  const std::size_t end = line.find('#') == std::string::npos ? line.size() : line.find('#');
  while (i < end) {
    char c = line[i];
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    if (c == ':' || c == ';') {
      tokens.push_back({std::string(1, c), static_cast<int>(i) + 1});
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < end && line[j] != ' ' && line[j] != '\t' && line[j] != '\r' && line[j] != ':' && line[j] != ';') ++j;
    tokens.push_back({line.substr(i, j - i), static_cast<int>(i) + 1});
    i = j;
  }
  return tokens;
}

std::optional<int> parse_positive_int(const std::string& text) {
  if (text.empty() || text.size() > 6) return std::nullopt;
  for (char c : text) {
    if (c < '0' || c > '9') return std::nullopt;
  }
  int v = std::stoi(text);
  return v > 0 ? std::optional<int>(v) : std::nullopt;
}

struct PendingQ {
  int line = 0;
  int column = 0;
  int index = 0;  // 1-based coordinate
};

}  // namespace

ParseResult parse_group(const GroupDefSource& source) {
  ParseResult result;
  auto error = [&](int line, int column, std::string message) {
    result.diagnostics.push_back({line, column, ParseDiagnostic::Severity::error, std::move(message)});
  };
  auto warning = [&](int line, int column, std::string message) {
    result.diagnostics.push_back({line, column, ParseDiagnostic::Severity::warning, std::move(message)});
  };

  std::optional<StrataShape> shape;
  int strata_line = 0;
  int group_line = 0;
  std::map<int, PendingQ> q_lines;
  std::map<int, Polynomial> q_polys;

  std::istringstream in(source.text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto tokens = tokenize(raw);
    if (tokens.empty()) continue;
    const auto& key = tokens.front();
    if (key.text == "group") {
      if (group_line != 0) {
        error(line_no, key.column, "duplicate 'group' line (first at line " + std::to_string(group_line) + ")");
        continue;
      }
      group_line = line_no;
      if (tokens.size() != 2) {
        error(line_no, key.column, "expected 'group <name>'");
        continue;
      }
      result.name = tokens[1].text;
    } else if (key.text == "strata") {
      if (shape) {
        error(line_no, key.column, "duplicate 'strata' line (first at line " + std::to_string(strata_line) + ")");
        continue;
      }
      if (!q_lines.empty()) {
        error(line_no, key.column, "'strata' must precede every Q line");
        continue;
      }
      if (tokens.size() < 2) {
        error(line_no, key.column, "expected 'strata <d_1> ... <d_r>'");
        continue;
      }
      std::vector<int> dims;
      bool bad = false;
      for (std::size_t t = 1; t < tokens.size(); ++t) {
        auto v = parse_positive_int(tokens[t].text);
        if (!v) {
          error(line_no, tokens[t].column, "stratum dimension '" + tokens[t].text + "' is not a positive integer");
          bad = true;
          break;
        }
        dims.push_back(*v);
      }
      if (bad) continue;
      shape = StrataShape(dims);
      strata_line = line_no;
    } else if (key.text == "Q") {
      if (!shape) {
        error(line_no, key.column, "Q line before 'strata'");
        continue;
      }
      const int d = shape->dimension();
      const auto ud = static_cast<std::size_t>(d);
      if (tokens.size() < 3 || tokens[2].text != ":") {
        error(line_no, tokens.size() > 1 ? tokens[1].column : key.column, "expected 'Q <j> : <terms>'");
        continue;
      }
      auto j = parse_positive_int(tokens[1].text);
      if (!j || *j > d) {
        error(line_no, tokens[1].column,
              "Q index '" + tokens[1].text + "' is not a coordinate in 1.." + std::to_string(d));
        continue;
      }
      const int wj = shape->weight(static_cast<std::size_t>(*j - 1));
      if (wj == 1) {
        error(line_no, tokens[1].column, "target coordinate has weight 1: Q" + std::to_string(*j) + " must vanish");
        continue;
      }
      if (auto prev = q_lines.find(*j); prev != q_lines.end()) {
        error(line_no, tokens[1].column,
              "duplicate Q" + std::to_string(*j) + " (first at line " + std::to_string(prev->second.line) + ")");
        continue;
      }
      q_lines[*j] = {line_no, key.column, *j};
      Polynomial poly(2 * ud);

      // Split the remainder into ';'-separated terms.
      std::vector<std::vector<Token>> terms(1);
      for (std::size_t t = 3; t < tokens.size(); ++t) {
        if (tokens[t].text == ";") {
          terms.emplace_back();
        } else {
          terms.back().push_back(tokens[t]);
        }
      }
      if (terms.size() == 1 && terms.front().empty()) {
        warning(line_no, tokens[2].column, "Q" + std::to_string(*j) + " has no terms");
      }
      bool line_ok = true;
      for (const auto& term : terms) {
        if (term.empty()) {
          if (terms.size() > 1) {
            error(line_no, tokens[2].column, "empty term between ';' separators");
            line_ok = false;
          }
          continue;
        }
        Rational coefficient;
        try {
          coefficient = parse_rational(term.front().text);
        } catch (const std::invalid_argument&) {
          error(line_no, term.front().column, "coefficient '" + term.front().text + "' is not a rational literal");
          line_ok = false;
          continue;
        }
        Exponent e(2 * ud, 0);
        bool has_x = false, has_y = false, term_ok = true;
        int weighted = 0;
        for (std::size_t t = 1; t < term.size(); ++t) {
          const auto& v = term[t].text;
          std::optional<int> idx;
          if (v.size() >= 2 && (v[0] == 'x' || v[0] == 'y')) idx = parse_positive_int(v.substr(1));
          if (!idx || *idx > d) {
            error(line_no, term[t].column, "unknown variable '" + v + "'");
            term_ok = false;
            break;
          }
          const auto k = static_cast<std::size_t>(*idx - 1);
          const int wk = shape->weight(k);
          if (wk >= wj) {
            error(line_no, term[t].column,
                  "Q" + std::to_string(*j) + " may only use variables of weight < " + std::to_string(wj) + "; '" + v +
                      "' has weight " + std::to_string(wk));
            term_ok = false;
          }
          (v[0] == 'x' ? has_x : has_y) = true;
          weighted += wk;
          ++e[(v[0] == 'x' ? 0 : ud) + k];
        }
        if (!term_ok) {
          line_ok = false;
          continue;
        }
        if (coefficient == 0) {
          warning(line_no, term.front().column, "term with zero coefficient ignored");
          continue;
        }
        if (!(has_x && has_y)) {
          error(line_no, term.front().column,
                "term is not mixed: every monomial of Q must contain an x and a y variable");
          line_ok = false;
          continue;
        }
        if (weighted != wj) {
          error(line_no, term.front().column,
                "term has weighted degree " + std::to_string(weighted) + " but Q" + std::to_string(*j) +
                    " must be homogeneous of degree " + std::to_string(wj));
          line_ok = false;
          continue;
        }
        poly.add_term(e, coefficient);
      }
      if (line_ok) q_polys.emplace(*j, std::move(poly));
    } else {
      error(line_no, key.column, "unknown directive '" + key.text + "' (expected group, strata or Q)");
    }
  }

  if (group_line == 0) error(1, 1, "missing 'group <name>' line");
  if (!shape) error(std::max(line_no, 1), 1, "missing 'strata' line");

  const bool has_errors = std::any_of(result.diagnostics.begin(), result.diagnostics.end(),
                                      [](const auto& d) { return d.severity == ParseDiagnostic::Severity::error; });
  if (has_errors) return result;

  GroupLaw law(*shape);
  for (auto& [j, poly] : q_polys) law.q[static_cast<std::size_t>(j - 1)] = std::move(poly);
  auto report = validate_group_law(law);
  for (const auto* failure : report.failures()) {
    int line = strata_line, column = 1;
    if (failure->coordinate) {
      auto it = q_lines.find(*failure->coordinate + 1);
      if (it != q_lines.end()) {
        line = it->second.line;
        column = it->second.column;
      }
    }
    error(line, column, failure->axiom + ": " + failure->detail);
  }
  if (report.ok()) result.law = std::move(law);
  return result;
}

GroupDefSource emit_group(const std::string& name, const GroupLaw& law) {
  std::ostringstream out;
  out << "group " << name << '\n';
  out << "strata";
  for (int k : law.shape.dims()) out << ' ' << k;
  out << '\n';
  const auto d = static_cast<std::size_t>(law.dimension());
  for (std::size_t j = 0; j < d; ++j) {
    const auto& q = law.q[j];
    if (q.is_zero()) continue;
    out << "Q " << j + 1 << " :";
    bool first = true;
    for (auto it = q.terms().rbegin(); it != q.terms().rend(); ++it) {
      const auto& [e, c] = *it;
      out << (first ? " " : " ; ") << to_string(c);
      for (std::size_t v = 0; v < 2 * d; ++v) {
        for (unsigned k = 0; k < e[v]; ++k) out << ' ' << (v < d ? 'x' : 'y') << (v % d) + 1;
      }
      first = false;
    }
    out << '\n';
  }
  return {out.str(), "emitted"};
}

GroupDefSource load_group_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GroupError("cannot open group file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return {buffer.str(), path};
}

GroupSpec resolve_group(const std::string& reference) {
  const bool looks_like_path = reference.find('/') != std::string::npos || reference.ends_with(".group");
  if (!looks_like_path || !std::filesystem::exists(reference)) {
    if (!looks_like_path) return builtin_group(reference);
    throw GroupError("group file '" + reference + "' does not exist");
  }
  auto source = load_group_file(reference);
  auto parsed = parse_group(source);
  if (!parsed.ok()) {
    std::string msg = "invalid group definition:";
    for (const auto& d : parsed.diagnostics) msg += "\n  " + d.to_string(source.provenance);
    throw GroupError(msg);
  }
  return GroupSpec(parsed.name.value_or("unnamed"), *parsed.law);
}

}  // namespace carnot
