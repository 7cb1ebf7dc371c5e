#pragma once

// DIMACS CNF reading and writing, with an optional planted-certificate
// comment. The certificate rides in a comment line so third-party SAT tools
// still parse the files:
//
//   c planted 1 -2 3
//   p cnf 3 2
//   1 -2 0
//   2 3 0
//
// write(read(text)) == text for files this writer produced; read(write(f))
// reproduces f including the certificate. Parse errors carry line numbers.

#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "core.hpp"

namespace satlab {

struct DimacsParseError : std::runtime_error {
  std::size_t line;
  DimacsParseError(std::size_t line_no, const std::string& what)
      : std::runtime_error("dimacs: line " + std::to_string(line_no) + ": " + what),
        line(line_no) {}
};

struct DimacsFile {
  Formula formula;
  std::optional<Assignment> planted;
};

inline std::string dimacs_write(const Formula& f,
                                const std::optional<Assignment>& planted = std::nullopt) {
  std::string out;
  if (planted) {
    if (planted->n() != f.n())
      throw std::invalid_argument("dimacs_write: planted certificate size mismatch");
    out += "c planted";
    for (std::uint32_t v = 1; v <= f.n(); ++v) {
      out += ' ';
      if (!planted->get(v)) out += '-';
      out += std::to_string(v);
    }
    out += '\n';
  }
  out += "p cnf " + std::to_string(f.n()) + ' ' + std::to_string(f.clause_count()) + '\n';
  for (std::size_t i = 0; i < f.clause_count(); ++i) {
    for (Lit l : f.clause(i)) {
      out += std::to_string(l.code());
      out += ' ';
    }
    out += "0\n";
  }
  return out;
}

// `demand_width`: when set, every clause must have exactly that width (the
// strict width-k contract); otherwise mixed widths are accepted and the
// formula's k is the maximum clause width seen.
inline DimacsFile dimacs_read(const std::string& text,
                              std::optional<std::uint32_t> demand_width = std::nullopt) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;

  bool have_header = false;
  std::uint32_t n = 0;
  std::uint64_t m_declared = 0;
  std::vector<std::int64_t> planted_codes;
  bool have_planted = false;

  Formula formula;
  Clause clause;
  std::uint64_t clauses_read = 0;
  std::uint32_t max_width = 0;

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;  // blank line

    if (tok == "c") {
      std::string what;
      if (ls >> what && what == "planted") {
        if (have_planted) throw DimacsParseError(line_no, "duplicate planted certificate");
        have_planted = true;
        std::int64_t code;
        while (ls >> code) planted_codes.push_back(code);
        if (ls.fail() && !ls.eof())
          throw DimacsParseError(line_no, "malformed planted certificate");
      }
      continue;
    }
    if (tok.size() >= 1 && tok[0] == 'c') continue;  // "cFoo" style comment

    if (tok == "p") {
      if (have_header) throw DimacsParseError(line_no, "duplicate header");
      std::string fmt;
      long long n_ll = -1, m_ll = -1;
      if (!(ls >> fmt >> n_ll >> m_ll) || fmt != "cnf" || n_ll < 0 || m_ll < 0)
        throw DimacsParseError(line_no, "malformed header, expected 'p cnf <vars> <clauses>'");
      n = static_cast<std::uint32_t>(n_ll);
      m_declared = static_cast<std::uint64_t>(m_ll);
      have_header = true;
      formula = Formula(n, demand_width.value_or(0));
      continue;
    }

    if (!have_header) throw DimacsParseError(line_no, "clause data before header");

    // literal tokens; first token already pulled
    std::string cur = tok;
    do {
      std::int64_t code;
      try {
        std::size_t used = 0;
        code = std::stoll(cur, &used);
        if (used != cur.size()) throw std::invalid_argument(cur);
      } catch (const std::exception&) {
        throw DimacsParseError(line_no, "bad literal token '" + cur + "'");
      }
      if (code == 0) {
        if (clauses_read == m_declared)
          throw DimacsParseError(line_no, "more clauses than the header declares");
        if (demand_width && clause.size() != *demand_width)
          throw DimacsParseError(line_no, "clause width " + std::to_string(clause.size()) +
                                              " violates demanded width " +
                                              std::to_string(*demand_width));
        max_width = std::max<std::uint32_t>(max_width, static_cast<std::uint32_t>(clause.size()));
        formula.add_clause(clause);
        clause.clear();
        ++clauses_read;
      } else {
        std::uint64_t var = static_cast<std::uint64_t>(code < 0 ? -code : code);
        if (var > n)
          throw DimacsParseError(line_no, "variable " + std::to_string(var) + " out of range 1.." +
                                              std::to_string(n));
        clause.push_back(Lit::from_code(static_cast<std::int32_t>(code)));
      }
    } while (ls >> cur);
  }

  if (!have_header) throw DimacsParseError(line_no, "missing header");
  if (!clause.empty()) throw DimacsParseError(line_no, "unterminated clause at end of input");
  if (clauses_read != m_declared)
    throw DimacsParseError(line_no, "header declares " + std::to_string(m_declared) +
                                        " clauses, found " + std::to_string(clauses_read));

  DimacsFile out;
  out.formula = std::move(formula);
  out.formula.set_width(demand_width.value_or(max_width));
  if (auto v = validate_structure(out.formula))
    throw DimacsParseError(line_no, v->describe());

  if (have_planted) {
    if (planted_codes.size() != n)
      throw DimacsParseError(line_no, "planted certificate lists " +
                                          std::to_string(planted_codes.size()) +
                                          " literals, expected " + std::to_string(n));
    Assignment sigma(n);
    std::vector<bool> seen(n + 1, false);
    for (std::int64_t code : planted_codes) {
      std::uint64_t var = static_cast<std::uint64_t>(code < 0 ? -code : code);
      if (code == 0 || var > n)
        throw DimacsParseError(line_no, "planted certificate variable out of range");
      if (seen[var]) throw DimacsParseError(line_no, "planted certificate repeats a variable");
      seen[var] = true;
      sigma.set(static_cast<std::uint32_t>(var), code > 0);
    }
    out.planted = std::move(sigma);
  }
  return out;
}

}  // namespace satlab
