#include <doctest.h>

#include <satlab/dimacs.hpp>
#include <satlab/distributions.hpp>

using namespace satlab;

namespace {

Clause clause(std::initializer_list<int> codes) {
  Clause c;
  for (int code : codes) c.push_back(Lit::from_code(code));
  sort_clause(c);
  return c;
}

}  // namespace

TEST_CASE("dimacs_write produces the exact format") {
  Formula f(2, 2);
  f.add_clause(clause({1, -2}));
  CHECK(dimacs_write(f) == "p cnf 2 1\n1 -2 0\n");

  Assignment sigma = Assignment::from_bits(2, 0b01);  // x1=1, x2=0
  CHECK(dimacs_write(f, sigma) == "c planted 1 -2\np cnf 2 1\n1 -2 0\n");
}

TEST_CASE("dimacs_read recovers planted certificates") {
  auto file = dimacs_read("c planted 1 -2\np cnf 2 1\n1 -2 0\n");
  REQUIRE(file.planted);
  CHECK(file.planted->get(1));
  CHECK_FALSE(file.planted->get(2));
  CHECK(file.formula.clause_count() == 1);
  CHECK(file.formula.n() == 2);
}

TEST_CASE("dimacs_read tolerates comments, blank lines and split clauses") {
  auto file = dimacs_read("c a comment\n\np cnf 3 2\n1 -2\n0\nc mid comment\n2 3 0\n");
  CHECK(file.formula.clause_count() == 2);
  CHECK(file.formula.k() == 2);
  CHECK_FALSE(file.planted);
}

TEST_CASE("dimacs_read reports parse errors with line numbers") {
  auto line_of = [](const std::string& text) -> std::size_t {
    try {
      (void)dimacs_read(text);
    } catch (const DimacsParseError& e) {
      return e.line;
    }
    return 0;
  };
  CHECK(line_of("p cnf 2 1\n1 5 0\n") == 2);             // out-of-range variable
  CHECK(line_of("1 2 0\np cnf 2 1\n") == 1);             // clause before header
  CHECK(line_of("p cnf 2 1\n1 x 0\n") == 2);             // bad token
  CHECK(line_of("p cnf 2 2\n1 0\n") == 2);               // clause count mismatch
  CHECK(line_of("p cnf 2 1\n1 2\n") == 2);               // unterminated clause
  CHECK(line_of("c planted 1\np cnf 2 1\n1 0\n") == 3);  // incomplete certificate
}

TEST_CASE("width contract is enforced only when demanded") {
  std::string text = "p cnf 3 2\n1 2 3 0\n1 2 0\n";
  CHECK(dimacs_read(text).formula.k() == 3);  // max width when not demanded
  CHECK_THROWS_AS((void)dimacs_read(text, 3u), DimacsParseError);
  CHECK_NOTHROW((void)dimacs_read("p cnf 3 1\n1 -3 0\n", 2u));
}

TEST_CASE("round-trip identity on random formulas, certificate included") {
  RandomStream rng(12001);
  for (int i = 0; i < 1000; ++i) {
    RandomStream inst = rng.derive(i);
    std::uint32_t n = 2 + inst.next_below(14);
    std::uint32_t k = 1 + inst.next_below(std::min(n, 4u));
    std::uint32_t m = inst.next_below(30);
    bool planted = inst.next_bool();
    Formula f;
    std::optional<Assignment> sigma;
    if (planted) {
      PlantedInstance p = sample_P(n, k, m, inst);
      f = std::move(p.formula);
      sigma = std::move(p.sigma);
    } else {
      f = sample_R(n, k, m, inst);
    }
    std::string text = dimacs_write(f, sigma);
    DimacsFile back = dimacs_read(text, k);
    CHECK(back.formula == f);
    CHECK(back.planted.has_value() == sigma.has_value());
    if (sigma) CHECK(*back.planted == *sigma);
    CHECK(dimacs_write(back.formula, back.planted) == text);
  }
}
