#include <doctest.h>

#include <array>
#include <cmath>
#include <map>
#include <satlab/analysis.hpp>
#include <satlab/distributions.hpp>
#include <satlab/oracle.hpp>
#include <string>
#include <vector>

using namespace satlab;

namespace {

std::string clause_key(const Clause& c) {
  std::string key;
  for (Lit l : c) key += std::to_string(l.code()) + " ";
  return key;
}

std::string formula_key(const Formula& f) {
  std::string key;
  for (std::size_t i = 0; i < f.clause_count(); ++i) {
    for (Lit l : f.clause(i)) key += std::to_string(l.code()) + " ";
    key += "|";
  }
  return key;
}

double chi_square(const std::map<std::string, std::uint64_t>& counts,
                  const std::map<std::string, double>& probs, std::uint64_t draws) {
  double chi2 = 0;
  for (const auto& [key, p] : probs) {
    auto it = counts.find(key);
    double observed = it == counts.end() ? 0.0 : static_cast<double>(it->second);
    double expected = p * static_cast<double>(draws);
    chi2 += (observed - expected) * (observed - expected) / expected;
  }
  return chi2;
}

// all width-k clauses as keys, via the enumeration oracle
std::vector<Clause> clause_universe(std::uint32_t n, std::uint32_t k) {
  std::vector<Clause> universe;
  enumerate_all_formulas(n, k, 1, [&](const Formula& f, std::uint64_t) {
    universe.emplace_back(f.clause(0).begin(), f.clause(0).end());
  });
  return universe;
}

}  // namespace

TEST_CASE("sample_uniform_clause is uniform (exhaustive enumeration as oracle)") {
  // n=2, k=2: four clauses, each 1/4
  {
    RandomStream rng(101);
    std::map<std::string, std::uint64_t> counts;
    const std::uint64_t draws = 100000;
    for (std::uint64_t i = 0; i < draws; ++i) ++counts[clause_key(sample_uniform_clause(2, 2, rng))];
    CHECK(counts.size() == 4);
    std::map<std::string, double> probs;
    for (const Clause& c : clause_universe(2, 2)) probs[clause_key(c)] = 0.25;
    CHECK(chi_square(counts, probs, draws) < 16.27);  // df=3, 99.9%
  }
  // n=1, k=1: (x1) or (~x1), each 1/2
  {
    RandomStream rng(102);
    std::uint64_t pos = 0;
    const std::uint64_t draws = 100000;
    for (std::uint64_t i = 0; i < draws; ++i) pos += sample_uniform_clause(1, 1, rng)[0].positive();
    double z = (static_cast<double>(pos) - draws / 2.0) / std::sqrt(draws / 4.0);
    CHECK(std::abs(z) < 4.0);
  }
  // n=4, k=2: 24 clauses within the chi-square band over 10^6 draws
  {
    RandomStream rng(103);
    std::map<std::string, std::uint64_t> counts;
    const std::uint64_t draws = 1000000;
    for (std::uint64_t i = 0; i < draws; ++i) ++counts[clause_key(sample_uniform_clause(4, 2, rng))];
    auto universe = clause_universe(4, 2);
    CHECK(universe.size() == 24);
    std::map<std::string, double> probs;
    for (const Clause& c : universe) probs[clause_key(c)] = 1.0 / 24.0;
    CHECK(counts.size() == 24);
    CHECK(chi_square(counts, probs, draws) < 49.73);  // df=23, 99.9%
  }
  RandomStream bad_rng(1);
  CHECK_THROWS_AS((void)sample_uniform_clause(2, 3, bad_rng), std::invalid_argument);
}

TEST_CASE("sample_satisfying_clause is uniform over the satisfying clauses") {
  // n=2, k=2, sigma=(1,1): the three satisfying clauses each 1/3
  {
    RandomStream rng(201);
    Assignment sigma = Assignment::from_bits(2, 0b11);
    std::map<std::string, std::uint64_t> counts;
    const std::uint64_t draws = 150000;
    for (std::uint64_t i = 0; i < draws; ++i)
      ++counts[clause_key(sample_satisfying_clause(2, 2, sigma, rng))];
    CHECK(counts.size() == 3);
    std::map<std::string, double> probs;
    for (const Clause& c : clause_universe(2, 2))
      if (eval_clause(std::span<const Lit>(c.data(), c.size()), sigma))
        probs[clause_key(c)] = 1.0 / 3.0;
    REQUIRE(probs.size() == 3);
    CHECK(chi_square(counts, probs, draws) < 13.82);  // df=2, 99.9%
  }
  // n=3, k=2, sigma=(1,1,1): nine satisfying clauses, 10^6 draws
  {
    RandomStream rng(202);
    Assignment sigma = Assignment::from_bits(3, 0b111);
    std::map<std::string, std::uint64_t> counts;
    const std::uint64_t draws = 1000000;
    for (std::uint64_t i = 0; i < draws; ++i) {
      Clause c = sample_satisfying_clause(3, 2, sigma, rng);
      // definitional: output always satisfies sigma
      REQUIRE(eval_clause(std::span<const Lit>(c.data(), c.size()), sigma));
      ++counts[clause_key(c)];
    }
    std::map<std::string, double> probs;
    for (const Clause& c : clause_universe(3, 2))
      if (eval_clause(std::span<const Lit>(c.data(), c.size()), sigma))
        probs[clause_key(c)] = 1.0 / 9.0;
    REQUIRE(probs.size() == 9);
    CHECK(counts.size() == 9);
    CHECK(chi_square(counts, probs, draws) < 26.12);  // df=8, 99.9%
  }
}

TEST_CASE("sample_R basics") {
  RandomStream rng(301);
  Formula empty = sample_R(5, 3, 0, rng);
  CHECK(empty.clause_count() == 0);
  CHECK(empty.n() == 5);

  RandomStream a(77, 5), b(77, 5);
  CHECK(sample_R(10, 3, 40, a) == sample_R(10, 3, 40, b));

  RandomStream c(77, 5), d(77, 6);
  CHECK(sample_R(10, 3, 40, c) != sample_R(10, 3, 40, d));

  RandomStream v(1);
  Formula f = sample_R(10, 3, 25, v);
  CHECK_FALSE(validate_formula(f));
}

TEST_CASE("sample_R mean solution count matches the closed form") {
  // E[|S|] = 2^12 (7/8)^30 = 74.62 at (12,3,30)
  RandomStream rng(302);
  const int samples = 3000;
  double total = 0;
  for (int i = 0; i < samples; ++i) {
    RandomStream inst = rng.derive(i);
    total += static_cast<double>(count_solutions(sample_R(12, 3, 30, inst)).solutions);
  }
  double mean = total / samples;
  double expected = std::exp2(expected_solutions_log2(12, 3, 30));
  CHECK(mean == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("sample_P_sigma always satisfies sigma") {
  RandomStream rng(401);
  Assignment sigma = sample_assignment(14, rng);
  for (int i = 0; i < 50; ++i) {
    RandomStream inst = rng.derive(i);
    Formula f = sample_P_sigma(14, 3, 60, sigma, inst);
    CHECK(eval_formula(f, sigma));
    CHECK_FALSE(validate_formula(f));
  }
  RandomStream e(402);
  CHECK(sample_P_sigma(5, 2, 0, Assignment(5), e).clause_count() == 0);
}

TEST_CASE("sample_P_sigma unit-clause probabilities at (2,1,1)") {
  RandomStream rng(403);
  Assignment sigma = Assignment::from_bits(2, 0b11);
  const std::uint64_t draws = 100000;
  std::uint64_t x1 = 0;
  for (std::uint64_t i = 0; i < draws; ++i) {
    Formula f = sample_P_sigma(2, 1, 1, sigma, rng);
    REQUIRE(f.clause(0).size() == 1);
    REQUIRE(f.clause(0)[0].positive());  // must satisfy sigma=(1,1)
    x1 += f.clause(0)[0].var() == 1;
  }
  double z = (static_cast<double>(x1) - draws / 2.0) / std::sqrt(draws / 4.0);
  CHECK(std::abs(z) < 4.0);
}

TEST_CASE("sample_P invariants") {
  RandomStream rng(404);
  for (int i = 0; i < 100; ++i) {
    RandomStream inst = rng.derive(i);
    PlantedInstance p = sample_P(9, 3, 30, inst);
    CHECK(eval_formula(p.formula, p.sigma));
  }

  // Pr[F = {(x1)}] = 1/4 at (2,1,1): exact enumeration over (sigma, clause)
  RandomStream rng2(405);
  const std::uint64_t draws = 1000000;
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < draws; ++i) {
    PlantedInstance p = sample_P(2, 1, 1, rng2);
    hits += p.formula.clause(0)[0].code() == 1;
  }
  double se = std::sqrt(0.25 * 0.75 / static_cast<double>(draws));
  CHECK(std::abs(static_cast<double>(hits) / draws - 0.25) < 4.0 * se);

  // marginal distribution of sigma is uniform at n=3
  RandomStream rng3(406);
  std::map<std::string, std::uint64_t> counts;
  const std::uint64_t sdraws = 200000;
  for (std::uint64_t i = 0; i < sdraws; ++i) {
    PlantedInstance p = sample_P(3, 2, 2, rng3);
    ++counts[std::to_string(p.sigma.low_bits())];
  }
  std::map<std::string, double> probs;
  for (int s = 0; s < 8; ++s) probs[std::to_string(s)] = 1.0 / 8.0;
  CHECK(chi_square(counts, probs, sdraws) < 24.32);  // df=7, 99.9%
}

TEST_CASE("exact distribution identity: Pr[sample_P = F] == Z(F) p") {
  // Enumerate the sampler's whole probability space: sigma (2^n outcomes,
  // each 2^-n) times m i.i.d. clause draws uniform over the sigma-satisfying
  // clauses (each D^-m with D = C(n,k)(2^k-1)). Accumulated tuple counts per
  // formula must equal Z(F) exactly.
  for (auto [n, k, m] : std::initializer_list<std::array<std::uint32_t, 3>>{
           {2, 1, 1}, {3, 2, 1}, {3, 2, 2}}) {
    auto universe = clause_universe(n, k);
    std::map<std::string, std::uint64_t> tuple_counts;
    std::uint64_t total_outcomes = 0;
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
      Assignment sigma = Assignment::from_bits(n, bits);
      std::vector<const Clause*> satisfying;
      for (const Clause& c : universe)
        if (eval_clause(std::span<const Lit>(c.data(), c.size()), sigma))
          satisfying.push_back(&c);
      std::uint64_t d = satisfying.size();
      std::vector<std::uint64_t> digits(m, 0);
      while (true) {
        Formula f(n, k);
        for (std::uint32_t i = 0; i < m; ++i) f.add_clause(*satisfying[digits[i]]);
        ++tuple_counts[formula_key(f)];
        ++total_outcomes;
        std::int32_t pos = static_cast<std::int32_t>(m) - 1;
        while (pos >= 0 && digits[pos] == d - 1) digits[pos--] = 0;
        if (pos < 0) break;
        ++digits[pos];
      }
    }

    // every formula in the full enumeration: count == Z(F), i.e. prob == Z p
    std::uint64_t checked = 0;
    enumerate_all_formulas(n, k, m, [&](const Formula& f, std::uint64_t) {
      ExactProb p = exact_planted_prob(f, n, k, m);
      auto it = tuple_counts.find(formula_key(f));
      std::uint64_t observed = it == tuple_counts.end() ? 0 : it->second;
      CHECK(observed == p.numerator);
      double exact_prob = static_cast<double>(observed) / static_cast<double>(total_outcomes);
      CHECK(std::abs(exact_prob - p.value()) <= 1e-12);
      ++checked;
    });
    CHECK(checked > 0);
  }
}

TEST_CASE("sample_R_plus basics and acceptance rate below threshold") {
  auto oracle = [](const Formula& f) { return brute_force_sat(f).has_value(); };

  RandomStream rng(501);
  RPlusSample s0 = sample_R_plus(7, 3, 0, rng, oracle);
  CHECK(s0.attempts == 1);  // empty formula: first draw accepted
  CHECK(s0.formula.clause_count() == 0);

  // (12,3,30) sits far below the k=3 threshold: acceptance >= 99%
  std::uint64_t attempts_total = 0;
  const int runs = 1000;
  for (int i = 0; i < runs; ++i) {
    RandomStream inst = rng.derive(i);
    RPlusSample s = sample_R_plus(12, 3, 30, inst, oracle);
    REQUIRE(brute_force_sat(s.formula));
    attempts_total += s.attempts;
  }
  double rate = static_cast<double>(runs) / static_cast<double>(attempts_total);
  CHECK(rate >= 0.99);

  // deep above the threshold the error is the expected outcome
  RandomStream hopeless(502);
  CHECK_THROWS_AS((void)sample_R_plus(12, 3, 200, hopeless, oracle, 5), AttemptsExhaustedError);
}

namespace {

// Exact conditional distribution of R(3,2,m) given satisfiability,
// marginalized to the first clause, via full tuple enumeration.
std::map<std::string, double> exact_rplus_first_clause_marginal(std::uint32_t m,
                                                                std::uint64_t* sat_out) {
  std::map<std::string, std::uint64_t> sat_by_first;
  std::uint64_t sat_total = 0;
  enumerate_all_formulas(3, 2, m, [&](const Formula& f, std::uint64_t) {
    if (count_solutions(f).solutions > 0) {
      ++sat_total;
      Clause first(f.clause(0).begin(), f.clause(0).end());
      ++sat_by_first[clause_key(first)];
    }
  });
  std::map<std::string, double> marginal;
  for (const auto& [key, cnt] : sat_by_first)
    marginal[key] = static_cast<double>(cnt) / static_cast<double>(sat_total);
  if (sat_out) *sat_out = sat_total;
  return marginal;
}

}  // namespace

TEST_CASE("rejection identity: R conditioned on SAT == sample_R_plus") {
  auto oracle = [](const Formula& f) { return brute_force_sat(f).has_value(); };

  // m=2: every (3,2,2) formula is satisfiable (two width-2 clauses exclude
  // at most 4 of 8 assignments), so R+ must match plain R: uniform over the
  // 144 ordered tuples.
  {
    std::uint64_t sat_total = 0;
    exact_rplus_first_clause_marginal(2, &sat_total);
    CHECK(sat_total == 144);

    RandomStream rng(601);
    std::map<std::string, std::uint64_t> counts;
    const std::uint64_t draws = 300000;
    for (std::uint64_t i = 0; i < draws; ++i) {
      RandomStream inst = rng.derive(i);
      RPlusSample s = sample_R_plus(3, 2, 2, inst, oracle);
      CHECK(s.attempts == 1);
      ++counts[formula_key(s.formula)];
    }
    std::map<std::string, double> probs;
    enumerate_all_formulas(3, 2, 2, [&](const Formula& f, std::uint64_t) {
      probs[formula_key(f)] = 1.0 / 144.0;
    });
    CHECK(chi_square(counts, probs, draws) < 210.0);  // df=143, ~99.9%
  }

  // m=5: real conditioning. Compare the first-clause marginal of the
  // sampler against the exactly enumerated conditional.
  {
    auto marginal = exact_rplus_first_clause_marginal(5, nullptr);
    REQUIRE(marginal.size() == 12);

    RandomStream rng(602);
    std::map<std::string, std::uint64_t> counts;
    const std::uint64_t draws = 120000;
    for (std::uint64_t i = 0; i < draws; ++i) {
      RandomStream inst = rng.derive(i);
      RPlusSample s = sample_R_plus(3, 2, 5, inst, oracle);
      Clause first(s.formula.clause(0).begin(), s.formula.clause(0).end());
      ++counts[clause_key(first)];
    }
    CHECK(chi_square(counts, marginal, draws) < 31.26);  // df=11, 99.9%
  }
}

TEST_CASE("planted-route R+ sampler draws from the same conditional law") {
  auto counter = [](const Formula& f) { return count_solutions(f).solutions; };

  auto marginal = exact_rplus_first_clause_marginal(5, nullptr);
  RandomStream rng(603);
  std::map<std::string, std::uint64_t> counts;
  const std::uint64_t draws = 120000;
  for (std::uint64_t i = 0; i < draws; ++i) {
    RandomStream inst = rng.derive(i);
    RPlusSample s = sample_R_plus_via_planted(3, 2, 5, inst, counter);
    REQUIRE(count_solutions(s.formula).solutions > 0);
    Clause first(s.formula.clause(0).begin(), s.formula.clause(0).end());
    ++counts[clause_key(first)];
  }
  CHECK(chi_square(counts, marginal, draws) < 31.26);  // df=11, 99.9%
}
