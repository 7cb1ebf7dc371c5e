#pragma once

// Exact small-instance ground truth: SAT decision, model counting and full
// formula-space enumeration. Every probabilistic claim in the test suites
// is checked against this module.
//
// Assignments are enumerated in lexicographic order: the integer x in
// [0, 2^n) encodes variable v as bit v-1, so all-false comes first and the
// first satisfying assignment is well defined and bit-identical across runs.

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "core.hpp"

namespace satlab {

struct CapExceededError : std::runtime_error {
  explicit CapExceededError(const std::string& what) : std::runtime_error(what) {}
};

constexpr std::uint32_t kOracleMaxVars = 30;
constexpr std::uint64_t kOracleMaxTuples = 10'000'000;

namespace detail {

// Per-clause (variable mask, falsifying pattern): clause is falsified by x
// iff (x & mask) == bad. Two ops per clause makes exhaustive scans cheap.
struct ClauseMasks {
  std::vector<std::uint64_t> mask;
  std::vector<std::uint64_t> bad;

  explicit ClauseMasks(const Formula& f) {
    if (f.n() > 64) throw CapExceededError("ClauseMasks: n > 64");
    mask.reserve(f.clause_count());
    bad.reserve(f.clause_count());
    for (std::size_t i = 0; i < f.clause_count(); ++i) {
      std::uint64_t m = 0, b = 0;
      for (Lit l : f.clause(i)) {
        std::uint64_t bit = std::uint64_t{1} << (l.var() - 1);
        m |= bit;
        if (!l.positive()) b |= bit;
      }
      mask.push_back(m);
      bad.push_back(b);
    }
  }

  bool satisfied_by(std::uint64_t x) const {
    for (std::size_t i = 0; i < mask.size(); ++i)
      if ((x & mask[i]) == bad[i]) return false;
    return true;
  }
};

inline void check_oracle_cap(const Formula& f, const char* op) {
  if (f.n() > kOracleMaxVars)
    throw CapExceededError(std::string(op) + ": n > " + std::to_string(kOracleMaxVars));
}

}  // namespace detail

struct ExactCount {
  std::uint64_t solutions;
  std::uint64_t n_enumerated;  // 2^n
};

// Exhaustive SAT decision. Returns the lexicographically first satisfying
// assignment, or nullopt as a definitive unsatisfiability certificate.
inline std::optional<Assignment> brute_force_sat(const Formula& f) {
  detail::check_oracle_cap(f, "brute_force_sat");
  detail::ClauseMasks cm(f);
  std::uint64_t total = std::uint64_t{1} << f.n();
  for (std::uint64_t x = 0; x < total; ++x)
    if (cm.satisfied_by(x)) return Assignment::from_bits(f.n(), x);
  return std::nullopt;
}

inline ExactCount count_solutions(const Formula& f) {
  detail::check_oracle_cap(f, "count_solutions");
  detail::ClauseMasks cm(f);
  std::uint64_t total = std::uint64_t{1} << f.n();
  std::uint64_t count = 0;
  for (std::uint64_t x = 0; x < total; ++x)
    if (cm.satisfied_by(x)) ++count;
  return {count, total};
}

namespace detail {

inline std::uint64_t binomial_u64(std::uint32_t n, std::uint32_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  unsigned __int128 r = 1;
  for (std::uint32_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > ~std::uint64_t{0}) throw CapExceededError("binomial_u64: overflow");
  }
  return static_cast<std::uint64_t>(r);
}

// The clause universe for (n, k): C(n,k) variable sets in lexicographic
// order, 2^k sign patterns per set (bit j = positive sign of j-th variable).
class ClauseUniverse {
public:
  ClauseUniverse(std::uint32_t n, std::uint32_t k) : n_(n), k_(k) {
    if (k > n) throw std::invalid_argument("ClauseUniverse: k > n");
    std::vector<std::uint32_t> vars(k);
    for (std::uint32_t i = 0; i < k; ++i) vars[i] = i + 1;
    while (true) {
      varsets_.insert(varsets_.end(), vars.begin(), vars.end());
      // next k-combination of 1..n in lexicographic order
      std::int32_t i = static_cast<std::int32_t>(k) - 1;
      while (i >= 0 && vars[i] == n - k + i + 1) --i;
      if (i < 0) break;
      ++vars[i];
      for (std::uint32_t j = i + 1; j < k; ++j) vars[j] = vars[j - 1] + 1;
    }
  }

  std::uint64_t size() const {
    return (varsets_.size() / k_) << k_;
  }

  Clause clause(std::uint64_t index) const {
    std::uint64_t set_idx = index >> k_;
    std::uint64_t signs = index & ((std::uint64_t{1} << k_) - 1);
    Clause c;
    c.reserve(k_);
    for (std::uint32_t j = 0; j < k_; ++j)
      c.emplace_back(varsets_[set_idx * k_ + j], (signs >> j) & 1u);
    return c;
  }

private:
  std::uint32_t n_, k_;
  std::vector<std::uint32_t> varsets_;
};

}  // namespace detail

// Visits every ordered m-tuple of width-k clauses exactly once, in
// lexicographic order over (clause_0, ..., clause_{m-1}). Multiplicity is 1
// per tuple; consumers weight probability mass by it so a collapsed
// enumeration could be dropped in without changing call sites.
inline void enumerate_all_formulas(
    std::uint32_t n, std::uint32_t k, std::uint32_t m,
    const std::function<void(const Formula&, std::uint64_t)>& visit) {
  if (k < 1 || k > n) throw std::invalid_argument("enumerate_all_formulas: need 1 <= k <= n");
  if (m == 0) {
    visit(Formula(n, k), 1);
    return;
  }
  // check the (C(n,k) 2^k)^m cap before materializing the clause universe
  if (k >= 24) throw CapExceededError("enumerate_all_formulas: 2^k alone above tuple cap");
  unsigned __int128 u128 =
      static_cast<unsigned __int128>(detail::binomial_u64(n, k)) << k;
  if (u128 > kOracleMaxTuples)
    throw CapExceededError("enumerate_all_formulas: clause universe above tuple cap");
  std::uint64_t u = static_cast<std::uint64_t>(u128);
  unsigned __int128 tuples = 1;
  for (std::uint32_t i = 0; i < m; ++i) {
    tuples *= u;
    if (tuples > kOracleMaxTuples)
      throw CapExceededError("enumerate_all_formulas: tuple count above cap");
  }

  detail::ClauseUniverse universe(n, k);
  std::vector<std::uint64_t> digits(m, 0);
  Formula f(n, k);
  while (true) {
    f.clear_clauses();
    for (std::uint32_t i = 0; i < m; ++i) f.add_clause(universe.clause(digits[i]));
    visit(f, 1);
    std::int32_t pos = static_cast<std::int32_t>(m) - 1;
    while (pos >= 0 && digits[pos] == u - 1) digits[pos--] = 0;
    if (pos < 0) break;
    ++digits[pos];
  }
}

// Exact probability that sample_P(n, k, m) produces the ordered formula F:
// Z(F) * 2^-n * (C(n,k)(2^k-1))^-m, kept as an integer numerator over an
// integer denominator; floating point only on conversion.
struct ExactProb {
  std::uint64_t numerator;          // Z(F)
  unsigned __int128 denominator;    // 2^n * (C(n,k)(2^k-1))^m

  double value() const {
    return static_cast<double>(numerator) / static_cast<double>(denominator);
  }
};

inline ExactProb exact_planted_prob(const Formula& f, std::uint32_t n, std::uint32_t k,
                                    std::uint32_t m) {
  if (n > 20) throw CapExceededError("exact_planted_prob: n > 20");
  std::uint64_t z = count_solutions(f).solutions;
  unsigned __int128 denom = static_cast<unsigned __int128>(1) << n;
  unsigned __int128 per_clause =
      static_cast<unsigned __int128>(detail::binomial_u64(n, k)) * ((std::uint64_t{1} << k) - 1);
  for (std::uint32_t i = 0; i < m; ++i) {
    unsigned __int128 next = denom * per_clause;
    if (per_clause != 0 && next / per_clause != denom)
      throw CapExceededError("exact_planted_prob: denominator overflow");
    denom = next;
  }
  return {z, denom};
}

}  // namespace satlab
