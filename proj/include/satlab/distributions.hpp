#pragma once

// Exact samplers for the three instance distributions: R(n,k,m) (uniform),
// P(n,k,m,sigma) / P(n,k,m) (planted), and rejection-based R+(n,k,m)
// (uniform conditioned on satisfiability).
//
// Stream discipline: every clause consumes its RandomStream in a fixed,
// documented order -- the k variable draws first (partial Fisher-Yates over
// 1..n), then one 64-bit word for the sign pattern (bit j pairs with the
// j-th variable drawn; for sigma-satisfying clauses the all-disagreeing
// pattern is rejected and a fresh word drawn). sample_P draws the sigma
// words before any clause. Golden-seed tests rely on this order.

#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "core.hpp"
#include "rng.hpp"

namespace satlab {

struct AttemptsExhaustedError : std::runtime_error {
  explicit AttemptsExhaustedError(const std::string& what) : std::runtime_error(what) {}
};

struct PlantedInstance {
  Formula formula;
  Assignment sigma;  // eval_formula(formula, sigma) holds by construction
};

namespace detail {

inline void check_clause_params(std::uint32_t n, std::uint32_t k) {
  if (k < 1 || k > n) throw std::invalid_argument("clause sampler: need 1 <= k <= n");
  if (k > 63) throw std::invalid_argument("clause sampler: k > 63 unsupported");
}

// Reusable partial Fisher-Yates state: k draws pick a uniform k-subset of
// 1..n; the swaps are recorded and undone in reverse afterwards so the pool
// is the identity permutation again between clauses. Unbiased, O(k) per
// clause regardless of n.
class VarSetSampler {
public:
  void init(std::uint32_t n) {
    pool_.resize(n);
    std::iota(pool_.begin(), pool_.end(), 1u);
  }

  // Fills vars[0..k) in draw order.
  void sample(std::uint32_t k, RandomStream& rng, std::uint32_t* vars) {
    std::uint32_t n = static_cast<std::uint32_t>(pool_.size());
    swaps_.resize(k);
    for (std::uint32_t j = 0; j < k; ++j) {
      std::uint32_t r = j + static_cast<std::uint32_t>(rng.next_below(n - j));
      std::swap(pool_[j], pool_[r]);
      swaps_[j] = r;
      vars[j] = pool_[j];
    }
    for (std::uint32_t j = k; j-- > 0;) std::swap(pool_[j], pool_[swaps_[j]]);
  }

private:
  std::vector<std::uint32_t> pool_;
  std::vector<std::uint32_t> swaps_;
};

}  // namespace detail

// Uniform over the C(n,k) * 2^k width-k clauses with distinct variables.
inline Clause sample_uniform_clause(std::uint32_t n, std::uint32_t k, RandomStream& rng) {
  detail::check_clause_params(n, k);
  detail::VarSetSampler vs;
  vs.init(n);
  std::vector<std::uint32_t> vars(k);
  vs.sample(k, rng, vars.data());
  std::uint64_t signs = rng.next_u64();
  Clause c;
  c.reserve(k);
  for (std::uint32_t j = 0; j < k; ++j) c.emplace_back(vars[j], (signs >> j) & 1u);
  sort_clause(c);
  return c;
}

// Uniform over the C(n,k) * (2^k - 1) clauses satisfying sigma. The sign
// pattern is drawn as a k-bit agreement mask (bit j set: literal j agrees
// with sigma); the single all-disagreeing mask is rejected, expected < 2
// draws, which keeps the pattern exactly uniform over the 2^k - 1 rest.
inline Clause sample_satisfying_clause(std::uint32_t n, std::uint32_t k,
                                       const Assignment& sigma, RandomStream& rng) {
  detail::check_clause_params(n, k);
  if (sigma.n() != n) throw std::invalid_argument("sample_satisfying_clause: sigma size mismatch");
  detail::VarSetSampler vs;
  vs.init(n);
  std::vector<std::uint32_t> vars(k);
  vs.sample(k, rng, vars.data());
  std::uint64_t kmask = (std::uint64_t{1} << k) - 1;
  std::uint64_t agree;
  do {
    agree = rng.next_u64() & kmask;
  } while (agree == 0);
  Clause c;
  c.reserve(k);
  for (std::uint32_t j = 0; j < k; ++j) {
    bool sat = (agree >> j) & 1u;
    c.emplace_back(vars[j], sat == sigma.get(vars[j]));
  }
  sort_clause(c);
  return c;
}

namespace detail {

// Shared clause-loop of the bulk samplers; appends m clauses to `out`
// without per-clause heap traffic.
template <bool Planted>
inline void fill_clauses(Formula& out, std::uint32_t n, std::uint32_t k, std::uint32_t m,
                         const Assignment* sigma, RandomStream& rng) {
  detail::check_clause_params(n, k);
  VarSetSampler vs;
  vs.init(n);
  std::vector<std::uint32_t> vars(k);
  std::vector<Lit> buf(k);
  std::uint64_t kmask = (std::uint64_t{1} << k) - 1;
  out.reserve(out.clause_count() + m, k);
  for (std::uint32_t c = 0; c < m; ++c) {
    vs.sample(k, rng, vars.data());
    if constexpr (Planted) {
      std::uint64_t agree;
      do {
        agree = rng.next_u64() & kmask;
      } while (agree == 0);
      for (std::uint32_t j = 0; j < k; ++j) {
        bool sat = (agree >> j) & 1u;
        buf[j] = Lit(vars[j], sat == sigma->get(vars[j]));
      }
    } else {
      std::uint64_t signs = rng.next_u64();
      for (std::uint32_t j = 0; j < k; ++j) buf[j] = Lit(vars[j], (signs >> j) & 1u);
    }
    out.add_clause(std::span<const Lit>(buf.data(), buf.size()));
  }
}

}  // namespace detail

// R(n,k,m): m i.i.d. uniform clauses in draw order.
inline void sample_R_into(Formula& out, std::uint32_t n, std::uint32_t k, std::uint32_t m,
                          RandomStream& rng) {
  out = Formula(n, k);
  detail::fill_clauses<false>(out, n, k, m, nullptr, rng);
}

inline Formula sample_R(std::uint32_t n, std::uint32_t k, std::uint32_t m, RandomStream& rng) {
  Formula f;
  sample_R_into(f, n, k, m, rng);
  return f;
}

// P(n,k,m,sigma): m i.i.d. sigma-satisfying clauses; the result always
// evaluates true under sigma.
inline void sample_P_sigma_into(Formula& out, std::uint32_t n, std::uint32_t k, std::uint32_t m,
                                const Assignment& sigma, RandomStream& rng) {
  if (sigma.n() != n) throw std::invalid_argument("sample_P_sigma: sigma size mismatch");
  out = Formula(n, k);
  detail::fill_clauses<true>(out, n, k, m, &sigma, rng);
}

inline Formula sample_P_sigma(std::uint32_t n, std::uint32_t k, std::uint32_t m,
                              const Assignment& sigma, RandomStream& rng) {
  Formula f;
  sample_P_sigma_into(f, n, k, m, sigma, rng);
  return f;
}

inline Assignment sample_assignment(std::uint32_t n, RandomStream& rng) {
  Assignment a(n);
  for (std::uint32_t v = 1; v <= n; v += 64) {
    std::uint64_t w = rng.next_u64();
    std::uint32_t hi = std::min(n, v + 63);
    for (std::uint32_t u = v; u <= hi; ++u)
      if ((w >> (u - v)) & 1u) a.set(u, true);
  }
  return a;
}

// P(n,k,m): sigma uniform over {0,1}^n, then P(n,k,m,sigma).
inline PlantedInstance sample_P(std::uint32_t n, std::uint32_t k, std::uint32_t m,
                                RandomStream& rng) {
  Assignment sigma = sample_assignment(n, rng);
  Formula f = sample_P_sigma(n, k, m, sigma, rng);
  return {std::move(f), std::move(sigma)};
}

struct RPlusSample {
  Formula formula;
  std::uint32_t attempts;  // R draws consumed, including the accepted one
};

// R+(n,k,m) by rejection: draw from R until `oracle_sat` certifies the
// formula satisfiable. Exact by rejection-sampling correctness. Deep above
// the satisfiability threshold acceptance decays like P[R is SAT], so the
// AttemptsExhausted error is the expected outcome there and is
// non-retryable by design: it means this (n,k,m) regime is not
// desk-feasible for this sampler.
inline RPlusSample sample_R_plus(std::uint32_t n, std::uint32_t k, std::uint32_t m,
                                 RandomStream& rng,
                                 const std::function<bool(const Formula&)>& oracle_sat,
                                 std::uint32_t max_attempts = 1000) {
  if (max_attempts < 1) throw std::invalid_argument("sample_R_plus: max_attempts < 1");
  Formula f;
  for (std::uint32_t attempt = 1; attempt <= max_attempts; ++attempt) {
    sample_R_into(f, n, k, m, rng);
    if (oracle_sat(f)) return {std::move(f), attempt};
  }
  throw AttemptsExhaustedError("sample_R_plus: no satisfiable draw in " +
                               std::to_string(max_attempts) + " attempts");
}

// R+ via the planted route: draw F ~ P(n,k,m), accept with probability
// 1/Z(F). R assigns equal mass to every ordered clause tuple while
// P(F) = Z(F) * p, so the accepted stream is exactly R conditioned on
// satisfiability -- with O(1) expected attempts at high density, where
// direct rejection from R is hopeless. Needs an exact model counter.
inline RPlusSample sample_R_plus_via_planted(
    std::uint32_t n, std::uint32_t k, std::uint32_t m, RandomStream& rng,
    const std::function<std::uint64_t(const Formula&)>& count_models,
    std::uint32_t max_attempts = 1000) {
  if (max_attempts < 1) throw std::invalid_argument("sample_R_plus_via_planted: max_attempts < 1");
  for (std::uint32_t attempt = 1; attempt <= max_attempts; ++attempt) {
    PlantedInstance inst = sample_P(n, k, m, rng);
    std::uint64_t z = count_models(inst.formula);
    if (z == 0) throw std::logic_error("sample_R_plus_via_planted: planted formula counted UNSAT");
    if (z == 1 || rng.next_double() * static_cast<double>(z) < 1.0)
      return {std::move(inst.formula), attempt};
  }
  throw AttemptsExhaustedError("sample_R_plus_via_planted: no accepted draw in " +
                               std::to_string(max_attempts) + " attempts");
}

}  // namespace satlab
