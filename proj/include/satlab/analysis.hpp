#pragma once

// Good/critical-variable identification and the closed-form quantities the
// experiments measure against: expected solution counts, clause
// probabilities, the entropy bound f(p) = H(p) - 1 + (1-p)^k with its
// critical points, and the z / z' / t density reparameterizations.
//
// Count-like quantities are carried in log2; probabilities stay linear.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "core.hpp"

namespace satlab {

struct RootsNotFoundError : std::runtime_error {
  std::uint32_t roots_found;
  explicit RootsNotFoundError(std::uint32_t found)
      : std::runtime_error("f' sign pattern has " + std::to_string(found) +
                           " roots, expected 3 (k too small?)"),
        roots_found(found) {}
};

// ---------------------------------------------------------------------------
// critical / good variables

// The variable x such that x's literal is the only literal of `clause`
// satisfied by sigma; nullopt when zero or more than one literal is
// satisfied (in particular for clauses sigma does not satisfy).
inline std::optional<std::uint32_t> critical_variable(std::span<const Lit> clause,
                                                      const Assignment& sigma) {
  std::uint32_t var = 0;
  for (Lit l : clause) {
    if (sigma.satisfies(l)) {
      if (var != 0) return std::nullopt;
      var = l.var();
    }
  }
  if (var == 0) return std::nullopt;
  return var;
}

struct GoodVariableReport {
  std::vector<std::uint32_t> good;     // ascending variable indices
  std::vector<std::int64_t> witness;   // witness[v] = first witnessing clause, -1 if v not good
  std::uint32_t good_count() const { return static_cast<std::uint32_t>(good.size()); }
};

// x_i is good iff some clause is critical with respect to x_i and i is the
// largest variable index in that clause. Clause literals are sorted by
// variable, so the max index is the last literal's.
inline GoodVariableReport good_variables(const Formula& f, const Assignment& sigma) {
  if (sigma.n() != f.n()) throw std::invalid_argument("good_variables: sigma size mismatch");
  GoodVariableReport rep;
  rep.witness.assign(f.n() + 1, -1);
  for (std::size_t i = 0; i < f.clause_count(); ++i) {
    auto c = f.clause(i);
    if (c.empty()) continue;
    auto crit = critical_variable(c, sigma);
    if (crit && *crit == c.back().var() && rep.witness[*crit] < 0)
      rep.witness[*crit] = static_cast<std::int64_t>(i);
  }
  for (std::uint32_t v = 1; v <= f.n(); ++v)
    if (rep.witness[v] >= 0) rep.good.push_back(v);
  return rep;
}

// ---------------------------------------------------------------------------
// closed forms

// log2 E[|S|] for R(n,k,m): n + m*log2(1 - 2^-k).
inline double expected_solutions_log2(std::uint32_t n, std::uint32_t k, std::uint64_t m) {
  double log2_keep = std::log1p(-std::ldexp(1.0, -static_cast<int>(k))) / std::numbers::ln2;
  return static_cast<double>(n) + static_cast<double>(m) * log2_keep;
}

namespace detail {

inline double log_binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

}  // namespace detail

// Exact probability that a uniform sigma-satisfying clause is falsified by
// an assignment at Hamming distance i from sigma:
//   (1 - C(n-i,k)/C(n,k)) / (2^k - 1).
// A failing clause puts sigma-agreeing literals on difference-set variables
// and sigma-disagreeing literals elsewhere, so by Vandermonde the failing
// count is C(n,k) - C(n-i,k). The i.i.d.-variables form
// (1 - (1-i/n)^k)/(2^k-1) is its n -> infinity limit (and a lower bound);
// see clause_miss_prob_iid.
inline double clause_miss_prob(std::uint32_t i, std::uint32_t n, std::uint32_t k) {
  if (i > n) throw std::invalid_argument("clause_miss_prob: i > n");
  if (k > n) throw std::invalid_argument("clause_miss_prob: k > n");
  double denom = std::exp2(static_cast<double>(k)) - 1.0;
  if (i == 0) return 0.0;
  double ratio = 1.0;
  for (std::uint32_t j = 0; j < k; ++j)
    ratio *= n - i >= k ? static_cast<double>(n - i - j) / static_cast<double>(n - j) : 0.0;
  return (1.0 - ratio) / denom;
}

// The i.i.d.-variables limit of clause_miss_prob; this is the expression the
// expected-count chain bounds with, and it never exceeds the exact value.
inline double clause_miss_prob_iid(double p, std::uint32_t k) {
  double denom = std::exp2(static_cast<double>(k)) - 1.0;
  return (1.0 - std::pow(1.0 - p, static_cast<double>(k))) / denom;
}

// Probability that a uniform sigma-satisfying clause is critical for x_i
// with i the largest index in the clause: C(i-1,k-1) / (C(n,k)(2^k-1)).
inline double prob_clause_makes_good(std::uint32_t i, std::uint32_t n, std::uint32_t k) {
  if (i < k) throw std::invalid_argument("prob_clause_makes_good: i < k");
  if (i > n) throw std::invalid_argument("prob_clause_makes_good: i > n");
  double log_p = detail::log_binomial(i - 1, k - 1) - detail::log_binomial(n, k) -
                 std::log(std::exp2(static_cast<double>(k)) - 1.0);
  return std::exp(log_p);
}

inline double binary_entropy(double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("binary_entropy: p outside [0,1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

inline double f_p(double p, std::uint32_t k) {
  return binary_entropy(p) - 1.0 + std::pow(1.0 - p, static_cast<double>(k));
}

// Analytic derivative of f with H in bits: log2((1-p)/p) - k(1-p)^(k-1).
inline double f_p_prime(double p, std::uint32_t k) {
  if (p <= 0.0 || p >= 1.0) throw std::invalid_argument("f_p_prime: need 0 < p < 1");
  return std::log2((1.0 - p) / p) -
         static_cast<double>(k) * std::pow(1.0 - p, static_cast<double>(k) - 1.0);
}

struct FCriticalPoints {
  std::array<double, 3> roots;       // increasing
  std::array<double, 3> f_at_roots;
};

namespace detail {

constexpr std::size_t kRootGridPoints = 10'000;

// Log-spaced grid over (10^-2k, 1/2], clamped away from double underflow.
inline std::vector<double> root_grid(std::uint32_t k) {
  double lo = std::max(std::pow(10.0, -2.0 * static_cast<double>(k)), 1e-300);
  double ln_lo = std::log(lo), ln_hi = std::log(0.5);
  std::vector<double> grid(kRootGridPoints);
  for (std::size_t i = 0; i < kRootGridPoints; ++i) {
    double t = static_cast<double>(i) / static_cast<double>(kRootGridPoints - 1);
    grid[i] = std::exp(ln_lo + t * (ln_hi - ln_lo));
  }
  grid.back() = 0.5;
  return grid;
}

// Geometric bisection of f' on a sign-changing bracket; relative precision
// down to double resolution, which also meets the 1e-12 absolute target.
inline double bisect_fp_root(double lo, double hi, std::uint32_t k) {
  double flo = f_p_prime(lo, k);
  for (int iter = 0; iter < 300 && hi - lo > 1e-15 * hi; ++iter) {
    double mid = std::sqrt(lo * hi);
    if (mid <= lo || mid >= hi) break;
    double fmid = f_p_prime(mid, k);
    if (fmid == 0.0) return mid;
    if ((fmid > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  double root = std::sqrt(lo * hi);
  if (root >= hi) root = lo;  // keep strictly inside the bracket
  return root;
}

}  // namespace detail

// The three increasing roots of f' in (0, 1/2], located by sign changes on
// a log-spaced grid and refined by bisection. Throws RootsNotFoundError
// (carrying the count found) when the sign pattern is absent, which happens
// for small k; three changes exist for k >= 20.
inline FCriticalPoints f_critical_points(std::uint32_t k) {
  auto grid = detail::root_grid(k);
  std::vector<std::pair<double, double>> brackets;
  double prev_p = grid[0];
  double prev_f = f_p_prime(prev_p, k);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    double p = grid[i];
    double fp = f_p_prime(p, k);
    if ((fp > 0.0) != (prev_f > 0.0)) brackets.emplace_back(prev_p, p);
    prev_p = p;
    prev_f = fp;
  }
  if (brackets.size() != 3)
    throw RootsNotFoundError(static_cast<std::uint32_t>(brackets.size()));
  FCriticalPoints out{};
  for (std::size_t i = 0; i < 3; ++i) {
    out.roots[i] = detail::bisect_fp_root(brackets[i].first, brackets[i].second, k);
    out.f_at_roots[i] = f_p(out.roots[i], k);
  }
  return out;
}

inline double alpha_d(std::uint32_t k) {
  return std::exp2(static_cast<double>(k)) * std::numbers::ln2 - static_cast<double>(k);
}

// Finite-k stand-in for the satisfiability threshold density
// 2^k ln2 - theta(1); used only for regime dispatch, never as ground truth.
inline double default_alpha_sat_est(std::uint32_t k) {
  return std::exp2(static_cast<double>(k)) * std::numbers::ln2 - 1.0;
}

struct EzBound {
  double bound_log2;
  std::size_t grid_points;
};

// Finite-parameter evaluation of the chain bounding E[Z] for planted / R+
// formulas at high density:
//   log2 E[Z] <= log2(n+1) + max_p [ n f(p,k) + q(p) (n(2^k-1) - m log2 e) ]
// with q(p) = (1-(1-p)^k)/(2^k-1). The max runs over the log grid, the
// roots of f' (when three exist), and the exact lattice points i/n, so the
// result genuinely dominates the discrete sum it came from.
inline EzBound ez_upper_bound_log2(std::uint32_t n, std::uint32_t k, std::uint64_t m,
                                   std::optional<double> alpha_sat_est = std::nullopt) {
  double alpha = alpha_sat_est.value_or(default_alpha_sat_est(k));
  if (static_cast<double>(m) < (alpha - 1.0) * static_cast<double>(n))
    throw std::invalid_argument("ez_upper_bound_log2: m below (alpha_sat_est - 1) n");
  double pow2k1 = std::exp2(static_cast<double>(k)) - 1.0;
  double coeff = static_cast<double>(n) * pow2k1 -
                 static_cast<double>(m) * std::numbers::log2e;
  auto term = [&](double p) {
    return static_cast<double>(n) * f_p(p, k) + clause_miss_prob_iid(p, k) * coeff;
  };

  double best = term(0.0);  // i = 0: sigma itself
  auto grid = detail::root_grid(k);
  for (double p : grid) best = std::max(best, term(p));
  try {
    for (double r : f_critical_points(k).roots) best = std::max(best, term(r));
  } catch (const RootsNotFoundError&) {
    // small k: grid plus lattice points cover the max
  }
  for (std::uint32_t i = 1; i <= n; ++i)
    best = std::max(best, term(static_cast<double>(i) / static_cast<double>(n)));
  return {std::log2(static_cast<double>(n) + 1.0) + best, grid.size()};
}

struct RegimeParams {
  std::uint32_t n;
  std::uint32_t k;
  std::uint64_t m;
  double alpha_sat_est;        // 2^k ln2 - 1 unless overridden
  double alpha_d;              // 2^k ln2 - k
  std::optional<double> z;        // (ln(m/n) - k ln2)/k, defined for m >= n 2^k
  std::optional<double> z_prime;  // z + ln k / k
  double t;                    // (m/n)^(1/k)
};

inline RegimeParams regime_params(std::uint32_t n, std::uint32_t k, std::uint64_t m,
                                  std::optional<double> alpha_sat_est = std::nullopt) {
  if (m < 1) throw std::invalid_argument("regime_params: m < 1");
  if (n < 1) throw std::invalid_argument("regime_params: n < 1");
  RegimeParams rp;
  rp.n = n;
  rp.k = k;
  rp.m = m;
  rp.alpha_sat_est = alpha_sat_est.value_or(default_alpha_sat_est(k));
  rp.alpha_d = alpha_d(k);
  double ratio = static_cast<double>(m) / static_cast<double>(n);
  bool z_defined =
      k <= 63 && static_cast<unsigned __int128>(m) >= (static_cast<unsigned __int128>(n) << k);
  if (z_defined) {
    double z = (std::log(ratio) - static_cast<double>(k) * std::numbers::ln2) /
               static_cast<double>(k);
    rp.z = z;
    rp.z_prime = z + std::log(static_cast<double>(k)) / static_cast<double>(k);
  }
  rp.t = std::pow(ratio, 1.0 / static_cast<double>(k));
  return rp;
}

}  // namespace satlab
