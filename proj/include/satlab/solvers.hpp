#pragma once

// Simple-PPZ, its repeated-trial driver, the uniform-sampling solver, and
// the budgeted dispatch that routes a random instance to whichever of the
// two is predicted cheaper.
//
// Simple-PPZ, one pass: sweep i over 1..n; while any clause is unit,
// satisfy the first unit clause in clause order (deterministic tie-break);
// otherwise flip a fair coin for x_i if it is still unset and advance. The
// pass aborts as soon as a clause is falsified -- a falsified clause can
// never recover, so only runtime changes, not outcomes (tested). Repeated
// drivers give trial t its own derived stream, so results are independent
// of scheduling and of how many trials run.

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "analysis.hpp"
#include "core.hpp"
#include "oracle.hpp"
#include "rng.hpp"

namespace satlab {

struct BudgetPolicy {
  double gamma = 0.1;        // hidden constant of the Omega(log k / k) good fraction
  double poly_factor = 1.0;  // poly(n) repetition exponent
  std::uint64_t cap = std::uint64_t{1} << 40;  // absolute trial ceiling
  double tail = 1.0;         // hidden constant of the 2^{O(nk/2^k)} deviation term

  void check() const {
    if (gamma <= 0 || poly_factor <= 0 || cap == 0 || tail <= 0)
      throw std::invalid_argument("BudgetPolicy: all fields must be positive");
  }
};

enum class SolveMethod { ppz, sampling };

struct SolveOutcome {
  std::optional<Assignment> assignment;  // satisfies the formula whenever set
  std::uint64_t trials_used = 0;
  double elapsed_ms = 0.0;
  SolveMethod method = SolveMethod::ppz;

  bool found() const { return assignment.has_value(); }
};

// One-formula workspace for repeated PPZ passes: per-variable occurrence
// lists plus per-clause satisfied flags / falsified-literal counts, and a
// bitset of currently-unit clauses for the first-in-clause-order pick.
class PpzRunner {
public:
  explicit PpzRunner(const Formula& f) : f_(&f), pa_(f.n()) {
    if (auto v = validate_structure(f))
      throw std::invalid_argument("PpzRunner: invalid formula: " + v->describe());
    std::size_t m = f.clause_count();
    len_.resize(m);
    occ_offset_.assign(f.n() + 2, 0);
    for (std::size_t i = 0; i < m; ++i) {
      len_[i] = static_cast<std::uint32_t>(f.clause(i).size());
      for (Lit l : f.clause(i)) ++occ_offset_[l.var() + 1];
    }
    for (std::size_t v = 1; v < occ_offset_.size(); ++v) occ_offset_[v] += occ_offset_[v - 1];
    occ_.resize(f.literal_count());
    std::vector<std::uint32_t> cursor(occ_offset_.begin(), occ_offset_.end() - 1);
    for (std::size_t i = 0; i < m; ++i)
      for (Lit l : f.clause(i))
        occ_[cursor[l.var()]++] = (static_cast<std::uint64_t>(i) << 1) | (l.positive() ? 1u : 0u);
    sat_.resize(m);
    false_count_.resize(m);
    unit_words_.resize((m + 63) / 64);
  }

  // One Simple-PPZ pass with fresh randomness; nullopt is NotFound.
  std::optional<Assignment> run(RandomStream& rng, bool abort_on_falsified = true) {
    reset();
    const Formula& f = *f_;
    std::uint32_t n = f.n();
    std::size_t m = f.clause_count();

    for (std::size_t c = 0; c < m; ++c) {
      if (len_[c] == 0) falsified_seen_ = true;  // empty clause: dead on arrival
      if (len_[c] == 1) set_unit(c);
    }
    if (falsified_seen_ && abort_on_falsified) return std::nullopt;

    std::uint32_t i = 1;
    while (i <= n) {
      std::int64_t c = first_unit();
      if (c >= 0) {
        Lit forced = unset_literal(static_cast<std::size_t>(c));
        pa_.assign(forced.var(), forced.positive());
        if (!propagate(forced.var(), forced.positive()) && abort_on_falsified)
          return std::nullopt;
      } else if (!pa_.is_set(i)) {
        bool bit = rng.next_bool();
        pa_.assign(i, bit);
        bool ok = propagate(i, bit);
        ++i;
        if (!ok && abort_on_falsified) return std::nullopt;
      } else {
        ++i;
      }
    }

    if (falsified_seen_ || sat_count_ != m) return std::nullopt;
    Assignment a = pa_.to_total();
    if (!eval_formula(f, a))
      throw std::logic_error("PpzRunner: incremental state disagrees with eval_formula");
    return a;
  }

private:
  void reset() {
    pa_.reset();
    std::fill(sat_.begin(), sat_.end(), 0);
    std::fill(false_count_.begin(), false_count_.end(), 0);
    std::fill(unit_words_.begin(), unit_words_.end(), 0);
    sat_count_ = 0;
    falsified_seen_ = false;
  }

  void set_unit(std::size_t c) { unit_words_[c >> 6] |= std::uint64_t{1} << (c & 63); }
  void clear_unit(std::size_t c) { unit_words_[c >> 6] &= ~(std::uint64_t{1} << (c & 63)); }

  std::int64_t first_unit() const {
    for (std::size_t w = 0; w < unit_words_.size(); ++w)
      if (unit_words_[w]) return static_cast<std::int64_t>((w << 6) + std::countr_zero(unit_words_[w]));
    return -1;
  }

  Lit unset_literal(std::size_t c) const {
    for (Lit l : f_->clause(c))
      if (!pa_.is_set(l.var())) return l;
    throw std::logic_error("PpzRunner: unit clause without unset literal");
  }

  // Updates clause state after var := value. Returns false iff some clause
  // became falsified (state stays consistent either way).
  bool propagate(std::uint32_t var, bool value) {
    bool ok = true;
    for (std::uint32_t idx = occ_offset_[var]; idx < occ_offset_[var + 1]; ++idx) {
      std::uint64_t entry = occ_[idx];
      std::size_t c = entry >> 1;
      if (sat_[c]) continue;
      if (static_cast<bool>(entry & 1) == value) {
        sat_[c] = 1;
        ++sat_count_;
        clear_unit(c);
      } else {
        std::uint32_t fc = ++false_count_[c];
        if (fc == len_[c]) {
          falsified_seen_ = true;
          ok = false;
          clear_unit(c);
        } else if (fc == len_[c] - 1) {
          set_unit(c);
        }
      }
    }
    return ok;
  }

  const Formula* f_;
  PartialAssignment pa_;
  std::vector<std::uint32_t> len_;
  std::vector<std::uint32_t> occ_offset_;
  std::vector<std::uint64_t> occ_;  // (clause << 1) | positive
  std::vector<std::uint8_t> sat_;
  std::vector<std::uint32_t> false_count_;
  std::vector<std::uint64_t> unit_words_;
  std::size_t sat_count_ = 0;
  bool falsified_seen_ = false;
};

inline std::optional<Assignment> simple_ppz_run(const Formula& f, RandomStream& rng,
                                                bool abort_on_falsified = true) {
  PpzRunner runner(f);
  return runner.run(rng, abort_on_falsified);
}

// Up to `trials` Simple-PPZ passes, trial t on stream rng.derive(t);
// first success wins (lowest trial index, schedule-independent).
inline SolveOutcome ppz_repeat(const Formula& f, std::uint64_t trials, const RandomStream& rng) {
  if (trials < 1) throw std::invalid_argument("ppz_repeat: trials < 1");
  auto start = std::chrono::steady_clock::now();
  PpzRunner runner(f);
  SolveOutcome out;
  out.method = SolveMethod::ppz;
  for (std::uint64_t t = 0; t < trials; ++t) {
    RandomStream trial_rng = rng.derive(t);
    if (auto a = runner.run(trial_rng)) {
      out.assignment = std::move(a);
      out.trials_used = t + 1;
      out.elapsed_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start).count();
      return out;
    }
  }
  out.trials_used = trials;
  out.elapsed_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start).count();
  return out;
}

// Tests `trials` i.i.d. uniform total assignments; first satisfying wins.
inline SolveOutcome uniform_sampling_solver(const Formula& f, std::uint64_t trials,
                                            const RandomStream& rng) {
  if (trials < 1) throw std::invalid_argument("uniform_sampling_solver: trials < 1");
  auto start = std::chrono::steady_clock::now();
  SolveOutcome out;
  out.method = SolveMethod::sampling;

  if (f.n() <= 64) {
    detail::ClauseMasks cm(f);
    std::uint64_t nmask =
        f.n() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << f.n()) - 1;
    for (std::uint64_t t = 0; t < trials; ++t) {
      RandomStream trial_rng = rng.derive(t);
      std::uint64_t x = trial_rng.next_u64() & nmask;
      if (cm.satisfied_by(x)) {
        out.assignment = Assignment::from_bits(f.n(), x);
        out.trials_used = t + 1;
        out.elapsed_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - start).count();
        return out;
      }
    }
  } else {
    for (std::uint64_t t = 0; t < trials; ++t) {
      RandomStream trial_rng = rng.derive(t);
      Assignment a(f.n());
      for (std::uint32_t v = 1; v <= f.n(); v += 64) {
        std::uint64_t w = trial_rng.next_u64();
        std::uint32_t hi = std::min(f.n(), v + 63);
        for (std::uint32_t u = v; u <= hi; ++u)
          if ((w >> (u - v)) & 1u) a.set(u, true);
      }
      if (eval_formula(f, a)) {
        out.assignment = std::move(a);
        out.trials_used = t + 1;
        out.elapsed_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - start).count();
        return out;
      }
    }
  }
  out.trials_used = trials;
  out.elapsed_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start).count();
  return out;
}

// Predicted good fraction g for a planted instance at density m/n: the best
// of the three regimes the analysis provides --
//   gamma * ln k / k                         (threshold regime)
//   gamma * (z + ln k / k),  z = (ln(m/n) - k ln2)/k   when m/n >= 2^k
//   (1 - 2/t)(1 - 2/k),      t = (m/n)^{1/k}           when t > 2
inline double predicted_good_fraction(std::uint32_t n, std::uint32_t k, std::uint64_t m,
                                      double gamma) {
  double kk = static_cast<double>(k);
  double ratio = static_cast<double>(m) / static_cast<double>(n);
  double g = gamma * std::log(kk) / kk;
  if (k <= 63 &&
      static_cast<unsigned __int128>(m) >= (static_cast<unsigned __int128>(n) << k)) {
    double z = (std::log(ratio) - kk * std::numbers::ln2) / kk;
    g = std::max(g, gamma * (z + std::log(kk) / kk));
  }
  double t = std::pow(ratio, 1.0 / kk);
  if (t > 2.0) g = std::max(g, (1.0 - 2.0 / t) * (1.0 - 2.0 / kk));
  return std::min(std::max(g, 0.0), 1.0);
}

namespace detail {

inline double ppz_budget_log2(std::uint32_t n, std::uint32_t k, std::uint64_t m,
                              const BudgetPolicy& policy) {
  double g = predicted_good_fraction(n, k, m, policy.gamma);
  return policy.poly_factor * std::log2(static_cast<double>(n)) +
         static_cast<double>(n) * (1.0 - g);
}

inline std::uint64_t budget_from_log2(double log2_budget, std::uint64_t cap) {
  if (log2_budget >= std::log2(static_cast<double>(cap))) return cap;
  double v = std::exp2(log2_budget);
  std::uint64_t b = static_cast<std::uint64_t>(std::ceil(v));
  return b < 1 ? 1 : b;
}

}  // namespace detail

// Trial budget for the PPZ route: ceil(n^poly_factor * 2^{n(1-g)}), clamped
// to policy.cap.
inline std::uint64_t planted_trial_budget(std::uint32_t n, std::uint32_t k, std::uint64_t m,
                                          const BudgetPolicy& policy) {
  if (m < 1) throw std::invalid_argument("planted_trial_budget: m < 1");
  policy.check();
  return detail::budget_from_log2(detail::ppz_budget_log2(n, k, m, policy), policy.cap);
}

// Dispatch solver for random instances: below
// m < (2^k ln2 - k) n (1 - g/2) the expected solution count is large
// enough that uniform sampling with budget
//   ceil(n^poly_factor * 2^n * 2^{tail * nk / 2^k} / E[Z]),
// E[Z] = 2^n (1 - 2^-k)^m, finds a model whp; otherwise PPZ runs with
// planted_trial_budget. Budgets above policy.cap raise CapExceededError,
// which is a different animal from a NotFound outcome.
inline SolveOutcome solve_random_ksat(const Formula& f, std::uint32_t n, std::uint32_t k,
                                      std::uint64_t m, const BudgetPolicy& policy,
                                      const RandomStream& rng) {
  policy.check();
  double g = predicted_good_fraction(n, k, m, policy.gamma);
  double crossover = alpha_d(k) * static_cast<double>(n) * (1.0 - g / 2.0);
  double log2_cap = std::log2(static_cast<double>(policy.cap));

  if (static_cast<double>(m) < crossover) {
    // log2 budget = pf log2 n + tail*nk/2^k - m log2(1 - 2^-k)
    double log2_keep = std::log1p(-std::ldexp(1.0, -static_cast<int>(k))) / std::numbers::ln2;
    double log2_budget =
        policy.poly_factor * std::log2(static_cast<double>(n)) +
        policy.tail * static_cast<double>(n) * static_cast<double>(k) /
            std::exp2(static_cast<double>(k)) -
        static_cast<double>(m) * log2_keep;
    if (log2_budget > log2_cap)
      throw CapExceededError("solve_random_ksat: sampling budget above policy cap");
    return uniform_sampling_solver(f, detail::budget_from_log2(log2_budget, policy.cap), rng);
  }

  double log2_budget = detail::ppz_budget_log2(n, k, m, policy);
  if (log2_budget > log2_cap)
    throw CapExceededError("solve_random_ksat: PPZ budget above policy cap");
  return ppz_repeat(f, detail::budget_from_log2(log2_budget, policy.cap), rng);
}

}  // namespace satlab
