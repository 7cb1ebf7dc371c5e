#pragma once

// CNF formulas, assignments and clause evaluation. Everything else in
// satlab builds on the types in this header.
//
// Conventions:
//   - variables are 1-based externally (DIMACS style), literals are stored
//     as nonzero signed codes: +v is the positive literal, -v the negative.
//   - a literal is satisfied by an assignment iff the assigned bit equals
//     the literal sign (true for positive).
//   - clauses keep their literals sorted by variable index so that equal
//     clauses compare equal; formulas keep clauses in draw order and may
//     contain duplicates (i.i.d. sampling semantics).

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace satlab {

class Lit {
public:
  Lit() : code_(0) {}
  Lit(std::uint32_t var, bool positive)
      : code_(positive ? static_cast<std::int32_t>(var)
                       : -static_cast<std::int32_t>(var)) {
    if (var == 0) throw std::invalid_argument("Lit: variable index must be >= 1");
  }
  static Lit from_code(std::int32_t code) {
    if (code == 0) throw std::invalid_argument("Lit: code 0 is reserved");
    Lit l;
    l.code_ = code;
    return l;
  }

  std::uint32_t var() const { return static_cast<std::uint32_t>(code_ < 0 ? -code_ : code_); }
  bool positive() const { return code_ > 0; }
  std::int32_t code() const { return code_; }
  Lit negated() const { return from_code(-code_); }

  friend bool operator==(Lit a, Lit b) { return a.code_ == b.code_; }
  friend bool operator!=(Lit a, Lit b) { return a.code_ != b.code_; }

private:
  std::int32_t code_;
};

using Clause = std::vector<Lit>;

inline void sort_clause(Clause& c) {
  std::sort(c.begin(), c.end(), [](Lit a, Lit b) { return a.var() < b.var(); });
}

// Total assignment over variables 1..n, packed 64 per word.
class Assignment {
public:
  Assignment() : n_(0) {}
  explicit Assignment(std::uint32_t n) : n_(n), words_((n + 63) / 64, 0) {}

  static Assignment from_bits(std::uint32_t n, std::uint64_t bits) {
    if (n > 64) throw std::invalid_argument("Assignment::from_bits: n > 64");
    Assignment a(n);
    if (!a.words_.empty()) a.words_[0] = n == 64 ? bits : (bits & ((std::uint64_t{1} << n) - 1));
    return a;
  }

  std::uint32_t n() const { return n_; }
  bool get(std::uint32_t var) const {
    return (words_[(var - 1) >> 6] >> ((var - 1) & 63)) & 1u;
  }
  void set(std::uint32_t var, bool value) {
    std::uint64_t bit = std::uint64_t{1} << ((var - 1) & 63);
    if (value)
      words_[(var - 1) >> 6] |= bit;
    else
      words_[(var - 1) >> 6] &= ~bit;
  }
  bool satisfies(Lit l) const { return get(l.var()) == l.positive(); }

  // Low word view, valid for n <= 64; used by the mask-based evaluators.
  std::uint64_t low_bits() const { return words_.empty() ? 0 : words_[0]; }
  const std::vector<std::uint64_t>& words() const { return words_; }

  friend bool operator==(const Assignment& a, const Assignment& b) {
    return a.n_ == b.n_ && a.words_ == b.words_;
  }
  friend bool operator!=(const Assignment& a, const Assignment& b) { return !(a == b); }

private:
  std::uint32_t n_;
  std::vector<std::uint64_t> words_;
};

// Tri-state assignment used during a PPZ pass: value bits plus a "set" mask.
// A variable, once set, stays set until reset() (single-owner, one pass).
class PartialAssignment {
public:
  PartialAssignment() : n_(0), unset_(0) {}
  explicit PartialAssignment(std::uint32_t n)
      : n_(n), unset_(n), value_((n + 63) / 64, 0), set_((n + 63) / 64, 0) {}

  static PartialAssignment from_total(const Assignment& a) {
    PartialAssignment pa(a.n());
    for (std::uint32_t v = 1; v <= a.n(); ++v) pa.assign(v, a.get(v));
    return pa;
  }

  std::uint32_t n() const { return n_; }
  bool is_set(std::uint32_t var) const {
    return (set_[(var - 1) >> 6] >> ((var - 1) & 63)) & 1u;
  }
  bool value(std::uint32_t var) const {
    return (value_[(var - 1) >> 6] >> ((var - 1) & 63)) & 1u;
  }
  void assign(std::uint32_t var, bool val) {
    if (is_set(var)) throw std::logic_error("PartialAssignment: variable reassigned within a pass");
    std::uint64_t bit = std::uint64_t{1} << ((var - 1) & 63);
    set_[(var - 1) >> 6] |= bit;
    if (val) value_[(var - 1) >> 6] |= bit;
    --unset_;
  }
  std::uint32_t unset_count() const { return unset_; }
  bool is_total() const { return unset_ == 0; }

  void reset() {
    std::fill(value_.begin(), value_.end(), 0);
    std::fill(set_.begin(), set_.end(), 0);
    unset_ = n_;
  }

  Assignment to_total() const {
    if (!is_total()) throw std::logic_error("PartialAssignment: not total");
    Assignment a(n_);
    for (std::uint32_t v = 1; v <= n_; ++v)
      if (value(v)) a.set(v, true);
    return a;
  }

private:
  std::uint32_t n_;
  std::uint32_t unset_;
  std::vector<std::uint64_t> value_;
  std::vector<std::uint64_t> set_;
};

// Width-k CNF over n variables; clause literals are stored flat (CSR style)
// so multi-million-clause formulas cost one allocation, not one per clause.
class Formula {
public:
  Formula() : n_(0), k_(0) { offsets_.push_back(0); }
  Formula(std::uint32_t n, std::uint32_t k) : n_(n), k_(k) { offsets_.push_back(0); }

  std::uint32_t n() const { return n_; }
  std::uint32_t k() const { return k_; }
  void set_width(std::uint32_t k) { k_ = k; }
  std::size_t clause_count() const { return offsets_.size() - 1; }

  std::span<const Lit> clause(std::size_t i) const {
    return {lits_.data() + offsets_[i], lits_.data() + offsets_[i + 1]};
  }

  void add_clause(std::span<const Lit> lits) {
    std::size_t begin = lits_.size();
    lits_.insert(lits_.end(), lits.begin(), lits.end());
    std::sort(lits_.begin() + begin, lits_.end(),
              [](Lit a, Lit b) { return a.var() < b.var(); });
    offsets_.push_back(static_cast<std::uint32_t>(lits_.size()));
  }
  void add_clause(const Clause& c) { add_clause(std::span<const Lit>(c.data(), c.size())); }

  void clear_clauses() {
    lits_.clear();
    offsets_.assign(1, 0);
  }
  void reserve(std::size_t clauses, std::uint32_t width) {
    lits_.reserve(clauses * width);
    offsets_.reserve(clauses + 1);
  }

  std::size_t literal_count() const { return lits_.size(); }
  std::span<const Lit> all_literals() const { return lits_; }

  friend bool operator==(const Formula& a, const Formula& b) {
    if (a.n_ != b.n_ || a.k_ != b.k_ || a.offsets_ != b.offsets_) return false;
    for (std::size_t i = 0; i < a.lits_.size(); ++i)
      if (a.lits_[i] != b.lits_[i]) return false;
    return true;
  }
  friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }

private:
  std::uint32_t n_;
  std::uint32_t k_;
  std::vector<Lit> lits_;
  std::vector<std::uint32_t> offsets_;
};

struct ClauseStatus {
  enum class Kind { satisfied, falsified, unit, unresolved };
  Kind kind;
  Lit forced;  // meaningful only when kind == unit

  bool operator==(const ClauseStatus& o) const {
    return kind == o.kind && (kind != Kind::unit || forced == o.forced);
  }
};

inline ClauseStatus clause_status(std::span<const Lit> clause, const PartialAssignment& pa) {
  std::uint32_t unset = 0;
  Lit last_unset;
  for (Lit l : clause) {
    if (!pa.is_set(l.var())) {
      ++unset;
      last_unset = l;
    } else if (pa.value(l.var()) == l.positive()) {
      return {ClauseStatus::Kind::satisfied, Lit()};
    }
  }
  if (unset == 0) return {ClauseStatus::Kind::falsified, Lit()};
  if (unset == 1) return {ClauseStatus::Kind::unit, last_unset};
  return {ClauseStatus::Kind::unresolved, Lit()};
}

inline bool eval_clause(std::span<const Lit> clause, const Assignment& a) {
  for (Lit l : clause)
    if (a.satisfies(l)) return true;
  return false;
}

// True iff every clause has a satisfied literal. Rejects assignments over
// the wrong variable count; the Assignment type is total by construction.
inline bool eval_formula(const Formula& f, const Assignment& a) {
  if (a.n() != f.n()) throw std::invalid_argument("eval_formula: assignment size mismatch");
  for (std::size_t i = 0; i < f.clause_count(); ++i)
    if (!eval_clause(f.clause(i), a)) return false;
  return true;
}

struct FormulaViolation {
  enum class Kind { out_of_range_variable, repeated_variable, wrong_width };
  Kind kind;
  std::size_t clause_index;

  std::string describe() const {
    std::string what;
    switch (kind) {
      case Kind::out_of_range_variable: what = "out-of-range variable"; break;
      case Kind::repeated_variable: what = "repeated variable"; break;
      case Kind::wrong_width: what = "wrong width"; break;
    }
    return what + " in clause " + std::to_string(clause_index);
  }
};

// Structural validity only: variables in 1..n, no repeated variable within a
// clause. Width may vary (hand-built chain formulas, DIMACS files).
inline std::optional<FormulaViolation> validate_structure(const Formula& f) {
  for (std::size_t i = 0; i < f.clause_count(); ++i) {
    auto c = f.clause(i);
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (c[j].var() < 1 || c[j].var() > f.n())
        return FormulaViolation{FormulaViolation::Kind::out_of_range_variable, i};
      if (j > 0 && c[j].var() == c[j - 1].var())
        return FormulaViolation{FormulaViolation::Kind::repeated_variable, i};
    }
  }
  return std::nullopt;
}

// Full contract: structural validity plus every clause of width exactly k.
// Returns the first violation, std::nullopt when the formula is well formed.
inline std::optional<FormulaViolation> validate_formula(const Formula& f) {
  for (std::size_t i = 0; i < f.clause_count(); ++i) {
    auto c = f.clause(i);
    if (c.size() != f.k())
      return FormulaViolation{FormulaViolation::Kind::wrong_width, i};
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (c[j].var() < 1 || c[j].var() > f.n())
        return FormulaViolation{FormulaViolation::Kind::out_of_range_variable, i};
      if (j > 0 && c[j].var() == c[j - 1].var())
        return FormulaViolation{FormulaViolation::Kind::repeated_variable, i};
    }
  }
  return std::nullopt;
}

}  // namespace satlab
