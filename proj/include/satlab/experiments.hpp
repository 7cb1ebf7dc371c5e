#pragma once

// Scripted experiments and results persistence.
//
// Four experiments, each a grid of independent tasks driven by derived
// random streams (task index -> stream label), so any worker count produces
// the same records in the same order:
//   good_fraction  sample P(n,k,m) per (k,m) point, record the good count
//   ppz_success    per planted instance, measure single-run PPZ success
//                  frequency and the instance's good count
//   counting       Monte-Carlo oracle model counts of R(n,k,m) draws
//   end_to_end     satisfiable R instances through solve_random_ksat
//
// CSV layout: '#' comment lines carry reproducibility metadata (and, at the
// end, aggregate wall time -- the only nondeterministic line). Everything
// else is the body: a fixed header row and one row per (point, instance,
// quantity), byte-identical for identical (config, seed) at any worker
// count. Column order: experiment,n,k,m,instance,seed,quantity,value,
// trials_used,error.

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "analysis.hpp"
#include "core.hpp"
#include "distributions.hpp"
#include "oracle.hpp"
#include "rng.hpp"
#include "solvers.hpp"

namespace satlab {

inline constexpr const char* kSatlabVersion = "0.1.0";
inline constexpr std::uint32_t kConfigSchema = 1;

enum class ExperimentKind { good_fraction, ppz_success, counting, end_to_end };

inline const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::good_fraction: return "good_fraction";
    case ExperimentKind::ppz_success: return "ppz_success";
    case ExperimentKind::counting: return "counting";
    case ExperimentKind::end_to_end: return "end_to_end";
  }
  return "?";
}

inline std::optional<ExperimentKind> experiment_from_string(const std::string& s) {
  if (s == "good_fraction") return ExperimentKind::good_fraction;
  if (s == "ppz_success") return ExperimentKind::ppz_success;
  if (s == "counting") return ExperimentKind::counting;
  if (s == "end_to_end") return ExperimentKind::end_to_end;
  return std::nullopt;
}

struct ExperimentPoint {
  std::uint32_t k;
  std::uint64_t m;
  bool operator==(const ExperimentPoint&) const = default;
};

struct ExperimentConfig {
  std::uint32_t schema = kConfigSchema;
  ExperimentKind kind = ExperimentKind::counting;
  std::uint64_t seed = 0;
  std::uint32_t n = 0;
  std::vector<ExperimentPoint> points;  // good_fraction
  std::uint32_t k = 0;                  // ppz_success, counting
  std::uint64_t m = 0;                  // ppz_success, counting
  std::vector<double> densities;        // end_to_end (m = round(density * n))
  std::uint32_t samples = 0;            // good_fraction, counting
  std::uint32_t instances = 0;          // ppz_success, end_to_end
  std::uint64_t trials = 0;             // ppz_success
  std::uint32_t max_attempts = 1000;    // end_to_end instance generation
  BudgetPolicy policy;                  // end_to_end
  std::string out;                      // CSV path; empty = do not write

  bool operator==(const ExperimentConfig& o) const {
    return schema == o.schema && kind == o.kind && seed == o.seed && n == o.n &&
           points == o.points && k == o.k && m == o.m && densities == o.densities &&
           samples == o.samples && instances == o.instances && trials == o.trials &&
           max_attempts == o.max_attempts && policy.gamma == o.policy.gamma &&
           policy.poly_factor == o.policy.poly_factor && policy.cap == o.policy.cap &&
           policy.tail == o.policy.tail && out == o.out;
  }
};

struct ExperimentRecord {
  ExperimentKind experiment;
  std::uint32_t n;
  std::uint32_t k;
  std::uint64_t m;
  std::uint64_t instance;       // index within its point
  std::uint64_t instance_seed;  // derived stream identity for this instance
  std::string quantity;
  double value;
  std::uint64_t trials_used;
  std::string error;            // empty on success
  double elapsed_ms = 0.0;      // not part of the CSV body
};

// ---------------------------------------------------------------------------
// config file format: flat "key = value" lines, '#' comments, versioned via
// the mandatory schema key, unknown or inapplicable keys rejected.

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

inline std::string write_config(const ExperimentConfig& c) {
  std::string s;
  s += "schema = " + std::to_string(c.schema) + "\n";
  s += "experiment = " + std::string(to_string(c.kind)) + "\n";
  s += "seed = " + std::to_string(c.seed) + "\n";
  s += "n = " + std::to_string(c.n) + "\n";
  switch (c.kind) {
    case ExperimentKind::good_fraction: {
      s += "points =";
      for (const auto& p : c.points)
        s += " " + std::to_string(p.k) + ":" + std::to_string(p.m);
      s += "\n";
      s += "samples = " + std::to_string(c.samples) + "\n";
      break;
    }
    case ExperimentKind::ppz_success:
      s += "k = " + std::to_string(c.k) + "\n";
      s += "m = " + std::to_string(c.m) + "\n";
      s += "instances = " + std::to_string(c.instances) + "\n";
      s += "trials = " + std::to_string(c.trials) + "\n";
      break;
    case ExperimentKind::counting:
      s += "k = " + std::to_string(c.k) + "\n";
      s += "m = " + std::to_string(c.m) + "\n";
      s += "samples = " + std::to_string(c.samples) + "\n";
      break;
    case ExperimentKind::end_to_end: {
      s += "k = " + std::to_string(c.k) + "\n";
      s += "densities =";
      for (double d : c.densities) s += " " + detail::format_double(d);
      s += "\n";
      s += "instances = " + std::to_string(c.instances) + "\n";
      s += "max_attempts = " + std::to_string(c.max_attempts) + "\n";
      s += "gamma = " + detail::format_double(c.policy.gamma) + "\n";
      s += "poly_factor = " + detail::format_double(c.policy.poly_factor) + "\n";
      s += "cap = " + std::to_string(c.policy.cap) + "\n";
      s += "tail = " + detail::format_double(c.policy.tail) + "\n";
      break;
    }
  }
  if (!c.out.empty()) s += "out = " + c.out + "\n";
  return s;
}

inline ExperimentConfig parse_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: line " + std::to_string(line_no) + ": expected key = value");
    std::string key = detail::trim(t.substr(0, eq));
    std::string val = detail::trim(t.substr(eq + 1));
    if (kv.count(key))
      throw std::runtime_error("config: duplicate key '" + key + "'");
    kv[key] = val;
  }

  auto take = [&](const char* key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto require = [&](const char* key) {
    auto v = take(key);
    if (!v) throw std::runtime_error(std::string("config: missing key '") + key + "'");
    return *v;
  };

  ExperimentConfig c;
  c.schema = static_cast<std::uint32_t>(std::stoul(require("schema")));
  if (c.schema != kConfigSchema)
    throw std::runtime_error("config: unsupported schema " + std::to_string(c.schema));
  auto kind = experiment_from_string(require("experiment"));
  if (!kind) throw std::runtime_error("config: unknown experiment");
  c.kind = *kind;
  c.seed = std::stoull(require("seed"));
  c.n = static_cast<std::uint32_t>(std::stoul(require("n")));

  switch (c.kind) {
    case ExperimentKind::good_fraction: {
      std::istringstream ps(require("points"));
      std::string tok;
      while (ps >> tok) {
        std::size_t colon = tok.find(':');
        if (colon == std::string::npos)
          throw std::runtime_error("config: bad point '" + tok + "', expected k:m");
        c.points.push_back({static_cast<std::uint32_t>(std::stoul(tok.substr(0, colon))),
                            std::stoull(tok.substr(colon + 1))});
      }
      if (c.points.empty()) throw std::runtime_error("config: empty points grid");
      c.samples = static_cast<std::uint32_t>(std::stoul(require("samples")));
      break;
    }
    case ExperimentKind::ppz_success:
      c.k = static_cast<std::uint32_t>(std::stoul(require("k")));
      c.m = std::stoull(require("m"));
      c.instances = static_cast<std::uint32_t>(std::stoul(require("instances")));
      c.trials = std::stoull(require("trials"));
      break;
    case ExperimentKind::counting:
      c.k = static_cast<std::uint32_t>(std::stoul(require("k")));
      c.m = std::stoull(require("m"));
      c.samples = static_cast<std::uint32_t>(std::stoul(require("samples")));
      break;
    case ExperimentKind::end_to_end: {
      c.k = static_cast<std::uint32_t>(std::stoul(require("k")));
      std::istringstream ds(require("densities"));
      double d;
      while (ds >> d) c.densities.push_back(d);
      if (c.densities.empty()) throw std::runtime_error("config: empty densities grid");
      c.instances = static_cast<std::uint32_t>(std::stoul(require("instances")));
      if (auto v = take("max_attempts"))
        c.max_attempts = static_cast<std::uint32_t>(std::stoul(*v));
      if (auto v = take("gamma")) c.policy.gamma = std::stod(*v);
      if (auto v = take("poly_factor")) c.policy.poly_factor = std::stod(*v);
      if (auto v = take("cap")) c.policy.cap = std::stoull(*v);
      if (auto v = take("tail")) c.policy.tail = std::stod(*v);
      break;
    }
  }
  if (auto v = take("out")) c.out = *v;
  if (!kv.empty())
    throw std::runtime_error("config: unknown or inapplicable key '" + kv.begin()->first + "'");

  if ((c.kind == ExperimentKind::good_fraction || c.kind == ExperimentKind::counting) &&
      c.samples < 1)
    throw std::runtime_error("config: samples must be >= 1");
  if ((c.kind == ExperimentKind::ppz_success || c.kind == ExperimentKind::end_to_end) &&
      c.instances < 1)
    throw std::runtime_error("config: instances must be >= 1");
  if (c.kind == ExperimentKind::ppz_success && c.trials < 1)
    throw std::runtime_error("config: trials must be >= 1");
  return c;
}

// ---------------------------------------------------------------------------
// CSV

inline void write_csv(std::ostream& os, const ExperimentConfig& config,
                      const std::vector<ExperimentRecord>& records) {
  os << "# satlab-results v1\n";
  os << "# version=" << kSatlabVersion << "\n";
  os << "# experiment=" << to_string(config.kind) << "\n";
  os << "# master_seed=" << config.seed << "\n";
  os << "experiment,n,k,m,instance,seed,quantity,value,trials_used,error\n";
  double total_ms = 0.0;
  for (const auto& r : records) {
    std::string err = r.error;
    for (char& ch : err)
      if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
    os << to_string(r.experiment) << ',' << r.n << ',' << r.k << ',' << r.m << ',' << r.instance
       << ',' << r.instance_seed << ',' << r.quantity << ',' << detail::format_double(r.value)
       << ',' << r.trials_used << ',' << err << '\n';
    total_ms += r.elapsed_ms;
  }
  os << "# elapsed_ms=" << detail::format_double(total_ms) << "\n";
}

// The deterministic part of a CSV file: every line not starting with '#'.
inline std::string csv_body(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line, body;
  while (std::getline(in, line))
    if (line.empty() || line[0] != '#') {
      body += line;
      body += '\n';
    }
  return body;
}

// ---------------------------------------------------------------------------
// execution

inline unsigned worker_count_from_env() {
  const char* env = std::getenv("SATLAB_WORKERS");
  if (!env) return 1;
  long v = std::strtol(env, nullptr, 10);
  return v >= 1 ? static_cast<unsigned>(v) : 1;
}

namespace detail {

// Runs fn(task_index) for every index in [0, count); with workers > 1 the
// indices are pulled from a shared counter. fn must confine its effects to
// its own task slot.
template <class Fn>
inline void run_tasks(std::size_t count, unsigned workers, Fn&& fn) {
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// Stable 64-bit identity of a derived stream, recorded in the seed column.
inline std::uint64_t stream_identity(const RandomStream& s) {
  return mix64(s.seed() ^ mix64(s.label()));
}

inline std::vector<ExperimentRecord> run_good_fraction(const ExperimentConfig& c,
                                                       unsigned workers) {
  std::size_t tasks = c.points.size() * c.samples;
  std::vector<std::vector<ExperimentRecord>> slots(tasks);
  RandomStream master(c.seed);
  run_tasks(tasks, workers, [&](std::size_t task) {
    std::size_t point_idx = task / c.samples;
    std::uint64_t sample_idx = task % c.samples;
    const ExperimentPoint& pt = c.points[point_idx];
    RandomStream rng = master.derive(task);
    auto start = std::chrono::steady_clock::now();
    ExperimentRecord rec{c.kind, c.n, pt.k, pt.m, sample_idx, stream_identity(rng),
                         "good_count", 0.0, 0, "", 0.0};
    try {
      PlantedInstance inst = sample_P(c.n, pt.k, static_cast<std::uint32_t>(pt.m), rng);
      rec.value = static_cast<double>(good_variables(inst.formula, inst.sigma).good_count());
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
    rec.elapsed_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start).count();
    slots[task].push_back(std::move(rec));
  });
  std::vector<ExperimentRecord> out;
  for (auto& s : slots) out.insert(out.end(), s.begin(), s.end());
  return out;
}

inline std::vector<ExperimentRecord> run_ppz_success(const ExperimentConfig& c,
                                                     unsigned workers) {
  std::vector<std::vector<ExperimentRecord>> slots(c.instances);
  RandomStream master(c.seed);
  run_tasks(c.instances, workers, [&](std::size_t task) {
    RandomStream rng = master.derive(task);
    auto start = std::chrono::steady_clock::now();
    ExperimentRecord good{c.kind, c.n, c.k, c.m, task, stream_identity(rng),
                          "good_count", 0.0, 0, "", 0.0};
    ExperimentRecord rate{c.kind, c.n, c.k, c.m, task, stream_identity(rng),
                          "success_rate", 0.0, c.trials, "", 0.0};
    try {
      PlantedInstance inst = sample_P(c.n, c.k, static_cast<std::uint32_t>(c.m), rng);
      good.value = static_cast<double>(good_variables(inst.formula, inst.sigma).good_count());
      PpzRunner runner(inst.formula);
      std::uint64_t successes = 0;
      for (std::uint64_t t = 0; t < c.trials; ++t) {
        RandomStream trial = rng.derive(t);
        if (runner.run(trial)) ++successes;
      }
      rate.value = static_cast<double>(successes) / static_cast<double>(c.trials);
    } catch (const std::exception& e) {
      good.error = e.what();
      rate.error = e.what();
    }
    rate.elapsed_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start).count();
    slots[task].push_back(std::move(good));
    slots[task].push_back(std::move(rate));
  });
  std::vector<ExperimentRecord> out;
  for (auto& s : slots) out.insert(out.end(), s.begin(), s.end());
  return out;
}

inline std::vector<ExperimentRecord> run_counting(const ExperimentConfig& c, unsigned workers) {
  std::vector<std::vector<ExperimentRecord>> slots(c.samples);
  RandomStream master(c.seed);
  run_tasks(c.samples, workers, [&](std::size_t task) {
    RandomStream rng = master.derive(task);
    auto start = std::chrono::steady_clock::now();
    ExperimentRecord rec{c.kind, c.n, c.k, c.m, task, stream_identity(rng),
                         "solutions", 0.0, 0, "", 0.0};
    try {
      Formula f = sample_R(c.n, c.k, static_cast<std::uint32_t>(c.m), rng);
      rec.value = static_cast<double>(count_solutions(f).solutions);
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
    rec.elapsed_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start).count();
    slots[task].push_back(std::move(rec));
  });
  std::vector<ExperimentRecord> out;
  for (auto& s : slots) out.insert(out.end(), s.begin(), s.end());
  return out;
}

// Draws one oracle-certified satisfiable R(n,k,m) instance. Below the
// alpha_sat estimate plain rejection from R is cheap; above it the planted
// route (accept F ~ P with probability 1/Z) produces the identical
// conditional distribution at O(1) expected attempts.
inline Formula sample_satisfiable_R(std::uint32_t n, std::uint32_t k, std::uint32_t m,
                                    RandomStream& rng, std::uint32_t max_attempts) {
  bool below = static_cast<double>(m) <= default_alpha_sat_est(k) * static_cast<double>(n);
  if (below) {
    return sample_R_plus(
               n, k, m, rng,
               [](const Formula& f) { return brute_force_sat(f).has_value(); }, max_attempts)
        .formula;
  }
  return sample_R_plus_via_planted(
             n, k, m, rng,
             [](const Formula& f) { return count_solutions(f).solutions; }, max_attempts)
      .formula;
}

inline std::vector<ExperimentRecord> run_end_to_end(const ExperimentConfig& c,
                                                    unsigned workers) {
  std::size_t tasks = c.densities.size() * c.instances;
  std::vector<std::vector<ExperimentRecord>> slots(tasks);
  RandomStream master(c.seed);
  run_tasks(tasks, workers, [&](std::size_t task) {
    std::size_t density_idx = task / c.instances;
    std::uint64_t inst_idx = task % c.instances;
    std::uint64_t m =
        static_cast<std::uint64_t>(std::llround(c.densities[density_idx] * c.n));
    RandomStream rng = master.derive(task);
    auto start = std::chrono::steady_clock::now();
    ExperimentRecord solved{c.kind, c.n, c.k, m, inst_idx, stream_identity(rng),
                            "solved", 0.0, 0, "", 0.0};
    ExperimentRecord method{c.kind, c.n, c.k, m, inst_idx, stream_identity(rng),
                            "method_ppz", 0.0, 0, "", 0.0};
    try {
      Formula f = sample_satisfiable_R(c.n, c.k, static_cast<std::uint32_t>(m), rng,
                                       c.max_attempts);
      SolveOutcome outcome =
          solve_random_ksat(f, c.n, c.k, m, c.policy, rng.derive(0x501f));
      solved.trials_used = outcome.trials_used;
      method.value = outcome.method == SolveMethod::ppz ? 1.0 : 0.0;
      if (outcome.found()) {
        if (!eval_formula(f, *outcome.assignment))
          throw std::logic_error("end_to_end: solver emitted an invalid certificate");
        solved.value = 1.0;
      }
    } catch (const std::exception& e) {
      solved.error = e.what();
      method.error = e.what();
    }
    solved.elapsed_ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - start).count();
    slots[task].push_back(std::move(solved));
    slots[task].push_back(std::move(method));
  });
  std::vector<ExperimentRecord> out;
  for (auto& s : slots) out.insert(out.end(), s.begin(), s.end());
  return out;
}

}  // namespace detail

// Runs the configured experiment and returns its records (sorted by point
// then instance index). Writes the CSV when config.out is nonempty.
inline std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& config,
                                                    unsigned workers = 1) {
  std::vector<ExperimentRecord> records;
  switch (config.kind) {
    case ExperimentKind::good_fraction:
      records = detail::run_good_fraction(config, workers);
      break;
    case ExperimentKind::ppz_success:
      records = detail::run_ppz_success(config, workers);
      break;
    case ExperimentKind::counting:
      records = detail::run_counting(config, workers);
      break;
    case ExperimentKind::end_to_end:
      records = detail::run_end_to_end(config, workers);
      break;
  }
  if (!config.out.empty()) {
    std::ofstream os(config.out, std::ios::binary);
    if (!os) throw std::runtime_error("run_experiment: cannot open '" + config.out + "'");
    write_csv(os, config, records);
  }
  return records;
}

}  // namespace satlab
