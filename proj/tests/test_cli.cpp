#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <satlab/cli.hpp>
#include <sstream>

using namespace satlab;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / "satlab_cli_test") {
    fs::create_directories(path);
  }
  ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::vector<std::string>& args, std::string* out_text = nullptr,
        std::string* err_text = nullptr) {
  std::ostringstream out, err;
  int code = cli_main(args, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

}  // namespace

TEST_CASE("gen is deterministic per seed and writes valid planted files") {
  TempDir tmp;
  std::vector<std::string> cmd = {"gen",  "--dist", "planted", "--n",   "20",
                                  "--k",  "3",      "--m",     "60",    "--seed",
                                  "7",    "--out",  tmp.file("a.cnf")};
  CHECK(run(cmd) == 0);
  cmd.back() = tmp.file("b.cnf");
  CHECK(run(cmd) == 0);
  CHECK(slurp(tmp.file("a.cnf")) == slurp(tmp.file("b.cnf")));

  DimacsFile file = dimacs_read(slurp(tmp.file("a.cnf")), 3u);
  REQUIRE(file.planted);
  CHECK(eval_formula(file.formula, *file.planted));

  std::vector<std::string> other = {"gen", "--dist", "planted", "--n", "20", "--k", "3",
                                    "--m", "60",     "--seed",  "8",   "--out",
                                    tmp.file("c.cnf")};
  CHECK(run(other) == 0);
  CHECK(slurp(tmp.file("a.cnf")) != slurp(tmp.file("c.cnf")));
}

TEST_CASE("solve exit codes: 10 found, 20 oracle-unsat, 0 not found") {
  TempDir tmp;
  std::vector<std::string> gen = {"gen", "--dist", "planted", "--n", "15", "--k", "3",
                                  "--m", "45",     "--seed",  "11",  "--out",
                                  tmp.file("sat.cnf")};
  REQUIRE(run(gen) == 0);

  std::string out;
  int code = run({"solve", "--ppz", "--trials", "100000", "--seed", "3", tmp.file("sat.cnf")},
                 &out);
  CHECK(code == 10);
  CHECK(out.find("s SATISFIABLE\n") != std::string::npos);
  REQUIRE(out.find("v ") != std::string::npos);

  // the emitted model re-verifies against a fresh parse of the input
  DimacsFile file = dimacs_read(slurp(tmp.file("sat.cnf")));
  std::istringstream model(out.substr(out.find("v ") + 2));
  Assignment a(file.formula.n());
  long long lit;
  while (model >> lit)
    if (lit != 0) a.set(static_cast<std::uint32_t>(lit < 0 ? -lit : lit), lit > 0);
  CHECK(eval_formula(file.formula, a));

  std::ofstream(tmp.file("unsat.cnf")) << "p cnf 1 2\n1 0\n-1 0\n";
  CHECK(run({"solve", "--oracle", tmp.file("unsat.cnf")}) == 20);
  CHECK(run({"solve", "--ppz", "--trials", "50", "--seed", "1", tmp.file("unsat.cnf")}) == 0);
  CHECK(run({"solve", "--oracle", tmp.file("sat.cnf")}) == 10);
  CHECK(run({"solve", "--auto", "--seed", "5", tmp.file("sat.cnf")}) == 10);
}

TEST_CASE("usage and I/O errors exit 1") {
  TempDir tmp;
  std::string err;
  CHECK(run({"solve", "--bogus-flag", "x.cnf"}, nullptr, &err) == 1);
  CHECK(!err.empty());
  CHECK(run({"solve", "--ppz", "--trials", "10", tmp.file("missing.cnf")}) == 1);
  CHECK(run({"frobnicate"}) == 1);
  std::ofstream(tmp.file("plain.cnf")) << "p cnf 2 1\n1 2 0\n";
  CHECK(run({"analyze", tmp.file("plain.cnf")}) == 1);  // no planted certificate
}

TEST_CASE("analyze reports the good-variable structure") {
  TempDir tmp;
  std::ofstream(tmp.file("chain.cnf")) << "c planted 1 2\np cnf 2 2\n1 0\n-1 2 0\n";
  std::string out;
  CHECK(run({"analyze", tmp.file("chain.cnf")}, &out) == 0);
  CHECK(out.find("n 2\n") != std::string::npos);
  CHECK(out.find("z 2\n") != std::string::npos);
  CHECK(out.find("good 1 witness 0\n") != std::string::npos);
  CHECK(out.find("good 2 witness 1\n") != std::string::npos);
}

TEST_CASE("exp runs a config file and writes the CSV") {
  TempDir tmp;
  ExperimentConfig c;
  c.kind = ExperimentKind::counting;
  c.seed = 606;
  c.n = 10;
  c.k = 3;
  c.m = 20;
  c.samples = 5;
  c.out = tmp.file("r.csv");
  std::ofstream(tmp.file("exp.conf")) << write_config(c);

  CHECK(run({"exp", "--config", tmp.file("exp.conf")}) == 0);
  std::string csv = slurp(tmp.file("r.csv"));
  CHECK(csv_body(csv).find("experiment,n,k,m,instance,seed,quantity,value,trials_used,error\n") == 0);
  CHECK(run({"exp", "--config", tmp.file("exp.conf"), "--out", tmp.file("r2.csv")}) == 0);
  CHECK(csv_body(slurp(tmp.file("r2.csv"))) == csv_body(csv));

  // the worker-count env override must not change the CSV body
  REQUIRE(setenv("SATLAB_WORKERS", "2", 1) == 0);
  CHECK(worker_count_from_env() == 2);
  CHECK(run({"exp", "--config", tmp.file("exp.conf"), "--out", tmp.file("r3.csv")}) == 0);
  REQUIRE(unsetenv("SATLAB_WORKERS") == 0);
  CHECK(worker_count_from_env() == 1);
  CHECK(csv_body(slurp(tmp.file("r3.csv"))) == csv_body(csv));
}
