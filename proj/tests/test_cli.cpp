#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const char* cli_path() { return LINBP_CLI_PATH; }

struct RunResult {
  int exit_code;
  std::string out;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path work_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "linbp_cli_tests";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

RunResult run_cli(const std::string& args) {
  const fs::path out_file = work_dir() / "stdout.txt";
  std::string cmd = std::string("\"") + cli_path() + "\" " + args + " > \"" +
                    out_file.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WEXITSTATUS(status);
  r.out = slurp(out_file);
  return r;
}

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

}  // namespace

TEST_CASE("no arguments prints usage and exits 2") {
  RunResult r = run_cli("");
  CHECK(r.exit_code == 2);
  CHECK(r.out.find("Usage") != std::string::npos);
}

TEST_CASE("unknown subcommand and unknown flag exit 2") {
  CHECK(run_cli("florp").exit_code == 2);
  CHECK(run_cli("attack-sim --florp 3").exit_code == 2);
  CHECK(run_cli("attack-sim --mode warp").exit_code == 2);
}

TEST_CASE("--help exits 0") {
  RunResult r = run_cli("--help");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("attack-sim") != std::string::npos);
}

TEST_CASE("attack-sim paper invocation writes the full trajectory CSV") {
  const fs::path csv = work_dir() / "a.csv";
  RunResult r = run_cli(
      "attack-sim --d1 100 --d2 20 --d3 10 --eta 0.001 --eps 0.25 "
      "--steps 100 --trials 10 --seed 7 --out \"" +
      csv.string() + "\"");
  CHECK(r.exit_code == 0);
  const std::string bytes = slurp(csv);
  // 2 methods x 10 trials x 101 steps + header
  CHECK(count_lines(bytes) == 2 * 10 * 101 + 1);
  CHECK(bytes.rfind("experiment,step,seed,method,l1_dist,loss,grad_l2,"
                    "grad_linf,acc\n", 0) == 0);

  // identical invocation reproduces the bytes
  const fs::path csv2 = work_dir() / "a2.csv";
  RunResult r2 = run_cli(
      "attack-sim --d1 100 --d2 20 --d3 10 --eta 0.001 --eps 0.25 "
      "--steps 100 --trials 10 --seed 7 --out \"" +
      csv2.string() + "\"");
  CHECK(r2.exit_code == 0);
  CHECK(slurp(csv2) == bytes);
}

TEST_CASE("attack-expected and train-expected write method x steps rows") {
  const fs::path csv = work_dir() / "exp.csv";
  RunResult r = run_cli("attack-expected --steps 20 --seed 3 --out \"" +
                        csv.string() + "\"");
  CHECK(r.exit_code == 0);
  CHECK(count_lines(slurp(csv)) == 2 * 21 + 1);

  RunResult t = run_cli("train-expected --steps 25 --seed 3 --out \"" +
                        csv.string() + "\"");
  CHECK(t.exit_code == 0);
  CHECK(count_lines(slurp(csv)) == 2 * 26 + 1);
}

TEST_CASE("train-sim runs and reports ratios") {
  const fs::path csv = work_dir() / "train.csv";
  RunResult r = run_cli(
      "train-sim --n 40 --d 6 --eta 0.002 --steps 50 --trials 3 --seed 5 "
      "--out \"" + csv.string() + "\"");
  CHECK(r.exit_code == 0);
  CHECK(count_lines(slurp(csv)) == 2 * 3 * 51 + 1);
  CHECK(r.out.find("grad-norm") != std::string::npos);
}

TEST_CASE("lemma checks run and print per-case errors") {
  RunResult l1 = run_cli("lemma1-check --trials 1 --seed 2");
  CHECK(l1.exit_code == 0);
  CHECK(l1.out.find("relative l2 error") != std::string::npos);

  RunResult l2 = run_cli("lemma2-check --trials 2 --seed 2");
  CHECK(l2.exit_code == 0);
  CHECK(l2.out.find("abs error") != std::string::npos);
}

TEST_CASE("constraint-check flags a huge step size and still exits 0") {
  RunResult r = run_cli("constraint-check --eta 10 --steps 20 --seed 4");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("VIOLATED") != std::string::npos);
  CHECK(r.out.find("first violation") != std::string::npos);
}

TEST_CASE("mlp-train smoke run on a small synthetic subset") {
  const fs::path csv = work_dir() / "mlp.csv";
  const fs::path svg = work_dir() / "mlp.svg";
  RunResult r = run_cli(
      "mlp-train --subset 64 --epochs 1 --batch 32 --eta 0.01 --seed 9 "
      "--out \"" + csv.string() + "\" --plot \"" + svg.string() + "\"");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("epoch 1") != std::string::npos);
  // 2 methods x (1 initial row + 2 batch rows)
  CHECK(count_lines(slurp(csv)) == 2 * 3 + 1);
  CHECK(slurp(svg).find("<svg") != std::string::npos);

  // determinism across repeated invocations
  const fs::path csv2 = work_dir() / "mlp2.csv";
  RunResult r2 = run_cli(
      "mlp-train --subset 64 --epochs 1 --batch 32 --eta 0.01 --seed 9 "
      "--out \"" + csv2.string() + "\"");
  CHECK(r2.exit_code == 0);
  CHECK(slurp(csv2) == slurp(csv));
}

TEST_CASE("missing input files exit 1") {
  RunResult r = run_cli(
      "mlp-train --images /nonexistent/images.idx --labels /nonexistent/"
      "labels.idx");
  CHECK(r.exit_code == 1);
  CHECK(r.out.find("error:") != std::string::npos);
}

TEST_CASE("plots are written for simulator subcommands") {
  const fs::path svg = work_dir() / "attack.svg";
  RunResult r = run_cli(
      "attack-sim --d1 20 --d2 8 --d3 4 --steps 10 --trials 2 --seed 1 "
      "--plot \"" + svg.string() + "\"");
  CHECK(r.exit_code == 0);
  const std::string bytes = slurp(svg);
  CHECK(bytes.find("<svg") != std::string::npos);
  CHECK(bytes.find("<polyline") != std::string::npos);
}
