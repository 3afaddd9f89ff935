#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "linbp/harness.hpp"
#include "oracles.hpp"

using namespace linbp;
namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempFile {
  std::string path;
  explicit TempFile(const char* name)
      : path((fs::temp_directory_path() / name).string()) {}
  ~TempFile() { std::remove(path.c_str()); }
};

// minimal RFC-4180 row splitter used as an independent parse oracle
std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

TEST_CASE("write_csv with no records emits only the header") {
  TempFile f("linbp_test_empty.csv");
  write_csv({}, f.path);
  CHECK(read_file(f.path) ==
        "experiment,step,seed,method,l1_dist,loss,grad_l2,grad_linf,acc\n");
}

TEST_CASE("write_csv rows round-trip through an independent parser") {
  TempFile f("linbp_test_roundtrip.csv");
  RunRecord rec{"attack-sim", 3, 7, "linbp", 1.25, 0.5,
                0.125, 0.0625, std::nullopt};
  write_csv({rec}, f.path);
  std::stringstream ss(read_file(f.path));
  std::string header, row;
  std::getline(ss, header);
  std::getline(ss, row);
  auto fields = split_csv_row(row);
  REQUIRE(fields.size() == 9);
  CHECK(fields[0] == "attack-sim");
  CHECK(std::stoul(fields[1]) == 3);
  CHECK(std::stoul(fields[2]) == 7);
  CHECK(fields[3] == "linbp");
  CHECK(std::stod(fields[4]) == 1.25);
  CHECK(std::stod(fields[5]) == 0.5);
  CHECK(std::stod(fields[6]) == 0.125);
  CHECK(std::stod(fields[7]) == 0.0625);
  CHECK(fields[8].empty());
}

TEST_CASE("write_csv quotes fields containing separators") {
  TempFile f("linbp_test_quote.csv");
  RunRecord rec{"ex,1", 0, 0, "a\"b", std::nullopt, 0, 0, 0, std::nullopt};
  write_csv({rec}, f.path);
  std::stringstream ss(read_file(f.path));
  std::string header, row;
  std::getline(ss, header);
  std::getline(ss, row);
  auto fields = split_csv_row(row);
  CHECK(fields[0] == "ex,1");
  CHECK(fields[3] == "a\"b");
}

TEST_CASE("write_csv output is deterministic and sorted") {
  TempFile f1("linbp_test_det1.csv");
  TempFile f2("linbp_test_det2.csv");
  std::vector<RunRecord> records;
  records.push_back({"b", 1, 0, "bp", std::nullopt, 1, 2, 3, std::nullopt});
  records.push_back({"a", 0, 1, "linbp", 0.5, 1, 2, 3, 0.25});
  records.push_back({"a", 0, 0, "bp", std::nullopt, 1, 2, 3, std::nullopt});
  write_csv(records, f1.path);
  std::reverse(records.begin(), records.end());
  write_csv(records, f2.path);
  const std::string bytes = read_file(f1.path);
  CHECK(bytes == read_file(f2.path));
  // sorted by (experiment, seed, step, method)
  std::stringstream ss(bytes);
  std::string line;
  std::getline(ss, line);
  std::getline(ss, line);
  CHECK(split_csv_row(line)[0] == "a");
  CHECK(split_csv_row(line)[2] == "0");
}

TEST_CASE("write_csv reports I/O failures with the path") {
  CHECK_THROWS_WITH_AS(write_csv({}, "/no/such/dir/out.csv"),
                       doctest::Contains("/no/such/dir/out.csv"),
                       std::runtime_error);
}

TEST_CASE("svg line plot: polyline and legend counts") {
  TempFile f("linbp_test_plot.svg");
  write_svg_lineplot({{"one", {{0, 0}, {1, 1}}}}, f.path);
  std::string svg = read_file(f.path);
  std::size_t count = 0, pos = 0;
  while ((pos = svg.find("<polyline", pos)) != std::string::npos) {
    ++count;
    ++pos;
  }
  CHECK(count == 1);

  write_svg_lineplot({{"one", {{0, 0}, {1, 1}}}, {"two", {{0, 1}, {1, 0}}}},
                     f.path);
  svg = read_file(f.path);
  count = 0;
  pos = 0;
  while ((pos = svg.find("<polyline", pos)) != std::string::npos) {
    ++count;
    ++pos;
  }
  CHECK(count == 2);
  count = 0;
  pos = 0;
  while ((pos = svg.find("class=\"legend\"", pos)) != std::string::npos) {
    ++count;
    ++pos;
  }
  CHECK(count == 2);
  CHECK(svg.find(">one<") != std::string::npos);
  CHECK(svg.find(">two<") != std::string::npos);
}

TEST_CASE("svg line plot rejects empty series") {
  TempFile f("linbp_test_bad.svg");
  CHECK_THROWS_AS(write_svg_lineplot({{"empty", {}}}, f.path),
                  std::invalid_argument);
  CHECK_THROWS_AS(write_svg_lineplot({}, f.path), std::invalid_argument);
}

TEST_CASE("svg line plot maps the x-midpoint to the horizontal pixel midpoint") {
  TempFile f("linbp_test_mid.svg");
  // three points, middle one exactly at the x-range midpoint
  write_svg_lineplot({{"s", {{0.0, 1.0}, {5.0, 3.0}, {10.0, 2.0}}}}, f.path);
  std::string svg = read_file(f.path);
  const std::size_t start = svg.find("points=\"");
  REQUIRE(start != std::string::npos);
  const std::size_t end = svg.find('"', start + 8);
  std::stringstream points(svg.substr(start + 8, end - start - 8));
  std::vector<double> px;
  std::string pair;
  while (points >> pair) px.push_back(std::stod(pair.substr(0, pair.find(','))));
  REQUIRE(px.size() == 3);
  CHECK(std::fabs(px[1] - 0.5 * (px[0] + px[2])) <= 1.0);
}

namespace {

LabeledDataset tiny_dataset() {
  return synthetic_dataset(8, 4, 2, RngStream{404, 0});
}

}  // namespace

TEST_CASE("mlp_train_loop with zero epochs leaves the weights at their init") {
  LabeledDataset ds = tiny_dataset();
  MlpTrainConfig cfg;
  cfg.dims = {4, 3, 2};
  cfg.epochs = 0;
  cfg.seed = 5;
  MlpTrainResult res = mlp_train_loop(ds, cfg);
  CHECK(res.traj.steps.size() == 1);
  CHECK(res.epoch_loss.empty());
  for (std::size_t i = 1; i < cfg.dims.size(); ++i) {
    Matrix expect = gaussian_matrix(cfg.dims[i - 1], cfg.dims[i], 0.0,
                                    1.0 / std::sqrt((double)cfg.dims[i - 1]),
                                    RngStream{cfg.seed, i});
    CHECK(res.model.weights[i - 1] == expect);
  }
}

TEST_CASE("mlp_train_loop first step gradient matches finite differences") {
  LabeledDataset ds = tiny_dataset();
  MlpTrainConfig cfg;
  cfg.dims = {4, 2, 2};
  cfg.batch = 8;  // single full batch
  cfg.epochs = 1;
  cfg.seed = 31;
  cfg.mode = GradientMode::bp();

  // rebuild the same init and the mean batch gradient by hand
  MlpModel model;
  for (std::size_t i = 1; i < cfg.dims.size(); ++i)
    model.weights.push_back(
        gaussian_matrix(cfg.dims[i - 1], cfg.dims[i], 0.0,
                        1.0 / std::sqrt((double)cfg.dims[i - 1]),
                        RngStream{cfg.seed, i}));

  auto batch_loss = [&](const MlpModel& m) {
    double acc = 0.0;
    for (std::size_t s = 0; s < 8; ++s) {
      Vec x(ds.features.row(s), ds.features.row(s) + 4);
      Vec target(2, 0.0);
      target[ds.labels[s]] = 1.0;
      acc += mlp_loss(m, x, target, LossKind::SoftmaxCrossEntropy);
    }
    return acc / 8.0;
  };

  std::vector<Matrix> grads;
  for (const Matrix& w : model.weights) grads.emplace_back(w.rows(), w.cols());
  for (std::size_t s = 0; s < 8; ++s) {
    Vec x(ds.features.row(s), ds.features.row(s) + 4);
    Vec target(2, 0.0);
    target[ds.labels[s]] = 1.0;
    mlp_accumulate_grad(model, x, target, LossKind::SoftmaxCrossEntropy,
                        cfg.mode, grads);
  }
  double max_g = 1e-12;
  for (Matrix& g : grads)
    for (std::size_t i = 0; i < g.size(); ++i) {
      g.data()[i] /= 8.0;
      max_g = std::max(max_g, std::fabs(g.data()[i]));
    }
  const double h = 1e-6;
  for (std::size_t l = 0; l < model.weights.size(); ++l)
    for (std::size_t i = 0; i < model.weights[l].size(); ++i) {
      MlpModel probe = model;
      probe.weights[l].data()[i] += h;
      const double fp = batch_loss(probe);
      probe.weights[l].data()[i] -= 2 * h;
      const double fm = batch_loss(probe);
      CHECK(std::fabs((fp - fm) / (2 * h) - grads[l].data()[i]) / max_g < 1e-5);
    }
}

TEST_CASE("mlp_train_loop: linbp-from(depth) is bitwise identical to bp") {
  LabeledDataset ds = tiny_dataset();
  MlpTrainConfig cfg;
  cfg.dims = {4, 3, 3, 2};
  cfg.batch = 4;
  cfg.epochs = 2;
  cfg.seed = 17;
  cfg.mode = GradientMode::bp();
  MlpTrainResult bp = mlp_train_loop(ds, cfg);
  cfg.mode = GradientMode::linbp_from(3);
  MlpTrainResult from_d = mlp_train_loop(ds, cfg);
  REQUIRE(bp.traj.steps.size() == from_d.traj.steps.size());
  for (std::size_t s = 0; s < bp.traj.steps.size(); ++s)
    CHECK(bp.traj.steps[s].loss == from_d.traj.steps[s].loss);
  for (std::size_t l = 0; l < bp.model.weights.size(); ++l)
    CHECK(bp.model.weights[l] == from_d.model.weights[l]);
}

TEST_CASE("mlp_train_loop shares init and batch order across modes") {
  LabeledDataset ds = tiny_dataset();
  MlpTrainConfig cfg;
  cfg.dims = {4, 3, 2};
  cfg.batch = 4;
  cfg.epochs = 1;
  cfg.seed = 23;
  cfg.mode = GradientMode::bp();
  MlpTrainResult bp = mlp_train_loop(ds, cfg);
  cfg.mode = GradientMode::linbp();
  MlpTrainResult lin = mlp_train_loop(ds, cfg);
  // identical step-0 evaluation implies identical init
  CHECK(bp.traj.steps[0].loss == lin.traj.steps[0].loss);
}

TEST_CASE("mlp_train_loop flags divergence without crashing") {
  LabeledDataset ds = tiny_dataset();
  MlpTrainConfig cfg;
  cfg.dims = {4, 3, 2};
  cfg.batch = 4;
  cfg.epochs = 5;
  cfg.eta = 1e6;
  cfg.seed = 2;
  MlpTrainResult res = mlp_train_loop(ds, cfg);
  CHECK(res.diverged);
}

TEST_CASE("mlp_train_loop validates dimensions") {
  LabeledDataset ds = tiny_dataset();
  MlpTrainConfig cfg;
  cfg.dims = {5, 3, 2};  // input dim mismatch
  CHECK_THROWS_AS(mlp_train_loop(ds, cfg), std::invalid_argument);
  cfg.dims = {4, 3, 1};  // below class count
  CHECK_THROWS_AS(mlp_train_loop(ds, cfg), std::invalid_argument);
}
