#include "../unit/helpers.hpp"

#include "cli.hpp"
#include "gaussdaemon/daemonic.hpp"
#include "gaussdaemon/io.hpp"
#include "gaussdaemon/opo.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace gaussdaemon;
namespace fs = std::filesystem;

namespace {

struct Csv {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

Csv read_csv(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  Csv csv;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) == 0) {
      csv.comments.push_back(line.substr(2));
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (csv.header.empty()) {
      csv.header = cells;
    } else {
      std::vector<double> row;
      for (const auto& c : cells) row.push_back(std::stod(c));
      REQUIRE(row.size() == csv.header.size());
      csv.rows.push_back(row);
    }
  }
  return csv;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(std::vector<std::string> args, std::string* out_text = nullptr) {
  args.insert(args.begin(), "gaussdaemon");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (code != 0) MESSAGE(err.str());
  return code;
}

fs::path work_dir() {
  const fs::path dir = fs::current_path() / "e2e_output";
  fs::create_directories(dir);
  return dir;
}

bool has_comment(const Csv& csv, const std::string& prefix) {
  for (const auto& c : csv.comments) {
    if (c.rfind(prefix, 0) == 0) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("transient table") {
  const fs::path out = work_dir() / "transient.csv";
  std::string text;
  REQUIRE(run_cli({"opo-transient", "--chi-tilde", "0.8", "--nu-in", "1", "--nu0", "5", "--dt", "0.01", "--T", "3",
                   "--out", out.string()},
                  &text) == 0);
  CHECK(text.find("homodyne_overtakes_heterodyne_at") != std::string::npos);
  const Csv csv = read_csv(out);
  CHECK(csv.header == std::vector<std::string>{"kappa_t", "hom0", "hom90", "het"});
  CHECK(csv.rows.size() == 301);
  CHECK(has_comment(csv, "command=opo-transient"));
  CHECK(has_comment(csv, "homodyne_overtakes_heterodyne_at="));
  const TransientCurves ref = transient_curves(OpoParams::from_tilde(0.8, 1.0, 5.0), 0.01, 3.0);
  for (std::size_t k = 0; k < csv.rows.size(); k += 50) {
    CHECK(csv.rows[k][3] == doctest::Approx(ref.het[k]).epsilon(1e-10));
    CHECK(csv.rows[k][2] >= csv.rows[k][1] - 1e-12);
  }
}

TEST_CASE("z sweep table") {
  const fs::path out = work_dir() / "zsweep.csv";
  std::string text;
  REQUIRE(run_cli({"opo-zsweep", "--chi-tilde", "0.9", "--nu-in", "3", "--points", "20", "--out", out.string()}, &text) ==
          0);
  const Csv csv = read_csv(out);
  CHECK(csv.header == std::vector<std::string>{"z_m", "ergotropy"});
  CHECK(csv.rows.size() == 21);
  CHECK(has_comment(csv, "z_opt="));
  CHECK(has_comment(csv, "heterodyne="));
  const OpoParams p = OpoParams::from_tilde(0.9, 3.0);
  std::size_t best = 0;
  for (std::size_t k = 0; k < csv.rows.size(); ++k) {
    if (csv.rows[k][1] > csv.rows[best][1]) best = k;
  }
  CHECK(csv.rows[best][0] == doctest::Approx(opo_zopt(p)).epsilon(1e-10));
  CHECK(csv.rows.back()[1] == doctest::Approx(opo_daemonic_ss(p, GeneralDyneSetting::heterodyne())).epsilon(1e-10));
  CHECK(csv.rows.front()[1] < csv.rows.back()[1]);
  CHECK(text.find("z_opt_numeric") != std::string::npos);
}

TEST_CASE("two-mode sweep") {
  const fs::path out = work_dir() / "tmsts.csv";
  REQUIRE(run_cli({"tmsts-sweep", "--N", "1", "--r", "0.5", "--points", "50", "--out", out.string()}) == 0);
  const Csv csv = read_csv(out);
  REQUIRE(csv.rows.size() == 50);
  std::size_t best = 0;
  for (std::size_t k = 0; k < csv.rows.size(); ++k) {
    if (csv.rows[k][1] > csv.rows[best][1]) best = k;
  }
  CHECK(best == 49);
  CHECK(csv.rows.back()[1] == doctest::Approx(tmsts_daemonic_heterodyne(1.0, 0.5)).epsilon(1e-10));
}

TEST_CASE("trajectories from a model file") {
  const fs::path model = work_dir() / "opo_model.txt";
  std::ofstream(model) << "# parametric oscillator, chi_tilde = 0.6, nu_in = 3\n"
                          "[H_S]\n0 -0.3\n-0.3 0\n"
                          "[C]\n0 1\n-1 0\n"
                          "[sigma_in]\n3 0\n0 3\n"
                          "[measurement]\nhomodyne = false\nz_m = 1\n";
  const fs::path state = work_dir() / "initial.txt";
  std::ofstream(state) << "1\n2 1\n5 0\n0 5\n";
  const fs::path a = work_dir() / "traj_a.csv";
  const fs::path b = work_dir() / "traj_b.csv";
  const fs::path c = work_dir() / "traj_c.csv";
  const std::vector<std::string> base = {"trajectories", "--model", model.string(), "--state", state.string(),
                                         "--n-traj", "200", "--T", "1", "--stride", "250", "--seed", "3"};
  auto with = [&](std::vector<std::string> extra) {
    std::vector<std::string> args = base;
    args.insert(args.end(), extra.begin(), extra.end());
    return args;
  };
  std::string text;
  REQUIRE(run_cli(with({"--out", a.string()}), &text) == 0);
  REQUIRE(run_cli(with({"--out", b.string()})) == 0);
  REQUIRE(run_cli(with({"--out", c.string(), "--threads", "4"})) == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a) == slurp(c));

  const Csv csv = read_csv(a);
  CHECK(csv.rows.size() == 5);
  CHECK(csv.header[0] == "t");
  CHECK(csv.header.size() == 1 + 2 + 3 * 3);
  const double final_z = std::stod(text.substr(text.find("final_max_standard_errors ") + 26));
  CHECK(final_z < 4.5);

  // The same model via the built-in parametric oscillator.
  const fs::path d = work_dir() / "traj_d.csv";
  REQUIRE(run_cli({"trajectories", "--chi-tilde", "0.6", "--nu-in", "3", "--state", state.string(), "--n-traj", "200",
                   "--T", "1", "--stride", "250", "--seed", "3", "--out", d.string()}) == 0);
  const Csv opo = read_csv(d);
  REQUIRE(opo.rows.size() == csv.rows.size());
  for (std::size_t k = 0; k < csv.rows.size(); ++k) {
    for (std::size_t j = 0; j < csv.rows[k].size(); ++j) {
      CHECK(opo.rows[k][j] == doctest::Approx(csv.rows[k][j]).epsilon(1e-9));
    }
  }
}

TEST_CASE("invariant suite through the command line") {
  std::string text;
  CHECK(run_cli({"validate", "--cases", "200", "--seed", "1"}, &text) == 0);
  CHECK(text.find("FAIL") == std::string::npos);
}
