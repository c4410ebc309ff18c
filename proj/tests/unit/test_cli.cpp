// SPDX-License-Identifier: Apache-2.0
#include "pinch/scenario.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path kDir = fs::temp_directory_path() / "pinch_cli_test";

int run(const std::string& args) {
  const std::string cmd = std::string(PINCH_CLI) + " " + args + " 2>" + (kDir / "stderr.txt").string();
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

struct Dir {
  Dir() { fs::create_directories(kDir); }
};
const Dir dir;

}  // namespace

TEST_CASE("missing scenario file is a parse error") {
  CHECK(run("run --scenario " + (kDir / "absent.json").string()) == 2);
  CHECK(run("run --no-such-flag") == 2);
  CHECK(run("sweep --desk --sweep bogus=1 --samples 1000 --out " + (kDir / "x.csv").string()) == 0);
  CHECK(slurp(kDir / "x.csv").find("failed: unknown sweep parameter") != std::string::npos);
}

TEST_CASE("unattainable rate exits with the infeasible code and names the user") {
  write(kDir / "rate.json", R"({"rate_min": 1000})");
  CHECK(run("run --scenario " + (kDir / "rate.json").string() + " --s-grid 0.01:1:2 --samples 1000") == 3);
  CHECK(slurp(kDir / "stderr.txt").find("user") != std::string::npos);
}

TEST_CASE("default scenario run echoes the scenario and is reproducible") {
  const std::string args = "run --s-grid 0.001:1:3 --samples 2000 --seed 9 --out ";
  REQUIRE(run(args + (kDir / "a.json").string()) == 0);
  REQUIRE(run(args + (kDir / "b.json").string()) == 0);
  const std::string a = slurp(kDir / "a.json");
  CHECK(a == slurp(kDir / "b.json"));
  const auto j = nlohmann::json::parse(a);
  const auto& s = j.at("scenario");
  CHECK(s.at("carrier").get<double>() == 30e9);
  CHECK(s.at("refractive_index").get<double>() == 1.4);
  CHECK(s.at("attenuation").get<double>() == 0.18);
  CHECK(s.at("noise_power").get<double>() == 1e-12);
  CHECK(s.at("total_time").get<double>() == 8e-3);
  CHECK(s.at("snr_threshold").get<double>() == 10.0);
  CHECK(s.at("num_clusters").get<int>() == 10);
  CHECK(std::isfinite(j.at("chernoff").at("log_bound").get<double>()));
  CHECK(j.at("mc_outage").at("n").get<int>() == 2000);

  REQUIRE(run("field --solution " + (kDir / "a.json").string() + " --field-res 1 --out " +
              (kDir / "f1.csv").string()) == 0);
  REQUIRE(run("field --solution " + (kDir / "a.json").string() + " --field-res 1 --out " +
              (kDir / "f2.csv").string()) == 0);
  const std::string f = slurp(kDir / "f1.csv");
  CHECK(f == slurp(kDir / "f2.csv"));
  CHECK(f.rfind("slot,x,y,p_db\n", 0) == 0);
}

TEST_CASE("sweep writes one row per scheme and value with the fixed columns") {
  const std::string args = "sweep --desk --sweep p_T=1e5,1e6 --scheme proposed,uniform --samples 1000 "
                           "--s-grid 0.001:1:3 --out ";
  REQUIRE(run(args + (kDir / "s1.csv").string()) == 0);
  REQUIRE(run(args + (kDir / "s2.csv").string()) == 0);
  const std::string a = slurp(kDir / "s1.csv");
  CHECK(a == slurp(kDir / "s2.csv"));
  std::stringstream ss(a);
  std::string line;
  std::getline(ss, line);
  CHECK(line == "scheme,swept_param,value,chernoff_bound,mc_outage,mc_stderr,runtime_s,seed,status");
  int rows = 0;
  while (std::getline(ss, line)) {
    ++rows;
    CHECK(line.substr(line.size() - 3) == ",ok");
  }
  CHECK(rows == 4);
}
