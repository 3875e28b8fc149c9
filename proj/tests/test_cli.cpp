#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "proxdg/bench.hpp"

using namespace proxdg;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("convergence subcommand writes the full csv schema") {
  const std::string out = temp_path("proxdg_cli_conv.csv");
  const int code = run_cli({"convergence", "--method", "hho", "--cell-degree", "0",
                            "--facet-degree", "1", "--levels", "2,4", "--out", out});
  CHECK(code == 0);
  const std::string csv = slurp(out);
  CHECK(csv.find("h,eL2_u,eH1_u,eDG_u,eL2_lambda,eL2_o,eL2_recon,eH1_recon") == 0);
  CHECK(csv.find("eoc,") != std::string::npos);
  std::remove(out.c_str());
}

TEST_CASE("solve subcommand reports a vanishing multiplier on the flat problem") {
  const std::string out = temp_path("proxdg_cli_flat.json");
  const int code =
      run_cli({"solve", "--problem", "flat", "--n", "4", "--out", out, "--format", "json"});
  CHECK(code == 0);
  std::ifstream in(out);
  nlohmann::json j;
  in >> j;
  CHECK(j["converged"].get<bool>());
  CHECK(j["lambda_l2"].get<double>() <= 1e-8);
  CHECK(j["fields"].contains("u"));
  CHECK(j["history"].size() > 0);
  std::remove(out.c_str());
}

TEST_CASE("usage errors exit with code two") {
  CHECK(run_cli({"convergence", "--method", "upwind"}) == 2);
  CHECK(run_cli({"convergence", "--method", "hho", "--sigma", "12"}) == 2);
  CHECK(run_cli({"convergence", "--method", "ipdg", "--cell-degree", "0"}) == 2);
  CHECK(run_cli({"convergence", "--levels", "8,4"}) == 2);
  CHECK(run_cli({"solve", "--problem", "mystery"}) == 2);
  CHECK(run_cli({}) == 2);
}

TEST_CASE("identical configurations produce byte-identical csv") {
  const std::string out1 = temp_path("proxdg_cli_det1.csv");
  const std::string out2 = temp_path("proxdg_cli_det2.csv");
  const std::vector<std::string> base = {"convergence", "--method", "eg",
                                         "--levels",    "2,4",      "--out"};
  auto args1 = base;
  args1.push_back(out1);
  auto args2 = base;
  args2.push_back(out2);
  CHECK(run_cli(args1) == 0);
  CHECK(run_cli(args2) == 0);
  CHECK(slurp(out1) == slurp(out2));
  CHECK(!slurp(out1).empty());
  std::remove(out1.c_str());
  std::remove(out2.c_str());
}

TEST_CASE("json problem files are accepted") {
  const std::string pbpath = temp_path("proxdg_cli_problem.json");
  {
    std::ofstream pb(pbpath);
    pb << R"({"obstacle": -0.2, "rhs": -4.0, "dirichlet": 0.0, "domain": [-1,-1,1,1]})";
  }
  const std::string out = temp_path("proxdg_cli_file.json");
  const int code =
      run_cli({"solve", "--problem", "file:" + pbpath, "--n", "4", "--out", out});
  CHECK(code == 0);
  std::ifstream in(out);
  nlohmann::json j;
  in >> j;
  CHECK(j["converged"].get<bool>());
  // the load pushes the membrane down into the obstacle somewhere
  CHECK(j["min_feasibility"].get<double>() >= -1e-8);
  std::remove(pbpath.c_str());
  std::remove(out.c_str());
  CHECK(run_cli({"solve", "--problem", "file:/nonexistent/p.json"}) == 2);
}
