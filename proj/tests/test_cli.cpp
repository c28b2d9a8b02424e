#include <cli.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace cantilever;
using cli::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("cantilever_cli_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

std::string write_config(const std::string& name, const std::string& text) {
  const auto p = scratch(name) / "config.json";
  std::ofstream(p) << text;
  return p.string();
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::string config_path(const std::string& name) { return std::string(CANTILEVER_SOURCE_DIR) + "/configs/" + name; }

}  // namespace

TEST(Cli, CertifyCantileverLoadPasses) {
  const auto r = run({"certify", "--example", "cantilever-load"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  const auto& certs = j["certificates"];
  ASSERT_EQ(certs.size(), 3u);
  EXPECT_EQ(certs[1]["hypothesis"], "h2a");
  EXPECT_EQ(certs[1]["verdict"], "PASS");
  EXPECT_NEAR(certs[1]["margin"].get<double>(), 4600.0 / 4536.0 - 1.0, 1e-9);
  EXPECT_EQ(certs[2]["verdict"], "PASS");
  EXPECT_NEAR(certs[2]["margin"].get<double>(), 0.2, 1e-3);
  EXPECT_EQ(j["summaries"][0]["name"], "shell_existence");
  EXPECT_EQ(j["summaries"][0]["verdict"], "PASS");
  for (const auto& c : certs)
    for (const char* k : {"hypothesis", "lhs", "rhs", "margin", "verdict", "heuristic", "quadrature_error_estimate",
                          "inputs_echo"})
      EXPECT_TRUE(c.contains(k)) << k;
}

TEST(Cli, ShippedConfigMatchesBuiltInExample) {
  const auto a = run({"certify", "--example", "cantilever-load"});
  const auto b = run({"certify", "--config", config_path("cantilever-load.json")});
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(json::parse(a.out)["certificates"], json::parse(b.out)["certificates"]);
  EXPECT_EQ(run({"certify", "--config", config_path("power-family.json")}).code, 0);
  EXPECT_EQ(run({"certify", "--config", config_path("two-norm-constant.json")}).code, 0);
}

TEST(Cli, ZeroNonlinearityFails) {
  const auto cfg = write_config("zero", R"({"nonlinearity": "[0,inf): 0", "certify": {"h2": {"R0": 1, "R1": 2}}})");
  const auto r = run({"certify", "--config", cfg});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(json::parse(r.out)["status"], "fail");
}

TEST(Cli, UsageAndConfigErrorsExitTwo) {
  const auto bad = write_config("bad_dsl", R"({"nonlinearity": "[0,inf): 2*u +", "certify": {"h2": {"R0": 1, "R1": 2}}})");
  const auto r = run({"certify", "--config", bad});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("parse"), std::string::npos) << r.err;
  EXPECT_EQ(run({"certify", "--config", write_config("unknown", R"({"nonlinearity": "[0,inf): 1", "x": 1})")}).code,
            2);
  EXPECT_EQ(run({"certify", "--config", write_config("notjson", "{")}).code, 2);
  EXPECT_EQ(run({"certify", "--config", "/nonexistent/config.json"}).code, 2);
  EXPECT_EQ(run({"certify", "--example", "cantilever-load", "--config", config_path("power-family.json")}).code, 2);
  EXPECT_EQ(run({"solve", "--example", "cantilever-load", "--panels", "100"}).code, 2);
  EXPECT_EQ(run({"solve", "--example", "cantilever-load", "--panels", "8192"}).code, 2);
  EXPECT_EQ(run({"solve", "--example", "cantilever-load", "--tol", "0"}).code, 2);
  EXPECT_EQ(run({"nonsense"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"reproduce", "power-family", "--p", "0"}).code, 2);
  EXPECT_EQ(run({"reproduce", "elsewhere"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, SolveConstantLoadCsv) {
  const auto cfg = write_config("const", R"({"nonlinearity": "[0,inf): 1", "panels": 64,
                                             "solve": {"method": "picard", "tol": 1e-12, "start_level": 0}})");
  const auto r = run({"solve", "--config", cfg, "--csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line, last;
  std::getline(in, line);
  EXPECT_EQ(line, "t,u,u_tt,f");
  while (std::getline(in, line)) last = line;
  double t, u;
  ASSERT_EQ(std::sscanf(last.c_str(), "%lf,%lf", &t, &u), 2);
  EXPECT_EQ(t, 1.0);
  EXPECT_NEAR(u, 0.125, 1e-14);
}

TEST(Cli, SolveReportsStallAndConvergence) {
  const auto ok = run({"solve", "--example", "cantilever-load"});
  ASSERT_EQ(ok.code, 0) << ok.err;
  EXPECT_LT(json::parse(ok.out)["report"]["residual_sup"].get<double>(), 1e-8);
  const auto cfg = write_config("stall", R"({"nonlinearity": "[0,0.03): 4600*u ; [0.03,inf): 138",
                                             "solve": {"method": "monotone-up", "start_level": 0}})");
  const auto r = run({"solve", "--config", cfg});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(json::parse(r.out)["report"]["status"], "stalled-at-zero");
}

TEST(Cli, EigenReport) {
  const auto r = run({"eigen", "--json", "--csv"});
  ASSERT_EQ(r.code, 0);
  const auto brace = r.out.rfind("}\n");
  const auto j = json::parse(r.out.substr(0, brace + 2));
  const double beta = j["beta"].get<double>();
  EXPECT_NEAR(beta, 1.8751040687, 1e-9);
  EXPECT_EQ(j["lambda1"].get<double>(), beta * beta * beta * beta);
  EXPECT_NEAR(j["beta_quoted"].get<double>(), 1.8749963, 1e-7);
  std::istringstream in(r.out.substr(brace + 2));
  std::string header, row0;
  std::getline(in, header);
  std::getline(in, row0);
  EXPECT_EQ(header, "t,phi,phi_t,phi_tt");
  EXPECT_EQ(row0.substr(0, 6), "0,0,0,");
  EXPECT_NEAR(std::stod(row0.substr(6)), phi1(beta, 0.0, 2), 1e-12);
}

TEST(Cli, ScanReports) {
  const auto r = run({"scan", "--example", "power-family"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_TRUE(j["asymptotic"]["lower_found"].get<bool>());
  EXPECT_TRUE(j["asymptotic"]["upper_found"].get<bool>());
  const auto cfg = write_config("pairs", R"({"nonlinearity": "[0,0.03): 4600*u ; [0.03,inf): 138",
                                             "scan": {"pairs": [{"R0": 0.5, "R1": 37}, {"R0": 0.25, "R1": 40}]}})");
  const auto m = json::parse(run({"scan", "--config", cfg}).out);
  EXPECT_EQ(m["multiplicity"]["predicted_solutions"], 1);
  EXPECT_FALSE(m["multiplicity"]["pairs"][1]["disjoint_from_previous"].get<bool>());
}

TEST(Cli, ReproducePowerFamily) {
  const auto r = run({"reproduce", "power-family"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["b"], 51);
  EXPECT_LT(j["E_u0"].get<double>(), 0.5);
  EXPECT_LT(j["E_u1"].get<double>(), 0.5);
  EXPECT_EQ(j["h3"]["verdict"], "PASS");
  EXPECT_LT(j["minimizer"]["projected_gradient_norm"].get<double>(), 1e-5);
  EXPECT_LT(j["mountain_pass"]["projected_gradient_norm"].get<double>(), 1e-5);
  EXPECT_LT(j["minimizer"]["energy"].get<double>(), j["mountain_pass"]["energy"].get<double>());
  const auto narrow = write_config("narrow", R"({"power_family": {"b_min": 3, "b_max": 10}})");
  const auto fail = run({"reproduce", "power-family", "--config", narrow});
  EXPECT_EQ(fail.code, 1);
  EXPECT_EQ(json::parse(fail.out)["b_scan"].size(), 8u);
}

TEST(Cli, RerunsAreByteIdentical) {
  const std::vector<std::vector<std::string>> commands{
      {"certify", "--example", "power-family"},     {"solve", "--example", "cantilever-load"},
      {"minimize", "--example", "power-family"},    {"mountain-pass", "--example", "power-family"},
      {"eigen"},                                    {"scan", "--example", "cantilever-load"},
      {"reproduce", "cantilever-load"},             {"reproduce", "power-family", "--seed", "7"}};
  for (const auto& cmd : commands) {
    const auto a = scratch("rerun_a"), b = scratch("rerun_b");
    auto ca = cmd, cb = cmd;
    ca.insert(ca.end(), {"--out", a.string()});
    cb.insert(cb.end(), {"--out", b.string()});
    const auto ra = run(ca), rb = run(cb);
    EXPECT_EQ(ra.code, rb.code) << cmd[0];
    EXPECT_EQ(ra.out, rb.out) << cmd[0];
    for (const char* ext : {".json", ".csv"}) {
      const auto fa = a / (cmd[0] + ext), fb = b / (cmd[0] + ext);
      ASSERT_TRUE(std::filesystem::exists(fa)) << fa;
      EXPECT_EQ(slurp(fa), slurp(fb)) << cmd[0] << ext;
    }
  }
}
