#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hsplab/run.hpp"

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

const std::string kCli = HSPLAB_CLI;
const std::string kSamples = HSPLAB_SAMPLES;

struct Invocation {
  int exit_code = -1;
  std::string out;
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Invocation invoke(const std::string& args) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto out = dir / ("hsplab_cli_test_" + std::to_string(::getpid()) + ".json");
  const std::string cmd = kCli + " " + args + " > " + out.string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  Invocation r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  std::filesystem::remove(out);
  return r;
}

std::string sample(const std::string& name) { return kSamples + "/" + name; }

void expect_hex_array(const json& j, const std::string& key) {
  ASSERT_TRUE(j.contains(key)) << key;
  ASSERT_TRUE(j[key].is_array()) << key;
  for (const auto& x : j[key]) {
    ASSERT_TRUE(x.is_string());
    EXPECT_EQ(x.get<std::string>().find_first_not_of("0123456789abcdef"), std::string::npos);
  }
}

// Field-by-field check of the report layout.
void validate_report(const json& r) {
  ASSERT_TRUE(r.is_object());
  EXPECT_EQ(r.at("schema"), "hsplab.report/1");
  EXPECT_TRUE(r.at("instance").is_string());
  EXPECT_TRUE(r.at("group_file").is_string());
  const auto& c = r.at("config");
  EXPECT_TRUE(c.at("solver").is_string());
  EXPECT_TRUE(c.at("epsilon").is_number_float());
  EXPECT_TRUE(c.at("seed").is_number_unsigned());
  EXPECT_TRUE(c.at("verify").is_boolean());
  EXPECT_TRUE(r.at("wall_seconds").is_number());
  const std::string status = r.at("status");
  if (status == "error") {
    EXPECT_TRUE(r.at("error").at("code").is_string());
    EXPECT_TRUE(r.at("error").at("message").is_string());
    return;
  }
  ASSERT_EQ(status, "ok");
  EXPECT_TRUE(r.at("group").at("name").is_string());
  EXPECT_TRUE(r.at("group").at("kind").is_string());
  EXPECT_TRUE(r.at("group").at("encoding_length").is_number_unsigned());
  expect_hex_array(r, "hidden");
  EXPECT_TRUE(r.at("method").is_string());
  expect_hex_array(r, "generators");
  EXPECT_EQ(r.at("generators_text").size(), r.at("generators").size());
  EXPECT_TRUE(r.at("result_order").is_number_unsigned() || r.at("result_order").is_null());
  for (const char* k : {"f_queries", "group_ops", "rng_draws", "simulator_evaluations", "fourier_samples"}) {
    EXPECT_TRUE(r.at("stats").at(k).is_number_unsigned()) << k;
  }
  const auto& d = r.at("diagnostics");
  for (const char* k : {"commutator_order", "normal_order", "quotient_order", "coset_representatives", "query_budget"}) {
    EXPECT_TRUE(d.at(k).is_number_unsigned()) << k;
  }
  expect_hex_array(d, "intersection");
  expect_hex_array(d, "picks");
  const auto& v = r.at("verification");
  if (!v.is_null()) {
    EXPECT_TRUE(v.at("expected_order").is_number_unsigned());
    EXPECT_TRUE(v.at("result_order").is_number_unsigned());
    EXPECT_TRUE(v.at("equal").is_boolean());
  }
}

}  // namespace

TEST(Cli, ExtraspecialCenterVerifies) {
  const auto r = invoke("--group " + sample("extraspecial3.group") + " --hidden '(0,0,1)' --solver auto --verify");
  ASSERT_EQ(r.exit_code, 0) << r.out;
  const auto j = json::parse(r.out);
  validate_report(j);
  EXPECT_EQ(j["method"], "commutator");
  EXPECT_EQ(j["result_order"], 3);
  EXPECT_TRUE(j["verification"]["equal"].get<bool>());
}

TEST(Cli, MalformedSpecExitsWithThree) {
  const auto r = invoke("--group " + sample("malformed.group"));
  EXPECT_EQ(r.exit_code, 3);
  const auto j = json::parse(r.out);
  validate_report(j);
  EXPECT_EQ(j["status"], "error");
  EXPECT_EQ(invoke("--group " + sample("does-not-exist.group")).exit_code, 3);
  EXPECT_EQ(invoke("--group " + sample("q8.group") + " --hidden '(1 9)'").exit_code, 3);
  EXPECT_EQ(invoke("--group " + sample("q8.group") + " --epsilon 0.7").exit_code, 3);
  EXPECT_EQ(invoke("--group " + sample("q8.group") + " --solver nonsense").exit_code, 3);
}

TEST(Cli, SolverErrorExitsWithOne) {
  // Q8 mod the trivial subgroup has a non-Abelian quotient.
  const auto r = invoke("--group " + sample("q8.group") + " --solver normal");
  EXPECT_EQ(r.exit_code, 1);
  const auto j = json::parse(r.out);
  validate_report(j);
  EXPECT_EQ(j["error"]["code"], "QuotientNotAbelian");
}

TEST(Cli, WreathElem2SmallVerifies) {
  const auto r = invoke("--group " + sample("wreath3.group") + " --hidden '101|101|0; 011|011|0' --solver elem2-small --verify");
  ASSERT_EQ(r.exit_code, 0) << r.out;
  const auto j = json::parse(r.out);
  validate_report(j);
  EXPECT_EQ(j["method"], "elem2-small");
  EXPECT_EQ(j["result_order"], 4);
  EXPECT_TRUE(j["verification"]["equal"].get<bool>());
}

TEST(Cli, HiddenFromFileAndReportPath) {
  const auto path = std::filesystem::temp_directory_path() / "hsplab_cli_report.json";
  const auto r = invoke("--group " + sample("affine4.group") + " --hidden @" + sample("affine4_hidden.txt") +
                        " --solver elem2-cyclic --verify --report " + path.string());
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_TRUE(r.out.empty());
  const auto j = json::parse(slurp(path));
  std::filesystem::remove(path);
  validate_report(j);
  EXPECT_EQ(j["result_order"], 5);
  EXPECT_EQ(j["diagnostics"]["quotient_order"], 15);
}

TEST(Cli, DeterministicApartFromWallTime) {
  const std::string args = "--group " + sample("affine5_jordan.group") + " --hidden '' --solver elem2-small --seed 99 --verify";
  const auto a = invoke(args), b = invoke(args);
  ASSERT_EQ(a.exit_code, 0);
  EXPECT_EQ(hsplab::strip_timing(ordered_json::parse(a.out)).dump(), hsplab::strip_timing(ordered_json::parse(b.out)).dump());
  const auto c = invoke("--group " + sample("affine5_jordan.group") + " --hidden '' --solver elem2-small --seed 100 --verify");
  EXPECT_NE(hsplab::strip_timing(ordered_json::parse(a.out)).dump(), hsplab::strip_timing(ordered_json::parse(c.out)).dump());
}

TEST(Cli, SuiteRunsEveryInstance) {
  const auto r = invoke("--suite " + sample("suite.json") + " --seed 5");
  ASSERT_EQ(r.exit_code, 0) << r.out;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["schema"], "hsplab.suite/1");
  ASSERT_GT(j["instances"].size(), 5u);
  EXPECT_EQ(j["summary"]["total"], j["instances"].size());
  EXPECT_EQ(j["summary"]["ok"], j["instances"].size());
  for (std::size_t i = 0; i < j["instances"].size(); ++i) {
    const auto& inst = j["instances"][i];
    validate_report(inst);
    EXPECT_EQ(inst["config"]["seed"], hsplab::derive_seed(5, i));
    EXPECT_TRUE(inst["verification"]["equal"].get<bool>()) << inst["instance"];
  }
}

TEST(Cli, SuiteIndependentOfThreadCount) {
  const auto one = hsplab::run_suite(sample("suite.json"), 7, 1.0 / 1024, false, 1);
  const auto four = hsplab::run_suite(sample("suite.json"), 7, 1.0 / 1024, false, 4);
  EXPECT_EQ(one.exit_code, four.exit_code);
  EXPECT_EQ(hsplab::strip_timing(one.report).dump(), hsplab::strip_timing(four.report).dump());
}

TEST(Cli, SuiteExitCodeIsWorstInstance) {
  const auto dir = std::filesystem::temp_directory_path() / "hsplab_cli_suite";
  std::filesystem::create_directories(dir);
  std::filesystem::copy_file(sample("q8.group"), dir / "q8.group", std::filesystem::copy_options::overwrite_existing);
  std::filesystem::copy_file(sample("malformed.group"), dir / "bad.group", std::filesystem::copy_options::overwrite_existing);
  std::ofstream(dir / "suite.json") << R"js({"instances": [
    {"name": "ok", "group": "q8.group", "hidden": "(1 5)(2 6)(3 7)(4 8)", "solver": "normal"},
    {"name": "solver-error", "group": "q8.group", "hidden": "", "solver": "normal"}]})js";
  auto r = invoke("--suite " + (dir / "suite.json").string());
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(json::parse(r.out)["summary"]["errors"], 1);
  std::ofstream(dir / "suite.json") << R"js({"instances": [
    {"name": "solver-error", "group": "q8.group", "hidden": "", "solver": "normal"},
    {"name": "spec-error", "group": "bad.group"}]})js";
  r = invoke("--suite " + (dir / "suite.json").string());
  EXPECT_EQ(r.exit_code, 3);
  std::ofstream(dir / "suite.json") << "not json";
  EXPECT_EQ(invoke("--suite " + (dir / "suite.json").string()).exit_code, 3);
  std::filesystem::remove_all(dir);
}

TEST(Cli, AutoSelection) {
  auto method = [](const std::string& file, const std::string& hidden) {
    const auto r = invoke("--group " + sample(file) + " --hidden '" + hidden + "'");
    return json::parse(r.out).value("method", std::string("error"));
  };
  EXPECT_EQ(method("z4x6.group", "(2,0)"), "abelian");
  EXPECT_EQ(method("q8.group", ""), "commutator");
  EXPECT_EQ(method("extraspecial5.group", ""), "commutator");
  // |G'| = 8 for the Jordan block and 16 for the companion block; shrink
  // the commutator limit so the declared normal subgroup is used.
  ::setenv("HSPLAB_AUTO_MAX_COMMUTATOR", "4", 1);
  EXPECT_EQ(method("affine5_jordan.group", ""), "elem2-small");
  ::setenv("HSPLAB_AUTO_MAX_QUOTIENT", "8", 1);
  EXPECT_EQ(method("affine4.group", ""), "elem2-cyclic");
  ::unsetenv("HSPLAB_AUTO_MAX_COMMUTATOR");
  ::unsetenv("HSPLAB_AUTO_MAX_QUOTIENT");
}
