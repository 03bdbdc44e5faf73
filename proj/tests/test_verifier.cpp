#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "cplxtorsor/verifier.hpp"
#include "test_support.hpp"

using namespace testsupport;
namespace vf = cplxtorsor::verifier;

namespace {

vf::VerificationConfig small_g1() {
  auto cfg = vf::demo_config("principal-g1");
  cfg.grid = 16;
  cfg.samples = 2;
  return cfg;
}

std::string strip_wall_times(const std::string& json) {
  return std::regex_replace(json, std::regex("\"wall_time_ms\": [^,}\\n]*"), "\"wall_time_ms\": 0");
}

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = vf::parse_config(R"({
    "torus": {"g": 1, "period_matrix": [[[1, 0], [0, 1]]]},
    "bundle": {"H": [[[1, 0]]], "chi_turns": [0.25, 0]},
    "numeric": {"grid": 32, "seed": 9, "tolerances": {"fd": 1e-5}},
    "checks": ["duality", "integrality_anchor"]
  })");
  CHECK(cfg.genus() == 1);
  CHECK(cfg.period(0, 1) == I);
  CHECK(cfg.resolution() == 32);
  CHECK(cfg.seed == 9);
  CHECK(cfg.tolerances.fd == 1e-5);
  CHECK(cfg.tolerances.analytic == 1e-8);
  CHECK(cfg.checks == std::vector<std::string>{"duality", "integrality_anchor"});
  const auto d = vf::build_datum(cfg);
  CHECK(std::abs(d.generator_characters()(0) - I) < 1e-15);

  auto code_of = [](const std::string& text) {
    try {
      vf::parse_config(text);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::IoError;
  };
  CHECK(code_of("{") == ErrorCode::ConfigInvalid);
  CHECK(code_of(R"({"torus": {"g": 1, "period_matrix": [[[1, 0]]]}, "bundle": "trivial"})") ==
        ErrorCode::ConfigInvalid);
  CHECK(code_of(R"({"torus": {"g": 1, "period_matrix": [[[1, 0], [0, 1]]]}, "bundle": "twisted"})") ==
        ErrorCode::ConfigInvalid);
  CHECK(code_of(R"({"torus": {"g": 1, "period_matrix": [[[1, 0], [0, 1]]]}, "bundle": "trivial",
                    "checks": ["no_such_check"]})") == ErrorCode::ConfigInvalid);
  CHECK(code_of(R"({"torus": {"g": 1, "period_matrix": [[[1, 0], [0, 1]]]}, "bundle": "trivial",
                    "numeric": {"fd_step": "adaptive"}})") == ErrorCode::ConfigInvalid);

  CHECK(vf::demo_config("principal-g2").resolution() == 16);
  CHECK(vf::demo_config("trivial").resolution() == 64);
  CHECK_THROWS_AS(vf::demo_config("nope"), Error);
  CHECK_THROWS_AS(vf::load_config("/nonexistent/config.json"), Error);
}

TEST_CASE("invalid data abort before any check runs") {
  auto cfg = vf::demo_config("principal-g1");
  cfg.hermitian(0, 0) = 0.5;
  try {
    vf::run_suite(cfg);
    FAIL("expected NonIntegralE");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonIntegralE);
  }
  cfg = vf::demo_config("principal-g1");
  cfg.period(0, 1) = C(2, 0);
  CHECK_THROWS_AS(vf::run_suite(cfg), Error);
}

TEST_CASE("config digest") {
  const auto a = small_g1();
  auto b = a;
  CHECK(vf::config_digest(a) == vf::config_digest(b));
  CHECK(vf::config_digest(a).size() == 64);
  b.output = "elsewhere.json";
  CHECK(vf::config_digest(a) == vf::config_digest(b));
  b.seed += 1;
  CHECK(vf::config_digest(a) != vf::config_digest(b));
  CHECK(vf::config_digest(a).find_first_not_of("0123456789abcdef") == std::string::npos);
}

TEST_CASE("principal g=1 suite passes and the report follows the schema") {
  const auto cfg = small_g1();
  const auto r = vf::run_suite(cfg);
  CHECK(r.overall);
  REQUIRE(r.checks.size() == vf::check_names().size());
  for (std::size_t k = 0; k < r.checks.size(); ++k) {
    CAPTURE(r.checks[k].name);
    CAPTURE(r.checks[k].detail);
    CHECK(r.checks[k].name == vf::check_names()[k]);
    CHECK(r.checks[k].passed);
  }
  CHECK(r.checks[1].detail == "E(l1,l2) = -1");

  const auto j = nlohmann::ordered_json::parse(vf::report_json(r));
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  CHECK(keys == std::vector<std::string>{"version", "config_digest", "seed", "overall", "checks"});
  CHECK(j["version"] == vf::kVersion);
  CHECK(j["overall"] == "pass");
  CHECK(j["seed"] == cfg.seed);
  for (const auto& c : j["checks"]) {
    std::vector<std::string> ck;
    for (auto it = c.begin(); it != c.end(); ++it) ck.push_back(it.key());
    CHECK(ck == std::vector<std::string>{"name", "status", "max_error", "tolerance", "samples", "wall_time_ms"});
    CHECK(c["max_error"].is_number());
    CHECK(c["status"] == "pass");
  }
}

TEST_CASE("reports are deterministic up to wall times") {
  auto cfg = small_g1();
  cfg.checks = {"slice_flatness", "hom_obstruction", "duality", "fd_convergence"};
  const std::string a = vf::report_json(vf::run_suite(cfg));
  const std::string b = vf::report_json(vf::run_suite(cfg));
  CHECK(strip_wall_times(a) == strip_wall_times(b));
  cfg.seed += 1;
  CHECK(strip_wall_times(a) != strip_wall_times(vf::report_json(vf::run_suite(cfg))));
}

TEST_CASE("trivial bundle run") {
  auto cfg = vf::demo_config("trivial");
  cfg.grid = 16;
  const auto r = vf::run_suite(cfg);
  for (const auto& c : r.checks) {
    CAPTURE(c.name);
    CHECK(c.passed);
    if (c.name != "fd_convergence") CHECK(*c.max_error <= 1e-9);
  }
  CHECK(r.overall);
}

TEST_CASE("failures and crashes are isolated") {
  auto cfg = small_g1();
  cfg.tolerances.fd = 1e-300;
  cfg.checks = {"fd_convergence", "duality"};
  auto r = vf::run_suite(cfg);
  CHECK_FALSE(r.overall);
  CHECK(r.checks[0].name == "duality");
  CHECK(r.checks[0].passed);
  CHECK_FALSE(r.checks[1].passed);
  CHECK(nlohmann::json::parse(vf::report_json(r))["overall"] == "fail");

  // Grids below 4 points make every stencil-based check throw; the others
  // still run and pass.
  cfg = small_g1();
  cfg.grid = 2;
  r = vf::run_suite(cfg);
  CHECK_FALSE(r.overall);
  REQUIRE(r.checks.size() == vf::check_names().size());
  CHECK(r.checks[0].passed);
  CHECK(r.checks[1].passed);
  CHECK_FALSE(r.checks[2].max_error.has_value());
  CHECK(r.checks[2].detail.find("CheckCrashed") != std::string::npos);
  CHECK(r.checks[2].detail.find("ResolutionTooCoarse") != std::string::npos);
  CHECK(nlohmann::json::parse(vf::report_json(r))["checks"][2]["max_error"].is_null());
}

TEST_CASE("emit_report writes the JSON and honours the output directory override") {
  auto cfg = small_g1();
  cfg.checks = {"integrality_anchor"};
  const auto r = vf::run_suite(cfg);
  const auto dir = std::filesystem::temp_directory_path() / "cplxtorsor_emit_test";
  std::filesystem::remove_all(dir);

  std::ostringstream summary;
  const auto path = dir / "nested" / "r.json";
  vf::emit_report(r, path, summary);
  std::ifstream in(path);
  std::stringstream text;
  text << in.rdbuf();
  CHECK(text.str() == vf::report_json(r));
  CHECK(summary.str().find("PASS  integrality_anchor") != std::string::npos);

  CHECK(vf::resolve_output_path(cfg, "") == std::filesystem::path("report.json"));
  CHECK(vf::resolve_output_path(cfg, "x/y.json") == std::filesystem::path("x/y.json"));
  ::setenv("TORSOR_VERIFY_OUTDIR", dir.c_str(), 1);
  CHECK(vf::resolve_output_path(cfg, "x/y.json") == dir / "y.json");
  ::unsetenv("TORSOR_VERIFY_OUTDIR");

  CHECK_THROWS_AS(vf::emit_report(r, "/proc/nonexistent/r.json", summary), Error);
  std::filesystem::remove_all(dir);
}
