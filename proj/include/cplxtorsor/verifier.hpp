#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cplxtorsor/appell_humbert.hpp"
#include "cplxtorsor/torus.hpp"
#include "cplxtorsor/types.hpp"

/// Batch verification of the torsor identities for one torus and bundle.
/// Double precision only; the library headers stay generic.
namespace cplxtorsor::verifier {

inline constexpr const char* kVersion = "0.1.0";

/// Check names in execution order.
const std::vector<std::string>& check_names();

struct Tolerances {
  double analytic = 1e-8;  // identities with no discretisation in them
  double fd = 1e-6;        // identities mediated by the ∂̄ stencil
  double trivial = 1e-9;   // degenerate bundle, duality, chart witness
};

struct VerificationConfig {
  CMatrix<double> period;            // g x 2g
  bool trivial_bundle = false;
  CMatrix<double> hermitian;         // g x g, unused when trivial_bundle
  RVector<double> chi_turns;         // 2g phases, χ(λ_j) = exp(2πi turns_j)
  int grid = 0;                      // 0: 64 for g = 1, 16 for g = 2, 8 above
  std::uint64_t seed = 0;
  int samples = 5;                   // random x / y / z / w draws per check
  Tolerances tolerances;
  double kappa_max = 1e8;
  std::vector<std::string> checks;   // empty: all
  std::string output;                // empty: report.json

  int genus() const { return static_cast<int>(period.rows()); }
  int resolution() const;
};

/// Throws Error(ConfigInvalid) naming the offending field.
VerificationConfig parse_config(const std::string& json_text);
/// Throws Error(IoError) when the file cannot be read.
VerificationConfig load_config(const std::filesystem::path& path);
/// "principal-g1", "principal-g2" or "trivial".
VerificationConfig demo_config(const std::string& name);

/// Checks names against check_names(); throws ConfigInvalid.
std::vector<std::string> parse_check_list(const std::string& comma_list);

/// Canonical JSON of everything that affects the numbers (not the output path).
std::string canonical_json(const VerificationConfig& cfg);
/// Hex SHA-256 of canonical_json.
std::string config_digest(const VerificationConfig& cfg);

ComplexTorus<double> build_torus(const VerificationConfig& cfg);
AHDatum<double> build_datum(const VerificationConfig& cfg);

struct CheckRecord {
  std::string name;
  bool passed = false;
  std::optional<double> max_error;  // empty when the check crashed
  double tolerance = 0;
  long samples = 0;
  double wall_time_ms = 0;
  std::string detail;               // summary line only, not in the JSON
};

struct VerificationReport {
  std::string version = kVersion;
  std::string config_digest;
  std::uint64_t seed = 0;
  bool overall = false;
  std::vector<CheckRecord> checks;
};

/// Validates the datum (throws on an invalid one, before any check runs),
/// then runs the selected checks in order.  A check that throws is recorded
/// as failed with no max_error and the rest still run.
VerificationReport run_suite(const VerificationConfig& cfg);

/// Report JSON with fixed key order.
std::string report_json(const VerificationReport& r);
/// Writes report_json to path and a text summary to `summary`.
/// Throws Error(IoError).
void emit_report(const VerificationReport& r, const std::filesystem::path& path, std::ostream& summary);

/// Output path: cli_out, else cfg.output, else report.json; the directory
/// part is replaced by $TORSOR_VERIFY_OUTDIR when that is set.
std::filesystem::path resolve_output_path(const VerificationConfig& cfg, const std::string& cli_out);

}  // namespace cplxtorsor::verifier
