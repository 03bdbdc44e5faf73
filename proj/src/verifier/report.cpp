#include <fstream>
#include <iomanip>
#include <ostream>

#include "cplxtorsor/verifier.hpp"
#include "json.hpp"

namespace cplxtorsor::verifier {

std::string report_json(const VerificationReport& r) {
  nlohmann::ordered_json j;
  j["version"] = r.version;
  j["config_digest"] = r.config_digest;
  j["seed"] = r.seed;
  j["overall"] = r.overall ? "pass" : "fail";
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    nlohmann::ordered_json rec;
    rec["name"] = c.name;
    rec["status"] = c.passed ? "pass" : "fail";
    rec["max_error"] = c.max_error ? nlohmann::ordered_json(*c.max_error) : nlohmann::ordered_json(nullptr);
    rec["tolerance"] = c.tolerance;
    rec["samples"] = c.samples;
    rec["wall_time_ms"] = c.wall_time_ms;
    j["checks"].push_back(std::move(rec));
  }
  return j.dump(2) + "\n";
}

void emit_report(const VerificationReport& r, const std::filesystem::path& path, std::ostream& summary) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << report_json(r);
  out.close();
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());

  summary << "torsor verify " << r.version << "  seed " << r.seed << "  config " << r.config_digest.substr(0, 12)
          << "\n";
  for (const auto& c : r.checks) {
    summary << "  " << (c.passed ? "PASS" : "FAIL") << "  " << std::left << std::setw(26) << c.name << std::right;
    if (c.max_error) {
      summary << std::scientific << std::setprecision(3) << *c.max_error << " <= " << c.tolerance;
    } else {
      summary << "crashed";
    }
    summary << std::defaultfloat << "  (" << std::fixed << std::setprecision(1) << c.wall_time_ms << " ms)"
            << std::defaultfloat;
    if (!c.detail.empty()) summary << "  " << c.detail;
    summary << "\n";
  }
  summary << "overall: " << (r.overall ? "pass" : "fail") << "  -> " << path.string() << "\n";
}

}  // namespace cplxtorsor::verifier
