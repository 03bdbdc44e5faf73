#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "cplxtorsor/verifier.hpp"
#include "json.hpp"

namespace cplxtorsor::verifier {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;
using C = std::complex<double>;

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); }

C parse_complex(const json& v, const std::string& where) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  invalid(where + ": expected [re, im]");
}

CMatrix<double> parse_complex_matrix(const json& v, Eigen::Index rows, Eigen::Index cols, const std::string& where) {
  if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != rows) {
    invalid(where + ": expected " + std::to_string(rows) + " rows");
  }
  CMatrix<double> m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = v[r];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      invalid(where + "[" + std::to_string(r) + "]: expected " + std::to_string(cols) + " entries");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = parse_complex(row[c], where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
  }
  return m;
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    invalid(where + "." + key + ": wrong type");
  }
}

ordered_json complex_json(C z) { return ordered_json::array({z.real(), z.imag()}); }

ordered_json matrix_json(const CMatrix<double>& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

VerificationConfig from_json(const json& root) {
  if (!root.is_object()) invalid("top level must be an object");
  VerificationConfig cfg;

  if (!root.contains("torus") || !root["torus"].is_object()) invalid("missing object 'torus'");
  const json& torus = root["torus"];
  const int g = get_or<int>(torus, "g", 0, "torus");
  if (g < 1) invalid("torus.g must be a positive integer");
  if (!torus.contains("period_matrix")) invalid("missing torus.period_matrix");
  cfg.period = parse_complex_matrix(torus["period_matrix"], g, 2 * g, "torus.period_matrix");

  if (!root.contains("bundle")) invalid("missing 'bundle'");
  const json& bundle = root["bundle"];
  if (bundle.is_string()) {
    if (bundle.get<std::string>() != "trivial") invalid("bundle: the only string form is \"trivial\"");
    cfg.trivial_bundle = true;
    cfg.hermitian = CMatrix<double>::Zero(g, g);
    cfg.chi_turns = RVector<double>::Zero(2 * g);
  } else if (bundle.is_object()) {
    if (!bundle.contains("H")) invalid("missing bundle.H");
    cfg.hermitian = parse_complex_matrix(bundle["H"], g, g, "bundle.H");
    cfg.chi_turns = RVector<double>::Zero(2 * g);
    if (bundle.contains("chi_turns")) {
      const json& chi = bundle["chi_turns"];
      if (!chi.is_array() || static_cast<int>(chi.size()) != 2 * g) {
        invalid("bundle.chi_turns: expected " + std::to_string(2 * g) + " numbers");
      }
      for (int j = 0; j < 2 * g; ++j) {
        if (!chi[j].is_number()) invalid("bundle.chi_turns[" + std::to_string(j) + "]: expected a number");
        cfg.chi_turns(j) = chi[j].get<double>();
      }
    }
  } else {
    invalid("bundle must be \"trivial\" or an object");
  }

  if (root.contains("numeric")) {
    const json& num = root["numeric"];
    if (!num.is_object()) invalid("numeric must be an object");
    cfg.grid = get_or<int>(num, "grid", 0, "numeric");
    if (cfg.grid < 0) invalid("numeric.grid must be >= 0");
    cfg.seed = get_or<std::uint64_t>(num, "seed", 0, "numeric");
    cfg.samples = get_or<int>(num, "samples", 5, "numeric");
    if (cfg.samples < 1) invalid("numeric.samples must be >= 1");
    cfg.kappa_max = get_or<double>(num, "kappa_max", 1e8, "numeric");
    const std::string step = get_or<std::string>(num, "fd_step", "grid", "numeric");
    if (step != "grid") invalid("numeric.fd_step: only \"grid\" (h = 1/N) is supported");
    if (num.contains("tolerances")) {
      const json& tol = num["tolerances"];
      if (!tol.is_object()) invalid("numeric.tolerances must be an object");
      cfg.tolerances.analytic = get_or<double>(tol, "analytic", cfg.tolerances.analytic, "numeric.tolerances");
      cfg.tolerances.fd = get_or<double>(tol, "fd", cfg.tolerances.fd, "numeric.tolerances");
      cfg.tolerances.trivial = get_or<double>(tol, "trivial", cfg.tolerances.trivial, "numeric.tolerances");
    }
  }

  if (root.contains("checks")) {
    const json& checks = root["checks"];
    if (!checks.is_array()) invalid("checks must be an array of names");
    std::string joined;
    for (const auto& c : checks) {
      if (!c.is_string()) invalid("checks: names must be strings");
      if (!joined.empty()) joined += ",";
      joined += c.get<std::string>();
    }
    if (!joined.empty()) cfg.checks = parse_check_list(joined);
  }
  cfg.output = get_or<std::string>(root, "output", "", "config");
  return cfg;
}

}  // namespace

int VerificationConfig::resolution() const {
  if (grid > 0) return grid;
  const int g = genus();
  return g == 1 ? 64 : g == 2 ? 16 : 8;
}

VerificationConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    invalid(std::string("not valid JSON: ") + e.what());
  }
  return from_json(root);
}

VerificationConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

VerificationConfig demo_config(const std::string& name) {
  VerificationConfig cfg;
  const C i(0, 1);
  if (name == "principal-g1" || name == "trivial") {
    cfg.period = CMatrix<double>(1, 2);
    cfg.period << 1.0, i;
    cfg.hermitian = CMatrix<double>::Constant(1, 1, name == "trivial" ? 0.0 : 1.0);
    cfg.trivial_bundle = name == "trivial";
  } else if (name == "principal-g2") {
    cfg.period = CMatrix<double>::Zero(2, 4);
    cfg.period(0, 0) = 1.0;
    cfg.period(1, 1) = 1.0;
    cfg.period(0, 2) = i;
    cfg.period(1, 3) = 2.0 * i;
    cfg.hermitian = CMatrix<double>::Zero(2, 2);
    cfg.hermitian(0, 0) = 1.0;
    cfg.hermitian(1, 1) = 0.5;
  } else {
    invalid("unknown demo '" + name + "' (principal-g1, principal-g2, trivial)");
  }
  cfg.chi_turns = RVector<double>::Zero(2 * cfg.genus());
  cfg.seed = 20240601;
  return cfg;
}

std::vector<std::string> parse_check_list(const std::string& comma_list) {
  std::vector<std::string> out;
  std::stringstream in(comma_list);
  std::string name;
  const auto& known = check_names();
  while (std::getline(in, name, ',')) {
    if (name.empty()) continue;
    if (std::find(known.begin(), known.end(), name) == known.end()) invalid("unknown check '" + name + "'");
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
  }
  if (out.empty()) invalid("empty check list");
  return out;
}

std::string canonical_json(const VerificationConfig& cfg) {
  ordered_json j;
  j["torus"] = {{"g", cfg.genus()}, {"period_matrix", matrix_json(cfg.period)}};
  if (cfg.trivial_bundle) {
    j["bundle"] = "trivial";
  } else {
    ordered_json chi = ordered_json::array();
    for (Eigen::Index k = 0; k < cfg.chi_turns.size(); ++k) chi.push_back(cfg.chi_turns(k));
    j["bundle"] = {{"H", matrix_json(cfg.hermitian)}, {"chi_turns", chi}};
  }
  j["numeric"] = {{"grid", cfg.resolution()},
                  {"seed", cfg.seed},
                  {"samples", cfg.samples},
                  {"fd_step", "grid"},
                  {"kappa_max", cfg.kappa_max},
                  {"tolerances",
                   {{"analytic", cfg.tolerances.analytic},
                    {"fd", cfg.tolerances.fd},
                    {"trivial", cfg.tolerances.trivial}}}};
  j["checks"] = cfg.checks.empty() ? check_names() : cfg.checks;
  return j.dump();
}

std::string config_digest(const VerificationConfig& cfg) {
  const std::string text = canonical_json(cfg);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::IoError, "SHA-256 digest failed");
  }
  std::ostringstream hex;
  for (unsigned int k = 0; k < len; ++k) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[k]);
  return hex.str();
}

ComplexTorus<double> build_torus(const VerificationConfig& cfg) { return validate_torus(cfg.period, cfg.kappa_max); }

AHDatum<double> build_datum(const VerificationConfig& cfg) {
  const auto torus = build_torus(cfg);
  if (cfg.trivial_bundle) return AHDatum<double>::trivial(torus);
  CVector<double> chi(cfg.chi_turns.size());
  for (Eigen::Index j = 0; j < chi.size(); ++j) chi(j) = std::polar(1.0, 2 * M_PI * cfg.chi_turns(j));
  return validate_datum(torus, cfg.hermitian, chi);
}

std::filesystem::path resolve_output_path(const VerificationConfig& cfg, const std::string& cli_out) {
  std::filesystem::path path = !cli_out.empty() ? cli_out : !cfg.output.empty() ? cfg.output : "report.json";
  if (const char* dir = std::getenv("TORSOR_VERIFY_OUTDIR"); dir != nullptr && *dir != '\0') {
    path = std::filesystem::path(dir) / path.filename();
  }
  return path;
}

}  // namespace cplxtorsor::verifier
