#include <chrono>
#include <functional>
#include <random>
#include <sstream>

#include "cplxtorsor/cplxtorsor.hpp"
#include "cplxtorsor/verifier.hpp"

namespace cplxtorsor::verifier {

namespace {

using C = std::complex<double>;
using CVec = CVector<double>;
using CMat = CMatrix<double>;
using Fn = std::function<CVec(const CVec&)>;

// Size of the holomorphic gauge used to expose the O(h²) stencil error.
constexpr double kGaugeScale = 1e-5;

struct Outcome {
  double max_error = 0;
  long samples = 0;
  bool extra_ok = true;  // conditions that are not a tolerance comparison
  std::string detail;
};

struct Context {
  const VerificationConfig& cfg;
  ComplexTorus<double> torus;
  AHDatum<double> datum;
  int n;
  int g;
  CMat k;  // curvature coefficients -πH

  std::mt19937_64 rng_for(std::size_t check_index) const {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(check_index)};
    return std::mt19937_64(seq);
  }

  CVec random_point(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    RVector<double> t(torus.real_dim());
    for (int a = 0; a < t.size(); ++a) t(a) = u(rng);
    return torus.lift_of(t);
  }
};

double max_abs(const CMat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// max over nodes of |Θ(node) - K|
double deviation_from_constant(const GridFunction<double>& theta, const CMat& k) {
  double err = 0;
  const int g = static_cast<int>(k.rows());
  for (Eigen::Index node = 0; node < theta.nodes(); ++node) {
    err = std::max(err, max_abs(CMat(unflatten_square<double>(theta.at(node), g) - k)));
  }
  return err;
}

// Seeded trigonometric polynomial in lattice coordinates, C^g-valued.
Fn trig_perturbation(const ComplexTorus<double>& a, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  const int g = a.genus(), n = a.real_dim();
  CMat coeff(g, n);
  RMatrix<double> phase(g, n);
  IMatrix freq(g, n);
  for (int j = 0; j < g; ++j)
    for (int m = 0; m < n; ++m) {
      coeff(j, m) = C(u(rng), u(rng));
      phase(j, m) = u(rng);
      freq(j, m) = 1 + static_cast<long>((u(rng) + 0.5) * 2.0);  // 1..3
    }
  return [a, coeff, phase, freq](const CVec& x) {
    const RVector<double> t = a.lattice_coords(x);
    CVec w = CVec::Zero(coeff.rows());
    for (Eigen::Index j = 0; j < coeff.rows(); ++j)
      for (Eigen::Index m = 0; m < coeff.cols(); ++m)
        w(j) += coeff(j, m) * std::sin(2 * M_PI * (double(freq(j, m)) * t(m) + phase(j, m)));
    return w;
  };
}

GridFunction<double> dyadic_grid(const ComplexTorus<double>& a, int n, int comps, std::mt19937_64& rng) {
  GridFunction<double> out(a, n, comps);
  std::uniform_int_distribution<int> d(-256, 256);
  for (Eigen::Index node = 0; node < out.nodes(); ++node)
    for (int c = 0; c < comps; ++c) out.at(node)(c) = C(d(rng) / 64.0, d(rng) / 128.0);
  return out;
}

bool bitwise_equal(const GridFunction<double>& a, const GridFunction<double>& b) {
  return a.same_shape(b) && a.values() == b.values();
}

// σ and τ reference coordinates moved by the holomorphic gauge
// f = ε Σ exp(z_j) (resp. ε Σ exp(z_j + x_j)); Θ is unchanged analytically.
Fn gauged_sigma(const AHDatum<double>& d) {
  const auto theta = canonical_connection(d);
  return [theta](const CVec& x) -> CVec { return theta(x) - kGaugeScale * x.array().exp().matrix(); };
}

Fn gauged_tau(const AHDatum<double>& d, const CVec& z0) {
  const auto family = family_connection(d);
  return [family, z0](const CVec& x) -> CVec {
    return slice_value(family, z0, x) - kGaugeScale * (z0 + x).array().exp().matrix();
  };
}

Outcome datum_validation(const Context& c) {
  Outcome o;
  const CMat& h = c.datum.hermitian_matrix();
  const RMatrix<double> e = c.datum.alternating_matrix();
  o.max_error = std::max(max_abs(CMat(h - h.adjoint())), (e.array() - e.array().round()).abs().maxCoeff());
  const CVec& chi = c.datum.generator_characters();
  for (Eigen::Index j = 0; j < chi.size(); ++j) o.max_error = std::max(o.max_error, std::abs(std::abs(chi(j)) - 1.0));
  o.samples = e.size() + chi.size();
  return o;
}

Outcome integrality_anchor(const Context& c) {
  Outcome o;
  const CMat pairing = cycle_integral_matrix(chern_form(c.datum), c.torus);
  const IMatrix e = c.datum.integral_alternating_matrix();
  o.max_error = max_abs(CMat(pairing - e.cast<double>().cast<C>()));
  o.samples = pairing.size();
  std::ostringstream s;
  if (c.g == 1) {
    s << "E(l1,l2) = " << e(0, 1);
  } else {
    s << "E = [";
    for (Eigen::Index r = 0; r < e.rows(); ++r) {
      if (r) s << "; ";
      for (Eigen::Index col = 0; col < e.cols(); ++col) s << (col ? " " : "") << e(r, col);
    }
    s << "]";
  }
  o.detail = s.str();
  return o;
}

Outcome curvature_invariance(const Context& c) {
  Outcome o;
  const auto theta = canonical_connection(c.datum);
  const auto k = curvature(theta, c.n);
  o.max_error = std::max(k.variation(), k.deviation_from(analytic_curvature(theta)));
  o.samples = k.samples.nodes();
  return o;
}

Outcome sigma_obstruction(const Context& c) {
  Outcome o;
  const auto p = sigma_presentation(c.datum, c.n);
  o.max_error = deviation_from_constant(p->obstruction(), c.k);
  o.samples = p->obstruction().nodes();
  return o;
}

Outcome slice_flatness(const Context& c, std::mt19937_64& rng) {
  Outcome o;
  const auto family = family_connection(c.datum);
  for (int s = 0; s < c.cfg.samples; ++s) {
    const TorusPoint<double> x(c.torus, c.random_point(rng));
    const auto slice = slice_connection(family, x);
    o.max_error = std::max(o.max_error, max_abs(curvature(slice, c.n).samples));
    if (!is_topologically_trivial(slice.datum())) o.extra_ok = false;
  }
  o.samples = c.cfg.samples;
  if (!o.extra_ok) o.detail = "a slice datum is not topologically trivial";
  return o;
}

Outcome family_curvature_slice(const Context& c, std::mt19937_64& rng) {
  Outcome o;
  const auto family = family_connection(c.datum);
  const auto omega = analytic_curvature(canonical_connection(c.datum));
  for (int s = 0; s < c.cfg.samples; ++s) {
    const TorusPoint<double> y(c.torus, c.random_point(rng));
    o.max_error = std::max(o.max_error, check_eq_i(family, omega, y, c.n));
  }
  o.samples = c.cfg.samples;
  return o;
}

Outcome tau_obstruction(const Context& c, std::mt19937_64& rng) {
  Outcome o;
  const auto p = tau_presentation(c.datum, c.n, CVec(c.random_point(rng)));
  o.max_error = deviation_from_constant(p->obstruction(), c.k);
  o.samples = p->obstruction().nodes();
  return o;
}

Outcome canonical_isomorphism(const Context& c, std::mt19937_64& rng) {
  Outcome o;
  const auto sigma = sigma_presentation(c.datum, c.n);
  const auto tau = tau_presentation(c.datum, c.n, CVec(c.random_point(rng)));
  o.max_error = is_holomorphic_morphism(canonical_morphism(sigma, tau), c.cfg.tolerances.fd).max_error;
  o.samples = sigma->obstruction().nodes();
  return o;
}

Outcome hom_obstruction(const Context& c, std::mt19937_64& rng) {
  Outcome o;
  const auto sigma = sigma_presentation(c.datum, c.n);
  const auto tau = tau_presentation(c.datum, c.n);
  for (int s = 0; s < c.cfg.samples; ++s) {
    const Fn w = trig_perturbation(c.torus, rng);
    const auto gamma = canonical_morphism(sigma, perturbed_presentation(tau, w));
    const auto expected = dbar_fd(GridFunction<double>::sample(c.torus, c.n, c.g, w));
    o.max_error = std::max(o.max_error, max_abs_diff(morphism_obstruction(gamma), expected));
  }
  o.samples = c.cfg.samples;
  return o;
}

Outcome duality(const Context& c, std::mt19937_64& rng) {
  Outcome o;
  const auto dl = dual(c.datum);
  long bitwise_failures = 0;
  const std::pair<PresentationPtr<double>, PresentationPtr<double>> pairs[] = {
      {sigma_presentation(c.datum, c.n), sigma_presentation(dl, c.n)},
      {tau_presentation(c.datum, c.n), tau_presentation(dl, c.n)}};
  for (const auto& [p, q] : pairs) {
    const auto delta = duality_map(p, q);
    const auto back = duality_map(q, p);
    o.max_error = std::max(o.max_error, is_holomorphic_morphism(delta, c.cfg.tolerances.trivial).max_error);
    o.max_error = std::max(o.max_error, reference_mismatch(delta));
    o.max_error = std::max(o.max_error, max_abs(apply(delta, TorsorSection<double>::zero(p)).offset()));
    for (int s = 0; s < c.cfg.samples; ++s) {
      const auto sec = TorsorSection<double>::periodic(p, dyadic_grid(c.torus, c.n, c.g, rng));
      const auto v = dyadic_grid(c.torus, c.n, c.g, rng);
      const auto once = apply(delta, sec);
      const auto twice = apply(back, once);
      const auto lhs = apply(delta, act(sec, v));
      const auto rhs = act(once, -v);
      if (!bitwise_equal(twice.offset(), sec.offset())) ++bitwise_failures;
      if (!bitwise_equal(lhs.offset(), rhs.offset())) ++bitwise_failures;
      o.max_error = std::max(o.max_error, max_abs_diff(twice.offset(), sec.offset()));
      o.max_error = std::max(o.max_error, max_abs_diff(lhs.offset(), rhs.offset()));
    }
  }
  o.samples = 2L * c.cfg.samples;
  o.extra_ok = bitwise_failures == 0;
  if (!o.extra_ok) o.detail = std::to_string(bitwise_failures) + " comparisons not bitwise equal";
  return o;
}

Outcome trivial_bundle(const Context& c) {
  Outcome o;
  const auto triv = AHDatum<double>::trivial(c.torus);
  const auto sigma = sigma_presentation(triv, c.n);
  const auto tau = tau_presentation(triv, c.n);
  const auto gamma = canonical_morphism(sigma, tau);
  o.max_error = max_abs(analytic_curvature(canonical_connection(triv)).coefficients());
  o.max_error = std::max(o.max_error, max_abs(trivialization_class(*sigma)));
  o.max_error = std::max(o.max_error, max_abs(trivialization_class(*tau)));
  o.max_error = std::max(o.max_error, is_holomorphic(TorsorSection<double>::zero(sigma), 0.0).max_error);
  o.max_error = std::max(o.max_error, is_holomorphic(TorsorSection<double>::zero(tau), 0.0).max_error);
  o.max_error = std::max(o.max_error, is_holomorphic_morphism(gamma, 0.0).max_error);
  o.max_error = std::max(o.max_error, reference_mismatch(gamma));
  o.samples = sigma->obstruction().nodes();
  return o;
}

Outcome local_holomorphic_witness(const Context& c) {
  Outcome o;
  const auto sigma = sigma_presentation(c.datum, c.n);
  o.max_error = is_holomorphic(local_holomorphic_section(sigma, c.k), 0.0).max_error;
  o.samples = sigma->obstruction().nodes();
  // Global side: the class vanishes exactly when E does.
  const bool e_zero = c.datum.integral_alternating_matrix().isZero();
  const bool trivializable = is_trivializable(*sigma, c.cfg.tolerances.fd);
  o.extra_ok = e_zero == trivializable;
  o.detail = std::string("class ") + (trivializable ? "zero" : "nonzero") + ", E " + (e_zero ? "zero" : "nonzero");
  return o;
}

Outcome fd_convergence(const Context& c, std::mt19937_64& rng) {
  Outcome o;
  const CVec z0 = c.random_point(rng);
  auto error_at = [&](const Fn& coord, int n) {
    return deviation_from_constant(dbar_fd_sampled(c.torus, n, coord), c.k);
  };
  std::ostringstream s;
  s.precision(3);
  const std::pair<const char*, Fn> refs[] = {{"sigma", gauged_sigma(c.datum)}, {"tau", gauged_tau(c.datum, z0)}};
  for (const auto& [name, coord] : refs) {
    const double e1 = error_at(coord, c.n);
    const double e2 = error_at(coord, 2 * c.n);
    o.max_error = std::max(o.max_error, e2 / e1);
    if (e1 > c.cfg.tolerances.fd) o.extra_ok = false;
    if (s.tellp() > 0) s << "  ";
    s << name << ": e(" << c.n << ")=" << e1 << " e(" << 2 * c.n << ")=" << e2;
  }
  o.samples = 4;
  o.detail = s.str();
  return o;
}

double tolerance_for(const std::string& name, const Tolerances& t) {
  if (name == "datum_validation" || name == "integrality_anchor" || name == "slice_flatness" ||
      name == "family_curvature_slice") {
    return t.analytic;
  }
  if (name == "hom_obstruction") return 2 * t.fd;
  if (name == "duality" || name == "trivial_bundle" || name == "local_holomorphic_witness") return t.trivial;
  if (name == "fd_convergence") return 1.0 / 3.5;
  return t.fd;
}

Outcome dispatch(const std::string& name, const Context& c, std::mt19937_64& rng) {
  if (name == "datum_validation") return datum_validation(c);
  if (name == "integrality_anchor") return integrality_anchor(c);
  if (name == "curvature_invariance") return curvature_invariance(c);
  if (name == "sigma_obstruction") return sigma_obstruction(c);
  if (name == "slice_flatness") return slice_flatness(c, rng);
  if (name == "family_curvature_slice") return family_curvature_slice(c, rng);
  if (name == "tau_obstruction") return tau_obstruction(c, rng);
  if (name == "canonical_isomorphism") return canonical_isomorphism(c, rng);
  if (name == "hom_obstruction") return hom_obstruction(c, rng);
  if (name == "duality") return duality(c, rng);
  if (name == "trivial_bundle") return trivial_bundle(c);
  if (name == "local_holomorphic_witness") return local_holomorphic_witness(c);
  if (name == "fd_convergence") return fd_convergence(c, rng);
  throw Error(ErrorCode::ConfigInvalid, "unknown check '" + name + "'");
}

}  // namespace

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = {
      "datum_validation",   "integrality_anchor",     "curvature_invariance", "sigma_obstruction",
      "slice_flatness",     "family_curvature_slice", "tau_obstruction",      "canonical_isomorphism",
      "hom_obstruction",    "duality",                "trivial_bundle",       "local_holomorphic_witness",
      "fd_convergence"};
  return names;
}

VerificationReport run_suite(const VerificationConfig& cfg) {
  const AHDatum<double> datum = build_datum(cfg);
  const Context ctx{cfg, datum.torus(), datum, cfg.resolution(), datum.genus(),
                    CMat(-M_PI * datum.hermitian_matrix())};

  VerificationReport report;
  report.config_digest = config_digest(cfg);
  report.seed = cfg.seed;
  report.overall = true;

  const auto& all = check_names();
  for (std::size_t index = 0; index < all.size(); ++index) {
    const std::string& name = all[index];
    if (!cfg.checks.empty() && std::find(cfg.checks.begin(), cfg.checks.end(), name) == cfg.checks.end()) continue;
    CheckRecord rec;
    rec.name = name;
    rec.tolerance = tolerance_for(name, cfg.tolerances);
    auto rng = ctx.rng_for(index);
    const auto start = std::chrono::steady_clock::now();
    try {
      const Outcome o = dispatch(name, ctx, rng);
      rec.max_error = o.max_error;
      rec.samples = o.samples;
      rec.detail = o.detail;
      rec.passed = o.extra_ok && std::isfinite(o.max_error) && o.max_error <= rec.tolerance;
    } catch (const std::exception& e) {
      rec.passed = false;
      rec.max_error.reset();
      rec.detail = Error(ErrorCode::CheckCrashed, name + ": " + e.what()).what();
    }
    rec.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    report.overall = report.overall && rec.passed;
    report.checks.push_back(std::move(rec));
  }
  return report;
}

}  // namespace cplxtorsor::verifier
