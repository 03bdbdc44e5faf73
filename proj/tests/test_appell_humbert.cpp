#include "doctest.h"
#include "test_support.hpp"

using namespace testsupport;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::IoError;
}

double rel(C a, C b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

}  // namespace

TEST_CASE("validate_datum") {
  const auto a = square_torus();
  CHECK(is_topologically_trivial(AHDatum<double>::trivial(a)));

  const auto d = principal_g1();
  // Oracle: E(λ₁, λ₂) = Im(1 · conj(i)) = -1.
  const double oracle = (C(1, 0) * std::conj(I)).imag();
  CHECK(oracle == -1.0);
  CHECK(d.alternating_matrix()(0, 1) == doctest::Approx(oracle).epsilon(1e-14));
  CHECK(d.integral_alternating_matrix()(1, 0) == 1);

  CMat half(1, 1);
  half << 0.5;
  CHECK(code_of([&] { validate_datum(a, half, CVec(CVec::Ones(2))); }) == ErrorCode::NonIntegralE);

  CMat g2h(2, 2);
  g2h << 1.0, C(0, 0.3), C(0, 0.3), 0.5;
  CHECK(code_of([&] { validate_datum(rect_torus_g2(), g2h, CVec(CVec::Ones(4))); }) == ErrorCode::NotHermitian);

  CMat one(1, 1);
  one << 1.0;
  CVec chi(2);
  chi << 1.0, 1.2;
  CHECK(code_of([&] { validate_datum(a, one, chi); }) == ErrorCode::SemicharacterInconsistent);
  CHECK(code_of([&] { validate_datum(a, one, CVec(CVec::Ones(3))); }) == ErrorCode::ShapeMismatch);
}

TEST_CASE("characters extend as semicharacters") {
  std::mt19937_64 rng(21);
  for (const auto& d : {principal_g1_twisted(), principal_g2()}) {
    const auto e = d.alternating_matrix();
    for (int trial = 0; trial < 50; ++trial) {
      const IVector n = random_lattice(rng, d.torus().real_dim(), 3);
      const IVector m = random_lattice(rng, d.torus().real_dim(), 3);
      const double e_nm = n.cast<double>().transpose() * e * m.cast<double>();
      const C lhs = d.character(IVector(n + m));
      const C rhs = d.character(n) * d.character(m) * std::polar(1.0, M_PI * e_nm);
      CHECK(std::abs(lhs - rhs) < 1e-12);
    }
  }
}

TEST_CASE("factor of automorphy") {
  std::mt19937_64 rng(7);
  const auto triv = AHDatum<double>::trivial(rect_torus_g2());
  CHECK(std::abs(factor_of_automorphy(triv, random_lattice(rng, 4), random_lift(rng, triv.torus())) - 1.0) < 1e-15);

  for (const auto& d : {principal_g1(), principal_g1_twisted(), principal_g2()}) {
    const auto& a = d.torus();
    double worst = 0, modulus = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const IVector n = random_lattice(rng, a.real_dim());
      const IVector m = random_lattice(rng, a.real_dim());
      const CVec z = random_lift(rng, a);
      const CVec mu = a.lift_of(m.cast<double>());
      const C lhs = factor_of_automorphy(d, IVector(n + m), z);
      const C rhs = factor_of_automorphy(d, n, CVec(z + mu)) * factor_of_automorphy(d, m, z);
      worst = std::max(worst, rel(lhs, rhs));

      const CVec lambda = a.lift_of(n.cast<double>());
      const double scale = std::exp(-(M_PI / 2) * d.hermitian(lambda, lambda).real() - M_PI * d.hermitian(z, lambda).real());
      modulus = std::max(modulus, std::abs(std::abs(factor_of_automorphy(d, n, z)) * scale - 1.0));
    }
    CHECK(worst <= 1e-9);
    CHECK(modulus <= 1e-12);
  }

  const auto d = principal_g1();
  CHECK(code_of([&] { factor_of_automorphy(d, CVec(CVec::Constant(1, C(0.5, 0))), CVec(CVec::Zero(1))); }) ==
        ErrorCode::NotLatticeVector);
  CHECK_NOTHROW(factor_of_automorphy(d, CVec(CVec::Constant(1, C(1, -2))), CVec(CVec::Zero(1))));
}

TEST_CASE("dual and tensor") {
  const auto d = principal_g1_twisted();
  const auto triv = AHDatum<double>::trivial(d.torus());
  CHECK(same_datum(dual(triv), triv));
  CHECK(same_datum(dual(dual(d)), d));
  CHECK((dual(d).alternating_matrix() + d.alternating_matrix()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(same_datum(tensor(d, dual(d)), triv));
  CHECK(same_datum(tensor(d, triv), d));
  const auto dd = tensor(d, d);
  CHECK((dd.alternating_matrix() - 2 * d.alternating_matrix()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK_THROWS_AS(tensor(d, principal_g2()), Error);
}

TEST_CASE("pullback along homomorphisms") {
  std::mt19937_64 rng(13);
  const auto d = principal_g1_twisted();
  const auto& a = d.torus();
  CHECK(same_datum(pullback(TorusHomomorphism<double>::identity(a), d), d));

  // Cocycle comparison: the raw pullback factor differs from the pulled-back
  // datum's factor by the coboundary of pullback_frame_log.
  for (int trial = 0; trial < 30; ++trial) {
    const auto f = TorusHomomorphism<double>::translation(a, random_lift(rng, a));
    const auto dp = pullback(f, d);
    const IVector n = random_lattice(rng, 2);
    const CVec z = random_lift(rng, a);
    const CVec lambda = a.lift_of(n.cast<double>());
    const C raw = factor_of_automorphy(d, f.lattice_map() * n, f(z));
    const C frame = std::exp(pullback_frame_log(f, d, CVec(z + lambda)) - pullback_frame_log(f, d, z));
    CHECK(rel(raw * frame, factor_of_automorphy(dp, n, z)) <= 1e-9);
  }

  // Functoriality on the family tower: slice ∘ translation.
  for (int trial = 0; trial < 10; ++trial) {
    const auto fam = build_family(d);
    const auto g = TorusHomomorphism<double>::translation(a, random_lift(rng, a));
    const auto f = TorusHomomorphism<double>::slice_at(a, random_lift(rng, a));
    CHECK(same_datum(pullback(compose(f, g), fam), pullback(g, pullback(f, fam))));
    const auto s = TorusHomomorphism<double>::section_at(a, random_lift(rng, a));
    CHECK(same_datum(pullback(compose(s, g), fam), pullback(g, pullback(s, fam))));
  }

  // Multiplication by 2 preserves the lattice; H scales by 4.
  CMat two(1, 1);
  two << 2.0;
  const auto mult = TorusHomomorphism<double>::validate(a, a, two, CVec(CVec::Zero(1)));
  CHECK(std::abs(pullback(mult, d).hermitian_matrix()(0, 0) - 4.0) < 1e-14);

  CMat third(1, 1);
  third << 1.0 / 3.0;
  CHECK(code_of([&] { TorusHomomorphism<double>::validate(a, a, third, CVec(CVec::Zero(1))); }) ==
        ErrorCode::LatticeNotPreserved);
}

TEST_CASE("family datum and its slices") {
  std::mt19937_64 rng(17);
  for (const auto& d : {principal_g1_twisted(), principal_g2()}) {
    const auto& a = d.torus();
    const int g = a.genus();
    const auto fam = build_family(d);
    for (int trial = 0; trial < 20; ++trial) {
      CVec u(2 * g), v(2 * g);
      for (int j = 0; j < 2 * g; ++j) {
        u(j) = C(uniform(rng, -1, 1), uniform(rng, -1, 1));
        v(j) = C(uniform(rng, -1, 1), uniform(rng, -1, 1));
      }
      // Oracle: H_𝓛((u₁,u₂),(v₁,v₂)) = H(u₁+u₂, v₁+v₂) − H(u₁, v₁).
      const C oracle = d.hermitian(CVec(u.head(g) + u.tail(g)), CVec(v.head(g) + v.tail(g))) -
                       d.hermitian(CVec(u.head(g)), CVec(v.head(g)));
      CHECK(std::abs(fam.hermitian(u, v) - oracle) < 1e-13);
    }

    CHECK(same_datum(restrict_slice(fam, TorusPoint<double>::origin(a)), AHDatum<double>::trivial(a)));

    for (int trial = 0; trial < 5; ++trial) {
      const TorusPoint<double> x(a, random_lift(rng, a));
      const auto slice = restrict_slice(fam, x);
      CHECK(slice.hermitian_matrix().cwiseAbs().maxCoeff() <= 1e-12);
      CHECK(is_topologically_trivial(slice));
      for (int j = 0; j < a.real_dim(); ++j) {
        const C expected = std::polar(1.0, 2 * M_PI * d.alternating(x.lift(), a.generator(j)));
        CHECK(std::abs(slice.generator_characters()(j) - expected) < 1e-12);
      }
      // Cocycle comparison against the family factor restricted to A × {x}.
      const auto f = TorusHomomorphism<double>::slice_at(a, x.lift());
      const IVector n = random_lattice(rng, a.real_dim());
      const CVec z = random_lift(rng, a);
      const CVec lambda = a.lift_of(n.cast<double>());
      const C raw = factor_of_automorphy(fam, f.lattice_map() * n, f(z));
      const C frame = std::exp(pullback_frame_log(f, fam, CVec(z + lambda)) - pullback_frame_log(f, fam, z));
      CHECK(rel(raw * frame, factor_of_automorphy(slice, n, z)) <= 1e-9);
    }
  }
  CHECK_FALSE(is_topologically_trivial(principal_g1()));
  CHECK_THROWS_AS(restrict_slice(principal_g1(), TorusPoint<double>::origin(square_torus())), Error);
}
