#pragma once

#include <complex>
#include <random>

#include "cplxtorsor/cplxtorsor.hpp"

namespace testsupport {

using namespace cplxtorsor;
using C = std::complex<double>;
using CVec = CVector<double>;
using CMat = CMatrix<double>;
using RVec = RVector<double>;

inline const C I(0.0, 1.0);

/// Π = [1, i]
inline ComplexTorus<double> square_torus() {
  CMat p(1, 2);
  p << C(1, 0), I;
  return validate_torus(p);
}

/// Π = [I₂ | i·diag(1, 2)]
inline ComplexTorus<double> rect_torus_g2() {
  CMat p = CMat::Zero(2, 4);
  p(0, 0) = 1.0;
  p(1, 1) = 1.0;
  p(0, 2) = I;
  p(1, 3) = 2.0 * I;
  return validate_torus(p);
}

/// A sheared genus-1 lattice, to keep the chart transform honest.
inline ComplexTorus<double> skew_torus() {
  CMat p(1, 2);
  p << C(1, 0), C(0.3, 1.1);
  return validate_torus(p);
}

/// A genus-2 lattice with no block structure.
inline ComplexTorus<double> skew_torus_g2() {
  CMat p(2, 4);
  p << C(1, 0), C(0.2, 0), C(0.1, 0.9), C(0.3, 0.2),
       C(0, 0), C(1.1, 0), C(-0.2, 0.1), C(0.05, 1.3);
  return validate_torus(p);
}

inline AHDatum<double> principal_g1() {
  CMat h(1, 1);
  h << 1.0;
  return validate_datum(square_torus(), h, CVec(CVec::Ones(2)));
}

inline AHDatum<double> principal_g2() {
  CMat h = CMat::Zero(2, 2);
  h(0, 0) = 1.0;
  h(1, 1) = 0.5;
  return validate_datum(rect_torus_g2(), h, CVec(CVec::Ones(4)));
}

/// Same bundle with non-trivial characters, phases in turns.
inline AHDatum<double> principal_g1_twisted() {
  CMat h(1, 1);
  h << 1.0;
  CVec chi(2);
  chi << std::polar(1.0, 2 * M_PI * 0.17), std::polar(1.0, 2 * M_PI * 0.61);
  return validate_datum(square_torus(), h, chi);
}

inline double uniform(std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline CVec random_lift(std::mt19937_64& rng, const ComplexTorus<double>& torus, double spread = 1.0) {
  RVec t(torus.real_dim());
  for (int a = 0; a < t.size(); ++a) t(a) = uniform(rng, -spread, spread);
  return torus.lift_of(t);
}

inline IVector random_lattice(std::mt19937_64& rng, int n, long bound = 2) {
  IVector v(n);
  std::uniform_int_distribution<long> d(-bound, bound);
  for (int a = 0; a < n; ++a) v(a) = d(rng);
  return v;
}

inline double max_abs(const CMat& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace testsupport
