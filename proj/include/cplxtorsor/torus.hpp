#pragma once

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "cplxtorsor/types.hpp"

namespace cplxtorsor {

/// A compact complex torus C^g / Λ.  The lattice Λ is spanned by the 2g
/// columns of the period matrix Π.  Points are handled through lattice
/// coordinates t ∈ R^{2g}, z = Π t, which turn the torus into the unit cube
/// with periodic identifications.
template <typename Scalar = double>
class ComplexTorus {
 public:
  using Complex = std::complex<Scalar>;
  using CVec = CVector<Scalar>;
  using CMat = CMatrix<Scalar>;
  using RVec = RVector<Scalar>;
  using RMat = RMatrix<Scalar>;

  static constexpr Scalar default_kappa_max() { return Scalar(1e8); }

  /// Throws DegenerateLattice unless the periods are R-linearly independent
  /// with condition number at most `kappa_max`.
  static ComplexTorus validate(const CMat& period, Scalar kappa_max = default_kappa_max()) {
    const Eigen::Index g = period.rows();
    if (g < 1 || period.cols() != 2 * g) {
      throw Error(ErrorCode::DegenerateLattice,
                  "period matrix must be g x 2g, got " + std::to_string(period.rows()) + " x " +
                      std::to_string(period.cols()));
    }
    RMat real(2 * g, 2 * g);
    real.topRows(g) = period.real();
    real.bottomRows(g) = period.imag();
    if (!real.allFinite()) throw Error(ErrorCode::DegenerateLattice, "non-finite period entries");

    Eigen::JacobiSVD<RMat> svd(real);
    const auto& sv = svd.singularValues();
    const Scalar smax = sv(0);
    const Scalar smin = sv(sv.size() - 1);
    const Scalar kappa = smin > Scalar(0) ? smax / smin : std::numeric_limits<Scalar>::infinity();
    if (!(smax > Scalar(0)) || !(kappa <= kappa_max)) {
      throw Error(ErrorCode::DegenerateLattice,
                  "periods are not R-independent within condition bound (kappa = " +
                      std::to_string(static_cast<double>(kappa)) + ")");
    }
    return ComplexTorus(period, real, kappa);
  }

  int genus() const { return static_cast<int>(period_.rows()); }
  int real_dim() const { return static_cast<int>(period_.cols()); }

  const CMat& period_matrix() const { return period_; }
  CVec generator(int j) const { return period_.col(j); }
  Scalar condition_number() const { return kappa_; }

  /// Stacked (Re Π; Im Π), mapping lattice coordinates to (x; y).
  const RMat& real_period_matrix() const { return real_; }

  RVec lattice_coords(const CVec& z) const {
    const Eigen::Index g = genus();
    RVec xy(2 * g);
    xy.head(g) = z.real();
    xy.tail(g) = z.imag();
    return real_inverse_ * xy;
  }

  CVec lift_of(const RVec& t) const { return period_ * t.template cast<Complex>(); }

  /// ∂t_a/∂z̄_k: converts lattice-coordinate derivatives into ∂/∂z̄.
  const CMat& dbar_weights() const { return dbar_weights_; }

  /// ∂t_a/∂z_k, the holomorphic counterpart.
  const CMat& del_weights() const { return del_weights_; }

  friend bool operator==(const ComplexTorus& a, const ComplexTorus& b) {
    return a.period_.rows() == b.period_.rows() && a.period_.cols() == b.period_.cols() &&
           a.period_ == b.period_;
  }
  friend bool operator!=(const ComplexTorus& a, const ComplexTorus& b) { return !(a == b); }

 private:
  ComplexTorus(const CMat& period, const RMat& real, Scalar kappa)
      : period_(period), real_(real), real_inverse_(real.fullPivLu().inverse()), kappa_(kappa) {
    const Eigen::Index g = period.rows();
    dbar_weights_.resize(2 * g, g);
    del_weights_.resize(2 * g, g);
    const Complex i(0, 1);
    for (Eigen::Index a = 0; a < 2 * g; ++a) {
      for (Eigen::Index k = 0; k < g; ++k) {
        // x_k = Re z_k, y_k = Im z_k; ∂/∂z̄ = (∂x + i ∂y)/2, ∂/∂z = (∂x - i ∂y)/2.
        const Scalar dx = real_inverse_(a, k);
        const Scalar dy = real_inverse_(a, g + k);
        dbar_weights_(a, k) = Scalar(0.5) * (Complex(dx) + i * dy);
        del_weights_(a, k) = Scalar(0.5) * (Complex(dx) - i * dy);
      }
    }
  }

  CMat period_;
  RMat real_;
  RMat real_inverse_;
  CMat dbar_weights_;
  CMat del_weights_;
  Scalar kappa_;
};

template <typename Scalar>
ComplexTorus<Scalar> validate_torus(const CMatrix<Scalar>& period,
                                    Scalar kappa_max = ComplexTorus<Scalar>::default_kappa_max()) {
  return ComplexTorus<Scalar>::validate(period, kappa_max);
}

/// A × B with block-diagonal period matrix; coordinates are (z_A, z_B).
template <typename Scalar>
ComplexTorus<Scalar> product_torus(const ComplexTorus<Scalar>& a, const ComplexTorus<Scalar>& b) {
  const int ga = a.genus();
  const int gb = b.genus();
  CMatrix<Scalar> period = CMatrix<Scalar>::Zero(ga + gb, 2 * (ga + gb));
  period.block(0, 0, ga, 2 * ga) = a.period_matrix();
  period.block(ga, 2 * ga, gb, 2 * gb) = b.period_matrix();
  // Both factors already passed validation, so only an absurd bound could trip here.
  return ComplexTorus<Scalar>::validate(period, std::numeric_limits<Scalar>::max());
}

/// A point of the torus, carried by one of its lifts to C^g.  The lift is
/// kept as given; `reduce` picks the canonical representative.
template <typename Scalar = double>
class TorusPoint {
 public:
  using CVec = CVector<Scalar>;

  TorusPoint(ComplexTorus<Scalar> torus, CVec lift) : torus_(std::move(torus)), lift_(std::move(lift)) {
    if (lift_.size() != torus_.genus()) {
      throw Error(ErrorCode::ShapeMismatch, "lift dimension does not match torus genus");
    }
  }

  static TorusPoint origin(const ComplexTorus<Scalar>& torus) {
    return TorusPoint(torus, CVec::Zero(torus.genus()));
  }

  static TorusPoint from_lattice_coords(const ComplexTorus<Scalar>& torus, const RVector<Scalar>& t) {
    return TorusPoint(torus, torus.lift_of(t));
  }

  const ComplexTorus<Scalar>& torus() const { return torus_; }
  const CVec& lift() const { return lift_; }
  RVector<Scalar> lattice_coords() const { return torus_.lattice_coords(lift_); }

 private:
  ComplexTorus<Scalar> torus_;
  CVec lift_;
};

namespace detail {
// Canonical coordinates land in [0, 1 - kSnap]; anything already inside
// [-kAccept, 1 - kAccept] is left untouched, which makes reduce idempotent
// bit for bit despite the round trip through Π.
template <typename Scalar>
constexpr Scalar reduce_snap() {
  return Scalar(2e-13);
}
template <typename Scalar>
constexpr Scalar reduce_accept() {
  return Scalar(1e-13);
}
}  // namespace detail

template <typename Scalar>
TorusPoint<Scalar> reduce(const TorusPoint<Scalar>& p) {
  RVector<Scalar> t = p.lattice_coords();
  const Scalar accept = detail::reduce_accept<Scalar>();
  if (((t.array() >= -accept) && (t.array() <= Scalar(1) - accept)).all()) return p;
  for (Eigen::Index a = 0; a < t.size(); ++a) {
    Scalar frac = t(a) - std::floor(t(a));
    if (frac > Scalar(1) - detail::reduce_snap<Scalar>()) frac = Scalar(0);
    t(a) = frac;
  }
  return TorusPoint<Scalar>::from_lattice_coords(p.torus(), t);
}

template <typename Scalar>
TorusPoint<Scalar> add(const TorusPoint<Scalar>& p, const TorusPoint<Scalar>& q) {
  if (p.torus() != q.torus()) throw Error(ErrorCode::TorusMismatch, "add: points live on different tori");
  return reduce(TorusPoint<Scalar>(p.torus(), p.lift() + q.lift()));
}

template <typename Scalar>
TorusPoint<Scalar> negate(const TorusPoint<Scalar>& p) {
  return reduce(TorusPoint<Scalar>(p.torus(), -p.lift()));
}

/// Torus-point equality: the lattice coordinates of p - q are integers
/// within `tol`.
template <typename Scalar>
bool same_point(const TorusPoint<Scalar>& p, const TorusPoint<Scalar>& q, Scalar tol = Scalar(1e-9)) {
  if (p.torus() != q.torus()) return false;
  const RVector<Scalar> d = p.torus().lattice_coords(p.lift() - q.lift());
  for (Eigen::Index a = 0; a < d.size(); ++a) {
    if (std::abs(d(a) - std::round(d(a))) > tol) return false;
  }
  return true;
}

}  // namespace cplxtorsor
