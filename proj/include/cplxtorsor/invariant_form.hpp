#pragma once

#include <string>

#include "cplxtorsor/torus.hpp"
#include "cplxtorsor/types.hpp"

namespace cplxtorsor {

/// A translation-invariant form of bidegree (p, q), p + q <= 2, with
/// constant coefficients in the flat coordinates z_1..z_g.
///
/// Coefficient layout:
///   (0,0)        1 x 1
///   (1,0)/(0,1)  g x 1, Σ c_j dz_j  resp.  Σ c_j dz̄_j
///   (1,1)        g x g, Σ c_jk dz_j ∧ dz̄_k
///   (2,0)/(0,2)  g x g antisymmetric, Σ c_jk dz_j ∧ dz_k  resp. with dz̄
///
/// A (1,1)-form is also read as a (0,1)-form with values in the invariant
/// (1,0)-forms: entry (j, k) is the dz_j-component of its value on ∂/∂z̄_k.
template <typename Scalar = double>
class InvariantForm {
 public:
  using Complex = std::complex<Scalar>;
  using CVec = CVector<Scalar>;
  using CMat = CMatrix<Scalar>;

  InvariantForm(int p, int q, CMat coeffs) : p_(p), q_(q), coeffs_(std::move(coeffs)) {
    if (p < 0 || q < 0 || p + q > 2) {
      throw Error(ErrorCode::ShapeMismatch, "bidegree out of range");
    }
    const Eigen::Index rows = coeffs_.rows();
    const Eigen::Index cols = coeffs_.cols();
    const bool ok = (p + q == 0)   ? (rows == 1 && cols == 1)
                    : (p + q == 1) ? (cols == 1 && rows >= 1)
                                   : (rows == cols && rows >= 1);
    if (!ok) throw Error(ErrorCode::ShapeMismatch, "coefficient shape does not match bidegree");
    if ((p == 2 || q == 2) && !(coeffs_ + coeffs_.transpose()).isZero(Scalar(1e-12))) {
      throw Error(ErrorCode::ShapeMismatch, "(2,0)/(0,2) coefficients must be antisymmetric");
    }
  }

  static InvariantForm zero(int genus, int p, int q) {
    const Eigen::Index rows = p + q == 0 ? 1 : genus;
    const Eigen::Index cols = p + q == 2 ? genus : 1;
    return InvariantForm(p, q, CMat::Zero(rows, cols));
  }

  int p() const { return p_; }
  int q() const { return q_; }
  int degree() const { return p_ + q_; }
  int genus() const { return static_cast<int>(coeffs_.rows()); }
  const CMat& coefficients() const { return coeffs_; }

  /// Value of a 1-form on a real tangent vector u ∈ C^g.
  Complex evaluate(const CVec& u) const {
    if (degree() != 1) throw Error(ErrorCode::ShapeMismatch, "evaluate(u) needs a 1-form");
    const CVec c = coeffs_.col(0);
    return p_ == 1 ? c.transpose() * u : c.transpose() * u.conjugate();
  }

  /// Value of a 2-form on an ordered pair of real tangent vectors.
  Complex evaluate(const CVec& u, const CVec& v) const {
    if (degree() != 2) throw Error(ErrorCode::ShapeMismatch, "evaluate(u, v) needs a 2-form");
    if (p_ == 1) {
      // dz_j ∧ dz̄_k (u, v) = u_j v̄_k - v_j ū_k
      const Complex uv = u.transpose() * coeffs_ * v.conjugate();
      const Complex vu = v.transpose() * coeffs_ * u.conjugate();
      return uv - vu;
    }
    const CVec a = p_ == 2 ? u : CVec(u.conjugate());
    const CVec b = p_ == 2 ? v : CVec(v.conjugate());
    const Complex ab = a.transpose() * coeffs_ * b;
    const Complex ba = b.transpose() * coeffs_ * a;
    return ab - ba;
  }

  /// Pullback along the complex-linear map u ↦ M u.
  InvariantForm pullback(const CMat& m) const {
    if (m.rows() != genus() && degree() > 0) {
      throw Error(ErrorCode::ShapeMismatch, "pullback: map target dimension differs from form genus");
    }
    switch (p_ * 3 + q_) {
      case 0: return *this;
      case 3: return InvariantForm(1, 0, m.transpose() * coeffs_);
      case 1: return InvariantForm(0, 1, m.adjoint() * coeffs_);
      case 4: return InvariantForm(1, 1, m.transpose() * coeffs_ * m.conjugate());
      case 6: return InvariantForm(2, 0, m.transpose() * coeffs_ * m);
      default: return InvariantForm(0, 2, m.adjoint() * coeffs_ * m.conjugate());
    }
  }

  InvariantForm operator+(const InvariantForm& o) const {
    check_compatible(o);
    return InvariantForm(p_, q_, coeffs_ + o.coeffs_);
  }
  InvariantForm operator-(const InvariantForm& o) const {
    check_compatible(o);
    return InvariantForm(p_, q_, coeffs_ - o.coeffs_);
  }
  InvariantForm operator*(const Complex& s) const { return InvariantForm(p_, q_, coeffs_ * s); }

 private:
  void check_compatible(const InvariantForm& o) const {
    if (p_ != o.p_ || q_ != o.q_ || coeffs_.rows() != o.coeffs_.rows()) {
      throw Error(ErrorCode::ShapeMismatch, "forms of different type");
    }
  }

  int p_;
  int q_;
  CMat coeffs_;
};

/// Pairing of an invariant 2-form with the 2-cycle spanned by the lattice
/// generators λ_j, λ_k (zero-based).  For constant forms this is the form
/// evaluated on (λ_j, λ_k).
template <typename Scalar>
Complex<Scalar> cycle_integral(const InvariantForm<Scalar>& omega, const ComplexTorus<Scalar>& torus, int j,
                               int k) {
  const int n = torus.real_dim();
  if (j < 0 || j >= n || k < 0 || k >= n) {
    throw Error(ErrorCode::IndexOutOfRange,
                "cycle index (" + std::to_string(j) + ", " + std::to_string(k) + ") outside 0.." +
                    std::to_string(n - 1));
  }
  if (omega.degree() != 2) throw Error(ErrorCode::ShapeMismatch, "cycle_integral needs a 2-form");
  if (omega.genus() != torus.genus()) throw Error(ErrorCode::TorusMismatch, "form genus differs from torus");
  return omega.evaluate(torus.generator(j), torus.generator(k));
}

/// All pairings ∫_{λ_j ∧ λ_k} ω as a 2g x 2g matrix.
template <typename Scalar>
CMatrix<Scalar> cycle_integral_matrix(const InvariantForm<Scalar>& omega, const ComplexTorus<Scalar>& torus) {
  const int n = torus.real_dim();
  CMatrix<Scalar> out(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) out(j, k) = cycle_integral(omega, torus, j, k);
  return out;
}

}  // namespace cplxtorsor
