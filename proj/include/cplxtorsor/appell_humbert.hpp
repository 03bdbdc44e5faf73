#pragma once

#include <cmath>
#include <string>

#include "cplxtorsor/torus.hpp"
#include "cplxtorsor/types.hpp"

namespace cplxtorsor {

namespace detail {
template <typename Scalar>
constexpr Scalar hermitian_tol() {
  return Scalar(1e-12);
}
template <typename Scalar>
constexpr Scalar integrality_tol() {
  return Scalar(1e-8);
}
template <typename Scalar>
constexpr Scalar unit_tol() {
  return Scalar(1e-12);
}
template <typename Scalar>
constexpr Scalar lattice_tol() {
  return Scalar(1e-9);
}

template <typename Scalar>
IVector integral_coords(const RVector<Scalar>& t, Scalar tol, ErrorCode code, const char* what) {
  IVector n(t.size());
  for (Eigen::Index a = 0; a < t.size(); ++a) {
    const Scalar r = std::round(t(a));
    if (!(std::abs(t(a) - r) <= tol)) {
      throw Error(code, std::string(what) + ": lattice coordinate " + std::to_string(static_cast<double>(t(a))) +
                            " is not an integer");
    }
    n(a) = static_cast<long>(r);
  }
  return n;
}
}  // namespace detail

/// Appell–Humbert datum (H, χ) of a holomorphic line bundle on a torus.
///
/// H is hermitian, linear in the first slot: H(u, v) = uᵀ H v̄.  E = Im H
/// must be integral on lattice pairs.  χ is stored by its values on the 2g
/// generators and extended to all of Λ by
///   χ(Σ n_j λ_j) = Π χ(λ_j)^{n_j} · exp(iπ Σ_{j<k} n_j n_k E(λ_j, λ_k)),
/// which is the unique semicharacter for E with those generator values.
template <typename Scalar = double>
class AHDatum {
 public:
  using Complex = std::complex<Scalar>;
  using CVec = CVector<Scalar>;
  using CMat = CMatrix<Scalar>;

  static AHDatum validate(const ComplexTorus<Scalar>& torus, const CMat& h, const CVec& chi) {
    const int g = torus.genus();
    if (h.rows() != g || h.cols() != g || chi.size() != 2 * g) {
      throw Error(ErrorCode::ShapeMismatch, "datum shapes do not match genus " + std::to_string(g));
    }
    const Scalar herm_err = (h - h.adjoint()).cwiseAbs().maxCoeff();
    if (!(herm_err <= detail::hermitian_tol<Scalar>())) {
      throw Error(ErrorCode::NotHermitian, "H - H* has entry of size " + std::to_string(static_cast<double>(herm_err)));
    }
    AHDatum d(torus, h, chi);
    const RMatrix<Scalar> e = d.alternating_matrix();
    for (int j = 0; j < 2 * g; ++j) {
      for (int k = 0; k < 2 * g; ++k) {
        if (!(std::abs(e(j, k) - std::round(e(j, k))) <= detail::integrality_tol<Scalar>())) {
          throw Error(ErrorCode::NonIntegralE, "E(λ_" + std::to_string(j + 1) + ", λ_" + std::to_string(k + 1) +
                                                   ") = " + std::to_string(static_cast<double>(e(j, k))));
        }
      }
    }
    for (int j = 0; j < 2 * g; ++j) {
      if (!(std::abs(std::abs(chi(j)) - Scalar(1)) <= detail::unit_tol<Scalar>())) {
        throw Error(ErrorCode::SemicharacterInconsistent,
                    "|χ(λ_" + std::to_string(j + 1) + ")| = " + std::to_string(static_cast<double>(std::abs(chi(j)))));
      }
    }
    // Extending around each generator pair in both orders must agree.
    for (int j = 0; j < 2 * g; ++j) {
      for (int k = j + 1; k < 2 * g; ++k) {
        const Complex one_way = chi(j) * chi(k) * std::polar(Scalar(1), pi<Scalar>() * e(j, k));
        const Complex other_way = chi(k) * chi(j) * std::polar(Scalar(1), pi<Scalar>() * e(k, j));
        if (!(std::abs(one_way - other_way) <= detail::lattice_tol<Scalar>())) {
          throw Error(ErrorCode::SemicharacterInconsistent,
                      "χ(λ_" + std::to_string(j + 1) + " + λ_" + std::to_string(k + 1) + ") is order dependent");
        }
      }
    }
    return d;
  }

  static AHDatum trivial(const ComplexTorus<Scalar>& torus) {
    const int g = torus.genus();
    return AHDatum(torus, CMat::Zero(g, g), CVec::Ones(2 * g));
  }

  const ComplexTorus<Scalar>& torus() const { return torus_; }
  int genus() const { return torus_.genus(); }
  const CMat& hermitian_matrix() const { return h_; }
  const CVec& generator_characters() const { return chi_; }

  Complex hermitian(const CVec& u, const CVec& v) const { return u.transpose() * h_ * v.conjugate(); }
  Scalar alternating(const CVec& u, const CVec& v) const { return hermitian(u, v).imag(); }

  /// E(λ_j, λ_k) on generator pairs.
  RMatrix<Scalar> alternating_matrix() const {
    const CMat& p = torus_.period_matrix();
    return (p.transpose() * h_ * p.conjugate()).imag();
  }

  IMatrix integral_alternating_matrix() const {
    return alternating_matrix().array().round().template cast<long>().matrix();
  }

  /// χ at the lattice vector with integer coordinates n.
  Complex character(const IVector& n) const {
    const IMatrix e = integral_alternating_matrix();
    Scalar phase = 0;
    for (Eigen::Index j = 0; j < n.size(); ++j) phase += Scalar(n(j)) * std::arg(chi_(j));
    long parity = 0;
    for (Eigen::Index j = 0; j < n.size(); ++j)
      for (Eigen::Index k = j + 1; k < n.size(); ++k) parity += n(j) * n(k) * e(j, k);
    const Scalar sign = (parity % 2 == 0) ? Scalar(1) : Scalar(-1);
    return sign * std::polar(Scalar(1), phase);
  }

  /// Lattice coordinates of λ, or NotLatticeVector.
  IVector lattice_vector_coords(const CVec& lambda) const {
    return detail::integral_coords<Scalar>(torus_.lattice_coords(lambda), detail::lattice_tol<Scalar>(),
                                           ErrorCode::NotLatticeVector, "factor_of_automorphy");
  }

 private:
  AHDatum(ComplexTorus<Scalar> torus, CMat h, CVec chi) : torus_(std::move(torus)), h_(std::move(h)), chi_(std::move(chi)) {}

  ComplexTorus<Scalar> torus_;
  CMat h_;
  CVec chi_;
};

template <typename Scalar>
AHDatum<Scalar> validate_datum(const ComplexTorus<Scalar>& torus, const CMatrix<Scalar>& h, const CVector<Scalar>& chi) {
  return AHDatum<Scalar>::validate(torus, h, chi);
}

/// a(λ, z) = χ(λ) exp(π H(z, λ) + (π/2) H(λ, λ)), λ given by lattice coordinates.
template <typename Scalar>
Complex<Scalar> factor_of_automorphy(const AHDatum<Scalar>& d, const IVector& n, const CVector<Scalar>& z) {
  const CVector<Scalar> lambda = d.torus().lift_of(n.cast<Scalar>());
  const Complex<Scalar> exponent =
      pi<Scalar>() * d.hermitian(z, lambda) + (pi<Scalar>() / Scalar(2)) * d.hermitian(lambda, lambda);
  return d.character(n) * std::exp(exponent);
}

template <typename Scalar>
Complex<Scalar> factor_of_automorphy(const AHDatum<Scalar>& d, const CVector<Scalar>& lambda, const CVector<Scalar>& z) {
  return factor_of_automorphy(d, d.lattice_vector_coords(lambda), z);
}

template <typename Scalar>
AHDatum<Scalar> dual(const AHDatum<Scalar>& d) {
  return AHDatum<Scalar>::validate(d.torus(), -d.hermitian_matrix(), d.generator_characters().conjugate());
}

template <typename Scalar>
AHDatum<Scalar> tensor(const AHDatum<Scalar>& a, const AHDatum<Scalar>& b) {
  if (a.torus() != b.torus()) throw Error(ErrorCode::TorusMismatch, "tensor: data on different tori");
  return AHDatum<Scalar>::validate(a.torus(), a.hermitian_matrix() + b.hermitian_matrix(),
                                   a.generator_characters().cwiseProduct(b.generator_characters()));
}

/// Fieldwise comparison; characters are compared as phases on generators.
template <typename Scalar>
bool same_datum(const AHDatum<Scalar>& a, const AHDatum<Scalar>& b, Scalar tol = Scalar(1e-10)) {
  if (a.torus() != b.torus()) return false;
  if (!((a.hermitian_matrix() - b.hermitian_matrix()).cwiseAbs().maxCoeff() <= tol)) return false;
  const CVector<Scalar> ratio = a.generator_characters().cwiseQuotient(b.generator_characters());
  return (ratio.array() - Complex<Scalar>(1)).abs().maxCoeff() <= tol;
}

/// E = 0 (and hence, for our representation, H = 0): the bundle is
/// topologically trivial and carries holomorphic connections.
template <typename Scalar>
bool is_topologically_trivial(const AHDatum<Scalar>& d) {
  const bool e_zero = d.alternating_matrix().cwiseAbs().maxCoeff() < Scalar(0.5);
  const bool h_zero = d.hermitian_matrix().cwiseAbs().maxCoeff() <= Scalar(1e-10);
  return e_zero && h_zero;
}

/// Affine map of tori z ↦ M z + t with M Λ_source ⊂ Λ_target.
template <typename Scalar = double>
class TorusHomomorphism {
 public:
  using CVec = CVector<Scalar>;
  using CMat = CMatrix<Scalar>;

  static TorusHomomorphism validate(const ComplexTorus<Scalar>& source, const ComplexTorus<Scalar>& target,
                                    const CMat& m, const CVec& t) {
    if (m.rows() != target.genus() || m.cols() != source.genus() || t.size() != target.genus()) {
      throw Error(ErrorCode::ShapeMismatch, "homomorphism shapes do not match the tori");
    }
    IMatrix images(target.real_dim(), source.real_dim());
    for (int j = 0; j < source.real_dim(); ++j) {
      images.col(j) = detail::integral_coords<Scalar>(target.lattice_coords(m * source.generator(j)),
                                                      detail::lattice_tol<Scalar>(), ErrorCode::LatticeNotPreserved,
                                                      "homomorphism");
    }
    return TorusHomomorphism(source, target, m, t, images);
  }

  static TorusHomomorphism identity(const ComplexTorus<Scalar>& a) {
    return validate(a, a, CMat::Identity(a.genus(), a.genus()), CVec::Zero(a.genus()));
  }

  static TorusHomomorphism translation(const ComplexTorus<Scalar>& a, const CVec& by) {
    return validate(a, a, CMat::Identity(a.genus(), a.genus()), by);
  }

  /// α : A × A → A, (z, w) ↦ z + w.
  static TorusHomomorphism addition(const ComplexTorus<Scalar>& a) {
    const int g = a.genus();
    CMat m(g, 2 * g);
    m << CMat::Identity(g, g), CMat::Identity(g, g);
    return validate(product_torus(a, a), a, m, CVec::Zero(g));
  }

  /// p_i : A × A → A for i = 1, 2.
  static TorusHomomorphism projection(const ComplexTorus<Scalar>& a, int which) {
    const int g = a.genus();
    CMat m = CMat::Zero(g, 2 * g);
    m.block(0, which == 1 ? 0 : g, g, g) = CMat::Identity(g, g);
    return validate(product_torus(a, a), a, m, CVec::Zero(g));
  }

  /// f_y : A → A × A, x ↦ (y, x), a section of p_2.
  static TorusHomomorphism section_at(const ComplexTorus<Scalar>& a, const CVec& y) {
    const int g = a.genus();
    CMat m = CMat::Zero(2 * g, g);
    m.bottomRows(g) = CMat::Identity(g, g);
    CVec t = CVec::Zero(2 * g);
    t.head(g) = y;
    return validate(a, product_torus(a, a), m, t);
  }

  /// z ↦ (z, x): inclusion of the fibre A × {x} of p_2.
  static TorusHomomorphism slice_at(const ComplexTorus<Scalar>& a, const CVec& x) {
    const int g = a.genus();
    CMat m = CMat::Zero(2 * g, g);
    m.topRows(g) = CMat::Identity(g, g);
    CVec t = CVec::Zero(2 * g);
    t.tail(g) = x;
    return validate(a, product_torus(a, a), m, t);
  }

  const ComplexTorus<Scalar>& source() const { return source_; }
  const ComplexTorus<Scalar>& target() const { return target_; }
  const CMat& linear() const { return m_; }
  const CVec& translation_part() const { return t_; }
  /// Column j: target lattice coordinates of M λ_j.
  const IMatrix& lattice_map() const { return images_; }

  CVec operator()(const CVec& z) const { return m_ * z + t_; }

 private:
  TorusHomomorphism(ComplexTorus<Scalar> s, ComplexTorus<Scalar> tg, CMat m, CVec t, IMatrix images)
      : source_(std::move(s)), target_(std::move(tg)), m_(std::move(m)), t_(std::move(t)), images_(std::move(images)) {}

  ComplexTorus<Scalar> source_;
  ComplexTorus<Scalar> target_;
  CMat m_;
  CVec t_;
  IMatrix images_;
};

/// f ∘ g.
template <typename Scalar>
TorusHomomorphism<Scalar> compose(const TorusHomomorphism<Scalar>& f, const TorusHomomorphism<Scalar>& g) {
  if (g.target() != f.source()) throw Error(ErrorCode::TorusMismatch, "compose: g's target is not f's source");
  return TorusHomomorphism<Scalar>::validate(g.source(), f.target(), f.linear() * g.linear(),
                                             f.linear() * g.translation_part() + f.translation_part());
}

/// log of the frame change relating the pulled-back automorphy frame to the
/// Appell–Humbert frame of the pulled-back datum: with h = exp(this),
///   a(Mλ, Mz + t) · h(z + λ) / h(z) = a_pull(λ, z).
template <typename Scalar>
Complex<Scalar> pullback_frame_log(const TorusHomomorphism<Scalar>& f, const AHDatum<Scalar>& d,
                                   const CVector<Scalar>& z) {
  return -pi<Scalar>() * d.hermitian(f.linear() * z, f.translation_part());
}

/// f*D: H'(u, v) = H(Mu, Mv), χ'(λ) = χ(Mλ) · exp(2πi E(t, Mλ)).
///
/// The translation part makes the raw pullback factor a(Mλ, Mz + t)
/// non-unitary; the phase above is what remains after removing the
/// coboundary of pullback_frame_log.
template <typename Scalar>
AHDatum<Scalar> pullback(const TorusHomomorphism<Scalar>& f, const AHDatum<Scalar>& d) {
  if (f.target() != d.torus()) throw Error(ErrorCode::TorusMismatch, "pullback: datum is not on the map's target");
  const CMatrix<Scalar>& m = f.linear();
  const CMatrix<Scalar> h = m.transpose() * d.hermitian_matrix() * m.conjugate();
  const ComplexTorus<Scalar>& src = f.source();
  CVector<Scalar> chi(src.real_dim());
  for (int j = 0; j < src.real_dim(); ++j) {
    const CVector<Scalar> image = m * src.generator(j);
    const Scalar e = d.alternating(f.translation_part(), image);
    chi(j) = d.character(f.lattice_map().col(j)) * std::polar(Scalar(1), Scalar(2) * pi<Scalar>() * e);
  }
  return AHDatum<Scalar>::validate(src, h, chi);
}

/// Datum of 𝓛 = p_1^* L^* ⊗ α^* L on A × A.
template <typename Scalar>
AHDatum<Scalar> build_family(const AHDatum<Scalar>& d) {
  const auto& a = d.torus();
  return tensor(pullback(TorusHomomorphism<Scalar>::projection(a, 1), dual(d)),
                pullback(TorusHomomorphism<Scalar>::addition(a), d));
}

/// Datum of the slice 𝓛^x = 𝓛|_{A × {x}}, pulled back along z ↦ (z, x̃)
/// where x̃ is the lift carried by x.
template <typename Scalar>
AHDatum<Scalar> restrict_slice(const AHDatum<Scalar>& family, const TorusPoint<Scalar>& x) {
  const auto& a = x.torus();
  if (family.torus() != product_torus(a, a)) {
    throw Error(ErrorCode::TorusMismatch, "restrict_slice: family datum is not on A x A for the point's torus");
  }
  return pullback(TorusHomomorphism<Scalar>::slice_at(a, x.lift()), family);
}

}  // namespace cplxtorsor
