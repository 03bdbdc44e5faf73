#pragma once

#include <algorithm>

#include "cplxtorsor/appell_humbert.hpp"
#include "cplxtorsor/grid.hpp"
#include "cplxtorsor/invariant_form.hpp"
#include "cplxtorsor/torus.hpp"
#include "cplxtorsor/types.hpp"

namespace cplxtorsor {

/// A connection ∇ = d + θ on the line bundle of an Appell–Humbert datum,
/// written on the universal cover.  Sections are automorphic functions
/// s(z + λ) = a(λ, z) s(z), and θ is a (1,0)-form
///
///   θ(z) = A z̄ + c          (component j is the dz_j coefficient)
///
/// expressed in the frame exp(r·z) · e_AH, where e_AH is the automorphy
/// frame of the datum.  For the canonical connections r = 0; restrictions
/// to slices of a family keep the restricted family frame, which varies
/// holomorphically with the slice, and record the linear frame ratio in r.
///
/// Compatibility with the factor of automorphy reads
///   θ(z + λ) - θ(z) = -∂_z log a(λ, z) = -π H(dz, λ),
/// independently of r.
template <typename Scalar = double>
class ConnectionForm {
 public:
  using Complex = std::complex<Scalar>;
  using CVec = CVector<Scalar>;
  using CMat = CMatrix<Scalar>;

  ConnectionForm(AHDatum<Scalar> datum, CMat antiholomorphic, CVec constant, CVec frame_shift)
      : datum_(std::move(datum)),
        anti_(std::move(antiholomorphic)),
        constant_(std::move(constant)),
        frame_shift_(std::move(frame_shift)) {
    const int g = datum_.genus();
    if (anti_.rows() != g || anti_.cols() != g || constant_.size() != g || frame_shift_.size() != g) {
      throw Error(ErrorCode::ShapeMismatch, "connection coefficients do not match genus");
    }
  }

  const AHDatum<Scalar>& datum() const { return datum_; }
  const ComplexTorus<Scalar>& torus() const { return datum_.torus(); }
  int genus() const { return datum_.genus(); }

  const CMat& antiholomorphic_part() const { return anti_; }
  const CVec& constant_part() const { return constant_; }
  const CVec& frame_shift() const { return frame_shift_; }
  bool in_automorphy_frame() const { return frame_shift_.isZero(0); }

  CVec operator()(const CVec& z) const { return anti_ * z.conjugate() + constant_; }

 private:
  AHDatum<Scalar> datum_;
  CMat anti_;
  CVec constant_;
  CVec frame_shift_;
};

/// Chern connection of the metric |s|² exp(-π H(z, z)):  θ(z) = -π H(dz, z).
template <typename Scalar>
ConnectionForm<Scalar> canonical_connection(const AHDatum<Scalar>& d) {
  const int g = d.genus();
  return ConnectionForm<Scalar>(d, -pi<Scalar>() * d.hermitian_matrix(), CVector<Scalar>::Zero(g),
                                CVector<Scalar>::Zero(g));
}

/// Induced connection on the dual bundle: θ ↦ -θ.
template <typename Scalar>
ConnectionForm<Scalar> dual_connection(const ConnectionForm<Scalar>& theta) {
  return ConnectionForm<Scalar>(dual(theta.datum()), -theta.antiholomorphic_part(), -theta.constant_part(),
                                -theta.frame_shift());
}

template <typename Scalar>
ConnectionForm<Scalar> tensor_connection(const ConnectionForm<Scalar>& a, const ConnectionForm<Scalar>& b) {
  return ConnectionForm<Scalar>(tensor(a.datum(), b.datum()), a.antiholomorphic_part() + b.antiholomorphic_part(),
                                a.constant_part() + b.constant_part(), a.frame_shift() + b.frame_shift());
}

/// Raw pullback along f: θ'(z) = Mᵀ θ(M z + t), kept in the pulled-back
/// frame.  The datum is f*D; the frame ratio to its automorphy frame is
/// exp(π H(Mz, t)), see pullback_frame_log.
template <typename Scalar>
ConnectionForm<Scalar> restrict_along(const TorusHomomorphism<Scalar>& f, const ConnectionForm<Scalar>& theta) {
  const CMatrix<Scalar>& m = f.linear();
  const CVector<Scalar>& t = f.translation_part();
  const CMatrix<Scalar>& a = theta.antiholomorphic_part();
  const CMatrix<Scalar> anti = m.transpose() * a * m.conjugate();
  const CVector<Scalar> constant = m.transpose() * (a * t.conjugate() + theta.constant_part());
  const CVector<Scalar> shift = m.transpose() * theta.frame_shift() +
                                pi<Scalar>() * m.transpose() * theta.datum().hermitian_matrix() * t.conjugate();
  return ConnectionForm<Scalar>(pullback(f, theta.datum()), anti, constant, shift);
}

/// The same connection written in the automorphy frame of its datum.
template <typename Scalar>
ConnectionForm<Scalar> to_automorphy_frame(const ConnectionForm<Scalar>& theta) {
  return ConnectionForm<Scalar>(theta.datum(), theta.antiholomorphic_part(),
                                theta.constant_part() + theta.frame_shift(),
                                CVector<Scalar>::Zero(theta.genus()));
}

template <typename Scalar>
ConnectionForm<Scalar> pullback(const TorusHomomorphism<Scalar>& f, const ConnectionForm<Scalar>& theta) {
  return to_automorphy_frame(restrict_along(f, theta));
}

/// ∇_𝓛 on 𝓛 = p_1^* L^* ⊗ α^* L over A × A, built from ∇_L by pullback.
template <typename Scalar>
ConnectionForm<Scalar> family_connection(const AHDatum<Scalar>& d) {
  const auto& a = d.torus();
  const ConnectionForm<Scalar> theta = canonical_connection(d);
  return tensor_connection(restrict_along(TorusHomomorphism<Scalar>::projection(a, 1), dual_connection(theta)),
                           restrict_along(TorusHomomorphism<Scalar>::addition(a), theta));
}

namespace detail {
template <typename Scalar>
void require_family_over(const ConnectionForm<Scalar>& family, const ComplexTorus<Scalar>& a) {
  if (family.torus() != product_torus(a, a)) {
    throw Error(ErrorCode::TorusMismatch, "family connection does not live on A x A for this torus");
  }
}
}  // namespace detail

/// ∇^x_𝓛: restriction of the family connection to A × {x}, in the
/// restricted family frame (holomorphic in x).  Constant in z.
template <typename Scalar>
ConnectionForm<Scalar> slice_connection(const ConnectionForm<Scalar>& family, const TorusPoint<Scalar>& x) {
  detail::require_family_over(family, x.torus());
  return restrict_along(TorusHomomorphism<Scalar>::slice_at(x.torus(), x.lift()), family);
}

/// θ^x(z) without materialising the slice datum: the first g components of
/// θ_𝓛 at (z, x̃).
template <typename Scalar>
CVector<Scalar> slice_value(const ConnectionForm<Scalar>& family, const CVector<Scalar>& z,
                            const CVector<Scalar>& x_lift) {
  const Eigen::Index g = z.size();
  CVector<Scalar> zw(2 * g);
  zw << z, x_lift;
  return family(zw).head(g);
}

/// Curvature sampled on the grid: K_jk = ∂θ_j/∂z̄_k, read as the
/// (1,1)-form Σ K_jk dz_j ∧ dz̄_k.
template <typename Scalar = double>
struct CurvatureForm {
  GridFunction<Scalar> samples;

  int genus() const { return samples.torus().genus(); }
  CMatrix<Scalar> at(Eigen::Index node) const { return unflatten_square<Scalar>(samples.at(node), genus()); }
  InvariantForm<Scalar> form_at(Eigen::Index node) const { return InvariantForm<Scalar>(1, 1, at(node)); }
  /// max over nodes of |K(node) - K(0)|
  Scalar variation() const { return max_variation(samples); }
  Scalar deviation_from(const InvariantForm<Scalar>& omega) const {
    Scalar err = 0;
    for (Eigen::Index n = 0; n < samples.nodes(); ++n)
      err = std::max(err, (at(n) - omega.coefficients()).cwiseAbs().maxCoeff());
    return err;
  }
};

template <typename Scalar, typename Fn>
CurvatureForm<Scalar> curvature_of(const ComplexTorus<Scalar>& torus, Fn&& theta, int resolution) {
  return CurvatureForm<Scalar>{dbar_fd_sampled(torus, resolution, std::forward<Fn>(theta))};
}

/// Finite-difference curvature ∂̄θ on the N-grid of the connection's torus.
template <typename Scalar>
CurvatureForm<Scalar> curvature(const ConnectionForm<Scalar>& theta, int resolution) {
  return curvature_of(theta.torus(), theta, resolution);
}

/// Closed-form curvature: the coefficient matrix A of θ = A z̄ + c.
template <typename Scalar>
InvariantForm<Scalar> analytic_curvature(const ConnectionForm<Scalar>& theta) {
  return InvariantForm<Scalar>(1, 1, theta.antiholomorphic_part());
}

/// Invariant representative of c_1(L): (i/2π) times the curvature -π H,
/// normalised so that its pairing with λ_j ∧ λ_k is E(λ_j, λ_k).
template <typename Scalar>
InvariantForm<Scalar> chern_form(const AHDatum<Scalar>& d) {
  const Complex<Scalar> c_norm(0, Scalar(1) / (Scalar(2) * pi<Scalar>()));
  return analytic_curvature(canonical_connection(d)) * c_norm;
}

/// f_y^* 𝒦(∇_𝓛) on the N-grid of A, with 𝒦 recomputed by central
/// differences on A × A; returns the largest deviation from ω.
template <typename Scalar>
Scalar check_eq_i(const ConnectionForm<Scalar>& family, const InvariantForm<Scalar>& omega,
                  const TorusPoint<Scalar>& y, int resolution) {
  detail::require_resolution(resolution);
  const auto& a = y.torus();
  detail::require_family_over(family, a);
  const auto section = TorusHomomorphism<Scalar>::section_at(a, y.lift());
  const auto& product = family.torus();
  const Scalar h = Scalar(1) / Scalar(resolution);
  GridFunction<Scalar> nodes(a, resolution, 1);
  Scalar err = 0;
  for (Eigen::Index n = 0; n < nodes.nodes(); ++n) {
    const CMatrix<Scalar> k_family = dbar_at(product, family, section(nodes.node_lift(n)), h);
    const InvariantForm<Scalar> pulled = InvariantForm<Scalar>(1, 1, k_family).pullback(section.linear());
    err = std::max(err, (pulled.coefficients() - omega.coefficients()).cwiseAbs().maxCoeff());
  }
  return err;
}

namespace detail {
// ∂/∂z_k of log fn along each lattice direction from log(fn(z+s)/fn(z-s)),
// which is exact when log fn is affine in z (a factor of automorphy is).
template <typename Scalar, typename Fn>
CVector<Scalar> log_gradient(const ComplexTorus<Scalar>& torus, Fn&& fn, const CVector<Scalar>& z, Scalar h) {
  const int n = torus.real_dim();
  CVector<Scalar> lattice(n);
  for (int a = 0; a < n; ++a) {
    const CVector<Scalar> s = torus.generator(a) * h;
    lattice(a) = std::log(fn(CVector<Scalar>(z + s)) / fn(CVector<Scalar>(z - s))) / (Scalar(2) * h);
  }
  return torus.del_weights().transpose() * lattice;
}
}  // namespace detail

/// |θ(z + λ) - θ(z) + ∂_z log a(λ, z)|_max, with ∂ log a taken by differences
/// of the factor of automorphy itself.
template <typename Scalar>
Scalar automorphy_defect(const ConnectionForm<Scalar>& theta, const IVector& n, const CVector<Scalar>& z,
                         Scalar h = Scalar(1e-3)) {
  const auto& d = theta.datum();
  const CVector<Scalar> lambda = d.torus().lift_of(n.cast<Scalar>());
  const CVector<Scalar> grad = detail::log_gradient(
      d.torus(), [&](const CVector<Scalar>& w) { return factor_of_automorphy(d, n, w); }, z, h);
  const CVector<Scalar> lhs = theta(CVector<Scalar>(z + lambda)) - theta(z);
  return (lhs + grad).cwiseAbs().maxCoeff();
}

}  // namespace cplxtorsor
