#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <utility>

#include "cplxtorsor/connections.hpp"
#include "cplxtorsor/grid.hpp"
#include "cplxtorsor/torus.hpp"
#include "cplxtorsor/types.hpp"

namespace cplxtorsor {

/// Which reference section a presentation is built on: σ (the canonical
/// connection of L, a section of 𝒞_L), τ (the flat slice family of 𝓛, a
/// section of 𝒵_L), or anything else.
enum class ReferenceKind { sigma, tau, custom };

inline const char* to_string(ReferenceKind k) {
  switch (k) {
    case ReferenceKind::sigma: return "sigma";
    case ReferenceKind::tau: return "tau";
    case ReferenceKind::custom: return "custom";
  }
  return "custom";
}

/// A 𝒱-torsor over a torus, 𝒱 = A × C^g, given by a reference smooth
/// section and that section's obstruction Θ (a V-valued (0,1)-form stored
/// per node as g x g, entry (j, k) = dz_j-component of the value on ∂/∂z̄_k).
///
/// When the reference is known through a fibre coordinate in a holomorphic
/// chart of the total space, Θ is the ∂̄ of that coordinate.
template <typename Scalar = double>
class TorsorPresentation {
 public:
  using CVec = CVector<Scalar>;
  using Coordinate = std::function<CVec(const CVec&)>;

  static std::shared_ptr<const TorsorPresentation> from_reference(const ComplexTorus<Scalar>& base,
                                                                  ReferenceKind kind, Coordinate coordinate,
                                                                  int resolution) {
    GridFunction<Scalar> theta = dbar_fd_sampled(base, resolution, coordinate);
    if (kind != ReferenceKind::custom && max_variation(theta) > Scalar(1e-8)) {
      throw Error(ErrorCode::ShapeMismatch, std::string(to_string(kind)) + " reference with a non-constant obstruction");
    }
    return std::shared_ptr<const TorsorPresentation>(
        new TorsorPresentation(base, kind, std::move(theta), std::move(coordinate)));
  }

  static std::shared_ptr<const TorsorPresentation> from_obstruction(ReferenceKind kind, GridFunction<Scalar> theta) {
    const auto base = theta.torus();
    if (theta.components() != base.genus() * base.genus()) {
      throw Error(ErrorCode::ShapeMismatch, "obstruction must carry g*g components per node");
    }
    return std::shared_ptr<const TorsorPresentation>(new TorsorPresentation(base, kind, std::move(theta), {}));
  }

  const ComplexTorus<Scalar>& base() const { return base_; }
  ReferenceKind kind() const { return kind_; }
  int model_dim() const { return base_.genus(); }
  int resolution() const { return theta_.resolution(); }
  const GridFunction<Scalar>& obstruction() const { return theta_; }

  bool has_reference_coordinate() const { return static_cast<bool>(coordinate_); }
  const Coordinate& reference_coordinate() const { return coordinate_; }

 private:
  TorsorPresentation(ComplexTorus<Scalar> base, ReferenceKind kind, GridFunction<Scalar> theta, Coordinate coordinate)
      : base_(std::move(base)), kind_(kind), theta_(std::move(theta)), coordinate_(std::move(coordinate)) {
    if (!theta_.is_finite()) throw Error(ErrorCode::ShapeMismatch, "obstruction has non-finite entries");
  }

  ComplexTorus<Scalar> base_;
  ReferenceKind kind_;
  GridFunction<Scalar> theta_;
  Coordinate coordinate_;
};

template <typename Scalar>
using PresentationPtr = std::shared_ptr<const TorsorPresentation<Scalar>>;

/// reference + u.  Periodic sections carry u on the grid; chart-local ones
/// carry a closed-form u defined on the fundamental domain only.
template <typename Scalar = double>
class TorsorSection {
 public:
  using CVec = CVector<Scalar>;
  using ChartOffset = std::function<CVec(const CVec&)>;

  static TorsorSection zero(PresentationPtr<Scalar> p) {
    GridFunction<Scalar> u(p->base(), p->resolution(), p->model_dim());
    return TorsorSection(std::move(p), std::move(u), {});
  }

  static TorsorSection periodic(PresentationPtr<Scalar> p, GridFunction<Scalar> offset) {
    if (offset.torus() != p->base() || offset.resolution() != p->resolution() ||
        offset.components() != p->model_dim()) {
      throw Error(ErrorCode::ShapeMismatch, "offset grid does not match the presentation");
    }
    return TorsorSection(std::move(p), std::move(offset), {});
  }

  static TorsorSection chart_local(PresentationPtr<Scalar> p, ChartOffset fn) {
    auto u = GridFunction<Scalar>::sample(p->base(), p->resolution(), p->model_dim(), fn);
    return TorsorSection(std::move(p), std::move(u), std::move(fn));
  }

  const PresentationPtr<Scalar>& presentation() const { return p_; }
  const GridFunction<Scalar>& offset() const { return u_; }
  bool is_chart_local() const { return static_cast<bool>(chart_); }
  const ChartOffset& chart_offset() const { return chart_; }

 private:
  TorsorSection(PresentationPtr<Scalar> p, GridFunction<Scalar> u, ChartOffset chart)
      : p_(std::move(p)), u_(std::move(u)), chart_(std::move(chart)) {}

  PresentationPtr<Scalar> p_;
  GridFunction<Scalar> u_;
  ChartOffset chart_;
};

/// φ(s, v): offset u ↦ u + v.
template <typename Scalar>
TorsorSection<Scalar> act(const TorsorSection<Scalar>& s, const GridFunction<Scalar>& v) {
  if (s.is_chart_local()) {
    throw Error(ErrorCode::ShapeMismatch, "chart-local sections take chart-local increments");
  }
  if (!v.same_shape(s.offset())) throw Error(ErrorCode::ShapeMismatch, "act: increment grid has the wrong shape");
  return TorsorSection<Scalar>::periodic(s.presentation(), s.offset() + v);
}

template <typename Scalar>
TorsorSection<Scalar> act(const TorsorSection<Scalar>& s, std::function<CVector<Scalar>(const CVector<Scalar>&)> v) {
  if (!s.is_chart_local()) throw Error(ErrorCode::ShapeMismatch, "periodic sections take grid increments");
  auto base = s.chart_offset();
  return TorsorSection<Scalar>::chart_local(
      s.presentation(), [base, v](const CVector<Scalar>& z) -> CVector<Scalar> { return base(z) + v(z); });
}

/// ω̂_s = Θ + ∂̄u.
template <typename Scalar>
GridFunction<Scalar> obstruction(const TorsorSection<Scalar>& s) {
  const auto& p = *s.presentation();
  if (s.is_chart_local()) return p.obstruction() + dbar_fd_sampled(p.base(), p.resolution(), s.chart_offset());
  return p.obstruction() + dbar_fd(s.offset());
}

template <typename Scalar = double>
struct HolomorphyResult {
  bool holomorphic;
  Scalar max_error;
};

template <typename Scalar>
HolomorphyResult<Scalar> is_holomorphic(const TorsorSection<Scalar>& s, Scalar tol) {
  const Scalar err = max_abs(obstruction(s));
  return {err <= tol, err};
}

/// The chart-local section u_j = -Σ_k K_jk z̄_k, holomorphic on the chart
/// whenever Θ ≡ K is constant.
template <typename Scalar>
TorsorSection<Scalar> local_holomorphic_section(PresentationPtr<Scalar> p, const CMatrix<Scalar>& k) {
  return TorsorSection<Scalar>::chart_local(
      std::move(p), [k](const CVector<Scalar>& z) -> CVector<Scalar> { return -k * z.conjugate(); });
}

/// A map of torsors over the same base sending ref₁ + v ↦ ref₂ + sign·v
/// (+ shift).  sign = +1 for the canonical morphism γ, -1 for the duality
/// maps δ, δ′.
template <typename Scalar = double>
struct TorsorMorphism {
  PresentationPtr<Scalar> source;
  PresentationPtr<Scalar> target;
  int sign = 1;
  std::optional<GridFunction<Scalar>> shift;
};

namespace detail {
template <typename Scalar>
void require_same_base(const TorsorPresentation<Scalar>& a, const TorsorPresentation<Scalar>& b) {
  if (a.base() != b.base() || a.resolution() != b.resolution() || a.model_dim() != b.model_dim()) {
    throw Error(ErrorCode::BaseMismatch, "presentations over different bases or grids");
  }
}
}  // namespace detail

/// γ: the unique torsor isomorphism with γ(ref₁ + v) = ref₂ + v.
template <typename Scalar>
TorsorMorphism<Scalar> canonical_morphism(PresentationPtr<Scalar> p1, PresentationPtr<Scalar> p2) {
  detail::require_same_base(*p1, *p2);
  return TorsorMorphism<Scalar>{std::move(p1), std::move(p2), 1, std::nullopt};
}

/// δ / δ′ between the torsors of L and L*: ref_L + v ↦ ref_{L*} - v.
template <typename Scalar>
TorsorMorphism<Scalar> duality_map(PresentationPtr<Scalar> p_l, PresentationPtr<Scalar> p_dual) {
  detail::require_same_base(*p_l, *p_dual);
  return TorsorMorphism<Scalar>{std::move(p_l), std::move(p_dual), -1, std::nullopt};
}

template <typename Scalar>
TorsorMorphism<Scalar> inverse(const TorsorMorphism<Scalar>& m) {
  std::optional<GridFunction<Scalar>> shift;
  if (m.shift) shift = -(*m.shift) * Complex<Scalar>(m.sign);
  return TorsorMorphism<Scalar>{m.target, m.source, m.sign, std::move(shift)};
}

template <typename Scalar>
TorsorSection<Scalar> apply(const TorsorMorphism<Scalar>& m, const TorsorSection<Scalar>& s) {
  if (s.presentation() != m.source) {
    detail::require_same_base(*s.presentation(), *m.source);
    if (s.presentation()->kind() != m.source->kind()) {
      throw Error(ErrorCode::BaseMismatch, "section does not belong to the morphism's source");
    }
  }
  if (s.is_chart_local()) {
    auto u = s.chart_offset();
    const int sign = m.sign;
    if (m.shift) throw Error(ErrorCode::ShapeMismatch, "shifted morphisms act on periodic sections only");
    return TorsorSection<Scalar>::chart_local(
        m.target, [u, sign](const CVector<Scalar>& z) -> CVector<Scalar> { return u(z) * Scalar(sign); });
  }
  GridFunction<Scalar> u = m.sign > 0 ? s.offset() : -s.offset();
  if (m.shift) u = u + *m.shift;
  return TorsorSection<Scalar>::periodic(m.target, std::move(u));
}

/// Obstruction of the morphism viewed as a section of the Hom-torsor:
/// ω̂ = Θ₂ - sign·Θ₁ (+ ∂̄ shift).  For γ this is ω̂_τ - ω̂_σ.
template <typename Scalar>
GridFunction<Scalar> morphism_obstruction(const TorsorMorphism<Scalar>& m) {
  GridFunction<Scalar> out =
      m.sign > 0 ? m.target->obstruction() - m.source->obstruction() : m.target->obstruction() + m.source->obstruction();
  if (m.shift) out = out + dbar_fd(*m.shift);
  return out;
}

template <typename Scalar>
HolomorphyResult<Scalar> is_holomorphic_morphism(const TorsorMorphism<Scalar>& m, Scalar tol) {
  const Scalar err = max_abs(morphism_obstruction(m));
  return {err <= tol, err};
}

/// Largest |coord₂(x) - sign·coord₁(x)| over the grid: how far the two
/// reference sections are from corresponding under the morphism pointwise.
template <typename Scalar>
Scalar reference_mismatch(const TorsorMorphism<Scalar>& m) {
  if (!m.source->has_reference_coordinate() || !m.target->has_reference_coordinate()) {
    throw Error(ErrorCode::ShapeMismatch, "reference coordinates unavailable");
  }
  GridFunction<Scalar> nodes(m.source->base(), m.source->resolution(), 1);
  Scalar err = 0;
  for (Eigen::Index n = 0; n < nodes.nodes(); ++n) {
    const CVector<Scalar> x = nodes.node_lift(n);
    const CVector<Scalar> d = m.target->reference_coordinate()(x) - Scalar(m.sign) * m.source->reference_coordinate()(x);
    err = std::max(err, d.cwiseAbs().maxCoeff());
  }
  return err;
}

/// Grid average of Θ: the invariant part, which represents the Dolbeault
/// class of the torsor.  Zero iff the torsor is trivializable.
template <typename Scalar>
CMatrix<Scalar> trivialization_class(const TorsorPresentation<Scalar>& p) {
  return unflatten_square<Scalar>(grid_mean(p.obstruction()), p.model_dim());
}

template <typename Scalar>
bool is_trivializable(const TorsorPresentation<Scalar>& p, Scalar tol) {
  return trivialization_class(p).cwiseAbs().maxCoeff() <= tol;
}

/// 𝒞_L presented over σ = ∇_L; fibre coordinate θ_L(x) in the automorphy frame.
template <typename Scalar>
PresentationPtr<Scalar> sigma_presentation(const AHDatum<Scalar>& d, int resolution) {
  const ConnectionForm<Scalar> theta = canonical_connection(d);
  return TorsorPresentation<Scalar>::from_reference(
      d.torus(), ReferenceKind::sigma, [theta](const CVector<Scalar>& x) { return theta(x); }, resolution);
}

/// 𝒵_L presented over τ: x ↦ ∇^x_𝓛, coordinatised by θ^x(z₀) in the
/// restricted family frame (θ^x does not depend on z₀).
template <typename Scalar>
PresentationPtr<Scalar> tau_presentation(const AHDatum<Scalar>& d, int resolution, const CVector<Scalar>& z0) {
  const ConnectionForm<Scalar> family = family_connection(d);
  const CVector<Scalar> z = z0;
  return TorsorPresentation<Scalar>::from_reference(
      d.torus(), ReferenceKind::tau, [family, z](const CVector<Scalar>& x) { return slice_value(family, z, x); },
      resolution);
}

template <typename Scalar>
PresentationPtr<Scalar> tau_presentation(const AHDatum<Scalar>& d, int resolution) {
  return tau_presentation(d, resolution, CVector<Scalar>(CVector<Scalar>::Zero(d.genus())));
}

/// Same torsor, reference moved to ref + w.
template <typename Scalar, typename Fn>
PresentationPtr<Scalar> perturbed_presentation(const PresentationPtr<Scalar>& p, Fn w) {
  if (!p->has_reference_coordinate()) throw Error(ErrorCode::ShapeMismatch, "reference coordinate unavailable");
  auto ref = p->reference_coordinate();
  return TorsorPresentation<Scalar>::from_reference(
      p->base(), ReferenceKind::custom,
      [ref, w](const CVector<Scalar>& x) -> CVector<Scalar> { return ref(x) + w(x); }, p->resolution());
}

}  // namespace cplxtorsor
