#pragma once

#include <algorithm>
#include <cstdint>
#include <string>

#include "cplxtorsor/torus.hpp"
#include "cplxtorsor/types.hpp"

namespace cplxtorsor {

/// Values sampled on the periodic lattice-coordinate grid of a torus:
/// node (i_0, ..., i_{2g-1}) sits at t = i / N and indices wrap around.
/// Values are stored column-per-node in a (components x nodes) matrix.
template <typename Scalar = double>
class GridFunction {
 public:
  using Complex = std::complex<Scalar>;
  using CVec = CVector<Scalar>;
  using CMat = CMatrix<Scalar>;

  GridFunction(ComplexTorus<Scalar> torus, int resolution, int components)
      : torus_(std::move(torus)), resolution_(resolution), components_(components) {
    if (resolution < 1 || components < 1) throw Error(ErrorCode::ShapeMismatch, "empty grid");
    Eigen::Index nodes = 1;
    for (int a = 0; a < torus_.real_dim(); ++a) nodes *= resolution;
    values_ = CMat::Zero(components, nodes);
  }

  /// Samples fn(lift) at every node.
  template <typename Fn>
  static GridFunction sample(const ComplexTorus<Scalar>& torus, int resolution, int components, Fn&& fn) {
    GridFunction out(torus, resolution, components);
    for (Eigen::Index n = 0; n < out.nodes(); ++n) {
      const CVec v = fn(out.node_lift(n));
      if (v.size() != components) throw Error(ErrorCode::ShapeMismatch, "sampled value has wrong size");
      out.values_.col(n) = v;
    }
    return out;
  }

  const ComplexTorus<Scalar>& torus() const { return torus_; }
  int resolution() const { return resolution_; }
  int components() const { return components_; }
  int real_dim() const { return torus_.real_dim(); }
  Eigen::Index nodes() const { return values_.cols(); }
  Scalar spacing() const { return Scalar(1) / Scalar(resolution_); }

  CMat& values() { return values_; }
  const CMat& values() const { return values_; }
  auto at(Eigen::Index node) { return values_.col(node); }
  auto at(Eigen::Index node) const { return values_.col(node); }

  RVector<Scalar> node_coords(Eigen::Index node) const {
    RVector<Scalar> t(real_dim());
    for (int a = 0; a < real_dim(); ++a) {
      t(a) = Scalar(node % resolution_) / Scalar(resolution_);
      node /= resolution_;
    }
    return t;
  }

  CVec node_lift(Eigen::Index node) const { return torus_.lift_of(node_coords(node)); }

  Eigen::Index neighbor(Eigen::Index node, int axis, int step) const {
    Eigen::Index stride = 1;
    for (int a = 0; a < axis; ++a) stride *= resolution_;
    const Eigen::Index i = (node / stride) % resolution_;
    const Eigen::Index j = ((i + step) % resolution_ + resolution_) % resolution_;
    return node + (j - i) * stride;
  }

  bool same_shape(const GridFunction& o) const {
    return torus_ == o.torus_ && resolution_ == o.resolution_ && components_ == o.components_;
  }

  bool is_finite() const { return values_.allFinite(); }

  GridFunction operator+(const GridFunction& o) const { return combine(o, values_ + o.values_); }
  GridFunction operator-(const GridFunction& o) const { return combine(o, values_ - o.values_); }
  GridFunction operator-() const {
    GridFunction out = *this;
    out.values_ = -values_;
    return out;
  }
  GridFunction operator*(const Complex& s) const {
    GridFunction out = *this;
    out.values_ *= s;
    return out;
  }

 private:
  template <typename Expr>
  GridFunction combine(const GridFunction& o, const Expr& expr) const {
    if (!same_shape(o)) throw Error(ErrorCode::ShapeMismatch, "grid functions of different shape");
    GridFunction out = *this;
    out.values_ = expr;
    return out;
  }

  ComplexTorus<Scalar> torus_;
  int resolution_;
  int components_;
  CMat values_;
};

namespace detail {
inline void require_resolution(int n) {
  if (n < 4) throw Error(ErrorCode::ResolutionTooCoarse, "grid resolution " + std::to_string(n) + " < 4");
}

// (C x 2g lattice derivatives) * (2g x g weights), flattened row-major so
// entry (c, k) lands at c * g + k.
template <typename Scalar, typename Derived>
void store_row_major(const Eigen::MatrixBase<Derived>& m, Eigen::Ref<CVector<Scalar>> out) {
  for (Eigen::Index c = 0; c < m.rows(); ++c)
    for (Eigen::Index k = 0; k < m.cols(); ++k) out(c * m.cols() + k) = m(c, k);
}
}  // namespace detail

/// ∂f/∂z̄_k at one point, by central differences of step h along each
/// lattice direction.  `fn` maps a lift z to a C-vector; the result is C x g.
template <typename Scalar, typename Fn>
CMatrix<Scalar> dbar_at(const ComplexTorus<Scalar>& torus, Fn&& fn, const CVector<Scalar>& z, Scalar h) {
  const int n = torus.real_dim();
  CMatrix<Scalar> lattice_derivs;
  for (int a = 0; a < n; ++a) {
    const CVector<Scalar> step = torus.generator(a) * h;
    const CVector<Scalar> fwd = fn(CVector<Scalar>(z + step));
    const CVector<Scalar> bwd = fn(CVector<Scalar>(z - step));
    if (a == 0) lattice_derivs.resize(fwd.size(), n);
    lattice_derivs.col(a) = (fwd - bwd) / (Scalar(2) * h);
  }
  return lattice_derivs * torus.dbar_weights();
}

/// Holomorphic counterpart of dbar_at: ∂f/∂z_k.
template <typename Scalar, typename Fn>
CMatrix<Scalar> del_at(const ComplexTorus<Scalar>& torus, Fn&& fn, const CVector<Scalar>& z, Scalar h) {
  const int n = torus.real_dim();
  CMatrix<Scalar> lattice_derivs;
  for (int a = 0; a < n; ++a) {
    const CVector<Scalar> step = torus.generator(a) * h;
    const CVector<Scalar> fwd = fn(CVector<Scalar>(z + step));
    const CVector<Scalar> bwd = fn(CVector<Scalar>(z - step));
    if (a == 0) lattice_derivs.resize(fwd.size(), n);
    lattice_derivs.col(a) = (fwd - bwd) / (Scalar(2) * h);
  }
  return lattice_derivs * torus.del_weights();
}

/// Periodic ∂̄ of a grid function: central differences at spacing 1/N with
/// wrap-around.  Output has components * g entries per node, (c, k) at
/// c * g + k.
template <typename Scalar>
GridFunction<Scalar> dbar_fd(const GridFunction<Scalar>& f) {
  detail::require_resolution(f.resolution());
  const ComplexTorus<Scalar>& torus = f.torus();
  const int g = torus.genus();
  const int n = torus.real_dim();
  const int comps = f.components();
  const Scalar inv2h = Scalar(f.resolution()) / Scalar(2);
  GridFunction<Scalar> out(torus, f.resolution(), comps * g);
  CMatrix<Scalar> lattice_derivs(comps, n);
  for (Eigen::Index node = 0; node < f.nodes(); ++node) {
    for (int a = 0; a < n; ++a) {
      lattice_derivs.col(a) = (f.at(f.neighbor(node, a, +1)) - f.at(f.neighbor(node, a, -1))) * inv2h;
    }
    detail::store_row_major<Scalar>(lattice_derivs * torus.dbar_weights(), out.at(node));
  }
  return out;
}

/// ∂̄ of a function given in closed form, evaluated at the nodes of an N-grid
/// with stencil step h (defaults to the grid spacing).  Works for functions
/// that are not periodic (connection forms, chart-local sections).
template <typename Scalar, typename Fn>
GridFunction<Scalar> dbar_fd_sampled(const ComplexTorus<Scalar>& torus, int resolution, Fn&& fn,
                                     Scalar h = Scalar(0)) {
  detail::require_resolution(resolution);
  if (h <= Scalar(0)) h = Scalar(1) / Scalar(resolution);
  const int g = torus.genus();
  GridFunction<Scalar> probe(torus, resolution, 1);
  const CMatrix<Scalar> first = dbar_at(torus, fn, probe.node_lift(0), h);
  GridFunction<Scalar> out(torus, resolution, static_cast<int>(first.rows()) * g);
  detail::store_row_major<Scalar>(first, out.at(0));
  for (Eigen::Index node = 1; node < out.nodes(); ++node) {
    detail::store_row_major<Scalar>(dbar_at(torus, fn, probe.node_lift(node), h), out.at(node));
  }
  return out;
}

template <typename Scalar>
Scalar max_abs(const GridFunction<Scalar>& f) {
  return f.values().cwiseAbs().maxCoeff();
}

template <typename Scalar>
Scalar max_abs_diff(const GridFunction<Scalar>& a, const GridFunction<Scalar>& b) {
  return max_abs(a - b);
}

/// Largest deviation of any node from node 0.
template <typename Scalar>
Scalar max_variation(const GridFunction<Scalar>& f) {
  return (f.values().colwise() - f.values().col(0)).cwiseAbs().maxCoeff();
}

namespace detail {
template <typename Scalar>
CVector<Scalar> pairwise_sum(const CMatrix<Scalar>& v, Eigen::Index begin, Eigen::Index end) {
  if (end - begin <= 8) {
    CVector<Scalar> s = CVector<Scalar>::Zero(v.rows());
    for (Eigen::Index n = begin; n < end; ++n) s += v.col(n);
    return s;
  }
  const Eigen::Index mid = begin + (end - begin) / 2;
  return pairwise_sum(v, begin, mid) + pairwise_sum(v, mid, end);
}
}  // namespace detail

/// Per-component grid average with tree summation, so the result does not
/// depend on any evaluation order.
template <typename Scalar>
CVector<Scalar> grid_mean(const GridFunction<Scalar>& f) {
  return detail::pairwise_sum(f.values(), 0, f.nodes()) / Scalar(f.nodes());
}

/// Reshape a row-major flattened g*g vector back into a g x g matrix.
template <typename Scalar, typename Derived>
CMatrix<Scalar> unflatten_square(const Eigen::MatrixBase<Derived>& flat, int g) {
  CMatrix<Scalar> m(g, g);
  for (int j = 0; j < g; ++j)
    for (int k = 0; k < g; ++k) m(j, k) = flat(j * g + k);
  return m;
}

}  // namespace cplxtorsor
