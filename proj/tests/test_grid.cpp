#include "doctest.h"
#include "test_support.hpp"

using namespace testsupport;

namespace {

// Oracle for ∂/∂z̄_k: fourth-order differences along the real axes x_k and
// y_k of C^g, independent of the lattice-direction stencil under test.
template <typename Fn>
CMat axis_dbar(Fn&& fn, const CVec& z, int g, double h = 1e-3) {
  const CVec f0 = fn(z);
  CMat out(f0.size(), g);
  for (int k = 0; k < g; ++k) {
    auto d = [&](C dir) {
      CVec e = CVec::Zero(g);
      e(k) = dir * h;
      return CVec((-fn(CVec(z + 2.0 * e)) + 8.0 * fn(CVec(z + e)) - 8.0 * fn(CVec(z - e)) + fn(CVec(z - 2.0 * e))) /
                  (12.0 * h));
    };
    out.col(k) = 0.5 * (d(C(1, 0)) + I * d(I));
  }
  return out;
}

// Smooth periodic test function: a few Fourier modes in lattice coordinates.
struct Waves {
  ComplexTorus<double> torus;
  CVec operator()(const CVec& z) const {
    const RVec t = torus.lattice_coords(z);
    C v(0, 0);
    for (int a = 0; a < t.size(); ++a) {
      v += std::exp(2.0 * M_PI * I * t(a)) * C(0.3 + 0.1 * a, -0.2);
      if (a + 1 < t.size()) v += 0.5 * std::sin(2.0 * M_PI * (t(a) - t(a + 1)));
    }
    CVec out(1);
    out << v;
    return out;
  }
};

double dbar_error_vs_oracle(const ComplexTorus<double>& torus, int n) {
  Waves w{torus};
  const auto grid = GridFunction<double>::sample(torus, n, 1, w);
  const auto d = dbar_fd(grid);
  double err = 0;
  for (Eigen::Index node = 0; node < grid.nodes(); node += 7) {
    const CMat exact = axis_dbar(w, grid.node_lift(node), torus.genus());
    for (int k = 0; k < torus.genus(); ++k) err = std::max(err, std::abs(d.at(node)(k) - exact(0, k)));
  }
  return err;
}

}  // namespace

TEST_CASE("dbar_fd on affine integrands is exact") {
  for (const auto& torus : {square_torus(), skew_torus(), skew_torus_g2()}) {
    const int g = torus.genus();
    const int n = g == 1 ? 16 : 8;
    const auto constant = dbar_fd_sampled(torus, n, [](const CVec&) { return CVec::Constant(1, C(2, -1)); });
    CHECK(max_abs(constant) == 0.0);

    const auto zbar = dbar_fd_sampled(torus, n, [](const CVec& z) { return CVec::Constant(1, std::conj(z(0))); });
    for (Eigen::Index node = 0; node < zbar.nodes(); ++node) {
      CHECK(std::abs(zbar.at(node)(0) - C(1, 0)) <= 1e-9);
      if (g == 2) CHECK(std::abs(zbar.at(node)(1)) <= 1e-9);
    }
    const auto z = dbar_fd_sampled(torus, n, [](const CVec& w) { return CVec::Constant(1, w(0)); });
    CHECK(max_abs(z) <= 1e-9);
  }
}

TEST_CASE("dbar_fd annihilates holomorphic functions") {
  const auto torus = skew_torus_g2();
  // Degree <= 2 polynomials: central differences are exact.
  auto poly = [](const CVec& z) {
    CVec v(2);
    v << z(0) * z(0) - 3.0 * z(0) * z(1), C(0.5, 1) * z(1) * z(1) + z(0);
    return v;
  };
  CHECK(max_abs(dbar_fd_sampled(torus, 8, poly)) <= 1e-9);

  // exp is not polynomial: the error is O(h²).
  auto expo = [](const CVec& z) { return CVec::Constant(1, std::exp(z(0) + 0.5 * z(1))); };
  const double e8 = max_abs(dbar_fd_sampled(torus, 8, expo));
  const double e16 = max_abs(dbar_fd_sampled(torus, 16, expo));
  const double e32 = max_abs(dbar_fd_sampled(torus, 32, expo));
  CHECK(e8 / e16 >= 3.5);
  CHECK(e16 / e32 >= 3.5);
  CHECK(e8 / e32 >= 3.5);
}

TEST_CASE("periodic dbar_fd converges at second order") {
  for (const auto& torus : {skew_torus(), square_torus()}) {
    const double e32 = dbar_error_vs_oracle(torus, 32);
    const double e64 = dbar_error_vs_oracle(torus, 64);
    CAPTURE(e32);
    CAPTURE(e64);
    CHECK(e32 / e64 >= 3.5);
  }
  const double e8 = dbar_error_vs_oracle(skew_torus_g2(), 8);
  const double e16 = dbar_error_vs_oracle(skew_torus_g2(), 16);
  CHECK(e8 / e16 >= 3.5);
}

TEST_CASE("second dbar is symmetric in the antiholomorphic indices") {
  const auto torus = skew_torus_g2();
  for (int n : {8, 16}) {
    const auto f = GridFunction<double>::sample(torus, n, 1, Waves{torus});
    const auto dd = dbar_fd(dbar_fd(f));  // entry (k, l) = ∂̄_l ∂̄_k f at k * 2 + l
    const double h = 1.0 / n;
    double antisym = 0;
    for (Eigen::Index node = 0; node < dd.nodes(); ++node)
      antisym = std::max(antisym, std::abs(dd.at(node)(1) - dd.at(node)(2)));
    CHECK(antisym <= 10 * h * h);
  }
}

TEST_CASE("dbar_fd rejects coarse grids and keeps grid shapes") {
  const auto torus = square_torus();
  CHECK_THROWS_AS(dbar_fd(GridFunction<double>(torus, 3, 1)), Error);
  CHECK_THROWS_AS(dbar_fd_sampled(torus, 2, [](const CVec& z) { return z; }), Error);
  const GridFunction<double> a(torus, 8, 1), b(torus, 8, 2);
  CHECK_THROWS_AS(a + b, Error);
  CHECK(a.nodes() == 64);
  CHECK(a.neighbor(7, 0, 1) == 0);
  CHECK(a.neighbor(0, 1, -1) == 56);
}

TEST_CASE("grid_mean of an exact form vanishes and is order independent") {
  const auto torus = skew_torus();
  const auto f = GridFunction<double>::sample(torus, 32, 1, Waves{torus});
  const auto d = dbar_fd(f);
  CHECK(std::abs(grid_mean(d)(0)) < 1e-12);
  const auto again = grid_mean(dbar_fd(GridFunction<double>::sample(torus, 32, 1, Waves{torus})));
  CHECK(again(0) == grid_mean(d)(0));
}
