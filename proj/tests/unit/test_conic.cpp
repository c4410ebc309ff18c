// SPDX-License-Identifier: Apache-2.0
#include "pinch/conic.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>

using namespace pinch::conic;

TEST_CASE("linear bound") {
  Program p;
  const int x = p.add_variable();
  p.add_nonneg(p.var(x) - 3.0);
  p.minimize(p.var(x));
  const auto s = solve(p);
  REQUIRE(s.status == Status::optimal);
  CHECK(s.value(x) == doctest::Approx(3.0).epsilon(1e-7));
}

TEST_CASE("rotated cone reciprocal") {
  Program p;
  const int w = p.add_variable(0.0, INFINITY);
  const int z = p.add_variable(0.0, INFINITY);
  p.add_rsoc(p.var(w), p.var(z), {Affine(std::sqrt(2.0))});
  p.minimize(p.var(w) + p.var(z));
  const auto s = solve(p);
  REQUIRE(s.status == Status::optimal);
  CHECK(s.value(w) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(s.value(z) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("exponential cone log") {
  Program p;
  const int r = p.add_variable();
  const int rho = p.add_variable(0.0, std::exp(1.0) - 1.0);
  p.add_exp(p.var(r), Affine(1.0), 1.0 + p.var(rho));
  p.minimize(-p.var(r));
  const auto s = solve(p);
  REQUIRE(s.status == Status::optimal);
  CHECK(s.value(r) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("power cone inverse square root") {
  // w >= z^{-1/2}  <=>  w^{2/3} z^{1/3} >= 1
  for (double z0 : {0.25, 1.0, 4.0}) {
    Program p;
    const int w = p.add_variable();
    const int z = p.add_variable();
    p.add_equality(p.var(z) - z0);
    p.add_power(p.var(w), p.var(z), Affine(1.0), 2.0 / 3.0);
    p.minimize(p.var(w));
    const auto s = solve(p);
    REQUIRE(s.ok());
    CHECK(s.value(w) == doctest::Approx(1.0 / std::sqrt(z0)).epsilon(1e-6));
  }
}

TEST_CASE("second order cone distance") {
  Program p;
  const int x = p.add_variable(), y = p.add_variable(), t = p.add_variable();
  p.add_equality(p.var(x) + p.var(y));
  p.add_soc(p.var(t), {p.var(x) - 1.0, p.var(y) - 2.0});
  p.minimize(p.var(t));
  const auto s = solve(p);
  REQUIRE(s.status == Status::optimal);
  CHECK(s.value(t) == doctest::Approx(3.0 / std::sqrt(2.0)).epsilon(1e-6));
  CHECK(s.equality_residual <= 1e-7);
}

TEST_CASE("frobenius epigraph") {
  // ||(a, b)||^2 <= u via 2 * u * (1/2) >= ||x||^2, with a + b = 2
  Program p;
  const int a = p.add_variable(), b = p.add_variable(), u = p.add_variable();
  p.add_equality(p.var(a) + p.var(b) - 2.0);
  p.add_rsoc(p.var(u), Affine(0.5), {p.var(a), p.var(b)});
  p.minimize(p.var(u));
  const auto s = solve(p);
  REQUIRE(s.ok());
  CHECK(s.value(u) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("symmetric psd minimum eigenvalue") {
  Eigen::Matrix3d C;
  C << 2.0, 0.5, -0.3, 0.5, 1.0, 0.2, -0.3, 0.2, 3.0;
  Program p;
  const auto X = p.add_symmetric_psd(3);
  Affine obj, tr;
  for (int i = 0; i < 3; ++i) {
    tr += X(i, i);
    for (int j = 0; j < 3; ++j) obj += C(i, j) * X(i, j);
  }
  p.add_equality(tr - 1.0);
  p.minimize(obj);
  const auto s = solve(p);
  REQUIRE(s.status == Status::optimal);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(C);
  CHECK(s.objective == doctest::Approx(es.eigenvalues()[0]).epsilon(1e-6));
}

TEST_CASE("hermitian psd minimum eigenvalue") {
  using cd = std::complex<double>;
  Eigen::Matrix2cd C;
  C << cd(1.0, 0.0), cd(0.3, 0.8), cd(0.3, -0.8), cd(2.0, 0.0);
  Program p;
  const auto X = p.add_hermitian_psd(2);
  // Re Tr(C X) = sum_ij Re(C_ij) Re(X_ji) - Im(C_ij) Im(X_ji)
  Affine obj;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) obj += C(i, j).real() * X.real(j, i) - C(i, j).imag() * X.imag(j, i);
  p.add_equality(X.real(0, 0) + X.real(1, 1) - 1.0);
  p.minimize(obj);
  const auto s = solve(p);
  REQUIRE(s.status == Status::optimal);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(C);
  CHECK(s.objective == doctest::Approx(es.eigenvalues()[0]).epsilon(1e-6));
}

TEST_CASE("infeasible programs") {
  Program p;
  const int x = p.add_variable();
  p.add_nonneg(p.var(x) - 1.0);
  p.add_nonneg(-p.var(x));
  p.minimize(p.var(x));
  CHECK(solve(p).status == Status::infeasible);

  Program q;
  const int y = q.add_variable(0.0, 1.0);
  q.add_equality(q.var(y) - 1.0);
  q.add_equality(q.var(y) - 2.0);
  CHECK(solve(q).status == Status::infeasible);
}

TEST_CASE("empty interior is relaxed") {
  Program p;
  const int x = p.add_variable(), y = p.add_variable();
  p.add_nonneg(p.var(x) - p.var(y));
  p.add_nonneg(p.var(y) - p.var(x));
  p.add_bounds(x, 0.0, 1.0);
  p.minimize(-p.var(x) - p.var(y));
  const auto s = solve(p);
  CHECK(s.ok());
  CHECK(s.value(x) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("atoms against dense grids") {
  // minimize a x + b y over y >= 1/x, y >= sqrt-inverse, box; compared to a fine grid.
  for (double a : {0.3, 1.0, 2.5}) {
    for (double b : {0.5, 1.7}) {
      Program p;
      const int x = p.add_variable(0.2, 4.0), y = p.add_variable(0.0, 6.0), w = p.add_variable();
      p.add_rsoc(p.var(y), p.var(x), {Affine(std::sqrt(2.0))});  // y >= 1/x
      p.add_power(p.var(w), p.var(x), Affine(1.0), 2.0 / 3.0);   // w >= x^{-1/2}
      p.add_leq(p.var(w), 0.5 * p.var(y) + 0.3);
      p.minimize(a * p.var(x) + b * p.var(y));
      const auto s = solve(p);
      REQUIRE(s.status == Status::optimal);
      double best = INFINITY;
      for (int i = 0; i <= 20000; ++i) {
        const double xv = 0.2 + 3.8 * i / 20000.0;
        const double yv = std::max(1.0 / xv, 2.0 * (1.0 / std::sqrt(xv) - 0.3));
        if (yv <= 6.0) best = std::min(best, a * xv + b * yv);
      }
      CHECK(s.objective == doctest::Approx(best).epsilon(1e-4));
      CHECK(s.objective <= best + 1e-6);
    }
  }
  // sum of logs through exponential cones: maximize log(1+u) + log(1+v), u + v <= 3
  Program p;
  const int u = p.add_variable(0.0, INFINITY), v = p.add_variable(0.0, INFINITY);
  const int r1 = p.add_variable(), r2 = p.add_variable();
  p.add_leq(p.var(u) + p.var(v), 3.0);
  p.add_exp(p.var(r1), 1.0, 1.0 + p.var(u));
  p.add_exp(p.var(r2), 1.0, 1.0 + p.var(v));
  p.minimize(-p.var(r1) - p.var(r2));
  const auto s = solve(p);
  REQUIRE(s.status == Status::optimal);
  CHECK(-s.objective == doctest::Approx(2.0 * std::log(2.5)).epsilon(1e-7));
}

TEST_CASE("deterministic and dumpable") {
  Program p;
  const int x = p.add_variable(-1.0, 2.0, "x");
  const int t = p.add_variable();
  p.add_soc(p.var(t), {p.var(x) - 0.5});
  p.minimize(p.var(t) - 0.1 * p.var(x));
  const auto a = solve(p), b = solve(p);
  CHECK(a.x == b.x);
  const auto j = p.to_json();
  CHECK(j["variables"][0] == "x");
  CHECK(j["cones"].size() == 3);
  Eigen::VectorXd init(2);
  init << 0.4, 1.0;
  const auto c = solve(p, {}, init);
  CHECK(c.value(x) == doctest::Approx(a.value(x)).epsilon(1e-6));
}

TEST_CASE("smooth convex objective term") {
  Program p;
  const int x = p.add_variable(), y = p.add_variable();
  p.add_leq(p.var(x) + p.var(y), 0.0);
  p.add_bounds(x, -10.0, 10.0);
  p.add_bounds(y, -10.0, 10.0);
  p.add_smooth_objective([=](const Eigen::VectorXd& v, double& f, Eigen::VectorXd* g, Eigen::MatrixXd* H) {
    f = std::pow(v[x] - 2.0, 2) + std::pow(v[y] + 1.0, 2);
    if (g) {
      g->setZero(v.size());
      (*g)[x] = 2.0 * (v[x] - 2.0);
      (*g)[y] = 2.0 * (v[y] + 1.0);
    }
    if (H) {
      H->setZero(v.size(), v.size());
      (*H)(x, x) = (*H)(y, y) = 2.0;
    }
    return true;
  });
  const auto s = solve(p);
  REQUIRE(s.status == Status::optimal);
  CHECK(s.value(x) == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(s.value(y) == doctest::Approx(-1.5).epsilon(1e-6));
  CHECK(s.objective == doctest::Approx(0.5).epsilon(1e-6));
}
