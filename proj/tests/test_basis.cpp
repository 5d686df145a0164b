#include <doctest.h>

#include <cmath>
#include <numeric>

#include "semrb/basis.hpp"

using namespace semrb;

TEST_CASE("three-point Gauss-Lobatto rule is Simpson's rule") {
  const QuadratureRule r = gauss_lobatto_rule(3);
  REQUIRE(r.size() == 3);
  CHECK(r.nodes[0] == doctest::Approx(-1.0));
  CHECK(r.nodes[1] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(r.nodes[2] == doctest::Approx(1.0));
  CHECK(r.weights[0] == doctest::Approx(1.0 / 3.0));
  CHECK(r.weights[1] == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("Gauss-Lobatto interior nodes are roots of P'_{q-1}") {
  for (int q = 3; q <= 16; ++q) {
    const QuadratureRule r = gauss_lobatto_rule(q);
    for (int k = 1; k < q - 1; ++k) CHECK(std::abs(legendre_derivative(q - 1, r.nodes[k])) < 1e-11);
    CHECK(std::accumulate(r.weights.begin(), r.weights.end(), 0.0) == doctest::Approx(2.0));
  }
}

TEST_CASE("quadrature exactness degrees") {
  for (int q = 2; q <= 14; ++q) {
    const QuadratureRule gll = gauss_lobatto_rule(q);
    const QuadratureRule gl = gauss_legendre_rule(q);
    for (int d = 0; d <= 2 * q - 1; ++d) {
      const double exact = d % 2 ? 0.0 : 2.0 / (d + 1);
      double s_gll = 0.0;
      double s_gl = 0.0;
      for (int k = 0; k < q; ++k) {
        s_gll += gll.weights[k] * std::pow(gll.nodes[k], d);
        s_gl += gl.weights[k] * std::pow(gl.nodes[k], d);
      }
      CHECK(std::abs(s_gl - exact) < 1e-13);
      if (d <= 2 * q - 3) CHECK(std::abs(s_gll - exact) < 1e-13);
    }
  }
}

TEST_CASE("Legendre values and orthogonality") {
  CHECK(legendre(2, 0.5) == doctest::Approx(-0.125));
  CHECK(legendre(3, -1.0) == doctest::Approx(-1.0));
  const QuadratureRule r = gauss_legendre_rule(12);
  for (int m = 0; m < 8; ++m) {
    for (int n = 0; n < 8; ++n) {
      double s = 0.0;
      for (int k = 0; k < r.size(); ++k) s += r.weights[k] * legendre(m, r.nodes[k]) * legendre(n, r.nodes[k]);
      CHECK(std::abs(s - (m == n ? 2.0 / (2 * n + 1) : 0.0)) < 1e-13);
    }
  }
}

TEST_CASE("Jacobi (0,0) is Legendre") {
  for (int n = 0; n < 9; ++n) {
    for (double x : {-0.9, -0.2, 0.4, 1.0}) CHECK(jacobi(n, 0, 0, x) == doctest::Approx(legendre(n, x)));
  }
}

TEST_CASE("modal basis: vertex modes, vanishing bubbles, derivative consistency") {
  for (int p : {2, 5, 12}) {
    CHECK(modified_mode(0, p, -1.0) == doctest::Approx(1.0));
    CHECK(modified_mode(0, p, 1.0) == doctest::Approx(0.0));
    CHECK(modified_mode(p, p, 1.0) == doctest::Approx(1.0));
    for (int i = 1; i < p; ++i) {
      CHECK(std::abs(modified_mode(i, p, -1.0)) < 1e-15);
      CHECK(std::abs(modified_mode(i, p, 1.0)) < 1e-15);
    }
    // Central differences of a polynomial of degree <= 12 at step 1e-5.
    for (int i = 0; i <= p; ++i) {
      for (double x : {-0.7, 0.0, 0.35, 0.9}) {
        const double h = 1e-5;
        const double fd = (modified_mode(i, p, x + h) - modified_mode(i, p, x - h)) / (2 * h);
        CHECK(modified_mode_derivative(i, p, x) == doctest::Approx(fd).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("tensor tables: mode ordering and derivative of a tabulated product") {
  const BasisSpec spec = BasisSpec::make(5);
  CHECK(spec.order_pressure == 3);
  CHECK(spec.quad_points == 7);
  const ModalTables t = modal_basis_tables(spec);
  const TensorTables tv = reference_gradients(t.velocity, t.rule);
  CHECK(tv.modes() == 36);
  CHECK(tv.points() == 49);
  CHECK(static_cast<int>(tv.boundary_modes.size()) == spec.boundary_modes());
  CHECK(static_cast<int>(tv.interior_modes.size()) == spec.interior_modes());
  const int q = t.rule.size();
  const int m = spec.velocity_modes_1d();
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      for (int l = 0; l < q; ++l) {
        for (int k = 0; k < q; ++k) {
          const double xi = t.rule.nodes[k];
          const double eta = t.rule.nodes[l];
          CHECK(tv.values(k + q * l, i + m * j) ==
                doctest::Approx(modified_mode(i, 5, xi) * modified_mode(j, 5, eta)));
          CHECK(tv.d_xi(k + q * l, i + m * j) ==
                doctest::Approx(modified_mode_derivative(i, 5, xi) * modified_mode(j, 5, eta)));
        }
      }
    }
  }
}

TEST_CASE("boundary and interior mode orders partition the tensor modes") {
  for (int m : {3, 6, 13}) {
    std::vector<int> all = boundary_mode_order(m);
    const std::vector<int> in = interior_mode_order(m);
    CHECK(static_cast<int>(all.size()) == 4 * (m - 1));
    all.insert(all.end(), in.begin(), in.end());
    std::sort(all.begin(), all.end());
    for (int k = 0; k < m * m; ++k) CHECK(all[k] == k);
    // Vertices first, counter-clockwise from (-1, -1).
    const std::vector<int> b = boundary_mode_order(m);
    CHECK(b[0] == 0);
    CHECK(b[1] == m - 1);
    CHECK(b[2] == m * m - 1);
    CHECK(b[3] == m * (m - 1));
  }
}

TEST_CASE("invalid specs are rejected") {
  CHECK_THROWS_AS(BasisSpec::make(1), std::invalid_argument);
  CHECK_THROWS_AS(BasisSpec::make(6, 7), std::invalid_argument);
  CHECK_NOTHROW(BasisSpec::make(6, 8));
}
