#include "semrb/basis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace semrb {

namespace {

struct LegendreValues {
  double p;   // P_n(x)
  double dp;  // P_n'(x)
};

LegendreValues legendre_with_derivative(int n, double x) {
  if (n == 0) return {1.0, 0.0};
  double p_prev = 1.0;
  double p = x;
  double dp_prev = 0.0;
  double dp = 1.0;
  for (int k = 1; k < n; ++k) {
    const double p_next = ((2.0 * k + 1.0) * x * p - k * p_prev) / (k + 1.0);
    const double dp_next = dp_prev + (2.0 * k + 1.0) * p;
    p_prev = p;
    p = p_next;
    dp_prev = dp;
    dp = dp_next;
  }
  return {p, dp};
}

}  // namespace

double legendre(int n, double x) { return legendre_with_derivative(n, x).p; }

double legendre_derivative(int n, double x) { return legendre_with_derivative(n, x).dp; }

double jacobi(int n, double alpha, double beta, double x) {
  if (n < 0) return 0.0;
  if (n == 0) return 1.0;
  const double ab = alpha + beta;
  double p_prev = 1.0;
  double p = 0.5 * (alpha - beta) + 0.5 * (ab + 2.0) * x;
  for (int k = 1; k < n; ++k) {
    const double two_k_ab = 2.0 * k + ab;
    const double a1 = 2.0 * (k + 1) * (k + ab + 1.0) * two_k_ab;
    const double a2 = (two_k_ab + 1.0) * (alpha * alpha - beta * beta);
    const double a3 = two_k_ab * (two_k_ab + 1.0) * (two_k_ab + 2.0);
    const double a4 = 2.0 * (k + alpha) * (k + beta) * (two_k_ab + 2.0);
    const double p_next = ((a2 + a3 * x) * p - a4 * p_prev) / a1;
    p_prev = p;
    p = p_next;
  }
  return p;
}

double jacobi_derivative(int n, double alpha, double beta, double x) {
  if (n <= 0) return 0.0;
  return 0.5 * (n + alpha + beta + 1.0) * jacobi(n - 1, alpha + 1.0, beta + 1.0, x);
}

double modified_mode(int i, int p, double x) {
  if (i == 0) return 0.5 * (1.0 - x);
  if (i == p) return 0.5 * (1.0 + x);
  return 0.25 * (1.0 - x) * (1.0 + x) * jacobi(i - 1, 1.0, 1.0, x);
}

double modified_mode_derivative(int i, int p, double x) {
  if (i == 0) return -0.5;
  if (i == p) return 0.5;
  const double bubble = 0.25 * (1.0 - x) * (1.0 + x);
  return -0.5 * x * jacobi(i - 1, 1.0, 1.0, x) + bubble * jacobi_derivative(i - 1, 1.0, 1.0, x);
}

QuadratureRule gauss_lobatto_rule(int q) {
  if (q < 2) {
    throw std::invalid_argument("gauss_lobatto_rule: need q >= 2, got " + std::to_string(q));
  }
  const int n = q - 1;
  QuadratureRule rule;
  rule.nodes.resize(q);
  rule.weights.resize(q);
  rule.nodes.front() = -1.0;
  rule.nodes.back() = 1.0;
  // Interior nodes are the roots of P_n'; Newton from Chebyshev-Lobatto guesses.
  for (int k = 1; k < n; ++k) {
    double x = -std::cos(std::numbers::pi * k / n);
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre_with_derivative(n, x);
      // (1-x^2) P'' = 2x P' - n(n+1) P
      const double d2p = (2.0 * x * dp - n * (n + 1.0) * p) / (1.0 - x * x);
      const double dx = dp / d2p;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[k] = x;
  }
  for (int k = 0; k < q; ++k) {
    const double p = legendre(n, rule.nodes[k]);
    rule.weights[k] = 2.0 / (n * (n + 1.0) * p * p);
  }
  return rule;
}

QuadratureRule gauss_legendre_rule(int q) {
  if (q < 1) {
    throw std::invalid_argument("gauss_legendre_rule: need q >= 1, got " + std::to_string(q));
  }
  QuadratureRule rule;
  rule.nodes.resize(q);
  rule.weights.resize(q);
  for (int k = 0; k < q; ++k) {
    double x = -std::cos(std::numbers::pi * (k + 0.75) / (q + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre_with_derivative(q, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre_derivative(q, x);
    rule.nodes[k] = x;
    rule.weights[k] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

BasisSpec BasisSpec::make(int p, int q) {
  BasisSpec spec;
  spec.order_velocity = p;
  spec.order_pressure = p - 2;
  spec.quad_points = q > 0 ? q : p + 2;
  spec.validate();
  return spec;
}

void BasisSpec::validate() const {
  if (order_velocity < 2) {
    throw std::invalid_argument("velocity order must be >= 2, got " +
                                std::to_string(order_velocity));
  }
  if (order_pressure != order_velocity - 2) {
    throw std::invalid_argument("pressure order must equal velocity order - 2");
  }
  if (quad_points < order_velocity + 2) {
    throw std::invalid_argument("need at least p+2 quadrature points, got " +
                                std::to_string(quad_points));
  }
}

ModeTable velocity_mode_table(const BasisSpec& spec, const QuadratureRule& rule) {
  const int p = spec.order_velocity;
  ModeTable table;
  table.values.resize(rule.size(), p + 1);
  table.derivatives.resize(rule.size(), p + 1);
  for (int k = 0; k < rule.size(); ++k) {
    for (int i = 0; i <= p; ++i) {
      table.values(k, i) = modified_mode(i, p, rule.nodes[k]);
      table.derivatives(k, i) = modified_mode_derivative(i, p, rule.nodes[k]);
    }
  }
  table.boundary_mode_ids = {0, p};
  for (int i = 1; i < p; ++i) table.interior_mode_ids.push_back(i);
  return table;
}

ModeTable pressure_mode_table(const BasisSpec& spec, const QuadratureRule& rule) {
  const int n = spec.order_pressure;
  ModeTable table;
  table.values.resize(rule.size(), n + 1);
  table.derivatives.resize(rule.size(), n + 1);
  for (int k = 0; k < rule.size(); ++k) {
    for (int i = 0; i <= n; ++i) {
      const auto [p, dp] = legendre_with_derivative(i, rule.nodes[k]);
      table.values(k, i) = p;
      table.derivatives(k, i) = dp;
    }
  }
  for (int i = 0; i <= n; ++i) table.interior_mode_ids.push_back(i);
  return table;
}

ModalTables modal_basis_tables(const BasisSpec& spec) {
  spec.validate();
  ModalTables tables;
  tables.rule = gauss_lobatto_rule(spec.quad_points);
  tables.velocity = velocity_mode_table(spec, tables.rule);
  tables.pressure = pressure_mode_table(spec, tables.rule);
  return tables;
}

std::vector<int> boundary_mode_order(int m) {
  const int p = m - 1;
  auto idx = [m](int i, int j) { return i + m * j; };
  std::vector<int> order = {idx(0, 0), idx(p, 0), idx(p, p), idx(0, p)};
  for (int i = 1; i < p; ++i) order.push_back(idx(i, 0));
  for (int j = 1; j < p; ++j) order.push_back(idx(p, j));
  for (int i = 1; i < p; ++i) order.push_back(idx(i, p));
  for (int j = 1; j < p; ++j) order.push_back(idx(0, j));
  return order;
}

std::vector<int> interior_mode_order(int m) {
  std::vector<int> order;
  for (int j = 1; j < m - 1; ++j) {
    for (int i = 1; i < m - 1; ++i) order.push_back(i + m * j);
  }
  return order;
}

TensorTables reference_gradients(const ModeTable& table, const QuadratureRule& rule) {
  if (table.points() != rule.size()) {
    throw std::invalid_argument("reference_gradients: table has " +
                                std::to_string(table.points()) + " points, rule has " +
                                std::to_string(rule.size()));
  }
  const int q = rule.size();
  const int m = table.modes();
  TensorTables t;
  t.values.resize(q * q, m * m);
  t.d_xi.resize(q * q, m * m);
  t.d_eta.resize(q * q, m * m);
  t.weights.resize(q * q);
  for (int l = 0; l < q; ++l) {
    for (int k = 0; k < q; ++k) {
      const int pt = k + q * l;
      t.weights(pt) = rule.weights[k] * rule.weights[l];
      for (int j = 0; j < m; ++j) {
        for (int i = 0; i < m; ++i) {
          const int mode = i + m * j;
          t.values(pt, mode) = table.values(k, i) * table.values(l, j);
          t.d_xi(pt, mode) = table.derivatives(k, i) * table.values(l, j);
          t.d_eta(pt, mode) = table.values(k, i) * table.derivatives(l, j);
        }
      }
    }
  }
  if (!table.boundary_mode_ids.empty()) {
    t.boundary_modes = boundary_mode_order(m);
    t.interior_modes = interior_mode_order(m);
  } else {
    for (int i = 0; i < m * m; ++i) t.interior_modes.push_back(i);
  }
  return t;
}

}  // namespace semrb
