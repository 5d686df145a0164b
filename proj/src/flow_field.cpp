#include "semrb/flow_field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace semrb {

FlowField FlowField::zero(const Discretization& disc) {
  FlowField f;
  f.velocity.assign(disc.elements(), Eigen::VectorXd::Zero(2 * disc.velocity_modes()));
  f.pressure.assign(disc.elements(), Eigen::VectorXd::Zero(disc.pressure_modes()));
  return f;
}

FlowField& FlowField::operator+=(const FlowField& other) {
  if (other.velocity.size() != velocity.size()) {
    throw std::invalid_argument("FlowField +=: element count mismatch");
  }
  for (std::size_t e = 0; e < velocity.size(); ++e) {
    velocity[e] += other.velocity[e];
    pressure[e] += other.pressure[e];
  }
  return *this;
}

FlowField& FlowField::operator*=(double s) {
  for (auto& v : velocity) v *= s;
  for (auto& p : pressure) p *= s;
  return *this;
}

FlowField operator-(const FlowField& a, const FlowField& b) {
  FlowField d = b;
  d *= -1.0;
  d += a;
  d.nu = a.nu;
  return d;
}

void check_layout(const Discretization& disc, const FlowField& field) {
  const auto n = static_cast<std::size_t>(disc.elements());
  if (field.velocity.size() != n || field.pressure.size() != n) {
    throw std::invalid_argument("field has " + std::to_string(field.velocity.size()) +
                                " elements, discretization has " + std::to_string(n));
  }
  for (std::size_t e = 0; e < n; ++e) {
    if (field.velocity[e].size() != 2 * disc.velocity_modes() ||
        field.pressure[e].size() != disc.pressure_modes()) {
      throw std::invalid_argument("field coefficient sizes do not match the basis order");
    }
  }
}

FlowField make_field(const Discretization& disc, const Eigen::VectorXd& boundary_global,
                     const Eigen::VectorXd& pressure, const Eigen::VectorXd& interior) {
  const int nm = disc.velocity_modes();
  const int nb = disc.boundary_modes();
  const int ni = disc.interior_modes();
  const int np = disc.pressure_modes();
  if (boundary_global.size() != disc.maps.velocity_global ||
      pressure.size() != disc.elements() * np ||
      interior.size() != disc.elements() * 2 * ni) {
    throw std::invalid_argument("make_field: piece sizes do not match the discretization");
  }
  FlowField f = FlowField::zero(disc);
  const auto& bm = disc.velocity.boundary_modes;
  const auto& im = disc.velocity.interior_modes;
  for (int e = 0; e < disc.elements(); ++e) {
    for (int c = 0; c < 2; ++c) {
      for (int k = 0; k < nb; ++k) {
        const int local = c * nb + k;
        f.velocity[e](c * nm + bm[k]) =
            disc.maps.sign_of(e, local) * boundary_global(disc.maps.global_of(e, local));
      }
      for (int k = 0; k < ni; ++k) {
        f.velocity[e](c * nm + im[k]) = interior(e * 2 * ni + c * ni + k);
      }
    }
    f.pressure[e] = pressure.segment(e * np, np);
  }
  return f;
}

Eigen::VectorXd local_boundary(const Discretization& disc, const FlowField& f, int e) {
  const int nm = disc.velocity_modes();
  const int nb = disc.boundary_modes();
  Eigen::VectorXd out(2 * nb);
  for (int c = 0; c < 2; ++c) {
    for (int k = 0; k < nb; ++k) out(c * nb + k) = f.velocity[e](c * nm + disc.velocity.boundary_modes[k]);
  }
  return out;
}

Eigen::VectorXd local_interior(const Discretization& disc, const FlowField& f, int e) {
  const int nm = disc.velocity_modes();
  const int ni = disc.interior_modes();
  Eigen::VectorXd out(2 * ni);
  for (int c = 0; c < 2; ++c) {
    for (int k = 0; k < ni; ++k) out(c * ni + k) = f.velocity[e](c * nm + disc.velocity.interior_modes[k]);
  }
  return out;
}

namespace {

double h1_squared(const Discretization& disc, const FlowField& field) {
  const int nm = disc.velocity_modes();
  double total = 0.0;
  for (int e = 0; e < disc.elements(); ++e) {
    const Element& el = disc.mesh.elements[e];
    const Eigen::VectorXd w = disc.velocity.weights * el.jacobian();
    for (int c = 0; c < 2; ++c) {
      const auto coef = field.velocity[e].segment(c * nm, nm);
      const Eigen::VectorXd v = disc.velocity.values * coef;
      const Eigen::VectorXd gx = disc.velocity.d_xi * coef * (2.0 / el.hx);
      const Eigen::VectorXd gy = disc.velocity.d_eta * coef * (2.0 / el.hy);
      total += (w.array() * (v.array().square() + gx.array().square() + gy.array().square())).sum();
    }
  }
  return total;
}

}  // namespace

double h1_norm(const Discretization& disc, const FlowField& field) {
  check_layout(disc, field);
  return std::sqrt(h1_squared(disc, field));
}

double h1_relative_change(const Discretization& disc, const FlowField& a, const FlowField& b) {
  check_layout(disc, a);
  check_layout(disc, b);
  const double na = h1_norm(disc, a);
  if (na == 0.0) return h1_norm(disc, b);
  return h1_norm(disc, a - b) / na;
}

double relative_h1_error(const Discretization& disc, const FlowField& full, const FlowField& rom) {
  check_layout(disc, full);
  check_layout(disc, rom);
  const double denom = h1_norm(disc, full);
  if (denom == 0.0) throw std::invalid_argument("relative_h1_error: reference field has zero norm");
  return h1_norm(disc, full - rom) / denom;
}

std::array<double, 3> evaluate(const Discretization& disc, const FlowField& field, double x,
                               double y) {
  const QuadMesh& mesh = disc.mesh;
  const double hx = mesh.lx / mesh.nx;
  const double hy = mesh.ly / mesh.ny;
  const int ex = std::clamp(static_cast<int>(std::floor(x / hx)), 0, mesh.nx - 1);
  const int ey = std::clamp(static_cast<int>(std::floor(y / hy)), 0, mesh.ny - 1);
  const int e = mesh.element_id(ex, ey);
  const Element& el = mesh.elements[e];
  const double xi = 2.0 * (x - el.x0) / el.hx - 1.0;
  const double eta = 2.0 * (y - el.y0) / el.hy - 1.0;

  const int p = disc.spec.order_velocity;
  const int m = p + 1;
  std::vector<double> fx(m), fy(m);
  for (int i = 0; i < m; ++i) {
    fx[i] = modified_mode(i, p, xi);
    fy[i] = modified_mode(i, p, eta);
  }
  std::array<double, 3> out{0.0, 0.0, 0.0};
  for (int c = 0; c < 2; ++c) {
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < m; ++i) out[c] += field.velocity[e](c * m * m + i + m * j) * fx[i] * fy[j];
    }
  }
  const int mp = disc.spec.order_pressure + 1;
  for (int j = 0; j < mp; ++j) {
    const double ly = legendre(j, eta);
    for (int i = 0; i < mp; ++i) out[2] += field.pressure[e](i + mp * j) * legendre(i, xi) * ly;
  }
  return out;
}

double h1_error_against(const Discretization& disc, const FlowField& field,
                        const ExactVelocity& exact, int points) {
  check_layout(disc, field);
  const QuadratureRule rule = gauss_lobatto_rule(points);
  const TensorTables t = reference_gradients(velocity_mode_table(disc.spec, rule), rule);
  const int nm = disc.velocity_modes();
  double err2 = 0.0;
  double ref2 = 0.0;
  for (int e = 0; e < disc.elements(); ++e) {
    const Element& el = disc.mesh.elements[e];
    Eigen::MatrixXd v(t.points(), 2), gx(t.points(), 2), gy(t.points(), 2);
    for (int c = 0; c < 2; ++c) {
      const auto coef = field.velocity[e].segment(c * nm, nm);
      v.col(c) = t.values * coef;
      gx.col(c) = t.d_xi * coef * (2.0 / el.hx);
      gy.col(c) = t.d_eta * coef * (2.0 / el.hy);
    }
    for (int l = 0; l < rule.size(); ++l) {
      for (int k = 0; k < rule.size(); ++k) {
        const int pt = k + rule.size() * l;
        const double x = el.x(rule.nodes[k]);
        const double y = el.y(rule.nodes[l]);
        const double w = t.weights(pt) * el.jacobian();
        const auto u = exact.value(x, y);
        const auto g = exact.gradient(x, y);
        for (int c = 0; c < 2; ++c) {
          const double du = v(pt, c) - u[c];
          const double dgx = gx(pt, c) - g[2 * c];
          const double dgy = gy(pt, c) - g[2 * c + 1];
          err2 += w * (du * du + dgx * dgx + dgy * dgy);
          ref2 += w * (u[c] * u[c] + g[2 * c] * g[2 * c] + g[2 * c + 1] * g[2 * c + 1]);
        }
      }
    }
  }
  return std::sqrt(err2 / ref2);
}

Eigen::VectorXd divergence_moments(const Discretization& disc, const FlowField& field) {
  check_layout(disc, field);
  const int nm = disc.velocity_modes();
  const int np = disc.pressure_modes();
  Eigen::VectorXd out(disc.elements() * np);
  for (int e = 0; e < disc.elements(); ++e) {
    const Element& el = disc.mesh.elements[e];
    const Eigen::VectorXd div = disc.velocity.d_xi * field.velocity[e].head(nm) * (2.0 / el.hx) +
                                disc.velocity.d_eta * field.velocity[e].tail(nm) * (2.0 / el.hy);
    const Eigen::VectorXd wdiv = (disc.velocity.weights.array() * div.array()).matrix() * el.jacobian();
    out.segment(e * np, np) = disc.pressure.values.transpose() * wdiv;
  }
  return out;
}

}  // namespace semrb
