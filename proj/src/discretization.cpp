#include "semrb/discretization.hpp"

#include <algorithm>
#include <cstring>

namespace semrb {

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) {
    h ^= (v >> (8 * b)) & 0xffu;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t bits(double x) {
  std::uint64_t u = 0;
  std::memcpy(&u, &x, sizeof u);
  return u;
}

}  // namespace

Discretization Discretization::build(QuadMesh mesh, const BasisSpec& spec,
                                     std::vector<BoundaryEdge> boundary) {
  spec.validate();
  Discretization d;
  d.spec = spec;
  d.mesh = std::move(mesh);
  d.tables = modal_basis_tables(spec);
  d.velocity = reference_gradients(d.tables.velocity, d.tables.rule);
  d.pressure = reference_gradients(d.tables.pressure, d.tables.rule);
  d.boundary = std::move(boundary);
  d.maps = build_dof_maps(d.mesh, spec, d.boundary);
  return d;
}

std::uint64_t Discretization::fingerprint() const {
  std::uint64_t h = 1469598103934665603ull;
  h = mix(h, static_cast<std::uint64_t>(mesh.nx));
  h = mix(h, static_cast<std::uint64_t>(mesh.ny));
  h = mix(h, bits(mesh.lx));
  h = mix(h, bits(mesh.ly));
  h = mix(h, static_cast<std::uint64_t>(spec.order_velocity));
  h = mix(h, static_cast<std::uint64_t>(spec.order_pressure));
  h = mix(h, static_cast<std::uint64_t>(spec.quad_points));
  h = mix(h, maps.checksum());
  return h;
}

Discretization build_channel(const ChannelConfig& cfg) {
  QuadMesh mesh = build_channel_mesh(cfg.nx, cfg.ny, cfg.lx, cfg.ly);
  auto tags = tag_boundaries(mesh, cfg.inflow, cfg.allow_subedge);
  return Discretization::build(std::move(mesh), BasisSpec::make(cfg.order, cfg.quad),
                               std::move(tags));
}

VelocityFunction channel_inflow(InflowSpan span, double perturbation) {
  return [span, perturbation](double /*x*/, double y) -> std::array<double, 2> {
    if (y <= span.y0 || y >= span.y1) return {0.0, 0.0};
    const double base = (y - span.y0) * (span.y1 - y);
    const double bias = (2.0 * y - span.y0 - span.y1) / (span.y1 - span.y0);
    return {base * (1.0 + perturbation * bias), 0.0};
  };
}

Eigen::VectorXd dirichlet_values(const Discretization& disc, const VelocityFunction& g,
                                 const std::vector<double>& breakpoints) {
  const QuadMesh& mesh = disc.mesh;
  const DofMaps& maps = disc.maps;
  const int p = disc.spec.order_velocity;
  const int per_edge = p - 1;
  const int nv = mesh.vertex_count();
  Eigen::VectorXd values = Eigen::VectorXd::Zero(maps.velocity_global);

  auto vertex_xy = [&](int v) -> std::array<double, 2> {
    const int i = v % (mesh.nx + 1);
    const int j = v / (mesh.nx + 1);
    return {mesh.lx * i / mesh.nx, mesh.ly * j / mesh.ny};
  };

  // Bubble-mode mass matrix on [-1, 1]; exact with p+2 Lobatto points.
  const QuadratureRule mass_rule = gauss_lobatto_rule(p + 2);
  Eigen::MatrixXd mass(per_edge, per_edge);
  for (int a = 1; a <= per_edge; ++a) {
    for (int b = 1; b <= per_edge; ++b) {
      double s = 0.0;
      for (int k = 0; k < mass_rule.size(); ++k) {
        const double x = mass_rule.nodes[k];
        s += mass_rule.weights[k] * modified_mode(a, p, x) * modified_mode(b, p, x);
      }
      mass(a - 1, b - 1) = s;
    }
  }
  const Eigen::LDLT<Eigen::MatrixXd> mass_ldlt(mass);
  const QuadratureRule sub_rule = gauss_legendre_rule(p + 12);

  for (const auto& edge : disc.boundary) {
    if (edge.tag != BoundaryTag::inflow) continue;
    const int ge = mesh.element_edge(edge.element, edge.edge);
    const auto ends = mesh.global_edge_vertices(ge);
    const auto a = vertex_xy(ends[0]);
    const auto b = vertex_xy(ends[1]);
    const auto ga = g(a[0], a[1]);
    const auto gb = g(b[0], b[1]);
    for (int c = 0; c < 2; ++c) {
      values(ends[0] + c * maps.scalar_global) = ga[c];
      values(ends[1] + c * maps.scalar_global) = gb[c];
    }
    if (per_edge == 0) continue;

    // Edge coordinate s in [-1, 1], split at breakpoints inside the edge.
    const bool horizontal = a[1] == b[1];
    const double lo = horizontal ? a[0] : a[1];
    const double hi = horizontal ? b[0] : b[1];
    std::vector<double> cuts = {-1.0, 1.0};
    for (double bp : breakpoints) {
      if (bp > lo && bp < hi) cuts.push_back(2.0 * (bp - lo) / (hi - lo) - 1.0);
    }
    std::sort(cuts.begin(), cuts.end());

    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(per_edge, 2);
    for (std::size_t piece = 0; piece + 1 < cuts.size(); ++piece) {
      const double s0 = cuts[piece];
      const double s1 = cuts[piece + 1];
      for (int k = 0; k < sub_rule.size(); ++k) {
        const double s = 0.5 * (s0 + s1) + 0.5 * (s1 - s0) * sub_rule.nodes[k];
        const double w = 0.5 * (s1 - s0) * sub_rule.weights[k];
        const double t = 0.5 * (s + 1.0);
        const double x = a[0] + t * (b[0] - a[0]);
        const double y = a[1] + t * (b[1] - a[1]);
        const auto gv = g(x, y);
        const double l0 = modified_mode(0, p, s);
        const double l1 = modified_mode(p, p, s);
        for (int c = 0; c < 2; ++c) {
          const double residual = gv[c] - ga[c] * l0 - gb[c] * l1;
          for (int m = 1; m <= per_edge; ++m) rhs(m - 1, c) += w * residual * modified_mode(m, p, s);
        }
      }
    }
    const Eigen::MatrixXd coeffs = mass_ldlt.solve(rhs);
    for (int c = 0; c < 2; ++c) {
      for (int m = 1; m <= per_edge; ++m) {
        values(nv + ge * per_edge + (m - 1) + c * maps.scalar_global) = coeffs(m - 1, c);
      }
    }
  }
  // Vertices shared with a wall edge keep the data value; walls are zero
  // elsewhere by initialization.
  return values;
}

Eigen::VectorXd dirichlet_b_values(const Discretization& disc, const Eigen::VectorXd& velocity) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(disc.maps.b_all());
  b.head(disc.maps.velocity_global) = velocity;
  return b;
}

}  // namespace semrb
