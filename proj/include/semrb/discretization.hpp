#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "semrb/basis.hpp"
#include "semrb/mesh.hpp"

namespace semrb {

using VelocityFunction = std::function<std::array<double, 2>(double x, double y)>;

/// Mesh, basis, tabulated shape functions and dof maps for one problem.
/// Immutable after construction.
struct Discretization {
  BasisSpec spec;
  QuadMesh mesh;
  ModalTables tables;
  TensorTables velocity;  // 2D velocity modes at the tensor quadrature grid
  TensorTables pressure;  // 2D pressure modes at the same grid
  std::vector<BoundaryEdge> boundary;
  DofMaps maps;

  static Discretization build(QuadMesh mesh, const BasisSpec& spec,
                              std::vector<BoundaryEdge> boundary);

  int elements() const { return mesh.size(); }
  int velocity_modes() const { return spec.velocity_modes(); }
  int pressure_modes() const { return spec.pressure_modes(); }
  int boundary_modes() const { return spec.boundary_modes(); }
  int interior_modes() const { return spec.interior_modes(); }

  /// Both components: local boundary, interior velocity, and pressure sizes.
  int local_boundary() const { return 2 * boundary_modes(); }
  int local_interior() const { return 2 * interior_modes(); }
  int local_total() const { return local_boundary() + pressure_modes() + local_interior(); }

  /// Size of the hat-ordered level-1 unknown after Dirichlet elimination:
  /// [free b; non-mean pressures].
  int state_size() const { return maps.free_count + elements() * (pressure_modes() - 1); }
  /// Velocity boundary + pressure + interior velocity, all gathered.
  int global_total() const {
    return maps.velocity_global + elements() * (pressure_modes() + local_interior());
  }

  /// Hash of mesh parameters, basis orders and the dof-map checksum.
  std::uint64_t fingerprint() const;
};

/// Default channel: [0,36]x[0,6] on 8x4 elements, order 12, inflow on
/// y in [2.5, 3.5].
struct ChannelConfig {
  int nx = 8;
  int ny = 4;
  double lx = 36.0;
  double ly = 6.0;
  int order = 12;
  int quad = 0;  // 0 -> p + 2
  InflowSpan inflow{2.5, 3.5};
  bool allow_subedge = true;
};

Discretization build_channel(const ChannelConfig& cfg);

/// Parabolic inflow (y - y0)(y1 - y) inside the span, zero outside. A nonzero
/// perturbation scales it by 1 + eps * (2y - y0 - y1) / (y1 - y0), biasing
/// the jet toward the upper wall.
VelocityFunction channel_inflow(InflowSpan span, double perturbation = 0.0);

/// Prescribed values on the global boundary velocity dofs (zero where free).
/// Vertices touching a data edge interpolate g; edge modes are the L2
/// projection of g minus its vertex interpolant, integrated piecewise
/// between the given breakpoints (positions along the edge coordinate).
/// Wall edges carry zero.
Eigen::VectorXd dirichlet_values(const Discretization& disc, const VelocityFunction& g,
                                 const std::vector<double>& breakpoints = {});

/// Dirichlet data lifted to the b_all() layout (mean pressures zero).
Eigen::VectorXd dirichlet_b_values(const Discretization& disc, const Eigen::VectorXd& velocity);

}  // namespace semrb
