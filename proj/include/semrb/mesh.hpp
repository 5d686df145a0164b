#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "semrb/basis.hpp"

namespace semrb {

/// Axis-aligned quadrilateral [x0, x0+hx] x [y0, y0+hy].
struct Element {
  int ex = 0;
  int ey = 0;
  double x0 = 0.0;
  double y0 = 0.0;
  double hx = 1.0;
  double hy = 1.0;

  double jacobian() const { return 0.25 * hx * hy; }
  double x(double xi) const { return x0 + 0.5 * (xi + 1.0) * hx; }
  double y(double eta) const { return y0 + 0.5 * (eta + 1.0) * hy; }
};

/// Local edge numbering: 0 bottom, 1 right, 2 top, 3 left.
enum class LocalEdge : int { bottom = 0, right = 1, top = 2, left = 3 };

/// Two elements sharing an edge. sign is +1 when both parametrize the edge in
/// the same direction.
struct EdgeLink {
  int global_edge = -1;
  std::array<int, 2> element{-1, -1};
  std::array<int, 2> local_edge{-1, -1};
  int sign = 1;
};

struct QuadMesh {
  int nx = 0;
  int ny = 0;
  double lx = 0.0;
  double ly = 0.0;
  std::vector<Element> elements;
  std::vector<EdgeLink> interior_edges;

  int size() const { return static_cast<int>(elements.size()); }
  int element_id(int ex, int ey) const { return ex + nx * ey; }

  int vertex_count() const { return (nx + 1) * (ny + 1); }
  int vertex_id(int i, int j) const { return i + (nx + 1) * j; }
  /// Horizontal edges, (i,j) -> (i+1,j), numbered first; then vertical
  /// edges (i,j) -> (i,j+1).
  int horizontal_edge_count() const { return nx * (ny + 1); }
  int vertical_edge_count() const { return (nx + 1) * ny; }
  int edge_count() const { return horizontal_edge_count() + vertical_edge_count(); }
  int horizontal_edge(int i, int j) const { return i + nx * j; }
  int vertical_edge(int i, int j) const { return horizontal_edge_count() + i + (nx + 1) * j; }

  /// Global vertex ids of an element, counter-clockwise from the lower-left.
  std::array<int, 4> element_vertices(int e) const;
  /// Global edge id of a local edge.
  int element_edge(int e, LocalEdge edge) const;
  /// Global start/end vertex of a local edge in its local direction.
  std::array<int, 2> local_edge_vertices(int e, LocalEdge edge) const;
  /// Global start/end vertex of a global edge (increasing x or y).
  std::array<int, 2> global_edge_vertices(int g) const;
};

QuadMesh build_channel_mesh(int nx, int ny, double lx, double ly);

enum class BoundaryTag : std::uint8_t { inflow, outflow, wall };

/// One element edge on the domain boundary. [s0, s1] is the edge extent
/// along the boundary (x for bottom/top, y for left/right).
struct BoundaryEdge {
  int element = -1;
  LocalEdge edge = LocalEdge::bottom;
  BoundaryTag tag = BoundaryTag::wall;
  double s0 = 0.0;
  double s1 = 0.0;
};

struct InflowSpan {
  double y0 = 2.5;
  double y1 = 3.5;
};

/// Channel tagging: inflow on x = 0 over the span, outflow on x = lx, walls
/// elsewhere. Left edges overlapping the span are tagged inflow; if the span
/// does not fall on element edges, allow_subedge must be set.
std::vector<BoundaryEdge> tag_boundaries(const QuadMesh& mesh, InflowSpan span,
                                         bool allow_subedge = true);

/// Every boundary edge carries Dirichlet data (tagged inflow).
std::vector<BoundaryEdge> tag_all_dirichlet(const QuadMesh& mesh);

/// Local-to-global maps for the boundary velocity dofs, Dirichlet mask, and
/// the mean-pressure permutation.
///
/// Global boundary velocity numbering, per component: vertices, then the
/// p-1 modes of each horizontal edge, then of each vertical edge; the
/// y-component block follows the x-component block.
///
/// Pressure unknowns are element-discontinuous. The level-1 ordering is
/// [velocity boundary (global); pressure (element-major)]. The hat ordering
/// moves each element's mean pressure mode next to the boundary velocity:
/// [velocity boundary; mean pressure per element; remaining pressure modes].
struct DofMaps {
  int order = 0;
  int elements = 0;
  int scalar_global = 0;         // global boundary dofs of one scalar field
  int velocity_global = 0;       // 2 * scalar_global
  int local_boundary = 0;        // per element, both components: 2 * 4p
  int pressure_per_element = 0;  // (p-1)^2

  /// gather[e * local_boundary + k] = global velocity dof of local boundary dof k.
  std::vector<int> gather;
  std::vector<std::int8_t> sign;
  /// Global velocity dofs with prescribed values.
  std::vector<std::uint8_t> dirichlet_mask;
  /// True when no natural (outflow) boundary exists; the mean pressure of
  /// element 0 is then fixed to zero.
  bool pin_pressure = false;

  /// Permutation from level-1 index to hat index over velocity_global +
  /// elements * pressure_per_element entries, and its inverse.
  std::vector<int> mean_pressure_permutation;
  std::vector<int> inverse_permutation;

  /// Over the b_all() entries [velocity boundary; mean pressures]: position in
  /// the Dirichlet-eliminated b vector, or -1 for constrained entries.
  std::vector<int> free_index;
  int free_count = 0;

  int total_pressure() const { return elements * pressure_per_element; }
  int local_boundary_total() const { return elements * local_boundary; }
  int global_of(int e, int k) const { return gather[e * local_boundary + k]; }
  int sign_of(int e, int k) const { return sign[e * local_boundary + k]; }
  /// Dimension of b before Dirichlet elimination: velocity_global + elements.
  int b_all() const { return velocity_global + elements; }

  /// Scatter global boundary velocity to concatenated local boundary vectors.
  Eigen::VectorXd scatter(const Eigen::VectorXd& global) const;
  /// Transpose of scatter (sums contributions).
  Eigen::VectorXd gather_sum(const Eigen::VectorXd& local) const;
  /// Left inverse of scatter (averages contributions).
  Eigen::VectorXd gather_average(const Eigen::VectorXd& local) const;
  /// Hash of the gather/sign/mask tables.
  std::uint64_t checksum() const;
};

DofMaps build_dof_maps(const QuadMesh& mesh, const BasisSpec& spec,
                       const std::vector<BoundaryEdge>& tags);

}  // namespace semrb
