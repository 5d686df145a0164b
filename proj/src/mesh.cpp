#include "semrb/mesh.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "semrb/errors.hpp"

namespace semrb {

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

void fnv_mix(std::uint64_t& h, std::uint64_t value) {
  for (int b = 0; b < 8; ++b) {
    h ^= (value >> (8 * b)) & 0xffu;
    h *= kFnvPrime;
  }
}

bool on_grid_line(double y, double h, int n) {
  const double t = y / h;
  const double r = std::round(t);
  return r >= 0 && r <= n && std::abs(t - r) < 1e-12 * std::max(1.0, std::abs(t));
}

}  // namespace

std::array<int, 4> QuadMesh::element_vertices(int e) const {
  const Element& el = elements[e];
  return {vertex_id(el.ex, el.ey), vertex_id(el.ex + 1, el.ey), vertex_id(el.ex + 1, el.ey + 1),
          vertex_id(el.ex, el.ey + 1)};
}

int QuadMesh::element_edge(int e, LocalEdge edge) const {
  const Element& el = elements[e];
  switch (edge) {
    case LocalEdge::bottom: return horizontal_edge(el.ex, el.ey);
    case LocalEdge::right: return vertical_edge(el.ex + 1, el.ey);
    case LocalEdge::top: return horizontal_edge(el.ex, el.ey + 1);
    case LocalEdge::left: return vertical_edge(el.ex, el.ey);
  }
  return -1;
}

std::array<int, 2> QuadMesh::local_edge_vertices(int e, LocalEdge edge) const {
  const auto v = element_vertices(e);
  switch (edge) {
    case LocalEdge::bottom: return {v[0], v[1]};
    case LocalEdge::right: return {v[1], v[2]};
    case LocalEdge::top: return {v[3], v[2]};
    case LocalEdge::left: return {v[0], v[3]};
  }
  return {-1, -1};
}

std::array<int, 2> QuadMesh::global_edge_vertices(int g) const {
  if (g < horizontal_edge_count()) {
    const int i = g % nx;
    const int j = g / nx;
    return {vertex_id(i, j), vertex_id(i + 1, j)};
  }
  const int r = g - horizontal_edge_count();
  const int i = r % (nx + 1);
  const int j = r / (nx + 1);
  return {vertex_id(i, j), vertex_id(i, j + 1)};
}

QuadMesh build_channel_mesh(int nx, int ny, double lx, double ly) {
  if (nx < 1 || ny < 1) {
    throw std::invalid_argument("mesh needs nx, ny >= 1, got " + std::to_string(nx) + "x" +
                                std::to_string(ny));
  }
  if (!(lx > 0.0) || !(ly > 0.0)) {
    throw std::invalid_argument("mesh lengths must be positive");
  }
  QuadMesh mesh;
  mesh.nx = nx;
  mesh.ny = ny;
  mesh.lx = lx;
  mesh.ly = ly;
  const double hx = lx / nx;
  const double hy = ly / ny;
  for (int ey = 0; ey < ny; ++ey) {
    for (int ex = 0; ex < nx; ++ex) {
      mesh.elements.push_back({ex, ey, ex * hx, ey * hy, hx, hy});
    }
  }

  auto link = [&](int g, int e0, LocalEdge l0, int e1, LocalEdge l1) {
    EdgeLink edge;
    edge.global_edge = g;
    edge.element = {e0, e1};
    edge.local_edge = {static_cast<int>(l0), static_cast<int>(l1)};
    edge.sign = mesh.local_edge_vertices(e0, l0) == mesh.local_edge_vertices(e1, l1) ? 1 : -1;
    mesh.interior_edges.push_back(edge);
  };
  for (int j = 1; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      link(mesh.horizontal_edge(i, j), mesh.element_id(i, j - 1), LocalEdge::top,
           mesh.element_id(i, j), LocalEdge::bottom);
    }
  }
  for (int j = 0; j < ny; ++j) {
    for (int i = 1; i < nx; ++i) {
      link(mesh.vertical_edge(i, j), mesh.element_id(i - 1, j), LocalEdge::right,
           mesh.element_id(i, j), LocalEdge::left);
    }
  }
  return mesh;
}

std::vector<BoundaryEdge> tag_boundaries(const QuadMesh& mesh, InflowSpan span,
                                         bool allow_subedge) {
  if (!(span.y0 >= 0.0 && span.y0 < span.y1 && span.y1 <= mesh.ly)) {
    throw ConfigError("inflow span must satisfy 0 <= y0 < y1 <= Ly");
  }
  const double hy = mesh.ly / mesh.ny;
  if (!allow_subedge && !(on_grid_line(span.y0, hy, mesh.ny) && on_grid_line(span.y1, hy, mesh.ny))) {
    throw ConfigError("inflow span [" + std::to_string(span.y0) + ", " + std::to_string(span.y1) +
                      "] does not fall on element edges; enable sub-edge Dirichlet sampling");
  }
  std::vector<BoundaryEdge> tags;
  for (int i = 0; i < mesh.nx; ++i) {
    const Element& b = mesh.elements[mesh.element_id(i, 0)];
    tags.push_back({b.ex + mesh.nx * b.ey, LocalEdge::bottom, BoundaryTag::wall, b.x0, b.x0 + b.hx});
    const int et = mesh.element_id(i, mesh.ny - 1);
    const Element& t = mesh.elements[et];
    tags.push_back({et, LocalEdge::top, BoundaryTag::wall, t.x0, t.x0 + t.hx});
  }
  for (int j = 0; j < mesh.ny; ++j) {
    const int er = mesh.element_id(mesh.nx - 1, j);
    const Element& r = mesh.elements[er];
    tags.push_back({er, LocalEdge::right, BoundaryTag::outflow, r.y0, r.y0 + r.hy});
    const int el = mesh.element_id(0, j);
    const Element& l = mesh.elements[el];
    const double lo = std::max(l.y0, span.y0);
    const double hi = std::min(l.y0 + l.hy, span.y1);
    const BoundaryTag tag = hi - lo > 1e-14 ? BoundaryTag::inflow : BoundaryTag::wall;
    tags.push_back({el, LocalEdge::left, tag, l.y0, l.y0 + l.hy});
  }
  return tags;
}

std::vector<BoundaryEdge> tag_all_dirichlet(const QuadMesh& mesh) {
  auto tags = tag_boundaries(mesh, {0.0, mesh.ly}, true);
  for (auto& t : tags) t.tag = BoundaryTag::inflow;
  return tags;
}

DofMaps build_dof_maps(const QuadMesh& mesh, const BasisSpec& spec,
                       const std::vector<BoundaryEdge>& tags) {
  spec.validate();
  const int p = spec.order_velocity;
  const int per_edge = p - 1;
  DofMaps maps;
  maps.order = p;
  maps.elements = mesh.size();
  maps.scalar_global = mesh.vertex_count() + per_edge * mesh.edge_count();
  maps.velocity_global = 2 * maps.scalar_global;
  maps.local_boundary = 2 * spec.boundary_modes();
  maps.pressure_per_element = spec.pressure_modes();

  const int nb = spec.boundary_modes();
  maps.gather.assign(maps.local_boundary_total(), -1);
  maps.sign.assign(maps.local_boundary_total(), 1);

  const int nv = mesh.vertex_count();
  auto edge_dof = [&](int g, int mode) { return nv + g * per_edge + (mode - 1); };
  constexpr LocalEdge kEdges[4] = {LocalEdge::bottom, LocalEdge::right, LocalEdge::top,
                                   LocalEdge::left};

  for (int e = 0; e < mesh.size(); ++e) {
    std::vector<int> scalar(nb);
    std::vector<int> sgn(nb, 1);
    const auto verts = mesh.element_vertices(e);
    for (int v = 0; v < 4; ++v) scalar[v] = verts[v];
    for (int le = 0; le < 4; ++le) {
      const int g = mesh.element_edge(e, kEdges[le]);
      const bool aligned = mesh.local_edge_vertices(e, kEdges[le]) == mesh.global_edge_vertices(g);
      for (int mode = 1; mode <= per_edge; ++mode) {
        const int k = 4 + le * per_edge + (mode - 1);
        scalar[k] = edge_dof(g, mode);
        // Interior mode i carries P^{(1,1)}_{i-1}, odd in xi for even i.
        sgn[k] = (aligned || (mode - 1) % 2 == 0) ? 1 : -1;
      }
    }
    for (int c = 0; c < 2; ++c) {
      for (int k = 0; k < nb; ++k) {
        const int idx = e * maps.local_boundary + c * nb + k;
        maps.gather[idx] = scalar[k] + c * maps.scalar_global;
        maps.sign[idx] = static_cast<std::int8_t>(sgn[k]);
      }
    }
  }

  maps.dirichlet_mask.assign(maps.velocity_global, 0);
  bool has_outflow = false;
  for (const auto& t : tags) {
    if (t.tag == BoundaryTag::outflow) {
      has_outflow = true;
      continue;
    }
    const auto ends = mesh.local_edge_vertices(t.element, t.edge);
    const int g = mesh.element_edge(t.element, t.edge);
    std::vector<int> dofs = {ends[0], ends[1]};
    for (int mode = 1; mode <= per_edge; ++mode) dofs.push_back(edge_dof(g, mode));
    for (int d : dofs) {
      maps.dirichlet_mask[d] = 1;
      maps.dirichlet_mask[d + maps.scalar_global] = 1;
    }
  }
  maps.pin_pressure = !has_outflow;

  const int np = maps.pressure_per_element;
  const int total = maps.velocity_global + maps.total_pressure();
  maps.mean_pressure_permutation.resize(total);
  maps.inverse_permutation.resize(total);
  for (int i = 0; i < maps.velocity_global; ++i) maps.mean_pressure_permutation[i] = i;
  for (int e = 0; e < maps.elements; ++e) {
    for (int k = 0; k < np; ++k) {
      const int from = maps.velocity_global + e * np + k;
      const int to = k == 0 ? maps.velocity_global + e
                            : maps.velocity_global + maps.elements + e * (np - 1) + (k - 1);
      maps.mean_pressure_permutation[from] = to;
    }
  }
  for (int i = 0; i < total; ++i) maps.inverse_permutation[maps.mean_pressure_permutation[i]] = i;

  maps.free_index.assign(maps.b_all(), -1);
  for (int i = 0; i < maps.b_all(); ++i) {
    const bool fixed = i < maps.velocity_global ? maps.dirichlet_mask[i] != 0
                                                : (maps.pin_pressure && i == maps.velocity_global);
    if (!fixed) maps.free_index[i] = maps.free_count++;
  }
  return maps;
}

Eigen::VectorXd DofMaps::scatter(const Eigen::VectorXd& global) const {
  if (global.size() != velocity_global) {
    throw std::invalid_argument("scatter: expected global vector of size " +
                                std::to_string(velocity_global));
  }
  Eigen::VectorXd local(local_boundary_total());
  for (int i = 0; i < local.size(); ++i) local(i) = sign[i] * global(gather[i]);
  return local;
}

Eigen::VectorXd DofMaps::gather_sum(const Eigen::VectorXd& local) const {
  if (local.size() != local_boundary_total()) {
    throw std::invalid_argument("gather: expected local vector of size " +
                                std::to_string(local_boundary_total()));
  }
  Eigen::VectorXd global = Eigen::VectorXd::Zero(velocity_global);
  for (int i = 0; i < local.size(); ++i) global(gather[i]) += sign[i] * local(i);
  return global;
}

Eigen::VectorXd DofMaps::gather_average(const Eigen::VectorXd& local) const {
  Eigen::VectorXd global = gather_sum(local);
  Eigen::VectorXd count = Eigen::VectorXd::Zero(velocity_global);
  for (int g : gather) count(g) += 1.0;
  return global.cwiseQuotient(count);
}

std::uint64_t DofMaps::checksum() const {
  std::uint64_t h = kFnvOffset;
  fnv_mix(h, static_cast<std::uint64_t>(order));
  fnv_mix(h, static_cast<std::uint64_t>(elements));
  for (int g : gather) fnv_mix(h, static_cast<std::uint64_t>(g));
  for (auto s : sign) fnv_mix(h, static_cast<std::uint64_t>(s + 1));
  for (auto m : dirichlet_mask) fnv_mix(h, m);
  fnv_mix(h, pin_pressure ? 1u : 0u);
  return h;
}

}  // namespace semrb
