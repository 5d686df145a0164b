#include <doctest.h>

#include <random>

#include "semrb/condense.hpp"
#include "semrb/kovasznay.hpp"
#include "support.hpp"

using namespace semrb;
using semrb::testing::flatten;
using semrb::testing::relative_difference;

namespace {

Discretization small_channel(int order) {
  ChannelConfig cfg;
  cfg.nx = 2;
  cfg.ny = 2;
  cfg.order = order;
  return build_channel(cfg);
}

VelocityFunction smooth_forcing() {
  return [](double x, double y) {
    return std::array<double, 2>{std::sin(0.3 * x) * std::cos(y), 0.2 * std::cos(0.1 * x + y)};
  };
}

}  // namespace

TEST_CASE("condensed solve matches the monolithic system on random Oseen data") {
  std::mt19937_64 rng(7);
  for (int order : {3, 4, 5}) {
    const Discretization disc = small_channel(order);
    const Eigen::VectorXd g = dirichlet_values(disc, channel_inflow({2.5, 3.5}), {2.5, 3.5});
    for (int trial = 0; trial < 3; ++trial) {
      const FlowField uk = testing::random_field(disc, rng, 0.5, g);
      const double nu = std::uniform_real_distribution<double>(0.002, 0.05)(rng);
      const LocalBlockSystem local = assemble_oseen(disc, nu, &uk, smooth_forcing());
      const CondensedSolve cs = solve_oseen_system(disc, local, g);
      const FlowField ref = testing::monolithic_solve(disc, local, g);
      CAPTURE(order);
      CHECK(relative_difference(flatten(ref), flatten(cs.field)) < 1e-9);
      CHECK(cs.residual < 1e-10);
    }
  }
}

TEST_CASE("condensation with a pinned pressure matches the monolithic system") {
  KovasznayConfig kc;
  kc.nx = 2;
  kc.ny = 2;
  const Discretization disc = build_kovasznay(kc, 4);
  REQUIRE(disc.maps.pin_pressure);
  const Kovasznay k{kc.re};
  const Eigen::VectorXd g = dirichlet_values(disc, [&](double x, double y) {
    return k.exact().value(x - 0.5, y - 0.5);
  });
  std::mt19937_64 rng(11);
  const FlowField uk = testing::random_field(disc, rng, 1.0, g);
  const LocalBlockSystem local = assemble_oseen(disc, k.nu(), &uk);
  const CondensedSolve cs = solve_oseen_system(disc, local, g);
  const FlowField ref = testing::monolithic_solve(disc, local, g);
  CHECK(relative_difference(flatten(ref), flatten(cs.field)) < 1e-9);
}

TEST_CASE("serial and parallel condensation agree") {
  const Discretization disc = small_channel(5);
  const Eigen::VectorXd g = dirichlet_values(disc, channel_inflow({2.5, 3.5}), {2.5, 3.5});
  std::mt19937_64 rng(3);
  const FlowField uk = testing::random_field(disc, rng, 0.3, g);
  const LocalBlockSystem local = assemble_oseen(disc, 0.01, &uk);
  const CondensedSolve a = solve_oseen_system(disc, local, g, Exec::serial);
  const CondensedSolve b = solve_oseen_system(disc, local, g, Exec::parallel);
  CHECK(relative_difference(flatten(a.field), flatten(b.field)) < 1e-13);
  CHECK(a.schur_size == disc.maps.free_count);
}

TEST_CASE("the solved field carries the Dirichlet data and is discretely divergence free") {
  const Discretization disc = small_channel(6);
  const Eigen::VectorXd g = dirichlet_values(disc, channel_inflow({2.5, 3.5}), {2.5, 3.5});
  const LocalBlockSystem local = assemble_oseen(disc, 0.05, nullptr);
  const CondensedSolve cs = solve_oseen_system(disc, local, g);
  for (int e = 0; e < disc.elements(); ++e) {
    const Eigen::VectorXd vb = local_boundary(disc, cs.field, e);
    for (int k = 0; k < disc.local_boundary(); ++k) {
      const int gi = disc.maps.global_of(e, k);
      if (disc.maps.dirichlet_mask[gi]) CHECK(vb(k) == doctest::Approx(disc.maps.sign_of(e, k) * g(gi)));
    }
  }
  CHECK(divergence_moments(disc, cs.field).cwiseAbs().maxCoeff() < 1e-12);
}
