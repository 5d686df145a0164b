#include "semrb/kovasznay.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

namespace semrb {

namespace {

constexpr double kShift = 0.5;

}  // namespace

double Kovasznay::lambda() const {
  const double pi = std::numbers::pi;
  return 0.5 * re - std::sqrt(0.25 * re * re + 4.0 * pi * pi);
}

ExactVelocity Kovasznay::exact() const {
  const double lam = lambda();
  const double k = 2.0 * std::numbers::pi;
  ExactVelocity ex;
  ex.value = [lam, k](double x, double y) -> std::array<double, 2> {
    const double xs = x - kShift, ys = y - kShift;
    const double e = std::exp(lam * xs);
    return {1.0 - e * std::cos(k * ys), lam / k * e * std::sin(k * ys)};
  };
  ex.gradient = [lam, k](double x, double y) -> std::array<double, 4> {
    const double xs = x - kShift, ys = y - kShift;
    const double e = std::exp(lam * xs);
    const double c = std::cos(k * ys), s = std::sin(k * ys);
    return {-lam * e * c, k * e * s, lam * lam / k * e * s, lam * e * c};
  };
  return ex;
}

Discretization build_kovasznay(const KovasznayConfig& cfg, int order) {
  QuadMesh mesh = build_channel_mesh(cfg.nx, cfg.ny, 1.5, 2.0);
  auto tags = tag_all_dirichlet(mesh);
  return Discretization::build(std::move(mesh), BasisSpec::make(order), std::move(tags));
}

VerifyRow verify_kovasznay(const KovasznayConfig& cfg, int order, Exec exec) {
  const Discretization disc = build_kovasznay(cfg, order);
  const Kovasznay flow{cfg.re};
  const ExactVelocity exact = flow.exact();
  OseenSolver solver(disc, dirichlet_values(disc, exact.value), {}, exec);

  const auto t0 = std::chrono::steady_clock::now();
  const SteadyResult res = solver.solve_steady(flow.nu(), FlowField::zero(disc), cfg.iteration);
  VerifyRow row;
  row.order = order;
  row.iterations = res.iterations;
  row.converged = res.converged;
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const int points = cfg.error_points > 0 ? cfg.error_points : order + 8;
  row.h1_error = h1_error_against(disc, res.field, exact, points);
  return row;
}

std::vector<VerifyRow> verify_kovasznay(const KovasznayConfig& cfg, const std::vector<int>& orders,
                                        Exec exec) {
  std::vector<VerifyRow> rows;
  rows.reserve(orders.size());
  for (int p : orders) rows.push_back(verify_kovasznay(cfg, p, exec));
  return rows;
}

}  // namespace semrb
