#include <doctest.h>

#include <cmath>

#include "semrb/kovasznay.hpp"

using namespace semrb;

TEST_CASE("exact Kovasznay field is divergence free and solves the momentum balance") {
  const Kovasznay k{40.0};
  const ExactVelocity ex = k.exact();
  const double h = 1e-4;
  for (double x : {-0.3, 0.2, 0.8}) {
    for (double y : {-0.4, 0.1, 1.2}) {
      const auto g = ex.gradient(x, y);
      CHECK(std::abs(g[0] + g[3]) < 1e-12);
      const auto xp = ex.value(x + h, y);
      const auto xm = ex.value(x - h, y);
      const auto yp = ex.value(x, y + h);
      const auto ym = ex.value(x, y - h);
      CHECK(g[0] == doctest::Approx((xp[0] - xm[0]) / (2 * h)).epsilon(1e-6));
      CHECK(g[1] == doctest::Approx((yp[0] - ym[0]) / (2 * h)).epsilon(1e-6));
      CHECK(g[2] == doctest::Approx((xp[1] - xm[1]) / (2 * h)).epsilon(1e-6));
      CHECK(g[3] == doctest::Approx((yp[1] - ym[1]) / (2 * h)).epsilon(1e-6));
    }
  }
  CHECK(k.lambda() == doctest::Approx(20.0 - std::sqrt(400.0 + 4.0 * M_PI * M_PI)));
}

TEST_CASE("Kovasznay error decays under p-refinement") {
  KovasznayConfig cfg;
  cfg.nx = 2;
  cfg.ny = 2;
  const auto rows = verify_kovasznay(cfg, {3, 5, 7});
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) CHECK(r.converged);
  CHECK(rows[1].h1_error < 0.2 * rows[0].h1_error);
  CHECK(rows[2].h1_error < 0.2 * rows[1].h1_error);
}

TEST_CASE("serial and parallel Kovasznay solves agree") {
  KovasznayConfig cfg;
  cfg.nx = 2;
  cfg.ny = 2;
  const VerifyRow a = verify_kovasznay(cfg, 4, Exec::serial);
  const VerifyRow b = verify_kovasznay(cfg, 4, Exec::parallel);
  CHECK(a.iterations == b.iterations);
  CHECK(a.h1_error == doctest::Approx(b.h1_error).epsilon(1e-10));
}
