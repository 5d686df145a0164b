#pragma once

#include <vector>

#include "semrb/discretization.hpp"
#include "semrb/flow_field.hpp"
#include "semrb/solver.hpp"

namespace semrb {

/// Kovasznay flow at Reynolds number re on [-0.5, 1] x [-0.5, 1.5]:
///   u = 1 - exp(lambda x) cos(2 pi y),  v = lambda / (2 pi) exp(lambda x) sin(2 pi y)
/// with lambda = re/2 - sqrt(re^2/4 + 4 pi^2) and viscosity 1/re.
struct Kovasznay {
  double re = 40.0;

  double lambda() const;
  double nu() const { return 1.0 / re; }
  ExactVelocity exact() const;
};

struct KovasznayConfig {
  int nx = 4;
  int ny = 4;
  double re = 40.0;
  IterationConfig iteration{};
  int error_points = 0;  // 0 -> order + 8
};

struct VerifyRow {
  int order = 0;
  double h1_error = 0.0;
  int iterations = 0;
  bool converged = false;
  double seconds = 0.0;
};

/// The shifted domain uses the channel mesh builder on [0, 1.5] x [0, 2];
/// the exact solution is evaluated at (x - 0.5, y - 0.5).
Discretization build_kovasznay(const KovasznayConfig& cfg, int order);

/// One steady solve from the zero field; error is the relative velocity H1 error.
VerifyRow verify_kovasznay(const KovasznayConfig& cfg, int order, Exec exec = Exec::parallel);

std::vector<VerifyRow> verify_kovasznay(const KovasznayConfig& cfg, const std::vector<int>& orders,
                                        Exec exec = Exec::parallel);

}  // namespace semrb
