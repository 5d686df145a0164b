#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "semrb/discretization.hpp"
#include "semrb/flow_field.hpp"
#include "semrb/parallel.hpp"
#include "semrb/pod.hpp"
#include "semrb/solver.hpp"

namespace semrb {

/// Converged full-order states. Each state column is the hat-ordered unknown
/// [free velocity boundary and mean pressures; non-mean pressures]; each
/// interior column holds the interior velocity of all elements. All
/// snapshots share the Dirichlet data in `lift`.
struct SnapshotSet {
  std::uint64_t fingerprint = 0;
  std::vector<double> nus;
  Eigen::MatrixXd states;
  Eigen::MatrixXd interiors;
  Eigen::VectorXd lift;  // prescribed global boundary velocity

  int size() const { return static_cast<int>(nus.size()); }
  /// Throws std::invalid_argument on inconsistent shapes or repeated nu.
  void validate() const;
};

struct SplitState {
  Eigen::VectorXd state;
  Eigen::VectorXd interior;
};

SplitState split_state(const Discretization& disc, const FlowField& field);

/// Inverse of split_state given the Dirichlet values.
FlowField join_state(const Discretization& disc, const Eigen::VectorXd& state,
                     const Eigen::VectorXd& interior, const Eigen::VectorXd& lift);

SnapshotSet collect_snapshots(const Discretization& disc, const Eigen::VectorXd& lift,
                              const std::vector<double>& nus,
                              const std::vector<FlowField>& fields);

/// U = P M V: POD modes V over the hat state, scattered (M) to local element
/// boundaries with orientation signs and permuted (P) back to the element
/// layout [v_bnd; p]. Dirichlet rows are zero.
class Projection {
 public:
  Projection(const Discretization& disc, Eigen::MatrixXd modes);

  int size() const { return static_cast<int>(modes_.cols()); }
  int local_size() const { return disc_->elements() * block_; }
  const Eigen::MatrixXd& modes() const { return modes_; }

  /// Reduced coordinates -> concatenated element vectors [v_bnd; p].
  Eigen::VectorXd apply(const Eigen::VectorXd& a) const;
  /// Exact transpose of apply: shared boundary entries are summed.
  Eigen::VectorXd transpose_apply(const Eigen::VectorXd& local) const;
  /// Left inverse of apply: shared entries are averaged before projecting.
  Eigen::VectorXd restrict(const Eigen::VectorXd& local) const;
  /// Rows of U belonging to element e, (v_bnd + p) x N.
  Eigen::MatrixXd element_block(int e) const;

 private:
  Eigen::VectorXd hat_from_local(const Eigen::VectorXd& local, bool average) const;

  const Discretization* disc_;
  Eigen::MatrixXd modes_;
  int block_ = 0;
};

/// Reduced operators on the augmented basis blockdiag(U, W) where W spans
/// the interior velocity snapshots. Coordinates c = [a; d].
///   A_N(nu, c) = nu K_visc + K_fixed + sum_m c_m T_m
///   r_N(nu, c) = nu r_visc + r_fixed + R_conv c
struct RomOperators {
  std::uint64_t fingerprint = 0;
  PodBasis state_pod;
  PodBasis interior_pod;
  Eigen::MatrixXd K_visc;
  Eigen::MatrixXd K_fixed;
  Eigen::MatrixXd T;  // N^2 x N, column m = vec(T_m)
  Eigen::VectorXd r_visc;
  Eigen::VectorXd r_fixed;
  Eigen::MatrixXd R_conv;
  Eigen::VectorXd lift;
  std::vector<double> training_nus;
  Eigen::MatrixXd training_coords;  // N x k

  int na() const { return state_pod.n; }
  int nd() const { return interior_pod.n; }
  int size() const { return na() + nd(); }

  Eigen::MatrixXd assemble(double nu, const Eigen::VectorXd& c) const;
  Eigen::VectorXd rhs(double nu, const Eigen::VectorXd& c) const;
};

/// Per element, the augmented basis in the local layout [v_bnd; p; v_int].
std::vector<Eigen::MatrixXd> element_bases(const Discretization& disc, const Eigen::MatrixXd& U,
                                           const Eigen::MatrixXd& W);

/// Offline phase. POD both snapshot blocks, then project the viscous,
/// pressure and lift-convective blocks once and the convective block of
/// every basis function. Throws std::runtime_error if the online operator
/// does not reproduce a direct projection at a random point within 1e-9.
RomOperators offline_build(const Discretization& disc, const SnapshotSet& snapshots,
                           double energy = 0.999, Exec exec = Exec::parallel,
                           Truncation rule = Truncation::energy);

/// Sum over elements of Phi_e^T G_e(nu, u) Phi_e with G freshly assembled
/// at u = lift + Phi c.
Eigen::MatrixXd direct_reduced_operator(const Discretization& disc, const RomOperators& ops,
                                        double nu, const Eigen::VectorXd& c,
                                        Exec exec = Exec::parallel);

/// ||online - direct||_F / ||direct||_F.
double reduced_operator_mismatch(const Discretization& disc, const RomOperators& ops, double nu,
                                 const Eigen::VectorXd& c, Exec exec = Exec::parallel);

/// oseen: reduced fixed point on the frozen-convection operator.
/// newton: Newton on A_N(nu, c) c - r_N(nu, c) with the tensor Jacobian,
/// backtracking until the residual norm decreases.
/// automatic: newton from the seed, then oseen from the seed if newton fails.
enum class RomMethod { oseen, newton, automatic };

struct RomResult {
  Eigen::VectorXd coords;
  RomMethod method = RomMethod::oseen;  // the method that produced coords
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;
  std::vector<double> iteration_seconds;
};

/// Reduced iteration. Each linear solve eliminates the interior
/// coordinates d and solves for a. Starts from `initial` or from zero; stops
/// on the relative change of c.
RomResult rom_solve(const RomOperators& ops, double nu, const IterationConfig& cfg,
                    const std::optional<Eigen::VectorXd>& initial = {},
                    RomMethod method = RomMethod::oseen);

/// ||A_N(nu, c) c - r_N(nu, c)||.
double reduced_residual(const RomOperators& ops, double nu, const Eigen::VectorXd& c);

/// d/dc of A_N(nu, c) c - r_N(nu, c).
Eigen::MatrixXd reduced_jacobian(const RomOperators& ops, double nu, const Eigen::VectorXd& c);

/// Lift reduced coordinates to a full field: U a, W d and the Dirichlet data.
FlowField recover_full(const Discretization& disc, const RomOperators& ops,
                       const Eigen::VectorXd& coords);

/// Training coordinates of the snapshot whose nu is closest.
Eigen::VectorXd nearest_training_coords(const RomOperators& ops, double nu);

}  // namespace semrb
