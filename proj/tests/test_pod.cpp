#include <doctest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include "semrb/pod.hpp"

using namespace semrb;

TEST_CASE("rank-one snapshots give one mode") {
  const Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(20, 1.0, 3.0);
  Eigen::MatrixXd S(20, 4);
  for (int j = 0; j < 4; ++j) S.col(j) = (j + 1.0) * v;
  const PodBasis b = pod(S, 1.0);
  CHECK(b.n == 1);
  CHECK(std::abs(std::abs(b.modes.col(0).dot(v.normalized())) - 1.0) < 1e-13);
  CHECK(b.truncation_tail() < 1e-7);
}

TEST_CASE("two orthogonal snapshots are their own modes") {
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(6, 2);
  S(0, 0) = 3.0;
  S(2, 1) = 4.0;
  const PodBasis b = pod(S, 1.0);
  REQUIRE(b.n == 2);
  CHECK(b.singular_values(0) == doctest::Approx(4.0));
  CHECK(b.singular_values(1) == doctest::Approx(3.0));
  CHECK(std::abs(b.modes(2, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(b.modes(0, 1)) == doctest::Approx(1.0));
  const PodBasis t = pod(S, 0.6);
  CHECK(t.n == 1);
  CHECK(t.energy_fraction == doctest::Approx(16.0 / 25.0));
  CHECK(t.truncation_tail() == doctest::Approx(0.6));
}

TEST_CASE("count truncation keeps a share of the nonzero modes") {
  Eigen::VectorXd s(5);
  s << 10.0, 1.0, 0.1, 0.01, 0.0;
  CHECK(pod_truncation(s, 0.5, 20, 5, Truncation::count) == 2);
  CHECK(pod_truncation(s, 0.75, 20, 5, Truncation::count) == 3);
  CHECK(pod_truncation(s, 0.01, 20, 5, Truncation::count) == 1);
  CHECK(pod_truncation(s, 1.0, 20, 5, Truncation::count) == 4);
  // the energy reading of the same fraction keeps fewer modes here
  CHECK(pod_truncation(s, 0.5, 20, 5) == 1);
}

TEST_CASE("POD agrees with the eigen-decomposition of the Gram matrix") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> n01;
  Eigen::MatrixXd S(50, 8);
  for (int j = 0; j < 8; ++j) {
    for (int i = 0; i < 50; ++i) S(i, j) = n01(rng) * std::pow(0.5, j);
  }
  const PodBasis b = pod(S, 1.0);
  REQUIRE(b.n == 8);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S.transpose() * S);
  for (int k = 0; k < 8; ++k) {
    const double lambda = es.eigenvalues()(7 - k);
    CHECK(b.singular_values(k) == doctest::Approx(std::sqrt(lambda)).epsilon(1e-10));
    const Eigen::VectorXd mode = S * es.eigenvectors().col(7 - k) / std::sqrt(lambda);
    CHECK(std::abs(std::abs(mode.dot(b.modes.col(k))) - 1.0) < 1e-9);
  }
  CHECK((b.modes.transpose() * b.modes - Eigen::MatrixXd::Identity(8, 8)).norm() < 1e-12);
}

TEST_CASE("truncation is the smallest count reaching the energy fraction") {
  Eigen::VectorXd s(4);
  s << 3.0, 2.0, 1.0, 0.5;  // energies 9, 4, 1, 0.25 of 14.25
  CHECK(pod_truncation(s, 9.0 / 14.25, 10, 4) == 1);
  CHECK(pod_truncation(s, 9.0 / 14.25 + 1e-9, 10, 4) == 2);
  CHECK(pod_truncation(s, 0.99, 10, 4) == 4);
  CHECK(pod_truncation(s, 1.0, 10, 4) == 4);
  s(3) = 1e-20;
  CHECK(pod_truncation(s, 1.0, 10, 4) == 3);
}

TEST_CASE("projection error equals the truncation tail") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n01;
  Eigen::MatrixXd S(40, 10);
  for (int j = 0; j < 10; ++j) {
    for (int i = 0; i < 40; ++i) S(i, j) = n01(rng) * std::pow(0.3, j);
  }
  const PodBasis b = pod(S, 0.999);
  const Eigen::MatrixXd residual = S - b.modes * (b.modes.transpose() * S);
  CHECK(residual.norm() / S.norm() == doctest::Approx(b.truncation_tail()).epsilon(1e-8));
  CHECK(b.energy_fraction >= 0.999);
}

TEST_CASE("invalid POD input") {
  CHECK_THROWS_AS(pod(Eigen::MatrixXd(0, 0)), std::invalid_argument);
  CHECK_THROWS_AS(pod(Eigen::MatrixXd::Ones(3, 2), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(pod(Eigen::MatrixXd::Ones(3, 2), 1.5), std::invalid_argument);
}
