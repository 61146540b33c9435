#include <doctest.h>

#include <eoflab/errors.hpp>
#include <eoflab/optimality.hpp>
#include <eoflab/oracle.hpp>
#include <eoflab/solver.hpp>

#include "test_helpers.hpp"

using namespace eoflab;
using namespace eoflab::testkit;

namespace {
const FactorLayout kTwoQubit({2, 2}, {0});
}

TEST_CASE("closed form anchors: Bell, product, Werner family") {
  OracleResult bell = two_qubit_eof(DensityOperator::pure(bell_ket()));
  CHECK(bell.concurrence == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(bell.value == doctest::Approx(1.0).epsilon(1e-10));

  Rng rng(601);
  DensityOperator product =
      tensor(random_state(rng, 2, 2), random_state(rng, 2, 2));
  OracleResult prod = two_qubit_eof(product);
  CHECK(prod.concurrence < 1e-8);
  CHECK(prod.value < 1e-8);

  for (double p : {1.0 / 3.0, 0.5, 0.7, 0.9}) {
    OracleResult w = two_qubit_eof(werner(p));
    CHECK(w.value == doctest::Approx(werner_eof_reference(p)).epsilon(1e-10));
  }
}

TEST_CASE("the boundary Werner state is exactly separable") {
  OracleResult w = two_qubit_eof(werner(1.0 / 3.0));
  CHECK(w.concurrence < 1e-10);
  CHECK(w.value < 1e-10);
}

TEST_CASE("wrong dimensions are rejected") {
  CHECK_THROWS_AS(two_qubit_eof(DensityOperator::maximally_mixed(6)),
                  ParameterError);
}

TEST_CASE("optimal decomposition of a pure state is the state itself") {
  Rng rng(602);
  Ket psi = random_ket(rng, 4);
  PureDecomposition d =
      two_qubit_optimal_decomposition(DensityOperator::pure(psi));
  REQUIRE(d.size() == 1);
  CHECK(std::abs(std::abs(inner(d.kets[0], psi)) - 1.0) < 1e-10);
}

TEST_CASE("rank-2 Bell-diagonal mixtures have flat member entropies") {
  Vec minus = Vec::Zero(4);
  minus[0] = 1.0 / std::sqrt(2.0);
  minus[3] = -1.0 / std::sqrt(2.0);
  Mat mix = 0.75 * (bell_ket().amps * bell_ket().amps.adjoint()) +
            0.25 * (minus * minus.adjoint());
  PureDecomposition d = two_qubit_optimal_decomposition(DensityOperator(mix));
  REQUIRE(d.size() >= 2);
  double first = von_neumann_entropy(restrict_ket(d.kets[0], kTwoQubit));
  for (int i = 1; i < d.size(); ++i) {
    double si = von_neumann_entropy(
        restrict_ket(d.kets[static_cast<std::size_t>(i)], kTwoQubit));
    CHECK(std::abs(si - first) < 1e-9);
  }
}

TEST_CASE("decomposition average reproduces the closed form") {
  SUBCASE("Werner 0.9") {
    PureDecomposition d = two_qubit_optimal_decomposition(werner(0.9));
    CHECK(std::abs(average_entanglement(d, kTwoQubit) -
                   werner_eof_reference(0.9)) < 1e-9);
  }
  SUBCASE("random battery across ranks, entangled and separable") {
    Rng rng(603);
    for (int t = 0; t < 60; ++t) {
      DensityOperator rho = random_state(rng, 4, 1 + t % 4);
      PureDecomposition d = two_qubit_optimal_decomposition(rho);
      double avg = average_entanglement(d, kTwoQubit);
      CHECK(std::abs(avg - two_qubit_eof(rho).value) < 1e-9);
      CHECK(validate_decomposition(d, rho).max_entry_error < 1e-9);
    }
  }
}

TEST_CASE("closed form is invariant under local unitaries") {
  Rng rng(604);
  for (int t = 0; t < 10; ++t) {
    DensityOperator rho = random_state(rng, 4, 4);
    Mat u = la::kron(random_unitary(rng, 2), random_unitary(rng, 2));
    DensityOperator rotated(Mat(u.adjoint() * rho.mat() * u));
    CHECK(std::abs(two_qubit_eof(rotated).value - two_qubit_eof(rho).value) <
          1e-10);
  }
}

TEST_CASE("oracle decomposition pairs satisfy the pair condition") {
  // ties the constructive decomposition to the sampled certificate
  Rng rng(605);
  for (int t = 0; t < 4; ++t) {
    DensityOperator rho = random_state(rng, 4, 4);
    PureDecomposition d = two_qubit_optimal_decomposition(rho);
    for (int i = 0; i < d.size(); ++i) {
      for (int j = i + 1; j < d.size(); ++j) {
        CHECK(check_pair(d.kets[static_cast<std::size_t>(i)],
                         d.kets[static_cast<std::size_t>(j)], kTwoQubit)
                  .pass);
      }
    }
  }
}

TEST_CASE("grid oracle equals the restricted entropy on pure states") {
  Rng rng(606);
  Ket psi = random_ket(rng, 4);
  OracleResult res =
      grid_eof(DensityOperator::pure(psi), kTwoQubit, 16);
  CHECK(res.value ==
        doctest::Approx(von_neumann_entropy(restrict_ket(psi, kTwoQubit)))
            .epsilon(1e-10));
}

TEST_CASE("grid oracle agrees with the closed form on rank-2 states") {
  Rng rng(607);
  for (int t = 0; t < 12; ++t) {
    DensityOperator rho = random_state(rng, 4, 2);
    double grid = grid_eof(rho, kTwoQubit, 64).value;
    double closed = two_qubit_eof(rho).value;
    CHECK(std::abs(grid - closed) < 5e-3);
    CHECK(grid >= closed - 1e-9);  // the grid is an upper bound
  }
}

TEST_CASE("grid refinement is monotone when densities nest") {
  Rng rng(608);
  DensityOperator rho = random_state(rng, 4, 2);
  double coarse = grid_eof(rho, kTwoQubit, 16).value;
  double fine = grid_eof(rho, kTwoQubit, 64).value;
  CHECK(fine <= coarse + 1e-12);
}

TEST_CASE("grid oracle guards its cost") {
  Rng rng(609);
  CHECK_THROWS_AS(
      grid_eof(random_state(rng, 4, 3), kTwoQubit, 16), SizeError);
  CHECK_THROWS_AS(grid_eof(DensityOperator::maximally_mixed(16),
                           FactorLayout({4, 4}, {0}), 16),
                  SizeError);
}
