#include <doctest.h>

#include <eoflab/additivity.hpp>
#include <eoflab/errors.hpp>
#include <eoflab/oracle.hpp>

#include "test_helpers.hpp"

using namespace eoflab;
using namespace eoflab::testkit;

namespace {
const FactorLayout kTwoQubit({2, 2}, {0});

SolverConfig quick(std::uint64_t seed) {
  SolverConfig cfg;
  cfg.seed = seed;
  cfg.restarts = 8;
  return cfg;
}

DensityOperator entangled_state(Rng& rng) {
  DensityOperator rho = random_state(rng, 4, 4);
  while (two_qubit_eof(rho).concurrence < 0.25) rho = random_state(rng, 4, 4);
  return rho;
}
}  // namespace

TEST_CASE("gap vanishes for product states") {
  Rng rng(701);
  DensityOperator a = tensor(random_state(rng, 2, 2), random_state(rng, 2, 2));
  DensityOperator b = tensor(random_state(rng, 2, 2), random_state(rng, 2, 2));
  AdditivityReport rep =
      additivity_gap(a, kTwoQubit, b, kTwoQubit, quick(701), 64);
  CHECK(std::abs(rep.lhs) < 1e-6);
  CHECK(std::abs(rep.rhs) < 1e-6);
}

TEST_CASE("Bell against a pure product reproduces one bit") {
  Rng rng(702);
  DensityOperator bell = DensityOperator::pure(bell_ket());
  DensityOperator product = DensityOperator::pure(
      tensor(random_ket(rng, 2), random_ket(rng, 2)));
  AdditivityReport rep =
      additivity_gap(bell, kTwoQubit, product, kTwoQubit, quick(702), 64);
  CHECK(std::abs(rep.lhs - 1.0) < 5e-3);
  CHECK(std::abs(rep.rhs - 1.0) < 5e-3);
}

TEST_CASE("two Bell pairs carry two bits jointly") {
  DensityOperator bell = DensityOperator::pure(bell_ket());
  AdditivityReport rep =
      additivity_gap(bell, kTwoQubit, bell, kTwoQubit, quick(703), 64);
  CHECK(std::abs(rep.lhs - 2.0) < 1e-2);
  CHECK(std::abs(rep.gap) < 1e-2);
}

TEST_CASE("joint solves never exceed the factorized bound") {
  Rng rng(704);
  for (int t = 0; t < 2; ++t) {
    DensityOperator a = random_state(rng, 4, 2);
    DensityOperator b = random_state(rng, 4, 2);
    AdditivityReport rep =
        additivity_gap(a, kTwoQubit, b, kTwoQubit, quick(750 + t), 64);
    CHECK(rep.lhs <= rep.rhs + 2e-7);
  }
}

TEST_CASE("size caps are enforced") {
  DensityOperator big = DensityOperator::maximally_mixed(16);
  FactorLayout layout({4, 4}, {0});
  CHECK_THROWS_AS(
      additivity_gap(big, layout, big, layout, quick(705), 64), SizeError);
}

TEST_CASE("separable states give a zero product-environment experiment") {
  CaseOneScenario scenario(DensityOperator::maximally_mixed(4), kTwoQubit,
                           DensityOperator::pure(basis_ket(2, 0)),
                           DensityOperator::pure(basis_ket(2, 0)));
  CaseOneReport rep = run_case1(scenario, quick(706));
  CHECK(std::abs(rep.base.lhs) < 1e-6);
  CHECK(std::abs(rep.base.rhs) < 1e-6);
}

TEST_CASE("Werner states reproduce the closed form through the joint solve") {
  CaseOneScenario scenario(werner(0.9), kTwoQubit,
                           DensityOperator::pure(basis_ket(2, 0)),
                           DensityOperator::pure(basis_ket(2, 0)));
  CaseOneReport rep = run_case1(scenario, quick(707));
  CHECK(std::abs(rep.base.lhs - werner_eof_reference(0.9)) < 5e-3);
  CHECK(rep.all_members_product);
}

TEST_CASE("pure entangled states anchor the joint solve exactly") {
  Rng rng(708);
  Ket psi = random_ket(rng, 4);
  CaseOneScenario scenario(DensityOperator::pure(psi), kTwoQubit,
                           DensityOperator::pure(basis_ket(2, 0)),
                           DensityOperator::pure(basis_ket(2, 0)));
  CaseOneReport rep = run_case1(scenario, quick(708));
  double direct = von_neumann_entropy(restrict_ket(psi, kTwoQubit));
  CHECK(std::abs(rep.base.lhs - direct) < 1e-6);
  for (const MemberProductCheck& mc : rep.member_analysis) {
    CHECK(mc.rank_above_threshold == 1);
  }
}

TEST_CASE("paired-vectors scenario endpoints are exact") {
  Rng rng(709);
  DensityOperator rho = entangled_state(rng);
  PureDecomposition d = two_qubit_optimal_decomposition(rho);
  REQUIRE(d.size() >= 2);

  CaseTwoScenario scenario =
      CaseTwoScenario::canonical(d.kets[0], d.kets[1], {2, 2}, 1.0);
  CaseTwoReport rep = run_case2(scenario, quick(709));
  double s1 = von_neumann_entropy(restrict_ket(d.kets[0], kTwoQubit));
  CHECK(std::abs(rep.lhs - s1) < 1e-6);
  CHECK(std::abs(rep.e_lambda - s1) < 1e-12);
}

TEST_CASE("paired-vectors scenario matches the defining mixture value") {
  Rng rng(710);
  DensityOperator rho = entangled_state(rng);
  PureDecomposition d = two_qubit_optimal_decomposition(rho);
  REQUIRE(d.size() >= 2);
  for (double overlap : {0.0, 0.5}) {
    CaseTwoScenario scenario = CaseTwoScenario::canonical(
        d.kets[0], d.kets[1], {2, 2}, 0.5, overlap, overlap);
    CaseTwoReport rep = run_case2(scenario, quick(710));
    CHECK(std::abs(rep.gap) < 1e-2);
  }
}

TEST_CASE("identical pair vectors are rejected") {
  Rng rng(711);
  Ket psi = random_ket(rng, 4);
  CHECK_THROWS_AS(
      CaseTwoScenario::canonical(psi, psi, {2, 2}, 0.5),
      DegeneracyError);
}

TEST_CASE("a failing pair cannot form a scenario") {
  Rng rng(712);
  // eigenvectors of a suboptimal eigen-decomposition generally fail
  for (int t = 0; t < 10; ++t) {
    DensityOperator rho = entangled_state(rng);
    PureDecomposition eig =
        from_mixing(rho, MixingMatrix::identity(rho.rank()));
    PairCertificate cert = check_pair(eig.kets[0], eig.kets[1], kTwoQubit);
    if (cert.pass) continue;
    CHECK_THROWS_AS(
        CaseTwoScenario::canonical(eig.kets[0], eig.kets[1], {2, 2}, 0.5),
        CertificateError);
    return;
  }
  FAIL("no failing pair found in ten draws");
}

TEST_CASE("identity transport leaves the value unchanged") {
  Rng rng(713);
  DensityOperator rho = random_state(rng, 4, 3);
  CovarianceReport rep = unitary_covariance_check(
      rho, kTwoQubit, Mat(Mat::Identity(4, 4)), quick(713));
  CHECK(rep.difference < 2e-3);
  CHECK(rep.unitary_respects_cut);
  CHECK(rep.transported_reconstruction_error < 1e-9);
}

TEST_CASE("local unitaries preserve the value and transport the argmin") {
  Rng rng(714);
  DensityOperator rho = werner(0.8);
  Mat u = la::kron(random_unitary(rng, 2), random_unitary(rng, 2));
  CovarianceReport rep = unitary_covariance_check(rho, kTwoQubit, u, quick(714));
  CHECK(rep.difference < 2e-3);
  CHECK(rep.unitary_respects_cut);
  CHECK(rep.transported_reconstruction_error < 1e-9);
  CHECK(std::abs(rep.transported_average - rep.value_original) < 1e-9);
}

TEST_CASE("entangling unitaries are detected as cut-breaking") {
  Mat cnot = Mat::Zero(4, 4);
  cnot(0, 0) = 1;
  cnot(1, 1) = 1;
  cnot(2, 3) = 1;
  cnot(3, 2) = 1;
  Rng rng(715);
  DensityOperator rho = random_state(rng, 4, 2);
  CovarianceReport rep = unitary_covariance_check(rho, kTwoQubit, cnot,
                                                  quick(715));
  CHECK(!rep.unitary_respects_cut);
  CHECK(rep.transported_reconstruction_error < 1e-9);
}

TEST_CASE("non-unitary operators are rejected") {
  Rng rng(716);
  DensityOperator rho = random_state(rng, 4, 2);
  Mat not_unitary = Mat::Identity(4, 4) * 0.5;
  CHECK_THROWS_AS(
      unitary_covariance_check(rho, kTwoQubit, not_unitary, quick(716)),
      ParameterError);
}

TEST_CASE("recombining all members reproduces the solved value") {
  Rng rng(717);
  DensityOperator rho = entangled_state(rng);
  SolverConfig cfg = quick(717);
  EofResult res = eof(rho, kTwoQubit, cfg);
  std::vector<int> all(static_cast<std::size_t>(res.argmin.size()));
  for (int i = 0; i < res.argmin.size(); ++i) all[static_cast<std::size_t>(i)] = i;
  ConvexCheckReport rep =
      convex_combination_check(res.argmin, kTwoQubit, all,
                               res.argmin.weights, cfg);
  CHECK(rep.difference < 1e-2);
}

TEST_CASE("single members recombine to their own entropy") {
  Rng rng(718);
  DensityOperator rho = entangled_state(rng);
  PureDecomposition d = two_qubit_optimal_decomposition(rho);
  ConvexCheckReport rep =
      convex_combination_check(d, kTwoQubit, {0}, {1.0}, quick(718));
  CHECK(rep.difference < 1e-6);
}

TEST_CASE("random two-member recombinations stay on the flat roof") {
  Rng rng(719);
  DensityOperator rho = entangled_state(rng);
  PureDecomposition d = two_qubit_optimal_decomposition(rho);
  REQUIRE(d.size() >= 2);
  ConvexCheckReport rep = convex_combination_check(d, kTwoQubit, {0, 1},
                                                   {0.35, 0.65}, quick(719));
  CHECK(rep.difference < 1e-2);
}

TEST_CASE("empty recombination subsets are rejected") {
  Rng rng(720);
  PureDecomposition d =
      two_qubit_optimal_decomposition(entangled_state(rng));
  CHECK_THROWS_AS(
      convex_combination_check(d, kTwoQubit, {}, {}, quick(720)),
      ParameterError);
}
