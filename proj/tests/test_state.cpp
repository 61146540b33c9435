#include <doctest.h>

#include <eoflab/errors.hpp>
#include <eoflab/state.hpp>

#include "test_helpers.hpp"

using namespace eoflab;
using namespace eoflab::testkit;

TEST_CASE("tensor of maximally mixed qubits is maximally mixed") {
  DensityOperator out =
      tensor(DensityOperator::maximally_mixed(2), DensityOperator::maximally_mixed(2));
  CHECK((out.mat() - Mat::Identity(4, 4) / 4.0).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("restricting a product recovers the factor") {
  Rng rng(101);
  DensityOperator rho = random_state(rng, 3, 3);
  DensityOperator joint = tensor(DensityOperator::pure(basis_ket(2, 0)), rho);
  DensityOperator back = restrict_state(joint, FactorLayout({2, 3}, {1}));
  CHECK((back.mat() - rho.mat()).cwiseAbs().maxCoeff() < 1e-12);
  DensityOperator front = restrict_state(joint, FactorLayout({2, 3}, {0}));
  CHECK((front.mat() - DensityOperator::pure(basis_ket(2, 0)).mat())
            .cwiseAbs()
            .maxCoeff() < 1e-12);
}

TEST_CASE("entropy is additive over tensor products") {
  Rng rng(102);
  for (int t = 0; t < 10; ++t) {
    DensityOperator a = random_state(rng, 2, 2);
    DensityOperator b = random_state(rng, 3, 3);
    double lhs = von_neumann_entropy(tensor(a, b));
    double rhs = von_neumann_entropy(a) + von_neumann_entropy(b);
    CHECK(std::abs(lhs - rhs) < 1e-10);
  }
}

TEST_CASE("tensor rejects dimensions beyond the cap") {
  DensityOperator big = DensityOperator::maximally_mixed(16);
  CHECK_THROWS_AS(tensor(big, DensityOperator::maximally_mixed(8)), SizeError);
}

TEST_CASE("restriction of a Bell state is maximally mixed") {
  DensityOperator bell = DensityOperator::pure(bell_ket());
  DensityOperator reduced = restrict_state(bell, FactorLayout({2, 2}, {0}));
  CHECK((reduced.mat() - Mat::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("restriction over the full factor set is the identity map") {
  Rng rng(103);
  DensityOperator rho = random_state(rng, 6, 4);
  DensityOperator same = restrict_state(rho, FactorLayout({2, 3}, {0, 1}));
  CHECK((same.mat() - rho.mat()).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("restriction preserves trace and positivity") {
  Rng rng(104);
  for (int t = 0; t < 8; ++t) {
    DensityOperator rho = random_state(rng, 8, 5);
    DensityOperator reduced = restrict_state(rho, FactorLayout({2, 4}, {1}));
    CHECK(std::abs(reduced.mat().trace().real() - 1.0) < 1e-10);
    la::RVec ev = la::hermitian_eigenvalues(reduced.mat());
    CHECK(ev[0] > -1e-10);
  }
}

TEST_CASE("restriction rejects an inconsistent layout") {
  DensityOperator rho = DensityOperator::maximally_mixed(4);
  CHECK_THROWS_AS(restrict_state(rho, FactorLayout({2, 3}, {0})), LayoutError);
}

TEST_CASE("entropy anchors: mixed qubit, pure state, binary spectrum") {
  CHECK(von_neumann_entropy(DensityOperator::maximally_mixed(2)) ==
        doctest::Approx(1.0).epsilon(1e-12));
  Rng rng(105);
  CHECK(von_neumann_entropy(DensityOperator::pure(random_ket(rng, 5))) <
        1e-12);
  la::RVec probs(2);
  probs << 0.25, 0.75;
  double expected = binary_entropy(0.25);  // independent evaluation
  CHECK(von_neumann_entropy(DensityOperator::diagonal(probs)) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("entropy is unitarily invariant") {
  Rng rng(106);
  for (int t = 0; t < 6; ++t) {
    DensityOperator rho = random_state(rng, 4, 3);
    Mat u = random_unitary(rng, 4);
    DensityOperator rotated(Mat(u.adjoint() * rho.mat() * u));
    CHECK(std::abs(von_neumann_entropy(rotated) - von_neumann_entropy(rho)) <
          1e-10);
  }
}

TEST_CASE("entropy rejects spectra below the positivity floor") {
  Mat m = Mat::Identity(2, 2);
  m(0, 0) = -5e-10;
  m(1, 1) = 1.0 + 5e-10;
  CHECK_THROWS_AS(la::entropy_bits(m), PositivityError);
}

TEST_CASE("schmidt of the Bell state is flat") {
  SchmidtDecomposition sd = schmidt(bell_ket(), FactorLayout({2, 2}, {0}));
  REQUIRE(sd.coefficients.size() == 2);
  CHECK(sd.coefficients[0] == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(sd.coefficients[1] == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("schmidt of a product ket has a single coefficient") {
  Rng rng(107);
  Ket a = random_ket(rng, 3), b = random_ket(rng, 4);
  SchmidtDecomposition sd = schmidt(tensor(a, b), FactorLayout({3, 4}, {0}));
  CHECK(sd.rank() == 1);
  CHECK(sd.coefficients[0] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("schmidt reconstruction round-trips random kets") {
  Rng rng(108);
  for (int t = 0; t < 10; ++t) {
    Ket psi = random_ket(rng, 6);
    SchmidtDecomposition sd = schmidt(psi, FactorLayout({3, 2}, {0}));
    Vec rebuilt = Vec::Zero(6);
    for (Eigen::Index j = 0; j < sd.coefficients.size(); ++j) {
      rebuilt += sd.coefficients[j] *
                 la::kron(sd.left[static_cast<std::size_t>(j)].amps,
                          sd.right[static_cast<std::size_t>(j)].amps);
    }
    CHECK((rebuilt - psi.amps).cwiseAbs().maxCoeff() < 1e-10);
    // orthonormal factors
    for (std::size_t i = 0; i < sd.left.size(); ++i) {
      for (std::size_t j = i + 1; j < sd.left.size(); ++j) {
        CHECK(std::abs(inner(sd.left[i], sd.left[j])) < 1e-10);
        CHECK(std::abs(inner(sd.right[i], sd.right[j])) < 1e-10);
      }
    }
    double sum2 = sd.coefficients.squaredNorm();
    CHECK(std::abs(sum2 - 1.0) < 1e-10);
  }
}

TEST_CASE("schmidt rejects non-unit input") {
  Vec v = Vec::Ones(4);
  CHECK_THROWS_AS(schmidt(Ket(v), FactorLayout({2, 2}, {0})),
                  NormalizationError);
}

TEST_CASE("purification restricts back to the state") {
  Rng rng(109);
  SUBCASE("pure input") {
    Ket v = random_ket(rng, 3);
    Ket p = purify(DensityOperator::pure(v));
    DensityOperator back = restrict_ket(p, FactorLayout({3, 3}, {0}));
    CHECK((back.mat() - DensityOperator::pure(v).mat()).cwiseAbs().maxCoeff() <
          1e-10);
  }
  SUBCASE("maximally mixed input") {
    Ket p = purify(DensityOperator::maximally_mixed(2));
    DensityOperator back = restrict_ket(p, FactorLayout({2, 2}, {0}));
    CHECK((back.mat() - Mat::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff() <
          1e-10);
  }
  SUBCASE("random 4-dimensional states") {
    for (int t = 0; t < 10; ++t) {
      DensityOperator rho = random_state(rng, 4, 1 + t % 4);
      Ket p = purify(rho);
      DensityOperator back = restrict_ket(p, FactorLayout({4, 4}, {0}));
      CHECK((back.mat() - rho.mat()).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("density operator constructor enforces its invariants") {
  Mat good = Mat::Identity(2, 2) / 2.0;
  CHECK_NOTHROW(DensityOperator{good});

  Mat herm_bad = good;
  herm_bad(0, 1) = Cplx(0.0, 1e-6);
  CHECK_THROWS_AS(DensityOperator{herm_bad}, HermiticityError);

  Mat trace_bad = Mat::Identity(2, 2);
  CHECK_THROWS_AS(DensityOperator{trace_bad}, TraceError);

  Mat neg = Mat::Zero(2, 2);
  neg(0, 0) = 1.001e-3;
  neg(1, 1) = 1.0 - 1.001e-3;
  neg(0, 0) = -1e-6;
  neg(1, 1) = 1.0 + 1e-6;
  CHECK_THROWS_AS(DensityOperator{neg}, PositivityError);
}

TEST_CASE("factor permutation reorders amplitudes consistently") {
  Rng rng(110);
  Ket a = random_ket(rng, 2), b = random_ket(rng, 3), c = random_ket(rng, 2);
  Ket abc = tensor(tensor(a, b), c);
  Ket cab = permute_factors(abc, {2, 3, 2}, {2, 0, 1});
  Ket expected = tensor(tensor(c, a), b);
  CHECK((cab.amps - expected.amps).cwiseAbs().maxCoeff() < 1e-12);
}
