#pragma once

#include <cstdint>
#include <vector>

#include "eoflab/state.hpp"

namespace eoflab {

/// One sampled gamma of the pair condition. margin = rhs - lhs; the
/// inequality asks margin >= 0. Samples where the overlap operator carries
/// weight outside the support of sigma1 are vacuous passes (the lhs is -inf
/// by the support convention) and are excluded from the margin fold.
struct GammaSample {
  Cplx gamma;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool vacuous = false;
};

struct GammaGridConfig {
  int phases = 16;
  std::vector<double> moduli = {0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
  int random_samples = 64;
  double random_log_modulus_range = 3.0;  // |gamma| in 2^[-range, range]
  std::uint64_t seed = 77;
  double margin_tol = 1e-9;
};

/// Sampled verification of the pair condition for two decomposition members.
/// A pass is falsifiable evidence, not a proof: only the sampled gammas were
/// checked, and the full condition quantifies over all complex gamma.
struct PairCertificate {
  DensityOperator sigma1, sigma2;
  Mat sigma12;
  std::vector<GammaSample> samples;
  double min_margin = 0.0;
  Cplx worst_gamma = 0.0;
  bool pass = false;
  int vacuous_count = 0;
  GammaGridConfig config;

  PairCertificate(DensityOperator s1, DensityOperator s2, Mat s12)
      : sigma1(std::move(s1)), sigma2(std::move(s2)), sigma12(std::move(s12)) {}
};

struct SigmaOfGamma {
  Mat sigma;                   // |gamma|^2 sigma1 + sigma2 - sigma_ov(gamma)
  double trace = 0.0;
  DensityOperator normalized;  // sigma / trace

  SigmaOfGamma(Mat s, double t, DensityOperator n)
      : sigma(std::move(s)), trace(t), normalized(std::move(n)) {}
};

/// The combination operator of the pair condition at one gamma. Throws
/// DegeneracyError when the combination direction vanishes.
SigmaOfGamma sigma_of_gamma(const Ket& psi1, const Ket& psi2,
                            const FactorLayout& layout, Cplx gamma);

PairCertificate check_pair(const Ket& psi1, const Ket& psi2,
                           const FactorLayout& layout,
                           const GammaGridConfig& cfg = {});

/// Finite-difference probe of the first-order argument behind the pair
/// condition: the two-member perturbation family must not beat the optimal
/// pair at first order in epsilon when the margin at gamma is nonnegative.
struct FirstOrderReport {
  Cplx gamma;
  std::vector<double> eps;
  std::vector<double> slopes;          // (f - g)/eps per epsilon
  double first_order_coefficient = 0;  // slope at the smallest epsilon
  double margin = 0.0;
  double predicted_coefficient = 0.0;  // trace(sigma(gamma)) * margin
  bool trivial_direction = false;      // gamma == 0
  bool sign_consistent = false;
};

FirstOrderReport first_order_necessity(const Ket& psi1, const Ket& psi2,
                                       const FactorLayout& layout, Cplx gamma,
                                       const std::vector<double>& eps);

/// Exact rank-2 value lambda*S(sigma1) + (1-lambda)*S(sigma2), available
/// only behind a passing certificate. Throws CertificateError otherwise.
double exact_rank2_eof(const Ket& psi1, const Ket& psi2,
                       const FactorLayout& layout, double lambda,
                       const GammaGridConfig& cfg = {});

/// Signed gap of the product-bound inequality for a four-factor ket:
/// lhs = S of the {1,3} restriction, rhs = Schmidt-averaged sum of one-sided
/// entropies across the (12)|(34) split. No sign is asserted for general
/// kets; products across the split give equality.
struct ProductBoundReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;  // lhs - rhs
  bool holds = false;
  la::RVec schmidt_coefficients;
};

ProductBoundReport check_product_bound(const Ket& psi,
                                       const FactorLayout& four_factors);

}  // namespace eoflab
