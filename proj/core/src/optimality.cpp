#include "eoflab/optimality.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "eoflab/errors.hpp"
#include "eoflab/rng.hpp"

namespace eoflab {

namespace {

constexpr double kDegeneracyTol = 1e-10;
constexpr double kOutOfSupportTol = 1e-9;
constexpr double kTwoPi = 6.283185307179586476925286766559;

struct PairData {
  Ket p1, p2;
  Mat sigma1, sigma2, sigma12;  // sigma12 = reduction of |psi1><psi2|
  Cplx overlap;                 // <psi1|psi2>
  double s1 = 0.0, s2 = 0.0;    // entropies of sigma1, sigma2
  Mat log_sigma1;               // on the support
  Mat kernel1;                  // projector onto the kernel of sigma1
};

PairData pair_data(const Ket& psi1, const Ket& psi2,
                   const FactorLayout& layout) {
  layout.check_against(psi1.dim());
  layout.check_against(psi2.dim());
  psi1.require_unit();
  psi2.require_unit();
  PairData d;
  d.p1 = psi1.normalized();
  d.p2 = psi2.normalized();
  d.overlap = inner(d.p1, d.p2);
  if (std::abs(d.overlap) > 1.0 - kDegeneracyTol) {
    throw DegeneracyError("pair members are linearly dependent");
  }
  la::IndexSplit split(layout.dims, layout.keep);
  d.sigma1 = la::reduced_from_ket(d.p1.amps, split);
  d.sigma2 = la::reduced_from_ket(d.p2.amps, split);
  d.sigma12 = la::cross_reduced_from_kets(d.p1.amps, d.p2.amps, split);
  d.s1 = la::entropy_bits(d.sigma1);
  d.s2 = la::entropy_bits(d.sigma2);
  int support_dim = 0;
  d.log_sigma1 = la::log2_on_support(d.sigma1, la::kRankCut, &support_dim);
  d.kernel1 = Mat::Identity(d.sigma1.rows(), d.sigma1.cols()) -
              la::support_projector(d.sigma1);
  return d;
}

Mat overlap_operator(const PairData& d, Cplx gamma) {
  // gamma * sigma21 + conj(gamma) * sigma12
  return gamma * d.sigma12.adjoint() + std::conj(gamma) * d.sigma12;
}

GammaSample evaluate_gamma(const PairData& d, Cplx gamma) {
  GammaSample s;
  s.gamma = gamma;
  Mat ov = overlap_operator(d, gamma);
  Mat sigma = std::norm(gamma) * d.sigma1 + d.sigma2 - ov;
  double trace = sigma.trace().real();
  if (trace <= 1e-12) {
    throw DegeneracyError("combination direction vanishes at this gamma");
  }
  s.rhs = la::entropy_bits(Mat(sigma / trace));
  double out_mass = (d.kernel1 * ov * d.kernel1).trace().real();
  if (std::abs(out_mass) > kOutOfSupportTol) {
    // lhs is -infinity by the support convention; the sample holds vacuously
    s.vacuous = true;
    s.lhs = -std::numeric_limits<double>::infinity();
    s.margin = std::numeric_limits<double>::infinity();
    return s;
  }
  double cross = (ov * d.log_sigma1).trace().real();
  s.lhs = (std::norm(gamma) * d.s1 + d.s2 + cross) / trace;
  s.margin = s.rhs - s.lhs;
  return s;
}

}  // namespace

SigmaOfGamma sigma_of_gamma(const Ket& psi1, const Ket& psi2,
                            const FactorLayout& layout, Cplx gamma) {
  PairData d = pair_data(psi1, psi2, layout);
  Mat ov = overlap_operator(d, gamma);
  Mat sigma = std::norm(gamma) * d.sigma1 + d.sigma2 - ov;
  double trace = sigma.trace().real();
  if (trace <= 1e-12) {
    throw DegeneracyError("combination direction vanishes at this gamma");
  }
  return SigmaOfGamma(sigma, trace, DensityOperator(Mat(sigma / trace)));
}

PairCertificate check_pair(const Ket& psi1, const Ket& psi2,
                           const FactorLayout& layout,
                           const GammaGridConfig& cfg) {
  PairData d = pair_data(psi1, psi2, layout);
  PairCertificate cert(DensityOperator(d.sigma1), DensityOperator(d.sigma2),
                       d.sigma12);
  cert.config = cfg;

  std::vector<Cplx> gammas;
  for (double mod : cfg.moduli) {
    for (int p = 0; p < cfg.phases; ++p) {
      double angle = kTwoPi * p / cfg.phases;
      gammas.push_back(std::polar(mod, angle));
    }
  }
  Rng rng(cfg.seed);
  for (int k = 0; k < cfg.random_samples; ++k) {
    double log_mod = rng.uniform(-cfg.random_log_modulus_range,
                                 cfg.random_log_modulus_range);
    double angle = rng.uniform(0.0, kTwoPi);
    gammas.push_back(std::polar(std::exp2(log_mod), angle));
  }

  cert.min_margin = std::numeric_limits<double>::infinity();
  for (Cplx g : gammas) {
    GammaSample s = evaluate_gamma(d, g);
    cert.samples.push_back(s);
    if (s.vacuous) {
      ++cert.vacuous_count;
      continue;
    }
    if (s.margin < cert.min_margin) {
      cert.min_margin = s.margin;
      cert.worst_gamma = s.gamma;
    }
  }
  cert.pass = cert.min_margin >= -cfg.margin_tol;
  return cert;
}

FirstOrderReport first_order_necessity(const Ket& psi1, const Ket& psi2,
                                       const FactorLayout& layout, Cplx gamma,
                                       const std::vector<double>& eps) {
  FirstOrderReport report;
  report.gamma = gamma;
  report.eps = eps;
  if (std::abs(gamma) < 1e-14) {
    report.trivial_direction = true;  // the second direction degenerates
    return report;
  }
  if (eps.empty()) {
    throw ParameterError("at least one epsilon value is required");
  }
  for (double e : eps) {
    if (e <= 0.0 || e > 0.1) {
      throw ParameterError("epsilon values must lie in (0, 0.1]");
    }
  }
  PairData d = pair_data(psi1, psi2, layout);
  la::IndexSplit split(layout.dims, layout.keep);

  GammaSample at_gamma = evaluate_gamma(d, gamma);
  report.margin = at_gamma.vacuous ? 0.0 : at_gamma.margin;
  Mat sigma = std::norm(gamma) * d.sigma1 + d.sigma2 - overlap_operator(d, gamma);
  double trace = sigma.trace().real();
  report.predicted_coefficient = trace * report.margin;

  for (double e : eps) {
    // unnormalized two-member family versus its optimal-pair reference
    Vec phi1 = d.p1.amps + (e * gamma) * d.p2.amps;
    Vec phi2 = d.p1.amps - d.p2.amps / std::conj(gamma);
    double n1 = phi1.squaredNorm();
    double n2 = phi2.squaredNorm();
    double f = n1 * la::entropy_bits(
                        la::reduced_from_ket(Vec(phi1 / std::sqrt(n1)), split)) +
               e * std::norm(gamma) * n2 *
                   la::entropy_bits(
                       la::reduced_from_ket(Vec(phi2 / std::sqrt(n2)), split));
    double g = (1.0 + e * std::norm(gamma)) * d.s1 +
               e * (1.0 + e * std::norm(gamma)) * d.s2;
    report.slopes.push_back((f - g) / e);
  }
  // the smallest epsilon carries the cleanest first-order estimate
  std::size_t smallest = 0;
  for (std::size_t i = 1; i < eps.size(); ++i) {
    if (eps[i] < eps[smallest]) smallest = i;
  }
  report.first_order_coefficient = report.slopes[smallest];
  double scale = std::max(1e-6, 0.25 * std::abs(report.predicted_coefficient));
  report.sign_consistent =
      std::abs(report.first_order_coefficient - report.predicted_coefficient) <=
          scale + 1e-3 ||
      (report.first_order_coefficient >= -1e-6 &&
       report.predicted_coefficient >= -1e-9);
  return report;
}

double exact_rank2_eof(const Ket& psi1, const Ket& psi2,
                       const FactorLayout& layout, double lambda,
                       const GammaGridConfig& cfg) {
  if (lambda < 0.0 || lambda > 1.0) {
    throw ParameterError("lambda must lie in [0, 1]");
  }
  PairCertificate cert = check_pair(psi1, psi2, layout, cfg);
  if (!cert.pass) {
    throw CertificateError(
        "pair condition failed at sampled gamma with margin " +
        std::to_string(cert.min_margin));
  }
  return lambda * von_neumann_entropy(cert.sigma1) +
         (1.0 - lambda) * von_neumann_entropy(cert.sigma2);
}

ProductBoundReport check_product_bound(const Ket& psi,
                                       const FactorLayout& four_factors) {
  if (four_factors.dims.size() != 4) {
    throw LayoutError("product bound check needs exactly four factors");
  }
  four_factors.check_against(psi.dim());
  psi.require_unit();

  ProductBoundReport report;
  FactorLayout keep13(four_factors.dims, {0, 2});
  report.lhs = von_neumann_entropy(restrict_ket(psi, keep13));

  FactorLayout split12(four_factors.dims, {0, 1});
  SchmidtDecomposition sd = schmidt(psi, split12);
  report.schmidt_coefficients = sd.coefficients;

  int d1 = four_factors.dims[0], d2 = four_factors.dims[1];
  int d3 = four_factors.dims[2], d4 = four_factors.dims[3];
  double rhs = 0.0;
  for (Eigen::Index j = 0; j < sd.coefficients.size(); ++j) {
    double w = sd.coefficients[j] * sd.coefficients[j];
    rhs += w * (von_neumann_entropy(restrict_ket(
                    sd.left[static_cast<std::size_t>(j)],
                    FactorLayout({d1, d2}, {0}))) +
                von_neumann_entropy(restrict_ket(
                    sd.right[static_cast<std::size_t>(j)],
                    FactorLayout({d3, d4}, {0}))));
  }
  report.rhs = rhs;
  report.gap = report.lhs - report.rhs;
  report.holds = report.gap >= -1e-10;
  return report;
}

}  // namespace eoflab
