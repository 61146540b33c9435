#include "eoflab/additivity.hpp"

#include <cmath>
#include <string>

#include "eoflab/errors.hpp"

namespace eoflab {

namespace {

FactorLayout joined_layout(const FactorLayout& a, const FactorLayout& b) {
  std::vector<int> dims = a.dims;
  dims.insert(dims.end(), b.dims.begin(), b.dims.end());
  std::vector<int> keep = a.keep;
  int offset = static_cast<int>(a.dims.size());
  for (int k : b.keep) keep.push_back(k + offset);
  return FactorLayout(std::move(dims), std::move(keep));
}

PureDecomposition product_decomposition(const PureDecomposition& a,
                                        const PureDecomposition& b) {
  std::vector<double> weights;
  std::vector<Ket> kets;
  for (int i = 0; i < a.size(); ++i) {
    for (int j = 0; j < b.size(); ++j) {
      weights.push_back(a.weights[static_cast<std::size_t>(i)] *
                        b.weights[static_cast<std::size_t>(j)]);
      kets.push_back(tensor(a.kets[static_cast<std::size_t>(i)],
                            b.kets[static_cast<std::size_t>(j)]));
    }
  }
  return PureDecomposition(std::move(weights), std::move(kets));
}

SolverConfig reseeded(const SolverConfig& cfg, std::uint64_t stream) {
  SolverConfig out = cfg;
  out.seed = Rng::derive(cfg.seed, stream);
  return out;
}

}  // namespace

AdditivityReport additivity_gap(const DensityOperator& rho,
                                const FactorLayout& rho_layout,
                                const DensityOperator& sigma,
                                const FactorLayout& sigma_layout,
                                const SolverConfig& cfg, int dim_cap) {
  rho_layout.check_against(rho.dim());
  sigma_layout.check_against(sigma.dim());
  long total = static_cast<long>(rho.dim()) * sigma.dim();
  if (total > dim_cap) {
    throw SizeError("joint dimension " + std::to_string(total) +
                    " exceeds cap " + std::to_string(dim_cap));
  }

  AdditivityReport report;
  report.left = eof(rho, rho_layout, reseeded(cfg, 1));
  report.right = eof(sigma, sigma_layout, reseeded(cfg, 2));

  DensityOperator joint = tensor(rho, sigma, dim_cap);
  FactorLayout layout = joined_layout(rho_layout, sigma_layout);
  SolverConfig joint_cfg = reseeded(cfg, 3);
  joint_cfg.warm_starts.push_back(
      product_decomposition(report.left.argmin, report.right->argmin));
  report.joint = eof(joint, layout, joint_cfg);

  report.lhs = report.joint.value;
  report.rhs = report.left.value + report.right->value;
  report.gap = report.lhs - report.rhs;
  return report;
}

CaseOneScenario::CaseOneScenario(DensityOperator rho_, FactorLayout layout_,
                                 DensityOperator s3, DensityOperator s4,
                                 int dim_cap)
    : rho(std::move(rho_)),
      rho_layout(std::move(layout_)),
      sigma3(std::move(s3)),
      sigma4(std::move(s4)) {
  if (rho_layout.dims.size() != 2 || rho_layout.keep != std::vector<int>{0}) {
    throw LayoutError(
        "the entangled side needs two factors with the first one kept");
  }
  rho_layout.check_against(rho.dim());
  long total = static_cast<long>(rho.dim()) * sigma3.dim() * sigma4.dim();
  if (total > dim_cap) {
    throw SizeError("scenario dimension " + std::to_string(total) +
                    " exceeds cap " + std::to_string(dim_cap));
  }
}

CaseOneReport run_case1(const CaseOneScenario& s, const SolverConfig& cfg) {
  CaseOneReport report;

  DensityOperator env = tensor(s.sigma3, s.sigma4);
  FactorLayout env_layout({s.sigma3.dim(), s.sigma4.dim()}, {0});
  report.base =
      additivity_gap(s.rho, s.rho_layout, env, env_layout, cfg);
  // the environment side carries no formation entanglement; report the
  // marginal value as the rhs outright
  report.base.rhs = report.base.left.value;
  report.base.gap = report.base.lhs - report.base.rhs;

  // per-member product analysis of the joint argmin: restriction onto the
  // kept pair must factorize between the two kept factors
  int d1 = s.rho_layout.dims[static_cast<std::size_t>(s.rho_layout.keep[0])];
  int d3 = s.sigma3.dim();
  std::vector<int> dims = {s.rho_layout.dims[0], s.rho_layout.dims[1],
                           s.sigma3.dim(), s.sigma4.dim()};
  la::IndexSplit split(dims, {0, 2});
  const PureDecomposition& argmin = report.base.joint.argmin;
  for (int i = 0; i < argmin.size(); ++i) {
    Mat reduced = la::reduced_from_ket(
        argmin.kets[static_cast<std::size_t>(i)].amps, split);
    MemberProductCheck check;
    check.member = i;
    check.coefficients = la::operator_schmidt_coefficients(reduced, d1, d3);
    for (Eigen::Index k = 0; k < check.coefficients.size(); ++k) {
      if (check.coefficients[k] > report.product_threshold) {
        ++check.rank_above_threshold;
      }
    }
    if (check.rank_above_threshold > 1) report.all_members_product = false;
    report.member_analysis.push_back(std::move(check));
  }
  return report;
}

CaseTwoScenario CaseTwoScenario::make(Ket phi12, Ket phi12_hat,
                                      std::vector<int> dims12, Ket phi3,
                                      Ket phi3_hat, Ket phi4, Ket phi4_hat,
                                      double lambda,
                                      const GammaGridConfig& gamma_cfg,
                                      int dim_cap) {
  if (lambda < 0.0 || lambda > 1.0) {
    throw ParameterError("lambda must lie in [0, 1]");
  }
  if (dims12.size() != 2) {
    throw LayoutError("the certified pair lives on exactly two factors");
  }
  FactorLayout pair_layout(dims12, {0});
  pair_layout.check_against(phi12.dim());
  pair_layout.check_against(phi12_hat.dim());
  long total = static_cast<long>(phi12.dim()) * phi3.dim() * phi4.dim();
  if (total > dim_cap) {
    throw SizeError("scenario dimension " + std::to_string(total) +
                    " exceeds cap " + std::to_string(dim_cap));
  }
  if (phi3.dim() != phi3_hat.dim() || phi4.dim() != phi4_hat.dim()) {
    throw ParameterError("environment ket pairs must share dimensions");
  }

  PairCertificate cert = check_pair(phi12, phi12_hat, pair_layout, gamma_cfg);
  if (!cert.pass) {
    throw CertificateError("the pair fails its optimality certificate "
                           "(min margin " +
                           std::to_string(cert.min_margin) + ")");
  }
  CaseTwoScenario s{std::move(phi12), std::move(phi12_hat), std::move(dims12),
                    std::move(phi3),  std::move(phi3_hat),  std::move(phi4),
                    std::move(phi4_hat), lambda, std::move(cert)};
  return s;
}

CaseTwoScenario CaseTwoScenario::canonical(Ket phi12, Ket phi12_hat,
                                           std::vector<int> dims12,
                                           double lambda, double overlap_d,
                                           double overlap_b,
                                           const GammaGridConfig& gamma_cfg) {
  auto env_pair = [](double overlap) {
    Vec first = Vec::Zero(2);
    first[0] = 1.0;
    Vec second = Vec::Zero(2);
    second[0] = overlap;
    second[1] = std::sqrt(std::max(0.0, 1.0 - overlap * overlap));
    return std::pair<Ket, Ket>(Ket(first), Ket(second));
  };
  auto [p3, p3h] = env_pair(overlap_d);
  auto [p4, p4h] = env_pair(overlap_b);
  return make(std::move(phi12), std::move(phi12_hat), std::move(dims12),
              std::move(p3), std::move(p3h), std::move(p4), std::move(p4h),
              lambda, gamma_cfg);
}

CaseTwoReport run_case2(const CaseTwoScenario& s, const SolverConfig& cfg) {
  if (!s.certificate.pass) {
    throw CertificateError("scenario carries a failing pair certificate");
  }
  Ket top = tensor(tensor(Ket(s.phi12.amps), s.phi3), s.phi4).normalized();
  Ket bottom =
      tensor(tensor(Ket(s.phi12_hat.amps), s.phi3_hat), s.phi4_hat).normalized();

  Mat rho_mat = s.lambda * (top.amps * top.amps.adjoint()) +
                (1.0 - s.lambda) * (bottom.amps * bottom.amps.adjoint());
  DensityOperator rho_lambda(rho_mat);

  std::vector<int> dims = {s.dims12[0], s.dims12[1], s.phi3.dim(),
                           s.phi4.dim()};
  FactorLayout layout(dims, {0, 2});

  CaseTwoReport report;
  FactorLayout pair_layout(s.dims12, {0});
  report.e_lambda =
      s.lambda * von_neumann_entropy(restrict_ket(s.phi12, pair_layout)) +
      (1.0 - s.lambda) *
          von_neumann_entropy(restrict_ket(s.phi12_hat, pair_layout));

  SolverConfig solve_cfg = cfg;
  if (s.lambda > 0.0 && s.lambda < 1.0) {
    solve_cfg.warm_starts.push_back(
        PureDecomposition({s.lambda, 1.0 - s.lambda}, {top, bottom}));
  }
  report.joint = eof(rho_lambda, layout, solve_cfg);
  report.lhs = report.joint.value;
  report.gap = report.lhs - report.e_lambda;
  return report;
}

CovarianceReport unitary_covariance_check(const DensityOperator& rho,
                                          const FactorLayout& layout,
                                          const Mat& unitary,
                                          const SolverConfig& cfg) {
  layout.check_against(rho.dim());
  if (unitary.rows() != rho.dim() || unitary.cols() != rho.dim()) {
    throw ParameterError("unitary dimension does not match the state");
  }
  double uerr = (unitary.adjoint() * unitary -
                 Mat::Identity(rho.dim(), rho.dim()))
                    .cwiseAbs()
                    .maxCoeff();
  if (uerr > 1e-10) {
    throw ParameterError("operator deviates from unitary by " +
                         std::to_string(uerr));
  }

  CovarianceReport report;
  EofResult original = eof(rho, layout, reseeded(cfg, 11));
  DensityOperator rotated(
      Mat(unitary.adjoint() * rho.mat() * unitary));
  EofResult transported = eof(rotated, layout, reseeded(cfg, 12));
  report.value_original = original.value;
  report.value_transported = transported.value;
  report.difference = std::abs(original.value - transported.value);

  // transport the original argmin by U^dagger and validate it against the
  // rotated state
  std::vector<double> weights = original.argmin.weights;
  std::vector<Ket> kets;
  for (const Ket& k : original.argmin.kets) {
    kets.push_back(Ket(Vec(unitary.adjoint() * k.amps)));
  }
  PureDecomposition moved(std::move(weights), std::move(kets));
  report.transported_reconstruction_error =
      (moved.reconstruct_raw() - rotated.mat()).cwiseAbs().maxCoeff();
  report.transported_average = average_entanglement(moved, layout);

  // does the unitary factor across the kept/traced cut?
  la::IndexSplit split(layout.dims, layout.keep);
  Mat realigned(split.kept_dim * split.kept_dim,
                split.rest_dim * split.rest_dim);
  for (Eigen::Index a = 0; a < unitary.rows(); ++a) {
    for (Eigen::Index b = 0; b < unitary.cols(); ++b) {
      int ra = split.kept_of[static_cast<std::size_t>(a)];
      int ca = split.rest_of[static_cast<std::size_t>(a)];
      int rb = split.kept_of[static_cast<std::size_t>(b)];
      int cb = split.rest_of[static_cast<std::size_t>(b)];
      realigned(ra * split.kept_dim + rb, ca * split.rest_dim + cb) =
          unitary(a, b);
    }
  }
  la::RVec sv = la::hermitian_eigenvalues(
      realigned.rows() <= realigned.cols()
          ? Mat(realigned * realigned.adjoint())
          : Mat(realigned.adjoint() * realigned));
  // compared in the squared domain, where the eigensolver noise floor lives
  double top2 = std::max(0.0, sv[sv.size() - 1]);
  double second2 = sv.size() > 1 ? std::max(0.0, sv[sv.size() - 2]) : 0.0;
  report.unitary_respects_cut = second2 <= 1e-12 * std::max(1.0, top2);
  return report;
}

ConvexCheckReport convex_combination_check(const PureDecomposition& optimal,
                                           const FactorLayout& layout,
                                           const std::vector<int>& subset,
                                           const std::vector<double>& q,
                                           const SolverConfig& cfg) {
  if (subset.empty()) {
    throw ParameterError("recombination subset must be nonempty");
  }
  if (subset.size() != q.size()) {
    throw ParameterError("subset and weights must have the same length");
  }
  double qsum = 0.0;
  for (double v : q) {
    if (v <= 0.0) throw ParameterError("recombination weights must be > 0");
    qsum += v;
  }
  if (std::abs(qsum - 1.0) > 1e-10) {
    throw ParameterError("recombination weights sum to " +
                         std::to_string(qsum));
  }

  std::vector<double> weights;
  std::vector<Ket> kets;
  double direct = 0.0;
  for (std::size_t j = 0; j < subset.size(); ++j) {
    int idx = subset[j];
    if (idx < 0 || idx >= optimal.size()) {
      throw ParameterError("subset index out of range");
    }
    weights.push_back(q[j]);
    kets.push_back(optimal.kets[static_cast<std::size_t>(idx)]);
    direct += q[j] * von_neumann_entropy(restrict_ket(
                         optimal.kets[static_cast<std::size_t>(idx)], layout));
  }
  PureDecomposition candidate(std::move(weights), std::move(kets));
  DensityOperator mixture = candidate.reconstruct();

  SolverConfig solve_cfg = cfg;
  solve_cfg.warm_starts.push_back(candidate);
  EofResult solved = eof(mixture, layout, solve_cfg);

  ConvexCheckReport report;
  report.solver_value = solved.value;
  report.direct_average = direct;
  report.difference = std::abs(solved.value - direct);
  return report;
}

}  // namespace eoflab
