#include "eoflab/decomposition.hpp"

#include <cmath>
#include <string>

#include "eoflab/errors.hpp"

namespace eoflab {

namespace {
constexpr double kWeightFloor = 1e-12;
constexpr double kIsometryTol = 1e-10;
constexpr double kConstraintTol = 1e-10;
}  // namespace

PureDecomposition::PureDecomposition(std::vector<double> w,
                                     std::vector<Ket> k) {
  if (w.size() != k.size()) {
    throw ParameterError("weights and kets must have the same length");
  }
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] < 0.0) {
      throw ParameterError("decomposition weights must be nonnegative");
    }
    if (w[i] <= kWeightFloor) continue;  // zero-weight members are dropped
    weights.push_back(w[i]);
    kets.push_back(k[i].normalized());
  }
}

Mat PureDecomposition::reconstruct_raw() const {
  if (kets.empty()) {
    throw ParameterError("cannot reconstruct from an empty decomposition");
  }
  int d = kets.front().dim();
  Mat out = Mat::Zero(d, d);
  for (std::size_t i = 0; i < kets.size(); ++i) {
    out += weights[i] * (kets[i].amps * kets[i].amps.adjoint());
  }
  return out;
}

DensityOperator PureDecomposition::reconstruct() const {
  return DensityOperator(reconstruct_raw());
}

MixingMatrix::MixingMatrix(Mat mat) : m(std::move(mat)) {
  if (m.rows() < m.cols() || m.cols() == 0) {
    throw ParameterError("mixing matrix needs rows >= cols >= 1");
  }
  Mat gram = m.adjoint() * m;
  double err = (gram - Mat::Identity(m.cols(), m.cols())).cwiseAbs().maxCoeff();
  if (err > kIsometryTol) {
    throw ParameterError("mixing matrix columns deviate from orthonormal by " +
                         std::to_string(err));
  }
}

MixingMatrix MixingMatrix::identity(int r) {
  return MixingMatrix(Mat(Mat::Identity(r, r)));
}

MixingMatrix MixingMatrix::random(int rows, int cols, Rng& rng) {
  // exp(iH) of a random Hermitian keeps everything inside the one numerical
  // kernel; the leading cols columns form the isometry.
  Mat h(rows, rows);
  for (int i = 0; i < rows; ++i) {
    h(i, i) = rng.normal();
    for (int j = i + 1; j < rows; ++j) {
      Cplx v(rng.normal(), rng.normal());
      h(i, j) = v;
      h(j, i) = std::conj(v);
    }
  }
  Mat u = la::exp_i_hermitian(h);
  return MixingMatrix(Mat(u.leftCols(cols)));
}

PureDecomposition from_mixing(const DensityOperator& rho,
                              const MixingMatrix& w) {
  la::Eigensystem es = la::hermitian_eig(rho.mat());
  int d = rho.dim();
  double cut = la::kRankCut * std::max(0.0, es.values[d - 1]);
  std::vector<int> kept;
  for (int i = d - 1; i >= 0; --i) {
    if (es.values[i] > cut) kept.push_back(i);  // descending
  }
  int r = static_cast<int>(kept.size());
  if (w.cols() != r) {
    throw ParameterError("mixing matrix has " + std::to_string(w.cols()) +
                         " columns but the state has rank " +
                         std::to_string(r));
  }
  Mat scaled(d, r);  // columns sqrt(lambda_k) |e_k>
  for (int k = 0; k < r; ++k) {
    scaled.col(k) = std::sqrt(es.values[kept[static_cast<std::size_t>(k)]]) *
                    es.vectors.col(kept[static_cast<std::size_t>(k)]);
  }
  std::vector<double> weights;
  std::vector<Ket> kets;
  for (int i = 0; i < w.rows(); ++i) {
    Vec member = scaled * w.m.row(i).transpose();
    double wi = member.squaredNorm();
    weights.push_back(wi);
    kets.push_back(wi > kWeightFloor ? Ket(member) : Ket(Vec(scaled.col(0))));
  }
  return PureDecomposition(std::move(weights), std::move(kets));
}

PureDecomposition rank2_family(const Ket& psi1, const Ket& psi2,
                               const std::vector<Cplx>& gammas,
                               const std::vector<double>& alphas,
                               double lambda, Rank2Convention convention) {
  if (gammas.size() != alphas.size()) {
    throw ParameterError("gammas and alphas must have the same length");
  }
  if (lambda < -kConstraintTol || lambda > 1.0 + kConstraintTol) {
    throw ParameterError("lambda must lie in [0, 1]");
  }
  Ket p1 = psi1.normalized();
  Ket p2 = psi2.normalized();
  Cplx overlap = inner(p1, p2);
  if (std::abs(overlap) > 1.0 - 1e-10) {
    throw DegeneracyError("kets are linearly dependent");
  }

  double alpha_sum = 0.0, gamma2_sum = 0.0;
  Cplx cross_sum = 0.0;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (alphas[i] <= 0.0) {
      throw ParameterError("family weights must be positive");
    }
    alpha_sum += alphas[i];
    gamma2_sum += alphas[i] * std::norm(gammas[i]);
    cross_sum += alphas[i] * gammas[i];
  }
  double want_alpha =
      convention == Rank2Convention::WeightOnFirst ? lambda : 1.0 - lambda;
  double want_gamma2 = 1.0 - want_alpha;
  if (std::abs(alpha_sum - want_alpha) > kConstraintTol) {
    throw ConstraintError("sum of alphas " + std::to_string(alpha_sum) +
                          " violates the declared lambda");
  }
  if (std::abs(cross_sum) > kConstraintTol) {
    throw ConstraintError("sum of alpha_i gamma_i must vanish, got modulus " +
                          std::to_string(std::abs(cross_sum)));
  }
  double residual = want_gamma2 - gamma2_sum;
  if (residual < -kConstraintTol) {
    throw ConstraintError("sum of alpha_i |gamma_i|^2 exceeds the weight "
                          "available for the psi2 component");
  }

  std::vector<double> weights;
  std::vector<Ket> kets;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    Vec member = p1.amps + gammas[i] * p2.amps;
    double n2 = member.squaredNorm();
    if (n2 <= kWeightFloor) {
      throw DegeneracyError("family member psi1 + gamma psi2 vanishes");
    }
    weights.push_back(alphas[i] * n2);
    kets.push_back(Ket(member));
  }
  if (residual > kWeightFloor) {
    weights.push_back(residual);
    kets.push_back(p2);
  }
  return PureDecomposition(std::move(weights), std::move(kets));
}

DecompositionReport validate_decomposition(const PureDecomposition& d,
                                           const DensityOperator& rho) {
  DecompositionReport report;
  if (d.size() == 0) {
    report.empty = true;
    return report;
  }
  if (d.dim() != rho.dim()) {
    throw ParameterError("decomposition dimension does not match the state");
  }
  double wsum = 0.0;
  for (double w : d.weights) wsum += w;
  report.weight_sum_error = std::abs(wsum - 1.0);
  report.max_entry_error =
      (d.reconstruct_raw() - rho.mat()).cwiseAbs().maxCoeff();
  return report;
}

}  // namespace eoflab
