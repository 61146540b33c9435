#pragma once

#include <vector>

#include "eoflab/rng.hpp"
#include "eoflab/state.hpp"

namespace eoflab {

/// Weights alpha_i > 0 summing to 1 and unit-norm kets realizing
/// rho = sum_i alpha_i |psi_i><psi_i|. Members below weight 1e-12 are
/// dropped on construction.
struct PureDecomposition {
  std::vector<double> weights;
  std::vector<Ket> kets;

  PureDecomposition() = default;
  PureDecomposition(std::vector<double> w, std::vector<Ket> k);

  int size() const { return static_cast<int>(weights.size()); }
  int dim() const { return kets.empty() ? 0 : kets.front().dim(); }
  Mat reconstruct_raw() const;
  DensityOperator reconstruct() const;
};

/// m x r matrix with orthonormal columns; every decomposition of a rank-r
/// state arises from one applied to the eigen-ensemble.
struct MixingMatrix {
  Mat m;

  explicit MixingMatrix(Mat mat);
  static MixingMatrix identity(int r);
  static MixingMatrix random(int rows, int cols, Rng& rng);

  int rows() const { return static_cast<int>(m.rows()); }
  int cols() const { return static_cast<int>(m.cols()); }
};

struct DecompositionReport {
  double max_entry_error = 0.0;
  double weight_sum_error = 0.0;
  bool empty = false;
  bool ok(double tol = 1e-9) const {
    return !empty && max_entry_error <= tol && weight_sum_error <= tol;
  }
};

/// Apply a mixing matrix to the eigen-ensemble of rho. w.cols() must equal
/// the numerical rank of rho.
PureDecomposition from_mixing(const DensityOperator& rho,
                              const MixingMatrix& w);

/// Which of the two constraint-sum conventions the gamma family uses.
/// WeightOnFirst: sum alpha = lambda, sum alpha |gamma|^2 = 1 - lambda,
/// producing lambda |psi1><psi1| + (1-lambda) |psi2><psi2|.
/// WeightOnSecond mirrors the two sums (the produced state then carries
/// 1 - lambda on psi1).
enum class Rank2Convention { WeightOnFirst, WeightOnSecond };

/// The general decomposition family of a rank-2 mixture of |psi1>, |psi2>:
/// members |psi1 + gamma_i psi2| with weights alpha_i, stored normalized
/// with norms absorbed into the weights. Any weight left over from the
/// |gamma|^2 constraint sum is carried by a pure psi2 member.
PureDecomposition rank2_family(const Ket& psi1, const Ket& psi2,
                               const std::vector<Cplx>& gammas,
                               const std::vector<double>& alphas,
                               double lambda,
                               Rank2Convention convention =
                                   Rank2Convention::WeightOnFirst);

/// Reconstruction report of a decomposition against a target state.
DecompositionReport validate_decomposition(const PureDecomposition& d,
                                           const DensityOperator& rho);

}  // namespace eoflab
