#pragma once

#include <vector>

#include "eoflab/linalg.hpp"

namespace eoflab {

using la::Cplx;
using la::Mat;
using la::Vec;

/// Total-dimension cap for tensor products and built scenarios.
inline constexpr int kDefaultDimCap = 64;

// Invariant tolerances for state types.
inline constexpr double kHermTol = 1e-12;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kUnitNormTol = 1e-8;

/// A complex vector state. Operations state whether they require unit norm;
/// the type itself only demands a finite, nonzero norm.
struct Ket {
  Vec amps;

  Ket() = default;
  explicit Ket(Vec a);

  int dim() const { return static_cast<int>(amps.size()); }
  double norm() const { return amps.norm(); }
  Ket normalized() const;
  /// Throws NormalizationError if the norm deviates from 1 beyond tol.
  void require_unit(double tol = kUnitNormTol) const;
};

Cplx inner(const Ket& a, const Ket& b);  // <a|b>
Ket tensor(const Ket& a, const Ket& b);

/// Ordered tensor-factor dimensions plus the subset of factors kept by a
/// restriction. Factor indices are 0-based internally; the CLI accepts
/// 1-based indices and converts.
struct FactorLayout {
  std::vector<int> dims;
  std::vector<int> keep;

  FactorLayout() = default;
  FactorLayout(std::vector<int> dims_, std::vector<int> keep_);

  static FactorLayout bipartite(int d1, int d2, int kept_factor);

  int total_dim() const;
  int kept_dim() const;
  std::vector<int> complement() const;
  /// Throws LayoutError unless total_dim() == state_dim.
  void check_against(int state_dim) const;
};

/// Hermitian, positive-semidefinite, unit-trace matrix. The constructor
/// enforces all three invariants; eigenvalues in [-1e-10, 0) are tolerated
/// (treated as zero downstream), anything lower is a hard error.
class DensityOperator {
 public:
  explicit DensityOperator(Mat m);

  static DensityOperator pure(const Ket& k);
  static DensityOperator maximally_mixed(int dim);
  static DensityOperator diagonal(const la::RVec& probs);

  const Mat& mat() const { return mat_; }
  int dim() const { return static_cast<int>(mat_.rows()); }
  /// Numerical rank at the relative cutoff la::kRankCut.
  int rank() const;

 private:
  Mat mat_;
};

struct SchmidtDecomposition {
  la::RVec coefficients;   // nonnegative, descending
  std::vector<Ket> left;   // orthonormal
  std::vector<Ket> right;  // orthonormal
  int rank(double threshold = 1e-10) const;
};

// ---- operations ----

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b,
                       int dim_cap = kDefaultDimCap);

/// Partial trace over the complement of layout.keep.
DensityOperator restrict_state(const DensityOperator& rho,
                               const FactorLayout& layout);
/// Reduced state of |psi><psi| on the kept block; requires unit norm.
DensityOperator restrict_ket(const Ket& psi, const FactorLayout& layout);

/// von Neumann entropy in bits.
double von_neumann_entropy(const DensityOperator& rho);

/// Schmidt decomposition of a unit-norm ket across a two-block split of the
/// layout's factors. layout.keep must be a contiguous prefix or suffix run
/// of factor indices; it names the left block.
SchmidtDecomposition schmidt(const Ket& psi, const FactorLayout& layout);

/// A ket on dim^2 whose restriction to the first block equals rho.
Ket purify(const DensityOperator& rho);

/// Reorder tensor factors; order[k] names the old factor placed at slot k.
Ket permute_factors(const Ket& psi, const std::vector<int>& dims,
                    const std::vector<int>& order);

}  // namespace eoflab
