#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace eoflab::la {

using Cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

// Relative eigenvalue cutoff for rank and support decisions.
inline constexpr double kRankCut = 1e-12;
// Eigenvalues in [kEigFloor, 0) are clipped to 0 before logs; below is an error.
inline constexpr double kEigFloor = -1e-10;

struct Eigensystem {
  RVec values;  // ascending (Eigen convention)
  Mat vectors;  // columns
};

/// Hermitian eigendecomposition; the single numerical kernel everything
/// else (entropies, Schmidt data, operator square roots, exp(iH)) routes
/// through. The input is symmetrized before solving.
Eigensystem hermitian_eig(const Mat& m);
RVec hermitian_eigenvalues(const Mat& m);

/// -sum lambda log2 lambda over the spectrum of a Hermitian psd matrix.
/// Eigenvalues in [kEigFloor, 0) count as 0; below kEigFloor throws
/// PositivityError.
double entropy_bits(const Mat& rho);

/// Shannon entropy in bits of a probability vector; entries in
/// [kEigFloor, 0) count as 0, below throws PositivityError.
double shannon_bits(const RVec& p);

/// Principal square root of a Hermitian psd matrix (negative clip as above).
Mat sqrt_psd(const Mat& m);

/// Pseudo-inverse square root on the support: eigenvalues below
/// rel_cut * lambda_max are treated as exact zeros.
Mat pinv_sqrt_psd(const Mat& m, double rel_cut = kRankCut);

/// Support projector of a Hermitian psd matrix at the same relative cutoff.
Mat support_projector(const Mat& m, double rel_cut = kRankCut);

/// log2 of a Hermitian psd matrix taken on its support; eigenvectors below
/// the cutoff contribute nothing. Also reports the support dimension.
Mat log2_on_support(const Mat& m, double rel_cut, int* support_dim);

/// exp(i h) for Hermitian h, via the eigendecomposition of h.
Mat exp_i_hermitian(const Mat& h);

Mat kron(const Mat& a, const Mat& b);
Vec kron(const Vec& a, const Vec& b);

/// Index bookkeeping for splitting a flat tensor index into a kept block and
/// a traced-out block. keep holds 0-based factor indices, strictly
/// increasing. Kept (and complement) multi-indices are flattened in the
/// original factor order.
struct IndexSplit {
  int kept_dim = 1;
  int rest_dim = 1;
  std::vector<int> kept_of;  // flat index -> kept part
  std::vector<int> rest_of;  // flat index -> complement part
  IndexSplit(const std::vector<int>& dims, const std::vector<int>& keep);
};

/// Partial trace over the complement of `keep`.
Mat partial_trace(const Mat& m, const IndexSplit& split);
Mat partial_trace(const Mat& m, const std::vector<int>& dims,
                  const std::vector<int>& keep);

/// Reduced matrix of |psi><psi| on the kept block, computed as M M^dagger of
/// the reshaped ket without forming the full projector.
Mat reduced_from_ket(const Vec& psi, const IndexSplit& split);

/// Reduced matrix of |psi><phi| on the kept block (M_psi M_phi^dagger).
Mat cross_reduced_from_kets(const Vec& psi, const Vec& phi,
                            const IndexSplit& split);

/// Reorder tensor factors of a ket: order[k] names the old factor placed at
/// position k of the output.
Vec permute_factors(const Vec& psi, const std::vector<int>& dims,
                    const std::vector<int>& order);

/// Largest entrywise deviation from Hermiticity, max |m - m^dagger|.
double hermiticity_error(const Mat& m);

/// Operator Schmidt coefficients of an operator on a bipartite space
/// (dims d1 x d2): singular values of the realigned matrix, descending.
/// Computed through the Hermitian kernel (eigenvalues of R R^dagger).
RVec operator_schmidt_coefficients(const Mat& op, int d1, int d2);

}  // namespace eoflab::la
