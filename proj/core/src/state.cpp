#include "eoflab/state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "eoflab/errors.hpp"

namespace eoflab {

Ket::Ket(Vec a) : amps(std::move(a)) {
  if (amps.size() == 0) {
    throw ParameterError("ket must have positive dimension");
  }
  double n = amps.norm();
  if (!std::isfinite(n) || n <= 0.0) {
    throw NormalizationError("ket norm must be finite and positive");
  }
}

Ket Ket::normalized() const {
  return Ket(Vec(amps / amps.norm()));
}

void Ket::require_unit(double tol) const {
  if (std::abs(norm() - 1.0) > tol) {
    throw NormalizationError("ket norm " + std::to_string(norm()) +
                             " deviates from 1 beyond " + std::to_string(tol));
  }
}

Cplx inner(const Ket& a, const Ket& b) {
  if (a.dim() != b.dim()) {
    throw ParameterError("inner product of kets with different dimensions");
  }
  return a.amps.dot(b.amps);  // Eigen dot conjugates the left argument
}

Ket tensor(const Ket& a, const Ket& b) { return Ket(la::kron(a.amps, b.amps)); }

FactorLayout::FactorLayout(std::vector<int> dims_, std::vector<int> keep_)
    : dims(std::move(dims_)), keep(std::move(keep_)) {
  if (dims.empty()) {
    throw LayoutError("layout needs at least one factor");
  }
  for (int d : dims) {
    if (d < 1) throw LayoutError("factor dimensions must be >= 1");
  }
  if (keep.empty()) {
    throw LayoutError("restriction subset must be nonempty");
  }
  std::vector<int> sorted = keep;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw LayoutError("restriction subset has repeated factor indices");
  }
  if (sorted.front() < 0 || sorted.back() >= static_cast<int>(dims.size())) {
    throw LayoutError("restriction index out of range");
  }
  keep = std::move(sorted);
}

FactorLayout FactorLayout::bipartite(int d1, int d2, int kept_factor) {
  return FactorLayout({d1, d2}, {kept_factor});
}

int FactorLayout::total_dim() const {
  int t = 1;
  for (int d : dims) t *= d;
  return t;
}

int FactorLayout::kept_dim() const {
  int t = 1;
  for (int k : keep) t *= dims[static_cast<std::size_t>(k)];
  return t;
}

std::vector<int> FactorLayout::complement() const {
  std::vector<int> out;
  std::size_t ki = 0;
  for (int f = 0; f < static_cast<int>(dims.size()); ++f) {
    if (ki < keep.size() && keep[ki] == f) {
      ++ki;
    } else {
      out.push_back(f);
    }
  }
  return out;
}

void FactorLayout::check_against(int state_dim) const {
  if (total_dim() != state_dim) {
    throw LayoutError("layout dimension " + std::to_string(total_dim()) +
                      " does not match state dimension " +
                      std::to_string(state_dim));
  }
}

DensityOperator::DensityOperator(Mat m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw ParameterError("density operator must be a nonempty square matrix");
  }
  double herm = la::hermiticity_error(m);
  if (herm > kHermTol) {
    throw HermiticityError("matrix deviates from Hermitian by " +
                           std::to_string(herm));
  }
  mat_ = 0.5 * (m + m.adjoint());
  double tr = mat_.trace().real();
  if (std::abs(tr - 1.0) > kTraceTol) {
    throw TraceError("trace " + std::to_string(tr) +
                     " deviates from 1 beyond tolerance");
  }
  la::RVec ev = la::hermitian_eigenvalues(mat_);
  if (ev.size() && ev[0] < la::kEigFloor) {
    throw PositivityError("eigenvalue " + std::to_string(ev[0]) +
                          " below positivity floor");
  }
}

DensityOperator DensityOperator::pure(const Ket& k) {
  Ket n = k.normalized();
  return DensityOperator(Mat(n.amps * n.amps.adjoint()));
}

DensityOperator DensityOperator::maximally_mixed(int dim) {
  return DensityOperator(Mat(Mat::Identity(dim, dim) / double(dim)));
}

DensityOperator DensityOperator::diagonal(const la::RVec& probs) {
  Mat m = Mat::Zero(probs.size(), probs.size());
  for (Eigen::Index i = 0; i < probs.size(); ++i) m(i, i) = probs[i];
  return DensityOperator(m);
}

int DensityOperator::rank() const {
  la::RVec ev = la::hermitian_eigenvalues(mat_);
  double cut = la::kRankCut * std::max(0.0, ev[ev.size() - 1]);
  int r = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] > cut) ++r;
  }
  return r;
}

int SchmidtDecomposition::rank(double threshold) const {
  int r = 0;
  for (Eigen::Index i = 0; i < coefficients.size(); ++i) {
    if (coefficients[i] > threshold) ++r;
  }
  return r;
}

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b,
                       int dim_cap) {
  long total = static_cast<long>(a.dim()) * b.dim();
  if (total > dim_cap) {
    throw SizeError("tensor product dimension " + std::to_string(total) +
                    " exceeds cap " + std::to_string(dim_cap));
  }
  return DensityOperator(la::kron(a.mat(), b.mat()));
}

DensityOperator restrict_state(const DensityOperator& rho,
                               const FactorLayout& layout) {
  layout.check_against(rho.dim());
  return DensityOperator(la::partial_trace(rho.mat(), layout.dims, layout.keep));
}

DensityOperator restrict_ket(const Ket& psi, const FactorLayout& layout) {
  layout.check_against(psi.dim());
  psi.require_unit();
  la::IndexSplit split(layout.dims, layout.keep);
  return DensityOperator(la::reduced_from_ket(psi.amps, split));
}

double von_neumann_entropy(const DensityOperator& rho) {
  return la::entropy_bits(rho.mat());
}

SchmidtDecomposition schmidt(const Ket& psi, const FactorLayout& layout) {
  layout.check_against(psi.dim());
  psi.require_unit();
  // the left block must be a contiguous prefix of the factor list; permute
  // factors first for any other two-block split
  int nf = static_cast<int>(layout.dims.size());
  if (layout.keep.front() != 0 ||
      layout.keep.back() != static_cast<int>(layout.keep.size()) - 1 ||
      static_cast<int>(layout.keep.size()) >= nf) {
    throw LayoutError(
        "schmidt split requires the left block to be a strict leading prefix "
        "of the factors");
  }

  la::IndexSplit split(layout.dims, layout.keep);
  Mat m = Mat::Zero(split.kept_dim, split.rest_dim);
  for (Eigen::Index g = 0; g < psi.amps.size(); ++g) {
    m(split.kept_of[static_cast<std::size_t>(g)],
      split.rest_of[static_cast<std::size_t>(g)]) = psi.amps[g];
  }

  // Schmidt data from the Hermitian kernel: left vectors and coefficients
  // from M M^dagger. The right factor of the ket expansion is the conjugate
  // of the right singular vector: psi = sum beta u (x) conj(M^dagger u)/beta.
  // Eigenvalues are cut relative to the largest one; the Gram route squares
  // the coefficients, so absolute noise sits at ~1e-16 and would otherwise
  // surface as spurious 1e-8 coefficients with garbage right vectors.
  la::Eigensystem es = la::hermitian_eig(Mat(m * m.adjoint()));
  SchmidtDecomposition out;
  int n = static_cast<int>(es.values.size());
  double cut = la::kRankCut * std::max(0.0, es.values[n - 1]);
  std::vector<double> coeffs;
  std::vector<Ket> left, right;
  std::vector<Vec> right_raw;
  for (int i = n - 1; i >= 0; --i) {
    double v = es.values[i];
    if (v <= cut) continue;
    double beta = std::sqrt(v);
    Vec u = es.vectors.col(i);
    Vec w = (m.transpose() * u.conjugate()) / beta;
    // polish the right factor against the previous ones; the raw vectors
    // carry O(eps/beta) cross terms
    for (const Vec& prev : right_raw) {
      w -= prev.dot(w) * prev;
    }
    w /= w.norm();
    right_raw.push_back(w);
    coeffs.push_back(beta);
    left.push_back(Ket(u));
    right.push_back(Ket(w));
  }
  out.coefficients = la::RVec::Map(coeffs.data(), coeffs.size());
  out.left = std::move(left);
  out.right = std::move(right);
  return out;
}

Ket purify(const DensityOperator& rho) {
  la::Eigensystem es = la::hermitian_eig(rho.mat());
  int d = rho.dim();
  Vec out = Vec::Zero(static_cast<Eigen::Index>(d) * d);
  for (int k = 0; k < d; ++k) {
    double v = std::max(0.0, es.values[k]);
    if (v <= 0.0) continue;
    double s = std::sqrt(v);
    // |e_k> (x) |k> with the ancilla in the computational basis
    for (int i = 0; i < d; ++i) {
      out[static_cast<Eigen::Index>(i) * d + k] += s * es.vectors(i, k);
    }
  }
  return Ket(out);
}

Ket permute_factors(const Ket& psi, const std::vector<int>& dims,
                    const std::vector<int>& order) {
  int total = 1;
  for (int d : dims) total *= d;
  if (total != psi.dim()) {
    throw LayoutError("permute_factors: dims do not match ket dimension");
  }
  if (order.size() != dims.size()) {
    throw LayoutError("permute_factors: order must name every factor once");
  }
  return Ket(la::permute_factors(psi.amps, dims, order));
}

}  // namespace eoflab
