#include "eoflab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "eoflab/errors.hpp"

namespace eoflab {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double binary_entropy_bits(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double eof_from_concurrence(double c) {
  c = std::clamp(c, 0.0, 1.0);
  return binary_entropy_bits(0.5 * (1.0 + std::sqrt(1.0 - c * c)));
}

/// The spin-flip matrix (sigma_y (x) sigma_y), real symmetric orthogonal.
Mat spin_flip() {
  Mat y = Mat::Zero(4, 4);
  y(0, 3) = -1;
  y(1, 2) = 1;
  y(2, 1) = 1;
  y(3, 0) = -1;
  return y;
}

void require_two_qubit(const DensityOperator& rho) {
  if (rho.dim() != 4) {
    throw ParameterError("two-qubit oracle needs a 4-dimensional state");
  }
}

/// Takagi factorization tau = U diag(s) U^T of a complex symmetric matrix
/// through the eigendecomposition of the real symmetric embedding
/// [[Re, Im], [Im, -Re]]. Columns of U are complex-orthonormal; s >= 0
/// descending.
struct Takagi {
  Mat u;
  la::RVec s;
};

Takagi takagi_symmetric(const Mat& tau) {
  int r = static_cast<int>(tau.rows());
  la::RMat re = tau.real(), im = tau.imag();
  la::RMat big(2 * r, 2 * r);
  big.topLeftCorner(r, r) = re;
  big.topRightCorner(r, r) = im;
  big.bottomLeftCorner(r, r) = im;
  big.bottomRightCorner(r, r) = -re;
  Eigen::SelfAdjointEigenSolver<la::RMat> solver(big);
  if (solver.info() != Eigen::Success) {
    throw Error("takagi embedding eigendecomposition failed");
  }

  // eigenvalues come in +/- s pairs; scan from the largest downward and keep
  // vectors that stay independent under the complex inner product (the
  // discarded ones are the i*u partners living at -s, or duplicates inside
  // a zero cluster)
  Takagi out;
  out.u.resize(r, r);
  out.s.resize(r);
  int kept = 0;
  for (int idx = 2 * r - 1; idx >= 0 && kept < r; --idx) {
    double val = solver.eigenvalues()[idx];
    if (val < -1e-12) break;  // strictly negative half reached
    Vec cand(r);
    for (int j = 0; j < r; ++j) {
      cand[j] = Cplx(solver.eigenvectors()(j, idx),
                     solver.eigenvectors()(r + j, idx));
    }
    // complex Gram-Schmidt against accepted columns
    for (int k = 0; k < kept; ++k) {
      cand -= out.u.col(k).dot(cand) * out.u.col(k);
    }
    double n = cand.norm();
    if (n < 0.5) continue;  // dependent partner vector
    out.u.col(kept) = cand / n;
    out.s[kept] = std::max(0.0, val);
    ++kept;
  }
  if (kept != r) {
    throw Error("takagi factorization found only " + std::to_string(kept) +
                " of " + std::to_string(r) + " directions");
  }
  double resid = (out.u * out.s.asDiagonal() * out.u.transpose() - tau)
                     .cwiseAbs()
                     .maxCoeff();
  if (resid > 1e-8) {
    throw Error("takagi residual " + std::to_string(resid));
  }
  return out;
}

/// Subnormalized members x_i of the tilde-diagonal gauge: <x_i|x_twiddle_j>
/// = s_i delta_ij, with sum_i |x_i><x_i| = rho on the support.
struct TildeGauge {
  Mat members;  // d x r columns
  la::RVec s;   // descending
};

TildeGauge tilde_gauge(const DensityOperator& rho) {
  la::Eigensystem es = la::hermitian_eig(rho.mat());
  int d = rho.dim();
  double cut = la::kRankCut * std::max(0.0, es.values[d - 1]);
  std::vector<int> kept;
  for (int i = d - 1; i >= 0; --i) {
    if (es.values[i] > cut) kept.push_back(i);
  }
  int r = static_cast<int>(kept.size());
  Mat v(d, r);
  for (int k = 0; k < r; ++k) {
    v.col(k) = std::sqrt(es.values[kept[static_cast<std::size_t>(k)]]) *
               es.vectors.col(kept[static_cast<std::size_t>(k)]);
  }
  Mat y = spin_flip();
  Mat tau = v.adjoint() * y * v.conjugate();
  tau = 0.5 * (tau + tau.transpose()).eval();
  Takagi tk = takagi_symmetric(tau);
  TildeGauge out;
  out.members = v * tk.u;
  out.s = tk.s;
  return out;
}

Cplx tilde_bracket(const Vec& a, const Vec& b, const Mat& y) {
  // <a | y b*>
  return (a.adjoint() * (y * b.conjugate()))(0, 0);
}

/// Zero the diagonal of a real symmetric traceless matrix by accumulated
/// Givens rotations; rotations are applied synchronously to the member
/// matrix columns. Classic pairing of a positive diagonal entry with a
/// negative one; each rotation zeroes one index for good.
void zero_diagonal_rotations(la::RMat& dmat, Mat& members) {
  int r = static_cast<int>(dmat.rows());
  std::vector<bool> done(static_cast<std::size_t>(r), false);
  for (int round = 0; round < r - 1; ++round) {
    int ip = -1, in = -1;
    double vp = 1e-13, vn = -1e-13;
    for (int i = 0; i < r; ++i) {
      if (done[static_cast<std::size_t>(i)]) continue;
      if (dmat(i, i) > vp) {
        vp = dmat(i, i);
        ip = i;
      }
      if (dmat(i, i) < vn) {
        vn = dmat(i, i);
        in = i;
      }
    }
    if (ip < 0 || in < 0) break;  // active diagonal already flat to tolerance
    // rotation angle from d_ii + 2 t d_ij + t^2 d_jj = 0 with t = tan(theta)
    double dii = dmat(ip, ip), djj = dmat(in, in), dij = dmat(ip, in);
    double disc = dij * dij - dii * djj;
    double t;
    if (std::abs(djj) < 1e-300) {
      t = -dii / (2.0 * dij);
    } else {
      double root = std::sqrt(std::max(0.0, disc));
      double t1 = (-dij + root) / djj;
      double t2 = (-dij - root) / djj;
      t = std::abs(t1) <= std::abs(t2) ? t1 : t2;
    }
    double c = 1.0 / std::sqrt(1.0 + t * t);
    double s = t * c;
    // rows/cols ip, in of dmat under the Givens congruence
    la::RMat g = la::RMat::Identity(r, r);
    g(ip, ip) = c;
    g(ip, in) = s;
    g(in, ip) = -s;
    g(in, in) = c;
    dmat = (g * dmat * g.transpose()).eval();
    dmat(ip, ip) = 0.0;  // exact by construction
    // members mix with the same coefficients: y_i = sum_j g_ij z_j
    Mat mip = members.col(ip), min_ = members.col(in);
    members.col(ip) = c * mip + s * min_;
    members.col(in) = -s * mip + c * min_;
    done[static_cast<std::size_t>(ip)] = true;
  }
}

/// Members with preconcurrence exactly C, built from the tilde gauge by the
/// trace-invariant rotation argument.
PureDecomposition entangled_branch(const TildeGauge& gauge, double c_target,
                                   const Mat& y) {
  int r = static_cast<int>(gauge.members.cols());
  Mat z = gauge.members;
  // phases: first member keeps +s_1, the rest flip to -s_k
  for (int k = 1; k < r; ++k) z.col(k) *= Cplx(0, 1);

  la::RMat w(r, r);  // real symmetric in this gauge
  Mat gram(r, r);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      w(i, j) = tilde_bracket(z.col(i), z.col(j), y).real();
      gram(i, j) = (z.col(i).adjoint() * z.col(j))(0, 0);
    }
  }
  la::RMat dmat = w - c_target * gram.real();
  zero_diagonal_rotations(dmat, z);

  std::vector<double> weights;
  std::vector<Ket> kets;
  for (int i = 0; i < r; ++i) {
    double wi = z.col(i).squaredNorm();
    if (wi <= 1e-12) continue;
    weights.push_back(wi);
    kets.push_back(Ket(Vec(z.col(i))));
  }
  return PureDecomposition(std::move(weights), std::move(kets));
}

/// Zero-concurrence members for separable states: split the tilde weights
/// into equal cross-index pieces (possible exactly when the largest weight
/// is at most the sum of the others) and cancel each piece pair with an
/// opposing phase.
PureDecomposition separable_branch(const TildeGauge& gauge, const Mat& y) {
  int r = static_cast<int>(gauge.members.cols());
  std::vector<double> remaining(gauge.s.data(), gauge.s.data() + r);
  std::vector<double> weights;
  std::vector<Ket> kets;

  // members with zero tilde weight are already product states
  std::vector<int> active;
  for (int i = 0; i < r; ++i) {
    if (remaining[static_cast<std::size_t>(i)] > 1e-13) {
      active.push_back(i);
    } else {
      double wi = gauge.members.col(i).squaredNorm();
      if (wi > 1e-12) {
        weights.push_back(wi);
        kets.push_back(Ket(Vec(gauge.members.col(i))));
      }
    }
  }

  auto phase_of = [&](int i) {
    Cplx bracket = tilde_bracket(gauge.members.col(i), gauge.members.col(i), y);
    return std::abs(bracket) > 1e-300 ? std::arg(bracket) : 0.0;
  };

  int guard = 0;
  while (static_cast<int>(active.size()) >= 2 && guard++ < 4 * r + 8) {
    std::sort(active.begin(), active.end(), [&](int a, int b) {
      return remaining[static_cast<std::size_t>(a)] >
             remaining[static_cast<std::size_t>(b)];
    });
    int a = active[0], b = active[1];
    double va = remaining[static_cast<std::size_t>(a)];
    double vb = remaining[static_cast<std::size_t>(b)];
    double total = 0.0;
    for (int i : active) total += remaining[static_cast<std::size_t>(i)];
    double third =
        active.size() >= 3 ? remaining[static_cast<std::size_t>(active[2])] : 0.0;
    double t = std::min(vb, 0.5 * total - third);
    if (t <= 1e-15) t = vb;  // degenerate tail, drain the smaller entry
    // piece pair: u_pm = sqrt(t/(2 s_a)) z_a pm xi sqrt(t/(2 s_b)) z_b with
    // the phase xi chosen so the tilde brackets cancel
    double theta_a = phase_of(a), theta_b = phase_of(b);
    Cplx xi = std::polar(1.0, 0.5 * (theta_a - theta_b) + 0.25 * kTwoPi);
    double sa = gauge.s[a], sb = gauge.s[b];
    Vec za = std::sqrt(t / (2.0 * sa)) * gauge.members.col(a);
    Vec zb = std::sqrt(t / (2.0 * sb)) * gauge.members.col(b);
    for (int sign : {+1, -1}) {
      Vec u = za + double(sign) * xi * zb;
      double wu = u.squaredNorm();
      if (wu > 1e-12) {
        weights.push_back(wu);
        kets.push_back(Ket(u));
      }
    }
    remaining[static_cast<std::size_t>(a)] -= t;
    remaining[static_cast<std::size_t>(b)] -= t;
    std::erase_if(active, [&](int i) {
      return remaining[static_cast<std::size_t>(i)] <= 1e-13;
    });
  }
  if (!active.empty() &&
      remaining[static_cast<std::size_t>(active[0])] > 1e-9) {
    throw Error("separable pairing left unmatched tilde weight");
  }
  return PureDecomposition(std::move(weights), std::move(kets));
}

}  // namespace

double concurrence(const DensityOperator& rho) {
  require_two_qubit(rho);
  // The spin-flip spectrum is computed as the Takagi values of the tilde
  // overlap matrix rather than as square roots of the eigenvalues of
  // rho * rho_tilde: the latter squares the small values and loses half the
  // precision at the bottom of the spectrum.
  TildeGauge gauge = tilde_gauge(rho);
  double c = 0.0;
  for (Eigen::Index k = 0; k < gauge.s.size(); ++k) {
    c += (k == 0) ? gauge.s[k] : -gauge.s[k];
  }
  return std::max(0.0, c);
}

OracleResult two_qubit_eof(const DensityOperator& rho) {
  OracleResult out;
  out.method = OracleResult::Method::ClosedForm;
  out.concurrence = concurrence(rho);
  out.value = eof_from_concurrence(out.concurrence);
  return out;
}

PureDecomposition two_qubit_optimal_decomposition(const DensityOperator& rho) {
  require_two_qubit(rho);
  Mat y = spin_flip();
  TildeGauge gauge = tilde_gauge(rho);
  int r = static_cast<int>(gauge.members.cols());
  double c = gauge.s[0];
  for (int k = 1; k < r; ++k) c -= gauge.s[k];

  PureDecomposition d = (c > 1e-10) ? entangled_branch(gauge, c, y)
                                    : separable_branch(gauge, y);

  // construction self-check: every member must carry concurrence max(0, c)
  double target = std::max(0.0, c);
  for (int i = 0; i < d.size(); ++i) {
    const Vec& k = d.kets[static_cast<std::size_t>(i)].amps;
    double pre = std::abs(tilde_bracket(k, k, y));
    if (std::abs(pre - target) > 1e-8) {
      throw Error("optimal-decomposition member concurrence " +
                  std::to_string(pre) + " deviates from " +
                  std::to_string(target));
    }
  }
  double recon = (d.reconstruct_raw() - rho.mat()).cwiseAbs().maxCoeff();
  if (recon > 1e-9) {
    throw Error("optimal-decomposition reconstruction error " +
                std::to_string(recon));
  }
  return d;
}

OracleResult grid_eof(const DensityOperator& rho, const FactorLayout& layout,
                      int density) {
  layout.check_against(rho.dim());
  if (rho.dim() > 8) {
    throw SizeError("grid oracle is limited to total dimension 8");
  }
  if (density < 2) {
    throw ParameterError("grid density must be at least 2");
  }
  la::Eigensystem es = la::hermitian_eig(rho.mat());
  int d = rho.dim();
  double cut = la::kRankCut * std::max(0.0, es.values[d - 1]);
  std::vector<int> kept;
  for (int i = d - 1; i >= 0; --i) {
    if (es.values[i] > cut) kept.push_back(i);
  }
  int r = static_cast<int>(kept.size());
  if (r > 2) {
    throw SizeError("grid oracle is limited to rank <= 2 states");
  }
  la::IndexSplit split(layout.dims, layout.keep);
  auto restricted_entropy = [&](const Vec& unit) {
    return la::entropy_bits(la::reduced_from_ket(unit, split));
  };

  OracleResult out;
  out.method = OracleResult::Method::Grid;
  if (r == 1) {
    Vec k = es.vectors.col(kept[0]);
    out.value = restricted_entropy(k);
    return out;
  }

  double lambda = es.values[kept[0]];
  Vec psi1 = es.vectors.col(kept[0]);
  Vec psi2 = es.vectors.col(kept[1]);

  // eigen-decomposition corner of the family
  double best = lambda * restricted_entropy(psi1) +
                (1.0 - lambda) * restricted_entropy(psi2);

  // two-member family indexed by gamma: the partner parameters follow from
  // the constraint sums; grids nest whenever the coarse density divides the
  // fine one (moduli 16^(-1 + 2k/density), phases 2 pi j / density)
  for (int k = 0; k <= density; ++k) {
    double mod = std::pow(16.0, -1.0 + 2.0 * double(k) / density);
    for (int j = 0; j < density; ++j) {
      Cplx g1 = std::polar(mod, kTwoPi * j / density);
      double t = (1.0 - lambda) / (lambda * mod);
      Cplx g2 = -std::polar(t, kTwoPi * j / density);
      double a1 = lambda * t / (mod + t);
      double a2 = lambda * mod / (mod + t);
      Vec m1 = psi1 + g1 * psi2;
      Vec m2 = psi1 + g2 * psi2;
      double w1 = a1 * m1.squaredNorm();
      double w2 = a2 * m2.squaredNorm();
      double value = w1 * restricted_entropy(Vec(m1 / m1.norm())) +
                     w2 * restricted_entropy(Vec(m2 / m2.norm()));
      best = std::min(best, value);
    }
  }
  out.value = best;
  return out;
}

}  // namespace eoflab
