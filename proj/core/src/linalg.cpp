#include "eoflab/linalg.hpp"

#include <cmath>
#include <numeric>

#include "eoflab/errors.hpp"

namespace eoflab::la {

namespace {
constexpr double kLog2e = 1.4426950408889634073599246810019;  // 1/ln 2
}

Eigensystem hermitian_eig(const Mat& m) {
  Mat h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> solver(h);
  if (solver.info() != Eigen::Success) {
    throw Error("hermitian eigendecomposition failed to converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

RVec hermitian_eigenvalues(const Mat& m) {
  Mat h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error("hermitian eigendecomposition failed to converge");
  }
  return solver.eigenvalues();
}

double entropy_bits(const Mat& rho) {
  if (rho.rows() == 1) {
    return 0.0;
  }
  RVec ev = hermitian_eigenvalues(rho);
  double s = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    double v = ev[i];
    if (v < kEigFloor) {
      throw PositivityError("eigenvalue " + std::to_string(v) +
                            " below positivity floor");
    }
    if (v > 0.0) {
      s -= v * std::log(v);
    }
  }
  return s * kLog2e;
}

double shannon_bits(const RVec& p) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    double v = p[i];
    if (v < kEigFloor) {
      throw PositivityError("probability " + std::to_string(v) +
                            " below positivity floor");
    }
    if (v > 0.0) {
      s -= v * std::log(v);
    }
  }
  return s * kLog2e;
}

Mat sqrt_psd(const Mat& m) {
  Eigensystem es = hermitian_eig(m);
  RVec d(es.values.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    double v = es.values[i];
    if (v < kEigFloor) {
      throw PositivityError("matrix square root of non-psd input");
    }
    d[i] = v > 0.0 ? std::sqrt(v) : 0.0;
  }
  return es.vectors * d.asDiagonal() * es.vectors.adjoint();
}

Mat pinv_sqrt_psd(const Mat& m, double rel_cut) {
  Eigensystem es = hermitian_eig(m);
  double top = es.values.size() ? es.values[es.values.size() - 1] : 0.0;
  double cut = rel_cut * std::max(top, 0.0);
  RVec d = RVec::Zero(es.values.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (es.values[i] > cut) {
      d[i] = 1.0 / std::sqrt(es.values[i]);
    }
  }
  return es.vectors * d.asDiagonal() * es.vectors.adjoint();
}

Mat support_projector(const Mat& m, double rel_cut) {
  Eigensystem es = hermitian_eig(m);
  double top = es.values.size() ? es.values[es.values.size() - 1] : 0.0;
  double cut = rel_cut * std::max(top, 0.0);
  Mat p = Mat::Zero(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < es.values.size(); ++i) {
    if (es.values[i] > cut) {
      p += es.vectors.col(i) * es.vectors.col(i).adjoint();
    }
  }
  return p;
}

Mat log2_on_support(const Mat& m, double rel_cut, int* support_dim) {
  Eigensystem es = hermitian_eig(m);
  double top = es.values.size() ? es.values[es.values.size() - 1] : 0.0;
  double cut = rel_cut * std::max(top, 0.0);
  Mat out = Mat::Zero(m.rows(), m.cols());
  int dim = 0;
  for (Eigen::Index i = 0; i < es.values.size(); ++i) {
    if (es.values[i] > cut) {
      out += (std::log(es.values[i]) * kLog2e) * es.vectors.col(i) *
             es.vectors.col(i).adjoint();
      ++dim;
    }
  }
  if (support_dim) *support_dim = dim;
  return out;
}

Mat exp_i_hermitian(const Mat& h) {
  Eigensystem es = hermitian_eig(h);
  Vec phases(es.values.size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) {
    phases[i] = std::polar(1.0, es.values[i]);
  }
  return es.vectors * phases.asDiagonal() * es.vectors.adjoint();
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Vec kron(const Vec& a, const Vec& b) {
  Vec out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a[i] * b;
  }
  return out;
}

IndexSplit::IndexSplit(const std::vector<int>& dims,
                       const std::vector<int>& keep) {
  int total = 1;
  for (int d : dims) total *= d;
  std::vector<bool> kept(dims.size(), false);
  for (int k : keep) kept[static_cast<std::size_t>(k)] = true;
  for (std::size_t f = 0; f < dims.size(); ++f) {
    (kept[f] ? kept_dim : rest_dim) *= dims[f];
  }
  kept_of.resize(static_cast<std::size_t>(total));
  rest_of.resize(static_cast<std::size_t>(total));
  for (int g = 0; g < total; ++g) {
    int rem = g, kidx = 0, ridx = 0;
    for (std::size_t f = 0; f < dims.size(); ++f) {
      // row-major factor order: factor 0 is the most significant block
      int stride = total;
      for (std::size_t ff = 0; ff <= f; ++ff) stride /= dims[ff];
      int digit = rem / stride;
      rem -= digit * stride;
      if (kept[f]) {
        kidx = kidx * dims[f] + digit;
      } else {
        ridx = ridx * dims[f] + digit;
      }
    }
    kept_of[static_cast<std::size_t>(g)] = kidx;
    rest_of[static_cast<std::size_t>(g)] = ridx;
  }
}

Mat partial_trace(const Mat& m, const IndexSplit& split) {
  Mat out = Mat::Zero(split.kept_dim, split.kept_dim);
  int total = static_cast<int>(m.rows());
  for (int i = 0; i < total; ++i) {
    for (int j = 0; j < total; ++j) {
      if (split.rest_of[static_cast<std::size_t>(i)] ==
          split.rest_of[static_cast<std::size_t>(j)]) {
        out(split.kept_of[static_cast<std::size_t>(i)],
            split.kept_of[static_cast<std::size_t>(j)]) += m(i, j);
      }
    }
  }
  return out;
}

Mat partial_trace(const Mat& m, const std::vector<int>& dims,
                  const std::vector<int>& keep) {
  return partial_trace(m, IndexSplit(dims, keep));
}

Mat reduced_from_ket(const Vec& psi, const IndexSplit& split) {
  Mat reshaped = Mat::Zero(split.kept_dim, split.rest_dim);
  for (Eigen::Index g = 0; g < psi.size(); ++g) {
    reshaped(split.kept_of[static_cast<std::size_t>(g)],
             split.rest_of[static_cast<std::size_t>(g)]) = psi[g];
  }
  return reshaped * reshaped.adjoint();
}

Mat cross_reduced_from_kets(const Vec& psi, const Vec& phi,
                            const IndexSplit& split) {
  Mat a = Mat::Zero(split.kept_dim, split.rest_dim);
  Mat b = Mat::Zero(split.kept_dim, split.rest_dim);
  for (Eigen::Index g = 0; g < psi.size(); ++g) {
    a(split.kept_of[static_cast<std::size_t>(g)],
      split.rest_of[static_cast<std::size_t>(g)]) = psi[g];
    b(split.kept_of[static_cast<std::size_t>(g)],
      split.rest_of[static_cast<std::size_t>(g)]) = phi[g];
  }
  return a * b.adjoint();
}

Vec permute_factors(const Vec& psi, const std::vector<int>& dims,
                    const std::vector<int>& order) {
  int total = static_cast<int>(psi.size());
  Vec out(total);
  std::vector<int> out_digit(order.size());
  std::vector<int> src_digit(dims.size(), 0);
  for (int g = 0; g < total; ++g) {
    // digits of g in the *output* factor order (position k holds old factor
    // order[k])
    int rem = g;
    int run = total;
    for (std::size_t k = 0; k < order.size(); ++k) {
      run /= dims[static_cast<std::size_t>(order[k])];
      out_digit[k] = rem / run;
      rem -= out_digit[k] * run;
    }
    // reassemble the source index in the original factor order
    for (std::size_t k = 0; k < order.size(); ++k) {
      src_digit[static_cast<std::size_t>(order[k])] = out_digit[k];
    }
    int src = 0;
    for (std::size_t f = 0; f < dims.size(); ++f) {
      src = src * dims[f] + src_digit[f];
    }
    out[g] = psi[src];
  }
  return out;
}

double hermiticity_error(const Mat& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

RVec operator_schmidt_coefficients(const Mat& op, int d1, int d2) {
  // realign: R[(i,i'),(j,j')] = op[(i,j),(i',j')]
  Mat r(d1 * d1, d2 * d2);
  for (int i = 0; i < d1; ++i) {
    for (int ip = 0; ip < d1; ++ip) {
      for (int j = 0; j < d2; ++j) {
        for (int jp = 0; jp < d2; ++jp) {
          r(i * d1 + ip, j * d2 + jp) = op(i * d2 + j, ip * d2 + jp);
        }
      }
    }
  }
  Mat gram = (r.rows() <= r.cols()) ? Mat(r * r.adjoint())
                                    : Mat(r.adjoint() * r);
  RVec ev = hermitian_eigenvalues(gram);
  RVec out(ev.size());
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    out[k] = std::sqrt(std::max(0.0, ev[ev.size() - 1 - k]));
  }
  return out;
}

}  // namespace eoflab::la
