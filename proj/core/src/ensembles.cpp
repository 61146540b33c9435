#include "eoflab/ensembles.hpp"

#include <cmath>
#include <string>

#include "eoflab/errors.hpp"

namespace eoflab {

namespace {
constexpr double kProbTol = 1e-10;
constexpr double kCompletenessTol = 1e-10;
constexpr double kLog2e = 1.4426950408889634073599246810019;

double plogp_sum(const la::RVec& p) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) s += p[i] * std::log(p[i]);
  }
  return s * kLog2e;
}
}  // namespace

Ensemble::Ensemble(std::vector<double> p, std::vector<DensityOperator> s,
                   DensityOperator m)
    : probs(std::move(p)), states(std::move(s)), mixture(std::move(m)) {}

Ensemble Ensemble::make(std::vector<double> probs,
                        std::vector<DensityOperator> states) {
  if (probs.empty() || probs.size() != states.size()) {
    throw ParameterError("ensemble needs matching nonempty probs and states");
  }
  double sum = 0.0;
  for (double q : probs) {
    if (q <= 0.0) throw ParameterError("ensemble probabilities must be > 0");
    sum += q;
  }
  if (std::abs(sum - 1.0) > kProbTol) {
    throw ParameterError("ensemble probabilities sum to " +
                         std::to_string(sum));
  }
  int d = states.front().dim();
  Mat mix = Mat::Zero(d, d);
  for (std::size_t l = 0; l < probs.size(); ++l) {
    if (states[l].dim() != d) {
      throw ParameterError("ensemble states must share one dimension");
    }
    mix += probs[l] * states[l].mat();
  }
  return Ensemble(std::move(probs), std::move(states), DensityOperator(mix));
}

Povm Povm::make(std::vector<Mat> elements) {
  if (elements.empty()) throw ParameterError("povm needs at least one element");
  int d = static_cast<int>(elements.front().rows());
  Mat sum = Mat::Zero(d, d);
  for (const Mat& b : elements) {
    if (b.rows() != d || b.cols() != d) {
      throw ParameterError("povm elements must be square of one dimension");
    }
    la::RVec ev = la::hermitian_eigenvalues(b);
    if (ev.size() && ev[0] < la::kEigFloor) {
      throw PositivityError("povm element eigenvalue below floor");
    }
    sum += b;
  }
  double err = (sum - Mat::Identity(d, d)).cwiseAbs().maxCoeff();
  if (err > kCompletenessTol) {
    throw ParameterError("povm elements sum deviates from identity by " +
                         std::to_string(err));
  }
  return Povm(std::move(elements));
}

SubalgebraMap SubalgebraMap::make(std::vector<Mat> generators) {
  if (generators.empty()) {
    throw ParameterError("subalgebra map needs at least one generator");
  }
  int d = static_cast<int>(generators.front().rows());
  Mat sum = Mat::Zero(d, d);
  for (const Mat& a : generators) {
    la::RVec ev = la::hermitian_eigenvalues(a);
    if (ev.size() && ev[0] < la::kEigFloor) {
      throw PositivityError("subalgebra generator eigenvalue below floor");
    }
    sum += a;
  }
  double err = (sum - Mat::Identity(d, d)).cwiseAbs().maxCoeff();
  if (err > kCompletenessTol) {
    throw ParameterError("subalgebra generators sum deviates from identity by " +
                         std::to_string(err));
  }
  return SubalgebraMap(std::move(generators));
}

la::RVec SubalgebraMap::apply(const Mat& sigma) const {
  la::RVec out(size());
  for (int l = 0; l < size(); ++l) {
    out[l] = (sigma * generators[static_cast<std::size_t>(l)]).trace().real();
  }
  return out;
}

la::RVec SubalgebraMap::apply_ket(const Vec& unit_psi) const {
  la::RVec out(size());
  for (int l = 0; l < size(); ++l) {
    out[l] = (unit_psi.adjoint() * generators[static_cast<std::size_t>(l)] *
              unit_psi)(0, 0)
                 .real();
  }
  return out;
}

SubalgebraMap subalgebra_map_from_ensemble(const Ensemble& e) {
  const Mat& rho = e.mixture.mat();
  Mat inv_sqrt = la::pinv_sqrt_psd(rho);
  Mat proj = la::support_projector(rho);
  int d = e.dim();
  Mat kernel = Mat::Identity(d, d) - proj;

  // support check: q_l rho_l <= rho forces every member inside the support
  for (int l = 0; l < e.size(); ++l) {
    const Mat& rl = e.states[static_cast<std::size_t>(l)].mat();
    double leak = (kernel * rl * kernel).cwiseAbs().maxCoeff();
    if (leak > 1e-9) {
      throw SupportError("ensemble member " + std::to_string(l) +
                         " has weight outside the mixture support");
    }
  }

  std::vector<Mat> gens;
  gens.reserve(static_cast<std::size_t>(e.size()));
  for (int l = 0; l < e.size(); ++l) {
    Mat a = inv_sqrt *
            (e.probs[static_cast<std::size_t>(l)] *
             e.states[static_cast<std::size_t>(l)].mat()) *
            inv_sqrt;
    a += e.probs[static_cast<std::size_t>(l)] * kernel;
    gens.push_back(0.5 * (a + a.adjoint()));
  }
  return SubalgebraMap::make(std::move(gens));
}

double povm_information(const Ensemble& e, const Povm& b) {
  if (e.dim() != b.dim()) {
    throw ParameterError("ensemble and povm dimensions differ");
  }
  la::RVec outcome(b.size());
  for (int i = 0; i < b.size(); ++i) {
    outcome[i] =
        (e.mixture.mat() * b.elements[static_cast<std::size_t>(i)]).trace().real();
  }
  double info = -plogp_sum(outcome);
  for (int l = 0; l < e.size(); ++l) {
    la::RVec cond(b.size());
    for (int i = 0; i < b.size(); ++i) {
      cond[i] = (e.states[static_cast<std::size_t>(l)].mat() *
                 b.elements[static_cast<std::size_t>(i)])
                    .trace()
                    .real();
    }
    info += e.probs[static_cast<std::size_t>(l)] * plogp_sum(cond);
  }
  return info;
}

double povm_information_via_subalgebra(const Ensemble& e, const Povm& b) {
  if (e.dim() != b.dim()) {
    throw ParameterError("ensemble and povm dimensions differ");
  }
  SubalgebraMap gamma = subalgebra_map_from_ensemble(e);
  Mat sqrt_rho = la::sqrt_psd(e.mixture.mat());
  double info = la::shannon_bits(gamma.apply(e.mixture.mat()));
  for (int i = 0; i < b.size(); ++i) {
    Mat conditioned =
        sqrt_rho * b.elements[static_cast<std::size_t>(i)] * sqrt_rho;
    double p = conditioned.trace().real();
    if (p <= 1e-15) continue;  // outcome never fires
    info -= p * la::shannon_bits(gamma.apply(Mat(conditioned / p)));
  }
  return info;
}

Povm povm_from_decomposition(const DensityOperator& rho,
                             const std::vector<double>& weights,
                             const std::vector<Ket>& kets) {
  if (weights.empty() || weights.size() != kets.size()) {
    throw ParameterError("decomposition weights and kets must match");
  }
  Mat inv_sqrt = la::pinv_sqrt_psd(rho.mat());
  Mat proj = la::support_projector(rho.mat());
  int d = rho.dim();
  Mat kernel = Mat::Identity(d, d) - proj;
  std::vector<Mat> elements;
  elements.reserve(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    Vec scaled = inv_sqrt * kets[i].normalized().amps;
    Mat b = weights[i] * (scaled * scaled.adjoint());
    b += (weights[i]) * kernel;
    elements.push_back(0.5 * (b + b.adjoint()));
  }
  return Povm::make(std::move(elements));
}

}  // namespace eoflab
