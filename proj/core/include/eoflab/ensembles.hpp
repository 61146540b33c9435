#pragma once

#include <vector>

#include "eoflab/state.hpp"

namespace eoflab {

/// A labelled source: probabilities q_l, states rho_l, and their mixture.
struct Ensemble {
  std::vector<double> probs;
  std::vector<DensityOperator> states;
  DensityOperator mixture;

  static Ensemble make(std::vector<double> probs,
                       std::vector<DensityOperator> states);
  int dim() const { return mixture.dim(); }
  int size() const { return static_cast<int>(probs.size()); }

 private:
  Ensemble(std::vector<double> p, std::vector<DensityOperator> s,
           DensityOperator m);
};

/// Positive operators summing to the identity.
struct Povm {
  std::vector<Mat> elements;

  static Povm make(std::vector<Mat> elements);
  int dim() const { return static_cast<int>(elements.front().rows()); }
  int size() const { return static_cast<int>(elements.size()); }

 private:
  explicit Povm(std::vector<Mat> e) : elements(std::move(e)) {}
};

/// The positive unital map determined by generators a_l >= 0 with
/// sum a_l = 1. Applying it to a state yields the probability vector
/// (Tr(sigma a_l))_l, a state on the abelian algebra spanned by the labels.
struct SubalgebraMap {
  std::vector<Mat> generators;

  static SubalgebraMap make(std::vector<Mat> generators);
  int dim() const { return static_cast<int>(generators.front().rows()); }
  int size() const { return static_cast<int>(generators.size()); }

  la::RVec apply(const Mat& sigma) const;
  la::RVec apply_ket(const Vec& unit_psi) const;

 private:
  explicit SubalgebraMap(std::vector<Mat> g) : generators(std::move(g)) {}
};

/// The unique generators a_l = rho^{-1/2} q_l rho_l rho^{-1/2} (pseudo-inverse
/// on the support of the mixture; any kernel mass of the identity is
/// distributed over the labels proportionally to q). Throws SupportError if
/// some member leaks outside the support of the mixture.
SubalgebraMap subalgebra_map_from_ensemble(const Ensemble& e);

/// Mutual information (bits) of source label vs measurement outcome,
/// evaluated as the explicit double sum over outcome probabilities.
double povm_information(const Ensemble& e, const Povm& b);

/// The same quantity evaluated through the subalgebra map: entropy of the
/// mixture on the label algebra minus the average entropy of the
/// measurement-conditioned states sigma_i = sqrt(rho) b_i sqrt(rho) / p_i.
double povm_information_via_subalgebra(const Ensemble& e, const Povm& b);

/// The POVM induced by a pure decomposition {p_i, |psi_i>} of the mixture:
/// b_i = rho^{-1/2} p_i |psi_i><psi_i| rho^{-1/2} plus a kernel top-up.
Povm povm_from_decomposition(const DensityOperator& rho,
                             const std::vector<double>& weights,
                             const std::vector<Ket>& kets);

}  // namespace eoflab
