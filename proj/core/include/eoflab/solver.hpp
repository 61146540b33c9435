#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "eoflab/decomposition.hpp"
#include "eoflab/ensembles.hpp"
#include "eoflab/state.hpp"

namespace eoflab {

/// Knobs for the decomposition optimizer. Member counts are swept from the
/// state rank r upward; the default sweep {r, r+1, 2r, r^2} trades the full
/// ladder for runtime and can be overridden with member_counts. Everything
/// randomized is derived from seed, so identical configs reproduce identical
/// results bit for bit.
struct SolverConfig {
  int restarts = 16;
  int sweep_restarts = 2;       // restarts for member counts above r
  int max_iters = 160;          // gradient-refinement iterations
  long nm_max_evals = 0;        // 0 = auto (scaled with parameter count)
  double tol = 1e-7;
  std::uint64_t seed = 20260808ULL;
  int max_members = 0;          // 0 = r^2
  std::vector<int> member_counts;              // explicit sweep override
  std::vector<PureDecomposition> warm_starts;  // extra starting points
  int threads = 1;
};

struct RestartRecord {
  int member_count = 0;
  int restart_index = 0;
  double value = 0.0;
  long evals = 0;
  bool converged = false;
};

struct OptimizerTrace {
  std::vector<RestartRecord> restarts;
  long total_evals = 0;
};

/// Result of a decomposition minimization. value is the best average member
/// entropy found (an upper bound on the true minimum by construction).
struct EofResult {
  double value = 0.0;
  PureDecomposition argmin;
  bool converged = false;
  bool hit_member_cap = false;
  int best_member_count = 0;
  int best_restart = -1;
  std::uint64_t seed = 0;
  OptimizerTrace trace;
};

/// Average restricted entropy of the members, in bits.
double average_entanglement(const PureDecomposition& d,
                            const FactorLayout& layout);

/// Entanglement of formation: minimum average restricted entropy over pure
/// decompositions of rho.
EofResult eof(const DensityOperator& rho, const FactorLayout& layout,
              const SolverConfig& cfg = {});

struct SubalgebraEntropyResult {
  double value = 0.0;               // H_rho
  double restricted_entropy = 0.0;  // S of rho on the restriction
  EofResult minimization;
};

/// Entropy of the restriction minus the minimized average member entropy.
SubalgebraEntropyResult entropy_of_subalgebra(const DensityOperator& rho,
                                              const FactorLayout& layout,
                                              const SolverConfig& cfg = {});
SubalgebraEntropyResult entropy_of_subalgebra(const DensityOperator& rho,
                                              const SubalgebraMap& map,
                                              const SolverConfig& cfg = {});

struct AccessibleInfoResult {
  double value = 0.0;
  double label_entropy = 0.0;  // S(rho o gamma)
  EofResult minimization;
};

/// Accessible information of an ensemble: entropy of the mixture on the
/// label algebra minus the minimized average label entropy over pure
/// decompositions of the mixture.
AccessibleInfoResult accessible_information(const Ensemble& e,
                                            const SolverConfig& cfg = {});

/// Average label entropy of a decomposition under a subalgebra map.
double average_label_entropy(const PureDecomposition& d,
                             const SubalgebraMap& map);

namespace detail {
/// Generic engine: minimize sum_i w_i * member_entropy(psi_i) over all pure
/// decompositions of rho. The functor receives unit-norm member kets.
EofResult minimize_average_entropy(
    const DensityOperator& rho,
    const std::function<double(const Vec&)>& member_entropy,
    const SolverConfig& cfg);
}  // namespace detail

}  // namespace eoflab
