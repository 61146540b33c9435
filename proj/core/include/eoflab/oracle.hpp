#pragma once

#include "eoflab/decomposition.hpp"
#include "eoflab/state.hpp"

namespace eoflab {

/// Ground-truth value produced without the decomposition optimizer.
struct OracleResult {
  enum class Method { ClosedForm, Grid };
  double value = 0.0;  // bits
  Method method = Method::ClosedForm;
  double concurrence = 0.0;  // meaningful for the closed form only
};

/// Concurrence of a two-qubit state from the spin-flip spectrum.
double concurrence(const DensityOperator& rho);

/// Closed-form two-qubit entanglement of formation
/// h((1 + sqrt(1 - C^2)) / 2) with h the binary entropy in bits.
OracleResult two_qubit_eof(const DensityOperator& rho);

/// Constructive optimal decomposition of a two-qubit state: every member has
/// concurrence equal to the state's, so the average entanglement equals the
/// closed-form value. Deterministic; verifies its own output and throws
/// Error if the construction degrades numerically.
PureDecomposition two_qubit_optimal_decomposition(const DensityOperator& rho);

/// Brute-force minimum over the two-member gamma family of a rank <= 2
/// state on a nested (modulus, phase) grid. Monotone under density
/// refinement whenever the coarse density divides the fine one.
OracleResult grid_eof(const DensityOperator& rho, const FactorLayout& layout,
                      int density = 64);

}  // namespace eoflab
