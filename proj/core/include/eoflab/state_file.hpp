#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eoflab/ensembles.hpp"
#include "eoflab/state.hpp"

namespace eoflab {

/// Parsed contents of a state file. The JSON schema:
///   {
///     "dims": [2, 2],
///     "matrix": [[[re, im], ...], ...],        // optional density matrix
///     "kets": [[[re, im], ...], ...],          // optional ket list
///     "ensemble": {                            // optional
///       "probs": [q1, ...],
///       "members": [matrix, ...]
///     }
///   }
/// Real entries may be written as plain numbers instead of [re, im] pairs.
/// Violated state invariants surface as ParseError naming the invariant and
/// the worst offending magnitude.
struct StateFile {
  std::vector<int> dims;
  std::optional<DensityOperator> matrix;
  std::vector<Ket> kets;
  std::optional<Ensemble> ensemble;

  int total_dim() const {
    int t = 1;
    for (int d : dims) t *= d;
    return t;
  }
};

StateFile parse_state_file(const std::string& path);
StateFile parse_state_text(const std::string& text);

}  // namespace eoflab
