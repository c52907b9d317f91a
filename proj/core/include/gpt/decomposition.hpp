#pragma once

#include <vector>

#include <Eigen/Dense>

#include "gpt/space.hpp"

namespace gpt {

/// Convex decomposition of a state into perfectly distinguishable pure
/// states: target = sum_i probs_i states_i, certified by a witness
/// measurement with witness_i(states_{i'}) = delta.
struct PDPDecomposition {
  Eigen::VectorXd probs;
  std::vector<State> states;
  Measurement witness;

  Eigen::VectorXd target_coords() const;
};

/// Throws std::invalid_argument when any of the type's invariants fails:
/// strictly positive probabilities summing to one, pure states reproducing
/// the target, and a delta-valued witness.
void validate_pdp(const PDPDecomposition& decomp);

struct DecompositionSet {
  State target;
  std::vector<PDPDecomposition> decompositions;
  /// True when the enumeration covered every candidate within its size cap.
  bool complete = false;
  /// Affinely dependent vertex subsets rejected without a weight search.
  int skipped_dependent = 0;
};

}  // namespace gpt
