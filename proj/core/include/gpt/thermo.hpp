#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "gpt/decomposition.hpp"
#include "gpt/instrument.hpp"
#include "gpt/space.hpp"

namespace gpt {

/// -sum p_i ln p_i in nats, with 0 ln 0 = 0 and entries clipped at 1e-12.
/// Requires p >= -1e-9 componentwise and sum p = 1 +- 1e-9.
double shannon_entropy(const Eigen::VectorXd& p);

/// All convex decompositions of rho over affinely independent, jointly
/// perfectly distinguishable vertex subsets of size <= max_size. The empty
/// set is a legal answer (rho need not be weakly spectral). max_size <= 0
/// selects affine_dim + 1, the largest affinely independent subset size.
DecompositionSet enumerate_pdp_decompositions(const State& rho, const StateSpace& space,
                                              int max_size = 0);

/// Spectral decomposition of a density matrix on a matrix-model space, with
/// the eigenbasis projective measurement as witness.
PDPDecomposition quantum_pdp(const HermMat& rho, const SpacePtr& space);

/// Work ledger of the membrane cycle: separate along one decomposition,
/// remix along the other. Units: entropies in nats, work in k_B*T.
struct CycleReport {
  double W_separation = 0.0;
  double W_mixing = 0.0;
  double delta_W = 0.0;
  long N = 0;
  double T = 0.0;
  double k_B = 1.0;
};

/// Isothermal compression work to sort N particles along the decomposition:
/// H(probs) * N * k_B * T.
double separation_work(const PDPDecomposition& decomp, long N, double T, double k_B = 1.0);

/// Runs the cycle separating along decomp_q and remixing along decomp_p.
/// Both decompositions must reproduce the same state within 1e-9, otherwise
/// the cycle does not close and std::invalid_argument is thrown.
CycleReport cycle_delta_work(const PDPDecomposition& decomp_q,
                             const PDPDecomposition& decomp_p, long N, double T,
                             double k_B = 1.0);

enum class UniquenessKind { Unique, NonUnique, Empty };

struct UniquenessVerdict {
  UniquenessKind kind = UniquenessKind::Empty;
  /// Distinct entropy values found (1e-9 dedup); singleton when Unique.
  std::vector<double> entropies;

  double entropy() const;  // requires Unique
};

UniquenessVerdict check_entropy_uniqueness(const DecompositionSet& ds);

/// Model-supplied spectral entropy; empty when the entropy is undefined or
/// not unique at the given state.
using EntropyOracle = std::function<std::optional<double>(const State&)>;

/// Polytopes: decomposition enumeration + uniqueness verdict (with a direct
/// barycentric fast path when the vertices are affinely independent).
/// Matrix models: whatever the catalog installed (eigenvalue entropy for
/// full single-system models, nothing otherwise).
EntropyOracle make_entropy_oracle(const SpacePtr& space);

/// H(p rho1 + (1-p) rho2) >= p H(rho1) + (1-p) H(rho2), within slack.
/// Throws when the oracle is undefined at any of the three states.
bool concavity_check(const State& rho1, const State& rho2, double p,
                     const EntropyOracle& entropy, double slack = 1e-9);

/// Information gain H(rho) - sum_j e_j(rho) H(s_j(rho)/e_j(rho)); outcomes
/// with e_j(rho) <= 1e-12 contribute zero. Throws when the entropy is
/// undefined or non-unique at rho or at a normalized output.
double info_gain(const State& rho, const GenericInstrument& instr,
                 const EntropyOracle& entropy);

enum class MonotonicityVerdict { Holds, Violated, NotComparable };

/// Whether information gain respects the instrument preorder at rho:
/// NotComparable when t does not majorize s there, otherwise Holds iff
/// I_G(rho, t) >= I_G(rho, s) - slack.
MonotonicityVerdict monotonicity_check(const State& rho, const GenericInstrument& t,
                                       const GenericInstrument& s,
                                       const EntropyOracle& entropy, double slack = 1e-9);

/// Per-chamber cumulative work of the two isothermal legs, in CSV columns
/// leg,chamber,progress,volume_fraction,cumulative_work.
void write_work_curve_csv(std::ostream& out, const PDPDecomposition& decomp_q,
                          const PDPDecomposition& decomp_p, long N, double T,
                          double k_B = 1.0, int steps = 50);

}  // namespace gpt
