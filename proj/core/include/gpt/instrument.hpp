#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gpt/decomposition.hpp"
#include "gpt/space.hpp"

namespace gpt {

/// Affine event map x -> linear x + offset, as it appears on the wire.
/// Internally instruments store the linearized form linear + offset * u^T,
/// which agrees on normalized states and extends linearly to subnormalized
/// ones (so composition is plain matrix algebra).
struct AffineMap {
  Eigen::MatrixXd linear;
  Eigen::VectorXd offset;
};

/// Conditional probability kernel p(j|k): rows j, columns k, column sums 1.
class ConditionalKernel {
 public:
  explicit ConditionalKernel(Eigen::MatrixXd p);
  static ConditionalKernel identity(int n);

  const Eigen::MatrixXd& p() const { return p_; }
  int rows() const { return static_cast<int>(p_.rows()); }
  int cols() const { return static_cast<int>(p_.cols()); }

 private:
  Eigen::MatrixXd p_;
};

/// Instrument as a finite family of affine subnormalized-state-valued maps.
/// Construction enforces the normalization identity u o (sum_j s_j) = u;
/// positivity on the space is checked by validate_instrument (complete for
/// polytopes, probe-based for matrix models).
class GenericInstrument {
 public:
  GenericInstrument(SpacePtr space, const std::vector<AffineMap>& events);
  GenericInstrument(SpacePtr space, std::vector<Eigen::MatrixXd> linear_events);

  static GenericInstrument identity(SpacePtr space);

  const SpacePtr& space() const { return space_; }
  int num_outcomes() const { return static_cast<int>(events_.size()); }
  const Eigen::MatrixXd& event(int j) const { return events_.at(static_cast<std::size_t>(j)); }

  /// Outcome probability functional e_j = u o s_j.
  Effect outcome_effect(int j) const;

 private:
  SpacePtr space_;
  std::vector<Eigen::MatrixXd> events_;
};

/// Measure-and-prepare-pure instrument: on outcome j, prepare the fixed pure
/// state outputs[j]. Effects must form a measurement (closing exactly on the
/// unit functional) and outputs must be pure.
class MPPInstrument {
 public:
  MPPInstrument(SpacePtr space, Measurement effects, std::vector<State> outputs);

  const SpacePtr& space() const { return space_; }
  int num_outcomes() const { return static_cast<int>(effects_.size()); }
  const Effect& effect(int j) const { return effects_.at(static_cast<std::size_t>(j)); }
  const State& output(int j) const { return outputs_.at(static_cast<std::size_t>(j)); }
  const Measurement& effects() const { return effects_; }

  GenericInstrument to_generic() const;

 private:
  SpacePtr space_;
  Measurement effects_;
  std::vector<State> outputs_;
};

/// Measure-and-prepare with arbitrary (possibly mixed) prepared states; the
/// MPP constructor routes through this.
GenericInstrument measure_and_prepare(SpacePtr space, const Measurement& effects,
                                      const std::vector<State>& outputs);

SubState apply(const GenericInstrument& instr, int outcome, const State& rho);
SubState apply(const MPPInstrument& instr, int outcome, const State& rho);

struct RepeatabilityResult {
  bool repeatable = false;
  /// False when the probe set does not affinely span the space, in which
  /// case the verdict holds on the probes only.
  bool probes_span = false;

  explicit operator bool() const { return repeatable; }
};

/// Checks s_{j'} o s_j = delta_{j'j} s_j on the given probe states.
RepeatabilityResult is_repeatable(const GenericInstrument& instr,
                                  const std::vector<State>& probes, double tol = 1e-9);
RepeatabilityResult is_repeatable(const MPPInstrument& instr,
                                  const std::vector<State>& probes, double tol = 1e-9);

/// Checks sum_j s_j(rho) = rho.
bool is_state_preserving(const GenericInstrument& instr, const State& rho,
                         double tol = 1e-9);
bool is_state_preserving(const MPPInstrument& instr, const State& rho,
                         double tol = 1e-9);

/// Post-processing s_j = sum_k p(j|k) t_k; kernel columns must match t's
/// outcome count.
GenericInstrument coarse_grain(const GenericInstrument& t, const ConditionalKernel& kernel);

/// Decides the instrument preorder at rho: returns a kernel p(j|k) with
/// s_j(rho) = sum_k p(j|k) t_k(rho) when one exists (LP feasibility), empty
/// otherwise.
std::optional<ConditionalKernel> groenewold_majorizes(const GenericInstrument& t,
                                                      const GenericInstrument& s,
                                                      const State& rho);

struct Refinement {
  MPPInstrument instrument;
  /// (original outcome, branch) per refined outcome; branch 0 = unsplit.
  std::vector<std::pair<int, int>> labels;
};

/// Splits every mixed output of s at rho into pure components (vertex-hull
/// coefficients for polytopes, eigendecomposition for spectral matrix
/// models), yielding an MPP instrument that majorizes s at rho. Outcomes
/// with e_j(rho) <= 1e-12 are kept unsplit with a placeholder preparation.
Refinement refine_to_pure(const GenericInstrument& s, const State& rho);

/// Builds the separating instrument of a PDP decomposition: outcome j fires
/// with effect witness_j and re-prepares states_j. Repeatable on the
/// decomposed face and preserving the decomposition's target.
MPPInstrument make_separating_spm(const PDPDecomposition& decomp);

/// Full positivity audit: every event must map every pure state (vertices,
/// or sampled probes on matrix models) into the subnormalized-state cone.
bool validate_instrument(const GenericInstrument& instr,
                         const std::vector<State>& probes = {}, double tol = 1e-9);

}  // namespace gpt
