#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gpt/herm.hpp"

namespace gpt {

class StateSpace;
using SpacePtr = std::shared_ptr<const StateSpace>;

enum class MembershipVerdict { Member, NotMember, Unknown };

/// Affine functional e(x) = coeffs . x + constant. A valid effect evaluates
/// inside [0, 1] on every state of its space.
class Effect {
 public:
  Effect() = default;
  Effect(Eigen::VectorXd coeffs, double constant)
      : coeffs_(std::move(coeffs)), constant_(constant) {}

  double operator()(const Eigen::VectorXd& coords) const {
    return coeffs_.dot(coords) + constant_;
  }

  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  double constant() const { return constant_; }

  /// Linear representative on the unit(x) = 1 hyperplane.
  Eigen::VectorXd linearized(const Eigen::VectorXd& unit) const {
    return coeffs_ + constant_ * unit;
  }

  Effect scaled(double factor) const { return {coeffs_ * factor, constant_ * factor}; }

 private:
  Eigen::VectorXd coeffs_;
  double constant_ = 0.0;
};

using Measurement = std::vector<Effect>;

/// Hilbert-space-backed model: coordinates are Hilbert-Schmidt components
/// against an orthonormal Hermitian basis. Membership, effect validity,
/// entropy, and pure-state generation are supplied by the model catalog.
struct MatrixModel {
  std::string name;
  std::vector<int> hilbert_dims;
  HermitianBasis basis;
  std::vector<HermMat> extra_pure_points;

  int generator_params = 0;
  std::function<HermMat(std::span<const double>)> pure_generator;
  std::function<MembershipVerdict(const Eigen::VectorXd&)> membership;
  std::function<bool(const Effect&)> effect_valid;
  std::function<std::optional<double>(const Eigen::VectorXd&)> entropy;
  /// True when eigendecomposition of a member state yields pure states of the
  /// model (e.g. a full matrix model over one system); refinement relies on it.
  bool spectral_pure_decomposition = false;
};

class State;

/// Convex state space over a real coordinate space, with the unique
/// deterministic effect u as a linear functional. Immutable after
/// construction; share via SpacePtr.
class StateSpace {
 public:
  /// Vertex-described polytope; rows of `vertices` are the pure states.
  /// Duplicate vertices (within 1e-12) are pruned; every vertex must satisfy
  /// unit(v) = 1.
  static SpacePtr polytope(std::string name, Eigen::MatrixXd vertices,
                           Eigen::VectorXd unit);
  static SpacePtr matrix_model(MatrixModel model);

  const std::string& name() const { return name_; }
  int ambient_dim() const { return static_cast<int>(unit_.size()); }
  const Eigen::VectorXd& unit() const { return unit_; }
  double unit_value(const Eigen::VectorXd& coords) const { return unit_.dot(coords); }

  bool is_polytope() const { return !model_.has_value(); }
  const Eigen::MatrixXd& vertices() const;
  int vertex_count() const { return static_cast<int>(vertices().rows()); }
  const MatrixModel& model() const;

  /// Dimension of the affine hull of the state set.
  int affine_dim() const { return affine_dim_; }

  /// Matrix-model coordinate conversions.
  Eigen::VectorXd coords_of(const HermMat& rho) const;
  HermMat matrix_of(const Eigen::VectorXd& coords) const;

  State vertex_state(int index, const SpacePtr& self) const;

 private:
  StateSpace() = default;

  std::string name_;
  Eigen::VectorXd unit_;
  Eigen::MatrixXd vertices_;  // polytope only; rows are vertices
  std::optional<MatrixModel> model_;
  int affine_dim_ = 0;
};

/// Normalized state: coordinates with unit(coords) = 1 within 1e-9 (checked
/// at construction). Full membership is checked by State::validated or the
/// operations whose contracts require it.
class State {
 public:
  State(Eigen::VectorXd coords, SpacePtr space);

  /// Also requires a decisive positive membership verdict.
  static State validated(Eigen::VectorXd coords, SpacePtr space);

  const Eigen::VectorXd& coords() const { return coords_; }
  const SpacePtr& space() const { return space_; }

 private:
  Eigen::VectorXd coords_;
  SpacePtr space_;
};

/// Subnormalized state as produced by instrument events; weight = unit(coords).
struct SubState {
  Eigen::VectorXd coords;
  double weight = 0.0;

  /// Normalized direction; requires weight > 1e-12.
  Eigen::VectorXd normalized() const;
};

/// Convex-hull membership. Polytopes decide by LP feasibility; matrix models
/// delegate to the catalog oracle (which may answer Unknown). Requires
/// unit(x) = 1 within 1e-9.
MembershipVerdict membership_verdict(const Eigen::VectorXd& coords, const StateSpace& space);
bool membership(const Eigen::VectorXd& coords, const StateSpace& space);

/// Convex coefficients over the vertex list: x = sum_i lambda_i v_i with
/// lambda >= 0, sum lambda = 1. Returns the (index, weight) pairs of a basic
/// solution (at most affine_dim + 1 of them). Throws when x is not a member
/// or the space is not a polytope.
std::vector<std::pair<int, double>> decompose_onto_vertices(const Eigen::VectorXd& coords,
                                                            const StateSpace& space);

/// Searches for a measurement with e_j(rho_{j'}) = delta_{jj'} (within 1e-9)
/// over a vertex-described space; empty when the defining LP is infeasible.
/// The returned effects sum to the unit functional coefficientwise (last
/// effect closed exactly).
std::optional<Measurement> perfectly_distinguishable(const std::vector<State>& states,
                                                     const StateSpace& space);

/// Extremality test: vertex coincidence for polytopes (1e-9), top eigenvalue
/// >= 1 - 1e-9 for matrix models.
bool is_pure(const State& rho);

bool is_valid_effect(const Effect& e, const StateSpace& space);
bool is_valid_measurement(const Measurement& m, const StateSpace& space);

/// Effect built from a Hermitian operator on a matrix-model space:
/// e(rho) = Tr{E rho}.
Effect effect_from_operator(const HermMat& op, const StateSpace& space);
HermMat operator_of_effect(const Effect& e, const StateSpace& space);

/// Any pure state of the model; used when a placeholder preparation is needed.
State default_pure_state(const SpacePtr& space);

/// Dimension of the affine hull of a set of points (rows).
int affine_rank(const Eigen::MatrixXd& points, double tol = 1e-9);

}  // namespace gpt
