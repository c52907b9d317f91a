#include "gpt/space.hpp"

#include <cmath>
#include <stdexcept>

#include "gpt/lp.hpp"

namespace gpt {

namespace {
constexpr double kEqTol = 1e-9;
constexpr double kDedupTol = 1e-12;
}  // namespace

int affine_rank(const Eigen::MatrixXd& points, double tol) {
  if (points.rows() <= 1) return 0;
  Eigen::MatrixXd centered = points.bottomRows(points.rows() - 1);
  centered.rowwise() -= points.row(0);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(centered.transpose());
  qr.setThreshold(tol);
  return static_cast<int>(qr.rank());
}

SpacePtr StateSpace::polytope(std::string name, Eigen::MatrixXd vertices,
                              Eigen::VectorXd unit) {
  if (vertices.rows() == 0 || vertices.cols() != unit.size()) {
    throw std::invalid_argument("StateSpace::polytope: bad vertex/unit dimensions");
  }
  // Prune duplicates and check normalization.
  std::vector<int> keep;
  for (int i = 0; i < vertices.rows(); ++i) {
    if (std::abs(unit.dot(vertices.row(i).transpose()) - 1.0) > kEqTol) {
      throw std::invalid_argument("StateSpace::polytope: vertex with unit(v) != 1");
    }
    bool dup = false;
    for (int j : keep) {
      if ((vertices.row(i) - vertices.row(j)).cwiseAbs().maxCoeff() <= kDedupTol) {
        dup = true;
        break;
      }
    }
    if (!dup) keep.push_back(i);
  }
  Eigen::MatrixXd pruned(static_cast<int>(keep.size()), vertices.cols());
  for (std::size_t r = 0; r < keep.size(); ++r) pruned.row(static_cast<int>(r)) = vertices.row(keep[r]);

  auto space = std::shared_ptr<StateSpace>(new StateSpace());
  space->name_ = std::move(name);
  space->unit_ = std::move(unit);
  space->vertices_ = std::move(pruned);
  space->affine_dim_ = affine_rank(space->vertices_);
  return space;
}

SpacePtr StateSpace::matrix_model(MatrixModel model) {
  const int d = model.basis.matrix_dim();
  auto space = std::shared_ptr<StateSpace>(new StateSpace());
  space->name_ = model.name;
  space->unit_ = Eigen::VectorXd::Zero(d * d);
  space->unit_(0) = std::sqrt(static_cast<double>(d));  // Tr rho = sqrt(d) x_0
  space->affine_dim_ = d * d - 1;
  space->model_ = std::move(model);
  return space;
}

const Eigen::MatrixXd& StateSpace::vertices() const {
  if (!is_polytope()) {
    throw std::logic_error("StateSpace::vertices: not a vertex-described space");
  }
  return vertices_;
}

const MatrixModel& StateSpace::model() const {
  if (is_polytope()) {
    throw std::logic_error("StateSpace::model: not a matrix model");
  }
  return *model_;
}

Eigen::VectorXd StateSpace::coords_of(const HermMat& rho) const {
  return model().basis.coords(rho);
}

HermMat StateSpace::matrix_of(const Eigen::VectorXd& coords) const {
  return model().basis.matrix(coords);
}

State StateSpace::vertex_state(int index, const SpacePtr& self) const {
  if (self.get() != this) {
    throw std::invalid_argument("StateSpace::vertex_state: self pointer mismatch");
  }
  return State(vertices().row(index).transpose(), self);
}

State::State(Eigen::VectorXd coords, SpacePtr space)
    : coords_(std::move(coords)), space_(std::move(space)) {
  if (!space_) throw std::invalid_argument("State: null space");
  if (coords_.size() != space_->ambient_dim()) {
    throw std::invalid_argument("State: coordinate length mismatch");
  }
  const double u = space_->unit_value(coords_);
  if (std::abs(u - 1.0) > kEqTol) {
    throw std::invalid_argument("State: unit(coords) = " + std::to_string(u) +
                                ", expected 1");
  }
}

State State::validated(Eigen::VectorXd coords, SpacePtr space) {
  State s(std::move(coords), std::move(space));
  if (membership_verdict(s.coords(), *s.space()) != MembershipVerdict::Member) {
    throw std::invalid_argument("State::validated: membership not established");
  }
  return s;
}

Eigen::VectorXd SubState::normalized() const {
  if (weight <= 1e-12) {
    throw std::runtime_error("SubState::normalized: weight too small");
  }
  return coords / weight;
}

MembershipVerdict membership_verdict(const Eigen::VectorXd& coords,
                                     const StateSpace& space) {
  if (coords.size() != space.ambient_dim()) {
    throw std::invalid_argument("membership: coordinate length mismatch");
  }
  if (std::abs(space.unit_value(coords) - 1.0) > kEqTol) {
    throw std::invalid_argument("membership: unit(x) != 1");
  }
  if (!space.is_polytope()) {
    const auto& oracle = space.model().membership;
    if (!oracle) {
      throw std::runtime_error("membership: model '" + space.name() +
                               "' has no membership oracle");
    }
    return oracle(coords);
  }
  const auto& v = space.vertices();
  // Quick hit: coincides with a vertex.
  for (int i = 0; i < v.rows(); ++i) {
    if ((v.row(i).transpose() - coords).cwiseAbs().maxCoeff() <= kEqTol) {
      return MembershipVerdict::Member;
    }
  }
  lp::ProgramBuilder builder;
  const int lam = builder.add_variables(static_cast<int>(v.rows()));
  for (int d = 0; d < coords.size(); ++d) {
    lp::ProgramBuilder::Terms terms;
    for (int i = 0; i < v.rows(); ++i) terms.push_back({lam + i, v(i, d)});
    builder.add_eq(std::move(terms), coords(d));
  }
  lp::ProgramBuilder::Terms norm;
  for (int i = 0; i < v.rows(); ++i) norm.push_back({lam + i, 1.0});
  builder.add_eq(std::move(norm), 1.0);
  const auto result = lp::solve(builder.build());
  if (result.status == lp::Status::Feasible) return MembershipVerdict::Member;
  if (result.status == lp::Status::Infeasible) return MembershipVerdict::NotMember;
  throw std::runtime_error("membership: LP did not converge");
}

bool membership(const Eigen::VectorXd& coords, const StateSpace& space) {
  return membership_verdict(coords, space) == MembershipVerdict::Member;
}

std::vector<std::pair<int, double>> decompose_onto_vertices(const Eigen::VectorXd& coords,
                                                            const StateSpace& space) {
  const auto& v = space.vertices();
  lp::ProgramBuilder builder;
  const int lam = builder.add_variables(static_cast<int>(v.rows()));
  for (int d = 0; d < coords.size(); ++d) {
    lp::ProgramBuilder::Terms terms;
    for (int i = 0; i < v.rows(); ++i) terms.push_back({lam + i, v(i, d)});
    builder.add_eq(std::move(terms), coords(d));
  }
  lp::ProgramBuilder::Terms norm;
  for (int i = 0; i < v.rows(); ++i) norm.push_back({lam + i, 1.0});
  builder.add_eq(std::move(norm), 1.0);
  const auto result = lp::solve(builder.build());
  if (!result.feasible()) {
    throw std::runtime_error("decompose_onto_vertices: point is not a member");
  }
  std::vector<std::pair<int, double>> out;
  double total = 0.0;
  for (int i = 0; i < v.rows(); ++i) {
    const double w = result.x(lam + i);
    if (w > 1e-12) {
      out.push_back({i, w});
      total += w;
    }
  }
  for (auto& [idx, w] : out) w /= total;
  return out;
}

std::optional<Measurement> perfectly_distinguishable(const std::vector<State>& states,
                                                     const StateSpace& space) {
  if (states.size() < 2) {
    throw std::invalid_argument("perfectly_distinguishable: need at least 2 states");
  }
  for (const auto& s : states) {
    if (membership_verdict(s.coords(), space) != MembershipVerdict::Member) {
      throw std::invalid_argument("perfectly_distinguishable: state not in space");
    }
  }
  const auto& v = space.vertices();
  const int dim = space.ambient_dim();
  const int k = static_cast<int>(states.size());

  // Variables: per effect j, affine coefficients (a_j, c_j), all free.
  lp::ProgramBuilder builder;
  const int base = builder.add_variables(k * (dim + 1), -lp::kInf, lp::kInf);
  const auto var = [&](int j, int t) { return base + j * (dim + 1) + t; };

  const auto effect_terms = [&](int j, const Eigen::VectorXd& x) {
    lp::ProgramBuilder::Terms terms;
    for (int d = 0; d < dim; ++d) terms.push_back({var(j, d), x(d)});
    terms.push_back({var(j, dim), 1.0});
    return terms;
  };

  // 0 <= e_j(v) <= 1 at every vertex.
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < v.rows(); ++i) {
      const Eigen::VectorXd x = v.row(i).transpose();
      builder.add_ge(effect_terms(j, x), 0.0);
      builder.add_le(effect_terms(j, x), 1.0);
    }
  }
  // sum_j e_j = u as affine functionals.
  for (int d = 0; d < dim; ++d) {
    lp::ProgramBuilder::Terms terms;
    for (int j = 0; j < k; ++j) terms.push_back({var(j, d), 1.0});
    builder.add_eq(std::move(terms), space.unit()(d));
  }
  {
    lp::ProgramBuilder::Terms terms;
    for (int j = 0; j < k; ++j) terms.push_back({var(j, dim), 1.0});
    builder.add_eq(std::move(terms), 0.0);
  }
  // e_j(rho_{j'}) = delta.
  for (int j = 0; j < k; ++j) {
    for (int jp = 0; jp < k; ++jp) {
      builder.add_eq(effect_terms(j, states[static_cast<std::size_t>(jp)].coords()),
                     j == jp ? 1.0 : 0.0);
    }
  }

  const auto result = lp::solve(builder.build());
  if (result.status == lp::Status::Infeasible) return std::nullopt;
  if (!result.feasible()) {
    throw std::runtime_error("perfectly_distinguishable: LP did not converge");
  }

  Measurement meas;
  meas.reserve(static_cast<std::size_t>(k));
  Eigen::VectorXd sum_a = Eigen::VectorXd::Zero(dim);
  double sum_c = 0.0;
  for (int j = 0; j + 1 < k; ++j) {
    Eigen::VectorXd a(dim);
    for (int d = 0; d < dim; ++d) a(d) = result.x(var(j, d));
    const double c = result.x(var(j, dim));
    sum_a += a;
    sum_c += c;
    meas.emplace_back(std::move(a), c);
  }
  // Close the measurement exactly: the last effect absorbs rounding.
  meas.emplace_back(space.unit() - sum_a, -sum_c);
  return meas;
}

bool is_pure(const State& rho) {
  const auto& space = *rho.space();
  if (space.is_polytope()) {
    const auto& v = space.vertices();
    for (int i = 0; i < v.rows(); ++i) {
      if ((v.row(i).transpose() - rho.coords()).cwiseAbs().maxCoeff() <= kEqTol) {
        return true;
      }
    }
    return false;
  }
  const auto eig = eig_herm(space.matrix_of(rho.coords()));
  return eig.eigenvalues(0) >= 1.0 - kEqTol;
}

bool is_valid_effect(const Effect& e, const StateSpace& space) {
  if (e.coeffs().size() != space.ambient_dim()) return false;
  if (space.is_polytope()) {
    const auto& v = space.vertices();
    for (int i = 0; i < v.rows(); ++i) {
      const double val = e(v.row(i).transpose());
      if (val < -kEqTol || val > 1.0 + kEqTol) return false;
    }
    return true;
  }
  const auto& validator = space.model().effect_valid;
  if (!validator) {
    throw std::runtime_error("is_valid_effect: model '" + space.name() +
                             "' has no effect validator");
  }
  return validator(e);
}

bool is_valid_measurement(const Measurement& m, const StateSpace& space) {
  if (m.empty()) return false;
  Eigen::VectorXd sum_a = Eigen::VectorXd::Zero(space.ambient_dim());
  double sum_c = 0.0;
  for (const auto& e : m) {
    if (!is_valid_effect(e, space)) return false;
    sum_a += e.coeffs();
    sum_c += e.constant();
  }
  // sum_j e_j = u as affine functionals, coefficientwise.
  return (sum_a - space.unit()).cwiseAbs().maxCoeff() <= 1e-12 &&
         std::abs(sum_c) <= 1e-12;
}

Effect effect_from_operator(const HermMat& op, const StateSpace& space) {
  return Effect(space.model().basis.coords(op), 0.0);
}

HermMat operator_of_effect(const Effect& e, const StateSpace& space) {
  const HermMat base = space.model().basis.matrix(e.coeffs());
  if (e.constant() == 0.0) return base;
  return base.plus(HermMat::identity(base.dim()), e.constant());
}

State default_pure_state(const SpacePtr& space) {
  if (space->is_polytope()) {
    return space->vertex_state(0, space);
  }
  const auto& model = space->model();
  if (!model.extra_pure_points.empty()) {
    return State(space->coords_of(model.extra_pure_points.front()), space);
  }
  if (model.pure_generator) {
    const std::vector<double> params(static_cast<std::size_t>(model.generator_params), 0.0);
    return State(space->coords_of(model.pure_generator(params)), space);
  }
  throw std::runtime_error("default_pure_state: model has no pure-state source");
}

}  // namespace gpt
