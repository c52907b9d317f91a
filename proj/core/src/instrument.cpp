#include "gpt/instrument.hpp"

#include <cmath>
#include <stdexcept>

#include "gpt/lp.hpp"

namespace gpt {

namespace {
constexpr double kEqTol = 1e-9;
constexpr double kStochTol = 1e-12;
constexpr double kZeroProb = 1e-12;
}  // namespace

Eigen::VectorXd PDPDecomposition::target_coords() const {
  if (states.empty()) throw std::logic_error("PDPDecomposition: empty");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(states.front().coords().size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    x += probs(static_cast<int>(i)) * states[i].coords();
  }
  return x;
}

void validate_pdp(const PDPDecomposition& decomp) {
  const int k = static_cast<int>(decomp.states.size());
  if (k == 0 || decomp.probs.size() != k) {
    throw std::invalid_argument("PDPDecomposition: probs/states size mismatch");
  }
  if (decomp.probs.minCoeff() <= kZeroProb) {
    throw std::invalid_argument("PDPDecomposition: probabilities must exceed 1e-12");
  }
  if (std::abs(decomp.probs.sum() - 1.0) > kStochTol) {
    throw std::invalid_argument("PDPDecomposition: probabilities must sum to 1");
  }
  const auto& space = decomp.states.front().space();
  for (const auto& s : decomp.states) {
    if (s.space() != space) {
      throw std::invalid_argument("PDPDecomposition: states from different spaces");
    }
    if (!is_pure(s)) {
      throw std::invalid_argument("PDPDecomposition: non-pure component state");
    }
  }
  if (static_cast<int>(decomp.witness.size()) != k) {
    throw std::invalid_argument("PDPDecomposition: witness size mismatch");
  }
  Eigen::VectorXd sum_a = Eigen::VectorXd::Zero(space->ambient_dim());
  double sum_c = 0.0;
  for (int i = 0; i < k; ++i) {
    const auto& e = decomp.witness[static_cast<std::size_t>(i)];
    sum_a += e.coeffs();
    sum_c += e.constant();
    for (int j = 0; j < k; ++j) {
      const double val = e(decomp.states[static_cast<std::size_t>(j)].coords());
      if (std::abs(val - (i == j ? 1.0 : 0.0)) > kEqTol) {
        throw std::invalid_argument("PDPDecomposition: witness is not delta-valued");
      }
    }
  }
  if ((sum_a - space->unit()).cwiseAbs().maxCoeff() > kStochTol ||
      std::abs(sum_c) > kStochTol) {
    throw std::invalid_argument("PDPDecomposition: witness does not sum to the unit");
  }
}

ConditionalKernel::ConditionalKernel(Eigen::MatrixXd p) : p_(std::move(p)) {
  if (p_.rows() == 0 || p_.cols() == 0) {
    throw std::invalid_argument("ConditionalKernel: empty matrix");
  }
  if (p_.minCoeff() < -kStochTol) {
    throw std::invalid_argument("ConditionalKernel: negative entry");
  }
  for (int k = 0; k < p_.cols(); ++k) {
    if (std::abs(p_.col(k).sum() - 1.0) > kStochTol) {
      throw std::invalid_argument("ConditionalKernel: column " + std::to_string(k) +
                                  " does not sum to 1");
    }
  }
  p_ = p_.cwiseMax(0.0);
}

ConditionalKernel ConditionalKernel::identity(int n) {
  return ConditionalKernel(Eigen::MatrixXd::Identity(n, n));
}

namespace {
std::vector<Eigen::MatrixXd> linearize_events(const StateSpace& space,
                                              const std::vector<AffineMap>& events) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(events.size());
  for (const auto& ev : events) {
    if (ev.linear.rows() != space.ambient_dim() || ev.linear.cols() != space.ambient_dim() ||
        ev.offset.size() != space.ambient_dim()) {
      throw std::invalid_argument("GenericInstrument: event dimension mismatch");
    }
    out.push_back(ev.linear + ev.offset * space.unit().transpose());
  }
  return out;
}
}  // namespace

GenericInstrument::GenericInstrument(SpacePtr space, const std::vector<AffineMap>& events)
    : GenericInstrument(space, linearize_events(*space, events)) {}

GenericInstrument::GenericInstrument(SpacePtr space,
                                     std::vector<Eigen::MatrixXd> linear_events)
    : space_(std::move(space)), events_(std::move(linear_events)) {
  if (events_.empty()) {
    throw std::invalid_argument("GenericInstrument: no events");
  }
  Eigen::VectorXd pulled = Eigen::VectorXd::Zero(space_->ambient_dim());
  for (const auto& m : events_) {
    if (m.rows() != space_->ambient_dim() || m.cols() != space_->ambient_dim()) {
      throw std::invalid_argument("GenericInstrument: event dimension mismatch");
    }
    pulled += m.transpose() * space_->unit();
  }
  if ((pulled - space_->unit()).cwiseAbs().maxCoeff() > kEqTol) {
    throw std::invalid_argument(
        "GenericInstrument: events do not preserve the unit functional");
  }
}

GenericInstrument GenericInstrument::identity(SpacePtr space) {
  const int d = space->ambient_dim();
  std::vector<Eigen::MatrixXd> events{Eigen::MatrixXd::Identity(d, d)};
  return GenericInstrument(std::move(space), std::move(events));
}

Effect GenericInstrument::outcome_effect(int j) const {
  if (j < 0 || j >= num_outcomes()) {
    throw std::invalid_argument("outcome_effect: index out of range");
  }
  return Effect(events_[static_cast<std::size_t>(j)].transpose() * space_->unit(), 0.0);
}

MPPInstrument::MPPInstrument(SpacePtr space, Measurement effects, std::vector<State> outputs)
    : space_(std::move(space)), effects_(std::move(effects)), outputs_(std::move(outputs)) {
  if (effects_.empty() || effects_.size() != outputs_.size()) {
    throw std::invalid_argument("MPPInstrument: effects/outputs size mismatch");
  }
  Eigen::VectorXd sum_a = Eigen::VectorXd::Zero(space_->ambient_dim());
  double sum_c = 0.0;
  for (const auto& e : effects_) {
    sum_a += e.coeffs();
    sum_c += e.constant();
  }
  if ((sum_a - space_->unit()).cwiseAbs().maxCoeff() > kStochTol ||
      std::abs(sum_c) > kStochTol) {
    throw std::invalid_argument("MPPInstrument: effects do not sum to the unit");
  }
  for (const auto& s : outputs_) {
    if (s.space() != space_) {
      throw std::invalid_argument("MPPInstrument: output from a different space");
    }
    if (!is_pure(s)) {
      throw std::invalid_argument("MPPInstrument: output state is not pure");
    }
  }
  if (space_->is_polytope()) {
    for (const auto& e : effects_) {
      if (!is_valid_effect(e, *space_)) {
        throw std::invalid_argument("MPPInstrument: invalid effect on the space");
      }
    }
  }
}

GenericInstrument MPPInstrument::to_generic() const {
  return measure_and_prepare(space_, effects_, outputs_);
}

GenericInstrument measure_and_prepare(SpacePtr space, const Measurement& effects,
                                      const std::vector<State>& outputs) {
  if (effects.size() != outputs.size() || effects.empty()) {
    throw std::invalid_argument("measure_and_prepare: effects/outputs size mismatch");
  }
  std::vector<Eigen::MatrixXd> events;
  events.reserve(effects.size());
  for (std::size_t j = 0; j < effects.size(); ++j) {
    const Eigen::VectorXd lin = effects[j].linearized(space->unit());
    events.push_back(outputs[j].coords() * lin.transpose());
  }
  return GenericInstrument(std::move(space), std::move(events));
}

SubState apply(const GenericInstrument& instr, int outcome, const State& rho) {
  if (outcome < 0 || outcome >= instr.num_outcomes()) {
    throw std::invalid_argument("apply: outcome index out of range");
  }
  if (rho.space() != instr.space()) {
    throw std::invalid_argument("apply: state from a different space");
  }
  SubState out;
  out.coords = instr.event(outcome) * rho.coords();
  out.weight = instr.space()->unit_value(out.coords);
  if (out.weight < -kEqTol || out.weight > 1.0 + kEqTol) {
    throw std::runtime_error("apply: outcome weight " + std::to_string(out.weight) +
                             " outside [0, 1]");
  }
  return out;
}

SubState apply(const MPPInstrument& instr, int outcome, const State& rho) {
  if (outcome < 0 || outcome >= instr.num_outcomes()) {
    throw std::invalid_argument("apply: outcome index out of range");
  }
  const double w = instr.effect(outcome)(rho.coords());
  return SubState{w * instr.output(outcome).coords(), w};
}

namespace {

RepeatabilityResult repeatable_impl(const GenericInstrument& instr,
                                    const std::vector<State>& probes, double tol) {
  if (probes.empty()) {
    throw std::invalid_argument("is_repeatable: empty probe set");
  }
  RepeatabilityResult res;
  res.repeatable = true;
  for (const auto& x : probes) {
    for (int j = 0; j < instr.num_outcomes(); ++j) {
      const Eigen::VectorXd once = instr.event(j) * x.coords();
      for (int jp = 0; jp < instr.num_outcomes(); ++jp) {
        const Eigen::VectorXd twice = instr.event(jp) * once;
        const Eigen::VectorXd want = (jp == j) ? once : Eigen::VectorXd::Zero(once.size());
        if ((twice - want).cwiseAbs().maxCoeff() > tol) {
          res.repeatable = false;
        }
      }
    }
  }
  Eigen::MatrixXd pts(static_cast<int>(probes.size()), instr.space()->ambient_dim());
  for (std::size_t i = 0; i < probes.size(); ++i) {
    pts.row(static_cast<int>(i)) = probes[i].coords().transpose();
  }
  res.probes_span = affine_rank(pts) >= instr.space()->affine_dim();
  return res;
}

}  // namespace

RepeatabilityResult is_repeatable(const GenericInstrument& instr,
                                  const std::vector<State>& probes, double tol) {
  return repeatable_impl(instr, probes, tol);
}

RepeatabilityResult is_repeatable(const MPPInstrument& instr,
                                  const std::vector<State>& probes, double tol) {
  return repeatable_impl(instr.to_generic(), probes, tol);
}

bool is_state_preserving(const GenericInstrument& instr, const State& rho, double tol) {
  Eigen::VectorXd total = Eigen::VectorXd::Zero(rho.coords().size());
  for (int j = 0; j < instr.num_outcomes(); ++j) {
    total += instr.event(j) * rho.coords();
  }
  return (total - rho.coords()).cwiseAbs().maxCoeff() <= tol;
}

bool is_state_preserving(const MPPInstrument& instr, const State& rho, double tol) {
  return is_state_preserving(instr.to_generic(), rho, tol);
}

GenericInstrument coarse_grain(const GenericInstrument& t, const ConditionalKernel& kernel) {
  if (kernel.cols() != t.num_outcomes()) {
    throw std::invalid_argument("coarse_grain: kernel columns do not match outcomes");
  }
  const int d = t.space()->ambient_dim();
  std::vector<Eigen::MatrixXd> events(static_cast<std::size_t>(kernel.rows()),
                                      Eigen::MatrixXd::Zero(d, d));
  for (int j = 0; j < kernel.rows(); ++j) {
    for (int k = 0; k < kernel.cols(); ++k) {
      const double w = kernel.p()(j, k);
      if (w != 0.0) events[static_cast<std::size_t>(j)] += w * t.event(k);
    }
  }
  return GenericInstrument(t.space(), std::move(events));
}

std::optional<ConditionalKernel> groenewold_majorizes(const GenericInstrument& t,
                                                      const GenericInstrument& s,
                                                      const State& rho) {
  if (t.space() != s.space() || rho.space() != t.space()) {
    throw std::invalid_argument("groenewold_majorizes: mismatched spaces");
  }
  const int J = s.num_outcomes();
  const int K = t.num_outcomes();
  const int d = t.space()->ambient_dim();

  std::vector<Eigen::VectorXd> t_out(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) t_out[static_cast<std::size_t>(k)] = t.event(k) * rho.coords();
  std::vector<Eigen::VectorXd> s_out(static_cast<std::size_t>(J));
  for (int j = 0; j < J; ++j) s_out[static_cast<std::size_t>(j)] = s.event(j) * rho.coords();

  lp::ProgramBuilder builder;
  const int base = builder.add_variables(J * K);
  const auto var = [&](int j, int k) { return base + j * K + k; };

  for (int k = 0; k < K; ++k) {
    lp::ProgramBuilder::Terms terms;
    for (int j = 0; j < J; ++j) terms.push_back({var(j, k), 1.0});
    builder.add_eq(std::move(terms), 1.0);
  }
  for (int j = 0; j < J; ++j) {
    for (int c = 0; c < d; ++c) {
      lp::ProgramBuilder::Terms terms;
      for (int k = 0; k < K; ++k) {
        terms.push_back({var(j, k), t_out[static_cast<std::size_t>(k)](c)});
      }
      builder.add_eq(std::move(terms), s_out[static_cast<std::size_t>(j)](c));
    }
  }

  const auto result = lp::solve(builder.build());
  if (result.status == lp::Status::Infeasible) return std::nullopt;
  if (!result.feasible()) {
    throw std::runtime_error("groenewold_majorizes: LP did not converge");
  }

  Eigen::MatrixXd p(J, K);
  for (int j = 0; j < J; ++j) {
    for (int k = 0; k < K; ++k) p(j, k) = std::max(0.0, result.x(var(j, k)));
  }
  for (int k = 0; k < K; ++k) p.col(k) /= p.col(k).sum();
  ConditionalKernel kernel(std::move(p));

  // Re-check the defining equations independently of the solver.
  for (int j = 0; j < J; ++j) {
    Eigen::VectorXd mix = Eigen::VectorXd::Zero(d);
    for (int k = 0; k < K; ++k) mix += kernel.p()(j, k) * t_out[static_cast<std::size_t>(k)];
    if ((mix - s_out[static_cast<std::size_t>(j)]).cwiseAbs().maxCoeff() > kEqTol) {
      throw std::runtime_error("groenewold_majorizes: solver returned an invalid kernel");
    }
  }
  return kernel;
}

Refinement refine_to_pure(const GenericInstrument& s, const State& rho) {
  const auto& space = s.space();
  if (rho.space() != space) {
    throw std::invalid_argument("refine_to_pure: state from a different space");
  }
  if (!space->is_polytope() && !space->model().spectral_pure_decomposition) {
    throw std::runtime_error("refine_to_pure: model '" + space->name() +
                             "' lacks a pure-decomposition oracle");
  }

  Measurement effects;
  std::vector<State> outputs;
  std::vector<std::pair<int, int>> labels;

  for (int j = 0; j < s.num_outcomes(); ++j) {
    const Effect ej = s.outcome_effect(j);
    const SubState out = apply(s, j, rho);
    if (out.weight <= kZeroProb) {
      effects.push_back(ej);
      outputs.push_back(default_pure_state(space));
      labels.push_back({j, 0});
      continue;
    }
    const State omega(out.normalized(), space);
    if (is_pure(omega)) {
      effects.push_back(ej);
      outputs.push_back(omega);
      labels.push_back({j, 0});
      continue;
    }
    if (space->is_polytope()) {
      const auto hull = decompose_onto_vertices(omega.coords(), *space);
      int branch = 0;
      for (const auto& [vertex, q] : hull) {
        effects.push_back(ej.scaled(q));
        outputs.push_back(space->vertex_state(vertex, space));
        labels.push_back({j, branch++});
      }
    } else {
      const auto eig = eig_herm(space->matrix_of(omega.coords()));
      std::vector<std::pair<HermMat, double>> parts;
      double total = 0.0;
      for (int i = 0; i < eig.eigenvalues.size(); ++i) {
        const double q = eig.eigenvalues(i);
        if (q > kZeroProb) {
          parts.emplace_back(HermMat::projector(eig.eigenvectors.col(i)), q);
          total += q;
        }
      }
      int branch = 0;
      for (const auto& [proj, q] : parts) {
        effects.push_back(ej.scaled(q / total));
        outputs.push_back(State(space->coords_of(proj), space));
        labels.push_back({j, branch++});
      }
    }
  }

  // Close the effect sum exactly on the unit functional: fold the rounding
  // residue into the largest branch of the last split outcome.
  Eigen::VectorXd sum_a = Eigen::VectorXd::Zero(space->ambient_dim());
  double sum_c = 0.0;
  for (const auto& e : effects) {
    sum_a += e.coeffs();
    sum_c += e.constant();
  }
  const Eigen::VectorXd res_a = space->unit() - sum_a;
  if (res_a.cwiseAbs().maxCoeff() > 0.0 || sum_c != 0.0) {
    Effect& last = effects.back();
    last = Effect(last.coeffs() + res_a, last.constant() - sum_c);
  }

  return Refinement{MPPInstrument(space, std::move(effects), std::move(outputs)),
                    std::move(labels)};
}

MPPInstrument make_separating_spm(const PDPDecomposition& decomp) {
  PDPDecomposition d = decomp;
  if (d.states.empty()) {
    throw std::invalid_argument("make_separating_spm: empty decomposition");
  }
  const auto& space = d.states.front().space();
  for (const auto& s : d.states) {
    if (!is_pure(s)) {
      throw std::invalid_argument("make_separating_spm: component state is not pure");
    }
  }
  if (d.witness.empty()) {
    if (d.states.size() == 1) {
      d.witness = {Effect(space->unit(), 0.0)};
    } else if (space->is_polytope()) {
      auto found = perfectly_distinguishable(d.states, *space);
      if (!found) {
        throw std::runtime_error("make_separating_spm: distinguishing measurement not found");
      }
      d.witness = std::move(*found);
    } else {
      throw std::runtime_error(
          "make_separating_spm: decomposition carries no witness measurement");
    }
  }
  validate_pdp(d);
  return MPPInstrument(space, d.witness, d.states);
}

bool validate_instrument(const GenericInstrument& instr, const std::vector<State>& probes,
                         double tol) {
  const auto& space = instr.space();
  std::vector<Eigen::VectorXd> points;
  if (space->is_polytope()) {
    for (int i = 0; i < space->vertex_count(); ++i) {
      points.push_back(space->vertices().row(i).transpose());
    }
  } else {
    if (probes.empty()) {
      throw std::invalid_argument(
          "validate_instrument: matrix models need explicit probe states");
    }
  }
  for (const auto& p : probes) points.push_back(p.coords());

  for (const auto& x : points) {
    for (int j = 0; j < instr.num_outcomes(); ++j) {
      const Eigen::VectorXd out = instr.event(j) * x;
      const double w = space->unit_value(out);
      if (w < -tol || w > 1.0 + tol) return false;
      if (w > kZeroProb) {
        const auto verdict = membership_verdict(out / w, *space);
        if (verdict == MembershipVerdict::NotMember) return false;
      }
    }
  }
  return true;
}

}  // namespace gpt
