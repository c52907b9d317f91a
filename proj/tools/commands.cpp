#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gpt/io.hpp"
#include "gpt/models.hpp"
#include "gpt/random_models.hpp"
#include "gpt/rng.hpp"

namespace gpt::cli {

using nlohmann::json;

bool Report::pass() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

namespace {

json report_json(const Report& r, bool with_runtime) {
  json checks = json::array();
  for (const auto& c : r.checks) {
    json jc{{"name", c.name},
            {"pass", c.pass},
            {"measured", c.measured},
            {"expected", c.expected},
            {"tolerance", c.tolerance}};
    if (!c.note.empty()) jc["note"] = c.note;
    checks.push_back(std::move(jc));
  }
  json j{{"command", r.command}, {"target", r.target},   {"seed", r.seed},
         {"trials", r.trials},   {"checks", std::move(checks)}, {"pass", r.pass()}};
  if (with_runtime) j["runtime_ms"] = r.runtime_ms;
  return j;
}

}  // namespace

std::string Report::to_json() const { return report_json(*this, true).dump(2); }
std::string Report::to_json_stable() const { return report_json(*this, false).dump(2); }

std::string Report::summary() const {
  std::ostringstream out;
  out << command << (target.empty() ? "" : " " + target) << ": "
      << (pass() ? "PASS" : "FAIL") << " (" << checks.size() << " checks, seed "
      << seed << ", " << runtime_ms << " ms)\n";
  for (const auto& c : checks) {
    out << "  [" << (c.pass ? "pass" : "FAIL") << "] " << c.name
        << ": measured " << c.measured << ", expected " << c.expected
        << " +- " << c.tolerance;
    if (!c.note.empty()) out << "  (" << c.note << ")";
    out << "\n";
  }
  return out.str();
}

namespace {

CheckResult check_near(std::string name, double measured, double expected, double tol,
                       std::string note = "") {
  CheckResult c;
  c.name = std::move(name);
  c.measured = measured;
  c.expected = expected;
  c.tolerance = tol;
  c.pass = std::abs(measured - expected) <= tol;
  c.note = std::move(note);
  return c;
}

CheckResult check_at_least(std::string name, double measured, double threshold,
                           std::string note = "") {
  CheckResult c;
  c.name = std::move(name);
  c.measured = measured;
  c.expected = threshold;
  c.tolerance = 0.0;
  c.pass = measured >= threshold;
  c.note = note.empty() ? "lower bound" : std::move(note);
  return c;
}

CheckResult check_true(std::string name, bool value, std::string note = "") {
  CheckResult c;
  c.name = std::move(name);
  c.measured = value ? 1.0 : 0.0;
  c.expected = 1.0;
  c.tolerance = 0.0;
  c.pass = value;
  c.note = std::move(note);
  return c;
}

double tol_or(const VerifyOptions& opts, double fallback) {
  return opts.tol > 0.0 ? opts.tol : fallback;
}

// ---------------------------------------------------------------------------
// verify appendix-b: the product-state theory is 1-symmetric but not
// 2-symmetric; overlap is an automorphism invariant.

Report verify_appendix_b(const VerifyOptions& opts) {
  Report report;
  report.trials = opts.trials > 0 ? opts.trials : 100000;
  const auto r2s = verify_not_2_symmetric(opts.seed, static_cast<int>(report.trials));

  report.checks.push_back(
      check_near("pair-overlap-rho", r2s.pair_inner_rho, 0.25, tol_or(opts, 1e-12)));
  report.checks.push_back(
      check_near("pair-overlap-sigma", r2s.pair_inner_sigma, 0.0, tol_or(opts, 1e-12)));
  report.checks.push_back(
      check_near("distinguishability-sum-rho", r2s.lemma_sum_rho, 1.0, tol_or(opts, 1e-12)));
  report.checks.push_back(check_near("distinguishability-sum-sigma", r2s.lemma_sum_sigma,
                                     0.0, tol_or(opts, 1e-12)));
  report.checks.push_back(check_true("rho-pair-distinguishable", r2s.rho_pair_distinguishable));
  report.checks.push_back(
      check_true("sigma-pair-distinguishable", r2s.sigma_pair_distinguishable));
  report.checks.push_back(check_near("automorphism-overlap-invariance",
                                     r2s.max_invariance_dev, 0.0, tol_or(opts, 1e-10),
                                     std::to_string(r2s.automorphism_samples) + " samples"));
  report.checks.push_back(check_true("one-symmetry-probe", r2s.one_symmetry_ok,
                                     "explicit local rotations"));
  report.checks.push_back(check_true(
      "not-two-symmetric",
      r2s.verdict == TwoSymmetryReport::Verdict::NotTwoSymmetric,
      "overlap gap " + std::to_string(r2s.gap)));
  return report;
}

// ---------------------------------------------------------------------------
// verify appendix-c: the extended two-qubit model with two inequivalent
// decompositions of one state.

Report verify_appendix_c(const VerifyOptions& opts) {
  Report report;
  report.trials = 0;

  const auto& fx = load_omega_bar();
  report.checks.push_back(check_true("fixture-loads", true));

  const double completeness =
      (fx.op_e1.mat() + fx.op_e2.mat() - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff();
  report.checks.push_back(check_near("measurement-completeness", completeness, 0.0, 0.0));

  double delta_dev = 0.0;
  const HermMat* rhos[2] = {&fx.rho1, &fx.rho2};
  const HermMat* ops[2] = {&fx.op_e1, &fx.op_e2};
  for (int j = 0; j < 2; ++j) {
    for (int i = 0; i < 2; ++i) {
      delta_dev = std::max(delta_dev, std::abs(hs_inner(*ops[j], *rhos[i]) -
                                               (i == j ? 1.0 : 0.0)));
    }
  }
  report.checks.push_back(
      check_near("discrimination-deltas", delta_dev, 0.0, tol_or(opts, 1e-12)));

  const double combo_dev =
      (fx.rho_mix.mat() - (fx.sigma1.scaled(fx.decomp_p.probs(0))
                               .plus(fx.sigma2, fx.decomp_p.probs(1))
                               .mat()))
          .cwiseAbs()
          .maxCoeff();
  report.checks.push_back(
      check_near("decompositions-coincide", combo_dev, 0.0, tol_or(opts, 1e-12)));

  report.checks.push_back(check_near("sigma-orthogonality",
                                     std::abs(hs_inner(fx.sigma1, fx.sigma2)), 0.0,
                                     tol_or(opts, 1e-12)));

  double min_top = 1.0;
  for (const HermMat* s : {&fx.rho1, &fx.rho2, &fx.sigma1, &fx.sigma2}) {
    min_top = std::min(min_top, eig_herm(*s).eigenvalues(0));
  }
  report.checks.push_back(
      check_near("components-pure", min_top, 1.0, tol_or(opts, 1e-9)));

  const double max_min_eig = std::max(eig_herm(fx.op_e1).eigenvalues.minCoeff(),
                                      eig_herm(fx.op_e2).eigenvalues.minCoeff());
  CheckResult neg;
  neg.name = "effects-have-negative-eigenvalue";
  neg.measured = max_min_eig;
  neg.expected = 0.0;
  neg.tolerance = 0.0;
  neg.pass = max_min_eig < -1e-9;
  neg.note = "must be strictly negative";
  report.checks.push_back(neg);

  // Entropies of the two distributions against direct recomputation from the
  // defining probabilities.
  const double s3 = std::sqrt(3.0);
  Eigen::VectorXd q_ref(2), p_ref(2);
  q_ref << 1.0 / 3.0, 2.0 / 3.0;
  p_ref << (3.0 + s3) / 6.0, (3.0 - s3) / 6.0;
  const double h_q = shannon_entropy(fx.decomp_q.probs);
  const double h_p = shannon_entropy(fx.decomp_p.probs);
  report.checks.push_back(
      check_near("entropy-q", h_q, shannon_entropy(q_ref), tol_or(opts, 1e-6)));
  report.checks.push_back(
      check_near("entropy-p", h_p, shannon_entropy(p_ref), tol_or(opts, 1e-6)));

  DecompositionSet ds{fx.mix_state(), {fx.decomp_q, fx.decomp_p}, false, 0};
  const auto verdict = check_entropy_uniqueness(ds);
  report.checks.push_back(check_true("entropy-non-unique",
                                     verdict.kind == UniquenessKind::NonUnique,
                                     "two distinct spectral entropies"));

  // Measurement validity over the model: nonnegative on all product states
  // and on the two added pure points.
  const double min_e1 = min_over_product_states(fx.op_e1, opts.seed);
  const double min_e2 = min_over_product_states(fx.op_e2, opts.seed);
  report.checks.push_back(check_at_least("product-min-e1", min_e1, -1e-6));
  report.checks.push_back(check_at_least("product-min-e2", min_e2, -1e-6));
  double min_sigma_value = 1.0;
  for (const HermMat* op : {&fx.op_e1, &fx.op_e2}) {
    for (const HermMat* s : {&fx.sigma1, &fx.sigma2}) {
      min_sigma_value = std::min(min_sigma_value, hs_inner(*op, *s));
    }
  }
  report.checks.push_back(check_at_least("effects-nonnegative-on-sigmas",
                                         min_sigma_value, -1e-9));

  report.checks.push_back(check_true(
      "mixture-membership",
      membership_verdict(fx.mix_state().coords(), *fx.space) == MembershipVerdict::Member,
      "column-generation certificate"));

  // Operational content: both decompositions induce separating instruments.
  const auto spm_q = make_separating_spm(fx.decomp_q);
  const auto spm_p = make_separating_spm(fx.decomp_p);
  const std::vector<State> probes_q{fx.decomp_q.states[0], fx.decomp_q.states[1],
                                    fx.mix_state()};
  const std::vector<State> probes_p{fx.decomp_p.states[0], fx.decomp_p.states[1],
                                    fx.mix_state()};
  report.checks.push_back(check_true(
      "spm-q-repeatable", is_repeatable(spm_q, probes_q).repeatable, "on probes"));
  report.checks.push_back(check_true(
      "spm-p-repeatable", is_repeatable(spm_p, probes_p).repeatable, "on probes"));
  report.checks.push_back(
      check_true("spm-q-preserves-mixture", is_state_preserving(spm_q, fx.mix_state())));
  report.checks.push_back(
      check_true("spm-p-preserves-mixture", is_state_preserving(spm_p, fx.mix_state())));
  return report;
}

// ---------------------------------------------------------------------------
// verify lemma1: refining mixed outputs to pure ones strictly ascends the
// instrument preorder.

struct TrialSpaces {
  std::vector<SpacePtr> classical;  // n = 2..6
  SpacePtr qubit;
  SpacePtr square_bit;

  TrialSpaces() : qubit(make_qubit()), square_bit(make_square_bit()) {
    for (int n = 2; n <= 6; ++n) classical.push_back(make_classical(n));
  }
};

const TrialSpaces& trial_spaces() {
  static const TrialSpaces spaces;
  return spaces;
}

State lemma1_classical_state(const SpacePtr& space, Rng& rng) {
  // Keep the state safely interior so outputs can be mixed.
  const int n = space->ambient_dim();
  Eigen::VectorXd p = random_simplex_state(space, rng).coords();
  p = 0.9 * p + Eigen::VectorXd::Constant(n, 0.1 / n);
  return State(p, space);
}

double classical_mixedness(const Eigen::VectorXd& omega) { return 1.0 - omega.maxCoeff(); }

Report verify_lemma1(const VerifyOptions& opts) {
  Report report;
  report.trials = opts.trials > 0 ? opts.trials : 200;
  const auto& spaces = trial_spaces();

  const bool only_classical = opts.model.rfind("classical", 0) == 0;
  const bool only_qubit = opts.model == "qubit";

  Rng rng(opts.seed);
  long forward_failures = 0, reverse_failures = 0, generated = 0;
  for (long trial = 0; trial < report.trials; ++trial) {
    Rng trng = rng.fork(static_cast<std::uint64_t>(trial));
    const bool use_qubit = only_qubit || (!only_classical && trial % 2 == 1);

    SpacePtr space;
    std::optional<State> rho;
    std::optional<GenericInstrument> s;
    if (use_qubit) {
      space = spaces.qubit;
      rho = random_qubit_state(space, trng, 0.8);
      for (int attempt = 0; attempt < 60 && !s; ++attempt) {
        auto candidate = random_qubit_measure_prepare_mixed(
            space, static_cast<int>(trng.uniform_int(2, 3)), trng, 0.7);
        double min_weight = 1.0;
        for (int j = 0; j < candidate.num_outcomes(); ++j) {
          min_weight = std::min(min_weight, apply(candidate, j, *rho).weight);
        }
        if (min_weight >= 0.05) s = std::move(candidate);
      }
    } else {
      space = spaces.classical[static_cast<std::size_t>(trial % 4)];  // n = 2..5
      rho = lemma1_classical_state(space, trng);
      for (int attempt = 0; attempt < 60 && !s; ++attempt) {
        auto candidate = random_classical_instrument(
            space, static_cast<int>(trng.uniform_int(2, 4)), trng);
        double min_weight = 1.0, best_mix = 0.0;
        for (int j = 0; j < candidate.num_outcomes(); ++j) {
          const SubState out = apply(candidate, j, *rho);
          min_weight = std::min(min_weight, out.weight);
          if (out.weight > 1e-12) {
            best_mix = std::max(best_mix, classical_mixedness(out.normalized()));
          }
        }
        if (min_weight >= 0.05 && best_mix >= 0.05) s = std::move(candidate);
      }
    }
    if (!s) continue;  // generation failed; does not count as a trial result
    ++generated;

    const Refinement refined = refine_to_pure(*s, *rho);
    const GenericInstrument t = refined.instrument.to_generic();
    if (!groenewold_majorizes(t, *s, *rho)) ++forward_failures;
    if (groenewold_majorizes(*s, t, *rho)) ++reverse_failures;
  }

  report.checks.push_back(check_near("trials-generated", static_cast<double>(generated),
                                     static_cast<double>(report.trials), 0.0));
  report.checks.push_back(check_near("refinement-majorizes-original",
                                     static_cast<double>(forward_failures), 0.0, 0.0,
                                     "failure count"));
  report.checks.push_back(check_near("original-never-majorizes-refinement",
                                     static_cast<double>(reverse_failures), 0.0, 0.0,
                                     "failure count"));
  return report;
}

// ---------------------------------------------------------------------------
// verify theorem1: wherever decompositions exist in the stock models, their
// entropies agree.

Report verify_theorem1(const VerifyOptions& opts) {
  Report report;
  report.trials = opts.trials > 0 ? opts.trials : 1000;
  const auto& spaces = trial_spaces();

  Rng rng(opts.seed);
  long nonunique = 0, empty_count = 0, unique_count = 0;
  for (long trial = 0; trial < report.trials; ++trial) {
    Rng trng = rng.fork(static_cast<std::uint64_t>(trial));
    const int kind = static_cast<int>(trial % 3);
    if (kind == 0) {
      const State rho = random_square_bit_segment_state(spaces.square_bit, trng);
      const auto ds = enumerate_pdp_decompositions(rho, *spaces.square_bit);
      const auto verdict = check_entropy_uniqueness(ds);
      if (verdict.kind == UniquenessKind::NonUnique) ++nonunique;
      if (verdict.kind == UniquenessKind::Empty) ++empty_count;
      if (verdict.kind == UniquenessKind::Unique) ++unique_count;
    } else if (kind == 1) {
      const auto& space = spaces.classical[static_cast<std::size_t>(trial % 5)];
      const State rho = random_simplex_state(space, trng);
      const auto ds = enumerate_pdp_decompositions(rho, *space);
      const auto verdict = check_entropy_uniqueness(ds);
      if (verdict.kind == UniquenessKind::NonUnique) ++nonunique;
      if (verdict.kind == UniquenessKind::Empty) ++empty_count;
      if (verdict.kind == UniquenessKind::Unique) ++unique_count;
    } else {
      const State rho = random_qubit_state(spaces.qubit, trng);
      const auto decomp = quantum_pdp(spaces.qubit->matrix_of(rho.coords()), spaces.qubit);
      DecompositionSet ds{rho, {decomp}, false, 0};
      const auto verdict = check_entropy_uniqueness(ds);
      if (verdict.kind != UniquenessKind::Unique) ++nonunique;
      ++unique_count;
    }
  }

  report.checks.push_back(check_near("nonunique-verdicts", static_cast<double>(nonunique),
                                     0.0, 0.0, "count over all trials"));
  report.checks.push_back(check_true("some-states-decomposed", unique_count > 0,
                                     std::to_string(empty_count) + " empty verdicts"));

  // The central mixture of the square bit: exactly two decompositions, both
  // at maximal entropy.
  Eigen::VectorXd center(3);
  center << 0, 0, 1;
  const State center_state(center, spaces.square_bit);
  const auto ds = enumerate_pdp_decompositions(center_state, *spaces.square_bit);
  report.checks.push_back(check_near("square-bit-center-count",
                                     static_cast<double>(ds.decompositions.size()), 2.0,
                                     0.0));
  double entropy_dev = 0.0;
  for (const auto& d : ds.decompositions) {
    entropy_dev = std::max(entropy_dev, std::abs(shannon_entropy(d.probs) - std::log(2.0)));
  }
  report.checks.push_back(check_near("square-bit-center-entropy-dev", entropy_dev, 0.0,
                                     tol_or(opts, 1e-9)));
  return report;
}

// ---------------------------------------------------------------------------
// verify theorem2: spectral entropy is concave on the qubit.

Report verify_theorem2(const VerifyOptions& opts) {
  Report report;
  report.trials = opts.trials > 0 ? opts.trials : 1000;
  const auto& spaces = trial_spaces();
  const EntropyOracle oracle = make_entropy_oracle(spaces.qubit);

  Rng rng(opts.seed);
  double worst_slack = std::numeric_limits<double>::infinity();
  long violations = 0;
  for (long trial = 0; trial < report.trials; ++trial) {
    Rng trng = rng.fork(static_cast<std::uint64_t>(trial));
    const State rho1 = random_qubit_state(spaces.qubit, trng);
    const State rho2 = random_qubit_state(spaces.qubit, trng);
    const double p = trng.uniform();
    const State mix(p * rho1.coords() + (1.0 - p) * rho2.coords(), spaces.qubit);
    const double slack =
        *oracle(mix) - (p * *oracle(rho1) + (1.0 - p) * *oracle(rho2));
    worst_slack = std::min(worst_slack, slack);
    if (!concavity_check(rho1, rho2, p, oracle, tol_or(opts, 1e-9))) ++violations;
  }
  report.checks.push_back(check_near("concavity-violations", static_cast<double>(violations),
                                     0.0, 0.0, "count over all trials"));
  report.checks.push_back(check_at_least("worst-concavity-slack", worst_slack,
                                         -tol_or(opts, 1e-9)));
  return report;
}

// ---------------------------------------------------------------------------
// verify theorem3: information gain is monotone under the instrument
// preorder; coarse-graining can only lose it.

Report verify_theorem3(const VerifyOptions& opts) {
  Report report;
  report.trials = opts.trials > 0 ? opts.trials : 1000;
  const auto& spaces = trial_spaces();
  const bool only_classical = opts.model.rfind("classical", 0) == 0;
  const bool only_qubit = opts.model == "qubit";
  SpacePtr fixed_model;
  if (only_classical) fixed_model = parse_model(opts.model);

  const EntropyOracle qubit_oracle = make_entropy_oracle(spaces.qubit);

  Rng rng(opts.seed);
  long violations = 0, not_comparable = 0;
  double max_identity_dev = 0.0;
  for (long trial = 0; trial < report.trials; ++trial) {
    Rng trng = rng.fork(static_cast<std::uint64_t>(trial));
    const bool use_qubit = only_qubit || (!only_classical && trial % 2 == 1);

    SpacePtr space;
    std::optional<GenericInstrument> t;
    std::optional<State> rho;
    EntropyOracle oracle;
    if (use_qubit) {
      space = spaces.qubit;
      t = random_qubit_mpp(space, static_cast<int>(trng.uniform_int(2, 4)), trng)
              .to_generic();
      rho = random_qubit_state(space, trng, 0.9);
      oracle = qubit_oracle;
    } else {
      space = fixed_model ? fixed_model
                          : spaces.classical[static_cast<std::size_t>(trial % 5)];
      t = random_classical_instrument(space, static_cast<int>(trng.uniform_int(2, 4)), trng);
      rho = lemma1_classical_state(space, trng);
      oracle = make_entropy_oracle(space);
    }

    const int rows = static_cast<int>(trng.uniform_int(1, 4));
    const ConditionalKernel kernel = random_kernel(rows, t->num_outcomes(), trng);
    const GenericInstrument s = coarse_grain(*t, kernel);
    const auto verdict = monotonicity_check(*rho, *t, s, oracle, tol_or(opts, 1e-9));
    if (verdict == MonotonicityVerdict::Violated) ++violations;
    if (verdict == MonotonicityVerdict::NotComparable) ++not_comparable;

    const GenericInstrument s_id =
        coarse_grain(*t, ConditionalKernel::identity(t->num_outcomes()));
    max_identity_dev = std::max(max_identity_dev,
                                std::abs(info_gain(*rho, *t, oracle) -
                                         info_gain(*rho, s_id, oracle)));
  }

  report.checks.push_back(check_near("monotonicity-violations",
                                     static_cast<double>(violations), 0.0, 0.0,
                                     "count over all trials"));
  report.checks.push_back(check_near("incomparable-pairs",
                                     static_cast<double>(not_comparable), 0.0, 0.0,
                                     "coarse-grainings are always comparable"));
  report.checks.push_back(check_near("identity-kernel-gain-deviation", max_identity_dev,
                                     0.0, tol_or(opts, 1e-9)));
  return report;
}

}  // namespace

Report run_verify(const std::string& target, const VerifyOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  Report report;
  if (target == "appendix-b") {
    report = verify_appendix_b(opts);
  } else if (target == "appendix-c") {
    report = verify_appendix_c(opts);
  } else if (target == "lemma1") {
    report = verify_lemma1(opts);
  } else if (target == "theorem1") {
    report = verify_theorem1(opts);
  } else if (target == "theorem2") {
    report = verify_theorem2(opts);
  } else if (target == "theorem3") {
    report = verify_theorem3(opts);
  } else {
    throw std::invalid_argument("unknown verify target '" + target + "'");
  }
  report.command = "verify";
  report.target = target;
  report.seed = opts.seed;
  report.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  return report;
}

// ---------------------------------------------------------------------------
// cycle

State parse_state(const SpacePtr& space, const std::string& spec) {
  if (spec.empty() || spec == "default") {
    if (space->name() == "qubit") return parse_state(space, "mixed");
    if (space->name() == "omega-bar") return parse_state(space, "mix");
    if (space->is_polytope()) return parse_state(space, "center");
    throw std::invalid_argument("no default state for model '" + space->name() + "'");
  }
  if (spec == "mixed" && !space->is_polytope()) {
    const int d = space->model().basis.matrix_dim();
    return State(space->coords_of(HermMat::identity(d).scaled(1.0 / d)), space);
  }
  if (spec == "mix" && space->name() == "omega-bar") {
    return load_omega_bar().mix_state();
  }
  if (spec == "center" && space->is_polytope()) {
    return State(space->vertices().colwise().mean().transpose(), space);
  }
  if (spec.rfind("vertex:", 0) == 0 && space->is_polytope()) {
    const int idx = std::stoi(spec.substr(7));
    if (idx < 0 || idx >= space->vertex_count()) {
      throw std::invalid_argument("vertex index out of range");
    }
    return space->vertex_state(idx, space);
  }
  if (spec.rfind("bloch:", 0) == 0) {
    if (space->name() != "qubit") {
      throw std::invalid_argument("bloch: states require the qubit model");
    }
    std::istringstream in(spec.substr(6));
    Eigen::Vector3d b;
    char comma;
    if (!(in >> b.x() >> comma >> b.y() >> comma >> b.z())) {
      throw std::invalid_argument("bad bloch spec '" + spec + "'");
    }
    if (b.norm() > 1.0 + 1e-9) {
      throw std::invalid_argument("bloch vector outside the unit ball");
    }
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity() * 0.5;
    const Eigen::Matrix2cd sx = (Eigen::Matrix2cd() << 0, 1, 1, 0).finished();
    const Eigen::Matrix2cd sy =
        (Eigen::Matrix2cd() << std::complex<double>(0, 0), std::complex<double>(0, -1),
         std::complex<double>(0, 1), std::complex<double>(0, 0))
            .finished();
    const Eigen::Matrix2cd sz = (Eigen::Matrix2cd() << 1, 0, 0, -1).finished();
    m += 0.5 * (b.x() * sx + b.y() * sy + b.z() * sz);
    return State(space->coords_of(HermMat(m)), space);
  }
  // Comma-separated ambient coordinates; numbers may be rationals.
  std::vector<double> values;
  std::stringstream in(spec);
  std::string item;
  while (std::getline(in, item, ',')) values.push_back(io::parse_number_text(item));
  if (static_cast<int>(values.size()) != space->ambient_dim()) {
    throw std::invalid_argument("state spec has " + std::to_string(values.size()) +
                                " coordinates, expected " +
                                std::to_string(space->ambient_dim()));
  }
  Eigen::VectorXd coords =
      Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<int>(values.size()));
  return State(std::move(coords), space);
}

namespace {

PDPDecomposition qubit_basis_decomposition(const SpacePtr& space, const State& rho,
                                           char axis) {
  const HermMat m = space->matrix_of(rho.coords());
  Eigen::Vector3d direction;
  switch (axis) {
    case 'z': direction = {0, 0, 1}; break;
    case 'x': direction = {1, 0, 0}; break;
    case 'y': direction = {0, 1, 0}; break;
    default: throw std::invalid_argument("unknown qubit basis axis");
  }
  const Eigen::Matrix2cd sx = (Eigen::Matrix2cd() << 0, 1, 1, 0).finished();
  const Eigen::Matrix2cd sy =
      (Eigen::Matrix2cd() << std::complex<double>(0, 0), std::complex<double>(0, -1),
       std::complex<double>(0, 1), std::complex<double>(0, 0))
          .finished();
  const Eigen::Matrix2cd sz = (Eigen::Matrix2cd() << 1, 0, 0, -1).finished();
  const Eigen::Matrix2cd n_sigma =
      direction.x() * sx + direction.y() * sy + direction.z() * sz;
  const HermMat plus(0.5 * (Eigen::Matrix2cd::Identity() + n_sigma));
  const HermMat minus(0.5 * (Eigen::Matrix2cd::Identity() - n_sigma));

  const double p_plus = hs_inner_raw(m.mat(), plus.mat());
  PDPDecomposition d;
  if (p_plus > 1e-12 && p_plus < 1.0 - 1e-12) {
    d.probs = Eigen::Vector2d(p_plus, 1.0 - p_plus);
    d.states = {State(space->coords_of(plus), space), State(space->coords_of(minus), space)};
    d.witness = {effect_from_operator(plus, *space), effect_from_operator(minus, *space)};
  } else {
    const HermMat& support = p_plus >= 0.5 ? plus : minus;
    d.probs = Eigen::VectorXd::Ones(1);
    d.states = {State(space->coords_of(support), space)};
    d.witness = {Effect(space->unit(), 0.0)};
  }
  return d;
}

PDPDecomposition build_decomposition(const SpacePtr& space, const State& rho,
                                     const std::string& spec, bool q_side) {
  if (space->name() == "omega-bar") {
    const auto& fx = load_omega_bar();
    if (spec == "auto") return q_side ? fx.decomp_q : fx.decomp_p;
    if (spec == "q") return fx.decomp_q;
    if (spec == "p") return fx.decomp_p;
    throw std::invalid_argument("omega-bar decompositions are 'q' or 'p'");
  }
  if (space->name() == "qubit") {
    if (spec == "auto") return quantum_pdp(space->matrix_of(rho.coords()), space);
    if (spec.size() == 1 && (spec[0] == 'x' || spec[0] == 'y' || spec[0] == 'z')) {
      return qubit_basis_decomposition(space, rho, spec[0]);
    }
    throw std::invalid_argument("qubit decompositions are 'auto', 'x', 'y' or 'z'");
  }
  if (space->is_polytope()) {
    const auto ds = enumerate_pdp_decompositions(rho, *space);
    if (ds.decompositions.empty()) {
      throw std::invalid_argument("state admits no decomposition in this model");
    }
    if (spec == "auto") return ds.decompositions.front();
    if (spec.rfind("index:", 0) == 0) {
      const int idx = std::stoi(spec.substr(6));
      if (idx < 0 || idx >= static_cast<int>(ds.decompositions.size())) {
        throw std::invalid_argument("decomposition index out of range (found " +
                                    std::to_string(ds.decompositions.size()) + ")");
      }
      return ds.decompositions[static_cast<std::size_t>(idx)];
    }
    throw std::invalid_argument("polytope decompositions are 'auto' or 'index:k'");
  }
  throw std::invalid_argument("no decomposition rule for model '" + space->name() + "'");
}

}  // namespace

CycleOutput run_cycle(const CycleOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  const SpacePtr space = parse_model(opts.model);
  const State rho = parse_state(space, opts.state);
  const PDPDecomposition decomp_q = build_decomposition(space, rho, opts.decomp_q, true);
  const PDPDecomposition decomp_p = build_decomposition(space, rho, opts.decomp_p, false);

  CycleOutput out;
  out.report = cycle_delta_work(decomp_q, decomp_p, opts.N, opts.kT);
  out.report_json = io::cycle_report_to_json(out.report);

  std::ostringstream csv;
  write_work_curve_csv(csv, decomp_q, decomp_p, opts.N, opts.kT, 1.0, opts.csv_steps);
  out.csv = csv.str();

  out.checks.command = "cycle";
  out.checks.target = opts.model;
  const double closure_dev =
      (decomp_q.target_coords() - decomp_p.target_coords()).cwiseAbs().maxCoeff();
  out.checks.checks.push_back(check_near("cycle-closure", closure_dev, 0.0, 1e-9));
  const double state_dev = (decomp_q.target_coords() - rho.coords()).cwiseAbs().maxCoeff();
  out.checks.checks.push_back(check_near("decomposition-targets-state", state_dev, 0.0, 1e-9));
  out.checks.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::steady_clock::now() - start)
                              .count();
  return out;
}

// ---------------------------------------------------------------------------
// majorize

namespace {
std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}
}  // namespace

MajorizeOutput run_majorize(const MajorizeOptions& opts) {
  const SpacePtr space = parse_model(opts.model);
  const State rho = parse_state(space, opts.state);
  const GenericInstrument t = io::instrument_from_json(read_file(opts.t_file), space);
  const GenericInstrument s = io::instrument_from_json(read_file(opts.s_file), space);

  MajorizeOutput out;
  const auto kernel = groenewold_majorizes(t, s, rho);
  out.feasible = kernel.has_value();
  if (kernel) out.kernel = kernel->p();

  const EntropyOracle oracle = make_entropy_oracle(space);
  try {
    out.info_gain_t = info_gain(rho, t, oracle);
    out.info_gain_s = info_gain(rho, s, oracle);
    out.have_info_gain = true;
  } catch (const std::runtime_error&) {
    out.have_info_gain = false;  // entropy oracle unavailable for the model
  }

  json j;
  j["command"] = "majorize";
  j["model"] = opts.model;
  j["feasible"] = out.feasible;
  if (out.feasible) {
    json rows = json::array();
    for (int r = 0; r < out.kernel.rows(); ++r) {
      json row = json::array();
      for (int c = 0; c < out.kernel.cols(); ++c) row.push_back(out.kernel(r, c));
      rows.push_back(std::move(row));
    }
    j["kernel"] = std::move(rows);
  }
  if (out.have_info_gain) {
    j["info_gain_t"] = out.info_gain_t;
    j["info_gain_s"] = out.info_gain_s;
  } else {
    j["info_gain"] = nullptr;
  }
  out.report_json = j.dump(2);
  return out;
}

// ---------------------------------------------------------------------------
// command line

int cli_main(int argc, char** argv) {
  CLI::App app{"Convex-operational model toolkit: distinguishability, instrument "
               "preorders, spectral entropy, and membrane-cycle work ledgers"};
  app.require_subcommand(1);

  std::string target, model, state, decomp_q = "auto", decomp_p = "auto";
  std::string t_file, s_file, json_out, csv_out;
  std::uint64_t seed = 1;
  long trials = 0, particles = 1;
  double tol = 0.0, kt = 1.0;

  auto* verify = app.add_subcommand(
      "verify", "Run a named verification suite and report per-check results");
  verify->add_option("target", target,
                     "appendix-b | appendix-c | lemma1 | theorem1 | theorem2 | theorem3")
      ->required();
  verify->add_option("--trials", trials, "Number of randomized trials (target default)");
  verify->add_option("--seed", seed, "Random seed recorded in the report");
  verify->add_option("--model", model, "Model override where the suite supports it");
  verify->add_option("--tol", tol, "Tolerance override for the suite's checks");
  verify->add_option("--json-out", json_out, "Also write the JSON report to a file");

  auto* cycle = app.add_subcommand(
      "cycle", "Work ledger of a separation/mixing membrane cycle");
  cycle->add_option("--model", model, "classical:n | qubit | square-bit | omega-bar")
      ->required();
  cycle->add_option("--state", state, "State spec (model default when omitted)");
  cycle->add_option("--decomp-q", decomp_q, "Separation decomposition spec");
  cycle->add_option("--decomp-p", decomp_p, "Mixing decomposition spec");
  cycle->add_option("--N", particles, "Particle count");
  cycle->add_option("--kT", kt, "Temperature in natural units (k_B = 1)");
  cycle->add_option("--json-out", json_out, "Also write the JSON report to a file");
  cycle->add_option("--csv-out", csv_out, "Write the isothermal work curves as CSV");

  auto* majorize = app.add_subcommand(
      "majorize", "Decide whether instrument t majorizes instrument s at a state");
  majorize->add_option("--model", model, "Model name")->required();
  majorize->add_option("--state", state, "State spec");
  majorize->add_option("--t", t_file, "Instrument JSON file (majorizing candidate)")
      ->required();
  majorize->add_option("--s", s_file, "Instrument JSON file (majorized candidate)")
      ->required();
  majorize->add_option("--json-out", json_out, "Also write the JSON report to a file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      std::cout << app.help();
      return 0;
    }
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  const auto emit = [&](const std::string& json_text, const std::string& summary) {
    std::cout << json_text << "\n";
    std::cerr << summary;
    if (!json_out.empty()) {
      std::ofstream out(json_out);
      out << json_text << "\n";
    }
  };

  try {
    if (verify->parsed()) {
      VerifyOptions opts;
      opts.seed = seed;
      opts.trials = trials;
      opts.model = model;
      opts.tol = tol;
      const Report report = run_verify(target, opts);
      emit(report.to_json(), report.summary());
      return report.pass() ? 0 : 1;
    }
    if (cycle->parsed()) {
      CycleOptions opts;
      opts.model = model;
      opts.state = state;
      opts.decomp_q = decomp_q;
      opts.decomp_p = decomp_p;
      opts.N = particles;
      opts.kT = kt;
      const CycleOutput out = run_cycle(opts);
      if (!csv_out.empty()) {
        std::ofstream csv(csv_out);
        csv << out.csv;
      }
      std::ostringstream summary;
      summary << "cycle " << model << ": W_separation = " << out.report.W_separation
              << ", W_mixing = " << out.report.W_mixing
              << ", delta_W = " << out.report.delta_W << " (N = " << out.report.N
              << ", kT = " << out.report.T << ")\n";
      emit(out.report_json, summary.str());
      return out.checks.pass() ? 0 : 1;
    }
    if (majorize->parsed()) {
      MajorizeOptions opts;
      opts.model = model;
      opts.state = state;
      opts.t_file = t_file;
      opts.s_file = s_file;
      const MajorizeOutput out = run_majorize(opts);
      std::ostringstream summary;
      summary << "majorize: " << (out.feasible ? "Feasible" : "Infeasible");
      if (out.have_info_gain) {
        summary << ", info gain t = " << out.info_gain_t << ", s = " << out.info_gain_s;
      }
      summary << "\n";
      emit(out.report_json, summary.str());
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace gpt::cli
