#include <doctest.h>

#include <cmath>

#include "gpt/instrument.hpp"
#include "gpt/models.hpp"
#include "gpt/random_models.hpp"
#include "gpt/rng.hpp"

using namespace gpt;

namespace {

Measurement classical_indicators(const SpacePtr& space) {
  Measurement m;
  const int n = space->ambient_dim();
  for (int i = 0; i < n; ++i) {
    m.push_back(Effect(Eigen::MatrixXd::Identity(n, n).col(i), 0.0));
  }
  return m;
}

MPPInstrument classical_indicator_spm(const SpacePtr& space) {
  std::vector<State> outputs;
  for (int i = 0; i < space->vertex_count(); ++i) {
    outputs.push_back(space->vertex_state(i, space));
  }
  return MPPInstrument(space, classical_indicators(space), std::move(outputs));
}

Eigen::VectorXd qubit_bloch_coords(const Eigen::Vector3d& b) {
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::VectorXd x(4);
  x << s, s * b.x(), s * b.y(), s * b.z();
  return x;
}

}  // namespace

TEST_SUITE("instrument") {

TEST_CASE("the identity instrument acts trivially and is repeatable") {
  const auto space = make_classical(3);
  const auto id = GenericInstrument::identity(space);
  const State rho(Eigen::Vector3d(0.2, 0.3, 0.5), space);
  const SubState out = apply(id, 0, rho);
  CHECK(out.weight == doctest::Approx(1.0));
  CHECK((out.coords - rho.coords()).cwiseAbs().maxCoeff() <= 1e-15);

  std::vector<State> probes;
  for (int i = 0; i < 3; ++i) probes.push_back(space->vertex_state(i, space));
  const auto rep = is_repeatable(id, probes);
  CHECK(rep.repeatable);
  CHECK(rep.probes_span);
  CHECK(is_state_preserving(id, rho));
}

TEST_CASE("measure-and-prepare outputs carry the outcome probability") {
  const auto space = make_classical(2);
  const auto spm = classical_indicator_spm(space);
  const State rho(Eigen::Vector2d(0.3, 0.7), space);
  const SubState first = apply(spm, 0, rho);
  CHECK(first.weight == doctest::Approx(0.3));
  CHECK((first.normalized() - space->vertices().row(0).transpose()).cwiseAbs().maxCoeff() <=
        1e-12);
  CHECK(apply(spm, 1, rho).weight == doctest::Approx(0.7));
  CHECK_THROWS_AS(apply(spm, 2, rho), std::invalid_argument);
}

TEST_CASE("pure-output constraint is enforced for the MPP form only") {
  const auto space = make_classical(2);
  const Measurement m = classical_indicators(space);
  const State mixed(Eigen::Vector2d(0.5, 0.5), space);
  const State pure = space->vertex_state(0, space);
  CHECK_THROWS_AS(MPPInstrument(space, m, {pure, mixed}), std::invalid_argument);
  CHECK_NOTHROW(measure_and_prepare(space, m, {pure, mixed}));
}

TEST_CASE("events must preserve the unit functional") {
  const auto space = make_classical(2);
  std::vector<Eigen::MatrixXd> leaky{Eigen::MatrixXd::Identity(2, 2) * 0.5};
  CHECK_THROWS_AS(GenericInstrument(space, std::move(leaky)), std::invalid_argument);
}

TEST_CASE("repeatability holds for delta-valued preparations and fails otherwise") {
  const auto space = make_classical(2);
  const auto spm = classical_indicator_spm(space);
  std::vector<State> probes{space->vertex_state(0, space), space->vertex_state(1, space)};
  CHECK(is_repeatable(spm, probes).repeatable);

  // Noisy effects: e_1(sigma_1) = 0.9 < 1.
  Measurement noisy;
  Eigen::Vector2d a0(0.9, 0.1), a1(0.1, 0.9);
  noisy.push_back(Effect(a0, 0.0));
  noisy.push_back(Effect(a1, 0.0));
  const MPPInstrument bad(space, noisy,
                          {space->vertex_state(0, space), space->vertex_state(1, space)});
  CHECK_FALSE(is_repeatable(bad, probes).repeatable);

  const auto partial = is_repeatable(spm, {space->vertex_state(0, space)});
  CHECK_FALSE(partial.probes_span);
}

TEST_CASE("state preservation distinguishes fixed points from moved states") {
  const auto space = make_square_bit();
  // The diagonal pair separates the center.
  const std::vector<State> diag{space->vertex_state(0, space), space->vertex_state(3, space)};
  const auto witness = perfectly_distinguishable(diag, *space);
  REQUIRE(witness.has_value());
  const MPPInstrument spm(space, *witness, diag);
  const State center(Eigen::Vector3d(0, 0, 1), space);
  CHECK(is_state_preserving(spm, center));
  // On the diagonal the membrane acts as the identity; off it, it projects.
  const State on_diag(Eigen::Vector3d(0.5, 0.5, 1.0), space);
  CHECK(is_state_preserving(spm, on_diag));
  const State off(Eigen::Vector3d(0.5, -0.3, 1.0), space);
  CHECK_FALSE(is_state_preserving(spm, off));
}

TEST_CASE("coarse graining: identity, total channel, merged outcomes") {
  const auto space = make_classical(3);
  const auto t = classical_indicator_spm(space).to_generic();

  const auto same = coarse_grain(t, ConditionalKernel::identity(3));
  for (int j = 0; j < 3; ++j) {
    CHECK((same.event(j) - t.event(j)).cwiseAbs().maxCoeff() <= 1e-15);
  }

  const auto total = coarse_grain(t, ConditionalKernel(Eigen::MatrixXd::Ones(1, 3)));
  REQUIRE(total.num_outcomes() == 1);
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(3, 3);
  for (int k = 0; k < 3; ++k) sum += t.event(k);
  CHECK((total.event(0) - sum).cwiseAbs().maxCoeff() <= 1e-15);

  Eigen::MatrixXd merge(2, 3);
  merge << 1, 1, 0, 0, 0, 1;
  const auto merged = coarse_grain(t, ConditionalKernel(merge));
  REQUIRE(merged.num_outcomes() == 2);
  CHECK((merged.event(0) - (t.event(0) + t.event(1))).cwiseAbs().maxCoeff() <= 1e-15);

  Eigen::MatrixXd bad(2, 3);
  bad << 0.5, 1, 0, 0, 0.2, 1;
  CHECK_THROWS_AS(ConditionalKernel{bad}, std::invalid_argument);
}

TEST_CASE("coarse grainings are always majorized by their source") {
  const auto qubit = make_qubit();
  Rng rng(101);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    Rng trng = rng.fork(trial);
    SpacePtr space;
    std::optional<GenericInstrument> t;
    std::optional<State> rho;
    if (trial % 2 == 0) {
      space = make_classical(static_cast<int>(trng.uniform_int(2, 4)));
      t = random_classical_instrument(space, static_cast<int>(trng.uniform_int(2, 4)), trng);
      rho = random_simplex_state(space, trng);
    } else {
      space = qubit;
      t = random_qubit_mpp(space, static_cast<int>(trng.uniform_int(2, 3)), trng).to_generic();
      rho = random_qubit_state(space, trng, 0.9);
    }
    const int rows = static_cast<int>(trng.uniform_int(1, 3));
    const ConditionalKernel kernel = random_kernel(rows, t->num_outcomes(), trng);
    const auto s = coarse_grain(*t, kernel);
    const auto found = groenewold_majorizes(*t, s, *rho);
    REQUIRE(found.has_value());
    ++checked;
  }
  CHECK(checked == 1000);
}

TEST_CASE("the preorder is reflexive with an exactly feasible identity kernel") {
  const auto space = make_classical(3);
  Rng rng(7);
  const auto t = random_classical_instrument(space, 3, rng);
  const State rho = random_simplex_state(space, rng);
  const auto kernel = groenewold_majorizes(t, t, rho);
  REQUIRE(kernel.has_value());
  // The identity kernel itself satisfies the defining equations.
  for (int j = 0; j < 3; ++j) {
    Eigen::VectorXd mix = Eigen::VectorXd::Zero(3);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(3, 3);
    for (int k = 0; k < 3; ++k) mix += id(j, k) * (t.event(k) * rho.coords());
    CHECK((mix - t.event(j) * rho.coords()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("kernel composition witnesses transitivity") {
  const auto space = make_classical(4);
  Rng rng(19);
  for (int trial = 0; trial < 100; ++trial) {
    Rng trng = rng.fork(trial);
    const auto t = random_classical_instrument(space, 4, trng);
    const ConditionalKernel p = random_kernel(3, 4, trng);
    const ConditionalKernel q = random_kernel(2, 3, trng);
    const auto s = coarse_grain(t, p);
    const auto r = coarse_grain(s, q);
    const State rho = random_simplex_state(space, trng);

    // q . p is column-stochastic and witnesses t > r directly.
    const Eigen::MatrixXd composed = q.p() * p.p();
    const ConditionalKernel qp{Eigen::MatrixXd(composed)};
    for (int j = 0; j < 2; ++j) {
      Eigen::VectorXd mix = Eigen::VectorXd::Zero(4);
      for (int k = 0; k < 4; ++k) mix += qp.p()(j, k) * (t.event(k) * rho.coords());
      CHECK((mix - r.event(j) * rho.coords()).cwiseAbs().maxCoeff() <= 1e-10);
    }
    CHECK(groenewold_majorizes(t, r, rho).has_value());
  }
}

TEST_CASE("refinement leaves already-pure instruments unsplit") {
  const auto space = make_classical(3);
  const auto spm = classical_indicator_spm(space).to_generic();
  const State rho(Eigen::Vector3d(0.2, 0.3, 0.5), space);
  const auto refined = refine_to_pure(spm, rho);
  REQUIRE(refined.instrument.num_outcomes() == 3);
  for (int j = 0; j < 3; ++j) {
    CHECK(refined.labels[static_cast<std::size_t>(j)] == std::pair<int, int>{j, 0});
    const SubState before = apply(spm, j, rho);
    const SubState after = apply(refined.instrument, j, rho);
    CHECK((before.coords - after.coords).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("a uniform classical output splits into its two letters") {
  const auto space = make_classical(2);
  const Measurement effects = classical_indicators(space);
  Measurement halves;
  halves.push_back(Effect(effects[0].coeffs(), 0.0));
  halves.push_back(Effect(effects[1].coeffs(), 0.0));
  const State uniform(Eigen::Vector2d(0.5, 0.5), space);
  const State pure0 = space->vertex_state(0, space);
  // Outcome 1 prepares the first letter, outcome 2 the uniform mixture.
  const auto s = measure_and_prepare(space, halves, {pure0, uniform});
  const State rho(Eigen::Vector2d(0.4, 0.6), space);

  const auto refined = refine_to_pure(s, rho);
  REQUIRE(refined.instrument.num_outcomes() == 3);
  CHECK(refined.labels[0] == std::pair<int, int>{0, 0});
  CHECK(refined.labels[1] == std::pair<int, int>{1, 0});
  CHECK(refined.labels[2] == std::pair<int, int>{1, 1});
  const double e2 = 0.6;  // weight of outcome 2 at rho
  CHECK(apply(refined.instrument, 1, rho).weight == doctest::Approx(e2 / 2).epsilon(1e-9));
  CHECK(apply(refined.instrument, 2, rho).weight == doctest::Approx(e2 / 2).epsilon(1e-9));
}

TEST_CASE("a maximally mixed qubit output splits into orthogonal pure halves") {
  const auto qubit = make_qubit();
  const State mixed(qubit_bloch_coords(Eigen::Vector3d::Zero()), qubit);
  const State up(qubit_bloch_coords(Eigen::Vector3d::UnitZ()), qubit);
  Measurement m;
  Eigen::VectorXd half = 0.5 * qubit->unit();
  m.push_back(Effect(half, 0.0));
  m.push_back(Effect(half, 0.0));
  const auto s = measure_and_prepare(qubit, m, {up, mixed});
  const State rho(qubit_bloch_coords(0.2 * Eigen::Vector3d::UnitX()), qubit);

  const auto refined = refine_to_pure(s, rho);
  REQUIRE(refined.instrument.num_outcomes() == 3);
  const SubState b1 = apply(refined.instrument, 1, rho);
  const SubState b2 = apply(refined.instrument, 2, rho);
  CHECK(b1.weight == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(b2.weight == doctest::Approx(0.25).epsilon(1e-9));
  // The two branch outputs are orthogonal pure states.
  const HermMat m1 = qubit->matrix_of(b1.normalized());
  const HermMat m2 = qubit->matrix_of(b2.normalized());
  CHECK(std::abs(hs_inner(m1, m2)) <= 1e-9);
  CHECK(is_pure(State(b1.normalized(), qubit)));
}

TEST_CASE("zero-probability outcomes survive refinement unsplit") {
  const auto space = make_classical(2);
  Measurement m;
  m.push_back(Effect(Eigen::Vector2d(1, 1), 0.0));  // the unit
  m.push_back(Effect(Eigen::Vector2d(0, 0), 0.0));  // never fires
  const State uniform(Eigen::Vector2d(0.5, 0.5), space);
  const auto s = measure_and_prepare(space, m, {uniform, uniform});
  const State rho(Eigen::Vector2d(0.4, 0.6), space);
  const auto refined = refine_to_pure(s, rho);
  // Outcome 0 splits in two letters, outcome 1 stays as a placeholder.
  REQUIRE(refined.instrument.num_outcomes() == 3);
  CHECK(refined.labels[2] == std::pair<int, int>{1, 0});
  CHECK(apply(refined.instrument, 2, rho).weight <= 1e-12);
}

TEST_CASE("refining a mixed output ascends the preorder strictly") {
  const auto space = make_classical(3);
  Rng rng(67);
  const auto s = random_classical_instrument(space, 2, rng);
  Eigen::Vector3d interior(0.3, 0.4, 0.3);
  const State rho(interior, space);
  const auto refined = refine_to_pure(s, rho);
  const auto t = refined.instrument.to_generic();
  CHECK(groenewold_majorizes(t, s, rho).has_value());
  CHECK_FALSE(groenewold_majorizes(s, t, rho).has_value());
}

TEST_CASE("separating instruments from decompositions behave as membranes") {
  const auto space = make_classical(3);
  std::vector<State> vertices;
  for (int i = 0; i < 3; ++i) vertices.push_back(space->vertex_state(i, space));
  PDPDecomposition decomp;
  decomp.probs = Eigen::Vector3d(0.2, 0.3, 0.5);
  decomp.states = vertices;
  decomp.witness = classical_indicators(space);
  const auto spm = make_separating_spm(decomp);

  const State rho(Eigen::Vector3d(0.2, 0.3, 0.5), space);
  CHECK(is_state_preserving(spm, rho));
  // Classical indicator membranes preserve every state.
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    CHECK(is_state_preserving(spm, random_simplex_state(space, rng)));
  }
  std::vector<State> probes = vertices;
  probes.push_back(rho);
  CHECK(is_repeatable(spm, probes).repeatable);
}

TEST_CASE("the square-bit center is preserved by either diagonal membrane") {
  const auto space = make_square_bit();
  const State center(Eigen::Vector3d(0, 0, 1), space);
  for (const auto& pair : {std::pair<int, int>{0, 3}, std::pair<int, int>{1, 2}}) {
    PDPDecomposition d;
    d.probs = Eigen::Vector2d(0.5, 0.5);
    d.states = {space->vertex_state(pair.first, space),
                space->vertex_state(pair.second, space)};
    // No witness provided: it is found by the distinguishability LP.
    const auto spm = make_separating_spm(d);
    CHECK(is_state_preserving(spm, center));
    std::vector<State> probes = d.states;
    probes.push_back(center);
    CHECK(is_repeatable(spm, probes).repeatable);
  }
}

TEST_CASE("separating instruments require distinguishable pure states") {
  const auto space = make_square_bit();
  PDPDecomposition d;
  d.probs = Eigen::Vector3d(0.25, 0.25, 0.5);
  d.states = {space->vertex_state(0, space), space->vertex_state(1, space),
              space->vertex_state(2, space)};
  CHECK_THROWS_AS(make_separating_spm(d), std::runtime_error);

  PDPDecomposition mixed_component;
  mixed_component.probs = Eigen::Vector2d(0.5, 0.5);
  mixed_component.states = {space->vertex_state(0, space),
                            State(Eigen::Vector3d(0, 0, 1), space)};
  CHECK_THROWS_AS(make_separating_spm(mixed_component), std::invalid_argument);
}

TEST_CASE("instrument validation catches cone violations at vertices") {
  const auto space = make_classical(2);
  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    CHECK(validate_instrument(random_classical_instrument(space, 3, rng)));
  }
  std::vector<Eigen::MatrixXd> events(2);
  events[0].resize(2, 2);
  events[0] << 1.2, 0, 0, 0.5;
  events[1].resize(2, 2);
  events[1] << -0.2, 0, 0, 0.5;
  const GenericInstrument bad(space, std::move(events));
  CHECK_FALSE(validate_instrument(bad));
}

}  // TEST_SUITE
