#include <doctest.h>

#include <cmath>
#include <sstream>

#include "gpt/models.hpp"
#include "gpt/random_models.hpp"
#include "gpt/rng.hpp"
#include "gpt/thermo.hpp"

using namespace gpt;

namespace {

Eigen::VectorXd qubit_bloch_coords(const Eigen::Vector3d& b) {
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::VectorXd x(4);
  x << s, s * b.x(), s * b.y(), s * b.z();
  return x;
}

PDPDecomposition qubit_axis_decomposition(const SpacePtr& qubit, char axis) {
  const Eigen::Vector3d direction =
      axis == 'z' ? Eigen::Vector3d::UnitZ() : Eigen::Vector3d::UnitX();
  PDPDecomposition d;
  d.probs = Eigen::Vector2d(0.5, 0.5);
  d.states = {State(qubit_bloch_coords(direction), qubit),
              State(qubit_bloch_coords(-direction), qubit)};
  const HermMat plus = qubit->matrix_of(d.states[0].coords());
  const HermMat minus = qubit->matrix_of(d.states[1].coords());
  d.witness = {effect_from_operator(plus, *qubit), effect_from_operator(minus, *qubit)};
  return d;
}

constexpr double kHThird = 0.6365141682948128;  // H(1/3, 2/3) in nats

}  // namespace

TEST_SUITE("thermo") {

TEST_CASE("entropy of small distributions") {
  CHECK(shannon_entropy(Eigen::Vector2d(0.5, 0.5)) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(shannon_entropy(Eigen::Vector2d(1.0, 0.0)) == doctest::Approx(0.0));
  CHECK(shannon_entropy(Eigen::Vector2d(1.0 / 3.0, 2.0 / 3.0)) ==
        doctest::Approx(kHThird).epsilon(1e-12));
  CHECK_THROWS_AS(shannon_entropy(Eigen::Vector2d(1.2, -0.2)), std::invalid_argument);
  CHECK_THROWS_AS(shannon_entropy(Eigen::Vector2d(0.7, 0.7)), std::invalid_argument);
}

TEST_CASE("the square-bit center has exactly the two diagonal decompositions") {
  const auto space = make_square_bit();
  const State center(Eigen::Vector3d(0, 0, 1), space);
  const auto ds = enumerate_pdp_decompositions(center, *space, 2);
  REQUIRE(ds.decompositions.size() == 2);
  CHECK(ds.complete);
  for (const auto& d : ds.decompositions) {
    REQUIRE(d.probs.size() == 2);
    CHECK(d.probs(0) == doctest::Approx(0.5).epsilon(1e-9));
    validate_pdp(d);
    CHECK((d.target_coords() - center.coords()).cwiseAbs().maxCoeff() <= 1e-9);
  }
  // The two decompositions use disjoint vertex pairs (the two diagonals).
  const auto uses = [](const PDPDecomposition& d, const Eigen::Vector3d& v) {
    for (const auto& s : d.states) {
      if ((s.coords() - v).cwiseAbs().maxCoeff() <= 1e-9) return true;
    }
    return false;
  };
  const Eigen::Vector3d v00 = space->vertices().row(0).transpose();
  CHECK(uses(ds.decompositions[0], v00) != uses(ds.decompositions[1], v00));

  // Size-4 subsets are affinely dependent and get counted, not searched.
  const auto wide = enumerate_pdp_decompositions(center, *space, 4);
  CHECK(wide.decompositions.size() == 2);
  CHECK(wide.skipped_dependent > 0);
}

TEST_CASE("an edge midpoint decomposes only along its edge") {
  const auto space = make_square_bit();
  // Midpoint of the edge between vertices 0 = (1,1) and 1 = (1,-1).
  const State mid(Eigen::Vector3d(1, 0, 1), space);
  const auto ds = enumerate_pdp_decompositions(mid, *space);
  REQUIRE(ds.decompositions.size() == 1);
  CHECK(ds.decompositions[0].probs(0) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("classical states decompose uniquely over their support") {
  const auto space = make_classical(3);
  const State rho(Eigen::Vector3d(0.2, 0.3, 0.5), space);
  const auto ds = enumerate_pdp_decompositions(rho, *space);
  REQUIRE(ds.decompositions.size() == 1);
  Eigen::VectorXd sorted = ds.decompositions[0].probs;
  std::sort(sorted.data(), sorted.data() + sorted.size());
  CHECK(sorted(0) == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(sorted(1) == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(sorted(2) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("generic interior square-bit states have no decomposition") {
  const auto space = make_square_bit();
  const State rho(Eigen::Vector3d(0.3, 0.1, 1.0), space);
  const auto ds = enumerate_pdp_decompositions(rho, *space);
  CHECK(ds.decompositions.empty());
  CHECK(ds.complete);
  CHECK(check_entropy_uniqueness(ds).kind == UniquenessKind::Empty);
}

TEST_CASE("enumeration requires a vertex description") {
  const auto qubit = make_qubit();
  const State rho(qubit_bloch_coords(Eigen::Vector3d::Zero()), qubit);
  CHECK_THROWS_AS(enumerate_pdp_decompositions(rho, *qubit), std::invalid_argument);
}

TEST_CASE("spectral decomposition of density matrices") {
  const auto qubit = make_qubit();
  Eigen::Matrix2cd diag = Eigen::Matrix2cd::Zero();
  diag(0, 0) = 0.75;
  diag(1, 1) = 0.25;
  auto d = quantum_pdp(HermMat(diag), qubit);
  REQUIRE(d.probs.size() == 2);
  CHECK(d.probs(0) == doctest::Approx(0.75));
  CHECK(d.probs(1) == doctest::Approx(0.25));
  validate_pdp(d);

  d = quantum_pdp(HermMat::identity(2).scaled(0.5), qubit);
  CHECK(d.probs(0) == doctest::Approx(0.5));
  validate_pdp(d);

  Eigen::Matrix2cd pure = Eigen::Matrix2cd::Zero();
  pure(1, 1) = 1.0;
  d = quantum_pdp(HermMat(pure), qubit);
  REQUIRE(d.probs.size() == 1);
  CHECK(d.probs(0) == doctest::Approx(1.0));
  validate_pdp(d);
}

TEST_CASE("separation work is the decomposition entropy in kT units") {
  const auto space = make_classical(2);
  PDPDecomposition half;
  half.probs = Eigen::Vector2d(0.5, 0.5);
  half.states = {space->vertex_state(0, space), space->vertex_state(1, space)};
  half.witness = {Effect(Eigen::Vector2d(1, 0), 0.0), Effect(Eigen::Vector2d(0, 1), 0.0)};
  CHECK(separation_work(half, 1, 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  PDPDecomposition point;
  point.probs = Eigen::VectorXd::Ones(1);
  point.states = {space->vertex_state(0, space)};
  point.witness = {Effect(space->unit(), 0.0)};
  CHECK(separation_work(point, 7, 3.0) == doctest::Approx(0.0));

  PDPDecomposition third = half;
  third.probs = Eigen::Vector2d(1.0 / 3.0, 2.0 / 3.0);
  CHECK(separation_work(third, 100, 1.0) ==
        doctest::Approx(100.0 * kHThird).epsilon(1e-12));
}

TEST_CASE("orthogonal-basis cycles on the maximally mixed qubit balance exactly") {
  const auto qubit = make_qubit();
  const auto dz = qubit_axis_decomposition(qubit, 'z');
  const auto dx = qubit_axis_decomposition(qubit, 'x');
  const auto report = cycle_delta_work(dz, dx, 1, 1.0);
  CHECK(std::abs(report.delta_W) <= 1e-12);
  CHECK(report.W_separation == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(report.W_mixing == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(report.delta_W == report.W_mixing - report.W_separation);
}

TEST_CASE("cycles refuse decompositions of different states") {
  const auto space = make_classical(2);
  PDPDecomposition a, b;
  a.probs = Eigen::Vector2d(0.5, 0.5);
  a.states = {space->vertex_state(0, space), space->vertex_state(1, space)};
  a.witness = {Effect(Eigen::Vector2d(1, 0), 0.0), Effect(Eigen::Vector2d(0, 1), 0.0)};
  b = a;
  b.probs = Eigen::Vector2d(0.9, 0.1);
  CHECK_THROWS_AS(cycle_delta_work(a, b, 1, 1.0), std::invalid_argument);
}

TEST_CASE("uniqueness verdicts over decomposition sets") {
  const auto space = make_square_bit();
  const State center(Eigen::Vector3d(0, 0, 1), space);
  const auto ds = enumerate_pdp_decompositions(center, *space);
  const auto verdict = check_entropy_uniqueness(ds);
  REQUIRE(verdict.kind == UniquenessKind::Unique);
  CHECK(verdict.entropy() == doctest::Approx(std::log(2.0)).epsilon(1e-9));

  DecompositionSet empty{center, {}, true, 0};
  CHECK(check_entropy_uniqueness(empty).kind == UniquenessKind::Empty);
}

TEST_CASE("entropy oracles: classical, square bit, qubit") {
  const auto classical = make_classical(4);
  const auto oracle_c = make_entropy_oracle(classical);
  Eigen::Vector4d p(0.1, 0.2, 0.3, 0.4);
  CHECK(*oracle_c(State(p, classical)) == doctest::Approx(shannon_entropy(p)).epsilon(1e-12));

  const auto sq = make_square_bit();
  const auto oracle_sq = make_entropy_oracle(sq);
  CHECK(*oracle_sq(State(Eigen::Vector3d(0, 0, 1), sq)) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-9));
  CHECK_FALSE(oracle_sq(State(Eigen::Vector3d(0.3, 0.1, 1), sq)).has_value());
  CHECK(*oracle_sq(sq->vertex_state(0, sq)) == doctest::Approx(0.0));

  const auto qubit = make_qubit();
  const auto oracle_q = make_entropy_oracle(qubit);
  CHECK(*oracle_q(State(qubit_bloch_coords(Eigen::Vector3d::Zero()), qubit)) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(*oracle_q(State(qubit_bloch_coords(Eigen::Vector3d::UnitZ()), qubit)) ==
        doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("concavity: degenerate cases and random qubit mixtures") {
  const auto qubit = make_qubit();
  const auto oracle = make_entropy_oracle(qubit);
  const State up(qubit_bloch_coords(Eigen::Vector3d::UnitZ()), qubit);
  const State down(qubit_bloch_coords(-Eigen::Vector3d::UnitZ()), qubit);
  CHECK(concavity_check(up, up, 0.37, oracle));
  CHECK(concavity_check(up, down, 0.0, oracle));
  CHECK(concavity_check(up, down, 1.0, oracle));
  CHECK(concavity_check(up, down, 0.5, oracle));

  Rng rng(29);
  for (int t = 0; t < 200; ++t) {
    Rng trng = rng.fork(t);
    const State a = random_qubit_state(qubit, trng);
    const State b = random_qubit_state(qubit, trng);
    CHECK(concavity_check(a, b, trng.uniform(), oracle));
  }

  const auto sq = make_square_bit();
  const auto oracle_sq = make_entropy_oracle(sq);
  const State undefined(Eigen::Vector3d(0.3, 0.1, 1), sq);
  CHECK_THROWS_AS(concavity_check(undefined, undefined, 0.5, oracle_sq),
                  std::runtime_error);
}

TEST_CASE("information gain: pure preparations, identity, noisy indicator") {
  const auto space = make_classical(2);
  const auto oracle = make_entropy_oracle(space);
  const State rho(Eigen::Vector2d(0.5, 0.5), space);

  Measurement indicators{Effect(Eigen::Vector2d(1, 0), 0.0),
                         Effect(Eigen::Vector2d(0, 1), 0.0)};
  const auto spm = measure_and_prepare(
      space, indicators, {space->vertex_state(0, space), space->vertex_state(1, space)});
  CHECK(info_gain(rho, spm, oracle) == doctest::Approx(std::log(2.0)).epsilon(1e-9));

  CHECK(info_gain(rho, GenericInstrument::identity(space), oracle) ==
        doctest::Approx(0.0).epsilon(1e-12));

  // Posterior update with flip probability 0.1.
  std::vector<Eigen::MatrixXd> noisy(2, Eigen::MatrixXd::Zero(2, 2));
  noisy[0](0, 0) = 0.9;
  noisy[0](1, 1) = 0.1;
  noisy[1](0, 0) = 0.1;
  noisy[1](1, 1) = 0.9;
  const GenericInstrument channel(space, std::move(noisy));
  CHECK(info_gain(rho, channel, oracle) ==
        doctest::Approx(0.3680642071684971).epsilon(1e-9));
}

TEST_CASE("information gain refuses models without a defined entropy") {
  const auto sq = make_square_bit();
  const auto oracle = make_entropy_oracle(sq);
  const State undefined(Eigen::Vector3d(0.3, 0.1, 1), sq);
  CHECK_THROWS_AS(info_gain(undefined, GenericInstrument::identity(sq), oracle),
                  std::runtime_error);
}

TEST_CASE("monotonicity: coarse graining holds, equality at identity, refinement tops out") {
  const auto space = make_classical(3);
  const auto oracle = make_entropy_oracle(space);
  Rng rng(41);
  const auto t = random_classical_instrument(space, 3, rng);
  const State rho(Eigen::Vector3d(0.3, 0.4, 0.3), space);

  const auto s = coarse_grain(t, random_kernel(2, 3, rng));
  CHECK(monotonicity_check(rho, t, s, oracle) == MonotonicityVerdict::Holds);

  const auto s_id = coarse_grain(t, ConditionalKernel::identity(3));
  CHECK(std::abs(info_gain(rho, t, oracle) - info_gain(rho, s_id, oracle)) <= 1e-9);
  CHECK(monotonicity_check(rho, t, s_id, oracle) == MonotonicityVerdict::Holds);

  const auto refined = refine_to_pure(t, rho).instrument.to_generic();
  CHECK(monotonicity_check(rho, refined, t, oracle) == MonotonicityVerdict::Holds);
  CHECK(info_gain(rho, refined, oracle) ==
        doctest::Approx(*oracle(rho)).epsilon(1e-9));
}

TEST_CASE("incomparable instruments are reported as such") {
  const auto space = make_classical(2);
  const auto oracle = make_entropy_oracle(space);
  const State rho(Eigen::Vector2d(0.4, 0.6), space);
  const auto id = GenericInstrument::identity(space);
  Measurement indicators{Effect(Eigen::Vector2d(1, 0), 0.0),
                         Effect(Eigen::Vector2d(0, 1), 0.0)};
  const auto spm = measure_and_prepare(
      space, indicators, {space->vertex_state(0, space), space->vertex_state(1, space)});
  // The single-event identity cannot mix into two distinct preparations.
  CHECK(monotonicity_check(rho, id, spm, oracle) == MonotonicityVerdict::NotComparable);
}

TEST_CASE("work curves integrate to the ledger totals") {
  const auto space = make_classical(2);
  PDPDecomposition q, p;
  q.probs = Eigen::Vector2d(1.0 / 3.0, 2.0 / 3.0);
  q.states = {space->vertex_state(0, space), space->vertex_state(1, space)};
  q.witness = {Effect(Eigen::Vector2d(1, 0), 0.0), Effect(Eigen::Vector2d(0, 1), 0.0)};
  p = q;
  p.probs = Eigen::Vector2d(2.0 / 3.0, 1.0 / 3.0);

  std::ostringstream csv;
  write_work_curve_csv(csv, q, p, 2, 1.5, 1.0, 10);
  const std::string text = csv.str();
  CHECK(text.rfind("leg,chamber,progress,volume_fraction,cumulative_work\n", 0) == 0);

  // Sum the final cumulative work per leg and compare with the ledger.
  double sep_total = 0.0, mix_total = 0.0;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string leg, chamber, progress, volume, work;
    std::getline(fields, leg, ',');
    std::getline(fields, chamber, ',');
    std::getline(fields, progress, ',');
    std::getline(fields, volume, ',');
    std::getline(fields, work, ',');
    if (progress == "1") {
      if (leg == "separation") sep_total += std::stod(work);
      if (leg == "mixing") mix_total += std::stod(work);
    }
  }
  const auto report = cycle_delta_work(q, p, 2, 1.5);
  CHECK(sep_total == doctest::Approx(report.W_separation).epsilon(1e-9));
  CHECK(mix_total == doctest::Approx(report.W_mixing).epsilon(1e-9));
}

}  // TEST_SUITE
