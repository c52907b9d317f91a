#include "gpt/random_models.hpp"

#include <cmath>
#include <stdexcept>

namespace gpt {

namespace {
Eigen::VectorXd dirichlet(int n, Rng& rng) {
  // Flat Dirichlet via normalized exponentials.
  Eigen::VectorXd p(n);
  for (int i = 0; i < n; ++i) p(i) = -std::log(1.0 - rng.uniform());
  return p / p.sum();
}

Eigen::VectorXd qubit_coords(const SpacePtr& qubit, const Eigen::Vector3d& bloch) {
  // Against the orthonormal basis {I, X, Y, Z}/sqrt(2).
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::VectorXd x(4);
  x << s, s * bloch.x(), s * bloch.y(), s * bloch.z();
  (void)qubit;
  return x;
}
}  // namespace

State random_simplex_state(const SpacePtr& classical, Rng& rng) {
  return State(dirichlet(classical->ambient_dim(), rng), classical);
}

State random_square_bit_segment_state(const SpacePtr& square_bit, Rng& rng) {
  // Vertex pairs spanning the four edges and two diagonals.
  static const int segments[6][2] = {{0, 1}, {0, 2}, {1, 3}, {2, 3}, {0, 3}, {1, 2}};
  const auto& seg = segments[rng.uniform_int(0, 5)];
  const double t = rng.uniform(0.05, 0.95);
  const Eigen::VectorXd x = t * square_bit->vertices().row(seg[0]).transpose() +
                            (1.0 - t) * square_bit->vertices().row(seg[1]).transpose();
  return State(x, square_bit);
}

State random_qubit_state(const SpacePtr& qubit, Rng& rng, double max_radius) {
  const Eigen::Vector3d bloch = rng.uniform(0.0, max_radius) * rng.unit3();
  return State(qubit_coords(qubit, bloch), qubit);
}

ConditionalKernel random_kernel(int rows, int cols, Rng& rng) {
  Eigen::MatrixXd p(rows, cols);
  for (int k = 0; k < cols; ++k) p.col(k) = dirichlet(rows, rng);
  return ConditionalKernel(std::move(p));
}

GenericInstrument random_classical_instrument(const SpacePtr& classical, int outcomes,
                                              Rng& rng) {
  const int n = classical->ambient_dim();
  std::vector<Eigen::MatrixXd> events(static_cast<std::size_t>(outcomes),
                                      Eigen::MatrixXd::Zero(n, n));
  // Column l of the stacked events is a distribution over (outcome, letter).
  for (int l = 0; l < n; ++l) {
    const Eigen::VectorXd col = dirichlet(outcomes * n, rng);
    for (int j = 0; j < outcomes; ++j) {
      for (int k = 0; k < n; ++k) {
        events[static_cast<std::size_t>(j)](k, l) = col(j * n + k);
      }
    }
  }
  return GenericInstrument(classical, std::move(events));
}

namespace {
Measurement random_qubit_povm(const SpacePtr& qubit, int outcomes, Rng& rng) {
  // E_k = S^{-1/2} G_k S^{-1/2} with G_k random Hermitian squares.
  std::vector<Eigen::Matrix2cd> g(static_cast<std::size_t>(outcomes));
  Eigen::Matrix2cd total = Eigen::Matrix2cd::Zero();
  for (auto& gk : g) {
    Eigen::Matrix2cd a;
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        a(r, c) = std::complex<double>(rng.normal(), rng.normal());
      }
    }
    gk = a * a.adjoint();
    total += gk;
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(total);
  const Eigen::Matrix2cd inv_sqrt = es.operatorInverseSqrt();
  Measurement povm;
  Eigen::VectorXd sum_coeffs = Eigen::VectorXd::Zero(4);
  for (int k = 0; k < outcomes; ++k) {
    const HermMat op(inv_sqrt * g[static_cast<std::size_t>(k)] * inv_sqrt);
    Effect e = effect_from_operator(op, *qubit);
    if (k + 1 == outcomes) {
      e = Effect(qubit->unit() - sum_coeffs, 0.0);  // close exactly
    } else {
      sum_coeffs += e.coeffs();
    }
    povm.push_back(std::move(e));
  }
  return povm;
}
}  // namespace

MPPInstrument random_qubit_mpp(const SpacePtr& qubit, int outcomes, Rng& rng) {
  Measurement povm = random_qubit_povm(qubit, outcomes, rng);
  std::vector<State> outputs;
  for (int k = 0; k < outcomes; ++k) {
    outputs.push_back(State(qubit_coords(qubit, rng.unit3()), qubit));
  }
  return MPPInstrument(qubit, std::move(povm), std::move(outputs));
}

GenericInstrument random_qubit_measure_prepare_mixed(const SpacePtr& qubit, int outcomes,
                                                     Rng& rng, double max_purity_radius) {
  Measurement povm = random_qubit_povm(qubit, outcomes, rng);
  std::vector<State> outputs;
  for (int k = 0; k < outcomes; ++k) {
    const Eigen::Vector3d bloch =
        rng.uniform(0.0, max_purity_radius) * rng.unit3();
    outputs.push_back(State(qubit_coords(qubit, bloch), qubit));
  }
  return measure_and_prepare(qubit, povm, outputs);
}

}  // namespace gpt
