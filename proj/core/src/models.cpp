#include "gpt/models.hpp"

#include <cmath>
#include <stdexcept>

#include "gpt/lp.hpp"
#include "gpt/thermo.hpp"

namespace gpt {

namespace {

constexpr double kEqTol = 1e-9;

const Eigen::Matrix2cd kPauliI = Eigen::Matrix2cd::Identity();
const Eigen::Matrix2cd kPauliX = (Eigen::Matrix2cd() << 0, 1, 1, 0).finished();
const Eigen::Matrix2cd kPauliY =
    (Eigen::Matrix2cd() << std::complex<double>(0, 0), std::complex<double>(0, -1),
     std::complex<double>(0, 1), std::complex<double>(0, 0))
        .finished();
const Eigen::Matrix2cd kPauliZ = (Eigen::Matrix2cd() << 1, 0, 0, -1).finished();
const Eigen::Matrix2cd kPauli[4] = {kPauliI, kPauliX, kPauliY, kPauliZ};

Eigen::Matrix2cd bloch_matrix(const Eigen::Vector3d& b) {
  return 0.5 * (kPauliI + b.x() * kPauliX + b.y() * kPauliY + b.z() * kPauliZ);
}

Eigen::Matrix4cd kron2(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Eigen::Matrix4cd out;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    }
  }
  return out;
}

/// Unitary rotating Bloch vector `from` onto `to`.
Eigen::Matrix2cd rotation_unitary(const Eigen::Vector3d& from, const Eigen::Vector3d& to) {
  const double dot = std::clamp(from.dot(to), -1.0, 1.0);
  Eigen::Vector3d axis = from.cross(to);
  const double axis_norm = axis.norm();
  if (axis_norm < 1e-12) {
    if (dot > 0.0) return Eigen::Matrix2cd::Identity();
    // Antiparallel: rotate by pi around any axis orthogonal to `from`.
    axis = from.unitOrthogonal();
  } else {
    axis /= axis_norm;
  }
  const double angle = std::acos(dot);
  const Eigen::Matrix2cd n_sigma =
      axis.x() * kPauliX + axis.y() * kPauliY + axis.z() * kPauliZ;
  return std::cos(angle / 2.0) * kPauliI -
         std::complex<double>(0, 1) * std::sin(angle / 2.0) * n_sigma;
}

Eigen::Matrix2cd random_unitary2(Rng& rng) {
  const Eigen::Vector3d axis = rng.unit3();
  const double angle = rng.uniform(0.0, 2.0 * M_PI);
  const Eigen::Matrix2cd n_sigma =
      axis.x() * kPauliX + axis.y() * kPauliY + axis.z() * kPauliZ;
  return std::cos(angle / 2.0) * kPauliI -
         std::complex<double>(0, 1) * std::sin(angle / 2.0) * n_sigma;
}

/// Pauli-product coefficients of a two-qubit Hermitian operator:
/// C(mu, nu) = Tr{E (sigma_mu x sigma_nu)} / 4, so that
/// Tr{E (rhoA x rhoB)} = a^T C b with a = (1, bloch_a), b = (1, bloch_b).
Eigen::Matrix4d pauli_coefficients(const HermMat& op) {
  Eigen::Matrix4d c;
  for (int mu = 0; mu < 4; ++mu) {
    for (int nu = 0; nu < 4; ++nu) {
      c(mu, nu) = hs_inner_raw(op.mat(), kron2(kPauli[mu], kPauli[nu])) / 4.0;
    }
  }
  return c;
}

Eigen::Vector4d homog(const Eigen::Vector3d& bloch) {
  return {1.0, bloch.x(), bloch.y(), bloch.z()};
}

struct SeesawResult {
  double value;
  Eigen::Vector3d bloch_a, bloch_b;
};

/// Alternating exact single-side optimization of a^T C b over Bloch vectors.
/// sign = -1 minimizes, +1 maximizes.
SeesawResult seesaw(const Eigen::Matrix4d& c, Eigen::Vector3d a, Eigen::Vector3d b,
                    double sign) {
  double value = homog(a).dot(c * homog(b));
  for (int iter = 0; iter < 300; ++iter) {
    const Eigen::Vector4d w = c * homog(b);
    const double wn = w.tail<3>().norm();
    if (wn > 1e-15) a = sign * w.tail<3>() / wn;
    const Eigen::Vector4d v = c.transpose() * homog(a);
    const double vn = v.tail<3>().norm();
    if (vn > 1e-15) b = sign * v.tail<3>() / vn;
    const double next = homog(a).dot(c * homog(b));
    if (std::abs(next - value) < 1e-13) {
      value = next;
      break;
    }
    value = next;
  }
  return {value, a, b};
}

Eigen::Vector3d grid_bloch(int i_theta, int i_phi, int grid) {
  const double theta = M_PI * (i_theta + 0.5) / grid;
  const double phi = 2.0 * M_PI * i_phi / grid;
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
          std::cos(theta)};
}

}  // namespace

SpacePtr make_classical(int n) {
  if (n < 2) throw std::invalid_argument("make_classical: need n >= 2");
  return StateSpace::polytope("classical:" + std::to_string(n),
                              Eigen::MatrixXd::Identity(n, n), Eigen::VectorXd::Ones(n));
}

SpacePtr make_square_bit() {
  Eigen::MatrixXd v(4, 3);
  v << 1, 1, 1, 1, -1, 1, -1, 1, 1, -1, -1, 1;
  Eigen::VectorXd unit(3);
  unit << 0, 0, 1;
  return StateSpace::polytope("square-bit", v, unit);
}

SpacePtr make_qubit() {
  MatrixModel model{.name = "qubit",
                    .hilbert_dims = {2},
                    .basis = HermitianBasis(2)};
  model.generator_params = 2;
  model.spectral_pure_decomposition = true;

  const HermitianBasis basis = model.basis;  // captured by value below
  model.pure_generator = [](std::span<const double> params) {
    const double theta = params[0], phi = params[1];
    const Eigen::Vector3d b{std::sin(theta) * std::cos(phi),
                            std::sin(theta) * std::sin(phi), std::cos(theta)};
    return HermMat(bloch_matrix(b));
  };
  model.membership = [basis](const Eigen::VectorXd& coords) {
    const auto eig = eig_herm(basis.matrix(coords));
    return eig.eigenvalues.minCoeff() >= -kEqTol ? MembershipVerdict::Member
                                                 : MembershipVerdict::NotMember;
  };
  model.effect_valid = [basis](const Effect& e) {
    HermMat op = basis.matrix(e.coeffs());
    if (e.constant() != 0.0) op = op.plus(HermMat::identity(2), e.constant());
    const auto eig = eig_herm(op);
    return eig.eigenvalues.minCoeff() >= -kEqTol && eig.eigenvalues.maxCoeff() <= 1.0 + kEqTol;
  };
  model.entropy = [basis](const Eigen::VectorXd& coords) -> std::optional<double> {
    const auto eig = eig_herm(basis.matrix(coords));
    return shannon_entropy(eig.eigenvalues.cwiseMax(0.0));
  };
  return StateSpace::matrix_model(std::move(model));
}

ProductPureState ProductPureState::from_bloch(const Eigen::Vector3d& a,
                                              const Eigen::Vector3d& b) {
  if (std::abs(a.norm() - 1.0) > kEqTol || std::abs(b.norm() - 1.0) > kEqTol) {
    throw std::invalid_argument("ProductPureState: Bloch vectors must be unit length");
  }
  return {a, b, HermMat(kron2(bloch_matrix(a), bloch_matrix(b)))};
}

ProductPureState ProductPureState::random(Rng& rng) {
  return from_bloch(rng.unit3(), rng.unit3());
}

bool sep_distinguishable(const ProductPureState& p, const ProductPureState& q) {
  const double sum = 0.5 * (1.0 + p.bloch_a.dot(q.bloch_a)) +
                     0.5 * (1.0 + p.bloch_b.dot(q.bloch_b));
  return sum <= 1.0 + 1e-12;
}

SepAutomorphism SepAutomorphism::random(Rng& rng) {
  SepAutomorphism f;
  f.unitary_a = random_unitary2(rng);
  f.unitary_b = random_unitary2(rng);
  f.transpose_a = rng.uniform() < 0.5;
  f.transpose_b = rng.uniform() < 0.5;
  f.swap_factors = rng.uniform() < 0.5;
  return f;
}

SepAutomorphism SepAutomorphism::rotation_between(const ProductPureState& p,
                                                  const ProductPureState& q) {
  SepAutomorphism f;
  f.unitary_a = rotation_unitary(p.bloch_a, q.bloch_a);
  f.unitary_b = rotation_unitary(p.bloch_b, q.bloch_b);
  return f;
}

HermMat apply_sep_automorphism(const SepAutomorphism& f, const HermMat& rho) {
  if (rho.dim() != 4) {
    throw std::invalid_argument("apply_sep_automorphism: two-qubit matrices only");
  }
  Eigen::Matrix4cd m = rho.mat();
  if (f.transpose_a) {
    Eigen::Matrix4cd t;
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < 2; ++k)
        for (int j = 0; j < 2; ++j)
          for (int l = 0; l < 2; ++l) t(2 * i + k, 2 * j + l) = m(2 * j + k, 2 * i + l);
    m = t;
  }
  if (f.transpose_b) {
    Eigen::Matrix4cd t;
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < 2; ++k)
        for (int j = 0; j < 2; ++j)
          for (int l = 0; l < 2; ++l) t(2 * i + k, 2 * j + l) = m(2 * i + l, 2 * j + k);
    m = t;
  }
  const Eigen::Matrix4cd u = kron2(f.unitary_a, f.unitary_b);
  m = u * m * u.adjoint();
  if (f.swap_factors) {
    Eigen::Matrix4cd s = Eigen::Matrix4cd::Zero();
    s(0, 0) = s(3, 3) = 1.0;
    s(1, 2) = s(2, 1) = 1.0;
    m = s * m * s;
  }
  return HermMat(std::move(m));
}

TwoSymmetryReport verify_not_2_symmetric(const ProductPureState& rho1,
                                         const ProductPureState& rho2,
                                         const ProductPureState& sigma1,
                                         const ProductPureState& sigma2,
                                         std::uint64_t seed, int automorphism_samples) {
  TwoSymmetryReport report;
  report.pair_inner_rho = hs_inner(rho1.matrix, rho2.matrix);
  report.pair_inner_sigma = hs_inner(sigma1.matrix, sigma2.matrix);
  report.lemma_sum_rho = 0.5 * (1.0 + rho1.bloch_a.dot(rho2.bloch_a)) +
                         0.5 * (1.0 + rho1.bloch_b.dot(rho2.bloch_b));
  report.lemma_sum_sigma = 0.5 * (1.0 + sigma1.bloch_a.dot(sigma2.bloch_a)) +
                           0.5 * (1.0 + sigma1.bloch_b.dot(sigma2.bloch_b));
  report.rho_pair_distinguishable = sep_distinguishable(rho1, rho2);
  report.sigma_pair_distinguishable = sep_distinguishable(sigma1, sigma2);
  report.automorphism_samples = automorphism_samples;

  Rng rng(seed);
  for (int i = 0; i < automorphism_samples; ++i) {
    Rng trial = rng.fork(static_cast<std::uint64_t>(i));
    const SepAutomorphism f = SepAutomorphism::random(trial);
    const ProductPureState p = ProductPureState::random(trial);
    const ProductPureState q = ProductPureState::random(trial);
    const double before = hs_inner(p.matrix, q.matrix);
    const double after =
        hs_inner(apply_sep_automorphism(f, p.matrix), apply_sep_automorphism(f, q.matrix));
    report.max_invariance_dev = std::max(report.max_invariance_dev, std::abs(after - before));
  }

  report.one_symmetry_ok = true;
  const int probes = std::min(automorphism_samples, 50);
  for (int i = 0; i < probes; ++i) {
    Rng trial = rng.fork(1000003ULL + static_cast<std::uint64_t>(i));
    const ProductPureState p = ProductPureState::random(trial);
    const ProductPureState q = ProductPureState::random(trial);
    const SepAutomorphism f = SepAutomorphism::rotation_between(p, q);
    const HermMat image = apply_sep_automorphism(f, p.matrix);
    if ((image.mat() - q.matrix.mat()).cwiseAbs().maxCoeff() > kEqTol) {
      report.one_symmetry_ok = false;
    }
  }

  report.gap = std::abs(report.pair_inner_rho - report.pair_inner_sigma);
  const bool separated = report.rho_pair_distinguishable &&
                         report.sigma_pair_distinguishable && report.gap > kEqTol;
  report.verdict = separated ? TwoSymmetryReport::Verdict::NotTwoSymmetric
                             : TwoSymmetryReport::Verdict::Inconclusive;
  return report;
}

TwoSymmetryReport verify_not_2_symmetric(std::uint64_t seed, int automorphism_samples) {
  const Eigen::Vector3d plus_z{0, 0, 1}, minus_z{0, 0, -1}, plus_x{1, 0, 0};
  return verify_not_2_symmetric(ProductPureState::from_bloch(plus_z, plus_z),
                                ProductPureState::from_bloch(plus_x, plus_x),
                                ProductPureState::from_bloch(plus_z, plus_z),
                                ProductPureState::from_bloch(minus_z, minus_z), seed,
                                automorphism_samples);
}

double min_over_product_states(const HermMat& op, std::uint64_t seed, int restarts,
                               int grid) {
  if (op.dim() != 4) {
    throw std::invalid_argument("min_over_product_states: two-qubit operators only");
  }
  const Eigen::Matrix4d c = pauli_coefficients(op);

  // Deterministic Bloch-angle grid over both factors.
  double best_grid = std::numeric_limits<double>::infinity();
  Eigen::Vector3d best_a = Eigen::Vector3d::UnitZ(), best_b = Eigen::Vector3d::UnitZ();
  for (int bt = 0; bt < grid; ++bt) {
    for (int bp = 0; bp < grid; ++bp) {
      const Eigen::Vector3d b = grid_bloch(bt, bp, grid);
      const Eigen::Vector4d w = c * homog(b);
      for (int at = 0; at < grid; ++at) {
        for (int ap = 0; ap < grid; ++ap) {
          const Eigen::Vector3d a = grid_bloch(at, ap, grid);
          const double value = homog(a).dot(w);
          if (value < best_grid) {
            best_grid = value;
            best_a = a;
            best_b = b;
          }
        }
      }
    }
  }

  double best = seesaw(c, best_a, best_b, -1.0).value;
  Rng rng(seed);
  for (int r = 0; r < restarts; ++r) {
    Rng trial = rng.fork(static_cast<std::uint64_t>(r));
    const double value = seesaw(c, trial.unit3(), trial.unit3(), -1.0).value;
    best = std::min(best, value);
  }
  return std::min(best, best_grid);
}

namespace {

/// Shared machinery of the sep22 / extended-model membership oracle:
/// LP over a growing pool of pure columns, minimizing the sup-norm residual;
/// new columns come from see-saw maximization of the residual functional.
MembershipVerdict hull_membership(const HermitianBasis& basis,
                                  const std::vector<HermMat>& extras,
                                  const Eigen::VectorXd& target, std::uint64_t seed) {
  std::vector<Eigen::VectorXd> pool;
  const auto push = [&](const HermMat& m) { pool.push_back(basis.coords(m)); };

  // Deterministic seeds: the six Pauli eigenstates on each side.
  const Eigen::Vector3d axes[6] = {{1, 0, 0},  {-1, 0, 0}, {0, 1, 0},
                                   {0, -1, 0}, {0, 0, 1},  {0, 0, -1}};
  for (const auto& a : axes) {
    for (const auto& b : axes) {
      push(ProductPureState::from_bloch(a, b).matrix);
    }
  }
  for (const auto& m : extras) push(m);
  Rng rng(seed);
  for (int i = 0; i < 64; ++i) {
    Rng trial = rng.fork(static_cast<std::uint64_t>(i));
    push(ProductPureState::random(trial).matrix);
  }

  const int dim = static_cast<int>(target.size());
  for (int round = 0; round < 30; ++round) {
    lp::ProgramBuilder builder;
    const int lam = builder.add_variables(static_cast<int>(pool.size()));
    const int eps = builder.add_variable();
    for (int d = 0; d < dim; ++d) {
      lp::ProgramBuilder::Terms lo, hi;
      for (std::size_t i = 0; i < pool.size(); ++i) {
        const double v = pool[i](d);
        if (v != 0.0) {
          lo.push_back({lam + static_cast<int>(i), v});
          hi.push_back({lam + static_cast<int>(i), v});
        }
      }
      lo.push_back({eps, 1.0});
      hi.push_back({eps, -1.0});
      builder.add_ge(std::move(lo), target(d));  // sum + eps >= x
      builder.add_le(std::move(hi), target(d));  // sum - eps <= x
    }
    lp::ProgramBuilder::Terms norm;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      norm.push_back({lam + static_cast<int>(i), 1.0});
    }
    builder.add_eq(std::move(norm), 1.0);
    builder.set_objective({{eps, 1.0}});

    const auto result = lp::solve(builder.build());
    if (!result.feasible()) break;
    if (result.x(eps) <= 1e-9) return MembershipVerdict::Member;

    // Column generation: chase the residual direction with product states.
    Eigen::VectorXd residual = target;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      residual -= result.x(lam + static_cast<int>(i)) * pool[i];
    }
    const Eigen::Matrix4d c = pauli_coefficients(basis.matrix(residual));
    Rng round_rng = rng.fork(1000000007ULL + static_cast<std::uint64_t>(round));
    double best_gain = -std::numeric_limits<double>::infinity();
    Eigen::Vector3d best_a, best_b;
    for (int start = 0; start < 8; ++start) {
      Rng s = round_rng.fork(static_cast<std::uint64_t>(start));
      const auto res = seesaw(c, s.unit3(), s.unit3(), +1.0);
      if (res.value > best_gain) {
        best_gain = res.value;
        best_a = res.bloch_a;
        best_b = res.bloch_b;
      }
    }
    push(ProductPureState::from_bloch(best_a, best_b).matrix);
    for (int extra = 0; extra < 4; ++extra) {
      Rng s = round_rng.fork(100 + static_cast<std::uint64_t>(extra));
      push(ProductPureState::random(s).matrix);
    }
  }
  return MembershipVerdict::Unknown;
}

MatrixModel make_two_qubit_model(std::string name, std::vector<HermMat> extras) {
  MatrixModel model{.name = std::move(name),
                    .hilbert_dims = {2, 2},
                    .basis = HermitianBasis(4)};
  model.extra_pure_points = std::move(extras);
  model.generator_params = 4;
  model.spectral_pure_decomposition = false;

  const HermitianBasis basis = model.basis;
  model.pure_generator = [](std::span<const double> params) {
    const auto bloch = [](double theta, double phi) {
      return Eigen::Vector3d{std::sin(theta) * std::cos(phi),
                             std::sin(theta) * std::sin(phi), std::cos(theta)};
    };
    return ProductPureState::from_bloch(bloch(params[0], params[1]),
                                        bloch(params[2], params[3]))
        .matrix;
  };
  const std::vector<HermMat> extra_points = model.extra_pure_points;
  model.membership = [basis, extra_points](const Eigen::VectorXd& coords) {
    return hull_membership(basis, extra_points, coords, 20240101ULL);
  };
  model.effect_valid = [basis, extra_points](const Effect& e) {
    HermMat op = basis.matrix(e.coeffs());
    if (e.constant() != 0.0) op = op.plus(HermMat::identity(4), e.constant());
    const HermMat complement = HermMat::identity(4).plus(op, -1.0);
    if (min_over_product_states(op) < -1e-6) return false;
    if (min_over_product_states(complement) < -1e-6) return false;
    for (const auto& extra : extra_points) {
      const double value = hs_inner(op, extra);
      if (value < -kEqTol || value > 1.0 + kEqTol) return false;
    }
    return true;
  };
  return model;
}

}  // namespace

SpacePtr make_sep22() { return StateSpace::matrix_model(make_two_qubit_model("sep22", {})); }

namespace {

OmegaBarFixture build_omega_bar() {
  const double s3 = std::sqrt(3.0);

  Eigen::Matrix4cd m1 = Eigen::Matrix4cd::Zero();
  m1(0, 0) = 1.0;
  const HermMat rho1(m1);
  const HermMat rho2(Eigen::Matrix4cd::Ones() / 4.0);

  Eigen::Matrix4cd ms1;
  ms1 << 3, s3, s3, s3, s3, 1, 1, 1, s3, 1, 1, 1, s3, 1, 1, 1;
  Eigen::Matrix4cd ms2;
  ms2 << 3, -s3, -s3, -s3, -s3, 1, 1, 1, -s3, 1, 1, 1, -s3, 1, 1, 1;
  const HermMat sigma1(ms1 / 6.0), sigma2(ms2 / 6.0);

  Eigen::Matrix4cd me1;
  me1 << 2, 0, 0, -1, 0, 0, -1, 0, 0, -1, 0, 0, -1, 0, 0, 2;
  Eigen::Matrix4cd me2;
  me2 << 0, 0, 0, 1, 0, 2, 1, 0, 0, 1, 2, 0, 1, 0, 0, 0;
  const HermMat op_e1(me1 / 2.0), op_e2(me2 / 2.0);

  const double p1 = (3.0 + s3) / 6.0, p2 = (3.0 - s3) / 6.0;
  const HermMat rho_mix = rho1.scaled(1.0 / 3.0).plus(rho2, 2.0 / 3.0);

  OmegaBarFixture fx{
      .space = StateSpace::matrix_model(make_two_qubit_model("omega-bar", {sigma1, sigma2})),
      .rho1 = rho1,
      .rho2 = rho2,
      .sigma1 = sigma1,
      .sigma2 = sigma2,
      .op_e1 = op_e1,
      .op_e2 = op_e2,
      .rho_mix = rho_mix,
      .decomp_q = PDPDecomposition{},
      .decomp_p = PDPDecomposition{}};

  const auto fail = [](const std::string& what) {
    throw std::runtime_error("load_omega_bar: fixture invariant failed: " + what);
  };

  // Measurement completeness and the discrimination deltas.
  if ((op_e1.mat() + op_e2.mat() - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff() != 0.0) {
    fail("e1 + e2 != identity");
  }
  const HermMat* rhos[2] = {&rho1, &rho2};
  const HermMat* ops[2] = {&op_e1, &op_e2};
  for (int j = 0; j < 2; ++j) {
    for (int i = 0; i < 2; ++i) {
      if (std::abs(hs_inner(*ops[j], *rhos[i]) - (i == j ? 1.0 : 0.0)) > 1e-12) {
        fail("Tr{e_j rho_i} != delta");
      }
    }
  }
  if (std::abs(hs_inner(sigma1, sigma2)) > 1e-12) fail("sigma pair not orthogonal");

  const HermMat mix_b = sigma1.scaled(p1).plus(sigma2, p2);
  if ((rho_mix.mat() - mix_b.mat()).cwiseAbs().maxCoeff() > 1e-12) {
    fail("the two convex combinations differ");
  }
  for (const HermMat* s : {&sigma1, &sigma2, &rho1, &rho2}) {
    if (eig_herm(*s).eigenvalues(0) < 1.0 - kEqTol) fail("component state not rank one");
  }
  for (const HermMat* op : {&op_e1, &op_e2}) {
    if (eig_herm(*op).eigenvalues.minCoeff() > -kEqTol) {
      fail("measurement operator has no negative eigenvalue");
    }
    for (const HermMat* s : {&sigma1, &sigma2}) {
      if (hs_inner(*op, *s) < -kEqTol) fail("measurement operator negative on sigma");
    }
  }

  const auto& space = fx.space;
  Eigen::VectorXd probs_q(2);
  probs_q << 1.0 / 3.0, 2.0 / 3.0;
  fx.decomp_q = PDPDecomposition{
      probs_q,
      {State(space->coords_of(rho1), space), State(space->coords_of(rho2), space)},
      {effect_from_operator(op_e1, *space), effect_from_operator(op_e2, *space)}};

  Eigen::VectorXd probs_p(2);
  probs_p << p1, p2;
  const HermMat proj_complement = HermMat::identity(4).plus(sigma1, -1.0);
  fx.decomp_p = PDPDecomposition{
      probs_p,
      {State(space->coords_of(sigma1), space), State(space->coords_of(sigma2), space)},
      {effect_from_operator(sigma1, *space), effect_from_operator(proj_complement, *space)}};

  validate_pdp(fx.decomp_q);
  validate_pdp(fx.decomp_p);
  const Eigen::VectorXd mix_coords = space->coords_of(rho_mix);
  if ((fx.decomp_q.target_coords() - mix_coords).cwiseAbs().maxCoeff() > 1e-12 ||
      (fx.decomp_p.target_coords() - mix_coords).cwiseAbs().maxCoeff() > 1e-12) {
    fail("decompositions do not reproduce the mixture");
  }
  return fx;
}

}  // namespace

const OmegaBarFixture& load_omega_bar() {
  static const OmegaBarFixture fixture = build_omega_bar();
  return fixture;
}

SpacePtr parse_model(const std::string& name) {
  if (name.rfind("classical:", 0) == 0) {
    const std::string arg = name.substr(10);
    std::size_t pos = 0;
    int n = 0;
    try {
      n = std::stoi(arg, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("parse_model: bad classical size '" + arg + "'");
    }
    if (pos != arg.size() || n < 2) {
      throw std::invalid_argument("parse_model: bad classical size '" + arg + "'");
    }
    return make_classical(n);
  }
  if (name == "qubit") return make_qubit();
  if (name == "square-bit") return make_square_bit();
  if (name == "sep22") return make_sep22();
  if (name == "omega-bar") return load_omega_bar().space;
  throw std::invalid_argument("parse_model: unknown model '" + name + "'");
}

}  // namespace gpt
