#include <doctest.h>

#include <Eigen/Dense>

#include "gpt/lp.hpp"
#include "gpt/rng.hpp"

using namespace gpt;

namespace {

lp::LinearProgram two_var_segment() {
  lp::LinearProgram p;
  p.A = Eigen::MatrixXd::Ones(1, 2);
  p.b = Eigen::VectorXd::Ones(1);
  return p;
}

}  // namespace

TEST_SUITE("lp") {

TEST_CASE("minimizing along a feasibility segment lands on the optimal vertex") {
  lp::LinearProgram p = two_var_segment();
  p.objective = Eigen::Vector2d(1.0, 0.0);
  const auto res = lp::solve(p);
  REQUIRE(res.status == lp::Status::Feasible);
  CHECK(res.x(0) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(res.x(1) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(res.objective == doctest::Approx(0.0));
}

TEST_CASE("contradictory rows with box bounds are infeasible with a certificate") {
  lp::LinearProgram p;
  p.A.resize(2, 2);
  p.A << 1, 1, 1, -1;
  p.b.resize(2);
  p.b << 1, 3;  // forces x1 = 2 > upper bound
  p.lower = Eigen::Vector2d(0, 0);
  p.upper = Eigen::Vector2d(1, 1);
  const auto res = lp::solve(p);
  REQUIRE(res.status == lp::Status::Infeasible);
  CHECK(lp::certifies_infeasibility(p, res.certificate));
}

TEST_CASE("post-processing kernel systems are feasible with the generating kernel") {
  // Three-letter classical instrument t_k(rho) = rho_k e_k, merged through a
  // 2x3 column-stochastic kernel. Unknowns p(j|k) must reproduce the merge.
  Eigen::Vector3d rho(0.2, 0.3, 0.5);
  Eigen::MatrixXd gen(2, 3);
  gen << 0.25, 0.5, 1.0, 0.75, 0.5, 0.0;

  lp::ProgramBuilder builder;
  const int base = builder.add_variables(6);  // p(j|k) = var j*3+k
  for (int k = 0; k < 3; ++k) {
    builder.add_eq({{k, 1.0}, {3 + k, 1.0}}, 1.0);
  }
  for (int j = 0; j < 2; ++j) {
    for (int c = 0; c < 3; ++c) {
      // s_j(rho)_c = p(j|c) rho_c
      builder.add_eq({{j * 3 + c, rho(c)}}, gen(j, c) * rho(c));
    }
  }
  const auto res = lp::solve(builder.build());
  REQUIRE(res.status == lp::Status::Feasible);
  // The generating kernel satisfies the same rows.
  for (int k = 0; k < 3; ++k) {
    CHECK(gen.col(k).sum() == doctest::Approx(1.0));
  }
  (void)base;
}

TEST_CASE("randomly constructed feasible programs are reported feasible") {
  Rng rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    Rng trng = rng.fork(trial);
    const int n = static_cast<int>(trng.uniform_int(2, 8));
    const int m = static_cast<int>(trng.uniform_int(1, n));
    Eigen::MatrixXd a(m, n);
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < n; ++c) a(r, c) = trng.normal();
    }
    Eigen::VectorXd xstar(n);
    for (int c = 0; c < n; ++c) xstar(c) = trng.uniform();

    lp::LinearProgram p;
    p.A = a;
    p.b = a * xstar;
    if (trial % 3 == 0) {
      // Random upper bounds above x*, and one free variable.
      p.lower = Eigen::VectorXd::Zero(n);
      p.upper = Eigen::VectorXd::Constant(n, lp::kInf);
      for (int c = 0; c < n; ++c) p.upper(c) = xstar(c) + trng.uniform(0.1, 2.0);
      p.lower(0) = -lp::kInf;
      p.upper(0) = lp::kInf;
    }
    const auto res = lp::solve(p);
    REQUIRE(res.status == lp::Status::Feasible);
    CHECK((p.A * res.x - p.b).cwiseAbs().maxCoeff() <= 1e-8);
    if (p.lower.size()) {
      for (int c = 0; c < n; ++c) {
        if (std::isfinite(p.lower(c))) CHECK(res.x(c) >= p.lower(c) - 1e-9);
        if (std::isfinite(p.upper(c))) CHECK(res.x(c) <= p.upper(c) + 1e-9);
      }
    } else {
      CHECK(res.x.minCoeff() >= -1e-9);
    }
  }
}

TEST_CASE("status is invariant under permuting the variables") {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    Rng trng = rng.fork(trial);
    const int n = static_cast<int>(trng.uniform_int(3, 6));
    const int m = static_cast<int>(trng.uniform_int(2, n));
    Eigen::MatrixXd a(m, n);
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < n; ++c) a(r, c) = trng.normal();
    }
    Eigen::VectorXd b(m);
    if (trial % 2 == 0) {
      Eigen::VectorXd xstar(n);
      for (int c = 0; c < n; ++c) xstar(c) = trng.uniform();
      b = a * xstar;
    } else {
      for (int r = 0; r < m; ++r) b(r) = trng.normal() * 5.0;  // usually infeasible
    }
    lp::LinearProgram p;
    p.A = a;
    p.b = b;

    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int c = 0; c < n; ++c) perm[static_cast<std::size_t>(c)] = c;
    for (int c = n - 1; c > 0; --c) {
      std::swap(perm[static_cast<std::size_t>(c)],
                perm[static_cast<std::size_t>(trng.uniform_int(0, c))]);
    }
    lp::LinearProgram q = p;
    for (int c = 0; c < n; ++c) q.A.col(c) = p.A.col(perm[static_cast<std::size_t>(c)]);

    CHECK(lp::solve(p).status == lp::solve(q).status);
  }
}

TEST_CASE("unbounded descent directions are flagged") {
  lp::LinearProgram p;
  p.A.resize(1, 2);
  p.A << 1, -1;
  p.b = Eigen::VectorXd::Zero(1);
  p.objective = Eigen::Vector2d(-1.0, 0.0);
  CHECK(lp::solve(p).status == lp::Status::Unbounded);
}

TEST_CASE("the classic degenerate cycling program terminates at its optimum") {
  // Beale's example; Dantzig's rule cycles on it, Bland's rule must not.
  lp::ProgramBuilder builder;
  builder.add_variables(4);
  builder.set_objective({{0, -0.75}, {1, 150.0}, {2, -0.02}, {3, 6.0}});
  builder.add_le({{0, 0.25}, {1, -60.0}, {2, -1.0 / 25.0}, {3, 9.0}}, 0.0);
  builder.add_le({{0, 0.5}, {1, -90.0}, {2, -1.0 / 50.0}, {3, 3.0}}, 0.0);
  builder.add_le({{2, 1.0}}, 1.0);
  const auto res = lp::solve(builder.build());
  REQUIRE(res.status == lp::Status::Feasible);
  CHECK(res.objective == doctest::Approx(-0.05).epsilon(1e-9));
}

TEST_CASE("finite bounds and free variables are mapped faithfully") {
  lp::LinearProgram p = two_var_segment();
  p.lower = Eigen::Vector2d(0.25, -lp::kInf);
  p.upper = Eigen::Vector2d(0.5, lp::kInf);
  p.objective = Eigen::Vector2d(0.0, 1.0);
  const auto res = lp::solve(p);
  REQUIRE(res.status == lp::Status::Feasible);
  CHECK(res.x(0) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(res.x(1) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("a one-iteration cap reports no convergence, not a wrong answer") {
  lp::ProgramBuilder builder;
  builder.add_variables(4);
  builder.add_eq({{0, 1.0}, {1, 2.0}, {2, 1.0}}, 4.0);
  builder.add_eq({{1, 1.0}, {2, 3.0}, {3, 1.0}}, 5.0);
  lp::Options opts;
  opts.max_iterations = 1;
  CHECK(lp::solve(builder.build(), opts).status == lp::Status::NoConvergence);
}

TEST_CASE("builder rejects references to unknown variables") {
  lp::ProgramBuilder builder;
  builder.add_variables(2);
  builder.add_eq({{5, 1.0}}, 0.0);
  CHECK_THROWS_AS(builder.build(), std::invalid_argument);
}

TEST_CASE("tableau dump mentions the standardized dimensions") {
  lp::LinearProgram p = two_var_segment();
  const std::string dump = lp::dump_tableau(p);
  CHECK(dump.find("1 rows") != std::string::npos);
}

}  // TEST_SUITE
