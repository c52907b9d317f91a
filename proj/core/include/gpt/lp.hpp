#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace gpt::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Dense linear program
///   minimize    objective . x
///   subject to  A x = b,  lower <= x <= upper.
/// Empty objective means pure feasibility; empty lower/upper mean the default
/// bounds x >= 0 with no upper limit.
struct LinearProgram {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd objective;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  int num_vars() const { return static_cast<int>(A.cols()); }
  int num_rows() const { return static_cast<int>(A.rows()); }
};

struct Options {
  /// Constraint-satisfaction slack; a program is Feasible iff the phase-1
  /// optimum does not exceed this.
  double feas_tol = 1e-9;
  /// 0 selects an automatic cap based on the problem size.
  int max_iterations = 0;
};

enum class Status { Feasible, Infeasible, Unbounded, NoConvergence };

struct Result {
  Status status = Status::NoConvergence;
  Eigen::VectorXd x;            // primal point when Feasible
  double objective = 0.0;       // objective . x when Feasible
  Eigen::VectorXd certificate;  // Farkas ray over standardized rows when Infeasible
  int iterations = 0;

  bool feasible() const { return status == Status::Feasible; }
};

/// Phase-1/phase-2 tableau simplex with Bland's anti-cycling rule.
Result solve(const LinearProgram& p, const Options& opts = {});

/// Validates an infeasibility certificate y against the standardized equality
/// system of p (bound shifts applied, rows not sign-flipped): y.A_std <= tol
/// componentwise while y.b_std > tol.
bool certifies_infeasibility(const LinearProgram& p, const Eigen::VectorXd& y,
                             double tol = 1e-9);

/// Text dump of the standardized tableau, for debugging.
std::string dump_tableau(const LinearProgram& p);

/// Assembles programs with inequality rows; slack variables are appended
/// after the primary ones, so Result.x.head(num_primary_vars()) is the
/// caller's solution.
class ProgramBuilder {
 public:
  using Terms = std::vector<std::pair<int, double>>;

  int add_variable(double lo = 0.0, double hi = kInf);
  int add_variables(int count, double lo = 0.0, double hi = kInf);

  void add_eq(Terms terms, double rhs);
  void add_le(Terms terms, double rhs);
  void add_ge(Terms terms, double rhs);

  void set_objective(Terms terms);

  int num_primary_vars() const { return static_cast<int>(lower_.size()); }
  LinearProgram build() const;

 private:
  enum class Rel { Eq, Le, Ge };
  struct Row {
    Terms terms;
    double rhs;
    Rel rel;
  };

  std::vector<double> lower_, upper_;
  std::vector<Row> rows_;
  Terms objective_;
};

}  // namespace gpt::lp
