#include "gpt/lp.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gpt::lp {

namespace {

constexpr double kPivotEps = 1e-10;
constexpr double kCostEps = 1e-10;

// Standardized form: A_std y = b_std, y >= 0, minimize c_std . y, together
// with the bookkeeping needed to map a solution y back to the original x.
struct StandardForm {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  // Per original variable: up to two standardized columns x = shift + s1*y[c1] + s2*y[c2].
  struct VarMap {
    double shift = 0.0;
    int col1 = -1, col2 = -1;
    double sign1 = 1.0, sign2 = 0.0;
  };
  std::vector<VarMap> vars;
  bool trivially_infeasible = false;
};

StandardForm standardize(const LinearProgram& p) {
  const int m = p.num_rows();
  const int n = p.num_vars();
  Eigen::VectorXd lower = p.lower.size() ? p.lower : Eigen::VectorXd::Zero(n);
  Eigen::VectorXd upper = p.upper.size() ? p.upper : Eigen::VectorXd::Constant(n, kInf);
  Eigen::VectorXd cost = p.objective.size() ? p.objective : Eigen::VectorXd::Zero(n);
  if (lower.size() != n || upper.size() != n || cost.size() != n || p.b.size() != m) {
    throw std::invalid_argument("lp::solve: inconsistent program dimensions");
  }
  if (!p.A.allFinite() || !p.b.allFinite()) {
    throw std::invalid_argument("lp::solve: non-finite constraint data");
  }

  StandardForm sf;
  sf.vars.resize(static_cast<std::size_t>(n));

  // Pass 1: assign standardized columns and count upper-bound rows.
  int cols = 0, extra_rows = 0;
  for (int i = 0; i < n; ++i) {
    auto& v = sf.vars[static_cast<std::size_t>(i)];
    const double lo = lower(i), hi = upper(i);
    if (lo > hi + 1e-15) {
      sf.trivially_infeasible = true;
      return sf;
    }
    if (std::isfinite(lo)) {
      v.shift = lo;
      v.col1 = cols++;
      v.sign1 = 1.0;
      if (std::isfinite(hi)) ++extra_rows;
    } else if (std::isfinite(hi)) {
      v.shift = hi;  // x = hi - y
      v.col1 = cols++;
      v.sign1 = -1.0;
    } else {
      v.col1 = cols++;
      v.col2 = cols++;
      v.sign1 = 1.0;
      v.sign2 = -1.0;
    }
  }
  const int slack0 = cols;
  cols += extra_rows;

  sf.A = Eigen::MatrixXd::Zero(m + extra_rows, cols);
  sf.b = Eigen::VectorXd::Zero(m + extra_rows);
  sf.c = Eigen::VectorXd::Zero(cols);
  sf.b.head(m) = p.b;

  int extra = 0, slack = slack0;
  for (int i = 0; i < n; ++i) {
    const auto& v = sf.vars[static_cast<std::size_t>(i)];
    sf.A.col(v.col1).head(m) = v.sign1 * p.A.col(i);
    sf.c(v.col1) = v.sign1 * cost(i);
    if (v.col2 >= 0) {
      sf.A.col(v.col2).head(m) = v.sign2 * p.A.col(i);
      sf.c(v.col2) = v.sign2 * cost(i);
    }
    if (v.shift != 0.0) sf.b.head(m) -= v.shift * p.A.col(i);
    const double lo = lower(i), hi = upper(i);
    if (std::isfinite(lo) && std::isfinite(hi)) {
      const int r = m + extra++;
      sf.A(r, v.col1) = 1.0;
      sf.A(r, slack++) = 1.0;
      sf.b(r) = hi - lo;
    }
  }
  return sf;
}

struct Tableau {
  Eigen::MatrixXd body;  // rows x (cols + 1); last column is the rhs
  Eigen::VectorXd rc;    // reduced costs over structural + artificial columns
  double obj = 0.0;
  std::vector<int> basis;
  int n_struct = 0;
  int n_total = 0;

  double rhs(int r) const { return body(r, n_total); }

  void pivot(int r, int e) {
    body.row(r) /= body(r, e);
    for (int i = 0; i < body.rows(); ++i) {
      if (i == r) continue;
      const double f = body(i, e);
      if (f != 0.0) body.row(i) -= f * body.row(r);
    }
    const double f = rc(e);
    if (f != 0.0) {
      rc -= f * body.row(r).head(n_total).transpose();
      obj += f * body(r, n_total);
    }
    basis[static_cast<std::size_t>(r)] = e;
  }
};

// One simplex phase under Bland's rule. `allowed(j)` gates entering columns.
// Returns false when the entering column proves the objective unbounded.
enum class PhaseEnd { Optimal, Unbounded, IterationCap };

template <typename Allowed>
PhaseEnd run_phase(Tableau& t, Allowed allowed, int max_iter, int& iters) {
  const int m = static_cast<int>(t.body.rows());
  while (true) {
    if (iters >= max_iter) return PhaseEnd::IterationCap;
    int enter = -1;
    for (int j = 0; j < t.n_total; ++j) {  // Bland: smallest eligible index
      if (t.rc(j) < -kCostEps && allowed(j)) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return PhaseEnd::Optimal;
    int leave = -1;
    double best = kInf;
    for (int r = 0; r < m; ++r) {
      const double a = t.body(r, enter);
      if (a > kPivotEps) {
        const double ratio = t.rhs(r) / a;
        if (ratio < best - 1e-12 ||
            (ratio < best + 1e-12 &&
             (leave < 0 || t.basis[static_cast<std::size_t>(r)] <
                               t.basis[static_cast<std::size_t>(leave)]))) {
          best = ratio;
          leave = r;
        }
      }
    }
    if (leave < 0) return PhaseEnd::Unbounded;
    t.pivot(leave, enter);
    ++iters;
  }
}

}  // namespace

Result solve(const LinearProgram& p, const Options& opts) {
  Result res;
  const StandardForm sf = standardize(p);
  if (sf.trivially_infeasible) {
    res.status = Status::Infeasible;
    return res;
  }
  const int m = static_cast<int>(sf.A.rows());
  const int n = static_cast<int>(sf.A.cols());
  const int max_iter =
      opts.max_iterations > 0 ? opts.max_iterations : 2000 + 200 * (m + n);

  Tableau t;
  t.n_struct = n;
  t.n_total = n + m;
  t.body = Eigen::MatrixXd::Zero(m, t.n_total + 1);
  t.body.block(0, 0, m, n) = sf.A;
  t.body.col(t.n_total) = sf.b;
  for (int r = 0; r < m; ++r) {
    if (t.body(r, t.n_total) < 0.0) t.body.row(r) = -t.body.row(r);
    t.body(r, n + r) = 1.0;
  }
  t.basis.resize(static_cast<std::size_t>(m));
  for (int r = 0; r < m; ++r) t.basis[static_cast<std::size_t>(r)] = n + r;

  // Phase 1: minimize the sum of artificials.
  t.rc = Eigen::VectorXd::Zero(t.n_total);
  for (int j = 0; j < t.n_total; ++j) {
    double s = 0.0;
    for (int r = 0; r < m; ++r) s += t.body(r, j);
    t.rc(j) = (j >= n ? 1.0 : 0.0) - s;
  }
  t.obj = t.body.col(t.n_total).sum();

  int iters = 0;
  {
    const PhaseEnd end = run_phase(t, [](int) { return true; }, max_iter, iters);
    res.iterations = iters;
    if (end == PhaseEnd::IterationCap) {
      res.status = Status::NoConvergence;
      return res;
    }
    if (end == PhaseEnd::Unbounded) {  // cannot happen with exact arithmetic
      res.status = Status::NoConvergence;
      return res;
    }
  }

  if (t.obj > opts.feas_tol) {
    res.status = Status::Infeasible;
    // Duals of the flipped rows from the artificial reduced costs; undo the
    // row flips so the certificate refers to the standardized system.
    Eigen::VectorXd y(m);
    for (int r = 0; r < m; ++r) y(r) = 1.0 - t.rc(n + r);
    for (int r = 0; r < m; ++r) {
      // Row r was flipped iff its artificial column is now -1 on that row
      // cannot be read back directly; recompute from the sign flip applied
      // at setup time: b_std(r) < 0.
      if (sf.b(r) < 0.0) y(r) = -y(r);
    }
    res.certificate = y;
    return res;
  }

  // Drive leftover artificials out of the basis; rows that cannot pivot are
  // redundant and stay parked on their zero-valued artificial.
  for (int r = 0; r < m; ++r) {
    if (t.basis[static_cast<std::size_t>(r)] < n) continue;
    for (int j = 0; j < n; ++j) {
      if (std::abs(t.body(r, j)) > kPivotEps) {
        t.pivot(r, j);
        break;
      }
    }
  }

  // Phase 2 when there is a real objective.
  const bool has_objective = sf.c.cwiseAbs().maxCoeff() > 0.0;
  if (has_objective) {
    t.rc = Eigen::VectorXd::Zero(t.n_total);
    t.obj = 0.0;
    Eigen::VectorXd cb(m);
    for (int r = 0; r < m; ++r) {
      const int bj = t.basis[static_cast<std::size_t>(r)];
      cb(r) = bj < n ? sf.c(bj) : 0.0;
    }
    for (int j = 0; j < n; ++j) {
      t.rc(j) = sf.c(j) - cb.dot(t.body.col(j));
    }
    for (int j = n; j < t.n_total; ++j) t.rc(j) = kInf;  // artificials barred
    t.obj = cb.dot(t.body.col(t.n_total));
    const auto phase2_allowed = [&](int j) { return j < n; };
    const PhaseEnd end = run_phase(t, phase2_allowed, max_iter, iters);
    res.iterations = iters;
    if (end == PhaseEnd::IterationCap) {
      res.status = Status::NoConvergence;
      return res;
    }
    if (end == PhaseEnd::Unbounded) {
      res.status = Status::Unbounded;
      return res;
    }
  }

  // Recover the standardized solution, then the original variables.
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  for (int r = 0; r < m; ++r) {
    const int bj = t.basis[static_cast<std::size_t>(r)];
    if (bj < n) y(bj) = t.rhs(r);
  }
  y = y.cwiseMax(0.0);

  const int nx = p.num_vars();
  Eigen::VectorXd x(nx);
  for (int i = 0; i < nx; ++i) {
    const auto& v = sf.vars[static_cast<std::size_t>(i)];
    double xi = v.shift + v.sign1 * y(v.col1);
    if (v.col2 >= 0) xi += v.sign2 * y(v.col2);
    x(i) = xi;
  }

  // Independent re-check of the returned point.
  const double eq_dev = p.num_rows() ? (p.A * x - p.b).cwiseAbs().maxCoeff() : 0.0;
  double bound_dev = 0.0;
  const Eigen::VectorXd lower = p.lower.size() ? p.lower : Eigen::VectorXd::Zero(nx);
  const Eigen::VectorXd upper =
      p.upper.size() ? p.upper : Eigen::VectorXd::Constant(nx, kInf);
  for (int i = 0; i < nx; ++i) {
    if (std::isfinite(lower(i))) bound_dev = std::max(bound_dev, lower(i) - x(i));
    if (std::isfinite(upper(i))) bound_dev = std::max(bound_dev, x(i) - upper(i));
    x(i) = std::min(std::max(x(i), lower(i)), std::isfinite(upper(i)) ? upper(i) : x(i));
  }
  if (eq_dev > opts.feas_tol * std::max(1.0, p.b.size() ? p.b.cwiseAbs().maxCoeff() : 1.0) ||
      bound_dev > opts.feas_tol) {
    res.status = Status::NoConvergence;
    return res;
  }

  res.status = Status::Feasible;
  res.x = std::move(x);
  res.objective = p.objective.size() ? p.objective.dot(res.x) : 0.0;
  return res;
}

bool certifies_infeasibility(const LinearProgram& p, const Eigen::VectorXd& y,
                             double tol) {
  const StandardForm sf = standardize(p);
  if (sf.trivially_infeasible) return false;
  if (y.size() != sf.A.rows()) return false;
  const Eigen::VectorXd yA = sf.A.transpose() * y;
  return yA.maxCoeff() <= tol && y.dot(sf.b) > tol;
}

std::string dump_tableau(const LinearProgram& p) {
  const StandardForm sf = standardize(p);
  std::ostringstream out;
  out << "standardized tableau: " << sf.A.rows() << " rows, " << sf.A.cols()
      << " cols\n";
  if (sf.trivially_infeasible) {
    out << "(trivially infeasible bounds)\n";
    return out.str();
  }
  for (int r = 0; r < sf.A.rows(); ++r) {
    for (int j = 0; j < sf.A.cols(); ++j) out << sf.A(r, j) << " ";
    out << "| " << sf.b(r) << "\n";
  }
  out << "cost: ";
  for (int j = 0; j < sf.c.size(); ++j) out << sf.c(j) << " ";
  out << "\n";
  return out.str();
}

int ProgramBuilder::add_variable(double lo, double hi) {
  lower_.push_back(lo);
  upper_.push_back(hi);
  return static_cast<int>(lower_.size()) - 1;
}

int ProgramBuilder::add_variables(int count, double lo, double hi) {
  const int first = static_cast<int>(lower_.size());
  for (int i = 0; i < count; ++i) add_variable(lo, hi);
  return first;
}

void ProgramBuilder::add_eq(Terms terms, double rhs) {
  rows_.push_back({std::move(terms), rhs, Rel::Eq});
}

void ProgramBuilder::add_le(Terms terms, double rhs) {
  rows_.push_back({std::move(terms), rhs, Rel::Le});
}

void ProgramBuilder::add_ge(Terms terms, double rhs) {
  rows_.push_back({std::move(terms), rhs, Rel::Ge});
}

void ProgramBuilder::set_objective(Terms terms) { objective_ = std::move(terms); }

LinearProgram ProgramBuilder::build() const {
  const int np = num_primary_vars();
  int slacks = 0;
  for (const auto& row : rows_) {
    if (row.rel != Rel::Eq) ++slacks;
  }
  const int n = np + slacks;
  const int m = static_cast<int>(rows_.size());

  LinearProgram p;
  p.A = Eigen::MatrixXd::Zero(m, n);
  p.b = Eigen::VectorXd::Zero(m);
  p.lower = Eigen::VectorXd::Zero(n);
  p.upper = Eigen::VectorXd::Constant(n, kInf);
  for (int i = 0; i < np; ++i) {
    p.lower(i) = lower_[static_cast<std::size_t>(i)];
    p.upper(i) = upper_[static_cast<std::size_t>(i)];
  }

  int slack = np;
  for (int r = 0; r < m; ++r) {
    const auto& row = rows_[static_cast<std::size_t>(r)];
    for (const auto& [idx, coeff] : row.terms) {
      if (idx < 0 || idx >= np) {
        throw std::invalid_argument("ProgramBuilder: term references unknown variable");
      }
      p.A(r, idx) += coeff;
    }
    p.b(r) = row.rhs;
    if (row.rel == Rel::Le) p.A(r, slack++) = 1.0;
    if (row.rel == Rel::Ge) p.A(r, slack++) = -1.0;
  }

  if (!objective_.empty()) {
    p.objective = Eigen::VectorXd::Zero(n);
    for (const auto& [idx, coeff] : objective_) {
      if (idx < 0 || idx >= np) {
        throw std::invalid_argument("ProgramBuilder: objective references unknown variable");
      }
      p.objective(idx) += coeff;
    }
  }
  return p;
}

}  // namespace gpt::lp
