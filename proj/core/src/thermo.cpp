#include "gpt/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace gpt {

namespace {
constexpr double kEqTol = 1e-9;
constexpr double kZeroProb = 1e-12;

double entropy_term(double p) { return p > kZeroProb ? -p * std::log(p) : 0.0; }
}  // namespace

double shannon_entropy(const Eigen::VectorXd& p) {
  if (p.size() == 0) throw std::invalid_argument("shannon_entropy: empty vector");
  if (p.minCoeff() < -kEqTol) {
    throw std::invalid_argument("shannon_entropy: negative probability " +
                                std::to_string(p.minCoeff()));
  }
  if (std::abs(p.sum() - 1.0) > kEqTol) {
    throw std::invalid_argument("shannon_entropy: probabilities sum to " +
                                std::to_string(p.sum()));
  }
  double h = 0.0;
  for (int i = 0; i < p.size(); ++i) h += entropy_term(p(i));
  return h;
}

namespace {

// Unique affine weights of rho over an affinely independent vertex subset,
// or nothing when rho lies outside their hull (residual beyond 1e-9 or a
// weight below -1e-12).
std::optional<Eigen::VectorXd> subset_weights(const Eigen::VectorXd& rho,
                                              const Eigen::MatrixXd& verts) {
  const int k = static_cast<int>(verts.rows());
  const int d = static_cast<int>(verts.cols());
  Eigen::MatrixXd sys(d + 1, k);
  sys.topRows(d) = verts.transpose();
  sys.bottomRows(1).setOnes();
  Eigen::VectorXd rhs(d + 1);
  rhs.head(d) = rho;
  rhs(d) = 1.0;
  Eigen::VectorXd w = sys.colPivHouseholderQr().solve(rhs);
  if ((sys * w - rhs).cwiseAbs().maxCoeff() > kEqTol) return std::nullopt;
  if (w.minCoeff() < -kZeroProb) return std::nullopt;
  // Entries at numerical zero mean a smaller subset already covers this
  // decomposition; reject to avoid duplicates.
  if (w.minCoeff() <= kZeroProb) return std::nullopt;
  w = w.cwiseMax(0.0);
  w /= w.sum();
  return w;
}

void enumerate_subsets(int n, int size, std::vector<int>& current,
                       const std::function<void(const std::vector<int>&)>& visit,
                       int start = 0) {
  if (static_cast<int>(current.size()) == size) {
    visit(current);
    return;
  }
  for (int i = start; i <= n - (size - static_cast<int>(current.size())); ++i) {
    current.push_back(i);
    enumerate_subsets(n, size, current, visit, i + 1);
    current.pop_back();
  }
}

}  // namespace

DecompositionSet enumerate_pdp_decompositions(const State& rho, const StateSpace& space,
                                              int max_size) {
  if (!space.is_polytope()) {
    throw std::invalid_argument("enumerate_pdp_decompositions: vertex-described spaces only");
  }
  if (membership_verdict(rho.coords(), space) != MembershipVerdict::Member) {
    throw std::invalid_argument("enumerate_pdp_decompositions: state not in space");
  }
  const int n = space.vertex_count();
  if (max_size <= 0) max_size = space.affine_dim() + 1;
  max_size = std::min(max_size, n);

  DecompositionSet out{rho, {}, true, 0};
  const SpacePtr self = rho.space();

  for (int size = 1; size <= max_size; ++size) {
    std::vector<int> current;
    enumerate_subsets(n, size, current, [&](const std::vector<int>& subset) {
      Eigen::MatrixXd verts(size, space.ambient_dim());
      for (int i = 0; i < size; ++i) verts.row(i) = space.vertices().row(subset[static_cast<std::size_t>(i)]);
      if (affine_rank(verts) != size - 1) {
        ++out.skipped_dependent;
        return;
      }
      const auto weights = subset_weights(rho.coords(), verts);
      if (!weights) return;

      std::vector<State> states;
      states.reserve(static_cast<std::size_t>(size));
      for (int i = 0; i < size; ++i) {
        states.push_back(space.vertex_state(subset[static_cast<std::size_t>(i)], self));
      }
      Measurement witness;
      if (size == 1) {
        witness = {Effect(space.unit(), 0.0)};
      } else {
        auto found = perfectly_distinguishable(states, space);
        if (!found) return;
        witness = std::move(*found);
      }
      out.decompositions.push_back(
          PDPDecomposition{*weights, std::move(states), std::move(witness)});
    });
  }
  return out;
}

PDPDecomposition quantum_pdp(const HermMat& rho, const SpacePtr& space) {
  if (space->is_polytope()) {
    throw std::invalid_argument("quantum_pdp: matrix-model space required");
  }
  if (std::abs(rho.trace() - 1.0) > kEqTol) {
    throw std::invalid_argument("quantum_pdp: trace must be 1");
  }
  const auto eig = eig_herm(rho);
  if (eig.eigenvalues.minCoeff() < -kEqTol) {
    throw std::invalid_argument("quantum_pdp: matrix is not positive semidefinite");
  }

  std::vector<double> probs;
  std::vector<State> states;
  std::vector<HermMat> projectors;
  for (int i = 0; i < eig.eigenvalues.size(); ++i) {
    const double p = eig.eigenvalues(i);
    if (p > kZeroProb) {
      probs.push_back(p);
      projectors.push_back(HermMat::projector(eig.eigenvectors.col(i)));
      states.push_back(State(space->coords_of(projectors.back()), space));
    }
  }
  Eigen::VectorXd pv = Eigen::Map<Eigen::VectorXd>(probs.data(), static_cast<int>(probs.size()));
  pv /= pv.sum();

  // Projective witness; the last effect absorbs the kernel so the
  // measurement closes on the unit.
  Measurement witness;
  HermMat total = HermMat::zero(rho.dim());
  for (const auto& proj : projectors) total = total.plus(proj);
  for (std::size_t i = 0; i < projectors.size(); ++i) {
    HermMat op = projectors[i];
    if (i + 1 == projectors.size()) {
      op = op.plus(HermMat::identity(rho.dim())).plus(total, -1.0);
    }
    witness.push_back(effect_from_operator(op, *space));
  }
  return PDPDecomposition{std::move(pv), std::move(states), std::move(witness)};
}

double separation_work(const PDPDecomposition& decomp, long N, double T, double k_B) {
  return shannon_entropy(decomp.probs) * static_cast<double>(N) * k_B * T;
}

CycleReport cycle_delta_work(const PDPDecomposition& decomp_q,
                             const PDPDecomposition& decomp_p, long N, double T,
                             double k_B) {
  const Eigen::VectorXd target_q = decomp_q.target_coords();
  const Eigen::VectorXd target_p = decomp_p.target_coords();
  if (target_q.size() != target_p.size() ||
      (target_q - target_p).cwiseAbs().maxCoeff() > kEqTol) {
    throw std::invalid_argument(
        "cycle_delta_work: decompositions target different states; the cycle does not close");
  }
  CycleReport report;
  report.N = N;
  report.T = T;
  report.k_B = k_B;
  report.W_separation = separation_work(decomp_q, N, T, k_B);
  report.W_mixing = separation_work(decomp_p, N, T, k_B);
  report.delta_W = report.W_mixing - report.W_separation;
  return report;
}

double UniquenessVerdict::entropy() const {
  if (kind != UniquenessKind::Unique || entropies.size() != 1) {
    throw std::logic_error("UniquenessVerdict::entropy: not Unique");
  }
  return entropies.front();
}

UniquenessVerdict check_entropy_uniqueness(const DecompositionSet& ds) {
  UniquenessVerdict verdict;
  if (ds.decompositions.empty()) {
    verdict.kind = UniquenessKind::Empty;
    return verdict;
  }
  for (const auto& d : ds.decompositions) {
    const double h = shannon_entropy(d.probs);
    bool known = false;
    for (double seen : verdict.entropies) {
      if (std::abs(seen - h) <= kEqTol) {
        known = true;
        break;
      }
    }
    if (!known) verdict.entropies.push_back(h);
  }
  std::sort(verdict.entropies.begin(), verdict.entropies.end(), std::greater<>());
  verdict.kind = verdict.entropies.size() == 1 ? UniquenessKind::Unique
                                               : UniquenessKind::NonUnique;
  return verdict;
}

EntropyOracle make_entropy_oracle(const SpacePtr& space) {
  if (!space->is_polytope()) {
    const auto model_entropy = space->model().entropy;
    if (!model_entropy) {
      return [](const State&) -> std::optional<double> { return std::nullopt; };
    }
    return [model_entropy](const State& rho) { return model_entropy(rho.coords()); };
  }
  // Affinely independent vertices: barycentric weights are the unique PDP
  // distribution, no enumeration needed.
  if (space->vertex_count() == space->affine_dim() + 1) {
    const int k = space->vertex_count();
    const int d = space->ambient_dim();
    Eigen::MatrixXd sys(d + 1, k);
    sys.topRows(d) = space->vertices().transpose();
    sys.bottomRows(1).setOnes();
    const auto qr = std::make_shared<Eigen::ColPivHouseholderQR<Eigen::MatrixXd>>(sys);
    return [space, qr, d](const State& rho) -> std::optional<double> {
      Eigen::VectorXd rhs(d + 1);
      rhs.head(d) = rho.coords();
      rhs(d) = 1.0;
      Eigen::VectorXd w = qr->solve(rhs);
      if (w.minCoeff() < -kEqTol) return std::nullopt;  // outside the hull
      w = w.cwiseMax(0.0);
      return shannon_entropy(w / w.sum());
    };
  }
  return [space](const State& rho) -> std::optional<double> {
    const auto ds = enumerate_pdp_decompositions(rho, *space);
    const auto verdict = check_entropy_uniqueness(ds);
    if (verdict.kind != UniquenessKind::Unique) return std::nullopt;
    return verdict.entropy();
  };
}

namespace {
double require_entropy(const EntropyOracle& entropy, const State& rho) {
  const auto h = entropy(rho);
  if (!h) {
    throw std::runtime_error("spectral entropy undefined or non-unique at the given state");
  }
  return *h;
}
}  // namespace

bool concavity_check(const State& rho1, const State& rho2, double p,
                     const EntropyOracle& entropy, double slack) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("concavity_check: p outside [0, 1]");
  if (rho1.space() != rho2.space()) {
    throw std::invalid_argument("concavity_check: states from different spaces");
  }
  const State mix(p * rho1.coords() + (1.0 - p) * rho2.coords(), rho1.space());
  const double lhs = require_entropy(entropy, mix);
  const double rhs = p * require_entropy(entropy, rho1) +
                     (1.0 - p) * require_entropy(entropy, rho2);
  return lhs >= rhs - slack;
}

double info_gain(const State& rho, const GenericInstrument& instr,
                 const EntropyOracle& entropy) {
  double gain = require_entropy(entropy, rho);
  for (int j = 0; j < instr.num_outcomes(); ++j) {
    const SubState out = apply(instr, j, rho);
    if (out.weight <= kZeroProb) continue;
    const State omega(out.normalized(), rho.space());
    gain -= out.weight * require_entropy(entropy, omega);
  }
  return gain;
}

MonotonicityVerdict monotonicity_check(const State& rho, const GenericInstrument& t,
                                       const GenericInstrument& s,
                                       const EntropyOracle& entropy, double slack) {
  if (!groenewold_majorizes(t, s, rho)) return MonotonicityVerdict::NotComparable;
  const double gain_t = info_gain(rho, t, entropy);
  const double gain_s = info_gain(rho, s, entropy);
  return gain_t >= gain_s - slack ? MonotonicityVerdict::Holds
                                  : MonotonicityVerdict::Violated;
}

void write_work_curve_csv(std::ostream& out, const PDPDecomposition& decomp_q,
                          const PDPDecomposition& decomp_p, long N, double T,
                          double k_B, int steps) {
  out << "leg,chamber,progress,volume_fraction,cumulative_work\n";
  const double scale = static_cast<double>(N) * k_B * T;
  const auto emit = [&](const char* leg, const Eigen::VectorXd& probs, bool separating) {
    for (int j = 0; j < probs.size(); ++j) {
      const double q = probs(j);
      for (int s = 0; s <= steps; ++s) {
        const double tfrac = static_cast<double>(s) / steps;
        double volume, work;
        if (separating) {
          // chamber compresses V -> qV; invested work is positive
          volume = 1.0 + (q - 1.0) * tfrac;
          work = -q * scale * std::log(volume);
        } else {
          // chamber expands qV -> V; extracted work is positive
          volume = q + (1.0 - q) * tfrac;
          work = q * scale * std::log(volume / q);
        }
        out << leg << ',' << j << ',' << tfrac << ',' << volume << ',' << work << '\n';
      }
    }
  };
  emit("separation", decomp_q.probs, true);
  emit("mixing", decomp_p.probs, false);
}

}  // namespace gpt
