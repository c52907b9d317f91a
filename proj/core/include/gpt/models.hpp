#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gpt/decomposition.hpp"
#include "gpt/herm.hpp"
#include "gpt/rng.hpp"
#include "gpt/space.hpp"

namespace gpt {

/// n-outcome classical theory: the probability simplex with vertex
/// indicators; unit is the coordinate sum.
SpacePtr make_classical(int n);

/// Qubit as a matrix model on the Bloch ball (decisive membership, spectral
/// entropy, eigendecomposition refinement).
SpacePtr make_qubit();

/// Square bit: 4 vertices (+-1, +-1, 1), unit = z coordinate.
SpacePtr make_square_bit();

/// Convex hull of two-qubit product pure states. Membership is certified by
/// randomized column generation (Member/Unknown, never NotMember); effect
/// validity by product-state minimization.
SpacePtr make_sep22();

/// Pure product state of two qubits, tracked by its local Bloch vectors.
struct ProductPureState {
  Eigen::Vector3d bloch_a;
  Eigen::Vector3d bloch_b;
  HermMat matrix;

  static ProductPureState from_bloch(const Eigen::Vector3d& a, const Eigen::Vector3d& b);
  static ProductPureState random(Rng& rng);
};

/// Perfect distinguishability of two product pure states inside the
/// product-state theory: Tr{rhoA1 rhoA2} + Tr{rhoB1 rhoB2} <= 1, boundary
/// included (tolerance 1e-12).
bool sep_distinguishable(const ProductPureState& p, const ProductPureState& q);

/// Linear automorphism of the product-state theory: local unitaries with
/// optional local transposes, optionally followed by the factor swap.
struct SepAutomorphism {
  Eigen::Matrix2cd unitary_a = Eigen::Matrix2cd::Identity();
  Eigen::Matrix2cd unitary_b = Eigen::Matrix2cd::Identity();
  bool transpose_a = false;
  bool transpose_b = false;
  bool swap_factors = false;

  static SepAutomorphism identity() { return {}; }
  static SepAutomorphism random(Rng& rng);
  /// Local rotations sending the product state p onto q (no transposes/swap).
  static SepAutomorphism rotation_between(const ProductPureState& p,
                                          const ProductPureState& q);
};

/// Applies the automorphism to a two-qubit Hermitian matrix (dim 4 required).
HermMat apply_sep_automorphism(const SepAutomorphism& f, const HermMat& rho);

struct TwoSymmetryReport {
  double pair_inner_rho = 0.0;    // Tr{rho1 rho2}
  double pair_inner_sigma = 0.0;  // Tr{sigma1 sigma2}
  double lemma_sum_rho = 0.0;     // distinguishability criterion sums
  double lemma_sum_sigma = 0.0;
  bool rho_pair_distinguishable = false;
  bool sigma_pair_distinguishable = false;
  double max_invariance_dev = 0.0;
  int automorphism_samples = 0;
  bool one_symmetry_ok = false;
  double gap = 0.0;  // |pair_inner_rho - pair_inner_sigma|

  enum class Verdict { NotTwoSymmetric, Inconclusive } verdict = Verdict::Inconclusive;
};

/// Certifies that no theory automorphism can map one distinguishable pair
/// onto the other: automorphisms preserve the pairwise overlap (sampled), and
/// the two pairs have different overlaps. Single states, by contrast, are
/// always connected by explicit local rotations.
TwoSymmetryReport verify_not_2_symmetric(const ProductPureState& rho1,
                                         const ProductPureState& rho2,
                                         const ProductPureState& sigma1,
                                         const ProductPureState& sigma2,
                                         std::uint64_t seed = 1,
                                         int automorphism_samples = 100);
/// Default quadruple: rho pair {|00>, |++>}, sigma pair {|00>, |11>}.
TwoSymmetryReport verify_not_2_symmetric(std::uint64_t seed = 1,
                                         int automorphism_samples = 100);

/// min over pure product states of Tr{E (rhoA x rhoB)}: alternating
/// closed-form descent from random restarts, cross-checked against a
/// deterministic grid over both Bloch spheres; returns the smaller estimate.
double min_over_product_states(const HermMat& op, std::uint64_t seed = 1,
                               int restarts = 64, int grid = 30);

/// Extended two-qubit model: product-state hull joined with two orthogonal
/// entangled pure states, together with the witness measurement and the two
/// inequivalent decompositions of their common mixture. All stored
/// invariants are verified at load; the fixture is built once and cached.
struct OmegaBarFixture {
  SpacePtr space;
  HermMat rho1, rho2;      // product pair
  HermMat sigma1, sigma2;  // entangled orthogonal pair
  HermMat op_e1, op_e2;    // measurement operators separating rho1/rho2
  HermMat rho_mix;         // common mixture of both decompositions
  PDPDecomposition decomp_q;  // over {rho1, rho2}, witnessed by (e1, e2)
  PDPDecomposition decomp_p;  // over {sigma1, sigma2}, projective witness

  State mix_state() const { return State(space->coords_of(rho_mix), space); }
};

const OmegaBarFixture& load_omega_bar();

/// Model lookup by CLI name: "classical:n", "qubit", "square-bit", "sep22",
/// "omega-bar".
SpacePtr parse_model(const std::string& name);

}  // namespace gpt
