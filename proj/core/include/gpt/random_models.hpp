#pragma once

#include "gpt/instrument.hpp"
#include "gpt/rng.hpp"
#include "gpt/space.hpp"

namespace gpt {

/// Uniform (flat Dirichlet) point of a classical simplex.
State random_simplex_state(const SpacePtr& classical, Rng& rng);

/// Point on a uniformly chosen edge or diagonal of the square bit.
State random_square_bit_segment_state(const SpacePtr& square_bit, Rng& rng);

/// Qubit state with Bloch radius drawn uniformly in [0, max_radius].
State random_qubit_state(const SpacePtr& qubit, Rng& rng, double max_radius = 1.0);

/// Column-stochastic |rows| x |cols| kernel with Dirichlet columns.
ConditionalKernel random_kernel(int rows, int cols, Rng& rng);

/// Fully generic classical instrument: nonnegative event matrices summing to
/// a stochastic channel. Outputs at interior states are typically mixed.
GenericInstrument random_classical_instrument(const SpacePtr& classical, int outcomes,
                                              Rng& rng);

/// Random qubit POVM (Hermitian-square construction) preparing random pure
/// states: a measure-and-prepare-pure instrument.
MPPInstrument random_qubit_mpp(const SpacePtr& qubit, int outcomes, Rng& rng);

/// Like random_qubit_mpp but preparing deliberately mixed states (Bloch
/// radius <= max_purity_radius < 1), for refinement trials.
GenericInstrument random_qubit_measure_prepare_mixed(const SpacePtr& qubit, int outcomes,
                                                     Rng& rng,
                                                     double max_purity_radius = 0.7);

}  // namespace gpt
