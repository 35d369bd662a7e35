#pragma once

#include "gaussdaemon/daemonic.hpp"
#include "gaussdaemon/general_dyne.hpp"
#include "gaussdaemon/rng.hpp"
#include "gaussdaemon/symplectic.hpp"

namespace gaussdaemon {

/// Product of random rotations, single-mode squeezers (|log z| <= max_log_squeeze)
/// and beam splitters between every pair of modes.
Matrix random_symplectic(std::size_t modes, RngStream& rng, double max_log_squeeze = 1.0);

/// S (nu_j I) S^T with nu_j in [1, 1 + max_excess] and a random mean.
GaussianState random_state(std::size_t modes, RngStream& rng, double max_excess = 3.0,
                           double max_log_squeeze = 1.0, double max_mean = 1.0);

/// Standard form of a random two-mode state.
TwoModeStandardForm random_standard_form(RngStream& rng);

/// Heterodyne, homodyne, efficient or inefficient general-dyne with equal odds.
GeneralDyneSetting random_setting(RngStream& rng);
GeneralDyneSetting random_efficient_setting(RngStream& rng);

}  // namespace gaussdaemon
