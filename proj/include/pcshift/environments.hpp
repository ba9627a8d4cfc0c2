#pragma once

// Utility-stream generators on [0,1]. Every generator is a deterministic
// function of its parameters and the rng it is handed.

#include <cstddef>
#include <span>
#include <vector>

#include "pcshift/piecewise.hpp"
#include "pcshift/stream.hpp"

namespace pcshift {

/// u0 = 1 on [0, 1/2), 0 on [1/2, 1].
PiecewiseConstant left_step();
/// u1 = 0 on [0, 1/2), 1 on [1/2, 1].
PiecewiseConstant right_step();

/// 1 on [lo, hi), 0 elsewhere; lo = 0 or hi = 1 drop the matching breakpoint.
PiecewiseConstant box(double lo, double hi);

/// T/2 copies of u0 followed by T/2 copies of u1. T must be even.
UtilityStream counterexample_stream(std::size_t T);

/// Blocks of `block` rounds alternating u0, u1, u0, ...; the final block
/// may be short.
UtilityStream alternating_stream(std::size_t T, std::size_t block);

/// Each round is u0 or u1 with probability 1/2. T must be divisible by s.
UtilityStream two_expert_stream(std::size_t T, std::size_t s, Rng& rng);

/// Up to K uniform breakpoints per round (the count itself is uniform on
/// 0..K) with iid uniform [0, H] values. quantum > 0 rounds values down to
/// multiples of quantum, which keeps payoff sums exact when it is dyadic.
UtilityStream random_stream(std::size_t T, std::size_t K, double H, Rng& rng,
                            double quantum = 0.0);

/// Adversarial stream with s phases. In each phase the functions pay 1 on
/// a random side of a discontinuity inside the phase interval (points
/// T^-beta apart in the middle band), then a halving block pays 1 on a
/// random half of the best sub-interval so far. The next phase moves into
/// the widest gap between discontinuities. Requires beta > log(3s)/log(T).
/// Phase records land in provenance["phases"].
UtilityStream lower_bound_stream(std::size_t T, std::size_t s, double beta, Rng& rng);

/// For each epsilon, the largest number of functions that have at least one
/// discontinuity in a common open ball (rho - eps, rho + eps).
std::vector<std::size_t> dispersion_profile(std::span<const PiecewiseConstant> stream,
                                            std::span<const double> epsilons);

}  // namespace pcshift
