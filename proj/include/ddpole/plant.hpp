#pragma once

#include <cstdint>
#include <optional>

#include "ddpole/signals.hpp"

namespace ddpole {

// Discrete-time system x(t+1) = A x(t) + B u(t); B has full column rank.
struct LtiSystem {
    Matrix A; // n x n
    Matrix B; // n x m

    Index state_dim() const { return A.rows(); }
    Index input_dim() const { return B.cols(); }

    void validate(const Tolerance& tol = {}) const;
};

struct SimulationConfig {
    Index T = 2;
    Vector x0;                    // defaults to zero when empty
    double input_variance = 1.0;  // i.i.d. Gaussian input u(t) ~ N(0, variance * I)
    std::optional<Matrix> inputs; // user-supplied m x T input overrides the Gaussian draw
    double noise_variance = 0.0;  // process noise e(t) ~ N(0, sigma_e^2 * I)
    std::uint64_t seed = 0;
};

namespace plant {

// Deterministic per-stream seed derivation (splitmix64 mixing).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

Trajectory simulate(const LtiSystem& sys, const SimulationConfig& cfg);

bool is_controllable(const LtiSystem& sys, const Tolerance& tol = {});

// Random (A, B): spectral radius of A inside the unit circle, controllable,
// m = floor(n/2). Rejection-samples up to 1000 draws.
LtiSystem random_controllable(Index n, std::uint64_t seed);
LtiSystem random_controllable(Index n, Index m, std::uint64_t seed);

// The discretized 4-state, 2-input chemical reactor benchmark plant.
LtiSystem chemical_reactor();

// (A - B K, B) under the feedback convention u = -K x + v.
LtiSystem closed_loop(const LtiSystem& sys, const Matrix& K);

} // namespace plant

} // namespace ddpole
