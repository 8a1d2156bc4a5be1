#include "ddpole/plant.hpp"

#include <cmath>
#include <random>

namespace ddpole {

void LtiSystem::validate(const Tolerance& tol) const {
    if (A.rows() != A.cols()) {
        throw Error(ErrorKind::invalid_input, "system: A must be square");
    }
    if (B.rows() != A.rows() || B.cols() < 1) {
        throw Error(ErrorKind::invalid_input, "system: B must be n x m with m >= 1");
    }
    numerics::require_finite(A, "system A");
    numerics::require_finite(B, "system B");
    if (numerics::numerical_rank(B, tol) < B.cols()) {
        throw Error(ErrorKind::invalid_input, "system: B must have full column rank");
    }
}

namespace plant {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Matrix randn(Index rows, Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < rows; ++i) {
            m(i, j) = dist(rng);
        }
    }
    return m;
}

} // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t state = master ^ (0xa0761d6478bd642fULL + stream * 0xe7037ed1a0b428dbULL);
    return splitmix64(state);
}

Trajectory simulate(const LtiSystem& sys, const SimulationConfig& cfg) {
    sys.validate();
    const Index n = sys.state_dim();
    const Index m = sys.input_dim();
    if (cfg.T < 2) {
        throw Error(ErrorKind::invalid_input, "simulate: horizon T must be at least 2");
    }
    if (cfg.noise_variance < 0.0) {
        throw Error(ErrorKind::invalid_input, "simulate: noise variance must be nonnegative");
    }
    Vector x0 = cfg.x0.size() > 0 ? cfg.x0 : Vector(Vector::Zero(n));
    if (x0.size() != n) {
        throw Error(ErrorKind::invalid_input, "simulate: x0 dimension mismatch");
    }

    std::mt19937_64 rng(cfg.seed);
    Matrix inputs;
    if (cfg.inputs) {
        if (cfg.inputs->rows() != m || cfg.inputs->cols() != cfg.T) {
            throw Error(ErrorKind::invalid_input, "simulate: supplied inputs must be m x T");
        }
        numerics::require_finite(*cfg.inputs, "simulate inputs");
        inputs = *cfg.inputs;
    } else {
        if (cfg.input_variance < 0.0) {
            throw Error(ErrorKind::invalid_input, "simulate: input variance must be nonnegative");
        }
        inputs = std::sqrt(cfg.input_variance) * randn(m, cfg.T, rng);
    }

    Matrix states(n, cfg.T);
    states.col(0) = x0;
    const double noise_std = std::sqrt(cfg.noise_variance);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (Index t = 0; t + 1 < cfg.T; ++t) {
        states.col(t + 1) = sys.A * states.col(t) + sys.B * inputs.col(t);
        if (noise_std > 0.0) {
            for (Index i = 0; i < n; ++i) {
                states(i, t + 1) += noise_std * noise(rng);
            }
        }
    }
    Trajectory traj{inputs, states};
    traj.validate();
    return traj;
}

bool is_controllable(const LtiSystem& sys, const Tolerance& tol) {
    sys.validate(tol);
    const Index n = sys.state_dim();
    const Index m = sys.input_dim();
    Matrix ctrb(n, n * m);
    Matrix block = sys.B;
    for (Index k = 0; k < n; ++k) {
        ctrb.middleCols(k * m, m) = block;
        block = sys.A * block;
    }
    return numerics::numerical_rank(ctrb, tol) == n;
}

LtiSystem random_controllable(Index n, std::uint64_t seed) {
    if (n < 2) {
        throw Error(ErrorKind::invalid_input, "random_controllable: require n >= 2");
    }
    return random_controllable(n, std::max<Index>(1, n / 2), seed);
}

LtiSystem random_controllable(Index n, Index m, std::uint64_t seed) {
    if (n < 1 || m < 1 || m > n) {
        throw Error(ErrorKind::invalid_input, "random_controllable: require 1 <= m <= n");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> radius(0.3, 0.95);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Matrix a = randn(n, n, rng);
        const double target = radius(rng);
        const double sr = numerics::spectral_radius(a);
        if (sr <= 0.0) {
            continue;
        }
        a *= target / sr;
        const Matrix b = randn(n, m, rng);
        LtiSystem sys{a, b};
        Tolerance tol;
        if (numerics::numerical_rank(b, tol) == m && is_controllable(sys, tol) &&
            numerics::spectral_radius(a) < 1.0) {
            return sys;
        }
    }
    throw Error(ErrorKind::numeric_failure, "random_controllable: sampling budget exhausted");
}

LtiSystem chemical_reactor() {
    Matrix a(4, 4);
    a << 6.9771, 2.0379, 5.0672, -2.2212,
        -0.6941, -0.0434, -0.4738, 0.3425,
        0.2048, 0.9081, 0.3159, 0.6172,
        -0.5082, 0.7106, -0.2000, 0.8531;
    Matrix bt(2, 4);
    bt << 4.8874, 1.4777, 5.0448, 4.6020,
        -6.5545, 0.5230, -1.1389, -0.1133;
    return LtiSystem{a, bt.transpose()};
}

LtiSystem closed_loop(const LtiSystem& sys, const Matrix& K) {
    sys.validate();
    if (K.rows() != sys.input_dim() || K.cols() != sys.state_dim()) {
        throw Error(ErrorKind::invalid_input, "closed_loop: K must be m x n");
    }
    numerics::require_finite(K, "closed_loop gain");
    return LtiSystem{sys.A - sys.B * K, sys.B};
}

} // namespace plant

} // namespace ddpole
