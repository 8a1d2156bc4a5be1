#include "ddpole/signals.hpp"

namespace ddpole {

void Trajectory::validate() const {
    if (inputs.cols() != states.cols()) {
        throw Error(ErrorKind::invalid_input, "trajectory: inputs and states must have equal length");
    }
    if (states.cols() < 2) {
        throw Error(ErrorKind::invalid_input, "trajectory: length must be at least 2");
    }
    if (inputs.rows() < 1 || states.rows() < 1) {
        throw Error(ErrorKind::invalid_input, "trajectory: empty input or state dimension");
    }
    numerics::require_finite(inputs, "trajectory inputs");
    numerics::require_finite(states, "trajectory states");
}

Matrix DataMatrices::stacked() const {
    Matrix s(X0.rows() + U0.rows(), X0.cols());
    s.topRows(X0.rows()) = X0;
    s.bottomRows(U0.rows()) = U0;
    return s;
}

namespace signals {

Matrix hankel(const Matrix& signal, Index L) {
    numerics::require_finite(signal, "hankel signal");
    const Index sigma = signal.rows();
    const Index T = signal.cols();
    if (L < 1 || L > T) {
        throw Error(ErrorKind::invalid_input, "hankel: require 1 <= L <= T");
    }
    Matrix h(L * sigma, T - L + 1);
    for (Index i = 0; i < L; ++i) {
        h.middleRows(i * sigma, sigma) = signal.middleCols(i, T - L + 1);
    }
    return h;
}

PeReport is_persistently_exciting(const Matrix& signal, Index L, const Tolerance& tol) {
    if (signal.cols() < 1) {
        throw Error(ErrorKind::invalid_input, "is_persistently_exciting: empty signal");
    }
    PeReport report;
    report.required_rank = signal.rows() * L;
    if (L > signal.cols()) {
        report.rows = report.required_rank;
        report.cols = signal.cols() - L + 1;
        report.enough_columns = false;
        return report;
    }
    const Matrix h = hankel(signal, L);
    report.rows = h.rows();
    report.cols = h.cols();
    report.enough_columns = h.cols() >= h.rows();
    report.rank = numerics::numerical_rank(h, tol);
    report.persistently_exciting = report.enough_columns && report.rank == report.required_rank;
    return report;
}

DataMatrices extract_data_matrices(const Trajectory& traj) {
    traj.validate();
    const Index T = traj.length();
    DataMatrices dm;
    dm.U0 = traj.inputs.leftCols(T - 1);
    dm.X0 = traj.states.leftCols(T - 1);
    dm.X1 = traj.states.rightCols(T - 1);
    return dm;
}

bool fundamental_lemma_check(const DataMatrices& dm, const Tolerance& tol) {
    const Index n = dm.state_dim();
    const Index m = dm.input_dim();
    if (dm.samples() < n + m) {
        return false;
    }
    return numerics::numerical_rank(dm.stacked(), tol) == n + m;
}

bool fundamental_lemma_check(const DataMatrices& dm, Index d, const Trajectory& traj,
                             const Tolerance& tol) {
    if (d < 1) {
        throw Error(ErrorKind::invalid_input, "fundamental_lemma_check: require d >= 1");
    }
    if (d == 1) {
        return fundamental_lemma_check(dm, tol);
    }
    traj.validate();
    const Index n = traj.state_dim();
    const Index m = traj.input_dim();
    const Index T = traj.length();
    if (T - d + 1 < n + d * m) {
        return false;
    }
    const Matrix hu = hankel(traj.inputs, d);
    Matrix stacked(n + hu.rows(), hu.cols());
    stacked.topRows(n) = traj.states.leftCols(hu.cols());
    stacked.bottomRows(hu.rows()) = hu;
    return numerics::numerical_rank(stacked, tol) == n + d * m;
}

} // namespace signals

} // namespace ddpole
