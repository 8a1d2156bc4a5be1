#pragma once

#include "ddpole/numerics.hpp"
#include "ddpole/types.hpp"

namespace ddpole {

// Finite input/state record of an experiment. Columns index time.
struct Trajectory {
    Matrix inputs; // m x T
    Matrix states; // n x T

    Index input_dim() const { return inputs.rows(); }
    Index state_dim() const { return states.rows(); }
    Index length() const { return states.cols(); }

    void validate() const;
};

// Shifted data blocks: U0 = [u(0)..u(T-2)], X0 = [x(0)..x(T-2)], X1 = [x(1)..x(T-1)].
struct DataMatrices {
    Matrix U0; // m x (T-1)
    Matrix X0; // n x (T-1)
    Matrix X1; // n x (T-1)

    Index input_dim() const { return U0.rows(); }
    Index state_dim() const { return X0.rows(); }
    Index samples() const { return X0.cols(); }

    // [X0; U0], the stacked data matrix of the Fundamental Lemma with d = 1.
    Matrix stacked() const;
};

namespace signals {

// Block-Hankel matrix with L block rows of a sigma x T signal; size
// L*sigma x (T-L+1).
Matrix hankel(const Matrix& signal, Index L);

struct PeReport {
    bool persistently_exciting = false;
    Index rank = 0;          // achieved numerical rank of the depth-L Hankel matrix
    Index required_rank = 0; // sigma * L
    Index rows = 0;
    Index cols = 0;
    bool enough_columns = true; // necessary condition T - L + 1 >= L*sigma
};

PeReport is_persistently_exciting(const Matrix& signal, Index L, const Tolerance& tol = {});

DataMatrices extract_data_matrices(const Trajectory& traj);

// Rank condition of the Fundamental Lemma: with d = 1, rank [X0; U0] = n + m;
// for d > 1, rank of the stacked state/input Hankel matrices equals n + d*m.
bool fundamental_lemma_check(const DataMatrices& dm, Index d, const Trajectory& traj,
                             const Tolerance& tol = {});

// d = 1 variant needing only the data blocks.
bool fundamental_lemma_check(const DataMatrices& dm, const Tolerance& tol = {});

} // namespace signals

} // namespace ddpole
