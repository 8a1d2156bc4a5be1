#pragma once

#include "ddpole/plant.hpp"
#include "ddpole/synthesis.hpp"

namespace ddpole {

struct IdentifiedModel {
    Matrix A_hat;
    Matrix B_hat;
    double residual = 0.0; // Frobenius norm of X1 - [A_hat B_hat][X0; U0]

    LtiSystem system() const { return LtiSystem{A_hat, B_hat}; }
};

namespace baselines {

// Least-squares model fit; requires rank [X0; U0] = n + m.
IdentifiedModel identify_least_squares(const DataMatrices& dm, const Tolerance& tol = {});

// Model-based eigenstructure-assignment gains. All adopt the convention
// u = -K x, so (A - B K) X = X Lambda on feasible inputs. Column i of X is
// the desired eigenvector for poles(i).

// Orthogonal-factor formula: K = Z^{-1} Q0^T (A - X Lambda X^{-1}) with
// B = Q0 Z from a QR factorization.
Matrix kautsky_gain(const LtiSystem& sys, const CVector& poles, const CMatrix& X,
                    const Tolerance& tol = {});

// Sylvester-equation formula: G from A X - X Lambda + B G = 0, K = -G X^{-1}.
// Requires the spectra of A and Lambda to be disjoint.
Matrix sylvester_gain(const LtiSystem& sys, const CVector& poles, const CMatrix& X,
                      const Tolerance& tol = {});

// Projector formula: K = B^+ (A - X Lambda X^{-1}), valid when
// (I - B B^+)(X Lambda - A X) = 0.
Matrix projector_gain(const LtiSystem& sys, const CVector& poles, const CMatrix& X,
                      const Tolerance& tol = {});

// Single-input placement oracle: K = e_n^T C^{-1} p(A).
Matrix ackermann_gain(const LtiSystem& sys, const CVector& poles, const Tolerance& tol = {});

// Multi-input placement: eigenvectors picked per pole from the assignable
// subspaces, conditioning improved by reorthogonalization sweeps.
Matrix model_based_place(const LtiSystem& sys, const CVector& poles, const Tolerance& tol = {});

// Basis of the assignable-eigenvector subspace for a single pole:
// N{ U1^H (A - lambda I) } with U1 spanning the orthogonal complement of R{B}.
CMatrix assignable_subspace(const LtiSystem& sys, Complex lambda, const Tolerance& tol = {});

} // namespace baselines

} // namespace ddpole
