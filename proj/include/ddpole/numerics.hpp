#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "ddpole/types.hpp"

namespace ddpole {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;
using Index = Eigen::Index;

namespace numerics {

// Rank at the relative SVD threshold; 0 for the zero matrix.
Index numerical_rank(const CMatrix& m, const Tolerance& tol = {});
Index numerical_rank(const Matrix& m, const Tolerance& tol = {});

// Orthonormal basis of the right nullspace; cols(m) - numerical_rank(m) columns.
CMatrix nullspace_basis(const CMatrix& m, const Tolerance& tol = {});
Matrix nullspace_basis(const Matrix& m, const Tolerance& tol = {});

// Moore-Penrose pseudoinverse, rank decided at the same relative threshold.
CMatrix pseudoinverse(const CMatrix& m, const Tolerance& tol = {});
Matrix pseudoinverse(const Matrix& m, const Tolerance& tol = {});

struct Eigendecomposition {
    CVector values;  // sorted by real part, then imaginary part
    CMatrix vectors; // unit-norm columns, same order as values
};

Eigendecomposition eigendecomposition(const CMatrix& m);
Eigendecomposition eigendecomposition(const Matrix& m);

// Sorted eigenvalues only.
CVector eigenvalues(const Matrix& m);
double spectral_radius(const Matrix& m);

// Wilkinson condition number ||x|| ||y|| / |y^* x| of the eigenvalue at the
// given index (indices follow the sorted order of eigendecomposition).
// The eigenvalue must be simple.
double eigenvalue_condition_number(const CMatrix& m, Index index, const Tolerance& tol = {});
double eigenvalue_condition_number(const Matrix& m, Index index, const Tolerance& tol = {});

// Orthonormal basis of the column range at the rank tolerance.
Matrix range_basis(const Matrix& m, const Tolerance& tol = {});

void require_finite(const Matrix& m, const char* what);
void require_finite(const CMatrix& m, const char* what);

} // namespace numerics

// Permutation-invariant distance between two pole multisets: the assignment
// that minimizes the maximum pairwise |desired - achieved| distance.
struct PoleMatch {
    double max_error = 0.0;  // optimal-assignment max deviation
    double mean_error = 0.0; // mean deviation under the same assignment
};

PoleMatch match_pole_sets(const CVector& desired, const CVector& achieved);

} // namespace ddpole
