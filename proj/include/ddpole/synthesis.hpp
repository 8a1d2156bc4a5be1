#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ddpole/signals.hpp"

namespace ddpole {

// Desired closed-loop spectrum, closed under complex conjugation.
// Multiplicities are implied by repetition. When eigenvectors are supplied,
// column i is the desired eigenvector for poles[i], and conjugate pole pairs
// must carry conjugate columns so that a real gain can exist.
struct PoleSpec {
    std::vector<Complex> poles;
    std::optional<CMatrix> eigenvectors;
};

struct GainResult {
    Matrix K;                 // real m x n feedback gain, u = -K x
    Matrix M;                 // real (T-1) x n matrix of the construction
    CVector achieved_spectrum;
    double placement_error = 0.0; // max over desired poles of min distance to achieved
    double eigvec_condition = 0.0;
    std::vector<double> per_pole_condition; // Wilkinson condition numbers (NaN where repeated)
    double data_consistency_residual = 0.0; // ||X1 - [A B][X0;U0]||_F of the best-fit model
};

struct FeasibilityReport {
    bool feasible = false;
    Matrix range_basis; // orthonormal basis of R{ X1 [X0;U0]^+ [0; I_m] }
    double residual = 0.0; // norm of the component of dA outside the range
};

struct ClosedLoopDiagnostics {
    double eigvec_condition = 0.0;
    std::vector<double> per_pole_condition;
};

namespace synthesis {

// Data-driven pole placement: K = -U0 M (X0 M)^+ with the columns of M drawn
// from the nullspaces of (X1 - lambda_i X0). Requires the d = 1 Fundamental
// Lemma rank condition and every pole multiplicity <= m.
GainResult place_poles(const DataMatrices& dm, const PoleSpec& spec, const Tolerance& tol = {},
                       std::uint64_t seed = 0);

// Data-driven eigenstructure assignment: additionally enforces X0 M = X.
GainResult assign_eigenstructure(const DataMatrices& dm, const PoleSpec& spec,
                                 const Tolerance& tol = {});

// Model-assisted feasibility test: the requested eigenstructure is achievable
// iff dA = A - X Lambda X^{-1} lies in the data-computed range of B.
FeasibilityReport feasibility_report(const DataMatrices& dm, const Matrix& A,
                                     const PoleSpec& spec, const Tolerance& tol = {});

// Conditioning of a known closed-loop matrix: eigenvector-matrix condition
// number plus per-eigenvalue Wilkinson condition numbers.
ClosedLoopDiagnostics diagnostics(const Matrix& closed_loop_A, const Tolerance& tol = {});

// Shared validation helper: groups poles into conjugate-closed cells.
struct PoleCell {
    Complex value;
    Index multiplicity = 0;
    bool complex_pair = false; // value has positive imaginary part; conjugate implied
};

std::vector<PoleCell> group_poles(const std::vector<Complex>& poles, Index m,
                                  bool enforce_multiplicity);

} // namespace synthesis

} // namespace ddpole
