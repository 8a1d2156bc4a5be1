#include "ddpole/synthesis.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace ddpole {
namespace synthesis {

namespace {

constexpr double kPoleMatchTol = 1e-9;

bool approx_equal(Complex a, Complex b) {
    return std::abs(a - b) <= kPoleMatchTol * (1.0 + std::abs(a));
}

bool is_real_pole(Complex p) {
    return std::abs(p.imag()) <= kPoleMatchTol * (1.0 + std::abs(p));
}

// Best data-consistent model, used only for verification diagnostics.
void finalize_diagnostics(GainResult& result, const DataMatrices& dm,
                          const std::vector<Complex>& desired, const Tolerance& tol) {
    const Matrix stacked = dm.stacked();
    const Matrix ab = dm.X1 * numerics::pseudoinverse(stacked, tol);
    result.data_consistency_residual = (dm.X1 - ab * stacked).norm();
    const Index n = dm.state_dim();
    const Matrix a_hat = ab.leftCols(n);
    const Matrix b_hat = ab.rightCols(dm.input_dim());
    const Matrix acl = a_hat - b_hat * result.K;

    const auto eig = numerics::eigendecomposition(acl);
    result.achieved_spectrum = eig.values;

    double worst = 0.0;
    for (const Complex& want : desired) {
        double best = std::numeric_limits<double>::infinity();
        for (Index j = 0; j < eig.values.size(); ++j) {
            best = std::min(best, std::abs(want - eig.values(j)));
        }
        worst = std::max(worst, best);
    }
    result.placement_error = worst;

    Eigen::JacobiSVD<CMatrix> svd(eig.vectors);
    const auto& s = svd.singularValues();
    const double smin = s(s.size() - 1);
    result.eigvec_condition =
        smin > 0.0 ? s(0) / smin : std::numeric_limits<double>::infinity();

    result.per_pole_condition.assign(static_cast<size_t>(n),
                                     std::numeric_limits<double>::quiet_NaN());
    if (smin > tol.rel_rank_tol * s(0)) {
        const CMatrix inv = eig.vectors.inverse();
        const double scale = std::max(1.0, eig.values.cwiseAbs().maxCoeff());
        for (Index i = 0; i < n; ++i) {
            bool simple = true;
            for (Index j = 0; j < n && simple; ++j) {
                simple = (j == i) || std::abs(eig.values(j) - eig.values(i)) > 1e-8 * scale;
            }
            if (simple) {
                result.per_pole_condition[static_cast<size_t>(i)] =
                    std::max(1.0, eig.vectors.col(i).norm() * inv.row(i).norm());
            }
        }
    }
}

Matrix compute_gain(const DataMatrices& dm, const Matrix& M, const Tolerance& tol) {
    const Matrix x0m = dm.X0 * M;
    if (numerics::numerical_rank(Matrix(M), tol) < dm.state_dim() ||
        numerics::numerical_rank(x0m, tol) < dm.state_dim()) {
        throw Error(ErrorKind::numeric_failure,
                    "synthesis: constructed M lost rank; data may be ill-conditioned");
    }
    Matrix K = -(dm.U0 * M) * numerics::pseudoinverse(x0m, tol);
    numerics::require_finite(K, "synthesis gain");
    return K;
}

void check_data_rank(const DataMatrices& dm, const Tolerance& tol) {
    if (!signals::fundamental_lemma_check(dm, tol)) {
        throw Error(ErrorKind::insufficient_data,
                    "synthesis: rank [X0; U0] < n + m; input is not sufficiently exciting");
    }
}

} // namespace

std::vector<PoleCell> group_poles(const std::vector<Complex>& poles, Index m,
                                  bool enforce_multiplicity) {
    if (poles.empty()) {
        throw Error(ErrorKind::invalid_input, "pole spec: empty pole set");
    }
    for (const Complex& p : poles) {
        if (!std::isfinite(p.real()) || !std::isfinite(p.imag())) {
            throw Error(ErrorKind::invalid_input, "pole spec: non-finite pole");
        }
    }
    std::vector<PoleCell> cells;
    std::vector<bool> consumed(poles.size(), false);
    for (size_t i = 0; i < poles.size(); ++i) {
        if (consumed[i]) {
            continue;
        }
        PoleCell cell;
        cell.value = poles[i];
        for (size_t j = i; j < poles.size(); ++j) {
            if (!consumed[j] && approx_equal(poles[j], poles[i])) {
                consumed[j] = true;
                ++cell.multiplicity;
            }
        }
        if (is_real_pole(cell.value)) {
            cell.value = Complex(cell.value.real(), 0.0);
        } else {
            cell.complex_pair = true;
            if (cell.value.imag() < 0.0) {
                cell.value = std::conj(cell.value);
            }
            // Consume the conjugate partners; multiplicities must match.
            Index partner = 0;
            for (size_t j = 0; j < poles.size(); ++j) {
                if (!consumed[j] && approx_equal(poles[j], std::conj(cell.value))) {
                    consumed[j] = true;
                    ++partner;
                }
            }
            if (partner != cell.multiplicity) {
                throw Error(ErrorKind::invalid_input,
                            "pole spec: not closed under complex conjugation");
            }
        }
        if (enforce_multiplicity && cell.multiplicity > m) {
            throw Error(ErrorKind::infeasible,
                        "pole spec: multiplicity exceeds the input dimension m");
        }
        cells.push_back(cell);
    }
    return cells;
}

GainResult place_poles(const DataMatrices& dm, const PoleSpec& spec, const Tolerance& tol,
                       std::uint64_t seed) {
    tol.validate();
    if (spec.eigenvectors) {
        throw Error(ErrorKind::invalid_input,
                    "place_poles: eigenvector matrix given; use assign_eigenstructure");
    }
    const Index n = dm.state_dim();
    const Index m = dm.input_dim();
    const Index cols = dm.samples();
    if (static_cast<Index>(spec.poles.size()) != n) {
        throw Error(ErrorKind::invalid_input, "place_poles: pole count must equal n");
    }
    const auto cells = group_poles(spec.poles, m, /*enforce_multiplicity=*/true);
    check_data_rank(dm, tol);

    const Matrix stacked = dm.stacked();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    Matrix M = Matrix::Zero(cols, n);
    Index filled = 0;
    constexpr int kRedrawCap = 50;
    // Candidates drawn per column before the greedy pick: each column keeps
    // the draw adding the largest component orthogonal to span(X0 M). This
    // both enforces rank growth and keeps X0 M well conditioned, which is
    // what limits the noise sensitivity of the final gain.
    constexpr int kSelectionDraws = 8;

    Matrix q_basis(n, 0); // orthonormal basis of the selected X0 M columns

    auto orthogonal_part = [&](const Vector& state) {
        if (q_basis.cols() == 0) {
            return state;
        }
        return Vector(state - q_basis * (q_basis.transpose() * state));
    };
    auto absorb = [&](const Vector& state) {
        const Vector ortho = orthogonal_part(state);
        if (ortho.norm() > 0.0) {
            q_basis.conservativeResize(n, q_basis.cols() + 1);
            q_basis.col(q_basis.cols() - 1) = ortho.normalized();
        }
    };
    auto rank_after = [&](const Matrix& candidate_cols) {
        Matrix trial = dm.X0 * M.leftCols(filled + candidate_cols.cols());
        trial.rightCols(candidate_cols.cols()) = dm.X0 * candidate_cols;
        return numerics::numerical_rank(trial, tol);
    };

    for (const PoleCell& cell : cells) {
        if (!cell.complex_pair) {
            const Matrix shifted = dm.X1 - cell.value.real() * dm.X0;
            const Matrix basis = numerics::nullspace_basis(shifted, tol);
            if (basis.cols() == 0) {
                throw Error(ErrorKind::infeasible,
                            "place_poles: (X1 - lambda X0) has trivial nullspace; data is "
                            "inconsistent with a controllable pair");
            }
            for (Index k = 0; k < cell.multiplicity; ++k) {
                bool accepted = false;
                int attempt = 0;
                while (attempt < kRedrawCap && !accepted) {
                    double best_score = -1.0;
                    Vector best;
                    for (int d = 0; d < kSelectionDraws && attempt < kRedrawCap; ++d, ++attempt) {
                        Vector c(basis.cols());
                        for (Index i = 0; i < c.size(); ++i) {
                            c(i) = gauss(rng);
                        }
                        Vector v = basis * c;
                        const double vnorm = v.norm();
                        if (vnorm <= 0.0) {
                            continue;
                        }
                        v /= vnorm;
                        // Directions in the nullspace of the data itself add nothing.
                        if ((stacked * v).norm() <= tol.residual_tol) {
                            continue;
                        }
                        const double score = orthogonal_part(dm.X0 * v).norm();
                        if (score > best_score) {
                            best_score = score;
                            best = v;
                        }
                    }
                    if (best_score >= 0.0 && rank_after(best) == filled + 1) {
                        absorb(dm.X0 * best);
                        M.col(filled) = best;
                        ++filled;
                        accepted = true;
                    }
                }
                if (!accepted) {
                    throw Error(ErrorKind::numeric_failure,
                                "place_poles: no nullspace selection achieved full rank "
                                "within the re-draw cap");
                }
            }
        } else {
            const CMatrix shifted = dm.X1.cast<Complex>() - cell.value * dm.X0.cast<Complex>();
            const CMatrix basis = numerics::nullspace_basis(shifted, tol);
            if (basis.cols() == 0) {
                throw Error(ErrorKind::infeasible,
                            "place_poles: (X1 - lambda X0) has trivial nullspace; data is "
                            "inconsistent with a controllable pair");
            }
            for (Index k = 0; k < cell.multiplicity; ++k) {
                bool accepted = false;
                int attempt = 0;
                while (attempt < kRedrawCap && !accepted) {
                    double best_score = -1.0;
                    Matrix best;
                    for (int d = 0; d < kSelectionDraws && attempt < kRedrawCap; ++d, ++attempt) {
                        CVector c(basis.cols());
                        for (Index i = 0; i < c.size(); ++i) {
                            c(i) = Complex(gauss(rng), gauss(rng));
                        }
                        CVector v = basis * c;
                        const double vnorm = v.norm();
                        if (vnorm <= 0.0) {
                            continue;
                        }
                        v /= vnorm;
                        if ((stacked.cast<Complex>() * v).norm() <= tol.residual_tol) {
                            continue;
                        }
                        // Conjugate pair (lambda, conj lambda): the real columns
                        // (Re v, Im v) span the same invariant subspace.
                        Matrix pair(cols, 2);
                        pair.col(0) = v.real();
                        pair.col(1) = v.imag();
                        const Vector o1 = orthogonal_part(dm.X0 * pair.col(0));
                        Vector o2 = orthogonal_part(dm.X0 * pair.col(1));
                        if (o1.norm() > 0.0) {
                            const Vector q1 = o1.normalized();
                            o2 -= q1 * q1.dot(o2);
                        }
                        const double score = std::min(o1.norm(), o2.norm());
                        if (score > best_score) {
                            best_score = score;
                            best = pair;
                        }
                    }
                    if (best_score >= 0.0 && rank_after(best) == filled + 2) {
                        absorb(dm.X0 * best.col(0));
                        absorb(dm.X0 * best.col(1));
                        M.middleCols(filled, 2) = best;
                        filled += 2;
                        accepted = true;
                    }
                }
                if (!accepted) {
                    throw Error(ErrorKind::numeric_failure,
                                "place_poles: no nullspace selection achieved full rank "
                                "within the re-draw cap");
                }
            }
        }
    }

    GainResult result;
    result.M = M;
    result.K = compute_gain(dm, M, tol);
    finalize_diagnostics(result, dm, spec.poles, tol);
    return result;
}

GainResult assign_eigenstructure(const DataMatrices& dm, const PoleSpec& spec,
                                 const Tolerance& tol) {
    tol.validate();
    const Index n = dm.state_dim();
    const Index m = dm.input_dim();
    const Index cols = dm.samples();
    if (!spec.eigenvectors) {
        throw Error(ErrorKind::invalid_input, "assign_eigenstructure: eigenvector matrix required");
    }
    const CMatrix& X = *spec.eigenvectors;
    if (static_cast<Index>(spec.poles.size()) != n || X.rows() != n || X.cols() != n) {
        throw Error(ErrorKind::invalid_input,
                    "assign_eigenstructure: need n poles and an n x n eigenvector matrix");
    }
    numerics::require_finite(X, "eigenvector matrix");
    if (numerics::numerical_rank(X, tol) < n) {
        throw Error(ErrorKind::invalid_input, "assign_eigenstructure: X is singular");
    }
    group_poles(spec.poles, m, /*enforce_multiplicity=*/true);
    check_data_rank(dm, tol);

    Matrix M = Matrix::Zero(cols, n);
    std::vector<bool> done(spec.poles.size(), false);

    auto solve_column = [&](Complex lambda, const CVector& x) -> CVector {
        CMatrix lhs(2 * n, cols);
        lhs.topRows(n) = dm.X1.cast<Complex>() - lambda * dm.X0.cast<Complex>();
        lhs.bottomRows(n) = dm.X0.cast<Complex>();
        CVector rhs = CVector::Zero(2 * n);
        rhs.tail(n) = x;
        const CVector mi = numerics::pseudoinverse(lhs, tol) * rhs;
        const double residual = (lhs * mi - rhs).norm();
        if (residual > tol.residual_tol * (1.0 + x.norm())) {
            throw Error(ErrorKind::infeasible,
                        "assign_eigenstructure: requested eigenvector is not achievable "
                        "(outside the assignable subspace)");
        }
        return mi;
    };

    Index filled = 0;
    for (size_t i = 0; i < spec.poles.size(); ++i) {
        if (done[i]) {
            continue;
        }
        const Complex lambda = spec.poles[i];
        const CVector x = X.col(static_cast<Index>(i));
        if (is_real_pole(lambda)) {
            if (x.imag().norm() > kPoleMatchTol * (1.0 + x.norm())) {
                throw Error(ErrorKind::invalid_input,
                            "assign_eigenstructure: real pole paired with a complex eigenvector");
            }
            const CVector mi = solve_column(Complex(lambda.real(), 0.0), CVector(x.real().cast<Complex>()));
            M.col(filled++) = mi.real();
            done[i] = true;
        } else {
            // Locate the conjugate partner column.
            size_t partner = spec.poles.size();
            for (size_t j = i + 1; j < spec.poles.size(); ++j) {
                if (!done[j] && approx_equal(spec.poles[j], std::conj(lambda)) &&
                    (X.col(static_cast<Index>(j)) - x.conjugate()).norm() <=
                        kPoleMatchTol * (1.0 + x.norm())) {
                    partner = j;
                    break;
                }
            }
            if (partner == spec.poles.size()) {
                throw Error(ErrorKind::invalid_input,
                            "assign_eigenstructure: complex pole lacks a conjugate partner "
                            "with a conjugate eigenvector column");
            }
            const CVector mi = solve_column(lambda, x);
            M.col(filled) = mi.real();
            M.col(filled + 1) = mi.imag();
            filled += 2;
            done[i] = done[partner] = true;
        }
    }

    GainResult result;
    result.M = M;
    result.K = compute_gain(dm, M, tol);
    finalize_diagnostics(result, dm, spec.poles, tol);
    return result;
}

FeasibilityReport feasibility_report(const DataMatrices& dm, const Matrix& A,
                                     const PoleSpec& spec, const Tolerance& tol) {
    tol.validate();
    const Index n = dm.state_dim();
    const Index m = dm.input_dim();
    if (!spec.eigenvectors) {
        throw Error(ErrorKind::invalid_input, "feasibility_report: eigenvector matrix required");
    }
    const CMatrix& X = *spec.eigenvectors;
    if (A.rows() != n || A.cols() != n || X.rows() != n || X.cols() != n ||
        static_cast<Index>(spec.poles.size()) != n) {
        throw Error(ErrorKind::invalid_input, "feasibility_report: dimension mismatch");
    }
    numerics::require_finite(A, "feasibility_report A");
    if (numerics::numerical_rank(X, tol) < n) {
        throw Error(ErrorKind::invalid_input, "feasibility_report: X is singular");
    }
    check_data_rank(dm, tol);

    const Matrix pinv_stacked = numerics::pseudoinverse(dm.stacked(), tol);
    const Matrix image = dm.X1 * pinv_stacked.rightCols(m);

    FeasibilityReport report;
    report.range_basis = numerics::range_basis(image, tol);

    CVector lambda(n);
    for (Index i = 0; i < n; ++i) {
        lambda(i) = spec.poles[static_cast<size_t>(i)];
    }
    const CMatrix target = X * lambda.asDiagonal() * X.inverse();
    const Matrix delta_a = A - target.real();

    const Matrix outside =
        delta_a - report.range_basis * (report.range_basis.transpose() * delta_a);
    report.residual = outside.norm();
    // Scale against the matrices themselves, not against dA: a dA at the
    // rounding floor of A and X Lambda X^{-1} means the structure is already
    // (numerically) achieved, and a relative-to-dA test would reject it.
    const double scale = std::max(1.0, std::max(A.norm(), target.norm()));
    report.feasible = report.residual <= tol.residual_tol * scale;
    return report;
}

ClosedLoopDiagnostics diagnostics(const Matrix& closed_loop_A, const Tolerance& tol) {
    tol.validate();
    const auto eig = numerics::eigendecomposition(closed_loop_A);
    const Index n = closed_loop_A.rows();
    if (numerics::numerical_rank(eig.vectors, tol) < n) {
        throw Error(ErrorKind::numeric_failure,
                    "diagnostics: closed-loop matrix is defective (eigenvector matrix singular)");
    }
    ClosedLoopDiagnostics out;
    Eigen::JacobiSVD<CMatrix> svd(eig.vectors);
    out.eigvec_condition = svd.singularValues()(0) / svd.singularValues()(n - 1);
    const CMatrix inv = eig.vectors.inverse();
    out.per_pole_condition.resize(static_cast<size_t>(n));
    for (Index i = 0; i < n; ++i) {
        out.per_pole_condition[static_cast<size_t>(i)] =
            std::max(1.0, eig.vectors.col(i).norm() * inv.row(i).norm());
    }
    return out;
}

} // namespace synthesis

} // namespace ddpole
