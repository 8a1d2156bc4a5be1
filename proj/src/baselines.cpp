#include "ddpole/baselines.hpp"

#include <cmath>

namespace ddpole {
namespace baselines {

namespace {

CMatrix similarity_target(const CVector& poles, const CMatrix& X) {
    return X * poles.asDiagonal() * X.inverse();
}

void check_eigenstructure_inputs(const LtiSystem& sys, const CVector& poles, const CMatrix& X,
                                 const Tolerance& tol) {
    sys.validate(tol);
    const Index n = sys.state_dim();
    if (poles.size() != n || X.rows() != n || X.cols() != n) {
        throw Error(ErrorKind::invalid_input, "eigenstructure gain: dimension mismatch");
    }
    numerics::require_finite(X, "eigenvector matrix");
    if (numerics::numerical_rank(X, tol) < n) {
        throw Error(ErrorKind::invalid_input, "eigenstructure gain: X is singular");
    }
}

// Post-hoc check that (A - B K) X = X Lambda actually holds.
void verify_assignment(const LtiSystem& sys, const Matrix& K, const CVector& poles,
                       const CMatrix& X, const Tolerance& tol) {
    const CMatrix acl = (sys.A - sys.B * K).cast<Complex>();
    const double residual = (acl * X - X * poles.asDiagonal()).norm();
    const double scale = 1.0 + sys.A.norm() + poles.cwiseAbs().maxCoeff();
    if (residual > tol.residual_tol * scale) {
        throw Error(ErrorKind::infeasible,
                    "eigenstructure gain: requested (Lambda, X) is not assignable "
                    "(post-hoc residual " +
                        std::to_string(residual) + ")");
    }
}

} // namespace

IdentifiedModel identify_least_squares(const DataMatrices& dm, const Tolerance& tol) {
    tol.validate();
    const Index n = dm.state_dim();
    const Index m = dm.input_dim();
    const Matrix stacked = dm.stacked();
    if (dm.samples() < n + m || numerics::numerical_rank(stacked, tol) < n + m) {
        throw Error(ErrorKind::insufficient_data,
                    "identify_least_squares: rank [X0; U0] < n + m, model is unidentifiable");
    }
    const Matrix ab = dm.X1 * numerics::pseudoinverse(stacked, tol);
    IdentifiedModel model;
    model.A_hat = ab.leftCols(n);
    model.B_hat = ab.rightCols(m);
    model.residual = (dm.X1 - ab * stacked).norm();
    return model;
}

Matrix kautsky_gain(const LtiSystem& sys, const CVector& poles, const CMatrix& X,
                    const Tolerance& tol) {
    check_eigenstructure_inputs(sys, poles, X, tol);
    const Index m = sys.input_dim();
    Eigen::HouseholderQR<Matrix> qr(sys.B);
    const Matrix Q = qr.householderQ();
    const Matrix Q0 = Q.leftCols(m);
    const Matrix Z = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
    const CMatrix target = similarity_target(poles, X);
    const Matrix K = Z.triangularView<Eigen::Upper>().solve(
        Matrix(Q0.transpose() * (sys.A - target.real())));
    verify_assignment(sys, K, poles, X, tol);
    return K;
}

Matrix sylvester_gain(const LtiSystem& sys, const CVector& poles, const CMatrix& X,
                      const Tolerance& tol) {
    check_eigenstructure_inputs(sys, poles, X, tol);
    const CVector open_loop = numerics::eigendecomposition(sys.A).values;
    const double scale = std::max(1.0, open_loop.cwiseAbs().maxCoeff());
    for (Index i = 0; i < poles.size(); ++i) {
        for (Index j = 0; j < open_loop.size(); ++j) {
            if (std::abs(poles(i) - open_loop(j)) <= tol.residual_tol * scale) {
                throw Error(ErrorKind::invalid_input,
                            "sylvester_gain: spectra of A and Lambda must be disjoint");
            }
        }
    }
    // B G = X Lambda - A X, solved in least squares; K = -G X^{-1}.
    const CMatrix rhs = X * poles.asDiagonal() - sys.A.cast<Complex>() * X;
    const CMatrix G = numerics::pseudoinverse(sys.B, tol).cast<Complex>() * rhs;
    if ((sys.B.cast<Complex>() * G - rhs).norm() >
        tol.residual_tol * (1.0 + rhs.norm())) {
        throw Error(ErrorKind::infeasible, "sylvester_gain: no exact G exists for the given X");
    }
    const CMatrix Kc = -(G * X.inverse());
    const Matrix K = Kc.real();
    verify_assignment(sys, K, poles, X, tol);
    return K;
}

Matrix projector_gain(const LtiSystem& sys, const CVector& poles, const CMatrix& X,
                      const Tolerance& tol) {
    check_eigenstructure_inputs(sys, poles, X, tol);
    const Matrix b_pinv = numerics::pseudoinverse(sys.B, tol);
    const Matrix projector = Matrix::Identity(sys.state_dim(), sys.state_dim()) - sys.B * b_pinv;
    const CMatrix residual_matrix =
        projector.cast<Complex>() * (X * poles.asDiagonal() - sys.A.cast<Complex>() * X);
    if (residual_matrix.norm() > tol.residual_tol * (1.0 + X.norm() * (1.0 + sys.A.norm()))) {
        throw Error(ErrorKind::infeasible,
                    "projector_gain: (I - B B^+)(X Lambda - A X) != 0, X is not assignable");
    }
    const CMatrix target = similarity_target(poles, X);
    const Matrix K = b_pinv * (sys.A - target.real());
    verify_assignment(sys, K, poles, X, tol);
    return K;
}

Matrix ackermann_gain(const LtiSystem& sys, const CVector& poles, const Tolerance& tol) {
    sys.validate(tol);
    const Index n = sys.state_dim();
    if (sys.input_dim() != 1) {
        throw Error(ErrorKind::invalid_input, "ackermann_gain: single-input systems only");
    }
    if (poles.size() != n) {
        throw Error(ErrorKind::invalid_input, "ackermann_gain: pole count must equal n");
    }
    if (!plant::is_controllable(sys, tol)) {
        throw Error(ErrorKind::infeasible, "ackermann_gain: system is not controllable");
    }
    // Desired characteristic polynomial, coefficients by convolution.
    CVector coeffs = CVector::Ones(1);
    for (Index i = 0; i < n; ++i) {
        CVector next = CVector::Zero(coeffs.size() + 1);
        next.head(coeffs.size()) += coeffs;
        next.tail(coeffs.size()) -= poles(i) * coeffs;
        coeffs = next;
    }
    if (coeffs.imag().cwiseAbs().maxCoeff() > 1e-9 * (1.0 + coeffs.cwiseAbs().maxCoeff())) {
        throw Error(ErrorKind::invalid_input,
                    "ackermann_gain: pole set is not closed under conjugation");
    }
    // p(A) by Horner on the real coefficients (leading coefficient 1).
    Matrix pa = Matrix::Identity(n, n);
    for (Index i = 1; i <= n; ++i) {
        pa = pa * sys.A + coeffs(i).real() * Matrix::Identity(n, n);
    }
    Matrix ctrb(n, n);
    Matrix block = sys.B;
    for (Index k = 0; k < n; ++k) {
        ctrb.col(k) = block;
        block = sys.A * block;
    }
    // K = e_n^T C^{-1} p(A).
    const Vector y = ctrb.transpose().fullPivLu().solve(Vector(Vector::Unit(n, n - 1)));
    return y.transpose() * pa;
}

CMatrix assignable_subspace(const LtiSystem& sys, Complex lambda, const Tolerance& tol) {
    sys.validate(tol);
    const Index n = sys.state_dim();
    const Index m = sys.input_dim();
    if (m == n) {
        return CMatrix::Identity(n, n);
    }
    Eigen::HouseholderQR<Matrix> qr(sys.B);
    const Matrix Q = qr.householderQ();
    const Matrix U1 = Q.rightCols(n - m); // orthogonal complement of R{B}
    const CMatrix shifted =
        U1.transpose().cast<Complex>() *
        (sys.A.cast<Complex>() - lambda * CMatrix::Identity(n, n));
    return numerics::nullspace_basis(shifted, tol);
}

Matrix model_based_place(const LtiSystem& sys, const CVector& poles, const Tolerance& tol) {
    sys.validate(tol);
    const Index n = sys.state_dim();
    const Index m = sys.input_dim();
    if (poles.size() != n) {
        throw Error(ErrorKind::invalid_input, "model_based_place: pole count must equal n");
    }
    if (!plant::is_controllable(sys, tol)) {
        throw Error(ErrorKind::infeasible, "model_based_place: system is not controllable");
    }
    std::vector<Complex> pole_list(poles.data(), poles.data() + poles.size());
    const auto cells = synthesis::group_poles(pole_list, m, /*enforce_multiplicity=*/true);

    // Lay out columns: one slot per pole; conjugate cells own two mirrored slots
    // per multiplicity (the partner column is kept conjugate throughout).
    struct Slot {
        Complex lambda;
        CMatrix basis;
        Index column;
        Index conj_column = -1;
    };
    std::vector<Slot> slots;
    CVector ordered(n);
    Index next = 0;
    for (const auto& cell : cells) {
        const CMatrix basis = assignable_subspace(sys, cell.value, tol);
        if (basis.cols() == 0) {
            throw Error(ErrorKind::numeric_failure,
                        "model_based_place: empty assignable subspace");
        }
        for (Index k = 0; k < cell.multiplicity; ++k) {
            Slot slot{cell.value, basis, next, -1};
            ordered(next) = cell.value;
            ++next;
            if (cell.complex_pair) {
                slot.conj_column = next;
                ordered(next) = std::conj(cell.value);
                ++next;
            }
            slots.push_back(slot);
        }
    }

    CMatrix X(n, n);
    for (const Slot& slot : slots) {
        const Index pick = std::min<Index>(slot.basis.cols() - 1,
                                           slot.column % slot.basis.cols());
        X.col(slot.column) = slot.basis.col(pick);
        if (slot.conj_column >= 0) {
            X.col(slot.conj_column) = X.col(slot.column).conjugate();
        }
    }

    // Reorthogonalization sweeps: move each column toward the direction in its
    // subspace least represented by the other columns.
    constexpr int kSweeps = 4;
    for (int sweep = 0; sweep < kSweeps; ++sweep) {
        for (const Slot& slot : slots) {
            CMatrix others(n, n - (slot.conj_column >= 0 ? 2 : 1));
            Index c = 0;
            for (Index j = 0; j < n; ++j) {
                if (j != slot.column && j != slot.conj_column) {
                    others.col(c++) = X.col(j);
                }
            }
            Eigen::HouseholderQR<CMatrix> qr(others);
            const CMatrix Q =
                CMatrix(qr.householderQ()).leftCols(std::min(others.cols(), n));
            Eigen::JacobiSVD<CMatrix> svd(CMatrix(Q.adjoint() * slot.basis),
                                          Eigen::ComputeFullV);
            const CVector c_best = svd.matrixV().col(svd.matrixV().cols() - 1);
            CVector candidate = slot.basis * c_best;
            const double norm = candidate.norm();
            if (norm > 0.0) {
                X.col(slot.column) = candidate / norm;
                if (slot.conj_column >= 0) {
                    X.col(slot.conj_column) = X.col(slot.column).conjugate();
                }
            }
        }
    }

    if (numerics::numerical_rank(X, tol) < n) {
        throw Error(ErrorKind::numeric_failure,
                    "model_based_place: failed to assemble independent eigenvectors");
    }
    return kautsky_gain(sys, ordered, X, tol);
}

} // namespace baselines

} // namespace ddpole
