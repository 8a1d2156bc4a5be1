#include "ddpole/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ddpole {
namespace numerics {

namespace {

template <typename Mat>
Index rank_impl(const Mat& m, const Tolerance& tol) {
    tol.validate();
    require_finite(m, "numerical_rank input");
    Eigen::JacobiSVD<Mat> svd(m);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) <= 0.0) {
        return 0;
    }
    const double threshold = tol.rel_rank_tol * s(0);
    Index rank = 0;
    for (Index i = 0; i < s.size(); ++i) {
        if (s(i) > threshold) {
            ++rank;
        }
    }
    return rank;
}

template <typename Mat>
Mat nullspace_impl(const Mat& m, const Tolerance& tol) {
    tol.validate();
    require_finite(m, "nullspace_basis input");
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double smax = s.size() > 0 ? s(0) : 0.0;
    const double threshold = tol.rel_rank_tol * smax;
    Index rank = 0;
    for (Index i = 0; i < s.size(); ++i) {
        if (s(i) > threshold) {
            ++rank;
        }
    }
    return svd.matrixV().rightCols(m.cols() - rank);
}

template <typename Mat>
Mat pinv_impl(const Mat& m, const Tolerance& tol) {
    tol.validate();
    require_finite(m, "pseudoinverse input");
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    const double smax = s.size() > 0 ? s(0) : 0.0;
    const double threshold = tol.rel_rank_tol * smax;
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
    for (Index i = 0; i < s.size(); ++i) {
        if (s(i) > threshold) {
            inv(i) = 1.0 / s(i);
        }
    }
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

std::vector<Index> sorted_order(const CVector& values) {
    std::vector<Index> order(static_cast<size_t>(values.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        if (values(a).real() != values(b).real()) {
            return values(a).real() < values(b).real();
        }
        return values(a).imag() < values(b).imag();
    });
    return order;
}

} // namespace

void require_finite(const Matrix& m, const char* what) {
    if (!m.allFinite()) {
        throw Error(ErrorKind::invalid_input, std::string(what) + ": non-finite entries");
    }
}

void require_finite(const CMatrix& m, const char* what) {
    if (!m.allFinite()) {
        throw Error(ErrorKind::invalid_input, std::string(what) + ": non-finite entries");
    }
}

Index numerical_rank(const CMatrix& m, const Tolerance& tol) { return rank_impl(m, tol); }
Index numerical_rank(const Matrix& m, const Tolerance& tol) { return rank_impl(m, tol); }

CMatrix nullspace_basis(const CMatrix& m, const Tolerance& tol) { return nullspace_impl(m, tol); }
Matrix nullspace_basis(const Matrix& m, const Tolerance& tol) { return nullspace_impl(m, tol); }

CMatrix pseudoinverse(const CMatrix& m, const Tolerance& tol) { return pinv_impl(m, tol); }
Matrix pseudoinverse(const Matrix& m, const Tolerance& tol) { return pinv_impl(m, tol); }

Eigendecomposition eigendecomposition(const CMatrix& m) {
    require_finite(m, "eigendecomposition input");
    if (m.rows() != m.cols()) {
        throw Error(ErrorKind::invalid_input, "eigendecomposition: matrix must be square");
    }
    Eigen::ComplexEigenSolver<CMatrix> solver(m, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorKind::numeric_failure,
                    "eigendecomposition failed to converge (matrix norm " +
                        std::to_string(m.norm()) + ")");
    }
    const auto order = sorted_order(solver.eigenvalues());
    Eigendecomposition out;
    out.values.resize(m.rows());
    out.vectors.resize(m.rows(), m.cols());
    for (Index i = 0; i < m.rows(); ++i) {
        out.values(i) = solver.eigenvalues()(order[static_cast<size_t>(i)]);
        out.vectors.col(i) = solver.eigenvectors().col(order[static_cast<size_t>(i)]);
        out.vectors.col(i).normalize();
    }
    return out;
}

Eigendecomposition eigendecomposition(const Matrix& m) {
    return eigendecomposition(CMatrix(m.cast<Complex>()));
}

CVector eigenvalues(const Matrix& m) {
    return eigendecomposition(m).values;
}

double spectral_radius(const Matrix& m) {
    return eigenvalues(m).cwiseAbs().maxCoeff();
}

double eigenvalue_condition_number(const CMatrix& m, Index index, const Tolerance& tol) {
    tol.validate();
    const auto eig = eigendecomposition(m);
    if (index < 0 || index >= eig.values.size()) {
        throw Error(ErrorKind::invalid_input, "eigenvalue index out of range");
    }
    const double scale = std::max(1.0, eig.values.cwiseAbs().maxCoeff());
    for (Index j = 0; j < eig.values.size(); ++j) {
        if (j != index && std::abs(eig.values(j) - eig.values(index)) <= tol.rel_rank_tol * scale) {
            throw Error(ErrorKind::numeric_failure,
                        "eigenvalue_condition_number: eigenvalue is not simple");
        }
    }
    if (numerical_rank(eig.vectors, tol) < eig.vectors.cols()) {
        throw Error(ErrorKind::numeric_failure,
                    "eigenvalue_condition_number: eigenvector matrix is numerically singular");
    }
    // Rows of X^{-1} are the (scaled) left eigenvectors, with y_i^* x_i = 1.
    const CMatrix inv = eig.vectors.inverse();
    const double cond = eig.vectors.col(index).norm() * inv.row(index).norm();
    return std::max(cond, 1.0);
}

double eigenvalue_condition_number(const Matrix& m, Index index, const Tolerance& tol) {
    return eigenvalue_condition_number(CMatrix(m.cast<Complex>()), index, tol);
}

Matrix range_basis(const Matrix& m, const Tolerance& tol) {
    tol.validate();
    require_finite(m, "range_basis input");
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    const double smax = s.size() > 0 ? s(0) : 0.0;
    const double threshold = tol.rel_rank_tol * smax;
    Index rank = 0;
    for (Index i = 0; i < s.size(); ++i) {
        if (s(i) > threshold) {
            ++rank;
        }
    }
    return svd.matrixU().leftCols(rank);
}

} // namespace numerics

namespace {

// Perfect matching on the bipartite graph of pairs with distance <= limit.
bool try_augment(Index u, const Matrix& d, double limit,
                 std::vector<Index>& match_of, std::vector<bool>& visited) {
    for (Index v = 0; v < d.cols(); ++v) {
        if (d(u, v) <= limit && !visited[static_cast<size_t>(v)]) {
            visited[static_cast<size_t>(v)] = true;
            if (match_of[static_cast<size_t>(v)] < 0 ||
                try_augment(match_of[static_cast<size_t>(v)], d, limit, match_of, visited)) {
                match_of[static_cast<size_t>(v)] = u;
                return true;
            }
        }
    }
    return false;
}

bool perfect_matching(const Matrix& d, double limit, std::vector<Index>& match_of) {
    match_of.assign(static_cast<size_t>(d.cols()), -1);
    for (Index u = 0; u < d.rows(); ++u) {
        std::vector<bool> visited(static_cast<size_t>(d.cols()), false);
        if (!try_augment(u, d, limit, match_of, visited)) {
            return false;
        }
    }
    return true;
}

} // namespace

PoleMatch match_pole_sets(const CVector& desired, const CVector& achieved) {
    if (desired.size() != achieved.size()) {
        throw Error(ErrorKind::invalid_input, "match_pole_sets: size mismatch");
    }
    const Index n = desired.size();
    if (n == 0) {
        return {};
    }
    Matrix d(n, n);
    std::vector<double> candidates;
    candidates.reserve(static_cast<size_t>(n * n));
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            d(i, j) = std::abs(desired(i) - achieved(j));
            candidates.push_back(d(i, j));
        }
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    // Smallest threshold admitting a perfect matching.
    size_t lo = 0, hi = candidates.size() - 1;
    std::vector<Index> match_of;
    while (lo < hi) {
        const size_t mid = (lo + hi) / 2;
        if (perfect_matching(d, candidates[mid], match_of)) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    perfect_matching(d, candidates[lo], match_of);

    PoleMatch out;
    out.max_error = candidates[lo];
    double sum = 0.0;
    for (Index v = 0; v < n; ++v) {
        sum += d(match_of[static_cast<size_t>(v)], v);
    }
    out.mean_error = sum / static_cast<double>(n);
    return out;
}

} // namespace ddpole
