#pragma once

#include <stdexcept>
#include <string>

namespace ddpole {

// Error categories, doubling as CLI exit codes:
// 0 ok, 1 usage/invalid input, 2 infeasible, 3 insufficient data, 4 numeric failure.
enum class ErrorKind : int {
    invalid_input = 1,
    infeasible = 2,
    insufficient_data = 3,
    numeric_failure = 4,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

// All rank/residual policy lives here; every module takes a Tolerance
// instead of hard-coding thresholds.
struct Tolerance {
    // Singular values below rel_rank_tol * sigma_max are treated as zero.
    double rel_rank_tol = 1e-10;
    // Threshold for post-hoc residual verification.
    double residual_tol = 1e-8;

    void validate() const {
        if (!(rel_rank_tol > 0.0) || !(residual_tol > 0.0)) {
            throw Error(ErrorKind::invalid_input, "tolerance entries must be positive");
        }
    }
};

} // namespace ddpole
