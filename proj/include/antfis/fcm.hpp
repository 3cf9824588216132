#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace antfis {

struct FcmConfig {
    std::size_t c = 10;     // cluster count, one rule per cluster
    double m = 2.0;         // fuzziness exponent
    double tol = 1e-5;      // stop once the objective drops by less than this
    std::size_t max_iter = 200;
    std::uint64_t seed = 0;

    void validate() const;
};

struct FcmResult {
    Eigen::MatrixXd centers;     // c x d
    Eigen::MatrixXd memberships; // n x c, rows sum to 1
    double objective = 0.0;
    double m = 2.0; // fuzziness the result was computed with
    std::size_t iterations = 0;
    /// Objective after each membership update; non-increasing.
    std::vector<double> objective_history;
};

/// Fuzzy c-means on the rows of `data` (n x d, normalized features).
///
/// Memberships start from seeded uniform draws, row-normalized. Each iteration
/// recomputes centers from the current memberships, then memberships from the
/// new centers. A point that coincides exactly with a center gets full
/// membership in the first such center.
FcmResult fcm_cluster(const Eigen::MatrixXd& data, const FcmConfig& config);

/// J = sum_i sum_k u_ik^m ||x_k - v_i||^2
double fcm_objective(const Eigen::MatrixXd& data, const Eigen::MatrixXd& centers,
                     const Eigen::MatrixXd& memberships, double m);

} // namespace antfis
