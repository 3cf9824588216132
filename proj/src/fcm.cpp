#include "antfis/fcm.hpp"

#include <cmath>
#include <random>
#include <string>

#include "antfis/errors.hpp"
#include "antfis/rng.hpp"

namespace antfis {

namespace {

Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& data, const Eigen::MatrixXd& centers)
{
    Eigen::MatrixXd d2(data.rows(), centers.rows());
    for (Eigen::Index i = 0; i < centers.rows(); ++i) {
        d2.col(i) = (data.rowwise() - centers.row(i)).rowwise().squaredNorm();
    }
    return d2;
}

Eigen::MatrixXd update_centers(const Eigen::MatrixXd& data, const Eigen::MatrixXd& u, double m)
{
    const Eigen::MatrixXd um = u.array().pow(m).matrix();
    Eigen::MatrixXd centers = um.transpose() * data;
    for (Eigen::Index i = 0; i < centers.rows(); ++i) {
        const double mass = um.col(i).sum();
        if (mass > 0.0) {
            centers.row(i) /= mass;
        } else {
            // a cluster with no mass keeps a defined position at the data mean
            centers.row(i) = data.colwise().mean();
        }
    }
    return centers;
}

Eigen::MatrixXd update_memberships(const Eigen::MatrixXd& d2, double m)
{
    const Eigen::Index n = d2.rows();
    const Eigen::Index c = d2.cols();
    const double exponent = 1.0 / (m - 1.0); // applied to squared distances
    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n, c);
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index coincident = -1;
        for (Eigen::Index i = 0; i < c; ++i) {
            if (d2(k, i) == 0.0) {
                coincident = i;
                break;
            }
        }
        if (coincident >= 0) {
            u(k, coincident) = 1.0;
            continue;
        }
        // u_ik = 1 / sum_j (d_ik / d_jk)^(2/(m-1)); scaled by the nearest
        // distance so every power lies in (0, 1]
        const double nearest = d2.row(k).minCoeff();
        double total = 0.0;
        for (Eigen::Index i = 0; i < c; ++i) {
            u(k, i) = std::pow(nearest / d2(k, i), exponent);
            total += u(k, i);
        }
        u.row(k) /= total;
    }
    return u;
}

} // namespace

void FcmConfig::validate() const
{
    if (c < 2 || !(m > 1.0) || !(tol > 0.0) || max_iter < 1) {
        throw ConfigError("fcm: require c >= 2, m > 1, tol > 0, max_iter >= 1");
    }
}

double fcm_objective(const Eigen::MatrixXd& data, const Eigen::MatrixXd& centers,
                     const Eigen::MatrixXd& memberships, double m)
{
    if (data.cols() != centers.cols() || memberships.rows() != data.rows()
        || memberships.cols() != centers.rows()) {
        throw ConfigError("fcm: dimension mismatch between data, centers and memberships");
    }
    return (memberships.array().pow(m) * squared_distances(data, centers).array()).sum();
}

FcmResult fcm_cluster(const Eigen::MatrixXd& data, const FcmConfig& config)
{
    config.validate();
    const auto n = data.rows();
    const auto c = static_cast<Eigen::Index>(config.c);
    if (data.cols() < 1) {
        throw ConfigError("fcm: data has no features");
    }
    if (n < c) {
        throw ConfigError("fcm: " + std::to_string(n) + " points cannot form " + std::to_string(c) + " clusters");
    }
    if (data.hasNaN()) {
        throw DataError("fcm: data contains NaN");
    }

    auto rng = substream(config.seed, {0x66636dULL});
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::MatrixXd u(n, c);
    for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index i = 0; i < c; ++i) {
            // strictly positive so every row has mass
            u(k, i) = unit(rng) + 1e-12;
        }
        u.row(k) /= u.row(k).sum();
    }

    FcmResult result;
    Eigen::MatrixXd centers;
    double previous = 0.0;
    for (std::size_t it = 1; it <= config.max_iter; ++it) {
        centers = update_centers(data, u, config.m);
        const Eigen::MatrixXd d2 = squared_distances(data, centers);
        u = update_memberships(d2, config.m);
        const double objective = (u.array().pow(config.m) * d2.array()).sum();
        result.objective_history.push_back(objective);
        result.iterations = it;
        if (!std::isfinite(objective)) {
            throw NumericalError("fcm: objective became non-finite");
        }
        if (it > 1 && previous - objective < config.tol) {
            break;
        }
        previous = objective;
    }

    result.centers = std::move(centers);
    result.memberships = std::move(u);
    result.objective = result.objective_history.back();
    result.m = config.m;
    return result;
}

} // namespace antfis
