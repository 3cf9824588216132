#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "antfis/dataset.hpp"
#include "antfis/fcm.hpp"

namespace antfis {

inline constexpr double kSigmaFloor = 1e-3;
inline constexpr double kSigmaCap = 1.0;
inline constexpr double kDefaultDamping = 1e-6;

struct GaussianMf {
    double center = 0.0;
    double sigma = 1.0;

    double operator()(double x) const;
};

/// Premise: one Gaussian per input. Consequent: d weights followed by a bias.
struct Rule {
    std::vector<GaussianMf> premise;
    Eigen::VectorXd consequent;
};

/// First-order Takagi-Sugeno system over normalized inputs.
///
/// Rules are stored as c x d center and sigma matrices plus a c x (d + 1)
/// consequent matrix. Instances are immutable; the fitting and decoding
/// functions return new models.
class FisModel {
public:
    FisModel() = default;
    /// Throws ConfigError on shape mismatch, non-finite values or sigma below
    /// kSigmaFloor.
    FisModel(Eigen::MatrixXd centers, Eigen::MatrixXd sigmas, Eigen::MatrixXd consequents, FeatureStage stage,
             Normalizer normalizer);
    FisModel(std::span<const Rule> rules, FeatureStage stage, Normalizer normalizer);

    std::size_t rule_count() const noexcept { return static_cast<std::size_t>(centers_.rows()); }
    std::size_t arity() const noexcept { return static_cast<std::size_t>(centers_.cols()); }
    FeatureStage stage() const noexcept { return stage_; }
    const Normalizer& normalizer() const noexcept { return normalizer_; }

    const Eigen::MatrixXd& centers() const noexcept { return centers_; }
    const Eigen::MatrixXd& sigmas() const noexcept { return sigmas_; }
    const Eigen::MatrixXd& consequents() const noexcept { return consequents_; }

    Rule rule(std::size_t i) const;
    std::vector<Rule> rules() const;

    FisModel with_premise(Eigen::MatrixXd centers, Eigen::MatrixXd sigmas) const;
    FisModel with_consequents(Eigen::MatrixXd consequents) const;

    bool operator==(const FisModel& other) const;

private:
    Eigen::MatrixXd centers_;
    Eigen::MatrixXd sigmas_;
    Eigen::MatrixXd consequents_;
    FeatureStage stage_ = FeatureStage::XYZPV5;
    Normalizer normalizer_;
};

/// Seeds one rule per cluster: centers from the FCM centers, widths from the
/// membership-weighted spread of each feature about its center (floored).
/// Consequents are then fitted by least squares.
FisModel init_from_fcm(const FcmResult& fcm, const DataSet& train_normalized, const Normalizer& normalizer,
                       double damping = kDefaultDamping);

/// Raw firing strengths w_i = prod_j exp(-(x_j - c_ij)^2 / 2 sigma_ij^2).
std::vector<double> firing_strengths(const FisModel& model, std::span<const double> x);

/// Normalized firing strengths for every row of x (n x c), computed with a
/// log-sum-exp shift so they stay defined when every raw strength underflows.
Eigen::MatrixXd normalized_firing(const FisModel& model, const Eigen::MatrixXd& x);

/// Weighted-average output sum_i w_i (a_i . x + b_i) / sum_i w_i. Unclamped.
double predict(const FisModel& model, std::span<const double> x);
Eigen::VectorXd predict(const FisModel& model, const Eigen::MatrixXd& x);

/// Damped least-squares fit of every consequent with premises held fixed.
FisModel fit_consequents(const FisModel& model, const DataSet& train_normalized, double damping = kDefaultDamping);
FisModel fit_consequents(const FisModel& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                         double damping = kDefaultDamping);

/// Premise vector, rule-major and feature-minor, as (center, sigma) pairs.
/// Length c * d * 2.
Eigen::VectorXd encode_premise(const FisModel& model);
/// Inverse of encode_premise; sigmas are clamped to [kSigmaFloor, kSigmaCap].
FisModel decode_premise(const Eigen::VectorXd& v, const FisModel& templ);

/// Consequent vector, rule-major, d weights then bias. Length c * (d + 1).
Eigen::VectorXd encode_consequents(const FisModel& model);
FisModel decode_consequents(const Eigen::VectorXd& v, const FisModel& templ);

} // namespace antfis
