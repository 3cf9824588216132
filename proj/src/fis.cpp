#include "antfis/fis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "antfis/errors.hpp"

namespace antfis {

namespace {

constexpr int kDampingRefinements = 2;

/// log w_ik for every row of x, n x c.
Eigen::MatrixXd log_firing(const FisModel& model, const Eigen::MatrixXd& x)
{
    const Eigen::Index c = model.centers().rows();
    Eigen::MatrixXd logw(x.rows(), c);
    for (Eigen::Index i = 0; i < c; ++i) {
        const Eigen::RowVectorXd inv2s2 = (2.0 * model.sigmas().row(i).array().square()).inverse();
        logw.col(i) = -((x.rowwise() - model.centers().row(i)).array().square().rowwise() * inv2s2.array())
                           .rowwise()
                           .sum();
    }
    return logw;
}

void require_arity(const FisModel& model, Eigen::Index cols)
{
    if (static_cast<std::size_t>(cols) != model.arity()) {
        throw ConfigError("fis: input arity " + std::to_string(cols) + " does not match model arity "
                          + std::to_string(model.arity()));
    }
}

Eigen::MatrixXd to_row(std::span<const double> x)
{
    Eigen::MatrixXd row(1, static_cast<Eigen::Index>(x.size()));
    for (std::size_t j = 0; j < x.size(); ++j) {
        row(0, static_cast<Eigen::Index>(j)) = x[j];
    }
    return row;
}

/// Per-rule affine outputs a_i . x + b_i, n x c.
Eigen::MatrixXd rule_outputs(const FisModel& model, const Eigen::MatrixXd& x)
{
    const Eigen::Index d = x.cols();
    const auto& cons = model.consequents();
    Eigen::MatrixXd out = x * cons.leftCols(d).transpose();
    out.rowwise() += cons.col(d).transpose();
    return out;
}

} // namespace

double GaussianMf::operator()(double x) const
{
    const double t = (x - center) / sigma;
    return std::exp(-0.5 * t * t);
}

FisModel::FisModel(Eigen::MatrixXd centers, Eigen::MatrixXd sigmas, Eigen::MatrixXd consequents,
                   FeatureStage stage, Normalizer normalizer)
    : centers_(std::move(centers))
    , sigmas_(std::move(sigmas))
    , consequents_(std::move(consequents))
    , stage_(stage)
    , normalizer_(std::move(normalizer))
{
    const auto c = centers_.rows();
    const auto d = centers_.cols();
    if (c < 1) {
        throw ConfigError("fis: a model needs at least one rule");
    }
    if (static_cast<std::size_t>(d) != antfis::arity(stage_) || normalizer_.arity() != antfis::arity(stage_)) {
        throw ConfigError("fis: premise and normalizer arity must match the feature stage");
    }
    if (sigmas_.rows() != c || sigmas_.cols() != d || consequents_.rows() != c || consequents_.cols() != d + 1) {
        throw ConfigError("fis: inconsistent rule matrix shapes");
    }
    if (!centers_.allFinite() || !sigmas_.allFinite() || !consequents_.allFinite()) {
        throw ConfigError("fis: non-finite rule parameter");
    }
    if (sigmas_.minCoeff() < kSigmaFloor) {
        throw ConfigError("fis: membership width below the floor");
    }
}

FisModel::FisModel(std::span<const Rule> rules, FeatureStage stage, Normalizer normalizer)
{
    const auto c = static_cast<Eigen::Index>(rules.size());
    const auto d = static_cast<Eigen::Index>(antfis::arity(stage));
    Eigen::MatrixXd centers(c, d), sigmas(c, d), cons(c, d + 1);
    for (Eigen::Index i = 0; i < c; ++i) {
        const auto& r = rules[static_cast<std::size_t>(i)];
        if (static_cast<Eigen::Index>(r.premise.size()) != d || r.consequent.size() != d + 1) {
            throw ConfigError("fis: rule " + std::to_string(i) + " arity does not match the feature stage");
        }
        for (Eigen::Index j = 0; j < d; ++j) {
            centers(i, j) = r.premise[static_cast<std::size_t>(j)].center;
            sigmas(i, j) = r.premise[static_cast<std::size_t>(j)].sigma;
        }
        cons.row(i) = r.consequent.transpose();
    }
    *this = FisModel(std::move(centers), std::move(sigmas), std::move(cons), stage, std::move(normalizer));
}

Rule FisModel::rule(std::size_t i) const
{
    const auto row = static_cast<Eigen::Index>(i);
    Rule r;
    for (Eigen::Index j = 0; j < centers_.cols(); ++j) {
        r.premise.push_back({centers_(row, j), sigmas_(row, j)});
    }
    r.consequent = consequents_.row(row).transpose();
    return r;
}

std::vector<Rule> FisModel::rules() const
{
    std::vector<Rule> out;
    for (std::size_t i = 0; i < rule_count(); ++i) {
        out.push_back(rule(i));
    }
    return out;
}

FisModel FisModel::with_premise(Eigen::MatrixXd centers, Eigen::MatrixXd sigmas) const
{
    return FisModel(std::move(centers), std::move(sigmas), consequents_, stage_, normalizer_);
}

FisModel FisModel::with_consequents(Eigen::MatrixXd consequents) const
{
    return FisModel(centers_, sigmas_, std::move(consequents), stage_, normalizer_);
}

bool FisModel::operator==(const FisModel& other) const
{
    return stage_ == other.stage_ && normalizer_ == other.normalizer_ && centers_ == other.centers_
           && sigmas_ == other.sigmas_ && consequents_ == other.consequents_;
}

FisModel init_from_fcm(const FcmResult& fcm, const DataSet& train_normalized, const Normalizer& normalizer,
                       double damping)
{
    const Eigen::MatrixXd x = train_normalized.features();
    const Eigen::Index c = fcm.centers.rows();
    const Eigen::Index d = x.cols();
    if (fcm.centers.cols() != d || fcm.memberships.rows() != x.rows() || fcm.memberships.cols() != c) {
        throw ConfigError("fis: clustering result does not match the training features");
    }

    const Eigen::MatrixXd um = fcm.memberships.array().pow(fcm.m).matrix();
    Eigen::MatrixXd sigmas(c, d);
    for (Eigen::Index i = 0; i < c; ++i) {
        const double mass = um.col(i).sum();
        for (Eigen::Index j = 0; j < d; ++j) {
            const double var = mass > 0.0
                                   ? um.col(i).dot((x.col(j).array() - fcm.centers(i, j)).square().matrix()) / mass
                                   : 0.0;
            sigmas(i, j) = std::max(std::sqrt(var), kSigmaFloor);
        }
    }

    FisModel seeded(fcm.centers, std::move(sigmas), Eigen::MatrixXd::Zero(c, d + 1), train_normalized.stage,
                    normalizer);
    return fit_consequents(seeded, x, train_normalized.targets(), damping);
}

std::vector<double> firing_strengths(const FisModel& model, std::span<const double> x)
{
    require_arity(model, static_cast<Eigen::Index>(x.size()));
    const Eigen::MatrixXd logw = log_firing(model, to_row(x));
    std::vector<double> w(static_cast<std::size_t>(logw.cols()));
    for (Eigen::Index i = 0; i < logw.cols(); ++i) {
        w[static_cast<std::size_t>(i)] = std::exp(logw(0, i));
    }
    return w;
}

Eigen::MatrixXd normalized_firing(const FisModel& model, const Eigen::MatrixXd& x)
{
    require_arity(model, x.cols());
    Eigen::MatrixXd w = log_firing(model, x);
    for (Eigen::Index k = 0; k < w.rows(); ++k) {
        const double shift = w.row(k).maxCoeff();
        if (!std::isfinite(shift)) {
            throw NumericalError("fis: all firing strengths are degenerate at row " + std::to_string(k));
        }
        w.row(k) = (w.row(k).array() - shift).exp();
        w.row(k) /= w.row(k).sum();
    }
    return w;
}

Eigen::VectorXd predict(const FisModel& model, const Eigen::MatrixXd& x)
{
    const Eigen::MatrixXd wbar = normalized_firing(model, x);
    return wbar.cwiseProduct(rule_outputs(model, x)).rowwise().sum();
}

double predict(const FisModel& model, std::span<const double> x)
{
    require_arity(model, static_cast<Eigen::Index>(x.size()));
    return predict(model, to_row(x))(0);
}

FisModel fit_consequents(const FisModel& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double damping)
{
    require_arity(model, x.cols());
    if (x.rows() != y.size() || x.rows() == 0) {
        throw ConfigError("fis: feature and target row counts differ or are zero");
    }
    if (!(damping > 0.0)) {
        throw ConfigError("fis: damping must be positive");
    }
    const Eigen::Index n = x.rows();
    const Eigen::Index d = x.cols();
    const Eigen::Index c = static_cast<Eigen::Index>(model.rule_count());
    const Eigen::Index block = d + 1;

    const Eigen::MatrixXd wbar = normalized_firing(model, x);
    Eigen::MatrixXd phi(n, c * block);
    for (Eigen::Index i = 0; i < c; ++i) {
        phi.middleCols(i * block, d) = x.array().colwise() * wbar.col(i).array();
        phi.col(i * block + d) = wbar.col(i);
    }

    Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(c * block, c * block);
    normal.selfadjointView<Eigen::Lower>().rankUpdate(phi.transpose());
    normal.diagonal().array() += damping;
    const Eigen::VectorXd rhs = phi.transpose() * y;
    const Eigen::LDLT<Eigen::MatrixXd, Eigen::Lower> ldlt(normal);
    // iterated Tikhonov: each pass shrinks the damping bias by lambda / (eigenvalue + lambda)
    Eigen::VectorXd theta = ldlt.solve(rhs);
    for (int pass = 0; pass < kDampingRefinements; ++pass) {
        theta = ldlt.solve(rhs + damping * theta);
    }
    if (ldlt.info() != Eigen::Success || !theta.allFinite()) {
        throw NumericalError("fis: consequent least-squares solve failed");
    }

    Eigen::MatrixXd cons(c, block);
    for (Eigen::Index i = 0; i < c; ++i) {
        cons.row(i) = theta.segment(i * block, block).transpose();
    }
    return model.with_consequents(std::move(cons));
}

FisModel fit_consequents(const FisModel& model, const DataSet& train_normalized, double damping)
{
    return fit_consequents(model, train_normalized.features(), train_normalized.targets(), damping);
}

Eigen::VectorXd encode_premise(const FisModel& model)
{
    const auto c = model.centers().rows();
    const auto d = model.centers().cols();
    Eigen::VectorXd v(c * d * 2);
    for (Eigen::Index i = 0; i < c; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            v(2 * (i * d + j)) = model.centers()(i, j);
            v(2 * (i * d + j) + 1) = model.sigmas()(i, j);
        }
    }
    return v;
}

FisModel decode_premise(const Eigen::VectorXd& v, const FisModel& templ)
{
    const auto c = templ.centers().rows();
    const auto d = templ.centers().cols();
    if (v.size() != c * d * 2) {
        throw ConfigError("fis: premise vector has length " + std::to_string(v.size()) + ", expected "
                          + std::to_string(c * d * 2));
    }
    Eigen::MatrixXd centers(c, d), sigmas(c, d);
    for (Eigen::Index i = 0; i < c; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            centers(i, j) = v(2 * (i * d + j));
            sigmas(i, j) = std::clamp(v(2 * (i * d + j) + 1), kSigmaFloor, kSigmaCap);
        }
    }
    return templ.with_premise(std::move(centers), std::move(sigmas));
}

Eigen::VectorXd encode_consequents(const FisModel& model)
{
    const Eigen::MatrixXd& cons = model.consequents();
    Eigen::VectorXd v(cons.size());
    for (Eigen::Index i = 0; i < cons.rows(); ++i) {
        v.segment(i * cons.cols(), cons.cols()) = cons.row(i).transpose();
    }
    return v;
}

FisModel decode_consequents(const Eigen::VectorXd& v, const FisModel& templ)
{
    const auto rows = templ.consequents().rows();
    const auto cols = templ.consequents().cols();
    if (v.size() != rows * cols) {
        throw ConfigError("fis: consequent vector has length " + std::to_string(v.size()) + ", expected "
                          + std::to_string(rows * cols));
    }
    Eigen::MatrixXd cons(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        cons.row(i) = v.segment(i * cols, cols).transpose();
    }
    return templ.with_consequents(std::move(cons));
}

} // namespace antfis
