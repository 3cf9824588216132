#include "antfis/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "antfis/errors.hpp"
#include "antfis/parallel.hpp"
#include "antfis/rng.hpp"
#include "antfis/text.hpp"

namespace antfis {

namespace {

double rmse(const FisModel& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y)
{
    return std::sqrt((predict(model, x) - y).squaredNorm() / static_cast<double>(y.size()));
}

std::vector<Bounds> premise_bounds(const TrainConfig& cfg, std::size_t c, std::size_t d)
{
    std::vector<Bounds> b;
    for (std::size_t i = 0; i < c * d; ++i) {
        b.push_back({-cfg.center_margin, 1.0 + cfg.center_margin});
        b.push_back({kSigmaFloor, kSigmaCap});
    }
    return b;
}

std::vector<Bounds> consequent_bounds(const TrainConfig& cfg, std::size_t c, std::size_t d)
{
    return std::vector<Bounds>(c * (d + 1), Bounds{-cfg.consequent_bound, cfg.consequent_bound});
}

/// Objective and decoder for one tuning mode.
struct SearchSpace {
    std::vector<Bounds> bounds;
    Eigen::VectorXd seed;
    std::function<FisModel(const Eigen::VectorXd&)> decode;
};

SearchSpace make_search_space(const TrainConfig& cfg, const FisModel& seeded, const Eigen::MatrixXd& x,
                              const Eigen::VectorXd& y)
{
    const auto c = seeded.rule_count();
    const auto d = seeded.arity();
    SearchSpace space;
    switch (cfg.tune) {
    case TuneMode::Premise:
        space.bounds = premise_bounds(cfg, c, d);
        space.seed = encode_premise(seeded);
        space.decode = [&seeded, &x, &y, damping = cfg.damping](const Eigen::VectorXd& v) {
            return fit_consequents(decode_premise(v, seeded), x, y, damping);
        };
        break;
    case TuneMode::Consequent:
        space.bounds = consequent_bounds(cfg, c, d);
        space.seed = encode_consequents(seeded);
        space.decode = [&seeded](const Eigen::VectorXd& v) { return decode_consequents(v, seeded); };
        break;
    case TuneMode::Both: {
        space.bounds = premise_bounds(cfg, c, d);
        const auto cons = consequent_bounds(cfg, c, d);
        space.bounds.insert(space.bounds.end(), cons.begin(), cons.end());
        const Eigen::VectorXd premise = encode_premise(seeded);
        const Eigen::VectorXd consequent = encode_consequents(seeded);
        space.seed.resize(premise.size() + consequent.size());
        space.seed << premise, consequent;
        const auto split_at = premise.size();
        space.decode = [&seeded, split_at](const Eigen::VectorXd& v) {
            const FisModel m = decode_premise(v.head(split_at), seeded);
            return decode_consequents(v.tail(v.size() - split_at), m);
        };
        break;
    }
    }
    return space;
}

} // namespace

std::string_view to_string(TuneMode mode)
{
    switch (mode) {
    case TuneMode::Premise: return "premise";
    case TuneMode::Consequent: return "consequent";
    case TuneMode::Both: return "both";
    }
    return "premise";
}

TuneMode tune_mode_from_string(std::string_view text)
{
    if (text == "premise") return TuneMode::Premise;
    if (text == "consequent") return TuneMode::Consequent;
    if (text == "both") return TuneMode::Both;
    throw ConfigError("trainer: unknown tuning mode '" + std::string(text) + "'");
}

TrainConfig& TrainConfig::reseed(std::uint64_t master)
{
    seed = master;
    fcm.seed = derive_seed(master, {1});
    aco.seed = derive_seed(master, {2});
    return *this;
}

void TrainConfig::validate() const
{
    if (!(p > 0.0 && p < 1.0)) {
        throw ConfigError("trainer: train fraction p must lie in (0, 1)");
    }
    if (n_rules < 2) {
        throw ConfigError("trainer: need at least 2 rules");
    }
    if (!(damping > 0.0) || !(center_margin >= 0.0) || !(consequent_bound > 0.0)) {
        throw ConfigError("trainer: require damping > 0, center_margin >= 0, consequent_bound > 0");
    }
    FcmConfig f = fcm;
    f.c = n_rules;
    f.validate();
    AcoConfig a = aco;
    a.bounds.assign(1, Bounds{0.0, 1.0});
    a.validate(1);
}

TrainedModel train(const DataSet& data, const TrainConfig& config)
{
    config.validate();
    if (data.stage != config.stage) {
        throw ConfigError("trainer: data feature stage does not match the configured stage");
    }

    const auto [train_raw, test_raw] = split(data, config.p, config.seed);
    const Normalizer norm = fit_normalizer(train_raw);
    const DataSet train_n = apply_normalizer(norm, train_raw);
    const Eigen::MatrixXd x = train_n.features();
    const Eigen::VectorXd y = train_n.targets();

    FcmConfig fcm = config.fcm;
    fcm.c = config.n_rules;
    const FcmResult clusters = fcm_cluster(x, fcm);
    const FisModel seeded = init_from_fcm(clusters, train_n, norm, config.damping);

    const SearchSpace space = make_search_space(config, seeded, x, y);
    const Objective objective = [&](const Eigen::VectorXd& v) {
        try {
            return rmse(space.decode(v), x, y);
        } catch (const NumericalError&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    AcoConfig aco = config.aco;
    aco.bounds = space.bounds;
    aco.threads = config.threads;
    const Eigen::VectorXd seeds[] = {space.seed};
    const OptResult opt = optimize(objective, space.bounds.size(), aco, seeds);

    TrainedModel model;
    model.fis = space.decode(opt.best_vector);
    model.config = config;
    model.convergence = opt.history;
    model.train_report = evaluate(model, train_raw);
    model.test_report = evaluate(model, test_raw);
    return model;
}

Eigen::VectorXd predict_raw(const TrainedModel& model, const Eigen::MatrixXd& raw_features)
{
    if (static_cast<std::size_t>(raw_features.cols()) != model.fis.arity()) {
        throw ConfigError("trainer: input has " + std::to_string(raw_features.cols()) + " features, model expects "
                          + std::to_string(model.fis.arity()));
    }
    if (!raw_features.allFinite()) {
        throw DataError("trainer: non-finite feature value");
    }
    return predict(model.fis, model.fis.normalizer().apply(raw_features));
}

std::vector<double> predict_points(const TrainedModel& model, const Eigen::MatrixXd& raw_features)
{
    const Eigen::VectorXd pred = predict_raw(model, raw_features);
    std::vector<double> out(static_cast<std::size_t>(pred.size()));
    for (Eigen::Index k = 0; k < pred.size(); ++k) {
        out[static_cast<std::size_t>(k)] = std::clamp(pred(k), 0.0, 1.0);
    }
    return out;
}

EvalReport evaluate(const TrainedModel& model, const DataSet& data)
{
    if (data.arity() != model.fis.arity()) {
        throw ConfigError("trainer: data feature stage does not match the model");
    }
    const std::vector<double> pred = predict_points(model, data.features());
    const Eigen::VectorXd target = data.targets();
    return eval_metrics(pred, std::span<const double>(target.data(), static_cast<std::size_t>(target.size())));
}

std::pair<DataSet, DataSet> model_partitions(const TrainedModel& model, const DataSet& data)
{
    DataSet staged = data;
    staged.stage = model.config.stage;
    return split(staged, model.config.p, model.config.seed);
}

const SweepCell& SweepReport::at(FeatureStage stage, std::size_t n_ants) const
{
    for (const auto& c : cells) {
        if (c.stage == stage && c.n_ants == n_ants) {
            return c;
        }
    }
    throw ConfigError("trainer: no sweep cell for that stage and ant count");
}

std::uint64_t cell_seed(std::uint64_t master, FeatureStage stage, std::size_t n_ants)
{
    return derive_seed(master, {static_cast<std::uint64_t>(arity(stage)), static_cast<std::uint64_t>(n_ants)});
}

SweepReport sweep(const DataSet& data, std::span<const FeatureStage> stages, std::span<const std::size_t> ant_counts,
                  const TrainConfig& base, unsigned threads)
{
    if (stages.empty() || ant_counts.empty()) {
        throw ConfigError("trainer: sweep needs at least one stage and one ant count");
    }
    SweepReport report;
    for (auto stage : stages) {
        for (auto ants : ant_counts) {
            report.cells.push_back({stage, ants, cell_seed(base.seed, stage, ants), {}, {}});
        }
    }

    parallel_for(report.cells.size(), threads, [&](std::size_t i) {
        auto& cell = report.cells[i];
        TrainConfig cfg = base;
        cfg.stage = cell.stage;
        cfg.aco.n_ants = cell.n_ants;
        cfg.fcm.seed = derive_seed(cell.seed, {1});
        cfg.aco.seed = derive_seed(cell.seed, {2});
        cfg.threads = 1;
        DataSet staged = data;
        staged.stage = cell.stage;
        const auto where = "trainer: sweep cell (stage " + std::to_string(arity(cell.stage)) + ", ants "
                           + std::to_string(cell.n_ants) + "): ";
        try {
            const TrainedModel m = train(staged, cfg);
            cell.train = m.train_report;
            cell.test = m.test_report;
        } catch (const DataError& e) {
            throw DataError(where + e.what());
        } catch (const NumericalError& e) {
            throw NumericalError(where + e.what());
        } catch (const Error& e) {
            throw ConfigError(where + e.what());
        }
    });
    return report;
}

void write_sweep_csv(std::ostream& out, const SweepReport& report)
{
    out << "stage,n_ants,train_r,test_r,train_rmse,test_rmse\n";
    for (const auto& c : report.cells) {
        out << arity(c.stage) << ',' << c.n_ants << ',' << format_double(c.train.pearson_r) << ','
            << format_double(c.test.pearson_r) << ',' << format_double(c.train.rmse) << ','
            << format_double(c.test.rmse) << '\n';
    }
}

} // namespace antfis
