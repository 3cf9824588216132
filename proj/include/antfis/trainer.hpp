#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "antfis/aco.hpp"
#include "antfis/dataset.hpp"
#include "antfis/fcm.hpp"
#include "antfis/fis.hpp"

namespace antfis {

/// Which parameters the ant colony searches over.
///  - Premise: Gaussian centers and widths; consequents are refit by damped
///    least squares at every evaluation (default).
///  - Consequent: consequents only, premises frozen at the clustering seed.
///  - Both: premises and consequents, no least-squares refit.
enum class TuneMode { Premise, Consequent, Both };

std::string_view to_string(TuneMode mode);
TuneMode tune_mode_from_string(std::string_view text);

struct TrainConfig {
    double p = 0.70;
    FeatureStage stage = FeatureStage::XYZPV5;
    std::size_t n_rules = 10;
    FcmConfig fcm;
    AcoConfig aco;        // bounds are filled in by train()
    std::uint64_t seed = 7; // split seed
    double damping = kDefaultDamping;
    TuneMode tune = TuneMode::Premise;
    double center_margin = 0.1;   // centers searched in [-margin, 1 + margin]
    double consequent_bound = 1.0; // consequents searched in [-bound, bound]
    unsigned threads = 1;         // evaluation workers; results do not depend on it

    /// Sets the split seed and derives the clustering and optimizer seeds from it.
    TrainConfig& reseed(std::uint64_t master);
    void validate() const;
};

struct TrainedModel {
    FisModel fis;
    TrainConfig config;
    EvalReport train_report;
    EvalReport test_report;
    /// Best training RMSE after each optimizer iteration.
    std::vector<double> convergence;
};

/// Split, normalize, cluster, seed the rule base, tune with the ant colony
/// and report train/test metrics. data.stage must equal config.stage.
TrainedModel train(const DataSet& data, const TrainConfig& config);

/// Unclamped predictions for raw (unnormalized) feature rows.
Eigen::VectorXd predict_raw(const TrainedModel& model, const Eigen::MatrixXd& raw_features);

/// Metrics of clamped predictions on `data`.
EvalReport evaluate(const TrainedModel& model, const DataSet& data);

/// Clamped predictions for raw feature rows (n x arity), order preserved.
std::vector<double> predict_points(const TrainedModel& model, const Eigen::MatrixXd& raw_features);

/// The training and test partitions `train` used for this model.
std::pair<DataSet, DataSet> model_partitions(const TrainedModel& model, const DataSet& data);

struct SweepCell {
    FeatureStage stage = FeatureStage::X1;
    std::size_t n_ants = 0;
    std::uint64_t seed = 0;
    EvalReport train;
    EvalReport test;
};

struct SweepReport {
    std::vector<SweepCell> cells; // stage-major, ant-minor

    const SweepCell& at(FeatureStage stage, std::size_t n_ants) const;
};

/// Seed for a sweep cell, mixed from the master seed, stage arity and ant count.
std::uint64_t cell_seed(std::uint64_t master, FeatureStage stage, std::size_t n_ants);

/// Trains one model per (stage, ant count) cell. Every cell shares the base
/// split seed; clustering and optimizer seeds come from cell_seed(). Cells
/// run on up to `threads` workers.
SweepReport sweep(const DataSet& data, std::span<const FeatureStage> stages, std::span<const std::size_t> ant_counts,
                  const TrainConfig& base, unsigned threads = 1);

void write_sweep_csv(std::ostream& out, const SweepReport& report);

/// Versioned plain-text model container.
void write_model(std::ostream& out, const TrainedModel& model);
TrainedModel read_model(std::istream& in);
void save_model(const std::filesystem::path& path, const TrainedModel& model);
TrainedModel load_model(const std::filesystem::path& path);

} // namespace antfis
