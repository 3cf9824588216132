#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace antfis {

/// One reactor node: coordinates, fluid features and the gas volume fraction.
struct Sample {
    double x = 0.0;                    // m
    double y = 0.0;                    // m
    double z = 0.0;                    // m
    double pressure = 0.0;             // Pa
    double superficial_velocity = 0.0; // m/s
    double volume_fraction = 0.0;      // [0, 1]

    bool operator==(const Sample&) const = default;
};

inline constexpr std::size_t kMaxFeatures = 5;

/// Canonical CSV header, in column order.
inline constexpr std::array<std::string_view, 6> kCsvColumns{
    "x", "y", "z", "pressure", "air_superficial_velocity", "air_volume_fraction"};

/// Selects the first k of (x, y, z, pressure, superficial_velocity).
enum class FeatureStage : int { X1 = 1, XY2 = 2, XYZ3 = 3, XYZP4 = 4, XYZPV5 = 5 };

constexpr std::size_t arity(FeatureStage stage) noexcept { return static_cast<std::size_t>(stage); }

/// Throws ConfigError unless 1 <= k <= 5.
FeatureStage stage_from_arity(int k);

/// Feature value by index in the staging order.
double feature(const Sample& s, std::size_t index);
void set_feature(Sample& s, std::size_t index, double value);
std::string_view feature_name(std::size_t index);

struct DataSet {
    std::vector<Sample> samples;
    FeatureStage stage = FeatureStage::XYZPV5;

    std::size_t size() const noexcept { return samples.size(); }
    bool empty() const noexcept { return samples.empty(); }
    std::size_t arity() const noexcept { return antfis::arity(stage); }

    /// n x arity matrix of the stage's features.
    Eigen::MatrixXd features() const;
    Eigen::VectorXd targets() const;
};

/// Per-feature min-max scaling learned from a training partition.
class Normalizer {
public:
    Normalizer() = default;
    /// Throws ConfigError if a pair has max <= min.
    explicit Normalizer(std::vector<std::pair<double, double>> ranges);

    std::size_t arity() const noexcept { return ranges_.size(); }
    const std::vector<std::pair<double, double>>& ranges() const noexcept { return ranges_; }

    /// (v - min) / (max - min) per feature, unclipped.
    Eigen::VectorXd apply(std::span<const double> raw) const;
    Eigen::MatrixXd apply(const Eigen::MatrixXd& raw) const;

    bool operator==(const Normalizer&) const = default;

private:
    std::vector<std::pair<double, double>> ranges_;
};

struct EvalReport {
    double pearson_r = 0.0;
    double rmse = 0.0;
    double mae = 0.0;
    std::size_t n = 0;

    bool operator==(const EvalReport&) const = default;
};

/// Reads the canonical six-column CSV. Throws DataError on a missing file,
/// bad header, malformed row or out-of-range volume fraction.
DataSet load_dataset(const std::filesystem::path& path, FeatureStage stage);
DataSet parse_dataset(std::istream& in, FeatureStage stage, std::string_view source = "<stream>");

/// Writes the canonical CSV with round-trip precision.
void write_dataset(std::ostream& out, const DataSet& data);
void save_dataset(const std::filesystem::path& path, const DataSet& data);

/// Seeded uniform permutation, then a prefix cut of round(p * n) rows for
/// training. Both partitions keep the input's relative order.
std::pair<DataSet, DataSet> split(const DataSet& data, double p, std::uint64_t seed);

/// Index form of split(); first holds training indices, second test indices.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t n, double p,
                                                                            std::uint64_t seed);

Normalizer fit_normalizer(const DataSet& train);
/// Rescales the stage's features; apply exactly once.
DataSet apply_normalizer(const Normalizer& norm, const DataSet& data);

/// Pearson R, RMSE and MAE of predictions against targets.
EvalReport eval_metrics(std::span<const double> pred, std::span<const double> target);

} // namespace antfis
