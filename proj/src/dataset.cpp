#include "antfis/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "antfis/errors.hpp"
#include "antfis/rng.hpp"

namespace antfis {

namespace {

constexpr std::array<std::string_view, kMaxFeatures> kFeatureNames{
    "x", "y", "z", "pressure", "air_superficial_velocity"};

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

bool parse_double(std::string_view text, double& value)
{
    if (text.empty()) {
        return false;
    }
    if (text.front() == '+') {
        text.remove_prefix(1);
    }
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    return ec == std::errc{} && ptr == end && std::isfinite(value);
}

} // namespace

FeatureStage stage_from_arity(int k)
{
    if (k < 1 || k > static_cast<int>(kMaxFeatures)) {
        throw ConfigError("dataset: feature stage must be in 1..5, got " + std::to_string(k));
    }
    return static_cast<FeatureStage>(k);
}

double feature(const Sample& s, std::size_t index)
{
    switch (index) {
    case 0: return s.x;
    case 1: return s.y;
    case 2: return s.z;
    case 3: return s.pressure;
    case 4: return s.superficial_velocity;
    default: throw ConfigError("dataset: feature index out of range");
    }
}

void set_feature(Sample& s, std::size_t index, double value)
{
    switch (index) {
    case 0: s.x = value; break;
    case 1: s.y = value; break;
    case 2: s.z = value; break;
    case 3: s.pressure = value; break;
    case 4: s.superficial_velocity = value; break;
    default: throw ConfigError("dataset: feature index out of range");
    }
}

std::string_view feature_name(std::size_t index)
{
    if (index >= kMaxFeatures) {
        throw ConfigError("dataset: feature index out of range");
    }
    return kFeatureNames[index];
}

Eigen::MatrixXd DataSet::features() const
{
    const auto d = arity();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(samples.size()), static_cast<Eigen::Index>(d));
    for (std::size_t k = 0; k < samples.size(); ++k) {
        for (std::size_t j = 0; j < d; ++j) {
            m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = feature(samples[k], j);
        }
    }
    return m;
}

Eigen::VectorXd DataSet::targets() const
{
    Eigen::VectorXd t(static_cast<Eigen::Index>(samples.size()));
    for (std::size_t k = 0; k < samples.size(); ++k) {
        t(static_cast<Eigen::Index>(k)) = samples[k].volume_fraction;
    }
    return t;
}

Normalizer::Normalizer(std::vector<std::pair<double, double>> ranges)
    : ranges_(std::move(ranges))
{
    for (std::size_t j = 0; j < ranges_.size(); ++j) {
        const auto [lo, hi] = ranges_[j];
        if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo)) {
            throw ConfigError("dataset: degenerate normalizer range for feature '"
                              + std::string(feature_name(j)) + "'");
        }
    }
}

Eigen::VectorXd Normalizer::apply(std::span<const double> raw) const
{
    if (raw.size() != ranges_.size()) {
        throw ConfigError("dataset: normalizer arity " + std::to_string(ranges_.size())
                          + " does not match input arity " + std::to_string(raw.size()));
    }
    Eigen::VectorXd out(static_cast<Eigen::Index>(raw.size()));
    for (std::size_t j = 0; j < raw.size(); ++j) {
        const auto [lo, hi] = ranges_[j];
        out(static_cast<Eigen::Index>(j)) = (raw[j] - lo) / (hi - lo);
    }
    return out;
}

Eigen::MatrixXd Normalizer::apply(const Eigen::MatrixXd& raw) const
{
    if (static_cast<std::size_t>(raw.cols()) != ranges_.size()) {
        throw ConfigError("dataset: normalizer arity " + std::to_string(ranges_.size())
                          + " does not match input arity " + std::to_string(raw.cols()));
    }
    Eigen::MatrixXd out(raw.rows(), raw.cols());
    for (Eigen::Index j = 0; j < raw.cols(); ++j) {
        const auto [lo, hi] = ranges_[static_cast<std::size_t>(j)];
        out.col(j) = (raw.col(j).array() - lo) / (hi - lo);
    }
    return out;
}

DataSet parse_dataset(std::istream& in, FeatureStage stage, std::string_view source)
{
    const std::string where(source);
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("dataset: " + where + ": no samples");
    }
    std::string_view header = line;
    if (header.starts_with("\xEF\xBB\xBF")) {
        header.remove_prefix(3);
    }
    const auto columns = split_fields(trim(header));
    if (!std::equal(columns.begin(), columns.end(), kCsvColumns.begin(), kCsvColumns.end())) {
        throw DataError("dataset: " + where
                        + ": header must be x,y,z,pressure,air_superficial_velocity,air_volume_fraction");
    }

    DataSet data;
    data.stage = stage;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty()) {
            continue;
        }
        const auto fields = split_fields(body);
        const auto row = "dataset: " + where + ": row " + std::to_string(line_no);
        if (fields.size() != kCsvColumns.size()) {
            throw DataError(row + ": expected 6 fields, got " + std::to_string(fields.size()));
        }
        std::array<double, 6> v{};
        for (std::size_t c = 0; c < v.size(); ++c) {
            if (!parse_double(fields[c], v[c])) {
                throw DataError(row + ": cannot parse " + std::string(kCsvColumns[c]) + " value '"
                                + std::string(fields[c]) + "'");
            }
        }
        if (v[5] < 0.0 || v[5] > 1.0) {
            std::ostringstream msg;
            msg << row << ": air_volume_fraction " << v[5] << " outside [0, 1]";
            throw DataError(msg.str());
        }
        data.samples.push_back(Sample{v[0], v[1], v[2], v[3], v[4], v[5]});
    }
    if (data.samples.empty()) {
        throw DataError("dataset: " + where + ": no samples");
    }
    return data;
}

DataSet load_dataset(const std::filesystem::path& path, FeatureStage stage)
{
    std::ifstream in(path);
    if (!in) {
        throw DataError("dataset: cannot open '" + path.string() + "'");
    }
    return parse_dataset(in, stage, path.string());
}

void write_dataset(std::ostream& out, const DataSet& data)
{
    for (std::size_t c = 0; c < kCsvColumns.size(); ++c) {
        out << (c ? "," : "") << kCsvColumns[c];
    }
    out << '\n';
    const auto old_precision = out.precision(17);
    for (const auto& s : data.samples) {
        out << s.x << ',' << s.y << ',' << s.z << ',' << s.pressure << ',' << s.superficial_velocity << ','
            << s.volume_fraction << '\n';
    }
    out.precision(old_precision);
}

void save_dataset(const std::filesystem::path& path, const DataSet& data)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("dataset: cannot write '" + path.string() + "'");
    }
    write_dataset(out, data);
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t n, double p,
                                                                            std::uint64_t seed)
{
    if (!(p > 0.0 && p < 1.0)) {
        throw ConfigError("dataset: train fraction must lie in (0, 1)");
    }
    if (n < 2) {
        throw ConfigError("dataset: split needs at least 2 samples");
    }
    const auto n_train = static_cast<std::size_t>(std::llround(p * static_cast<double>(n)));
    if (n_train == 0 || n_train == n) {
        throw ConfigError("dataset: split of " + std::to_string(n) + " samples leaves an empty partition");
    }

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    auto rng = substream(seed, {0x73706c6974ULL});
    std::shuffle(perm.begin(), perm.end(), rng);

    std::vector<std::size_t> train(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<std::size_t> test(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {std::move(train), std::move(test)};
}

std::pair<DataSet, DataSet> split(const DataSet& data, double p, std::uint64_t seed)
{
    const auto [train_idx, test_idx] = split_indices(data.size(), p, seed);
    DataSet train{{}, data.stage};
    DataSet test{{}, data.stage};
    train.samples.reserve(train_idx.size());
    test.samples.reserve(test_idx.size());
    for (auto i : train_idx) {
        train.samples.push_back(data.samples[i]);
    }
    for (auto i : test_idx) {
        test.samples.push_back(data.samples[i]);
    }
    return {std::move(train), std::move(test)};
}

Normalizer fit_normalizer(const DataSet& train)
{
    if (train.empty()) {
        throw ConfigError("dataset: cannot fit a normalizer on an empty partition");
    }
    std::vector<std::pair<double, double>> ranges;
    for (std::size_t j = 0; j < train.arity(); ++j) {
        double lo = feature(train.samples.front(), j);
        double hi = lo;
        for (const auto& s : train.samples) {
            lo = std::min(lo, feature(s, j));
            hi = std::max(hi, feature(s, j));
        }
        if (!(hi > lo)) {
            throw ConfigError("dataset: feature '" + std::string(feature_name(j))
                              + "' is constant on the training partition");
        }
        ranges.emplace_back(lo, hi);
    }
    return Normalizer(std::move(ranges));
}

DataSet apply_normalizer(const Normalizer& norm, const DataSet& data)
{
    if (norm.arity() != data.arity()) {
        throw ConfigError("dataset: normalizer arity does not match the data's feature stage");
    }
    DataSet out = data;
    for (auto& s : out.samples) {
        for (std::size_t j = 0; j < norm.arity(); ++j) {
            const auto [lo, hi] = norm.ranges()[j];
            set_feature(s, j, (feature(s, j) - lo) / (hi - lo));
        }
    }
    return out;
}

EvalReport eval_metrics(std::span<const double> pred, std::span<const double> target)
{
    if (pred.size() != target.size()) {
        throw ConfigError("metrics: prediction and target lengths differ");
    }
    const auto n = pred.size();
    if (n < 2) {
        throw ConfigError("metrics: need at least 2 points");
    }
    const double nd = static_cast<double>(n);
    const double mean_p = std::accumulate(pred.begin(), pred.end(), 0.0) / nd;
    const double mean_t = std::accumulate(target.begin(), target.end(), 0.0) / nd;

    double spp = 0.0, stt = 0.0, spt = 0.0, sse = 0.0, sae = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double dp = pred[k] - mean_p;
        const double dt = target[k] - mean_t;
        spp += dp * dp;
        stt += dt * dt;
        spt += dp * dt;
        const double e = pred[k] - target[k];
        sse += e * e;
        sae += std::abs(e);
    }
    const auto [pmin, pmax] = std::minmax_element(pred.begin(), pred.end());
    const auto [tmin, tmax] = std::minmax_element(target.begin(), target.end());
    if (*pmin == *pmax || *tmin == *tmax || !(spp > 0.0) || !(stt > 0.0)) {
        throw NumericalError("metrics: zero variance in predictions or targets, R is undefined");
    }

    EvalReport r;
    r.pearson_r = std::clamp(spt / std::sqrt(spp * stt), -1.0, 1.0);
    r.rmse = std::sqrt(sse / nd);
    r.mae = sae / nd;
    r.n = n;
    return r;
}

} // namespace antfis
