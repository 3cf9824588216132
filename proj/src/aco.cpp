#include "antfis/aco.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "antfis/errors.hpp"
#include "antfis/parallel.hpp"

namespace antfis {

namespace {

constexpr std::uint64_t kInitStream = 0;
constexpr double kSdFloor = 1e-9;

} // namespace

void AcoConfig::validate(std::size_t dims) const
{
    if (n_ants < 1 || archive_size < 2 || max_iter < 1) {
        throw ConfigError("aco: require n_ants >= 1, archive_size >= 2, max_iter >= 1");
    }
    if (!(q > 0.0) || !(xi > 0.0 && xi <= 1.0)) {
        throw ConfigError("aco: require q > 0 and xi in (0, 1]");
    }
    if (dims == 0 || bounds.size() != dims) {
        throw ConfigError("aco: need one bound pair per dimension (" + std::to_string(dims) + "), got "
                          + std::to_string(bounds.size()));
    }
    for (const auto& b : bounds) {
        if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || !(b.lo < b.hi)) {
            throw ConfigError("aco: every bound needs lo < hi");
        }
    }
}

std::vector<double> rank_weights(std::size_t k, double q)
{
    std::vector<double> w(k);
    const double qk = q * static_cast<double>(k);
    const double norm = 1.0 / (qk * std::sqrt(2.0 * std::numbers::pi));
    for (std::size_t l = 0; l < k; ++l) {
        const double rank = static_cast<double>(l); // l - 1 for 1-based rank
        w[l] = norm * std::exp(-(rank * rank) / (2.0 * qk * qk));
    }
    return w;
}

SolutionArchive make_archive(std::size_t capacity, double q)
{
    SolutionArchive a;
    a.capacity = capacity;
    a.q = q;
    a.weights = rank_weights(capacity, q);
    return a;
}

double reflect_into(double v, Bounds b)
{
    if (!std::isfinite(v)) {
        return 0.5 * (b.lo + b.hi);
    }
    const double width = b.hi - b.lo;
    // fold far excursions with one modulo so the loop below runs O(1) times
    if (v < b.lo - 2.0 * width || v > b.hi + 2.0 * width) {
        const double t = std::fmod(v - b.lo, 2.0 * width);
        v = b.lo + (t < 0.0 ? t + 2.0 * width : t);
    }
    while (v < b.lo || v > b.hi) {
        v = v < b.lo ? 2.0 * b.lo - v : 2.0 * b.hi - v;
    }
    return v;
}

std::size_t select_guide(const SolutionArchive& archive, Rng& rng)
{
    const auto n = archive.size();
    if (n == 0) {
        throw ConfigError("aco: cannot sample from an empty archive");
    }
    std::discrete_distribution<std::size_t> pick(archive.weights.begin(),
                                                 archive.weights.begin() + static_cast<std::ptrdiff_t>(n));
    return pick(rng);
}

Eigen::VectorXd sample_candidate(const SolutionArchive& archive, double xi, std::span<const Bounds> bounds, Rng& rng)
{
    const std::size_t g = select_guide(archive, rng);
    const auto& guide = archive.solutions[g];
    const auto dims = static_cast<std::size_t>(guide.size());
    if (bounds.size() != dims) {
        throw ConfigError("aco: bounds do not match the solution dimension");
    }
    const std::size_t k = archive.size();

    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd out(guide.size());
    for (std::size_t j = 0; j < dims; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        double spread = 0.0;
        for (std::size_t r = 0; r < k; ++r) {
            if (r != g) {
                spread += std::abs(archive.solutions[r](jj) - guide(jj));
            }
        }
        double sd = k > 1 ? xi * spread / static_cast<double>(k - 1) : 0.0;
        sd = std::max(sd, kSdFloor * (bounds[j].hi - bounds[j].lo));
        out(jj) = reflect_into(guide(jj) + sd * normal(rng), bounds[j]);
    }
    return out;
}

SolutionArchive update_archive(SolutionArchive archive, std::span<const Candidate> candidates)
{
    std::vector<Candidate> pool;
    pool.reserve(archive.size() + candidates.size());
    for (std::size_t i = 0; i < archive.size(); ++i) {
        pool.push_back({std::move(archive.solutions[i]), archive.objectives[i]});
    }
    for (const auto& c : candidates) {
        if (std::isnan(c.objective)) {
            ++archive.discarded;
            continue;
        }
        pool.push_back(c);
    }
    std::stable_sort(pool.begin(), pool.end(),
                     [](const Candidate& a, const Candidate& b) { return a.objective < b.objective; });
    pool.resize(std::min(pool.size(), archive.capacity));

    archive.solutions.clear();
    archive.objectives.clear();
    for (auto& c : pool) {
        archive.solutions.push_back(std::move(c.vector));
        archive.objectives.push_back(c.objective);
    }
    return archive;
}

OptResult optimize(const Objective& objective, std::size_t dims, const AcoConfig& config,
                   std::span<const Eigen::VectorXd> seeds, const ArchiveObserver& observer)
{
    config.validate(dims);
    const auto& bounds = config.bounds;
    const std::size_t k = config.archive_size;

    std::vector<Candidate> initial(k);
    for (std::size_t i = 0; i < k; ++i) {
        Eigen::VectorXd v(static_cast<Eigen::Index>(dims));
        if (i < seeds.size()) {
            if (static_cast<std::size_t>(seeds[i].size()) != dims) {
                throw ConfigError("aco: seed vector has the wrong dimension");
            }
            for (std::size_t j = 0; j < dims; ++j) {
                v(static_cast<Eigen::Index>(j)) = std::clamp(seeds[i](static_cast<Eigen::Index>(j)), bounds[j].lo,
                                                             bounds[j].hi);
            }
        } else {
            auto rng = substream(config.seed, {kInitStream, i});
            for (std::size_t j = 0; j < dims; ++j) {
                v(static_cast<Eigen::Index>(j)) = std::uniform_real_distribution<double>(bounds[j].lo, bounds[j].hi)(rng);
            }
        }
        initial[i].vector = std::move(v);
    }
    parallel_for(k, config.threads, [&](std::size_t i) { initial[i].objective = objective(initial[i].vector); });

    if (std::none_of(initial.begin(), initial.end(), [](const Candidate& c) { return std::isfinite(c.objective); })) {
        throw NumericalError("aco: objective invalid on domain");
    }

    SolutionArchive archive = update_archive(make_archive(k, config.q), initial);

    OptResult result;
    result.evaluations = k;
    result.history.reserve(config.max_iter);

    std::vector<Candidate> batch(config.n_ants);
    for (std::size_t it = 1; it <= config.max_iter; ++it) {
        parallel_for(config.n_ants, config.threads, [&](std::size_t a) {
            auto rng = substream(config.seed, {it, a});
            batch[a].vector = sample_candidate(archive, config.xi, bounds, rng);
            batch[a].objective = objective(batch[a].vector);
        });
        result.evaluations += config.n_ants;
        archive = update_archive(std::move(archive), batch);
        result.history.push_back(archive.objectives.front());
        if (observer) {
            observer(it, archive);
        }
    }

    result.best_vector = archive.solutions.front();
    result.best_objective = archive.objectives.front();
    result.discarded = archive.discarded;
    return result;
}

} // namespace antfis
