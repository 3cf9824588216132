#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "antfis/rng.hpp"

namespace antfis {

struct Bounds {
    double lo = 0.0;
    double hi = 1.0;

    bool operator==(const Bounds&) const = default;
};

/// Continuous ant colony optimizer settings.
///
/// An archive of the best `archive_size` solutions plays the pheromone role.
/// Each iteration `n_ants` candidates are sampled from Gaussian kernels
/// centred on archive members chosen by rank weight.
struct AcoConfig {
    std::size_t n_ants = 20;
    std::size_t archive_size = 25;
    double q = 0.1;  // locality: small q concentrates selection on top ranks
    double xi = 0.85; // kernel width relative to the archive spread
    std::size_t max_iter = 100;
    std::uint64_t seed = 0;
    std::vector<Bounds> bounds; // one per dimension
    unsigned threads = 1;       // evaluation workers; never changes results

    void validate(std::size_t dims) const;
};

/// Solutions sorted by ascending objective, with rank weights.
struct SolutionArchive {
    std::vector<Eigen::VectorXd> solutions;
    std::vector<double> objectives;
    std::vector<double> weights;
    std::size_t capacity = 0;
    double q = 0.1;
    /// Candidates dropped so far because their objective was NaN.
    std::size_t discarded = 0;

    std::size_t size() const noexcept { return solutions.size(); }
};

struct Candidate {
    Eigen::VectorXd vector;
    double objective = 0.0;
};

struct OptResult {
    Eigen::VectorXd best_vector;
    double best_objective = 0.0;
    /// Best-so-far objective after each iteration.
    std::vector<double> history;
    std::size_t evaluations = 0;
    std::size_t discarded = 0;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;
/// Called after each archive update with the 1-based iteration number.
using ArchiveObserver = std::function<void(std::size_t, const SolutionArchive&)>;

/// w_l = exp(-(l-1)^2 / (2 q^2 k^2)) / (q k sqrt(2 pi)), l = 1..k. Unnormalized.
std::vector<double> rank_weights(std::size_t k, double q);

/// Draws one candidate: picks a guide with probability proportional to its
/// weight, then perturbs every coordinate with a Gaussian whose width is xi
/// times the mean absolute distance from the guide to the other members.
/// Out-of-range draws are reflected back into the bounds.
Eigen::VectorXd sample_candidate(const SolutionArchive& archive, double xi, std::span<const Bounds> bounds, Rng& rng);

/// Index of the guide chosen by sample_candidate for the same RNG state.
std::size_t select_guide(const SolutionArchive& archive, Rng& rng);

/// Reflects v into [lo, hi] until it lies inside.
double reflect_into(double v, Bounds b);

/// Merges candidates into the archive and keeps the best `capacity` entries.
/// Ties keep archive members ahead of candidates and earlier candidates
/// ahead of later ones. NaN objectives are discarded and counted.
SolutionArchive update_archive(SolutionArchive archive, std::span<const Candidate> candidates);

/// Empty archive with rank weights for `capacity` entries.
SolutionArchive make_archive(std::size_t capacity, double q);

/// Minimizes `objective` over the bounded box. The initial archive holds the
/// clipped `seeds` followed by uniform samples up to archive_size. Objective
/// evaluations may run concurrently; the result depends only on the seed.
OptResult optimize(const Objective& objective, std::size_t dims, const AcoConfig& config,
                   std::span<const Eigen::VectorXd> seeds = {}, const ArchiveObserver& observer = {});

} // namespace antfis
