// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../tools/cli.hpp"
#include "antfis/aco.hpp"
#include "antfis/fcm.hpp"
#include "antfis/fis.hpp"
#include "antfis/synthfield.hpp"
#include "antfis/trainer.hpp"
#include "helpers.hpp"

using namespace antfis;

namespace {

constexpr std::size_t kCanonicalN = 1500;
constexpr std::uint64_t kCanonicalSeed = 7;

struct Verdict {
    bool pass;
    std::string detail;
};

int g_failures = 0;

void report(int id, const std::string& title, const std::function<Verdict()>& check)
{
    Verdict v;
    try {
        v = check();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << title << " (" << v.detail << ")"
              << std::endl;
    if (!v.pass) {
        ++g_failures;
    }
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

int run_cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "antfis");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    if (code != cli::kOk) {
        throw std::runtime_error("cli failed: " + err.str());
    }
    return code;
}

/// test R per (stage, ants) from a sweep CSV.
std::map<std::pair<int, int>, double> read_sweep(const std::filesystem::path& path)
{
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    std::map<std::pair<int, int>, double> out;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string stage, ants, train_r, test_r;
        std::getline(ss, stage, ',');
        std::getline(ss, ants, ',');
        std::getline(ss, train_r, ',');
        std::getline(ss, test_r, ',');
        out[{std::stoi(stage), std::stoi(ants)}] = std::stod(test_r);
    }
    return out;
}

double best_for_stage(const std::map<std::pair<int, int>, double>& cells, int stage)
{
    double best = -2.0;
    for (const auto& [key, r] : cells) {
        if (key.first == stage) {
            best = std::max(best, r);
        }
    }
    return best;
}

} // namespace

int main()
{
    test::TempDir dir("acceptance");
    const auto data_csv = (dir / "canonical.csv").string();
    const DataSet canonical = generate_dataset(ReactorGeometry{}, PlumeParams{}, kCanonicalN, kCanonicalSeed);
    save_dataset(data_csv, canonical);

    TrainConfig reference;
    reference.reseed(kCanonicalSeed);

    report(1, "five-input fidelity: train R >= 0.95, test R >= 0.90, <= 60 s", [&] {
        const auto t0 = std::chrono::steady_clock::now();
        const TrainedModel m = train(canonical, reference);
        const double secs = seconds_since(t0);
        return Verdict{m.train_report.pearson_r >= 0.95 && m.test_report.pearson_r >= 0.90 && secs <= 60.0,
                       "train R " + fmt(m.train_report.pearson_r) + ", test R " + fmt(m.test_report.pearson_r) + ", "
                           + fmt(secs) + " s"};
    });

    // the 15-cell sweep backs criteria 2, 3, 4 and 8
    const auto sweep_a = dir / "sweep_a.csv";
    double sweep_secs = 0.0;
    std::map<std::pair<int, int>, double> cells;
    std::string sweep_error;
    try {
        const auto t0 = std::chrono::steady_clock::now();
        run_cli({"sweep", "--data", data_csv, "--out", sweep_a.string(), "--threads", "1"});
        sweep_secs = seconds_since(t0);
        cells = read_sweep(sweep_a);
    } catch (const std::exception& e) {
        sweep_error = e.what();
    }
    const auto sweep_check = [&](const std::function<Verdict()>& body) {
        return [&, body] { return sweep_error.empty() ? body() : Verdict{false, "sweep failed: " + sweep_error}; };
    };

    report(2, "low-information regime: stage-1 best test R <= 0.6 and >= 0.3 below stage 5", sweep_check([&] {
               const double s1 = best_for_stage(cells, 1);
               const double s5 = best_for_stage(cells, 5);
               return Verdict{s1 <= 0.6 && s5 - s1 >= 0.3, "stage 1 " + fmt(s1) + ", stage 5 " + fmt(s5)};
           }));

    report(3, "best test R non-decreasing over stages 1..5, sweep <= 15 min", sweep_check([&] {
               bool ok = sweep_secs <= 900.0 && cells.size() == 15;
               std::string detail;
               double prev = -2.0;
               for (int s = 1; s <= 5; ++s) {
                   const double b = best_for_stage(cells, s);
                   ok = ok && b >= prev;
                   prev = b;
                   detail += (s > 1 ? " " : "") + fmt(b);
               }
               return Verdict{ok, detail + ", " + fmt(sweep_secs) + " s"};
           }));

    report(4, "stages 1-3: test R spread across ant counts <= 0.1", sweep_check([&] {
               bool ok = true;
               std::string detail;
               for (int s = 1; s <= 3; ++s) {
                   double lo = 2.0, hi = -2.0;
                   for (int a : {20, 30, 40}) {
                       lo = std::min(lo, cells.at({s, a}));
                       hi = std::max(hi, cells.at({s, a}));
                   }
                   ok = ok && hi - lo <= 0.1;
                   detail += (s > 1 ? ", " : "") + std::string("stage ") + std::to_string(s) + " " + fmt(hi - lo);
               }
               return Verdict{ok, detail};
           }));

    report(5, "sphere optimum < 1e-3; best-so-far history non-increasing over 50 seeds", [&] {
        AcoConfig cfg;
        cfg.bounds.assign(5, Bounds{-1.0, 1.0});
        const Objective sphere = [](const Eigen::VectorXd& v) { return v.squaredNorm(); };
        double worst = 0.0;
        bool monotone = true;
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            cfg.seed = seed;
            const OptResult r = optimize(sphere, 5, cfg);
            worst = std::max(worst, r.best_objective);
            monotone = monotone && std::is_sorted(r.history.rbegin(), r.history.rend());
        }
        return Verdict{worst < 1e-3 && monotone, "worst best objective " + fmt(worst)};
    });

    report(6, "fuzzy c-means on two clouds 10 sigma apart: centers within 1e-3 of cloud means, objective non-increasing",
           [&] {
               const double sd = 0.05;
               std::mt19937_64 rng(2);
               std::normal_distribution<double> g(0.0, sd);
               Eigen::MatrixXd x(200, 2);
               for (Eigen::Index k = 0; k < 200; ++k) {
                   x(k, 0) = (k < 100 ? 0.2 : 0.2 + 10 * sd) + g(rng);
                   x(k, 1) = 0.5 + g(rng);
               }
               FcmConfig cfg;
               cfg.c = 2;
               const FcmResult r = fcm_cluster(x, cfg);
               const Eigen::RowVectorXd m0 = x.topRows(100).colwise().mean();
               const Eigen::RowVectorXd m1 = x.bottomRows(100).colwise().mean();
               const double err = std::min(std::max((r.centers.row(0) - m0).norm(), (r.centers.row(1) - m1).norm()),
                                           std::max((r.centers.row(1) - m0).norm(), (r.centers.row(0) - m1).norm()));
               bool monotone = true;
               for (std::size_t i = 1; i < r.objective_history.size(); ++i) {
                   monotone = monotone && r.objective_history[i] <= r.objective_history[i - 1];
               }
               return Verdict{err < 1e-3 && monotone, "center error " + fmt(err) + ", "
                                                          + std::to_string(r.objective_history.size()) + " iterations"};
           });

    report(7, "least squares: planted consequents within 1e-6, single-rule OLS within 1e-9", [&] {
        std::mt19937_64 rng(4);
        std::uniform_real_distribution<double> u(0.0, 1.0), v(-1.0, 1.0);
        Eigen::MatrixXd c(3, 2), s(3, 2), q(3, 3);
        c << 0.2, 0.2, 0.8, 0.3, 0.5, 0.8;
        s << 0.2, 0.25, 0.2, 0.3, 0.3, 0.2;
        for (Eigen::Index i = 0; i < q.size(); ++i) {
            q.data()[i] = v(rng);
        }
        const FisModel truth(c, s, q, FeatureStage::XY2, test::unit_normalizer(2));
        Eigen::MatrixXd x(600, 2);
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            x.data()[i] = u(rng);
        }
        const FisModel fitted = fit_consequents(truth.with_consequents(Eigen::MatrixXd::Zero(3, 3)), x, predict(truth, x));
        const double planted_err = (fitted.consequents() - q).cwiseAbs().maxCoeff();

        const FisModel one(Eigen::MatrixXd::Constant(1, 1, 0.5), Eigen::MatrixXd::Constant(1, 1, 0.3),
                           Eigen::MatrixXd::Zero(1, 2), FeatureStage::X1, test::unit_normalizer(1));
        Eigen::VectorXd x1(50), y1(50);
        for (Eigen::Index k = 0; k < 50; ++k) {
            x1(k) = u(rng);
            y1(k) = 0.3 * x1(k) + 0.05 + 0.01 * v(rng);
        }
        const double mx = x1.mean(), my = y1.mean();
        const double slope = ((x1.array() - mx) * (y1.array() - my)).sum() / (x1.array() - mx).square().sum();
        const double intercept = my - slope * mx;
        const FisModel line = fit_consequents(one, Eigen::MatrixXd(x1), y1);
        const double ols_err = std::max(std::abs(line.consequents()(0, 0) - slope),
                                        std::abs(line.consequents()(0, 1) - intercept));
        return Verdict{planted_err < 1e-6 && ols_err < 1e-9,
                       "planted error " + fmt(planted_err) + ", OLS error " + fmt(ols_err)};
    });

    report(8, "byte-identical model, report and sweep files on repeat and with 1 vs 8 threads", sweep_check([&] {
               std::vector<std::string> models, reports, sweeps;
               int run = 0;
               for (const char* threads : {"1", "1", "8"}) {
                   const auto tag = std::to_string(run++);
                   const auto model = (dir / ("model_" + tag + ".txt")).string();
                   const auto prefix = (dir / ("rep_" + tag)).string();
                   run_cli({"train", "--data", data_csv, "--out", model, "--threads", threads});
                   run_cli({"report", "--model", model, "--data", data_csv, "--out-prefix", prefix});
                   models.push_back(test::slurp(model));
                   reports.push_back(test::slurp(prefix + "_scatter_train.csv") + test::slurp(prefix + "_scatter_test.csv")
                                     + test::slurp(prefix + "_convergence.csv"));
               }
               sweeps.push_back(test::slurp(sweep_a));
               for (const char* threads : {"1", "8"}) {
                   const auto out = dir / ("sweep_" + std::string(threads) + ".csv");
                   run_cli({"sweep", "--data", data_csv, "--out", out.string(), "--threads", threads});
                   sweeps.push_back(test::slurp(out));
               }
               const auto all_same = [](const std::vector<std::string>& v) {
                   return !v.front().empty() && std::all_of(v.begin(), v.end(), [&](const auto& s) { return s == v.front(); });
               };
               const bool ok = all_same(models) && all_same(reports) && all_same(sweeps);
               return Verdict{ok, std::string("models ") + (all_same(models) ? "match" : "differ") + ", reports "
                                      + (all_same(reports) ? "match" : "differ") + ", sweeps "
                                      + (all_same(sweeps) ? "match" : "differ")};
           }));

    report(9, "unseen midpoints on the noise-free field: MAE <= 2x training MAE, predictions in [0, 1]", [&] {
        const ReactorGeometry geom;
        PlumeParams clean;
        clean.noise_sd = 0.0;
        const DataSet data = generate_dataset(geom, clean, kCanonicalN, kCanonicalSeed);
        const TrainedModel m = train(data, reference);
        const auto [train_part, test_part] = model_partitions(m, data);

        // midpoint of each training node and its nearest training neighbour
        const auto& nodes = train_part.samples;
        Eigen::MatrixXd mids(static_cast<Eigen::Index>(nodes.size()), 5);
        std::vector<double> truth(nodes.size());
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            double best = std::numeric_limits<double>::infinity();
            std::size_t nn = k;
            for (std::size_t j = 0; j < nodes.size(); ++j) {
                const double d2 = std::pow(nodes[k].x - nodes[j].x, 2) + std::pow(nodes[k].y - nodes[j].y, 2)
                                  + std::pow(nodes[k].z - nodes[j].z, 2);
                if (j != k && d2 < best) {
                    best = d2;
                    nn = j;
                }
            }
            const Sample s = sample_at({(nodes[k].x + nodes[nn].x) / 2, (nodes[k].y + nodes[nn].y) / 2,
                                        (nodes[k].z + nodes[nn].z) / 2},
                                       geom, clean);
            for (std::size_t j = 0; j < 5; ++j) {
                mids(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = feature(s, j);
            }
            truth[k] = s.volume_fraction;
        }
        const std::vector<double> pred = predict_points(m, mids);
        double mae = 0.0;
        bool in_range = true;
        for (std::size_t k = 0; k < pred.size(); ++k) {
            mae += std::abs(pred[k] - truth[k]);
            in_range = in_range && pred[k] >= 0.0 && pred[k] <= 1.0;
        }
        mae /= static_cast<double>(pred.size());

        // a grid reaching well past the training ranges
        Eigen::MatrixXd grid(7 * 7 * 7, 5);
        Eigen::Index row = 0;
        for (int i = 0; i < 7; ++i) {
            for (int j = 0; j < 7; ++j) {
                for (int l = 0; l < 7; ++l) {
                    grid.row(row++) << -0.3 + 0.1 * i, -0.3 + 0.1 * j, -1.0 + 0.8 * l, 9.5e4 + 2e3 * l, 0.1 * (i - j);
                }
            }
        }
        for (double p : predict_points(m, grid)) {
            in_range = in_range && p >= 0.0 && p <= 1.0;
        }
        const double train_mae = m.train_report.mae;
        return Verdict{mae <= 2.0 * train_mae && in_range,
                       "midpoint MAE " + fmt(mae) + ", training MAE " + fmt(train_mae)};
    });

    std::cout << (g_failures == 0 ? "all criteria passed" : std::to_string(g_failures) + " criteria failed") << std::endl;
    return g_failures == 0 ? 0 : 1;
}
