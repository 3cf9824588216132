#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "antfis/dataset.hpp"
#include "antfis/errors.hpp"
#include "antfis/synthfield.hpp"
#include "antfis/text.hpp"
#include "antfis/trainer.hpp"

namespace antfis::cli {

namespace {

constexpr const char* kRef = " [reference experiment setting]";

/// Training flags shared by `train` and `sweep`.
struct TrainFlags {
    int stage = 5;
    std::size_t ants = 20;
    std::size_t iters = 100;
    double p = 0.70;
    std::uint64_t seed = 7;
    std::size_t rules = 10;
    std::size_t archive = 25;
    double q = 0.1;
    double xi = 0.85;
    double damping = kDefaultDamping;
    std::string tune = "premise";
    double fcm_m = 2.0;
    double fcm_tol = 1e-5;
    std::size_t fcm_iters = 200;
    unsigned threads = 1;

    void attach(CLI::App& cmd, bool with_stage_and_ants)
    {
        if (with_stage_and_ants) {
            cmd.add_option("--stage", stage, "Number of inputs, 1..5 (x, y, z, pressure, velocity)")
                ->check(CLI::Range(1, 5))
                ->capture_default_str();
            cmd.add_option("--ants", ants, std::string("Candidates sampled per iteration") + kRef)
                ->check(CLI::PositiveNumber)
                ->capture_default_str();
        }
        cmd.add_option("--iters", iters, std::string("Optimizer iterations") + kRef)
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        cmd.add_option("--p", p, std::string("Training fraction") + kRef)->capture_default_str();
        cmd.add_option("--seed", seed, "Master seed for split, clustering and optimizer")->capture_default_str();
        cmd.add_option("--rules", rules, "Rule count (fuzzy c-means clusters)")->capture_default_str();
        cmd.add_option("--archive", archive, "Solution archive size")->capture_default_str();
        cmd.add_option("--q", q, "Archive rank locality")->capture_default_str();
        cmd.add_option("--xi", xi, "Sampling width factor")->capture_default_str();
        cmd.add_option("--damping", damping, "Least-squares damping")->capture_default_str();
        cmd.add_option("--tune", tune, "Parameters searched by the colony")
            ->check(CLI::IsMember({"premise", "consequent", "both"}))
            ->capture_default_str();
        cmd.add_option("--fcm-m", fcm_m, "Fuzzy c-means exponent")->capture_default_str();
        cmd.add_option("--fcm-tol", fcm_tol, "Fuzzy c-means objective tolerance")->capture_default_str();
        cmd.add_option("--fcm-iters", fcm_iters, "Fuzzy c-means iteration cap")->capture_default_str();
        cmd.add_option("--threads", threads, "Worker threads (results do not depend on it)")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    }

    TrainConfig config() const
    {
        TrainConfig cfg;
        cfg.stage = stage_from_arity(stage);
        cfg.p = p;
        cfg.n_rules = rules;
        cfg.damping = damping;
        cfg.tune = tune_mode_from_string(tune);
        cfg.fcm.m = fcm_m;
        cfg.fcm.tol = fcm_tol;
        cfg.fcm.max_iter = fcm_iters;
        cfg.fcm.c = rules;
        cfg.aco.n_ants = ants;
        cfg.aco.max_iter = iters;
        cfg.aco.archive_size = archive;
        cfg.aco.q = q;
        cfg.aco.xi = xi;
        cfg.threads = threads;
        cfg.reseed(seed);
        cfg.validate();
        return cfg;
    }
};

std::ofstream open_out(const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cli: cannot write '" + path + "'");
    }
    return out;
}

/// Parses "1-5", "1,3,5" or mixes such as "1-2,5".
std::vector<int> parse_int_list(const std::string& text)
{
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            if (const auto dash = item.find('-'); dash != std::string::npos && dash > 0) {
                const int lo = std::stoi(item.substr(0, dash));
                const int hi = std::stoi(item.substr(dash + 1));
                if (hi < lo) {
                    throw ConfigError("cli: empty range '" + item + "'");
                }
                for (int v = lo; v <= hi; ++v) {
                    out.push_back(v);
                }
            } else {
                std::size_t used = 0;
                out.push_back(std::stoi(item, &used));
                if (used != item.size()) {
                    throw std::invalid_argument(item);
                }
            }
        } catch (const std::logic_error&) {
            throw ConfigError("cli: cannot parse list item '" + item + "'");
        }
    }
    if (out.empty()) {
        throw ConfigError("cli: empty list '" + text + "'");
    }
    return out;
}

/// Feature rows from a CSV whose header starts with the model's feature
/// columns; trailing columns are ignored.
Eigen::MatrixXd read_points(const std::string& path, std::size_t arity, std::vector<std::string>& rows_text)
{
    std::ifstream in(path);
    if (!in) {
        throw DataError("cli: cannot open '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("cli: '" + path + "' is empty");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            header.push_back(cell);
        }
    }
    if (header.size() < arity) {
        throw DataError("cli: '" + path + "' has fewer columns than the model's inputs");
    }
    for (std::size_t j = 0; j < arity; ++j) {
        if (header[j] != feature_name(j)) {
            throw DataError("cli: '" + path + "' column " + std::to_string(j + 1) + " must be '"
                            + std::string(feature_name(j)) + "'");
        }
    }

    std::vector<double> values;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        std::string kept;
        for (std::size_t j = 0; j < arity; ++j) {
            double v = 0.0;
            if (!std::getline(ss, cell, ',') || !parse_double_strict(cell, v)) {
                throw DataError("cli: '" + path + "' row " + std::to_string(line_no) + ": bad value in column "
                                + std::to_string(j + 1));
            }
            values.push_back(v);
            kept += (j ? "," : "") + cell;
        }
        rows_text.push_back(std::move(kept));
    }
    const auto n = static_cast<Eigen::Index>(rows_text.size());
    Eigen::MatrixXd m(n, static_cast<Eigen::Index>(arity));
    for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            m(k, j) = values[static_cast<std::size_t>(k * m.cols() + j)];
        }
    }
    return m;
}

void write_scatter(const std::string& path, const TrainedModel& model, const DataSet& part)
{
    auto out = open_out(path);
    const auto pred = predict_points(model, part.features());
    out << "target,prediction\n";
    for (std::size_t k = 0; k < part.size(); ++k) {
        out << format_double(part.samples[k].volume_fraction) << ',' << format_double(pred[k]) << '\n';
    }
}

std::string metrics_line(std::string_view tag, const EvalReport& r)
{
    return std::string(tag) + "R=" + format_double(r.pearson_r) + " " + std::string(tag)
           + "RMSE=" + format_double(r.rmse) + " " + std::string(tag) + "MAE=" + format_double(r.mae);
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Fuzzy inference surrogate for bubble column gas holdup, tuned by an ant colony optimizer",
                 "antfis"};
    app.require_subcommand(1);

    // gen-data
    auto* gen = app.add_subcommand("gen-data", "Write a synthetic bubble column node table as CSV");
    std::size_t gen_n = 1500;
    std::uint64_t gen_seed = 7;
    std::string gen_out, gen_config;
    std::vector<std::string> gen_params;
    gen->add_option("--n", gen_n, std::string("Number of nodes") + kRef)->check(CLI::PositiveNumber)->capture_default_str();
    gen->add_option("--seed", gen_seed, "Sampling and noise seed")->capture_default_str();
    gen->add_option("--out", gen_out, "Output CSV path")->required();
    gen->add_option("--config", gen_config, "key=value file of geometry and plume parameters");
    gen->add_option("--param", gen_params,
                    "Override one parameter, e.g. --param noise_sd=0 (keys: height, diameter, sparger_height, "
                    "alpha_max, sigma0, spread, u_max, rho_liquid, g, p_atm, noise_sd)");

    // train
    auto* train_cmd = app.add_subcommand("train", "Train a model and write it to a file");
    TrainFlags train_flags;
    std::string train_data, train_out;
    train_cmd->add_option("--data", train_data, "Input CSV")->required();
    train_cmd->add_option("--out", train_out, "Model file to write")->required();
    train_flags.attach(*train_cmd, true);

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a model on every row of a CSV");
    std::string eval_model, eval_data;
    eval_cmd->add_option("--model", eval_model, "Model file")->required();
    eval_cmd->add_option("--data", eval_data, "Input CSV")->required();

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "Train over a grid of feature stages and ant counts");
    TrainFlags sweep_flags;
    std::string sweep_data, sweep_out, sweep_stages = "1-5", sweep_ants = "20,30,40";
    sweep_cmd->add_option("--data", sweep_data, "Input CSV")->required();
    sweep_cmd->add_option("--out", sweep_out, "Output CSV of per-cell R values")->required();
    sweep_cmd->add_option("--stages", sweep_stages, std::string("Stages, e.g. 1-5 or 1,3,5") + kRef)->capture_default_str();
    sweep_cmd->add_option("--ants", sweep_ants, std::string("Ant counts, comma separated") + kRef)->capture_default_str();
    sweep_flags.attach(*sweep_cmd, false);

    // predict
    auto* predict_cmd = app.add_subcommand("predict", "Predict the volume fraction at new nodes");
    std::string predict_model, predict_points_path, predict_out;
    predict_cmd->add_option("--model", predict_model, "Model file")->required();
    predict_cmd->add_option("--points", predict_points_path,
                            "CSV whose leading columns are the model's inputs (x,y,z,pressure,air_superficial_velocity "
                            "truncated to the stage)")
        ->required();
    predict_cmd->add_option("--out", predict_out, "Output CSV: inputs plus a prediction column")->required();

    // report
    auto* report_cmd = app.add_subcommand("report", "Write scatter and convergence data for plotting");
    std::string report_model, report_data, report_prefix;
    report_cmd->add_option("--model", report_model, "Model file")->required();
    report_cmd->add_option("--data", report_data, "The CSV the model was trained on")->required();
    report_cmd->add_option("--out-prefix", report_prefix, "Prefix for <prefix>_scatter_{train,test}.csv and "
                                                           "<prefix>_convergence.csv")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return kOk;
    } catch (const CLI::ParseError& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        err << "antfis: " << msg << '\n';
        return kUsageError;
    }

    try {
        if (*gen) {
            ReactorGeometry geom;
            PlumeParams params;
            if (!gen_config.empty()) {
                load_synth_config(gen_config, geom, params);
            }
            for (const auto& kv : gen_params) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) {
                    throw ConfigError("cli: --param expects key=value, got '" + kv + "'");
                }
                set_synth_param(geom, params, kv.substr(0, eq), kv.substr(eq + 1));
            }
            const DataSet data = generate_dataset(geom, params, gen_n, gen_seed);
            auto file = open_out(gen_out);
            write_dataset(file, data);
            out << "wrote " << data.size() << " rows to " << gen_out << '\n';
        } else if (*train_cmd) {
            const TrainConfig cfg = train_flags.config();
            const DataSet data = load_dataset(train_data, cfg.stage);
            const TrainedModel model = train(data, cfg);
            auto file = open_out(train_out);
            write_model(file, model);
            const EvalReport all = evaluate(model, data);
            out << "train_R=" << format_double(model.train_report.pearson_r)
                << " test_R=" << format_double(model.test_report.pearson_r) << " all_R=" << format_double(all.pearson_r)
                << " train_RMSE=" << format_double(model.train_report.rmse)
                << " test_RMSE=" << format_double(model.test_report.rmse) << '\n';
        } else if (*eval_cmd) {
            const TrainedModel model = load_model(eval_model);
            const DataSet data = load_dataset(eval_data, model.config.stage);
            const EvalReport r = evaluate(model, data);
            out << metrics_line("", r) << " n=" << r.n << '\n';
        } else if (*sweep_cmd) {
            TrainConfig base = sweep_flags.config();
            std::vector<FeatureStage> stages;
            for (int s : parse_int_list(sweep_stages)) {
                stages.push_back(stage_from_arity(s));
            }
            std::vector<std::size_t> ants;
            for (int a : parse_int_list(sweep_ants)) {
                if (a < 1) {
                    throw ConfigError("cli: ant counts must be positive");
                }
                ants.push_back(static_cast<std::size_t>(a));
            }
            const DataSet data = load_dataset(sweep_data, FeatureStage::XYZPV5);
            const SweepReport report = sweep(data, stages, ants, base, sweep_flags.threads);
            auto file = open_out(sweep_out);
            write_sweep_csv(file, report);
            for (const auto& c : report.cells) {
                out << "stage=" << arity(c.stage) << " ants=" << c.n_ants << " train_R=" << format_double(c.train.pearson_r)
                    << " test_R=" << format_double(c.test.pearson_r) << '\n';
            }
        } else if (*predict_cmd) {
            const TrainedModel model = load_model(predict_model);
            std::vector<std::string> rows;
            const Eigen::MatrixXd points = read_points(predict_points_path, model.fis.arity(), rows);
            const auto pred = predict_points(model, points);
            auto file = open_out(predict_out);
            for (std::size_t j = 0; j < model.fis.arity(); ++j) {
                file << feature_name(j) << ',';
            }
            file << "prediction\n";
            for (std::size_t k = 0; k < pred.size(); ++k) {
                file << rows[k] << ',' << format_double(pred[k]) << '\n';
            }
            out << "wrote " << pred.size() << " predictions to " << predict_out << '\n';
        } else if (*report_cmd) {
            const TrainedModel model = load_model(report_model);
            const DataSet data = load_dataset(report_data, model.config.stage);
            const auto [train_part, test_part] = model_partitions(model, data);
            write_scatter(report_prefix + "_scatter_train.csv", model, train_part);
            write_scatter(report_prefix + "_scatter_test.csv", model, test_part);
            auto conv = open_out(report_prefix + "_convergence.csv");
            conv << "iteration,best_rmse\n";
            for (std::size_t i = 0; i < model.convergence.size(); ++i) {
                conv << i + 1 << ',' << format_double(model.convergence[i]) << '\n';
            }
            out << "wrote " << report_prefix << "_scatter_train.csv (" << train_part.size() << " rows), "
                << report_prefix << "_scatter_test.csv (" << test_part.size() << " rows), " << report_prefix
                << "_convergence.csv (" << model.convergence.size() << " rows)\n";
        }
    } catch (const DataError& e) {
        err << "antfis: " << e.what() << '\n';
        return kDataError;
    } catch (const NumericalError& e) {
        err << "antfis: " << e.what() << '\n';
        return kNumericalError;
    } catch (const ConfigError& e) {
        err << "antfis: " << e.what() << '\n';
        return kUsageError;
    }
    return kOk;
}

} // namespace antfis::cli
