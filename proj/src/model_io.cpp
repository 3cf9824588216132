#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "antfis/errors.hpp"
#include "antfis/text.hpp"
#include "antfis/trainer.hpp"

namespace antfis {

namespace {

constexpr std::string_view kMagic = "antfis-model";
constexpr int kVersion = 1;

std::string join(const Eigen::VectorXd& v)
{
    std::string out;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out += (i ? " " : "") + format_double(v(i));
    }
    return out;
}

std::string join(const std::vector<double>& v)
{
    return join(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
}

void write_report(std::ostream& out, std::string_view section, const EvalReport& r)
{
    out << '[' << section << "]\n"
        << "pearson_r=" << format_double(r.pearson_r) << '\n'
        << "rmse=" << format_double(r.rmse) << '\n'
        << "mae=" << format_double(r.mae) << '\n'
        << "n=" << r.n << "\n\n";
}

/// key=value lines grouped by [section], order preserved within a section.
class Document {
public:
    explicit Document(std::istream& in)
    {
        std::string line;
        std::string section;
        std::size_t line_no = 0;
        bool header_seen = false;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') {
                line.pop_back();
            }
            if (line.empty()) {
                continue;
            }
            if (!header_seen) {
                std::istringstream head(line);
                std::string magic;
                int version = 0;
                if (!(head >> magic >> version) || magic != kMagic) {
                    throw DataError("model: not an antfis model file");
                }
                if (version != kVersion) {
                    throw DataError("model: unsupported format version " + std::to_string(version));
                }
                header_seen = true;
                continue;
            }
            if (line.front() == '[') {
                if (line.back() != ']') {
                    throw DataError("model: line " + std::to_string(line_no) + ": bad section header");
                }
                section = line.substr(1, line.size() - 2);
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos || section.empty()) {
                throw DataError("model: line " + std::to_string(line_no) + ": expected key=value inside a section");
            }
            sections_[section][line.substr(0, eq)] = line.substr(eq + 1);
        }
        if (!header_seen) {
            throw DataError("model: empty file");
        }
    }

    bool has(const std::string& section) const { return sections_.contains(section); }

    const std::string& get(const std::string& section, const std::string& key) const
    {
        const auto s = sections_.find(section);
        if (s == sections_.end()) {
            throw DataError("model: missing section [" + section + "]");
        }
        const auto k = s->second.find(key);
        if (k == s->second.end()) {
            throw DataError("model: missing key '" + key + "' in [" + section + "]");
        }
        return k->second;
    }

    double real(const std::string& section, const std::string& key) const
    {
        double v = 0.0;
        if (!parse_double_strict(get(section, key), v)) {
            throw DataError("model: bad number for '" + key + "' in [" + section + "]");
        }
        return v;
    }

    std::uint64_t count(const std::string& section, const std::string& key) const
    {
        const auto& text = get(section, key);
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || ptr != text.data() + text.size()) {
            throw DataError("model: bad integer for '" + key + "' in [" + section + "]");
        }
        return v;
    }

    std::vector<double> reals(const std::string& section, const std::string& key) const
    {
        std::vector<double> out;
        std::istringstream words(get(section, key));
        std::string w;
        while (words >> w) {
            double v = 0.0;
            if (!parse_double_strict(w, v)) {
                throw DataError("model: bad number list for '" + key + "' in [" + section + "]");
            }
            out.push_back(v);
        }
        return out;
    }

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

EvalReport read_report(const Document& doc, const std::string& section)
{
    return EvalReport{doc.real(section, "pearson_r"), doc.real(section, "rmse"), doc.real(section, "mae"),
                      static_cast<std::size_t>(doc.count(section, "n"))};
}

} // namespace

void write_model(std::ostream& out, const TrainedModel& model)
{
    const auto& cfg = model.config;
    const auto& fis = model.fis;
    out << kMagic << ' ' << kVersion << "\n\n";

    out << "[config]\n"
        << "stage=" << arity(cfg.stage) << '\n'
        << "p=" << format_double(cfg.p) << '\n'
        << "seed=" << cfg.seed << '\n'
        << "n_rules=" << cfg.n_rules << '\n'
        << "damping=" << format_double(cfg.damping) << '\n'
        << "tune=" << to_string(cfg.tune) << '\n'
        << "center_margin=" << format_double(cfg.center_margin) << '\n'
        << "consequent_bound=" << format_double(cfg.consequent_bound) << '\n'
        << "fcm.m=" << format_double(cfg.fcm.m) << '\n'
        << "fcm.tol=" << format_double(cfg.fcm.tol) << '\n'
        << "fcm.max_iter=" << cfg.fcm.max_iter << '\n'
        << "fcm.seed=" << cfg.fcm.seed << '\n'
        << "aco.n_ants=" << cfg.aco.n_ants << '\n'
        << "aco.archive_size=" << cfg.aco.archive_size << '\n'
        << "aco.q=" << format_double(cfg.aco.q) << '\n'
        << "aco.xi=" << format_double(cfg.aco.xi) << '\n'
        << "aco.max_iter=" << cfg.aco.max_iter << '\n'
        << "aco.seed=" << cfg.aco.seed << "\n\n";

    out << "[normalizer]\n";
    for (std::size_t j = 0; j < fis.normalizer().arity(); ++j) {
        const auto [lo, hi] = fis.normalizer().ranges()[j];
        out << feature_name(j) << '=' << format_double(lo) << ' ' << format_double(hi) << '\n';
    }
    out << '\n';

    out << "[rules]\ncount=" << fis.rule_count() << "\n\n";
    for (std::size_t i = 0; i < fis.rule_count(); ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        out << "[rule." << i << "]\n"
            << "center=" << join(fis.centers().row(row).transpose()) << '\n'
            << "sigma=" << join(fis.sigmas().row(row).transpose()) << '\n'
            << "consequent=" << join(fis.consequents().row(row).transpose()) << "\n\n";
    }

    write_report(out, "train_report", model.train_report);
    write_report(out, "test_report", model.test_report);

    out << "[convergence]\n"
        << "best_rmse=" << join(model.convergence) << '\n';
}

TrainedModel read_model(std::istream& in)
{
    const Document doc(in);
    TrainedModel model;
    auto& cfg = model.config;

    cfg.stage = stage_from_arity(static_cast<int>(doc.count("config", "stage")));
    cfg.p = doc.real("config", "p");
    cfg.seed = doc.count("config", "seed");
    cfg.n_rules = doc.count("config", "n_rules");
    cfg.damping = doc.real("config", "damping");
    cfg.tune = tune_mode_from_string(doc.get("config", "tune"));
    cfg.center_margin = doc.real("config", "center_margin");
    cfg.consequent_bound = doc.real("config", "consequent_bound");
    cfg.fcm.m = doc.real("config", "fcm.m");
    cfg.fcm.tol = doc.real("config", "fcm.tol");
    cfg.fcm.max_iter = doc.count("config", "fcm.max_iter");
    cfg.fcm.seed = doc.count("config", "fcm.seed");
    cfg.fcm.c = cfg.n_rules;
    cfg.aco.n_ants = doc.count("config", "aco.n_ants");
    cfg.aco.archive_size = doc.count("config", "aco.archive_size");
    cfg.aco.q = doc.real("config", "aco.q");
    cfg.aco.xi = doc.real("config", "aco.xi");
    cfg.aco.max_iter = doc.count("config", "aco.max_iter");
    cfg.aco.seed = doc.count("config", "aco.seed");
    cfg.validate();

    const auto d = arity(cfg.stage);
    std::vector<std::pair<double, double>> ranges;
    for (std::size_t j = 0; j < d; ++j) {
        const auto pair = doc.reals("normalizer", std::string(feature_name(j)));
        if (pair.size() != 2) {
            throw DataError("model: normalizer entry for '" + std::string(feature_name(j)) + "' needs min and max");
        }
        ranges.emplace_back(pair[0], pair[1]);
    }

    const auto c = doc.count("rules", "count");
    if (c == 0) {
        throw DataError("model: rule count must be positive");
    }
    std::vector<Rule> rules;
    for (std::size_t i = 0; i < c; ++i) {
        const auto section = "rule." + std::to_string(i);
        const auto centers = doc.reals(section, "center");
        const auto sigmas = doc.reals(section, "sigma");
        const auto cons = doc.reals(section, "consequent");
        if (centers.size() != d || sigmas.size() != d || cons.size() != d + 1) {
            throw DataError("model: [" + section + "] arity does not match stage " + std::to_string(d));
        }
        Rule r;
        for (std::size_t j = 0; j < d; ++j) {
            r.premise.push_back({centers[j], sigmas[j]});
        }
        r.consequent = Eigen::Map<const Eigen::VectorXd>(cons.data(), static_cast<Eigen::Index>(cons.size()));
        rules.push_back(std::move(r));
    }
    model.fis = FisModel(rules, cfg.stage, Normalizer(std::move(ranges)));

    model.train_report = read_report(doc, "train_report");
    model.test_report = read_report(doc, "test_report");
    model.convergence = doc.reals("convergence", "best_rmse");
    return model;
}

void save_model(const std::filesystem::path& path, const TrainedModel& model)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("model: cannot write '" + path.string() + "'");
    }
    write_model(out, model);
}

TrainedModel load_model(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("model: cannot open '" + path.string() + "'");
    }
    try {
        return read_model(in);
    } catch (const ConfigError& e) {
        throw DataError(std::string("model: '") + path.string() + "': " + e.what());
    }
}

} // namespace antfis
