#include "antfis/synthfield.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <random>

#include "antfis/errors.hpp"
#include "antfis/rng.hpp"

namespace antfis {

namespace {

constexpr double kRampLength = 0.1; // m

void require_inside(Point3 p, const ReactorGeometry& geom)
{
    const double r2 = p.x * p.x + p.y * p.y;
    const double R = geom.radius();
    if (!std::isfinite(r2) || !std::isfinite(p.z) || r2 > R * R || p.z < 0.0 || p.z > geom.height) {
        throw ConfigError("synthfield: point lies outside the column");
    }
}

/// exp(-r^2 / 2 sigma^2) * ramp(z), shared by holdup and velocity.
double plume_shape(Point3 p, const ReactorGeometry& geom, const PlumeParams& params)
{
    const double ramp = plume_ramp(p.z, geom);
    if (ramp == 0.0) {
        return 0.0;
    }
    const double s = plume_sigma(p.z, geom, params);
    const double r2 = p.x * p.x + p.y * p.y;
    return std::exp(-r2 / (2.0 * s * s)) * ramp;
}

double parse_value(const std::string& key, const std::string& text)
{
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
        throw ConfigError("synthfield: bad value '" + text + "' for '" + key + "'");
    }
    return v;
}

std::string strip(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

} // namespace

void ReactorGeometry::validate() const
{
    if (!(diameter > 0.0) || !(sparger_height >= 0.0) || !(height > sparger_height)) {
        throw ConfigError("synthfield: geometry requires diameter > 0 and height > sparger_height >= 0");
    }
}

void PlumeParams::validate() const
{
    if (!(alpha_max > 0.0 && alpha_max < 1.0)) {
        throw ConfigError("synthfield: alpha_max must lie in (0, 1)");
    }
    if (!(sigma0 > 0.0) || !(spread >= 0.0) || !(noise_sd >= 0.0)) {
        throw ConfigError("synthfield: require sigma0 > 0, spread >= 0, noise_sd >= 0");
    }
    if (!std::isfinite(u_max) || !std::isfinite(rho_liquid) || !std::isfinite(g) || !std::isfinite(p_atm)) {
        throw ConfigError("synthfield: non-finite plume parameter");
    }
}

double plume_sigma(double z, const ReactorGeometry& geom, const PlumeParams& params)
{
    return params.sigma0 + params.spread * std::max(z - geom.sparger_height, 0.0);
}

double plume_ramp(double z, const ReactorGeometry& geom)
{
    return std::clamp((z - geom.sparger_height) / kRampLength, 0.0, 1.0);
}

double holdup_at(Point3 p, const ReactorGeometry& geom, const PlumeParams& params)
{
    require_inside(p, geom);
    return std::clamp(params.alpha_max * plume_shape(p, geom, params), 0.0, 1.0);
}

double mean_holdup(double z, const ReactorGeometry& geom, const PlumeParams& params)
{
    // (1 / pi R^2) * int_0^R exp(-r^2 / 2s^2) 2 pi r dr = (2 s^2 / R^2)(1 - exp(-R^2 / 2s^2))
    const double ramp = plume_ramp(z, geom);
    if (ramp == 0.0) {
        return 0.0;
    }
    const double s2 = std::pow(plume_sigma(z, geom, params), 2);
    const double R2 = geom.radius() * geom.radius();
    return params.alpha_max * ramp * (2.0 * s2 / R2) * -std::expm1(-R2 / (2.0 * s2));
}

double pressure_at(Point3 p, const ReactorGeometry& geom, const PlumeParams& params)
{
    require_inside(p, geom);
    const double head = geom.height - p.z;
    return params.p_atm + params.rho_liquid * params.g * head * (1.0 - mean_holdup(p.z, geom, params));
}

double velocity_at(Point3 p, const ReactorGeometry& geom, const PlumeParams& params)
{
    require_inside(p, geom);
    return params.u_max * plume_shape(p, geom, params);
}

Sample sample_at(Point3 p, const ReactorGeometry& geom, const PlumeParams& params)
{
    return Sample{p.x,
                  p.y,
                  p.z,
                  pressure_at(p, geom, params),
                  velocity_at(p, geom, params),
                  holdup_at(p, geom, params)};
}

DataSet generate_dataset(const ReactorGeometry& geom, const PlumeParams& params, std::size_t n, std::uint64_t seed)
{
    geom.validate();
    params.validate();
    if (n == 0) {
        throw ConfigError("synthfield: n must be at least 1");
    }

    DataSet data;
    data.stage = FeatureStage::XYZPV5;
    data.samples.reserve(n);

    auto rng = substream(seed, {0x73796e7468ULL});
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, 1.0);
    const double R = geom.radius();
    for (std::size_t i = 0; i < n; ++i) {
        // sqrt(U) gives the area-correct radial density p(r) = 2r / R^2
        const double r = R * std::sqrt(unit(rng));
        const double theta = 2.0 * std::numbers::pi * unit(rng);
        const double z = geom.height * unit(rng);
        const double eps = noise(rng);
        Point3 p{r * std::cos(theta), r * std::sin(theta), z};
        // cos/sin rounding can push r a hair past R
        const double r2 = p.x * p.x + p.y * p.y;
        if (r2 > R * R) {
            const double k = R / std::sqrt(r2);
            p.x *= k;
            p.y *= k;
        }
        Sample s = sample_at(p, geom, params);
        s.volume_fraction = std::clamp(s.volume_fraction + params.noise_sd * eps, 0.0, 1.0);
        data.samples.push_back(s);
    }
    return data;
}

void set_synth_param(ReactorGeometry& geom, PlumeParams& params, const std::string& key, const std::string& value)
{
    const double v = parse_value(key, value);
    if (key == "height") geom.height = v;
    else if (key == "diameter") geom.diameter = v;
    else if (key == "sparger_height") geom.sparger_height = v;
    else if (key == "alpha_max") params.alpha_max = v;
    else if (key == "sigma0") params.sigma0 = v;
    else if (key == "spread") params.spread = v;
    else if (key == "u_max") params.u_max = v;
    else if (key == "rho_liquid") params.rho_liquid = v;
    else if (key == "g") params.g = v;
    else if (key == "p_atm") params.p_atm = v;
    else if (key == "noise_sd") params.noise_sd = v;
    else throw ConfigError("synthfield: unknown parameter '" + key + "'");
}

void load_synth_config(std::istream& in, ReactorGeometry& geom, PlumeParams& params)
{
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = strip(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("synthfield: config line " + std::to_string(line_no) + ": expected key=value");
        }
        set_synth_param(geom, params, strip(line.substr(0, eq)), strip(line.substr(eq + 1)));
    }
}

void load_synth_config(const std::filesystem::path& path, ReactorGeometry& geom, PlumeParams& params)
{
    std::ifstream in(path);
    if (!in) {
        throw DataError("synthfield: cannot open config '" + path.string() + "'");
    }
    load_synth_config(in, geom, params);
}

} // namespace antfis
