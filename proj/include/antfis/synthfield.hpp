#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "antfis/dataset.hpp"

namespace antfis {

/// Cylindrical column, axis along z, base at z = 0.
struct ReactorGeometry {
    double height = 2.6;         // m
    double diameter = 0.288;     // m
    double sparger_height = 0.5; // m, plume origin on the axis

    double radius() const noexcept { return 0.5 * diameter; }
    /// Throws ConfigError when an invariant is violated.
    void validate() const;
};

/// Gaussian plume stand-in for the gas holdup, velocity and pressure fields.
struct PlumeParams {
    double alpha_max = 0.15;
    double sigma0 = 0.03; // m
    double spread = 0.02; // plume half-width growth per metre
    double u_max = 0.25;  // m/s
    double rho_liquid = 998.0;
    double g = 9.81;
    double p_atm = 101325.0;
    double noise_sd = 0.005;

    void validate() const;
};

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

/// Plume half-width at height z.
double plume_sigma(double z, const ReactorGeometry& geom, const PlumeParams& params);
/// Linear onset over the first 0.1 m above the sparger, in [0, 1].
double plume_ramp(double z, const ReactorGeometry& geom);

double holdup_at(Point3 p, const ReactorGeometry& geom, const PlumeParams& params);
/// Cross-sectional mean of holdup_at over the disc at height z.
double mean_holdup(double z, const ReactorGeometry& geom, const PlumeParams& params);
double pressure_at(Point3 p, const ReactorGeometry& geom, const PlumeParams& params);
double velocity_at(Point3 p, const ReactorGeometry& geom, const PlumeParams& params);

/// Noise-free sample at a point, all five features plus the holdup target.
Sample sample_at(Point3 p, const ReactorGeometry& geom, const PlumeParams& params);

/// n nodes drawn uniformly over the cylinder volume. Deterministic under seed.
DataSet generate_dataset(const ReactorGeometry& geom, const PlumeParams& params, std::size_t n, std::uint64_t seed);

/// Applies one `key=value` assignment to geometry or plume parameters. Keys
/// are the field names above. Throws ConfigError on unknown keys or bad values.
void set_synth_param(ReactorGeometry& geom, PlumeParams& params, const std::string& key, const std::string& value);

/// Reads `key=value` lines ('#' starts a comment) and applies them.
void load_synth_config(std::istream& in, ReactorGeometry& geom, PlumeParams& params);
void load_synth_config(const std::filesystem::path& path, ReactorGeometry& geom, PlumeParams& params);

} // namespace antfis
