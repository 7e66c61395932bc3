#pragma once
// scutinav/lightcurve.hpp - multi-mode sinusoidal light-curve models
//
//   m_b(t) = A0 + sum_i A_i sin(2 pi f_i (t - t0) + phi_i)
//
// evaluated at the reference observatory b, and at an observer p through the
// planar-wavefront time transfer m_p(t) = m_b(t + u.(p - b)/c).

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "scutinav/catalog.hpp"

namespace scutinav::lightcurve {

using catalog::LosVector;

struct PulsationMode {
    double amplitude = 0.0; ///< [mag], >= 0
    double frequency = 0.0; ///< [cycles/day], > 0
    double phase = 0.0;     ///< [rad], reduced to [0, 2 pi)
};

struct StarModel {
    std::string star;
    double mean_mag = 0.0;  ///< A0
    double epoch_mjd = 0.0; ///< t0 on the reference-observatory time scale [days]
    std::vector<PulsationMode> modes;
    LosVector los;

    /// Throws std::invalid_argument if the model breaks an invariant.
    void validate() const;
    /// Sorts modes by descending amplitude and reduces phases into [0, 2 pi).
    void normalize();

    double total_amplitude() const;
    double highest_frequency() const;
    double shortest_period_days() const { return 1.0 / highest_frequency(); }
};

/// Reduces an angle into [0, 2 pi).
double wrap_phase(double phase);

/// Magnitude at the reference observatory at reference time t [days].
double eval_reference(const StarModel& model, double t_days);
/// d m_b / dt [mag/day].
double eval_reference_rate(const StarModel& model, double t_days);

/// Geometric delay u.(p - b)/c [days]; positions in au.
double observer_time_shift(const LosVector& los, const Eigen::Vector3d& p, const Eigen::Vector3d& b);
/// Magnitude seen by an observer at p at reference time t.
double eval_observer(const StarModel& model, double t_days, const Eigen::Vector3d& p,
                     const Eigen::Vector3d& b);

/// Upper bound theta * range / c on the timing error of a fixed line of sight
/// misaligned by theta [rad] at distance range [au]. Returns seconds.
double los_timing_error_bound(double theta_rad, double range_au);
/// Exact timing error (u_fixed - u_true).r / c [s] for a baseline r [au].
double los_timing_error(const Eigen::Vector3d& u_fixed, const Eigen::Vector3d& u_true,
                        const Eigen::Vector3d& r_au);

// ---------------------------------------------------------------------------
// Model files
// ---------------------------------------------------------------------------
// JSON document:
//   { "star": "...", "los": [x, y, z], "mean_mag": A0, "epoch_mjd": t0,
//     "modes": [ { "amplitude": .., "frequency": .., "phase": .. }, ... ] }
// Doubles are written in shortest round-trip form.

std::string format_model(const StarModel& model);
StarModel parse_model(std::string_view document);
void save_model(const std::filesystem::path& path, const StarModel& model);
StarModel load_model(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Photometric time series
// ---------------------------------------------------------------------------

enum class ValueKind { Magnitude, Flux };

struct PhotometricSeries {
    std::vector<double> times;  ///< [days], strictly increasing
    std::vector<double> values; ///< magnitudes or normalized flux, see `kind`
    ValueKind kind = ValueKind::Magnitude;
    std::string time_scale = "TDB"; ///< label only
    std::string source_label;
    double mean_mag = 0.0; ///< reference magnitude used for flux -> mag

    void validate() const;
    double timespan() const { return times.empty() ? 0.0 : times.back() - times.front(); }
    double median_cadence() const;
    /// Values as magnitudes: m = mean_mag - 2.5 log10(flux / median flux) for flux series.
    std::vector<double> magnitudes() const;
};

// Series file: '#'-prefixed "key: value" metadata lines (time_scale,
// value_kind = magnitude|flux, mean_mag, source), then a "time, value" header
// and one comma-delimited sample per line.
PhotometricSeries parse_series(std::istream& in);
PhotometricSeries load_series(const std::filesystem::path& path);
void write_series(std::ostream& out, const PhotometricSeries& series);
void save_series(const std::filesystem::path& path, const PhotometricSeries& series);

// ---------------------------------------------------------------------------
// Synthetic pulsators
// ---------------------------------------------------------------------------

struct SyntheticOptions {
    int extra_modes = 5;          ///< secondary modes beyond the dominant one
    double min_ratio = 0.012;     ///< secondary amplitude range, relative to the dominant
    double max_ratio = 0.45;
    double min_separation = 0.25; ///< minimum spacing between mode frequencies [c/d]
    double max_frequency = 30.0;  ///< [c/d]
};

/// A plausible multi-mode pulsator consistent with a catalog row: dominant mode at
/// 1/period with semi-amplitude amplitude_vmag/2, secondary modes drawn from `seed`.
StarModel synthetic_model(const catalog::StarEntry& star, double epoch_mjd, std::uint64_t seed,
                          const SyntheticOptions& options = {});

/// Samples `model` at `times` with optional white Gaussian magnitude noise.
PhotometricSeries sample_series(const StarModel& model, std::span<const double> times,
                                double noise_mag, std::mt19937_64& rng);

/// Stable 64-bit hash of a string (FNV-1a), used to derive per-star seeds.
std::uint64_t stable_hash(std::string_view s);

} // namespace scutinav::lightcurve
