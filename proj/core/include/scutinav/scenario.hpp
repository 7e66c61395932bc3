#pragma once
// scutinav/scenario.hpp - spacecraft trajectory, observation schedule and
// simulated measurement campaigns.
//
// Time conventions. Reference-observatory epochs are MJD days. The spacecraft
// clock reads seconds since the campaign start epoch, offset from the
// reference clock by t_offset:  t_k = t'_k + t_offset  (both in seconds since
// the start epoch).

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "scutinav/detector.hpp"
#include "scutinav/lightcurve.hpp"

namespace scutinav::scenario {

/// Classical elements of a heliocentric ellipse. Angles in degrees; when
/// `ecliptic` is set they are referred to the J2000 ecliptic and rotated into
/// the equatorial frame on output.
struct KeplerElements {
    double epoch_mjd = 60555.0;
    double a_au = 1.0;
    double e = 0.0;
    double inclination_deg = 0.0;
    double raan_deg = 0.0;
    double arg_periapsis_deg = 0.0;
    double mean_anomaly_deg = 0.0; ///< at epoch
    double gm = 0.0;               ///< [au^3/day^2]; 0 selects the solar value
    bool ecliptic = true;

    void validate() const;
    double mu() const;
    double period_days() const;
};

struct StateVector {
    Eigen::Vector3d position;     ///< [au]
    Eigen::Vector3d velocity;     ///< [au/day]
};

/// Two-body state at time t [MJD] in the J2000 equatorial frame.
StateVector kepler_state(const KeplerElements& elements, double t_mjd);

class TrajectoryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Spacecraft position relative to the solar-system barycenter versus
/// reference time. Analytic Kepler, tabulated (cubic interpolation) or fixed.
class Trajectory {
public:
    enum class Kind { Kepler, Tabulated, Fixed };

    static Trajectory kepler(const KeplerElements& elements);
    /// Needs at least 4 rows with strictly increasing times.
    static Trajectory tabulated(std::vector<double> t_mjd, std::vector<Eigen::Vector3d> positions);
    static Trajectory fixed(const Eigen::Vector3d& position);

    Kind kind() const { return kind_; }
    /// Throws TrajectoryError outside the tabulated span.
    Eigen::Vector3d position_at(double t_mjd) const;
    bool covers(double t_mjd) const;

    const KeplerElements& elements() const { return elements_; }

private:
    struct Table;
    Kind kind_ = Kind::Fixed;
    KeplerElements elements_;
    Eigen::Vector3d fixed_ = Eigen::Vector3d::Zero();
    std::shared_ptr<const Table> table_;
};

// Trajectory file: header "t_days, x_au, y_au, z_au", one row per epoch.
Trajectory parse_trajectory_table(std::istream& in);
Trajectory load_trajectory_table(const std::filesystem::path& path);

struct CampaignConfig {
    std::vector<std::string> stars; ///< observation order
    double obs_time_s = 120.0;      ///< dwell per star per visit
    double exposure_s = 3.0;
    double cadence_s = 3.0;
    double slew_time_s = 60.0;
    int revisits = 20;
    double start_epoch_mjd = 60555.0;
    double true_clock_offset_s = 0.0;

    void validate() const;
    /// revisits x sum over stars of (obs_time + slew) [s]
    double total_span_s() const;
    double midpoint_mjd() const;
};

struct ObservationWindow {
    std::size_t star = 0; ///< index into CampaignConfig::stars
    double start_s = 0.0; ///< reference seconds since the start epoch
    double end_s = 0.0;
};

std::vector<ObservationWindow> build_schedule(const CampaignConfig& config);
/// Mid-exposure reference times [s since start epoch] within one window.
std::vector<double> exposure_midtimes(const ObservationWindow& window, const CampaignConfig& config);

struct Measurement {
    double t_prime_s = 0.0; ///< spacecraft clock
    double mag = 0.0;
    bool valid = true;
};

struct StarMeasurements {
    std::string star;
    double clock_epoch_mjd = 0.0; ///< reference epoch of t' = 0 when t_offset = 0
    std::vector<Measurement> samples;

    std::size_t valid_count() const;
};

struct MeasurementSet {
    std::vector<StarMeasurements> stars;
    std::vector<std::string> warnings; ///< not serialized

    const StarMeasurements& star(const std::string& name) const;
};

struct SimulationOptions {
    bool noise = true; ///< false: record model magnitudes directly, no detector chain
    Eigen::Vector3d reference = Eigen::Vector3d::Zero(); ///< b, defaults to the SSB
};

/// Simulates the full campaign. `truth` must hold one model per configured star,
/// in the same order. Deterministic for a given generator state.
MeasurementSet simulate_campaign(const Trajectory& trajectory, const CampaignConfig& config,
                                 std::span<const lightcurve::StarModel> truth,
                                 const detector::SensorConfig& sensor,
                                 const detector::BandConstants& band, std::mt19937_64& rng,
                                 const SimulationOptions& options = {});

// Measurement file: "# clock_epoch_mjd: <value>" metadata, header
// "star, t_prime_s, mag, valid", one sample per line grouped by star.
void write_measurements(std::ostream& out, const MeasurementSet& set);
MeasurementSet parse_measurements(std::istream& in);
void save_measurements(const std::filesystem::path& path, const MeasurementSet& set);
MeasurementSet load_measurements(const std::filesystem::path& path);

} // namespace scutinav::scenario
