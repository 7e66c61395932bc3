#pragma once
// scutinav/harness.hpp - end-to-end runs, Monte Carlo campaigns and reports.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "scutinav/catalog.hpp"
#include "scutinav/detector.hpp"
#include "scutinav/estimation.hpp"
#include "scutinav/lightcurve.hpp"
#include "scutinav/navsolver.hpp"
#include "scutinav/scenario.hpp"

namespace scutinav::harness {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TrajectoryConfig {
    enum class Kind { Kepler, Table, Fixed };
    Kind kind = Kind::Kepler;
    scenario::KeplerElements elements;
    std::filesystem::path table_path;
    Eigen::Vector3d fixed_position = Eigen::Vector3d::Zero();

    scenario::Trajectory build() const;
};

/// Where the truth and onboard star models come from.
struct ModelConfig {
    enum class Source { Synthetic, Files };
    Source source = Source::Synthetic;
    // synthetic: a pulsator per catalog row, observed by a ground survey ending
    // at the campaign start, then fitted twice
    std::uint64_t seed = 2024;
    double survey_days = 10.0;
    double survey_cadence_s = 600.0;
    double survey_noise_mag = 1e-3;
    double truth_cutoff = 0.01;
    double onboard_cutoff = 0.05;
    double snr_min = 3.0;
    lightcurve::SyntheticOptions synthetic;
    // files: <dir>/<star>.json
    std::filesystem::path truth_dir;
    std::filesystem::path onboard_dir;

    bool operator==(const ModelConfig& other) const;
};

/// Enumeration settings of end-to-end runs: correlated-residual sigma on.
inline estimation::EnumerationOptions default_enumeration() {
    estimation::EnumerationOptions o;
    o.correlated_residuals = true;
    return o;
}

struct RunConfig {
    std::string label = "run";
    std::filesystem::path catalog_path;
    detector::SensorConfig sensor;
    detector::BandConstants band;
    TrajectoryConfig trajectory;
    scenario::CampaignConfig campaign;
    Eigen::Vector3d reference = Eigen::Vector3d::Zero(); ///< b
    navsolver::SearchRegion region;
    bool noise = true;
    ModelConfig models;
    estimation::EnumerationOptions enumeration = default_enumeration();
    navsolver::SearchOptions search;
    int samples = 1;
    std::uint64_t base_seed = 1;
    std::filesystem::path output_dir = "out";

    /// Throws ConfigError when a field or referenced file is invalid.
    void validate() const;
};

/// Parses the JSON run configuration. Relative paths resolve against `base_dir`.
RunConfig parse_run_config(std::string_view document, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

/// Star models in campaign order.
struct PreparedModels {
    std::vector<lightcurve::StarModel> truth;
    std::vector<lightcurve::StarModel> onboard;
    std::vector<catalog::LosVector> los;
};

PreparedModels prepare_models(const RunConfig& config);

/// Per-star candidate enumeration plus ambiguity resolution on one measurement set.
struct SolveOutcome {
    std::vector<std::vector<estimation::ToaCandidate>> candidates;
    std::vector<navsolver::StateSolution> solutions;
    std::optional<navsolver::StateSolution> selected;
    std::string failure;
};

/// Shift window for each star implied by the search region.
std::pair<double, double> candidate_window(const catalog::LosVector& los, const navsolver::SearchRegion& region,
                                           const Eigen::Vector3d& b);

SolveOutcome solve_measurements(const scenario::MeasurementSet& measurements,
                                std::span<const lightcurve::StarModel> onboard, const RunConfig& config);

struct InstanceRecord {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    bool solved = false;
    double position_error_au = 0.0;
    double time_error_s = 0.0; ///< signed, estimate minus truth
    double clock_offset_s = 0.0;
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    std::size_t solution_count = 0;
    std::size_t candidate_total = 0;
    double sigma_time_s = 0.0;     ///< WLS 1-sigma clock offset
    double sigma_range_au = 0.0;   ///< WLS 1-sigma along the position direction
    double cov_time_range = 0.0;   ///< covariance of the two above [s au]
    double runtime_s = 0.0;        ///< wall clock, kept out of the deterministic reports
    std::string failure;
};

InstanceRecord run_single(const RunConfig& config, const PreparedModels& models, std::uint64_t seed,
                          std::size_t index = 0);

struct Aggregate {
    std::size_t count = 0;
    double mean = 0.0;
    std::optional<double> stddev; ///< sample standard deviation, absent below 2 values
};

Aggregate aggregate(std::span<const double> values);

struct Ellipse {
    Eigen::Vector2d center = Eigen::Vector2d::Zero(); ///< (time error [s], position error [au])
    Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();
    std::vector<Eigen::Vector2d> outline;             ///< closed polyline at 3 sigma
};

/// 3-sigma outline of a 2-D covariance with `points` vertices (first == last).
Ellipse make_ellipse(const Eigen::Vector2d& center, const Eigen::Matrix2d& covariance, int points = 181);

struct MonteCarloReport {
    std::string label;
    std::string sensor;
    std::uint64_t base_seed = 0;
    std::vector<InstanceRecord> instances;
    std::size_t solved = 0;
    Aggregate position_error;   ///< over solved instances [au]
    Aggregate time_error;       ///< signed [s]
    Aggregate abs_time_error;   ///< [s]
    std::optional<Ellipse> numerical; ///< from the sample covariance of the errors
    std::optional<Ellipse> analytic;  ///< from the mean WLS covariance
    double runtime_s = 0.0;
};

MonteCarloReport summarize(const RunConfig& config, std::vector<InstanceRecord> instances);
MonteCarloReport run_monte_carlo(const RunConfig& config);
MonteCarloReport run_monte_carlo(const RunConfig& config, const PreparedModels& models);

/// Writes instances.csv, summary.json, ellipse_numerical.csv, ellipse_analytic.csv
/// (all deterministic) and timing.csv (wall clock).
void emit_reports(const MonteCarloReport& report, const std::filesystem::path& outdir);
std::string format_instances(const MonteCarloReport& report);
std::string format_summary(const MonteCarloReport& report);

struct CaseSpec {
    int number = 1;
    double obs_time_s = 120.0;
    double exposure_s = 3.0;
    int revisits = 20;
};

/// Cases 1-7 of the observation-parameter study.
std::vector<CaseSpec> standard_cases();
RunConfig apply_case(RunConfig config, const CaseSpec& spec);

struct CaseRow {
    std::string sensor;
    CaseSpec spec;
    MonteCarloReport report;
    std::string error; ///< non-empty when the case could not run
};

/// Runs every config; a failing case is recorded and the grid continues.
std::vector<CaseRow> run_case_grid(std::span<const RunConfig> configs, std::span<const CaseSpec> specs);
std::string format_case_table(std::span<const CaseRow> rows);

} // namespace scutinav::harness
