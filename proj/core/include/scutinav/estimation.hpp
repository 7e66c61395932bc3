#pragma once
// scutinav/estimation.hpp - per-star time-shift estimation.
//
//   J(dt, C) = (1/n) sum_k (m_k - C m_b(t'_k + dt))^2
//
// over the valid samples of one star. Candidate shifts are the local minima of
// the profile J(dt) = min_C J(dt, C) inside a caller-supplied window.

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "scutinav/lightcurve.hpp"
#include "scutinav/scenario.hpp"

namespace scutinav::estimation {

using lightcurve::StarModel;
using scenario::StarMeasurements;

class EstimationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ToaCandidate {
    double delta_t_s = 0.0; ///< dt [s]
    double scale = 1.0;     ///< C
    double objective = 0.0; ///< J at the minimum [mag^2]
    double sigma_s = 0.0;   ///< 1-sigma uncertainty of dt [s]
};

double objective(double delta_t_s, double scale, const StarMeasurements& meas, const StarModel& model);
double best_scale(double delta_t_s, const StarMeasurements& meas, const StarModel& model);
/// Gauss-Newton sigma^2 = J / ((n - 2) mean((C dm_b/dt)^2)), unfloored.
double estimate_sigma(const StarMeasurements& meas, const StarModel& model, double delta_t_s, double scale);

/// Precomputed view of one star's valid samples against a model. The profile
/// path reduces every evaluation to O(modes^2) using Gram sums of the
/// per-mode sine and cosine columns, so its cost does not depend on n.
class ShiftObjective {
public:
    ShiftObjective(const StarMeasurements& meas, const StarModel& model);

    std::size_t size() const { return tau_.size(); }

    /// Direct summation over the samples.
    double direct(double delta_t_s, double scale) const;
    double direct_best_scale(double delta_t_s) const;

    struct Profile {
        double objective = 0.0;
        double scale = 1.0;
    };
    /// J minimized over C at fixed dt.
    Profile profile(double delta_t_s) const;

    double sigma(double delta_t_s, double scale) const;
    /// Factor beta >= 1 by which a cluster-robust variance of the shift exceeds
    /// the white-noise one. Scores S_j = sum_k w_k e_k over clusters of g
    /// consecutive sample runs (w = C dm_b/dt), beta^2 = G/(G-1) sum_j S_j^2 /
    /// (s^2 sum_k w_k^2), maximized over g = 1 .. runs/4. Runs are split at gaps
    /// longer than three median sample spacings.
    double correlation_inflation(double delta_t_s, double scale) const;
    /// Shortest model period [s].
    double shortest_period_s() const { return shortest_period_s_; }

private:
    double model_at(double tau_s) const;
    double rate_at(double tau_s) const; ///< [mag/s]
    Profile profile_direct(double delta_t_s) const;

    std::vector<double> tau_;  ///< model-epoch-relative time of each valid sample at dt = 0 [s]
    std::vector<std::size_t> run_starts_; ///< first sample index of each contiguous run
    std::vector<double> mag_;
    double mean_mag_ = 0.0;    ///< A0
    Eigen::VectorXd amp_, omega_, phase_;
    double shortest_period_s_ = 0.0;

    // Gram sums over the valid samples, r_k = m_k - A0 and basis [sin_i ..., cos_i ...]
    double n_ = 0.0;
    double sum_r_ = 0.0;
    double sum_r2_ = 0.0;
    Eigen::VectorXd basis_sum_;  ///< sum_k basis
    Eigen::VectorXd basis_r_;    ///< sum_k basis * r_k
    Eigen::MatrixXd gram_;       ///< sum_k basis basis^T
};

struct EnumerationOptions {
    double step_fraction = 0.05;   ///< grid step as a fraction of the shortest model period
    double tolerance_s = 1e-4;     ///< refinement tolerance
    double merge_fraction = 1e-3;  ///< minima closer than this fraction of the shortest period merge
    double sigma_floor_s = 1e-3;   ///< lower bound on reported sigma
    /// Keep only candidates with J <= ratio * min J over the window; 0 keeps all.
    double max_objective_ratio = 0.0;
    /// Inflate sigma by correlation_inflation, so slowly varying model error
    /// (omitted modes) is not mistaken for averaging-down white noise.
    bool correlated_residuals = false;
};

/// Local minima of the profile objective inside [dt_min, dt_max], sorted by
/// delta_t. An empty or inverted window yields an empty list.
std::vector<ToaCandidate> enumerate_candidates(const StarMeasurements& meas, const StarModel& model,
                                               double dt_min_s, double dt_max_s,
                                               const EnumerationOptions& options = {});
std::vector<ToaCandidate> enumerate_candidates(const ShiftObjective& objective, double dt_min_s,
                                               double dt_max_s, const EnumerationOptions& options = {});

// ---------------------------------------------------------------------------
// Observed minus computed
// ---------------------------------------------------------------------------

struct OcSegment {
    std::string label;
    StarMeasurements measurements;
    double predicted_delta_t_s = 0.0;
};

struct OcSeries {
    std::vector<std::string> labels;
    std::vector<double> epochs_days; ///< reference time of the segment midpoint [MJD]
    std::vector<double> o_minus_c_s;
    std::vector<std::string> flagged; ///< segments excluded with the reason
    double slope_s_per_day = 0.0;
    double intercept_s = 0.0;         ///< trend value at the first epoch
    double detrended_sigma_s = 0.0;   ///< sqrt(sum r^2 / (n - 2)); 0 with fewer than 3 segments
};

/// Per-segment dt from the candidate nearest the prediction (searched within
/// one shortest period of it), then a least-squares linear trend.
OcSeries oc_analysis(std::span<const OcSegment> segments, const StarModel& model,
                     const EnumerationOptions& options = {});

} // namespace scutinav::estimation
