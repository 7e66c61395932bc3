#pragma once
// Helpers shared by the unit tests.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "scutinav/catalog.hpp"
#include "scutinav/lightcurve.hpp"
#include "scutinav/scenario.hpp"
#include "scutinav/units.hpp"

namespace testing_support {

inline std::string data_path(const std::string& rel) { return std::string(SCUTINAV_DATA_DIR) + "/" + rel; }

inline scutinav::lightcurve::StarModel single_mode(double a0, double amp, double freq, double phase,
                                                   double epoch = 60555.0) {
    scutinav::lightcurve::StarModel m;
    m.star = "test";
    m.mean_mag = a0;
    m.epoch_mjd = epoch;
    m.modes.push_back({amp, freq, phase});
    m.los = scutinav::catalog::los_vector(30.0, 20.0);
    return m;
}

inline scutinav::lightcurve::StarModel three_mode(double epoch = 60555.0) {
    auto m = single_mode(6.0, 0.08, 7.392, 0.3, epoch);
    m.modes.push_back({0.03, 6.046, 1.7});
    m.modes.push_back({0.015, 13.980, 4.1});
    return m;
}

/// Hand summation of the model, kept independent of the library evaluator.
inline double model_value(const scutinav::lightcurve::StarModel& m, double t_days) {
    double v = m.mean_mag;
    for (const auto& mode : m.modes) {
        v += mode.amplitude * std::sin(2.0 * M_PI * mode.frequency * (t_days - m.epoch_mjd) + mode.phase);
    }
    return v;
}

/// Samples of `model` seen with a true shift: m_k = m_b(t'_k + shift), t' in
/// seconds from `clock_epoch`, in runs of `per_run` samples every `cadence` s.
inline scutinav::scenario::StarMeasurements shifted_samples(const scutinav::lightcurve::StarModel& model,
                                                            double shift_s, int runs, int per_run,
                                                            double cadence_s, double run_spacing_s,
                                                            double noise_mag = 0.0, std::uint64_t seed = 1,
                                                            double clock_epoch = 60555.0) {
    scutinav::scenario::StarMeasurements s;
    s.star = model.star;
    s.clock_epoch_mjd = clock_epoch;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, noise_mag > 0.0 ? noise_mag : 1.0);
    for (int r = 0; r < runs; ++r) {
        for (int k = 0; k < per_run; ++k) {
            const double tp = r * run_spacing_s + k * cadence_s;
            double mag = model_value(model, clock_epoch + (tp + shift_s) / 86400.0);
            if (noise_mag > 0.0) mag += noise(rng);
            s.samples.push_back({tp, mag, true});
        }
    }
    return s;
}

} // namespace testing_support
