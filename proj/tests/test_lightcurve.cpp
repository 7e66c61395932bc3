#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "scutinav/lightcurve.hpp"
#include "scutinav/text_io.hpp"
#include "support.hpp"

using namespace scutinav;
using namespace scutinav::lightcurve;
using testing_support::model_value;

TEST(Eval, SingleModeHandValues) {
    const auto m = testing_support::single_mode(6.0, 0.1, 1.0, 0.0);
    EXPECT_NEAR(eval_reference(m, m.epoch_mjd), 6.0, 1e-15);
    EXPECT_NEAR(eval_reference(m, m.epoch_mjd + 0.25), 6.1, 1e-12);
}

TEST(Eval, ThreeModeMatchesTermByTermSum) {
    const auto m = testing_support::three_mode();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> t(m.epoch_mjd - 3.0, m.epoch_mjd + 3.0);
    for (int i = 0; i < 100; ++i) {
        const double x = t(rng);
        EXPECT_NEAR(eval_reference(m, x), model_value(m, x), 1e-12);
    }
}

TEST(Eval, PeriodicSingleMode) {
    const auto m = testing_support::single_mode(5.0, 0.2, 7.3, 1.1);
    for (double t : {0.1, 1.7, 3.33}) {
        EXPECT_NEAR(eval_reference(m, m.epoch_mjd + t), eval_reference(m, m.epoch_mjd + t + 1.0 / 7.3), 1e-10);
    }
}

TEST(Eval, StaysWithinAmplitudeEnvelope) {
    const auto m = testing_support::three_mode();
    for (double t = 0.0; t < 2.0; t += 0.001) {
        EXPECT_LE(std::abs(eval_reference(m, m.epoch_mjd + t) - m.mean_mag), m.total_amplitude() + 1e-12);
    }
}

TEST(Observer, ZeroBaselineAndOrthogonalOffsetAreNoOps) {
    const auto m = testing_support::three_mode();
    const Eigen::Vector3d b(0.3, -0.2, 0.1);
    const double t = m.epoch_mjd + 0.37;
    EXPECT_EQ(eval_observer(m, t, b, b), eval_reference(m, t));
    Eigen::Vector3d orth = m.los.vec().unitOrthogonal();
    EXPECT_NEAR(eval_observer(m, t, b + 2.0 * orth, b), eval_reference(m, t), 1e-12);
}

TEST(Observer, OneAuAlongLineOfSightIsOneLightTime) {
    const auto m = testing_support::three_mode();
    const Eigen::Vector3d b = Eigen::Vector3d::Zero();
    const Eigen::Vector3d p = m.los.vec();
    // 1 au / c from the defining constants
    const double light_s = 149'597'870'700.0 / 299'792'458.0;
    EXPECT_NEAR(light_s, 499.00478, 1e-5);
    EXPECT_NEAR(observer_time_shift(m.los, p, b) * 86400.0, light_s, 1e-9);
    const double t = m.epoch_mjd + 0.2;
    EXPECT_EQ(eval_observer(m, t, p, b), eval_reference(m, t + observer_time_shift(m.los, p, b)));
}

TEST(LosBound, SpotValues) {
    EXPECT_EQ(los_timing_error_bound(0.0, 5.0), 0.0);
    EXPECT_NEAR(los_timing_error_bound(5e-6, 1.0), 2.5e-3, 0.1 * 2.5e-3);
    EXPECT_NEAR(los_timing_error_bound(5e-6, 100.0), 0.25, 0.1 * 0.25);
}

TEST(LosBound, ChordNeverExceedsArc) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> th(0.0, M_PI), range(0.0, 100.0);
    for (int i = 0; i < 1000; ++i) {
        const double t = th(rng), r = range(rng);
        EXPECT_LE(2.0 * std::sin(t / 2.0) * r / kLightAuPerSecond, los_timing_error_bound(t, r) * (1 + 1e-12));
    }
}

TEST(ModelFile, RoundTrip) {
    auto m = testing_support::three_mode();
    m.star = "X Cae";
    const auto back = parse_model(format_model(m));
    EXPECT_EQ(back.star, m.star);
    EXPECT_EQ(back.mean_mag, m.mean_mag);
    EXPECT_EQ(back.epoch_mjd, m.epoch_mjd);
    ASSERT_EQ(back.modes.size(), m.modes.size());
    for (std::size_t i = 0; i < m.modes.size(); ++i) {
        EXPECT_NEAR(back.modes[i].amplitude, m.modes[i].amplitude, 1e-12);
        EXPECT_NEAR(back.modes[i].frequency, m.modes[i].frequency, 1e-12);
        EXPECT_NEAR(back.modes[i].phase, m.modes[i].phase, 1e-12);
    }
    EXPECT_NEAR((back.los.vec() - m.los.vec()).norm(), 0.0, 1e-12);
}

TEST(ModelFile, RejectsMalformed) { EXPECT_THROW(parse_model("{\"star\": 1}"), ParseError); }

TEST(Series, FluxNormalization) {
    PhotometricSeries s;
    s.times = {0.0, 0.1, 0.2};
    s.values = {1.0, 2.0, 4.0};
    s.kind = ValueKind::Flux;
    s.mean_mag = 6.0;
    const auto mags = s.magnitudes();
    EXPECT_NEAR(mags[1], 6.0, 1e-12);
    EXPECT_NEAR(mags[0] - mags[1], 2.5 * std::log10(2.0), 1e-12);
}

TEST(Series, FileRoundTrip) {
    PhotometricSeries s;
    s.times = {1.0, 1.5, 2.25};
    s.values = {6.01, 5.98, 6.03};
    s.source_label = "unit";
    std::ostringstream out;
    write_series(out, s);
    std::istringstream in(out.str());
    const auto back = parse_series(in);
    EXPECT_EQ(back.times, s.times);
    EXPECT_EQ(back.values, s.values);
    EXPECT_EQ(back.kind, ValueKind::Magnitude);
}

TEST(Series, RejectsNonIncreasingTimes) {
    PhotometricSeries s;
    s.times = {1.0, 1.0};
    s.values = {6.0, 6.0};
    EXPECT_THROW(s.validate(), std::invalid_argument);
}
