#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "scutinav/detector.hpp"

using namespace scutinav::detector;

namespace {

// CODATA values, written out here rather than taken from the library
constexpr double kH = 6.62607015e-27;   // erg s
constexpr double kC = 2.99792458e10;    // cm/s
constexpr double kE = 1.602176634e-19;  // C

double hand_flux(double m) {
    const double q = kH * kC / 551e-7;
    return 3.631e-9 * 880.0 * std::pow(10.0, -m / 2.5) / q;
}

double round_half_away(double x) { return x < 0 ? -std::floor(-x + 0.5) : std::floor(x + 0.5); }

} // namespace

TEST(Detector, ZeroMagnitudePhotonFlux) {
    const BandConstants band;
    EXPECT_NEAR(mag_to_photon_flux(0.0, band), hand_flux(0.0), 1e-9 * hand_flux(0.0));
    EXPECT_NEAR(mag_to_photon_flux(0.0, band), 8.86e5, 0.01e5);
}

TEST(Detector, FivePointFiveMagnitudesIsFactorTen) {
    const BandConstants band;
    for (double m : {0.0, 3.1, 6.28}) {
        EXPECT_NEAR(mag_to_photon_flux(m, band) / mag_to_photon_flux(m + 2.5, band), 10.0, 1e-12);
    }
    EXPECT_NEAR(mag_to_photon_flux(6.28, band), hand_flux(6.28), 1e-9 * hand_flux(6.28));
}

TEST(Detector, SourceSignalChainedFormula) {
    const auto cam = SensorConfig::mapcam();
    const BandConstants band;
    const double area = M_PI * std::pow(3.8 / 2.0, 2);
    const double expected = round_half_away(hand_flux(6.0) * area * 3.0) * 0.35 / 4.5;
    EXPECT_NEAR(expected_source_signal(6.0, cam, band, 3.0), expected, 1e-9 * expected);
}

TEST(Detector, FaintSourceRoundsToZero) {
    const auto cam = SensorConfig::mapcam();
    EXPECT_EQ(expected_source_signal(40.0, cam, {}, 3.0), 0.0);
}

TEST(Detector, PolyCamOverMapCamIsApertureRatio) {
    const BandConstants band;
    const double ratio = source_photons(6.0, SensorConfig::polycam(), band, 3.0) /
                         source_photons(6.0, SensorConfig::mapcam(), band, 3.0);
    EXPECT_NEAR(ratio, std::pow(175.0 / 38.0, 2), 1e-3 * ratio);
}

TEST(Detector, SourceSignalLinearInExposure) {
    const auto cam = SensorConfig::mapcam();
    const BandConstants band;
    const double quantum = cam.quantum_efficiency / cam.gain_e_per_adu;
    for (double m : {3.0, 5.0, 6.5}) {
        EXPECT_NEAR(expected_source_signal(m, cam, band, 6.0), 2.0 * expected_source_signal(m, cam, band, 3.0),
                    quantum * (1.0 + 1e-9));
        EXPECT_GT(expected_source_signal(m, cam, band, 3.0), expected_source_signal(m + 0.1, cam, band, 3.0));
    }
}

TEST(Detector, SkySignalUnitAudit) {
    const auto cam = SensorConfig::mapcam();
    const BandConstants band;
    // pixel solid angle: A / f^2 in sr, then arcsec^2
    const double omega = 55.25e-12 / std::pow(0.125, 2) * std::pow(180.0 * 3600.0 / M_PI, 2);
    EXPECT_NEAR(pixel_solid_angle_arcsec2(cam), omega, 1e-9 * omega);
    const double expected = round_half_away(hand_flux(21.5) * omega * 9 * 3.0) * 0.35 / 4.5;
    EXPECT_NEAR(expected_sky_signal(cam, band, 3.0), expected, 1e-9 * std::max(1.0, expected));
}

TEST(Detector, SkyAndDarkVanishWithoutPixels) {
    auto cam = SensorConfig::mapcam();
    cam.npix = 0;
    EXPECT_EQ(expected_sky_signal(cam, {}, 3.0), 0.0);
    EXPECT_EQ(expected_dark_signal(cam, 3.0), 0.0);
    cam = SensorConfig::mapcam();
    cam.dark_current_pA_cm2 = 0.0;
    EXPECT_EQ(expected_dark_signal(cam, 3.0), 0.0);
}

TEST(Detector, DarkSignalUnitConverted) {
    const auto cam = SensorConfig::mapcam();
    const double electrons_per_s_cm2 = 0.065e-12 / kE;
    const double area_cm2 = 55.25e-8;
    const double expected = round_half_away(electrons_per_s_cm2 * area_cm2 * 9 * 3.0) * 0.35 / 4.5;
    EXPECT_NEAR(expected_dark_signal(cam, 3.0), expected, 1e-12);
}

TEST(Detector, RoundTripWithinMilliMag) {
    const BandConstants band;
    for (const auto& cam : {SensorConfig::mapcam(), SensorConfig::polycam()}) {
        for (double m = 1.0; m < 7.5; m += 0.25) {
            const double s = expected_source_signal(m, cam, band, 3.0);
            if (s <= 1e3) continue;
            DigitalSample d;
            d.exposure_s = 3.0;
            d.total_signal =
                std::llround(s + expected_sky_signal(cam, band, 3.0) + expected_dark_signal(cam, 3.0));
            const auto back = signal_to_mag(d, cam, band);
            ASSERT_TRUE(back.has_value());
            EXPECT_NEAR(*back, m, 1e-3) << cam.name << " m=" << m;
        }
    }
}

TEST(Detector, HalvingNetSignalAddsTwoPointFiveLogTwo) {
    auto cam = SensorConfig::mapcam();
    cam.npix = 0; // no background to subtract
    const BandConstants band;
    DigitalSample a{0.0, 2'000'000, 3.0}, b{0.0, 1'000'000, 3.0};
    EXPECT_NEAR(*signal_to_mag(b, cam, band) - *signal_to_mag(a, cam, band), 2.5 * std::log10(2.0), 1e-12);
}

TEST(Detector, NonPositiveNetSignalIsInvalid) {
    const auto cam = SensorConfig::mapcam();
    DigitalSample d{0.0, 0, 3.0};
    EXPECT_FALSE(signal_to_mag(d, cam, {}).has_value());
}

TEST(Detector, SamplingIsDeterministicPerSeed) {
    const auto cam = SensorConfig::mapcam();
    std::mt19937_64 a(42), b(42);
    for (int i = 0; i < 20; ++i) {
        EXPECT_EQ(sample_measurement(5.0, cam, {}, 3.0, a).total_signal,
                  sample_measurement(5.0, cam, {}, 3.0, b).total_signal);
    }
}

TEST(Detector, ZeroMeanPoissonIsAlwaysZero) {
    auto cam = SensorConfig::mapcam();
    cam.npix = 0;
    std::mt19937_64 rng(1);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_measurement(60.0, cam, {}, 3.0, rng).total_signal, 0);
}

TEST(Detector, PoissonMeanWithinFourStandardErrors) {
    const auto cam = SensorConfig::mapcam();
    const BandConstants band;
    const double mu = expected_source_signal(6.5, cam, band, 3.0) + expected_sky_signal(cam, band, 3.0) +
                      expected_dark_signal(cam, 3.0);
    std::mt19937_64 rng(7);
    double sum = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) sum += static_cast<double>(sample_measurement(6.5, cam, band, 3.0, rng).total_signal);
    EXPECT_LT(std::abs(sum / n - mu), 4.0 * std::sqrt(mu / n));
}

TEST(Detector, SensorFileRoundTrip) {
    const auto cam = SensorConfig::polycam();
    const auto back = parse_sensor(format_sensor(cam));
    EXPECT_EQ(back.name, cam.name);
    EXPECT_EQ(back.aperture_diameter_mm, cam.aperture_diameter_mm);
    EXPECT_EQ(back.focal_length_mm, cam.focal_length_mm);
    EXPECT_EQ(back.npix, cam.npix);
}

TEST(Detector, RejectsNonPhysicalSensor) {
    auto cam = SensorConfig::mapcam();
    cam.quantum_efficiency = 1.5;
    EXPECT_THROW(cam.validate(), std::invalid_argument);
    EXPECT_THROW(SensorConfig::preset("nocam"), std::invalid_argument);
}
