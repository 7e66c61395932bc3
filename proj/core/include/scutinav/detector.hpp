#pragma once
// scutinav/detector.hpp - magnitude -> digital signal chain of a framing camera
//
// Source:  Phi = f_lambda * dlambda * 10^(-m/2.5) / Q_ph      [photons/cm^2/s]
//          S   = round(Phi * A_det * t) * QE / G              [ADU]
// Sky:     S_s = round(Phi(m_sky) * Omega_pix * npix * t) * QE / G
// Dark:    S_d = round(d * A * npix * t) * QE / G
// Total:   S_tot ~ Poisson(S + S_s + S_d)
//
// Unit audit for the sky term: Omega_pix = A / f^2 converted to arcsec^2 per
// pixel (pixel_solid_angle_arcsec2). The photon term carries no collecting
// area; see expected_sky_signal. The dark current d is converted from pA/cm^2
// to electrons/s/cm^2 through the elementary charge, then scaled by QE/G as
// the other terms are.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>

namespace scutinav::detector {

struct SensorConfig {
    std::string name = "custom";
    double pixel_area_um2 = 55.25;       ///< A (6.5 x 8.5 um)
    double readout_noise_e = 50.0;       ///< RN, only used when readout_noise_enabled
    double dark_current_pA_cm2 = 0.065;  ///< d
    double quantum_efficiency = 0.35;    ///< QE
    double gain_e_per_adu = 4.5;         ///< G
    double focal_length_mm = 125.0;      ///< f
    double aperture_diameter_mm = 38.0;  ///< D
    int npix = 9;                        ///< aperture mask pixels
    double sky_mag_arcsec2 = 21.5;       ///< m_sky
    bool readout_noise_enabled = false;  ///< add N(0, RN/G) ADU per sample

    /// Throws std::invalid_argument on non-physical values.
    void validate() const;

    static SensorConfig mapcam();
    static SensorConfig polycam();
    /// "mapcam" | "polycam"; throws std::invalid_argument otherwise.
    static SensorConfig preset(const std::string& name);
};

struct BandConstants {
    double zero_point_flux = 3.631e-9;  ///< f_lambda [erg/cm^2/s/A]
    double effective_bandwidth_A = 880; ///< dlambda_eff [A]
    double mean_wavelength_nm = 551.0;  ///< lambda_avg [nm]

    void validate() const;
    /// Q_ph = h c / lambda_avg [erg]
    double photon_energy_erg() const;
};

struct DigitalSample {
    double time_tag_s = 0.0;       ///< spacecraft clock [s]
    std::int64_t total_signal = 0; ///< S_tot [ADU]
    double exposure_s = 0.0;
};

/// Photon flux density of a source of magnitude m [photons/cm^2/s].
double mag_to_photon_flux(double m, const BandConstants& band);

double aperture_area_cm2(const SensorConfig& sensor);
/// Solid angle of one pixel, A / f^2, in arcsec^2.
double pixel_solid_angle_arcsec2(const SensorConfig& sensor);

/// Phi * A_det * t before rounding [photons].
double source_photons(double m, const SensorConfig& sensor, const BandConstants& band, double exposure_s);

double expected_source_signal(double m, const SensorConfig& sensor, const BandConstants& band,
                              double exposure_s);
double expected_sky_signal(const SensorConfig& sensor, const BandConstants& band, double exposure_s);
double expected_dark_signal(const SensorConfig& sensor, double exposure_s);

/// One Poisson-sampled exposure. Deterministic for a given generator state.
DigitalSample sample_measurement(double m, const SensorConfig& sensor, const BandConstants& band,
                                 double exposure_s, std::mt19937_64& rng, double time_tag_s = 0.0);

/// Inverts the noiseless chain after subtracting the expected sky and dark
/// signal. Empty when the net signal is not positive (invalid sample).
std::optional<double> signal_to_mag(const DigitalSample& sample, const SensorConfig& sensor,
                                    const BandConstants& band);

// Sensor file: JSON object with the SensorConfig field names.
SensorConfig parse_sensor(std::string_view document);
std::string format_sensor(const SensorConfig& sensor);
SensorConfig load_sensor(const std::filesystem::path& path);

} // namespace scutinav::detector
