#include "scutinav/detector.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "scutinav/text_io.hpp"
#include "scutinav/units.hpp"

namespace scutinav::detector {

using json = nlohmann::json;

void SensorConfig::validate() const {
    auto positive = [&](double v, const char* what) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument("sensor '" + name + "': " + what + " must be positive");
        }
    };
    positive(pixel_area_um2, "pixel_area_um2");
    positive(gain_e_per_adu, "gain_e_per_adu");
    positive(focal_length_mm, "focal_length_mm");
    positive(aperture_diameter_mm, "aperture_diameter_mm");
    if (!(quantum_efficiency > 0.0 && quantum_efficiency <= 1.0)) {
        throw std::invalid_argument("sensor '" + name + "': quantum_efficiency must be in (0, 1]");
    }
    // zero dark current, mask size or readout noise are legitimate test configurations
    if (!(dark_current_pA_cm2 >= 0.0) || !(readout_noise_e >= 0.0) || npix < 0) {
        throw std::invalid_argument("sensor '" + name + "': negative dark current, noise or npix");
    }
    if (!std::isfinite(sky_mag_arcsec2)) throw std::invalid_argument("sensor '" + name + "': sky_mag");
}

SensorConfig SensorConfig::mapcam() {
    SensorConfig s;
    s.name = "mapcam";
    s.focal_length_mm = 125.0;
    s.aperture_diameter_mm = 38.0;
    return s;
}

SensorConfig SensorConfig::polycam() {
    SensorConfig s;
    s.name = "polycam";
    s.focal_length_mm = 629.0;
    s.aperture_diameter_mm = 175.0;
    return s;
}

SensorConfig SensorConfig::preset(const std::string& name) {
    if (name == "mapcam") return mapcam();
    if (name == "polycam") return polycam();
    throw std::invalid_argument("unknown sensor preset '" + name + "'");
}

void BandConstants::validate() const {
    if (!(zero_point_flux > 0.0 && effective_bandwidth_A > 0.0 && mean_wavelength_nm > 0.0)) {
        throw std::invalid_argument("band constants must be positive");
    }
}

double BandConstants::photon_energy_erg() const {
    const double lambda_cm = mean_wavelength_nm * 1e-7;
    return kPlanckErgSeconds * kSpeedOfLightCmps / lambda_cm;
}

double mag_to_photon_flux(double m, const BandConstants& band) {
    return band.zero_point_flux * band.effective_bandwidth_A * std::pow(10.0, -m / 2.5) /
           band.photon_energy_erg();
}

double aperture_area_cm2(const SensorConfig& sensor) {
    const double radius_cm = 0.5 * sensor.aperture_diameter_mm * 0.1;
    return std::numbers::pi * radius_cm * radius_cm;
}

double pixel_solid_angle_arcsec2(const SensorConfig& sensor) {
    const double area_mm2 = sensor.pixel_area_um2 * 1e-6;
    const double f_mm = sensor.focal_length_mm;
    return area_mm2 / (f_mm * f_mm) * kArcsecPerRadian * kArcsecPerRadian;
}

double source_photons(double m, const SensorConfig& sensor, const BandConstants& band, double exposure_s) {
    return mag_to_photon_flux(m, band) * aperture_area_cm2(sensor) * exposure_s;
}

double expected_source_signal(double m, const SensorConfig& sensor, const BandConstants& band,
                              double exposure_s) {
    return std::round(source_photons(m, sensor, band, exposure_s)) * sensor.quantum_efficiency /
           sensor.gain_e_per_adu;
}

double expected_sky_signal(const SensorConfig& sensor, const BandConstants& band, double exposure_s) {
    // surface brightness [photons/cm^2/s/arcsec^2] x arcsec^2/pixel x pixels x s,
    // as the sky term is stated; no collecting-area factor enters here.
    const double photons = mag_to_photon_flux(sensor.sky_mag_arcsec2, band) *
                           pixel_solid_angle_arcsec2(sensor) * sensor.npix * exposure_s;
    return std::round(photons) * sensor.quantum_efficiency / sensor.gain_e_per_adu;
}

double expected_dark_signal(const SensorConfig& sensor, double exposure_s) {
    const double electrons_per_s_cm2 = sensor.dark_current_pA_cm2 * 1e-12 / kElementaryChargeC;
    const double pixel_area_cm2 = sensor.pixel_area_um2 * 1e-8;
    const double count = electrons_per_s_cm2 * pixel_area_cm2 * sensor.npix * exposure_s;
    return std::round(count) * sensor.quantum_efficiency / sensor.gain_e_per_adu;
}

DigitalSample sample_measurement(double m, const SensorConfig& sensor, const BandConstants& band,
                                 double exposure_s, std::mt19937_64& rng, double time_tag_s) {
    const double mean = expected_source_signal(m, sensor, band, exposure_s) +
                        expected_sky_signal(sensor, band, exposure_s) +
                        expected_dark_signal(sensor, exposure_s);
    DigitalSample out;
    out.time_tag_s = time_tag_s;
    out.exposure_s = exposure_s;
    if (mean > 0.0) {
        std::poisson_distribution<std::int64_t> shot(mean);
        out.total_signal = shot(rng);
    }
    if (sensor.readout_noise_enabled && sensor.readout_noise_e > 0.0) {
        std::normal_distribution<double> read(0.0, sensor.readout_noise_e / sensor.gain_e_per_adu);
        const auto noisy = static_cast<double>(out.total_signal) + read(rng);
        out.total_signal = std::max<std::int64_t>(0, std::llround(noisy));
    }
    return out;
}

std::optional<double> signal_to_mag(const DigitalSample& sample, const SensorConfig& sensor,
                                    const BandConstants& band) {
    const double net = static_cast<double>(sample.total_signal) -
                       expected_sky_signal(sensor, band, sample.exposure_s) -
                       expected_dark_signal(sensor, sample.exposure_s);
    if (!(net > 0.0)) return std::nullopt;
    const double photons = net * sensor.gain_e_per_adu / sensor.quantum_efficiency;
    const double zero_mag_photons = source_photons(0.0, sensor, band, sample.exposure_s);
    return -2.5 * std::log10(photons / zero_mag_photons);
}

SensorConfig parse_sensor(std::string_view document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("sensor file: ") + e.what());
    }
    SensorConfig s;
    if (doc.contains("preset")) s = SensorConfig::preset(doc.at("preset").get<std::string>());
    auto read = [&](const char* key, auto& field) {
        if (doc.contains(key)) field = doc.at(key).get<std::remove_reference_t<decltype(field)>>();
    };
    try {
        read("name", s.name);
        read("pixel_area_um2", s.pixel_area_um2);
        read("readout_noise_e", s.readout_noise_e);
        read("dark_current_pA_cm2", s.dark_current_pA_cm2);
        read("quantum_efficiency", s.quantum_efficiency);
        read("gain_e_per_adu", s.gain_e_per_adu);
        read("focal_length_mm", s.focal_length_mm);
        read("aperture_diameter_mm", s.aperture_diameter_mm);
        read("npix", s.npix);
        read("sky_mag_arcsec2", s.sky_mag_arcsec2);
        read("readout_noise_enabled", s.readout_noise_enabled);
    } catch (const json::exception& e) {
        throw ParseError(std::string("sensor file: ") + e.what());
    }
    s.validate();
    return s;
}

std::string format_sensor(const SensorConfig& s) {
    const json doc = {
        {"name", s.name},
        {"pixel_area_um2", s.pixel_area_um2},
        {"readout_noise_e", s.readout_noise_e},
        {"dark_current_pA_cm2", s.dark_current_pA_cm2},
        {"quantum_efficiency", s.quantum_efficiency},
        {"gain_e_per_adu", s.gain_e_per_adu},
        {"focal_length_mm", s.focal_length_mm},
        {"aperture_diameter_mm", s.aperture_diameter_mm},
        {"npix", s.npix},
        {"sky_mag_arcsec2", s.sky_mag_arcsec2},
        {"readout_noise_enabled", s.readout_noise_enabled},
    };
    return doc.dump(2) + "\n";
}

SensorConfig load_sensor(const std::filesystem::path& path) {
    return parse_sensor(text::read_file(path));
}

} // namespace scutinav::detector
