#pragma once
// scutinav/units.hpp - physical constants and unit conversions
//
// Distances are astronomical units, reference-scale epochs are days (MJD),
// clock readings and timing quantities are seconds. Conversions between
// days and seconds are always explicit at module boundaries.

#include <numbers>

namespace scutinav {

inline constexpr double kSecondsPerDay = 86400.0;
inline constexpr double kSpeedOfLightMps = 299'792'458.0;      ///< exact (SI)
inline constexpr double kAstronomicalUnitM = 149'597'870'700.0; ///< exact (IAU 2012)

/// Speed of light [au/s], about 2.00398880e-3.
inline constexpr double kLightAuPerSecond = kSpeedOfLightMps / kAstronomicalUnitM;
/// Speed of light [au/day].
inline constexpr double kLightAuPerDay = kLightAuPerSecond * kSecondsPerDay;
/// One-way light time across 1 au [s], about 499.00478.
inline constexpr double kAuLightTimeSeconds = 1.0 / kLightAuPerSecond;

inline constexpr double kPlanckErgSeconds = 6.62607015e-27; ///< exact (SI 2019), erg s
inline constexpr double kSpeedOfLightCmps = kSpeedOfLightMps * 100.0;
inline constexpr double kElementaryChargeC = 1.602176634e-19; ///< exact (SI 2019)

/// Heliocentric gravitational parameter [au^3/day^2] (k^2, Gaussian constant).
inline constexpr double kSunGmAu3PerDay2 = 0.01720209895 * 0.01720209895;

/// Mean obliquity of the ecliptic at J2000 [deg].
inline constexpr double kObliquityJ2000Deg = 23.439291111;

inline constexpr double kArcsecPerRadian = 180.0 * 3600.0 / std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }
constexpr double days_to_seconds(double days) { return days * kSecondsPerDay; }
constexpr double seconds_to_days(double seconds) { return seconds / kSecondsPerDay; }

} // namespace scutinav
