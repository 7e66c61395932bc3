#pragma once
// scutinav/catalog.hpp - delta Scuti star catalog: load, validate, select
//
// Catalog file: UTF-8 text, one header line naming the six fields, then one
// comma-delimited record per line:
//
//   name, max_vmag, amplitude_vmag, period_days, ra_deg, dec_deg
//
// Blank lines and lines starting with '#' are ignored. Frequencies are always
// derived as 1/period; the file carries no separate frequency column.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace scutinav::catalog {

/// Unit line-of-sight vector in the J2000 equatorial frame.
class LosVector {
public:
    LosVector() = default;

    /// Normalizes (x, y, z); throws std::invalid_argument on a zero or non-finite vector.
    static LosVector from_components(double x, double y, double z);

    const Eigen::Vector3d& vec() const { return v_; }
    double x() const { return v_.x(); }
    double y() const { return v_.y(); }
    double z() const { return v_.z(); }
    double dot(const Eigen::Vector3d& other) const { return v_.dot(other); }

private:
    explicit LosVector(const Eigen::Vector3d& v) : v_(v) {}
    Eigen::Vector3d v_{1.0, 0.0, 0.0};
    friend LosVector los_vector(double, double);
};

struct StarEntry {
    std::string name;
    double max_vmag = 0.0;       ///< brightest V magnitude
    double amplitude_vmag = 0.0; ///< brightness modulation amplitude [mag]
    double period_days = 0.0;    ///< dominant pulsation period
    double ra_deg = 0.0;         ///< J2000
    double dec_deg = 0.0;        ///< J2000

    double dominant_frequency() const { return 1.0 / period_days; } ///< cycles/day
};

/// Rejected catalog content. For invariant violations `star()` names the entry.
class CatalogError : public std::runtime_error {
public:
    CatalogError(const std::string& what, std::string star = {})
        : std::runtime_error(what), star_(std::move(star)) {}
    const std::string& star() const { return star_; }

private:
    std::string star_;
};

/// Throws CatalogError naming the entry if any StarEntry invariant fails.
void validate(const StarEntry& entry);

std::vector<StarEntry> parse_catalog(std::istream& in);
std::vector<StarEntry> load_catalog(const std::filesystem::path& path);
void write_catalog(std::ostream& out, std::span<const StarEntry> entries);
void save_catalog(const std::filesystem::path& path, std::span<const StarEntry> entries);

struct SelectionCriteria {
    double vmag_max = 7.0; ///< keep max_vmag < vmag_max
    double amp_min = 0.04; ///< keep amplitude_vmag >= amp_min (inclusive at catalog precision)
    double freq_min = 5.0; ///< keep 1/period > freq_min [cycles/day]
};

/// Filters entries by brightness, amplitude and dominant frequency; order preserved.
std::vector<StarEntry> select_stars(std::span<const StarEntry> entries,
                                    const SelectionCriteria& criteria);

/// (cos dec cos ra, cos dec sin ra, sin dec). Angles in degrees.
LosVector los_vector(double ra_deg, double dec_deg);
inline LosVector los_vector(const StarEntry& entry) { return los_vector(entry.ra_deg, entry.dec_deg); }

/// Looks a star up by exact name; throws CatalogError when absent.
const StarEntry& find_star(std::span<const StarEntry> entries, const std::string& name);

} // namespace scutinav::catalog
