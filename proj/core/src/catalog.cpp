#include "scutinav/catalog.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "scutinav/text_io.hpp"
#include "scutinav/units.hpp"

namespace scutinav::catalog {

namespace {

constexpr std::array<std::string_view, 6> kColumns{
    "name", "max_vmag", "amplitude_vmag", "period_days", "ra_deg", "dec_deg"};

bool is_header(const std::vector<std::string_view>& fields) {
    if (fields.size() != kColumns.size()) return false;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i] != kColumns[i]) return false;
    }
    return true;
}

} // namespace

LosVector LosVector::from_components(double x, double y, double z) {
    const Eigen::Vector3d v(x, y, z);
    const double n = v.norm();
    if (!std::isfinite(n) || n == 0.0) {
        throw std::invalid_argument("line-of-sight vector must be finite and non-zero");
    }
    return LosVector(v / n);
}

void validate(const StarEntry& e) {
    auto fail = [&](const std::string& why) {
        throw CatalogError("star '" + e.name + "': " + why, e.name);
    };
    if (e.name.empty()) throw CatalogError("star with empty name");
    if (!std::isfinite(e.max_vmag)) fail("max_vmag is not finite");
    if (!(e.ra_deg >= 0.0 && e.ra_deg < 360.0)) fail("ra_deg outside [0, 360)");
    if (!(e.dec_deg >= -90.0 && e.dec_deg <= 90.0)) fail("dec_deg outside [-90, 90]");
    if (!(e.amplitude_vmag > 0.0)) fail("amplitude_vmag must be positive");
    if (!(e.period_days > 0.0)) fail("period_days must be positive");
}

std::vector<StarEntry> parse_catalog(std::istream& in) {
    std::vector<StarEntry> entries;
    std::string raw;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = text::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto fields = text::split(line, ',');
        if (!header_seen) {
            if (!is_header(fields)) {
                throw ParseError("line " + std::to_string(line_no) +
                                     ": expected header 'name, max_vmag, amplitude_vmag, "
                                     "period_days, ra_deg, dec_deg'",
                                 line_no);
            }
            header_seen = true;
            continue;
        }
        if (fields.size() != kColumns.size()) {
            throw ParseError("line " + std::to_string(line_no) + ": expected 6 fields, got " +
                                 std::to_string(fields.size()),
                             line_no);
        }
        StarEntry e;
        e.name = std::string(fields[0]);
        e.max_vmag = text::parse_double(fields[1], line_no);
        e.amplitude_vmag = text::parse_double(fields[2], line_no);
        e.period_days = text::parse_double(fields[3], line_no);
        e.ra_deg = text::parse_double(fields[4], line_no);
        e.dec_deg = text::parse_double(fields[5], line_no);
        validate(e);
        entries.push_back(std::move(e));
    }
    return entries;
}

std::vector<StarEntry> load_catalog(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open catalog '" + path.string() + "'");
    return parse_catalog(in);
}

void write_catalog(std::ostream& out, std::span<const StarEntry> entries) {
    out << "name, max_vmag, amplitude_vmag, period_days, ra_deg, dec_deg\n";
    for (const auto& e : entries) {
        out << e.name << ", " << text::format_double(e.max_vmag) << ", "
            << text::format_double(e.amplitude_vmag) << ", " << text::format_double(e.period_days)
            << ", " << text::format_double(e.ra_deg) << ", " << text::format_double(e.dec_deg)
            << '\n';
    }
}

void save_catalog(const std::filesystem::path& path, std::span<const StarEntry> entries) {
    std::ostringstream ss;
    write_catalog(ss, entries);
    text::write_file(path, ss.str());
}

std::vector<StarEntry> select_stars(std::span<const StarEntry> entries,
                                    const SelectionCriteria& c) {
    std::vector<StarEntry> out;
    std::copy_if(entries.begin(), entries.end(), std::back_inserter(out), [&](const StarEntry& e) {
        return e.max_vmag < c.vmag_max && e.amplitude_vmag >= c.amp_min &&
               e.dominant_frequency() > c.freq_min;
    });
    return out;
}

LosVector los_vector(double ra_deg, double dec_deg) {
    const double ra = deg_to_rad(ra_deg);
    const double dec = deg_to_rad(dec_deg);
    const double cd = std::cos(dec);
    return LosVector(Eigen::Vector3d(cd * std::cos(ra), cd * std::sin(ra), std::sin(dec)));
}

const StarEntry& find_star(std::span<const StarEntry> entries, const std::string& name) {
    const auto it = std::find_if(entries.begin(), entries.end(),
                                 [&](const StarEntry& e) { return e.name == name; });
    if (it == entries.end()) throw CatalogError("star '" + name + "' not in catalog", name);
    return *it;
}

} // namespace scutinav::catalog
