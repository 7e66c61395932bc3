#include "scutinav/lightcurve.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "scutinav/text_io.hpp"
#include "scutinav/units.hpp"

namespace scutinav::lightcurve {

using json = nlohmann::json;

double wrap_phase(double phase) {
    double w = std::fmod(phase, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    // fmod of a tiny negative value can round back up to exactly 2 pi
    if (w >= kTwoPi) w = 0.0;
    return w;
}

void StarModel::validate() const {
    auto fail = [&](const std::string& why) {
        throw std::invalid_argument("model '" + star + "': " + why);
    };
    if (modes.empty()) fail("at least one pulsation mode is required");
    if (!std::isfinite(mean_mag) || !std::isfinite(epoch_mjd)) fail("non-finite A0 or epoch");
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const auto& m = modes[i];
        if (!(m.amplitude >= 0.0) || !std::isfinite(m.amplitude)) fail("negative amplitude");
        if (!(m.frequency > 0.0) || !std::isfinite(m.frequency)) fail("non-positive frequency");
        if (!(m.phase >= 0.0 && m.phase < kTwoPi)) fail("phase outside [0, 2 pi)");
        if (i > 0 && m.amplitude > modes[i - 1].amplitude) fail("modes not sorted by amplitude");
    }
}

void StarModel::normalize() {
    for (auto& m : modes) m.phase = wrap_phase(m.phase);
    std::stable_sort(modes.begin(), modes.end(), [](const PulsationMode& a, const PulsationMode& b) {
        return a.amplitude > b.amplitude;
    });
}

double StarModel::total_amplitude() const {
    double s = 0.0;
    for (const auto& m : modes) s += m.amplitude;
    return s;
}

double StarModel::highest_frequency() const {
    double f = 0.0;
    for (const auto& m : modes) f = std::max(f, m.frequency);
    return f;
}

double eval_reference(const StarModel& model, double t_days) {
    const double dt = t_days - model.epoch_mjd;
    double m = model.mean_mag;
    for (const auto& mode : model.modes) {
        m += mode.amplitude * std::sin(kTwoPi * mode.frequency * dt + mode.phase);
    }
    return m;
}

double eval_reference_rate(const StarModel& model, double t_days) {
    const double dt = t_days - model.epoch_mjd;
    double rate = 0.0;
    for (const auto& mode : model.modes) {
        const double w = kTwoPi * mode.frequency;
        rate += mode.amplitude * w * std::cos(w * dt + mode.phase);
    }
    return rate;
}

double observer_time_shift(const LosVector& los, const Eigen::Vector3d& p, const Eigen::Vector3d& b) {
    return los.dot(p - b) / kLightAuPerDay;
}

double eval_observer(const StarModel& model, double t_days, const Eigen::Vector3d& p,
                     const Eigen::Vector3d& b) {
    return eval_reference(model, t_days + observer_time_shift(model.los, p, b));
}

double los_timing_error_bound(double theta_rad, double range_au) {
    return theta_rad * range_au / kLightAuPerSecond;
}

double los_timing_error(const Eigen::Vector3d& u_fixed, const Eigen::Vector3d& u_true,
                        const Eigen::Vector3d& r_au) {
    return (u_fixed - u_true).dot(r_au) / kLightAuPerSecond;
}

// ---------------------------------------------------------------------------
// Model files
// ---------------------------------------------------------------------------

std::string format_model(const StarModel& model) {
    json modes = json::array();
    for (const auto& m : model.modes) {
        modes.push_back({{"amplitude", m.amplitude}, {"frequency", m.frequency}, {"phase", m.phase}});
    }
    const json doc = {
        {"star", model.star},
        {"los", {model.los.x(), model.los.y(), model.los.z()}},
        {"mean_mag", model.mean_mag},
        {"epoch_mjd", model.epoch_mjd},
        {"modes", modes},
    };
    return doc.dump(2) + "\n";
}

StarModel parse_model(std::string_view document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("model file: ") + e.what());
    }
    try {
        StarModel model;
        model.star = doc.at("star").get<std::string>();
        const auto& los = doc.at("los");
        if (!los.is_array() || los.size() != 3) throw ParseError("model file: 'los' must be [x, y, z]");
        model.los = LosVector::from_components(los[0].get<double>(), los[1].get<double>(),
                                               los[2].get<double>());
        model.mean_mag = doc.at("mean_mag").get<double>();
        model.epoch_mjd = doc.at("epoch_mjd").get<double>();
        for (const auto& m : doc.at("modes")) {
            model.modes.push_back({m.at("amplitude").get<double>(), m.at("frequency").get<double>(),
                                   m.at("phase").get<double>()});
        }
        model.validate();
        return model;
    } catch (const json::exception& e) {
        throw ParseError(std::string("model file: ") + e.what());
    }
}

void save_model(const std::filesystem::path& path, const StarModel& model) {
    text::write_file(path, format_model(model));
}

StarModel load_model(const std::filesystem::path& path) {
    return parse_model(text::read_file(path));
}

// ---------------------------------------------------------------------------
// Photometric series
// ---------------------------------------------------------------------------

void PhotometricSeries::validate() const {
    if (times.size() != values.size()) throw std::invalid_argument("series: times/values length mismatch");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i]) || !std::isfinite(values[i])) {
            throw std::invalid_argument("series: non-finite sample at index " + std::to_string(i));
        }
        if (i > 0 && !(times[i] > times[i - 1])) {
            throw std::invalid_argument("series: times not strictly increasing at index " +
                                        std::to_string(i));
        }
    }
    if (kind == ValueKind::Flux) {
        for (double v : values) {
            if (!(v > 0.0)) throw std::invalid_argument("series: flux values must be positive");
        }
    }
}

double PhotometricSeries::median_cadence() const {
    if (times.size() < 2) return 0.0;
    std::vector<double> d(times.size() - 1);
    for (std::size_t i = 1; i < times.size(); ++i) d[i - 1] = times[i] - times[i - 1];
    auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
    std::nth_element(d.begin(), mid, d.end());
    return *mid;
}

std::vector<double> PhotometricSeries::magnitudes() const {
    if (kind == ValueKind::Magnitude) return values;
    std::vector<double> sorted = values;
    auto mid = sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2);
    std::nth_element(sorted.begin(), mid, sorted.end());
    const double median = *mid;
    std::vector<double> mags(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        mags[i] = mean_mag - 2.5 * std::log10(values[i] / median);
    }
    return mags;
}

PhotometricSeries parse_series(std::istream& in) {
    PhotometricSeries s;
    std::string raw;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = text::trim(raw);
        if (line.empty()) continue;
        if (line.front() == '#') {
            const auto body = text::trim(line.substr(1));
            const auto colon = body.find(':');
            if (colon == std::string_view::npos) continue;
            const auto key = text::trim(body.substr(0, colon));
            const auto value = text::trim(body.substr(colon + 1));
            if (key == "time_scale") {
                s.time_scale = std::string(value);
            } else if (key == "value_kind") {
                if (value == "magnitude") s.kind = ValueKind::Magnitude;
                else if (value == "flux") s.kind = ValueKind::Flux;
                else throw ParseError("line " + std::to_string(line_no) + ": unknown value_kind", line_no);
            } else if (key == "mean_mag") {
                s.mean_mag = text::parse_double(value, line_no);
            } else if (key == "source") {
                s.source_label = std::string(value);
            }
            continue;
        }
        const auto fields = text::split(line, ',');
        if (!header_seen) {
            if (fields.size() != 2 || fields[0] != "time" || fields[1] != "value") {
                throw ParseError("line " + std::to_string(line_no) + ": expected header 'time, value'",
                                 line_no);
            }
            header_seen = true;
            continue;
        }
        if (fields.size() != 2) {
            throw ParseError("line " + std::to_string(line_no) + ": expected 2 fields", line_no);
        }
        s.times.push_back(text::parse_double(fields[0], line_no));
        s.values.push_back(text::parse_double(fields[1], line_no));
    }
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
    return s;
}

PhotometricSeries load_series(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open series '" + path.string() + "'");
    return parse_series(in);
}

void write_series(std::ostream& out, const PhotometricSeries& s) {
    out << "# time_scale: " << s.time_scale << '\n'
        << "# value_kind: " << (s.kind == ValueKind::Flux ? "flux" : "magnitude") << '\n'
        << "# mean_mag: " << text::format_double(s.mean_mag) << '\n';
    if (!s.source_label.empty()) out << "# source: " << s.source_label << '\n';
    out << "time, value\n";
    for (std::size_t i = 0; i < s.times.size(); ++i) {
        out << text::format_double(s.times[i]) << ", " << text::format_double(s.values[i]) << '\n';
    }
}

void save_series(const std::filesystem::path& path, const PhotometricSeries& s) {
    std::ostringstream ss;
    write_series(ss, s);
    text::write_file(path, ss.str());
}

// ---------------------------------------------------------------------------
// Synthetic pulsators
// ---------------------------------------------------------------------------

std::uint64_t stable_hash(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

StarModel synthetic_model(const catalog::StarEntry& star, double epoch_mjd, std::uint64_t seed,
                          const SyntheticOptions& opt) {
    std::mt19937_64 rng(seed ^ stable_hash(star.name));
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    StarModel model;
    model.star = star.name;
    model.epoch_mjd = epoch_mjd;
    model.los = catalog::los_vector(star);

    const double f1 = star.dominant_frequency();
    const double a1 = 0.5 * star.amplitude_vmag;
    model.modes.push_back({a1, f1, kTwoPi * unit(rng)});

    const double f_lo = std::max(3.0, 0.6 * f1);
    const double f_hi = std::min(opt.max_frequency, 2.4 * f1);
    const double log_lo = std::log(opt.min_ratio);
    const double log_hi = std::log(opt.max_ratio);
    int placed = 0;
    for (int attempt = 0; placed < opt.extra_modes && attempt < 1000; ++attempt) {
        const double f = f_lo + (f_hi - f_lo) * unit(rng);
        const bool crowded = std::any_of(model.modes.begin(), model.modes.end(), [&](const PulsationMode& m) {
            return std::abs(m.frequency - f) < opt.min_separation;
        });
        if (crowded) continue;
        const double ratio = std::exp(log_lo + (log_hi - log_lo) * unit(rng));
        model.modes.push_back({ratio * a1, f, kTwoPi * unit(rng)});
        ++placed;
    }
    model.mean_mag = star.max_vmag + model.total_amplitude();
    model.normalize();
    model.validate();
    return model;
}

PhotometricSeries sample_series(const StarModel& model, std::span<const double> times, double noise_mag,
                                std::mt19937_64& rng) {
    PhotometricSeries s;
    s.source_label = model.star;
    s.mean_mag = model.mean_mag;
    s.times.assign(times.begin(), times.end());
    s.values.resize(times.size());
    std::normal_distribution<double> noise(0.0, noise_mag > 0.0 ? noise_mag : 1.0);
    for (std::size_t i = 0; i < times.size(); ++i) {
        s.values[i] = eval_reference(model, times[i]) + (noise_mag > 0.0 ? noise(rng) : 0.0);
    }
    return s;
}

} // namespace scutinav::lightcurve
