#include "scutinav/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <Eigen/Geometry>
#include <boost/math/interpolators/makima.hpp>

#include "scutinav/text_io.hpp"
#include "scutinav/units.hpp"

namespace scutinav::scenario {

// ---------------------------------------------------------------------------
// Kepler propagation
// ---------------------------------------------------------------------------

void KeplerElements::validate() const {
    if (!(a_au > 0.0)) throw std::invalid_argument("kepler: semi-major axis must be positive");
    if (!(e >= 0.0 && e < 1.0)) throw std::invalid_argument("kepler: eccentricity must be in [0, 1)");
    if (!(mu() > 0.0)) throw std::invalid_argument("kepler: gravitational parameter must be positive");
}

double KeplerElements::mu() const { return gm > 0.0 ? gm : kSunGmAu3PerDay2; }

double KeplerElements::period_days() const {
    return kTwoPi * std::sqrt(a_au * a_au * a_au / mu());
}

StateVector kepler_state(const KeplerElements& el, double t_mjd) {
    const double n = std::sqrt(el.mu() / (el.a_au * el.a_au * el.a_au));
    double mean = deg_to_rad(el.mean_anomaly_deg) + n * (t_mjd - el.epoch_mjd);
    mean = std::remainder(mean, kTwoPi);

    double ecc_anom = el.e < 0.8 ? mean : (mean < 0.0 ? -std::numbers::pi : std::numbers::pi);
    for (int i = 0; i < 50; ++i) {
        const double f = ecc_anom - el.e * std::sin(ecc_anom) - mean;
        const double step = f / (1.0 - el.e * std::cos(ecc_anom));
        ecc_anom -= step;
        if (std::abs(step) < 1e-15) break;
    }

    const double cos_e = std::cos(ecc_anom);
    const double sin_e = std::sin(ecc_anom);
    const double root = std::sqrt(1.0 - el.e * el.e);
    const double e_dot = n / (1.0 - el.e * cos_e);
    const Eigen::Vector3d r_pf(el.a_au * (cos_e - el.e), el.a_au * root * sin_e, 0.0);
    const Eigen::Vector3d v_pf(-el.a_au * sin_e * e_dot, el.a_au * root * cos_e * e_dot, 0.0);

    const Eigen::Matrix3d rot =
        (Eigen::AngleAxisd(deg_to_rad(el.raan_deg), Eigen::Vector3d::UnitZ()) *
         Eigen::AngleAxisd(deg_to_rad(el.inclination_deg), Eigen::Vector3d::UnitX()) *
         Eigen::AngleAxisd(deg_to_rad(el.arg_periapsis_deg), Eigen::Vector3d::UnitZ()))
            .toRotationMatrix();
    StateVector s{rot * r_pf, rot * v_pf};
    if (el.ecliptic) {
        const Eigen::Matrix3d to_eq =
            Eigen::AngleAxisd(deg_to_rad(kObliquityJ2000Deg), Eigen::Vector3d::UnitX()).toRotationMatrix();
        s.position = to_eq * s.position;
        s.velocity = to_eq * s.velocity;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Trajectory
// ---------------------------------------------------------------------------

struct Trajectory::Table {
    using Spline = boost::math::interpolators::makima<std::vector<double>>;
    double t_first = 0.0;
    double t_last = 0.0;
    std::vector<Spline> components;
};

Trajectory Trajectory::kepler(const KeplerElements& elements) {
    elements.validate();
    Trajectory t;
    t.kind_ = Kind::Kepler;
    t.elements_ = elements;
    return t;
}

Trajectory Trajectory::tabulated(std::vector<double> t_mjd, std::vector<Eigen::Vector3d> positions) {
    if (t_mjd.size() != positions.size()) throw TrajectoryError("trajectory table: length mismatch");
    if (t_mjd.size() < 4) throw TrajectoryError("trajectory table: at least 4 rows are required");
    for (std::size_t i = 0; i < t_mjd.size(); ++i) {
        if (!std::isfinite(t_mjd[i]) || !positions[i].allFinite()) {
            throw TrajectoryError("trajectory table: non-finite row " + std::to_string(i));
        }
        if (i > 0 && !(t_mjd[i] > t_mjd[i - 1])) {
            throw TrajectoryError("trajectory table: times not strictly increasing at row " +
                                  std::to_string(i));
        }
    }
    auto table = std::make_shared<Table>();
    table->t_first = t_mjd.front();
    table->t_last = t_mjd.back();
    for (int axis = 0; axis < 3; ++axis) {
        std::vector<double> x = t_mjd;
        std::vector<double> y(positions.size());
        for (std::size_t i = 0; i < positions.size(); ++i) y[i] = positions[i](axis);
        table->components.emplace_back(std::move(x), std::move(y));
    }
    Trajectory t;
    t.kind_ = Kind::Tabulated;
    t.table_ = std::move(table);
    return t;
}

Trajectory Trajectory::fixed(const Eigen::Vector3d& position) {
    Trajectory t;
    t.kind_ = Kind::Fixed;
    t.fixed_ = position;
    return t;
}

bool Trajectory::covers(double t_mjd) const {
    if (kind_ != Kind::Tabulated) return std::isfinite(t_mjd);
    return t_mjd >= table_->t_first && t_mjd <= table_->t_last;
}

Eigen::Vector3d Trajectory::position_at(double t_mjd) const {
    switch (kind_) {
    case Kind::Fixed:
        return fixed_;
    case Kind::Kepler:
        return kepler_state(elements_, t_mjd).position;
    case Kind::Tabulated:
        if (!covers(t_mjd)) {
            throw TrajectoryError("trajectory query at MJD " + text::format_double(t_mjd) +
                                  " outside table span");
        }
        return {table_->components[0](t_mjd), table_->components[1](t_mjd), table_->components[2](t_mjd)};
    }
    return fixed_;
}

Trajectory parse_trajectory_table(std::istream& in) {
    std::vector<double> t;
    std::vector<Eigen::Vector3d> p;
    std::string raw;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = text::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto f = text::split(line, ',');
        if (!header_seen) {
            if (f.size() != 4 || f[0] != "t_days" || f[1] != "x_au" || f[2] != "y_au" || f[3] != "z_au") {
                throw ParseError("line " + std::to_string(line_no) +
                                     ": expected header 't_days, x_au, y_au, z_au'",
                                 line_no);
            }
            header_seen = true;
            continue;
        }
        if (f.size() != 4) throw ParseError("line " + std::to_string(line_no) + ": expected 4 fields", line_no);
        t.push_back(text::parse_double(f[0], line_no));
        p.emplace_back(text::parse_double(f[1], line_no), text::parse_double(f[2], line_no),
                       text::parse_double(f[3], line_no));
    }
    return Trajectory::tabulated(std::move(t), std::move(p));
}

Trajectory load_trajectory_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open trajectory '" + path.string() + "'");
    return parse_trajectory_table(in);
}

// ---------------------------------------------------------------------------
// Campaign schedule
// ---------------------------------------------------------------------------

void CampaignConfig::validate() const {
    if (stars.empty()) throw std::invalid_argument("campaign: no stars configured");
    if (!(exposure_s > 0.0)) throw std::invalid_argument("campaign: exposure must be positive");
    if (!(cadence_s >= exposure_s)) throw std::invalid_argument("campaign: cadence shorter than exposure");
    if (!(obs_time_s >= cadence_s)) throw std::invalid_argument("campaign: observation time shorter than cadence");
    if (!(slew_time_s >= 0.0)) throw std::invalid_argument("campaign: negative slew time");
    if (revisits < 1) throw std::invalid_argument("campaign: revisits must be >= 1");
    if (!std::isfinite(start_epoch_mjd) || !std::isfinite(true_clock_offset_s)) {
        throw std::invalid_argument("campaign: non-finite epoch or clock offset");
    }
}

double CampaignConfig::total_span_s() const {
    return static_cast<double>(revisits) * static_cast<double>(stars.size()) * (obs_time_s + slew_time_s);
}

double CampaignConfig::midpoint_mjd() const {
    return start_epoch_mjd + seconds_to_days(0.5 * total_span_s());
}

std::vector<ObservationWindow> build_schedule(const CampaignConfig& config) {
    config.validate();
    std::vector<ObservationWindow> windows;
    windows.reserve(config.stars.size() * static_cast<std::size_t>(config.revisits));
    const double slot = config.obs_time_s + config.slew_time_s;
    double start = 0.0;
    for (int r = 0; r < config.revisits; ++r) {
        for (std::size_t s = 0; s < config.stars.size(); ++s) {
            windows.push_back({s, start, start + config.obs_time_s});
            start += slot;
        }
    }
    return windows;
}

std::vector<double> exposure_midtimes(const ObservationWindow& w, const CampaignConfig& config) {
    std::vector<double> t;
    const double half = 0.5 * config.exposure_s;
    for (double begin = w.start_s; begin + config.exposure_s <= w.end_s + 1e-9; begin += config.cadence_s) {
        t.push_back(begin + half);
    }
    return t;
}

// ---------------------------------------------------------------------------
// Measurements
// ---------------------------------------------------------------------------

std::size_t StarMeasurements::valid_count() const {
    return static_cast<std::size_t>(
        std::count_if(samples.begin(), samples.end(), [](const Measurement& m) { return m.valid; }));
}

const StarMeasurements& MeasurementSet::star(const std::string& name) const {
    for (const auto& s : stars) {
        if (s.star == name) return s;
    }
    throw std::out_of_range("no measurements for star '" + name + "'");
}

MeasurementSet simulate_campaign(const Trajectory& trajectory, const CampaignConfig& config,
                                 std::span<const lightcurve::StarModel> truth,
                                 const detector::SensorConfig& sensor, const detector::BandConstants& band,
                                 std::mt19937_64& rng, const SimulationOptions& options) {
    config.validate();
    if (truth.size() != config.stars.size()) {
        throw std::invalid_argument("simulate_campaign: one truth model per configured star is required");
    }
    if (options.noise) {
        sensor.validate();
        band.validate();
    }
    const double end_mjd = config.start_epoch_mjd + seconds_to_days(config.total_span_s());
    if (!trajectory.covers(config.start_epoch_mjd) || !trajectory.covers(end_mjd)) {
        throw TrajectoryError("campaign extends outside the trajectory domain");
    }

    MeasurementSet set;
    for (const auto& name : config.stars) set.stars.push_back({name, config.start_epoch_mjd, {}});

    for (const auto& window : build_schedule(config)) {
        const auto& model = truth[window.star];
        auto& out = set.stars[window.star].samples;
        for (double t_s : exposure_midtimes(window, config)) {
            const double t_mjd = config.start_epoch_mjd + seconds_to_days(t_s);
            const Eigen::Vector3d p = trajectory.position_at(t_mjd);
            const double m_true = lightcurve::eval_observer(model, t_mjd, p, options.reference);
            Measurement m;
            m.t_prime_s = t_s - config.true_clock_offset_s;
            if (options.noise) {
                const auto sample =
                    detector::sample_measurement(m_true, sensor, band, config.exposure_s, rng, m.t_prime_s);
                const auto mag = detector::signal_to_mag(sample, sensor, band);
                m.valid = mag.has_value();
                m.mag = mag.value_or(0.0);
            } else {
                m.mag = m_true;
            }
            out.push_back(m);
        }
    }
    for (const auto& s : set.stars) {
        if (s.valid_count() == 0) {
            set.warnings.push_back("star '" + s.star + "' produced no valid samples (below detectability)");
        }
    }
    return set;
}

void write_measurements(std::ostream& out, const MeasurementSet& set) {
    const double epoch = set.stars.empty() ? 0.0 : set.stars.front().clock_epoch_mjd;
    for (const auto& s : set.stars) {
        if (s.clock_epoch_mjd != epoch) {
            throw std::invalid_argument("write_measurements: stars disagree on the clock epoch");
        }
    }
    out << "# clock_epoch_mjd: " << text::format_double(epoch) << '\n';
    out << "star, t_prime_s, mag, valid\n";
    for (const auto& s : set.stars) {
        for (const auto& m : s.samples) {
            out << s.star << ", " << text::format_double(m.t_prime_s) << ", " << text::format_double(m.mag)
                << ", " << (m.valid ? 1 : 0) << '\n';
        }
    }
}

MeasurementSet parse_measurements(std::istream& in) {
    MeasurementSet set;
    double epoch = 0.0;
    std::map<std::string, std::size_t> index;
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
            if (colon != std::string_view::npos && text::trim(body.substr(0, colon)) == "clock_epoch_mjd") {
                epoch = text::parse_double(body.substr(colon + 1), line_no);
            }
            continue;
        }
        const auto f = text::split(line, ',');
        if (!header_seen) {
            if (f.size() != 4 || f[0] != "star" || f[1] != "t_prime_s" || f[2] != "mag" || f[3] != "valid") {
                throw ParseError("line " + std::to_string(line_no) +
                                     ": expected header 'star, t_prime_s, mag, valid'",
                                 line_no);
            }
            header_seen = true;
            continue;
        }
        if (f.size() != 4) throw ParseError("line " + std::to_string(line_no) + ": expected 4 fields", line_no);
        const std::string name(f[0]);
        auto [it, inserted] = index.try_emplace(name, set.stars.size());
        if (inserted) set.stars.push_back({name, epoch, {}});
        auto& samples = set.stars[it->second].samples;
        Measurement m;
        m.t_prime_s = text::parse_double(f[1], line_no);
        m.mag = text::parse_double(f[2], line_no);
        m.valid = text::parse_integer(f[3], line_no) != 0;
        if (!samples.empty() && !(m.t_prime_s > samples.back().t_prime_s)) {
            throw ParseError("line " + std::to_string(line_no) + ": time tags for '" + name +
                                 "' must be strictly increasing",
                             line_no);
        }
        samples.push_back(m);
    }
    for (auto& s : set.stars) s.clock_epoch_mjd = epoch;
    return set;
}

void save_measurements(const std::filesystem::path& path, const MeasurementSet& set) {
    std::ostringstream ss;
    write_measurements(ss, set);
    text::write_file(path, ss.str());
}

MeasurementSet load_measurements(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open measurements '" + path.string() + "'");
    return parse_measurements(in);
}

} // namespace scutinav::scenario
