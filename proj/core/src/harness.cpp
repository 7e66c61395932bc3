#include "scutinav/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>
#include <json.hpp>

#include "scutinav/periodogram.hpp"
#include "scutinav/text_io.hpp"
#include "scutinav/units.hpp"

namespace scutinav::harness {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

scenario::Trajectory TrajectoryConfig::build() const {
    switch (kind) {
    case Kind::Kepler:
        return scenario::Trajectory::kepler(elements);
    case Kind::Table:
        return scenario::load_trajectory_table(table_path);
    case Kind::Fixed:
        return scenario::Trajectory::fixed(fixed_position);
    }
    throw ConfigError("unknown trajectory kind");
}

bool ModelConfig::operator==(const ModelConfig& o) const {
    const auto& a = synthetic;
    const auto& b = o.synthetic;
    return source == o.source && seed == o.seed && survey_days == o.survey_days &&
           survey_cadence_s == o.survey_cadence_s && survey_noise_mag == o.survey_noise_mag &&
           truth_cutoff == o.truth_cutoff && onboard_cutoff == o.onboard_cutoff && snr_min == o.snr_min &&
           a.extra_modes == b.extra_modes && a.min_ratio == b.min_ratio && a.max_ratio == b.max_ratio &&
           a.min_separation == b.min_separation && a.max_frequency == b.max_frequency &&
           truth_dir == o.truth_dir && onboard_dir == o.onboard_dir;
}

void RunConfig::validate() const {
    try {
        sensor.validate();
        band.validate();
        campaign.validate();
        region.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("run config '") + label + "': " + e.what());
    }
    if (samples < 1) throw ConfigError("run config '" + label + "': samples must be >= 1");
    if (campaign.stars.size() < 4) throw ConfigError("run config '" + label + "': at least 4 stars are required");
    if (!reference.allFinite()) throw ConfigError("run config '" + label + "': non-finite reference position");
    auto need = [&](const std::filesystem::path& p, const char* what) {
        if (!std::filesystem::exists(p)) {
            throw ConfigError("run config '" + label + "': " + what + " '" + p.string() + "' does not exist");
        }
    };
    if (models.source == ModelConfig::Source::Synthetic) {
        need(catalog_path, "catalog");
        if (!(models.survey_days > 0.0 && models.survey_cadence_s > 0.0 && models.survey_noise_mag >= 0.0)) {
            throw ConfigError("run config '" + label + "': invalid survey parameters");
        }
    } else {
        need(models.truth_dir, "truth model directory");
        need(models.onboard_dir, "onboard model directory");
    }
    if (trajectory.kind == TrajectoryConfig::Kind::Table) need(trajectory.table_path, "trajectory table");
}

namespace {

Eigen::Vector3d read_vector(const json& j, const char* key) {
    const auto& a = j.at(key);
    if (!a.is_array() || a.size() != 3) throw ConfigError(std::string("'") + key + "' must be a 3-vector");
    return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

template <typename T>
void read_opt(const json& j, const char* key, T& field) {
    if (j.contains(key)) field = j.at(key).get<T>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : (base / path).lexically_normal();
}

} // namespace

RunConfig parse_run_config(std::string_view document, const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("run config: ") + e.what());
    }
    RunConfig cfg;
    try {
        read_opt(doc, "label", cfg.label);
        cfg.catalog_path = resolve(base_dir, doc.value("catalog", std::string("table_b1.csv")));

        if (doc.contains("sensor")) {
            const auto& s = doc.at("sensor");
            if (s.is_string()) {
                cfg.sensor = detector::load_sensor(resolve(base_dir, s.get<std::string>()));
            } else {
                cfg.sensor = detector::parse_sensor(s.dump());
            }
        }
        if (doc.contains("band")) {
            const auto& b = doc.at("band");
            read_opt(b, "zero_point_flux", cfg.band.zero_point_flux);
            read_opt(b, "effective_bandwidth_A", cfg.band.effective_bandwidth_A);
            read_opt(b, "mean_wavelength_nm", cfg.band.mean_wavelength_nm);
        }

        if (doc.contains("trajectory")) {
            const auto& t = doc.at("trajectory");
            const auto kind = t.value("kind", std::string("kepler"));
            if (kind == "kepler") {
                auto& el = cfg.trajectory.elements;
                cfg.trajectory.kind = TrajectoryConfig::Kind::Kepler;
                read_opt(t, "epoch_mjd", el.epoch_mjd);
                read_opt(t, "a_au", el.a_au);
                read_opt(t, "e", el.e);
                read_opt(t, "inclination_deg", el.inclination_deg);
                read_opt(t, "raan_deg", el.raan_deg);
                read_opt(t, "arg_periapsis_deg", el.arg_periapsis_deg);
                read_opt(t, "mean_anomaly_deg", el.mean_anomaly_deg);
                read_opt(t, "gm_au3_day2", el.gm);
                read_opt(t, "ecliptic", el.ecliptic);
            } else if (kind == "table") {
                cfg.trajectory.kind = TrajectoryConfig::Kind::Table;
                cfg.trajectory.table_path = resolve(base_dir, t.at("path").get<std::string>());
            } else if (kind == "fixed") {
                cfg.trajectory.kind = TrajectoryConfig::Kind::Fixed;
                cfg.trajectory.fixed_position = read_vector(t, "position_au");
            } else {
                throw ConfigError("unknown trajectory kind '" + kind + "'");
            }
        }

        if (doc.contains("campaign")) {
            const auto& c = doc.at("campaign");
            read_opt(c, "stars", cfg.campaign.stars);
            read_opt(c, "obs_time_s", cfg.campaign.obs_time_s);
            read_opt(c, "exposure_s", cfg.campaign.exposure_s);
            read_opt(c, "cadence_s", cfg.campaign.cadence_s);
            read_opt(c, "slew_time_s", cfg.campaign.slew_time_s);
            read_opt(c, "revisits", cfg.campaign.revisits);
            read_opt(c, "start_epoch_mjd", cfg.campaign.start_epoch_mjd);
            read_opt(c, "true_clock_offset_s", cfg.campaign.true_clock_offset_s);
        }
        if (doc.contains("reference_au")) cfg.reference = read_vector(doc, "reference_au");
        if (doc.contains("region")) {
            const auto& r = doc.at("region");
            if (r.contains("center_au")) cfg.region.center = read_vector(r, "center_au");
            read_opt(r, "radius_au", cfg.region.radius_au);
            read_opt(r, "time_center_s", cfg.region.time_center_s);
            read_opt(r, "time_half_width_s", cfg.region.time_half_width_s);
        }
        read_opt(doc, "noise", cfg.noise);

        if (doc.contains("models")) {
            const auto& m = doc.at("models");
            const auto source = m.value("source", std::string("synthetic"));
            if (source == "synthetic") {
                cfg.models.source = ModelConfig::Source::Synthetic;
            } else if (source == "files") {
                cfg.models.source = ModelConfig::Source::Files;
                cfg.models.truth_dir = resolve(base_dir, m.at("truth_dir").get<std::string>());
                cfg.models.onboard_dir = resolve(base_dir, m.at("onboard_dir").get<std::string>());
            } else {
                throw ConfigError("unknown model source '" + source + "'");
            }
            read_opt(m, "seed", cfg.models.seed);
            read_opt(m, "survey_days", cfg.models.survey_days);
            read_opt(m, "survey_cadence_s", cfg.models.survey_cadence_s);
            read_opt(m, "survey_noise_mag", cfg.models.survey_noise_mag);
            read_opt(m, "truth_cutoff", cfg.models.truth_cutoff);
            read_opt(m, "onboard_cutoff", cfg.models.onboard_cutoff);
            read_opt(m, "snr_min", cfg.models.snr_min);
            read_opt(m, "extra_modes", cfg.models.synthetic.extra_modes);
            read_opt(m, "min_ratio", cfg.models.synthetic.min_ratio);
            read_opt(m, "max_ratio", cfg.models.synthetic.max_ratio);
            read_opt(m, "min_separation", cfg.models.synthetic.min_separation);
            read_opt(m, "max_frequency", cfg.models.synthetic.max_frequency);
        }
        if (doc.contains("estimation")) {
            const auto& e = doc.at("estimation");
            read_opt(e, "step_fraction", cfg.enumeration.step_fraction);
            read_opt(e, "tolerance_s", cfg.enumeration.tolerance_s);
            read_opt(e, "merge_fraction", cfg.enumeration.merge_fraction);
            read_opt(e, "sigma_floor_s", cfg.enumeration.sigma_floor_s);
            read_opt(e, "max_objective_ratio", cfg.enumeration.max_objective_ratio);
            read_opt(e, "correlated_residuals", cfg.enumeration.correlated_residuals);
        }
        if (doc.contains("search")) {
            const auto& s = doc.at("search");
            read_opt(s, "gate_sigmas", cfg.search.gate_sigmas);
            read_opt(s, "residual_bound", cfg.search.residual_bound);
            read_opt(s, "chi2_probability", cfg.search.chi2_probability);
        }
        read_opt(doc, "samples", cfg.samples);
        read_opt(doc, "base_seed", cfg.base_seed);
        if (doc.contains("output_dir")) cfg.output_dir = resolve(base_dir, doc.at("output_dir").get<std::string>());
    } catch (const json::exception& e) {
        throw ParseError(std::string("run config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    return parse_run_config(text::read_file(path), path.parent_path());
}

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

PreparedModels prepare_models(const RunConfig& config) {
    PreparedModels out;
    const auto& m = config.models;
    if (m.source == ModelConfig::Source::Files) {
        for (const auto& name : config.campaign.stars) {
            out.truth.push_back(lightcurve::load_model(m.truth_dir / (name + ".json")));
            out.onboard.push_back(lightcurve::load_model(m.onboard_dir / (name + ".json")));
            out.los.push_back(out.onboard.back().los);
        }
        return out;
    }

    const auto catalog = catalog::load_catalog(config.catalog_path);
    // the survey ends where the campaign starts
    const double end = config.campaign.start_epoch_mjd;
    const double step = seconds_to_days(m.survey_cadence_s);
    const auto count = static_cast<std::size_t>(std::floor(m.survey_days / step)) + 1;
    std::vector<double> times(count);
    for (std::size_t i = 0; i < count; ++i) times[i] = end - m.survey_days + step * static_cast<double>(i);

    for (const auto& name : config.campaign.stars) {
        const auto& entry = catalog::find_star(catalog, name);
        const auto star = lightcurve::synthetic_model(entry, end - 0.5 * m.survey_days, m.seed, m.synthetic);
        std::mt19937_64 rng(m.seed ^ (lightcurve::stable_hash(name) + 0x9e3779b97f4a7c15ULL));
        const auto series = lightcurve::sample_series(star, times, m.survey_noise_mag, rng);
        out.truth.push_back(lightcurve::fit_model(series, m.snr_min, m.truth_cutoff, star.los));
        out.onboard.push_back(lightcurve::fit_model(series, m.snr_min, m.onboard_cutoff, star.los));
        out.truth.back().star = name;
        out.onboard.back().star = name;
        out.los.push_back(star.los);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Single run
// ---------------------------------------------------------------------------

std::pair<double, double> candidate_window(const catalog::LosVector& los, const navsolver::SearchRegion& region,
                                           const Eigen::Vector3d& b) {
    // dt = t_offset + u.(p - b)/c over the region
    const double mid = los.vec().dot(region.center - b) / kLightAuPerSecond;
    const double half = region.radius_au / kLightAuPerSecond;
    return {region.time_center_s - region.time_half_width_s + mid - half,
            region.time_center_s + region.time_half_width_s + mid + half};
}

SolveOutcome solve_measurements(const scenario::MeasurementSet& measurements,
                                std::span<const lightcurve::StarModel> onboard, const RunConfig& config) {
    SolveOutcome out;
    std::vector<catalog::LosVector> los;
    for (const auto& model : onboard) {
        const auto& meas = measurements.star(model.star);
        const auto [lo, hi] = candidate_window(model.los, config.region, config.reference);
        try {
            out.candidates.push_back(estimation::enumerate_candidates(meas, model, lo, hi, config.enumeration));
        } catch (const estimation::EstimationError& e) {
            out.candidates.emplace_back();
            if (out.failure.empty()) out.failure = e.what();
        }
        los.push_back(model.los);
    }
    out.solutions = navsolver::ambiguity_search(out.candidates, los, config.reference, config.region, config.search);
    if (out.solutions.empty()) {
        if (out.failure.empty()) out.failure = "ambiguity unresolved: no solution in the search region";
        return out;
    }
    out.selected = navsolver::select_solution(out.solutions);
    return out;
}

InstanceRecord run_single(const RunConfig& config, const PreparedModels& models, std::uint64_t seed,
                          std::size_t index) {
    const auto started = std::chrono::steady_clock::now();
    InstanceRecord rec;
    rec.index = index;
    rec.seed = seed;

    const auto trajectory = config.trajectory.build();
    std::mt19937_64 rng(seed);
    scenario::SimulationOptions sim;
    sim.noise = config.noise;
    sim.reference = config.reference;
    const auto meas =
        scenario::simulate_campaign(trajectory, config.campaign, models.truth, config.sensor, config.band, rng, sim);

    const auto outcome = solve_measurements(meas, models.onboard, config);
    for (const auto& c : outcome.candidates) rec.candidate_total += c.size();
    rec.solution_count = outcome.solutions.size();
    if (outcome.selected) {
        const auto& sol = *outcome.selected;
        const Eigen::Vector3d truth = trajectory.position_at(config.campaign.midpoint_mjd());
        rec.solved = true;
        rec.clock_offset_s = sol.clock_offset_s;
        rec.position = sol.p;
        rec.position_error_au = (sol.p - truth).norm();
        rec.time_error_s = sol.clock_offset_s - config.campaign.true_clock_offset_s;
        const double norm = sol.p.norm();
        const Eigen::Vector3d dir = norm > 0.0 ? Eigen::Vector3d(sol.p / norm) : Eigen::Vector3d::UnitX();
        rec.sigma_time_s = std::sqrt(std::max(0.0, sol.covariance(0, 0)));
        rec.sigma_range_au = std::sqrt(std::max(0.0, dir.dot(sol.covariance.bottomRightCorner<3, 3>() * dir)));
        rec.cov_time_range = sol.covariance.block<1, 3>(0, 1).dot(dir.transpose());
    } else {
        rec.failure = outcome.failure;
    }
    rec.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return rec;
}

// ---------------------------------------------------------------------------
// Monte Carlo
// ---------------------------------------------------------------------------

Aggregate aggregate(std::span<const double> values) {
    Aggregate a;
    a.count = values.size();
    if (values.empty()) return a;
    double sum = 0.0;
    for (double v : values) sum += v;
    a.mean = sum / static_cast<double>(values.size());
    if (values.size() >= 2) {
        double ss = 0.0;
        for (double v : values) ss += (v - a.mean) * (v - a.mean);
        a.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return a;
}

Ellipse make_ellipse(const Eigen::Vector2d& center, const Eigen::Matrix2d& covariance, int points) {
    Ellipse e;
    e.center = center;
    e.covariance = covariance;
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(covariance);
    const Eigen::Vector2d axes = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt() * 3.0;
    for (int k = 0; k < points; ++k) {
        const double th = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(points - 1);
        e.outline.push_back(center + eig.eigenvectors() * Eigen::Vector2d(axes(0) * std::cos(th),
                                                                          axes(1) * std::sin(th)));
    }
    e.outline.back() = e.outline.front();
    return e;
}

MonteCarloReport summarize(const RunConfig& config, std::vector<InstanceRecord> instances) {
    MonteCarloReport r;
    r.label = config.label;
    r.sensor = config.sensor.name;
    r.base_seed = config.base_seed;
    r.instances = std::move(instances);

    std::vector<double> pos, time, abs_time;
    Eigen::Matrix2d mean_cov = Eigen::Matrix2d::Zero();
    for (const auto& rec : r.instances) {
        r.runtime_s += rec.runtime_s;
        if (!rec.solved) continue;
        ++r.solved;
        pos.push_back(rec.position_error_au);
        time.push_back(rec.time_error_s);
        abs_time.push_back(std::abs(rec.time_error_s));
        Eigen::Matrix2d c;
        c << rec.sigma_time_s * rec.sigma_time_s, rec.cov_time_range, rec.cov_time_range,
            rec.sigma_range_au * rec.sigma_range_au;
        mean_cov += c;
    }
    r.position_error = aggregate(pos);
    r.time_error = aggregate(time);
    r.abs_time_error = aggregate(abs_time);
    if (r.solved >= 2) {
        const Eigen::Vector2d center(r.time_error.mean, r.position_error.mean);
        Eigen::Matrix2d sample = Eigen::Matrix2d::Zero();
        for (std::size_t i = 0; i < pos.size(); ++i) {
            const Eigen::Vector2d d(time[i] - center(0), pos[i] - center(1));
            sample += d * d.transpose();
        }
        sample /= static_cast<double>(pos.size() - 1);
        r.numerical = make_ellipse(center, sample);
        r.analytic = make_ellipse(center, mean_cov / static_cast<double>(r.solved));
    }
    return r;
}

MonteCarloReport run_monte_carlo(const RunConfig& config, const PreparedModels& models) {
    config.validate();
    std::vector<InstanceRecord> instances;
    instances.reserve(static_cast<std::size_t>(config.samples));
    for (int i = 0; i < config.samples; ++i) {
        const auto index = static_cast<std::size_t>(i);
        instances.push_back(run_single(config, models, config.base_seed + index, index));
    }
    return summarize(config, std::move(instances));
}

MonteCarloReport run_monte_carlo(const RunConfig& config) {
    return run_monte_carlo(config, prepare_models(config));
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

namespace {

using text::format_double;

json aggregate_json(const Aggregate& a) {
    json j = {{"count", a.count}, {"mean", a.count ? json(a.mean) : json(nullptr)}};
    j["stddev"] = a.stddev ? json(*a.stddev) : json(nullptr);
    return j;
}

std::string format_ellipse(const std::optional<Ellipse>& e) {
    std::ostringstream out;
    out << "time_error_s, position_error_au\n";
    if (e) {
        for (const auto& p : e->outline) out << format_double(p(0)) << ", " << format_double(p(1)) << '\n';
    }
    return out.str();
}

} // namespace

std::string format_instances(const MonteCarloReport& report) {
    std::ostringstream out;
    out << "index, seed, solved, position_error_au, time_error_s, clock_offset_s, x_au, y_au, z_au, "
           "solutions, candidates, sigma_time_s, sigma_range_au, failure\n";
    for (const auto& r : report.instances) {
        out << r.index << ", " << r.seed << ", " << (r.solved ? 1 : 0) << ", " << format_double(r.position_error_au)
            << ", " << format_double(r.time_error_s) << ", " << format_double(r.clock_offset_s) << ", "
            << format_double(r.position(0)) << ", " << format_double(r.position(1)) << ", "
            << format_double(r.position(2)) << ", " << r.solution_count << ", " << r.candidate_total << ", "
            << format_double(r.sigma_time_s) << ", " << format_double(r.sigma_range_au) << ", ";
        // failure text is free-form; keep it free of the delimiter
        std::string f = r.failure;
        std::replace(f.begin(), f.end(), ',', ';');
        out << f << '\n';
    }
    return out.str();
}

std::string format_summary(const MonteCarloReport& r) {
    json doc = {
        {"label", r.label},
        {"sensor", r.sensor},
        {"base_seed", r.base_seed},
        {"samples", r.instances.size()},
        {"solved", r.solved},
        {"position_error_au", aggregate_json(r.position_error)},
        {"time_error_s", aggregate_json(r.time_error)},
        {"abs_time_error_s", aggregate_json(r.abs_time_error)},
    };
    auto cov = [](const std::optional<Ellipse>& e) {
        if (!e) return json(nullptr);
        return json{{"center", {e->center(0), e->center(1)}},
                    {"covariance", {{e->covariance(0, 0), e->covariance(0, 1)},
                                    {e->covariance(1, 0), e->covariance(1, 1)}}}};
    };
    doc["ellipse_numerical"] = cov(r.numerical);
    doc["ellipse_analytic"] = cov(r.analytic);
    return doc.dump(2) + "\n";
}

void emit_reports(const MonteCarloReport& report, const std::filesystem::path& outdir) {
    std::error_code ec;
    std::filesystem::create_directories(outdir, ec);
    if (ec) throw IoError("cannot create output directory '" + outdir.string() + "': " + ec.message());
    text::write_file(outdir / "instances.csv", format_instances(report));
    text::write_file(outdir / "summary.json", format_summary(report));
    text::write_file(outdir / "ellipse_numerical.csv", format_ellipse(report.numerical));
    text::write_file(outdir / "ellipse_analytic.csv", format_ellipse(report.analytic));
    std::ostringstream timing;
    timing << "index, runtime_s\n";
    for (const auto& r : report.instances) timing << r.index << ", " << format_double(r.runtime_s) << '\n';
    text::write_file(outdir / "timing.csv", timing.str());
}

// ---------------------------------------------------------------------------
// Case grid
// ---------------------------------------------------------------------------

std::vector<CaseSpec> standard_cases() {
    return {{1, 120.0, 3.0, 20}, {2, 240.0, 3.0, 10}, {3, 480.0, 3.0, 5}, {4, 120.0, 2.0, 20},
            {5, 120.0, 1.0, 20}, {6, 120.0, 3.0, 10}, {7, 120.0, 3.0, 30}};
}

RunConfig apply_case(RunConfig config, const CaseSpec& spec) {
    config.campaign.obs_time_s = spec.obs_time_s;
    config.campaign.exposure_s = spec.exposure_s;
    config.campaign.revisits = spec.revisits;
    config.label += "_case" + std::to_string(spec.number);
    return config;
}

std::vector<CaseRow> run_case_grid(std::span<const RunConfig> configs, std::span<const CaseSpec> specs) {
    std::vector<CaseRow> rows;
    // models depend only on the star list and model settings; share them across cases
    std::vector<std::pair<const RunConfig*, PreparedModels>> cache;
    for (const auto& base : configs) {
        const PreparedModels* models = nullptr;
        std::string prep_error;
        for (const auto& [cfg, m] : cache) {
            if (cfg->models == base.models && cfg->campaign.stars == base.campaign.stars &&
                cfg->catalog_path == base.catalog_path) {
                models = &m;
            }
        }
        if (!models) {
            try {
                cache.emplace_back(&base, prepare_models(base));
                models = &cache.back().second;
            } catch (const std::exception& e) {
                prep_error = e.what();
            }
        }
        for (const auto& spec : specs) {
            CaseRow row;
            row.sensor = base.sensor.name;
            row.spec = spec;
            if (!models) {
                row.error = prep_error;
            } else {
                try {
                    row.report = run_monte_carlo(apply_case(base, spec), *models);
                } catch (const std::exception& e) {
                    row.error = e.what();
                }
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::string format_case_table(std::span<const CaseRow> rows) {
    std::ostringstream out;
    out << "sensor, case, obs_time_s, exposure_s, revisits, position_error_mean_au, position_error_sd_au, "
           "time_error_mean_s, time_error_sd_s, solved, samples, status\n";
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    for (const auto& r : rows) {
        const auto& rep = r.report;
        out << r.sensor << ", " << r.spec.number << ", " << format_double(r.spec.obs_time_s) << ", "
            << format_double(r.spec.exposure_s) << ", " << r.spec.revisits << ", ";
        if (!r.error.empty()) {
            std::string e = r.error;
            std::replace(e.begin(), e.end(), ',', ';');
            out << ", , , , , , error: " << e << '\n';
            continue;
        }
        out << (rep.solved ? format_double(rep.position_error.mean) : std::string()) << ", "
            << opt(rep.position_error.stddev) << ", "
            << (rep.solved ? format_double(rep.time_error.mean) : std::string()) << ", "
            << opt(rep.time_error.stddev) << ", " << rep.solved << ", " << rep.instances.size() << ", ok\n";
    }
    return out.str();
}

} // namespace scutinav::harness
