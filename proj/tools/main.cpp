// scutinav command-line front end.
//
//   scutinav catalog validate <catalog.csv>
//   scutinav model fit <series.csv> --ra .. --dec .. -o model.json
//   scutinav simulate --config run.json -o measurements.csv
//   scutinav solve --config run.json --measurements measurements.csv
//   scutinav montecarlo --config run.json [--samples N] [--seed S] [--out DIR]
//   scutinav casegrid --config a.json --config b.json [--samples N] --out DIR
//   scutinav oc --measurements segments.csv --model model.json

#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "scutinav/catalog.hpp"
#include "scutinav/estimation.hpp"
#include "scutinav/harness.hpp"
#include "scutinav/lightcurve.hpp"
#include "scutinav/periodogram.hpp"
#include "scutinav/scenario.hpp"
#include "scutinav/text_io.hpp"

namespace fs = std::filesystem;
using namespace scutinav;

namespace {

void print_report_line(const harness::MonteCarloReport& r) {
    std::cout << r.label << ": solved " << r.solved << "/" << r.instances.size();
    if (r.solved) {
        std::cout << ", position error " << r.position_error.mean << " au";
        if (r.position_error.stddev) std::cout << " (sd " << *r.position_error.stddev << ")";
        std::cout << ", time error " << r.time_error.mean << " s";
        if (r.time_error.stddev) std::cout << " (sd " << *r.time_error.stddev << ")";
    }
    std::cout << ", runtime " << r.runtime_s << " s\n";
}

int cmd_catalog_validate(const fs::path& path, double vmag, double amp, double freq) {
    const auto entries = catalog::load_catalog(path);
    const auto selected = catalog::select_stars(entries, {vmag, amp, freq});
    std::cout << path.string() << ": " << entries.size() << " entries valid, " << selected.size()
              << " pass the selection (V < " << vmag << ", dV >= " << amp << ", f > " << freq << ")\n";
    return 0;
}

int cmd_model_fit(const fs::path& series_path, double ra, double dec, double snr, double cutoff,
                  const std::string& name, const fs::path& out) {
    auto series = lightcurve::load_series(series_path);
    if (!name.empty()) series.source_label = name;
    const auto model = lightcurve::fit_model(series, snr, cutoff, catalog::los_vector(ra, dec));
    const auto doc = lightcurve::format_model(model);
    if (out.empty()) {
        std::cout << doc;
    } else {
        lightcurve::save_model(out, model);
        std::cout << "wrote " << out.string() << " (" << model.modes.size() << " modes)\n";
    }
    return 0;
}

int cmd_simulate(const fs::path& config_path, std::uint64_t seed, bool seed_given, const fs::path& out,
                 const fs::path& models_out) {
    const auto cfg = harness::load_run_config(config_path);
    const auto models = harness::prepare_models(cfg);
    std::mt19937_64 rng(seed_given ? seed : cfg.base_seed);
    scenario::SimulationOptions sim;
    sim.noise = cfg.noise;
    sim.reference = cfg.reference;
    const auto meas = scenario::simulate_campaign(cfg.trajectory.build(), cfg.campaign, models.truth, cfg.sensor,
                                                  cfg.band, rng, sim);
    for (const auto& w : meas.warnings) std::cerr << "warning: " << w << '\n';
    scenario::save_measurements(out, meas);
    if (!models_out.empty()) {
        fs::create_directories(models_out / "truth");
        fs::create_directories(models_out / "onboard");
        for (std::size_t i = 0; i < models.truth.size(); ++i) {
            lightcurve::save_model(models_out / "truth" / (models.truth[i].star + ".json"), models.truth[i]);
            lightcurve::save_model(models_out / "onboard" / (models.onboard[i].star + ".json"), models.onboard[i]);
        }
    }
    std::cout << "wrote " << out.string() << '\n';
    return 0;
}

int cmd_solve(const fs::path& config_path, const fs::path& meas_path, const fs::path& out) {
    const auto cfg = harness::load_run_config(config_path);
    const auto models = harness::prepare_models(cfg);
    const auto meas = scenario::load_measurements(meas_path);
    const auto outcome = harness::solve_measurements(meas, models.onboard, cfg);

    nlohmann::json doc;
    std::vector<std::size_t> counts;
    for (const auto& c : outcome.candidates) counts.push_back(c.size());
    doc["stars"] = cfg.campaign.stars;
    doc["candidate_counts"] = counts;
    doc["solutions"] = outcome.solutions.size();
    if (outcome.selected) {
        const auto& s = *outcome.selected;
        doc["clock_offset_s"] = s.clock_offset_s;
        doc["position_au"] = {s.p(0), s.p(1), s.p(2)};
        doc["residual_norm"] = s.residual_norm;
        doc["delta_t_s"] = s.delta_t_s;
        std::vector<std::vector<double>> cov(4, std::vector<double>(4));
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) cov[i][j] = s.covariance(i, j);
        doc["covariance_t_s_r_au"] = cov;
    } else {
        doc["failure"] = outcome.failure;
    }
    const auto text = doc.dump(2) + "\n";
    if (out.empty()) {
        std::cout << text;
    } else {
        text::write_file(out, text);
    }
    if (!outcome.selected) {
        std::cerr << "error: " << outcome.failure << '\n';
        return 2;
    }
    return 0;
}

int cmd_montecarlo(const fs::path& config_path, int samples, std::int64_t seed, const fs::path& out) {
    auto cfg = harness::load_run_config(config_path);
    if (samples > 0) cfg.samples = samples;
    if (seed >= 0) cfg.base_seed = static_cast<std::uint64_t>(seed);
    const auto report = harness::run_monte_carlo(cfg);
    const auto dir = out.empty() ? cfg.output_dir : out;
    harness::emit_reports(report, dir);
    print_report_line(report);
    std::cout << "reports in " << dir.string() << '\n';
    return 0;
}

int cmd_casegrid(const std::vector<fs::path>& configs, int samples, std::int64_t seed, const fs::path& out,
                 const std::vector<int>& cases) {
    std::vector<harness::RunConfig> cfgs;
    for (const auto& p : configs) {
        auto c = harness::load_run_config(p);
        if (samples > 0) c.samples = samples;
        if (seed >= 0) c.base_seed = static_cast<std::uint64_t>(seed);
        cfgs.push_back(std::move(c));
    }
    std::vector<harness::CaseSpec> specs;
    for (const auto& s : harness::standard_cases()) {
        if (cases.empty() || std::find(cases.begin(), cases.end(), s.number) != cases.end()) specs.push_back(s);
    }
    const auto rows = harness::run_case_grid(cfgs, specs);
    fs::create_directories(out);
    for (const auto& row : rows) {
        if (!row.error.empty()) {
            std::cerr << row.sensor << " case " << row.spec.number << ": " << row.error << '\n';
            continue;
        }
        harness::emit_reports(row.report, out / row.report.label);
        print_report_line(row.report);
    }
    const auto table = harness::format_case_table(rows);
    text::write_file(out / "case_table.csv", table);
    std::cout << table;
    return 0;
}

int cmd_oc(const fs::path& meas_path, const fs::path& model_path, const fs::path& predictions,
           const fs::path& out) {
    const auto model = lightcurve::load_model(model_path);
    const auto meas = scenario::load_measurements(meas_path);
    std::map<std::string, double> predicted;
    if (!predictions.empty()) {
        // "label, predicted_delta_t_s"
        std::istringstream in(text::read_file(predictions));
        std::string line;
        std::size_t no = 0;
        while (std::getline(in, line)) {
            ++no;
            const auto t = text::trim(line);
            if (t.empty() || t.front() == '#' || no == 1) continue;
            const auto f = text::split(t, ',');
            if (f.size() != 2) throw ParseError("line " + std::to_string(no) + ": expected 2 fields", no);
            predicted[std::string(f[0])] = text::parse_double(f[1], no);
        }
    }
    std::vector<estimation::OcSegment> segments;
    for (const auto& s : meas.stars) {
        estimation::OcSegment seg;
        seg.label = s.star;
        seg.measurements = s;
        if (auto it = predicted.find(s.star); it != predicted.end()) seg.predicted_delta_t_s = it->second;
        segments.push_back(std::move(seg));
    }
    const auto series = estimation::oc_analysis(segments, model);
    std::ostringstream table;
    table << "# slope_s_per_day: " << text::format_double(series.slope_s_per_day) << '\n';
    table << "# detrended_sigma_s: " << text::format_double(series.detrended_sigma_s) << '\n';
    table << "segment, epoch_mjd, o_minus_c_s\n";
    for (std::size_t i = 0; i < series.labels.size(); ++i) {
        table << series.labels[i] << ", " << text::format_double(series.epochs_days[i]) << ", "
              << text::format_double(series.o_minus_c_s[i]) << '\n';
    }
    for (const auto& f : series.flagged) std::cerr << "flagged: " << f << '\n';
    if (out.empty()) {
        std::cout << table.str();
    } else {
        text::write_file(out, table.str());
        std::cout << "slope " << series.slope_s_per_day << " s/day, detrended sigma " << series.detrended_sigma_s
                  << " s\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"scutinav: navigation from delta Scuti star light curves"};
    app.require_subcommand(1);
    int rc = 0;

    auto* cat = app.add_subcommand("catalog", "Star catalog utilities");
    cat->require_subcommand(1);
    auto* validate = cat->add_subcommand("validate", "Validate a catalog file and apply the selection");
    fs::path cat_path;
    double vmag = 7.0, amp = 0.04, freq = 5.0;
    validate->add_option("catalog", cat_path, "Catalog file")->required();
    validate->add_option("--vmag-max", vmag, "Brightness limit");
    validate->add_option("--amp-min", amp, "Minimum amplitude [mag]");
    validate->add_option("--freq-min", freq, "Minimum dominant frequency [c/d]");
    validate->callback([&] { rc = cmd_catalog_validate(cat_path, vmag, amp, freq); });

    auto* model = app.add_subcommand("model", "Light-curve model utilities");
    model->require_subcommand(1);
    auto* fit = model->add_subcommand("fit", "Fit a multi-mode model to a photometric series");
    fs::path series_path, model_out;
    double ra = 0.0, dec = 0.0, snr = 3.0, cutoff = 0.01;
    std::string star_name;
    fit->add_option("series", series_path, "Series file")->required();
    fit->add_option("--ra", ra, "Right ascension [deg]")->required();
    fit->add_option("--dec", dec, "Declination [deg]")->required();
    fit->add_option("--snr-min", snr, "Periodogram SNR threshold");
    fit->add_option("--cutoff", cutoff, "Relative amplitude cutoff");
    fit->add_option("--star", star_name, "Star name recorded in the model");
    fit->add_option("-o,--output", model_out, "Model file (stdout when omitted)");
    fit->callback([&] { rc = cmd_model_fit(series_path, ra, dec, snr, cutoff, star_name, model_out); });

    fs::path config_path, meas_path, out_path, models_out;
    std::int64_t seed = -1;
    int samples = 0;

    auto* sim = app.add_subcommand("simulate", "Simulate one measurement campaign");
    sim->add_option("-c,--config", config_path, "Run configuration")->required()->check(CLI::ExistingFile);
    sim->add_option("-s,--seed", seed, "Random seed (default: base_seed)");
    sim->add_option("-o,--output", out_path, "Measurement file")->required();
    sim->add_option("--models-out", models_out, "Also write the truth and onboard models here");
    sim->callback([&] { rc = cmd_simulate(config_path, static_cast<std::uint64_t>(seed), seed >= 0, out_path, models_out); });

    auto* solve = app.add_subcommand("solve", "Estimate position and clock offset from measurements");
    solve->add_option("-c,--config", config_path, "Run configuration")->required()->check(CLI::ExistingFile);
    solve->add_option("-m,--measurements", meas_path, "Measurement file")->required()->check(CLI::ExistingFile);
    solve->add_option("-o,--output", out_path, "Solution file (stdout when omitted)");
    solve->callback([&] { rc = cmd_solve(config_path, meas_path, out_path); });

    auto* mc = app.add_subcommand("montecarlo", "Monte Carlo campaign");
    mc->add_option("-c,--config", config_path, "Run configuration")->required()->check(CLI::ExistingFile);
    mc->add_option("-n,--samples", samples, "Instance count (overrides the config)");
    mc->add_option("-s,--seed", seed, "Base seed (overrides the config)");
    mc->add_option("-o,--out", out_path, "Output directory (overrides the config)");
    mc->callback([&] { rc = cmd_montecarlo(config_path, samples, seed, out_path); });

    auto* grid = app.add_subcommand("casegrid", "Observation-parameter case grid");
    std::vector<fs::path> grid_configs;
    std::vector<int> cases;
    grid->add_option("-c,--config", grid_configs, "Run configuration, one per sensor")
        ->required()
        ->check(CLI::ExistingFile);
    grid->add_option("-n,--samples", samples, "Instances per case (overrides the config)");
    grid->add_option("-s,--seed", seed, "Base seed (overrides the config)");
    grid->add_option("--cases", cases, "Subset of case numbers (default 1-7)");
    grid->add_option("-o,--out", out_path, "Output directory")->required();
    grid->callback([&] { rc = cmd_casegrid(grid_configs, samples, seed, out_path, cases); });

    auto* oc = app.add_subcommand("oc", "Observed-minus-computed timing analysis");
    fs::path oc_model, oc_pred;
    oc->add_option("-m,--measurements", meas_path, "Segment measurements (star column = segment)")
        ->required()
        ->check(CLI::ExistingFile);
    oc->add_option("--model", oc_model, "Star model")->required()->check(CLI::ExistingFile);
    oc->add_option("--predicted", oc_pred, "Predicted shift per segment (label, predicted_delta_t_s)");
    oc->add_option("-o,--output", out_path, "O-C table (stdout when omitted)");
    oc->callback([&] { rc = cmd_oc(meas_path, oc_model, oc_pred, out_path); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return rc;
}
