#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <Eigen/Dense>

#include "scutinav/harness.hpp"
#include "scutinav/text_io.hpp"
#include "support.hpp"

using namespace scutinav;
using namespace scutinav::harness;

namespace {

std::string small_config(const std::string& extra = "") {
    return R"({
  "label": "small",
  "catalog": "table_b1.csv",
  "sensor": "sensors/polycam.json",
  "trajectory": {"kind": "fixed", "position_au": [0.7, -0.4, 0.05]},
  "campaign": {
    "stars": ["V0474 Mon", "del Sct", "rho Pup", "ups UMa", "bet Cep", "WZ Scl"],
    "obs_time_s": 120, "exposure_s": 3, "cadence_s": 3, "slew_time_s": 60, "revisits": 20,
    "start_epoch_mjd": 60555.0, "true_clock_offset_s": 4000.0
  },
  "region": {"radius_au": 5, "time_half_width_s": 86400},
  "models": {"source": "synthetic", "seed": 2024, "survey_days": 10, "survey_cadence_s": 600,
             "truth_cutoff": 0.01, "onboard_cutoff": 0.05},
  "samples": 3,
  "base_seed": 70)" + extra + "\n}";
}

RunConfig parse(const std::string& doc) { return parse_run_config(doc, testing_support::data_path("")); }

const RunConfig& base_config() {
    static const RunConfig cfg = parse(small_config());
    return cfg;
}

const PreparedModels& base_models() {
    static const PreparedModels m = prepare_models(base_config());
    return m;
}

const MonteCarloReport& base_report() {
    static const MonteCarloReport r = run_monte_carlo(base_config(), base_models());
    return r;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

TEST(Config, ParsesFields) {
    const auto& cfg = base_config();
    EXPECT_EQ(cfg.label, "small");
    EXPECT_EQ(cfg.sensor.name, "polycam");
    EXPECT_EQ(cfg.trajectory.kind, TrajectoryConfig::Kind::Fixed);
    EXPECT_EQ(cfg.campaign.stars.size(), 6u);
    EXPECT_EQ(cfg.campaign.revisits, 20);
    EXPECT_EQ(cfg.region.radius_au, 5.0);
    EXPECT_EQ(cfg.samples, 3);
    EXPECT_EQ(cfg.base_seed, 70u);
    EXPECT_TRUE(cfg.enumeration.correlated_residuals);
}

TEST(Config, ShippedScenariosLoad) {
    for (const char* name : {"scenarios/nominal_mapcam.json", "scenarios/nominal_polycam.json"}) {
        const auto cfg = load_run_config(testing_support::data_path(name));
        EXPECT_EQ(cfg.campaign.stars.size(), 10u);
        EXPECT_EQ(cfg.samples, 300);
    }
}

TEST(Config, RejectsInvalidInput) {
    EXPECT_THROW(parse("{ not json"), ParseError);
    EXPECT_THROW(parse(small_config(R"(, "samples": 0)")), ConfigError);
    EXPECT_THROW(parse(small_config(R"(, "catalog": "missing.csv")")), ConfigError);
    EXPECT_THROW(parse(small_config(R"(, "region": {"radius_au": -1})")), ConfigError);
    EXPECT_THROW(parse(small_config(R"(, "reference_au": [1, 2])")), std::exception);
    EXPECT_THROW(parse(small_config(R"(, "campaign": {"stars": ["del Sct", "rho Pup", "bet Cep"]})")), ConfigError);
    try {
        parse(small_config(R"(, "samples": 0)"));
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("small"), std::string::npos);
    }
}

TEST(Aggregates, SampleStatistics) {
    const std::vector<double> one = {2.5};
    const auto a1 = aggregate(one);
    EXPECT_EQ(a1.count, 1u);
    EXPECT_EQ(a1.mean, 2.5);
    EXPECT_FALSE(a1.stddev.has_value());
    const std::vector<double> four = {1.0, 2.0, 3.0, 6.0};
    const auto a4 = aggregate(four);
    EXPECT_DOUBLE_EQ(a4.mean, 3.0);
    EXPECT_DOUBLE_EQ(*a4.stddev, std::sqrt(14.0 / 3.0));
    EXPECT_EQ(aggregate(std::vector<double>{}).count, 0u);
}

TEST(Ellipse, ClosedOutlineAtThreeSigma) {
    Eigen::Matrix2d cov;
    cov << 4.0, 0.0, 0.0, 1.0;
    const auto e = make_ellipse(Eigen::Vector2d(1.0, 2.0), cov, 61);
    ASSERT_EQ(e.outline.size(), 61u);
    EXPECT_EQ(e.outline.front(), e.outline.back());
    double max_x = 0.0, max_y = 0.0;
    for (const auto& p : e.outline) {
        const Eigen::Vector2d d = p - e.center;
        // every vertex lies on the 3-sigma Mahalanobis contour
        EXPECT_NEAR(std::sqrt(d.dot(cov.inverse() * d)), 3.0, 1e-9);
        max_x = std::max(max_x, std::abs(d(0)));
        max_y = std::max(max_y, std::abs(d(1)));
    }
    EXPECT_NEAR(max_x, 6.0, 1e-9);
    EXPECT_NEAR(max_y, 3.0, 1e-2);
}

TEST(Candidates, WindowCoversRegion) {
    navsolver::SearchRegion r;
    r.center = Eigen::Vector3d(1.0, 0.0, 0.0);
    r.radius_au = 2.0;
    r.time_center_s = 100.0;
    r.time_half_width_s = 50.0;
    const auto u = catalog::los_vector(0.0, 0.0);
    const auto [lo, hi] = candidate_window(u, r, Eigen::Vector3d::Zero());
    const double c = kLightAuPerSecond;
    EXPECT_NEAR(lo, 50.0 + 1.0 / c - 2.0 / c, 1e-6);
    EXPECT_NEAR(hi, 150.0 + 1.0 / c + 2.0 / c, 1e-6);
}

TEST(RunSingle, NoiselessIdenticalModelsRecoverTheTruth) {
    auto cfg = base_config();
    cfg.noise = false;
    cfg.models.onboard_cutoff = cfg.models.truth_cutoff;
    const auto models = prepare_models(cfg);
    const auto rec = run_single(cfg, models, 1);
    ASSERT_TRUE(rec.solved) << rec.failure;
    EXPECT_LT(rec.position_error_au, 1e-6);
    EXPECT_LT(std::abs(rec.time_error_s), 1e-3);
}

TEST(RunSingle, TruthOutsideRegionIsUnsolved) {
    auto cfg = base_config();
    cfg.region.center = Eigen::Vector3d(20.0, 0.0, 0.0);
    cfg.region.radius_au = 2.0;
    const auto rec = run_single(cfg, base_models(), 1);
    EXPECT_FALSE(rec.solved);
    EXPECT_FALSE(rec.failure.empty());
}

TEST(MonteCarlo, SolvesSmallCampaign) {
    const auto& r = base_report();
    ASSERT_EQ(r.instances.size(), 3u);
    EXPECT_EQ(r.label, "small");
    EXPECT_EQ(r.sensor, "polycam");
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(r.instances[i].seed, 70 + i);
    EXPECT_GE(r.solved, 2u);
    EXPECT_LT(r.position_error.mean, 0.5);
}

TEST(MonteCarlo, SummaryMatchesInstanceRows) {
    const auto& r = base_report();
    const auto rows = csv_rows(format_instances(r));
    ASSERT_EQ(rows.size(), r.instances.size());
    std::vector<double> pos, time;
    for (const auto& row : rows) {
        ASSERT_EQ(row.size(), 14u);
        if (std::stoi(row[2]) != 1) continue;
        pos.push_back(std::stod(row[3]));
        time.push_back(std::stod(row[4]));
    }
    EXPECT_EQ(pos.size(), r.solved);
    const auto ap = aggregate(pos);
    const auto at = aggregate(time);
    EXPECT_NEAR(ap.mean, r.position_error.mean, 1e-9 * (1.0 + std::abs(ap.mean)));
    EXPECT_NEAR(at.mean, r.time_error.mean, 1e-9 * (1.0 + std::abs(at.mean)));
    if (ap.stddev) {
        EXPECT_NEAR(*ap.stddev, *r.position_error.stddev, 1e-9 * (1.0 + *ap.stddev));
    }
}

TEST(MonteCarlo, DeterministicForSeed) {
    const auto again = run_monte_carlo(base_config(), base_models());
    EXPECT_EQ(format_instances(again), format_instances(base_report()));
    EXPECT_EQ(format_summary(again), format_summary(base_report()));
}

TEST(Reports, EmittedFilesAreStable) {
    const auto dir = std::filesystem::temp_directory_path() / "scutinav_report_test";
    std::filesystem::remove_all(dir);
    emit_reports(base_report(), dir / "a");
    emit_reports(base_report(), dir / "b");
    for (const char* f : {"instances.csv", "summary.json", "ellipse_numerical.csv", "ellipse_analytic.csv",
                          "timing.csv"}) {
        EXPECT_TRUE(std::filesystem::exists(dir / "a" / f)) << f;
    }
    EXPECT_EQ(csv_rows(slurp(dir / "a" / "instances.csv")).size(), 3u);
    EXPECT_EQ(csv_rows(slurp(dir / "a" / "timing.csv")).size(), 3u);
    for (const char* f : {"instances.csv", "summary.json", "ellipse_numerical.csv", "ellipse_analytic.csv"}) {
        EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
    }
    std::filesystem::remove_all(dir);
}

TEST(Cases, StandardGrid) {
    const auto cases = standard_cases();
    ASSERT_EQ(cases.size(), 7u);
    for (std::size_t i = 0; i < cases.size(); ++i) EXPECT_EQ(cases[i].number, static_cast<int>(i) + 1);
    EXPECT_EQ(cases[2].obs_time_s, 480.0);
    EXPECT_EQ(cases[2].revisits, 5);
    EXPECT_EQ(cases[4].exposure_s, 1.0);
    const auto applied = apply_case(base_config(), cases[1]);
    EXPECT_EQ(applied.campaign.obs_time_s, 240.0);
    EXPECT_EQ(applied.campaign.revisits, 10);
    EXPECT_EQ(applied.label, "small_case2");
}

TEST(Cases, TableHasOneLinePerRow) {
    CaseRow ok;
    ok.sensor = "PolyCam";
    ok.report = base_report();
    CaseRow bad;
    bad.sensor = "MapCam";
    bad.spec.number = 3;
    bad.error = "models failed, badly";
    const std::vector<CaseRow> rows = {ok, bad};
    const auto table = csv_rows(format_case_table(rows));
    ASSERT_EQ(table.size(), 2u);
    EXPECT_EQ(table[0].size(), 12u);
    EXPECT_EQ(table[1].size(), 12u);
    EXPECT_NE(table[1].back().find("error"), std::string::npos);
}

TEST(Cases, GridContinuesPastFailingConfig) {
    auto broken = base_config();
    broken.campaign.stars.back() = "no such star";
    std::vector<RunConfig> configs = {broken};
    std::vector<CaseSpec> specs = {standard_cases()[0]};
    const auto rows = run_case_grid(configs, specs);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_FALSE(rows[0].error.empty());
}
