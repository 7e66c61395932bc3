#pragma once
// Shared setup: the ten nominal stars observed noisily from a fixed position.

#include <random>
#include <vector>

#include "scutinav/catalog.hpp"
#include "scutinav/detector.hpp"
#include "scutinav/lightcurve.hpp"
#include "scutinav/scenario.hpp"

namespace bench {

struct Campaign {
    std::vector<scutinav::lightcurve::StarModel> models;
    scutinav::scenario::MeasurementSet measurements;
    Eigen::Vector3d position{0.6, -0.3, 0.1};
    double clock_offset_s = 4321.0;
};

inline Campaign make_campaign(int revisits = 20) {
    using namespace scutinav;
    const auto cat = catalog::load_catalog(SCUTINAV_DATA_DIR "/table_b1.csv");
    Campaign c;
    scenario::CampaignConfig cfg;
    cfg.stars = {"V0474 Mon", "del Sct", "rho Pup", "ups UMa", "bet Cep",
                 "WZ Scl",    "BV Cir",  "AI CVn",  "del Del", "V0509 Per"};
    cfg.revisits = revisits;
    cfg.true_clock_offset_s = c.clock_offset_s;
    for (const auto& name : cfg.stars)
        c.models.push_back(lightcurve::synthetic_model(catalog::find_star(cat, name), cfg.start_epoch_mjd, 7));
    std::mt19937_64 rng(11);
    c.measurements = scenario::simulate_campaign(scenario::Trajectory::fixed(c.position), cfg, c.models,
                                                 detector::SensorConfig::mapcam(), {}, rng);
    return c;
}

} // namespace bench
