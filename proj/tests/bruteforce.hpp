#pragma once
// Exhaustive ambiguity resolution: every candidate combination, then the same
// region, residual, chi-square and gate tests the search applies, evaluated
// with plain WLS solves of each prefix in the search's visiting order.

#include <cmath>
#include <random>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "scutinav/navsolver.hpp"
#include "scutinav/units.hpp"

namespace testing_support {

using scutinav::navsolver::SearchOptions;
using scutinav::navsolver::SearchRegion;
using scutinav::navsolver::StateSolution;
using scutinav::navsolver::ToaCandidate;

inline bool prefix_passes(const std::vector<std::vector<ToaCandidate>>& cand,
                          const std::vector<scutinav::catalog::LosVector>& los, const Eigen::Vector3d& b,
                          const SearchRegion& region, const SearchOptions& opt,
                          const std::vector<std::size_t>& order, const std::vector<std::size_t>& pick) {
    namespace nav = scutinav::navsolver;
    const double c = scutinav::kLightAuPerSecond;
    StateSolution prev;
    for (std::size_t count = 4; count <= order.size(); ++count) {
        std::vector<nav::TimingSelection> sel;
        std::vector<scutinav::catalog::LosVector> l;
        for (std::size_t k = 0; k < count; ++k) {
            const auto& x = cand[order[k]][pick[order[k]]];
            sel.push_back({x.delta_t_s, x.sigma_s});
            l.push_back(los[order[k]]);
        }
        if (count >= 5) {
            const auto& x = sel.back();
            const Eigen::Vector3d u = l.back().vec();
            Eigen::Vector4d g;
            g << 1.0, u / c;
            const double pred = prev.clock_offset_s + u.dot(prev.p) / c;
            const double gate = opt.gate_sigmas * std::sqrt(x.sigma_s * x.sigma_s + g.dot(prev.covariance * g));
            if (!(std::abs(x.delta_t_s - pred) < gate)) return false;
        }
        StateSolution sol;
        try {
            sol = nav::solve_wls(nav::build_system(sel, l, b), b);
        } catch (const nav::NavError&) {
            return false;
        }
        if (!region.contains(sol.p, sol.clock_offset_s)) return false;
        for (std::size_t k = 0; k < count; ++k) {
            const double pred = sol.clock_offset_s + l[k].vec().dot(sol.p) / c;
            if (std::abs(pred - sel[k].delta_t_s) / sel[k].sigma_s > opt.residual_bound) return false;
        }
        if (count >= 5) {
            const boost::math::chi_squared dist(static_cast<double>(count - 4));
            if (sol.chi2 > boost::math::quantile(dist, opt.chi2_probability)) return false;
        }
        prev = sol;
    }
    return true;
}

/// Candidate-index tuples (per star, in input order) surviving every test.
inline std::vector<std::vector<std::size_t>> brute_force(const std::vector<std::vector<ToaCandidate>>& cand,
                                                         const std::vector<scutinav::catalog::LosVector>& los,
                                                         const Eigen::Vector3d& b, const SearchRegion& region,
                                                         const SearchOptions& opt = {}) {
    const auto order = scutinav::navsolver::search_order(cand);
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> pick(cand.size(), 0);
    for (const auto& l : cand) if (l.empty()) return out;
    while (true) {
        if (prefix_passes(cand, los, b, region, opt, order, pick)) out.push_back(pick);
        std::size_t i = 0;
        while (i < cand.size() && ++pick[i] == cand[i].size()) pick[i++] = 0;
        if (i == cand.size()) break;
    }
    return out;
}

/// Small random instance: truth plus aliases at multiples of a per-star period.
struct SmallInstance {
    std::vector<std::vector<ToaCandidate>> candidates;
    std::vector<scutinav::catalog::LosVector> los;
    Eigen::Vector3d b = Eigen::Vector3d::Zero();
    SearchRegion region;
    Eigen::Vector3d p;
    double t_offset = 0.0;
};

inline SmallInstance random_instance(std::mt19937_64& rng, std::size_t stars, std::size_t max_candidates) {
    const double c = scutinav::kLightAuPerSecond;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    SmallInstance in;
    in.region.center = Eigen::Vector3d(unit(rng) - 0.5, unit(rng) - 0.5, 0.0);
    in.region.radius_au = 0.5 + 1.5 * unit(rng);
    in.region.time_center_s = 100.0 * (unit(rng) - 0.5);
    in.region.time_half_width_s = 200.0 + 800.0 * unit(rng);
    in.b = Eigen::Vector3d(0.1 * gauss(rng), 0.1 * gauss(rng), 0.0);
    Eigen::Vector3d dir(gauss(rng), gauss(rng), gauss(rng));
    in.p = in.region.center + 0.8 * in.region.radius_au * unit(rng) * dir.normalized();
    in.t_offset = in.region.time_center_s + 0.8 * in.region.time_half_width_s * (2.0 * unit(rng) - 1.0);
    for (std::size_t i = 0; i < stars; ++i) {
        Eigen::Vector3d u(gauss(rng), gauss(rng), gauss(rng));
        in.los.push_back(scutinav::catalog::LosVector::from_components(u.x(), u.y(), u.z()));
        const double sigma = 1.0 + 20.0 * unit(rng);
        const double truth = in.t_offset + in.los.back().vec().dot(in.p) / c + sigma * gauss(rng);
        const double period = 150.0 + 1500.0 * unit(rng);
        const auto count = 1 + static_cast<std::size_t>(unit(rng) * static_cast<double>(max_candidates));
        const auto slot = static_cast<std::size_t>(unit(rng) * static_cast<double>(count));
        std::vector<ToaCandidate> list;
        for (std::size_t k = 0; k < std::min(count, max_candidates); ++k) {
            const double dt = truth + period * (static_cast<double>(k) - static_cast<double>(slot));
            list.push_back({dt, 1.0, 0.0, sigma * (0.8 + 0.4 * unit(rng))});
        }
        in.candidates.push_back(list);
    }
    return in;
}

} // namespace testing_support
