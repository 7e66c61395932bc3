#include "scutinav/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>

#include "scutinav/units.hpp"

namespace scutinav::estimation {

ShiftObjective::ShiftObjective(const StarMeasurements& meas, const StarModel& model) {
    model.validate();
    const double epoch_offset_s = days_to_seconds(meas.clock_epoch_mjd - model.epoch_mjd);
    for (const auto& s : meas.samples) {
        if (!s.valid) continue;
        tau_.push_back(epoch_offset_s + s.t_prime_s);
        mag_.push_back(s.mag);
    }
    if (tau_.empty()) throw EstimationError("star '" + meas.star + "': no valid samples");
    if (tau_.size() > 1) {
        std::vector<double> gaps(tau_.size() - 1);
        for (std::size_t k = 1; k < tau_.size(); ++k) gaps[k - 1] = tau_[k] - tau_[k - 1];
        auto mid = gaps.begin() + static_cast<std::ptrdiff_t>(gaps.size() / 2);
        std::nth_element(gaps.begin(), mid, gaps.end());
        const double limit = 3.0 * *mid;
        run_starts_.push_back(0);
        for (std::size_t k = 1; k < tau_.size(); ++k) {
            if (tau_[k] - tau_[k - 1] > limit) run_starts_.push_back(k);
        }
    }

    const auto modes = static_cast<Eigen::Index>(model.modes.size());
    mean_mag_ = model.mean_mag;
    amp_.resize(modes);
    omega_.resize(modes);
    phase_.resize(modes);
    for (Eigen::Index i = 0; i < modes; ++i) {
        const auto& m = model.modes[static_cast<std::size_t>(i)];
        amp_(i) = m.amplitude;
        omega_(i) = kTwoPi * m.frequency / kSecondsPerDay;
        phase_(i) = m.phase;
    }
    shortest_period_s_ = days_to_seconds(model.shortest_period_days());

    n_ = static_cast<double>(tau_.size());
    basis_sum_ = Eigen::VectorXd::Zero(2 * modes);
    basis_r_ = Eigen::VectorXd::Zero(2 * modes);
    gram_ = Eigen::MatrixXd::Zero(2 * modes, 2 * modes);
    Eigen::VectorXd row(2 * modes);
    for (std::size_t k = 0; k < tau_.size(); ++k) {
        for (Eigen::Index i = 0; i < modes; ++i) {
            const double arg = omega_(i) * tau_[k] + phase_(i);
            row(i) = std::sin(arg);
            row(modes + i) = std::cos(arg);
        }
        const double r = mag_[k] - mean_mag_;
        sum_r_ += r;
        sum_r2_ += r * r;
        basis_sum_ += row;
        basis_r_ += r * row;
        gram_.selfadjointView<Eigen::Lower>().rankUpdate(row);
    }
    gram_ = gram_.selfadjointView<Eigen::Lower>();
}

double ShiftObjective::model_at(double tau_s) const {
    double m = mean_mag_;
    for (Eigen::Index i = 0; i < amp_.size(); ++i) m += amp_(i) * std::sin(omega_(i) * tau_s + phase_(i));
    return m;
}

double ShiftObjective::rate_at(double tau_s) const {
    double r = 0.0;
    for (Eigen::Index i = 0; i < amp_.size(); ++i) {
        r += amp_(i) * omega_(i) * std::cos(omega_(i) * tau_s + phase_(i));
    }
    return r;
}

double ShiftObjective::direct(double delta_t_s, double scale) const {
    double sum = 0.0;
    for (std::size_t k = 0; k < tau_.size(); ++k) {
        const double e = mag_[k] - scale * model_at(tau_[k] + delta_t_s);
        sum += e * e;
    }
    return sum / n_;
}

double ShiftObjective::direct_best_scale(double delta_t_s) const {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < tau_.size(); ++k) {
        const double b = model_at(tau_[k] + delta_t_s);
        num += mag_[k] * b;
        den += b * b;
    }
    if (!(den > 0.0)) throw EstimationError("best_scale: model vanishes at every sample");
    return num / den;
}

ShiftObjective::Profile ShiftObjective::profile_direct(double delta_t_s) const {
    const double c = direct_best_scale(delta_t_s);
    return {direct(delta_t_s, c), c};
}

ShiftObjective::Profile ShiftObjective::profile(double delta_t_s) const {
    // model_k = A0 + g_k with g_k = sum_i (alpha_i sin_ik + beta_i cos_ik) after a shift
    // by theta_i = omega_i dt. With e_k = r_k - g_k and C = 1 + gamma the residual is
    // e_k - gamma (A0 + g_k), whose optimum leaves J = (E - gamma F) / n.
    const Eigen::Index modes = amp_.size();
    Eigen::VectorXd v(2 * modes);
    for (Eigen::Index i = 0; i < modes; ++i) {
        const double theta = omega_(i) * delta_t_s;
        v(i) = amp_(i) * std::cos(theta);
        v(modes + i) = amp_(i) * std::sin(theta);
    }
    const double sum_g = v.dot(basis_sum_);
    const double sum_rg = v.dot(basis_r_);
    const double sum_g2 = v.dot(gram_ * v);
    const double sum_e2 = sum_r2_ - 2.0 * sum_rg + sum_g2;
    const double sum_b2 = n_ * mean_mag_ * mean_mag_ + 2.0 * mean_mag_ * sum_g + sum_g2;
    const double sum_eb = mean_mag_ * sum_r_ + sum_rg - mean_mag_ * sum_g - sum_g2;
    if (!(sum_b2 > 0.0)) throw EstimationError("best_scale: model vanishes at every sample");
    const double gamma = sum_eb / sum_b2;
    const double j = (sum_e2 - gamma * sum_eb) / n_;
    // near an exact fit the sums cancel; fall back to direct summation there
    if (j < 1e-8 * (sum_r2_ / n_ + 1e-12)) return profile_direct(delta_t_s);
    return {j, 1.0 + gamma};
}

double ShiftObjective::sigma(double delta_t_s, double scale) const {
    if (tau_.size() < 3) throw EstimationError("estimate_sigma: need at least 3 valid samples");
    double curvature = 0.0;
    for (double t : tau_) {
        const double d = scale * rate_at(t + delta_t_s);
        curvature += d * d;
    }
    curvature /= n_;
    if (!(curvature > 0.0)) throw EstimationError("estimate_sigma: zero curvature");
    const double j = std::max(0.0, direct(delta_t_s, scale));
    return std::sqrt(j / ((n_ - 2.0) * curvature));
}

double ShiftObjective::correlation_inflation(double delta_t_s, double scale) const {
    const std::size_t runs = run_starts_.size();
    if (runs < 2 || tau_.size() < 3) return 1.0;
    // per-run score sum_k w_k e_k with regressor w = C dm_b/dt
    std::vector<double> run_score(runs, 0.0);
    double ss = 0.0, ww = 0.0;
    for (std::size_t r = 0; r < runs; ++r) {
        const std::size_t first = run_starts_[r];
        const std::size_t last = r + 1 < runs ? run_starts_[r + 1] : tau_.size();
        for (std::size_t k = first; k < last; ++k) {
            const double t = tau_[k] + delta_t_s;
            const double e = mag_[k] - scale * model_at(t);
            const double w = scale * rate_at(t);
            run_score[r] += w * e;
            ss += e * e;
            ww += w * w;
        }
    }
    const double white = ss / (n_ - 2.0) * ww; // white-noise variance of the total score
    if (!(white > 0.0)) return 1.0;
    // clusters of g consecutive runs, g = 1 .. runs/4; the scores sum to ~0 at a
    // minimum, hence the G/(G-1) correction
    double worst = 1.0;
    const std::size_t g_max = std::max<std::size_t>(1, runs / 4);
    for (std::size_t g = 1; g <= g_max; ++g) {
        double clustered = 0.0;
        std::size_t clusters = 0;
        for (std::size_t first = 0; first < runs; first += g) {
            double sum = 0.0;
            for (std::size_t r = first; r < std::min(runs, first + g); ++r) sum += run_score[r];
            clustered += sum * sum;
            ++clusters;
        }
        if (clusters < 2) continue;
        const double G = static_cast<double>(clusters);
        worst = std::max(worst, G / (G - 1.0) * clustered / white);
    }
    return std::sqrt(worst);
}

double objective(double delta_t_s, double scale, const StarMeasurements& meas, const StarModel& model) {
    return ShiftObjective(meas, model).direct(delta_t_s, scale);
}

double best_scale(double delta_t_s, const StarMeasurements& meas, const StarModel& model) {
    return ShiftObjective(meas, model).direct_best_scale(delta_t_s);
}

double estimate_sigma(const StarMeasurements& meas, const StarModel& model, double delta_t_s, double scale) {
    return ShiftObjective(meas, model).sigma(delta_t_s, scale);
}

std::vector<ToaCandidate> enumerate_candidates(const ShiftObjective& obj, double dt_min, double dt_max,
                                               const EnumerationOptions& opt) {
    std::vector<ToaCandidate> out;
    if (!std::isfinite(dt_min) || !std::isfinite(dt_max) || !(dt_max > dt_min)) return out;

    const double step = opt.step_fraction * obj.shortest_period_s();
    const auto intervals = static_cast<std::size_t>(std::ceil((dt_max - dt_min) / step));
    std::vector<double> grid(intervals + 1);
    std::vector<double> values(intervals + 1);
    for (std::size_t k = 0; k <= intervals; ++k) {
        grid[k] = k == intervals ? dt_max : dt_min + step * static_cast<double>(k);
        values[k] = obj.profile(grid[k]).objective;
    }

    struct Minimum {
        double dt;
        double j;
    };
    std::vector<Minimum> minima;
    const double interior_margin = 10.0 * opt.tolerance_s;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const bool left_ok = k == 0 || values[k] <= values[k - 1];
        const bool right_ok = k + 1 == grid.size() || values[k] < values[k + 1];
        if (!left_ok || !right_ok || grid.size() < 2) continue;
        const double lo = grid[k == 0 ? 0 : k - 1];
        const double hi = grid[std::min(k + 1, grid.size() - 1)];
        // refine in coordinates relative to the grid point so the relative
        // tolerance of the minimizer maps to an absolute one in seconds
        const double origin = grid[k];
        auto f = [&](double u) { return obj.profile(origin + u).objective; };
        std::uintmax_t iterations = 60;
        const auto [u, j] = boost::math::tools::brent_find_minima(f, lo - origin, hi - origin, 30, iterations);
        const double dt = origin + u;
        if (dt - dt_min < interior_margin || dt_max - dt < interior_margin) continue;
        minima.push_back({dt, j});
    }
    if (minima.empty()) return out;

    std::sort(minima.begin(), minima.end(), [](const Minimum& a, const Minimum& b) { return a.dt < b.dt; });
    std::vector<Minimum> merged;
    const double merge_distance = opt.merge_fraction * obj.shortest_period_s();
    for (const auto& m : minima) {
        if (!merged.empty() && m.dt - merged.back().dt < merge_distance) {
            if (m.j < merged.back().j) merged.back() = m;
            continue;
        }
        merged.push_back(m);
    }

    double j_best = merged.front().j;
    for (const auto& m : merged) j_best = std::min(j_best, m.j);
    for (const auto& m : merged) {
        if (opt.max_objective_ratio > 0.0 && m.j > opt.max_objective_ratio * j_best) continue;
        const auto p = obj.profile(m.dt);
        ToaCandidate c;
        c.delta_t_s = m.dt;
        c.scale = p.scale;
        c.objective = std::max(0.0, p.objective);
        double sigma = obj.sigma(m.dt, p.scale);
        if (opt.correlated_residuals) sigma *= obj.correlation_inflation(m.dt, p.scale);
        c.sigma_s = std::max(opt.sigma_floor_s, sigma);
        out.push_back(c);
    }
    return out;
}

std::vector<ToaCandidate> enumerate_candidates(const StarMeasurements& meas, const StarModel& model,
                                               double dt_min_s, double dt_max_s,
                                               const EnumerationOptions& options) {
    if (!std::isfinite(dt_min_s) || !std::isfinite(dt_max_s) || !(dt_max_s > dt_min_s)) return {};
    return enumerate_candidates(ShiftObjective(meas, model), dt_min_s, dt_max_s, options);
}

OcSeries oc_analysis(std::span<const OcSegment> segments, const StarModel& model,
                     const EnumerationOptions& options) {
    if (segments.size() < 2) throw EstimationError("oc_analysis: at least 2 segments are required");
    const double period_s = days_to_seconds(model.shortest_period_days());

    struct Row {
        std::string label;
        double epoch;
        double oc;
    };
    std::vector<Row> rows;
    OcSeries series;
    for (const auto& seg : segments) {
        try {
            const ShiftObjective obj(seg.measurements, model);
            const double pred = seg.predicted_delta_t_s;
            const auto cands = enumerate_candidates(obj, pred - period_s, pred + period_s, options);
            if (cands.empty()) {
                series.flagged.push_back(seg.label + ": no minimum near the prediction");
                continue;
            }
            const auto best = std::min_element(cands.begin(), cands.end(), [&](const auto& a, const auto& b) {
                return std::abs(a.delta_t_s - pred) < std::abs(b.delta_t_s - pred);
            });
            double t_mid = 0.0;
            std::size_t count = 0;
            for (const auto& s : seg.measurements.samples) {
                if (!s.valid) continue;
                t_mid += s.t_prime_s;
                ++count;
            }
            t_mid /= static_cast<double>(count);
            const double epoch = seg.measurements.clock_epoch_mjd + seconds_to_days(t_mid + best->delta_t_s);
            rows.push_back({seg.label, epoch, best->delta_t_s - pred});
        } catch (const EstimationError& e) {
            series.flagged.push_back(seg.label + ": " + e.what());
        }
    }
    if (rows.size() < 2) throw EstimationError("oc_analysis: fewer than 2 usable segments");
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.epoch < b.epoch; });

    const double x0 = rows.front().epoch;
    Eigen::MatrixXd a(static_cast<Eigen::Index>(rows.size()), 2);
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        a(r, 0) = 1.0;
        a(r, 1) = rows[i].epoch - x0;
        y(r) = rows[i].oc;
        series.labels.push_back(rows[i].label);
        series.epochs_days.push_back(rows[i].epoch);
        series.o_minus_c_s.push_back(rows[i].oc);
    }
    const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(y);
    series.intercept_s = coef(0);
    series.slope_s_per_day = coef(1);
    if (rows.size() > 2) {
        const double rss = (a * coef - y).squaredNorm();
        series.detrended_sigma_s = std::sqrt(rss / static_cast<double>(rows.size() - 2));
    }
    return series;
}

} // namespace scutinav::estimation
