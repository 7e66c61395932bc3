#include "scutinav/periodogram.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "scutinav/units.hpp"

namespace scutinav::lightcurve {

AmplitudeSpectrum amplitude_spectrum(std::span<const double> times, std::span<const double> values,
                                     double f_min, double f_max, double df) {
    AmplitudeSpectrum spec;
    spec.f_min = f_min;
    spec.df = df;
    const std::size_t n = times.size();
    if (n < 3 || !(df > 0.0) || f_max < f_min) return spec;

    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);

    const double t_ref = times.front();
    std::vector<double> y(n), c(n), s(n), dc(n), ds(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = times[i] - t_ref;
        y[i] = values[i] - mean;
        c[i] = std::cos(kTwoPi * f_min * t);
        s[i] = std::sin(kTwoPi * f_min * t);
        dc[i] = std::cos(kTwoPi * df * t);
        ds[i] = std::sin(kTwoPi * df * t);
    }

    const auto count = static_cast<std::size_t>(std::floor((f_max - f_min) / df)) + 1;
    spec.amplitude.resize(count);
    for (std::size_t k = 0; k < count; ++k) {
        // tau offset makes the sine and cosine terms orthogonal
        double s2 = 0.0, c2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            s2 += 2.0 * s[i] * c[i];
            c2 += c[i] * c[i] - s[i] * s[i];
        }
        const double two_wtau = std::atan2(s2, c2);
        const double ct = std::cos(0.5 * two_wtau);
        const double st = std::sin(0.5 * two_wtau);
        double yc = 0.0, ys = 0.0, cc = 0.0, ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double cos_arg = c[i] * ct + s[i] * st;
            const double sin_arg = s[i] * ct - c[i] * st;
            yc += y[i] * cos_arg;
            ys += y[i] * sin_arg;
            cc += cos_arg * cos_arg;
            ss += sin_arg * sin_arg;
        }
        // Lomb-Scargle power as an amplitude. Unlike the per-column
        // least-squares coefficients it stays bounded near the Nyquist
        // frequency, where one quadrature column all but vanishes.
        const double tiny = 1e-12 * static_cast<double>(n);
        const double power = (cc > tiny ? yc * yc / cc : 0.0) + (ss > tiny ? ys * ys / ss : 0.0);
        spec.amplitude[k] = std::sqrt(2.0 * power / static_cast<double>(n));

        // advance every sample by one grid step: angle addition
        for (std::size_t i = 0; i < n; ++i) {
            const double cn = c[i] * dc[i] - s[i] * ds[i];
            s[i] = s[i] * dc[i] + c[i] * ds[i];
            c[i] = cn;
        }
    }
    return spec;
}

double peak_snr(const AmplitudeSpectrum& spectrum, std::size_t peak, double window, double exclusion) {
    const double fp = spectrum.frequency(peak);
    std::vector<double> local;
    for (std::size_t k = 0; k < spectrum.size(); ++k) {
        const double d = std::abs(spectrum.frequency(k) - fp);
        if (d <= window && d > exclusion) local.push_back(spectrum.amplitude[k]);
    }
    if (local.empty()) return 0.0;
    auto mid = local.begin() + static_cast<std::ptrdiff_t>(local.size() / 2);
    std::nth_element(local.begin(), mid, local.end());
    const double noise = *mid;
    if (!(noise > 0.0)) return spectrum.amplitude[peak] > 0.0 ? INFINITY : 0.0;
    return spectrum.amplitude[peak] / noise;
}

namespace {

// Sinusoid parameters in linear form: a sin(w tau) + b cos(w tau).
struct LinearMode {
    double a = 0.0;
    double b = 0.0;
    double f = 0.0;
};

void evaluate(double offset, std::span<const LinearMode> modes, std::span<const double> tau,
              std::vector<double>& out) {
    out.assign(tau.size(), offset);
    for (const auto& m : modes) {
        const double w = kTwoPi * m.f;
        for (std::size_t i = 0; i < tau.size(); ++i) {
            out[i] += m.a * std::sin(w * tau[i]) + m.b * std::cos(w * tau[i]);
        }
    }
}

double sum_sq(std::span<const double> y, std::span<const double> model) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - model[i]) * (y[i] - model[i]);
    return s;
}

// Levenberg-Marquardt over (offset, {a, b, f}). tau in days relative to the epoch.
void levenberg_marquardt(double& offset, std::vector<LinearMode>& modes, std::span<const double> tau,
                         std::span<const double> y) {
    const std::size_t n = tau.size();
    const std::size_t p = 1 + 3 * modes.size();
    std::vector<double> model;
    evaluate(offset, modes, tau, model);
    double cost = sum_sq(y, model);
    double lambda = 1e-3;

    Eigen::MatrixXd jac(n, p);
    Eigen::VectorXd resid(n);
    for (int iter = 0; iter < 60; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            resid(static_cast<Eigen::Index>(i)) = y[i] - model[i];
            jac(static_cast<Eigen::Index>(i), 0) = 1.0;
        }
        for (std::size_t m = 0; m < modes.size(); ++m) {
            const double w = kTwoPi * modes[m].f;
            const auto col = static_cast<Eigen::Index>(1 + 3 * m);
            for (std::size_t i = 0; i < n; ++i) {
                const double sn = std::sin(w * tau[i]);
                const double cs = std::cos(w * tau[i]);
                const auto row = static_cast<Eigen::Index>(i);
                jac(row, col) = sn;
                jac(row, col + 1) = cs;
                jac(row, col + 2) = kTwoPi * tau[i] * (modes[m].a * cs - modes[m].b * sn);
            }
        }
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd jtr = jac.transpose() * resid;

        bool improved = false;
        for (int attempt = 0; attempt < 12; ++attempt) {
            Eigen::MatrixXd damped = jtj;
            for (Eigen::Index k = 0; k < damped.rows(); ++k) damped(k, k) *= 1.0 + lambda;
            const Eigen::VectorXd step = damped.ldlt().solve(jtr);
            if (!step.allFinite()) {
                lambda *= 10.0;
                continue;
            }
            double trial_offset = offset + step(0);
            std::vector<LinearMode> trial = modes;
            for (std::size_t m = 0; m < trial.size(); ++m) {
                const auto col = static_cast<Eigen::Index>(1 + 3 * m);
                trial[m].a += step(col);
                trial[m].b += step(col + 1);
                trial[m].f += step(col + 2);
            }
            std::vector<double> trial_model;
            evaluate(trial_offset, trial, tau, trial_model);
            const double trial_cost = sum_sq(y, trial_model);
            if (trial_cost <= cost) {
                const double rel = (cost - trial_cost) / std::max(cost, 1e-300);
                offset = trial_offset;
                modes = std::move(trial);
                model = std::move(trial_model);
                cost = trial_cost;
                lambda = std::max(lambda * 0.3, 1e-12);
                improved = true;
                if (rel < 1e-14 || step.norm() < 1e-13) return;
                break;
            }
            lambda *= 10.0;
        }
        if (!improved) return;
    }
}

// Linear least-squares amplitude of a single sinusoid at frequency f on residuals.
LinearMode single_sinusoid(double f, std::span<const double> tau, std::span<const double> y) {
    Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
    Eigen::Vector3d aty = Eigen::Vector3d::Zero();
    const double w = kTwoPi * f;
    for (std::size_t i = 0; i < tau.size(); ++i) {
        const Eigen::Vector3d row(std::sin(w * tau[i]), std::cos(w * tau[i]), 1.0);
        ata += row * row.transpose();
        aty += row * y[i];
    }
    const Eigen::Vector3d x = ata.ldlt().solve(aty);
    return {x(0), x(1), f};
}

StarModel to_model(double offset, std::span<const LinearMode> modes, double epoch, const LosVector& los,
                   const std::string& name) {
    StarModel model;
    model.star = name;
    model.los = los;
    model.epoch_mjd = epoch;
    model.mean_mag = offset;
    for (const auto& m : modes) {
        // a sin x + b cos x = A sin(x + phi), a = A cos phi, b = A sin phi
        model.modes.push_back({std::hypot(m.a, m.b), m.f, wrap_phase(std::atan2(m.b, m.a))});
    }
    model.normalize();
    return model;
}

} // namespace

void refine_model(StarModel& model, std::span<const double> times, std::span<const double> mags) {
    std::vector<double> tau(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) tau[i] = times[i] - model.epoch_mjd;
    std::vector<LinearMode> modes;
    for (const auto& m : model.modes) {
        modes.push_back({m.amplitude * std::cos(m.phase), m.amplitude * std::sin(m.phase), m.frequency});
    }
    double offset = model.mean_mag;
    levenberg_marquardt(offset, modes, tau, mags);
    model = to_model(offset, modes, model.epoch_mjd, model.los, model.star);
}

StarModel fit_model(const PhotometricSeries& series, const LosVector& los, const FitOptions& opt) {
    series.validate();
    if (series.times.size() < 8) throw FitError("series too short to fit: " + series.source_label);
    const std::vector<double> mags = series.magnitudes();
    const double span = series.timespan();
    const double epoch = 0.5 * (series.times.front() + series.times.back());
    std::vector<double> tau(mags.size());
    for (std::size_t i = 0; i < tau.size(); ++i) tau[i] = series.times[i] - epoch;

    const double df = 1.0 / (opt.oversample * span);
    const double f_min = 2.0 / span; // at least two cycles inside the series
    const double f_max = 0.5 / series.median_cadence();
    const double exclusion = 1.0 / span;

    double offset = 0.0;
    for (double m : mags) offset += m;
    offset /= static_cast<double>(mags.size());
    std::vector<LinearMode> modes;
    std::vector<double> model, resid(mags.size());
    double largest = 0.0;

    while (static_cast<int>(modes.size()) < opt.max_modes) {
        evaluate(offset, modes, tau, model);
        for (std::size_t i = 0; i < mags.size(); ++i) resid[i] = mags[i] - model[i];
        const auto spec = amplitude_spectrum(series.times, resid, f_min, f_max, df);
        if (spec.size() < 3) break;
        const auto peak_it = std::max_element(spec.amplitude.begin(), spec.amplitude.end());
        const auto k = static_cast<std::size_t>(peak_it - spec.amplitude.begin());
        if (peak_snr(spec, k, opt.noise_window, exclusion) < opt.snr_min) break;
        if (!modes.empty() && spec.amplitude[k] < opt.stop_fraction * opt.amp_cutoff * largest) break;

        double f_peak = spec.frequency(k);
        if (k > 0 && k + 1 < spec.size()) {
            const double y0 = spec.amplitude[k - 1], y1 = spec.amplitude[k], y2 = spec.amplitude[k + 1];
            const double denom = y0 - 2.0 * y1 + y2;
            if (denom < 0.0) f_peak += 0.5 * (y0 - y2) / denom * spec.df;
        }
        modes.push_back(single_sinusoid(f_peak, tau, resid));
        levenberg_marquardt(offset, modes, tau, mags);
        for (const auto& m : modes) largest = std::max(largest, std::hypot(m.a, m.b));
    }
    if (modes.empty()) {
        throw FitError("no significant pulsation in series '" + series.source_label + "'");
    }

    const double threshold = opt.amp_cutoff * largest;
    std::erase_if(modes, [&](const LinearMode& m) { return std::hypot(m.a, m.b) < threshold; });
    levenberg_marquardt(offset, modes, tau, mags);

    StarModel result = to_model(offset, modes, epoch, los, series.source_label);
    result.validate();
    return result;
}

} // namespace scutinav::lightcurve
