#include "scutinav/navsolver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>

#include "scutinav/units.hpp"

namespace scutinav::navsolver {

namespace {

constexpr double kC = kLightAuPerSecond;

// Solves N s = y for the 4x4 normal matrix, rejecting ill-conditioned geometry.
bool solve_normal(const Eigen::Matrix4d& normal, const Eigen::Vector4d& rhs, Eigen::Vector4d& s,
                  Eigen::Matrix4d& inverse) {
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(normal);
    const auto& ev = eig.eigenvalues();
    if (!(ev(0) > 0.0) || ev(3) / ev(0) > kMaxCondition) return false;
    inverse = eig.eigenvectors() * ev.cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
    s = inverse * rhs;
    return s.allFinite();
}

// Covariance of s = [c t, r] re-expressed for (t [s], r [au]).
Eigen::Matrix4d to_time_units(const Eigen::Matrix4d& cov_s) {
    Eigen::Matrix4d out = cov_s;
    out.row(0) /= kC;
    out.col(0) /= kC;
    return out;
}

} // namespace

TimingSystem build_system(std::span<const TimingSelection> selections, std::span<const LosVector> los,
                          const Eigen::Vector3d& b) {
    if (selections.size() != los.size()) throw NavError("build_system: one line of sight per selection");
    if (selections.size() < 4) throw NavError("underdetermined: at least 4 stars are required");
    const auto n = static_cast<Eigen::Index>(selections.size());
    TimingSystem sys;
    sys.a.resize(n, 4);
    sys.d.resize(n);
    sys.weight.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& sel = selections[static_cast<std::size_t>(i)];
        const auto& u = los[static_cast<std::size_t>(i)].vec();
        if (!(sel.sigma_s > 0.0)) throw NavError("build_system: sigma must be positive");
        sys.a(i, 0) = 1.0;
        sys.a.block<1, 3>(i, 1) = u.transpose();
        sys.d(i) = kC * sel.delta_t_s - u.dot(b);
        sys.weight(i) = 1.0 / (kC * kC * sel.sigma_s * sel.sigma_s);
    }
    return sys;
}

StateSolution solve_wls(const TimingSystem& sys, const Eigen::Vector3d& b) {
    if (sys.a.rows() < 4) throw NavError("underdetermined: at least 4 stars are required");
    const Eigen::MatrixXd aw = sys.a.transpose() * sys.weight.asDiagonal();
    const Eigen::Matrix4d normal = aw * sys.a;
    const Eigen::Vector4d rhs = aw * sys.d;
    Eigen::Vector4d s;
    Eigen::Matrix4d inverse;
    if (!solve_normal(normal, rhs, s, inverse)) throw NavError("degenerate geometry");
    StateSolution sol;
    sol.clock_offset_s = s(0) / kC;
    sol.r = s.tail<3>();
    sol.p = sol.r + b;
    sol.covariance = to_time_units(inverse);
    const Eigen::VectorXd e = sys.a * s - sys.d;
    sol.chi2 = e.cwiseProduct(e).dot(sys.weight);
    sol.residual_norm = std::sqrt(sol.chi2);
    return sol;
}

void SearchRegion::validate() const {
    if (!(radius_au > 0.0) || !std::isfinite(radius_au)) throw NavError("search region: radius must be positive");
    if (!(time_half_width_s > 0.0) || !std::isfinite(time_half_width_s)) {
        throw NavError("search region: time half-width must be positive");
    }
    if (!center.allFinite() || !std::isfinite(time_center_s)) throw NavError("search region: non-finite center");
}

bool SearchRegion::contains(const Eigen::Vector3d& p, double t_offset_s) const {
    return (p - center).norm() <= radius_au && std::abs(t_offset_s - time_center_s) <= time_half_width_s;
}

std::vector<std::size_t> search_order(std::span<const std::vector<ToaCandidate>> candidates) {
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto min_sigma = [&](std::size_t i) {
        double m = INFINITY;
        for (const auto& c : candidates[i]) m = std::min(m, c.sigma_s);
        return m;
    };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        if (candidates[x].size() != candidates[y].size()) return candidates[x].size() < candidates[y].size();
        return min_sigma(x) < min_sigma(y);
    });
    return order;
}

namespace {

// Set of positions consistent with the first k wavefronts once the clock offset
// is eliminated through the first star: the ball intersected with an affine
// subspace, stored as its point closest to the ball center, the remaining
// radius and the projector onto its direction space.
struct Feasible {
    Eigen::Vector3d point;
    double radius = 0.0;
    Eigen::Matrix3d projector;
};

class Searcher {
public:
    Searcher(std::span<const std::vector<ToaCandidate>> candidates, std::span<const LosVector> los,
             const Eigen::Vector3d& b, const SearchRegion& region, const SearchOptions& options,
             SearchStats* stats)
        : candidates_(candidates), b_(b), region_(region), options_(options), stats_(stats) {
        order_ = search_order(candidates);
        const std::size_t n = order_.size();
        u_.resize(n);
        max_sigma_.assign(n, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            u_[k] = los[order_[k]].vec();
            for (const auto& c : list(k)) max_sigma_[k] = std::max(max_sigma_[k], c.sigma_s);
        }
        chi2_limit_.assign(n + 1, INFINITY);
        for (std::size_t k = 5; k <= n; ++k) {
            const boost::math::chi_squared dist(static_cast<double>(k - 4));
            chi2_limit_[k] = boost::math::quantile(dist, options.chi2_probability);
        }
        pick_.assign(n, 0);
        dt_.assign(n, 0.0);
        sigma_.assign(n, 0.0);
        normal_.assign(n + 1, Eigen::Matrix4d::Zero());
        rhs_.assign(n + 1, Eigen::Vector4d::Zero());
        slack_ = 1e-9 * (region.radius_au + region.center.norm() + 1.0);
    }

    std::vector<StateSolution> run() {
        Feasible ball{region_.center, region_.radius_au, Eigen::Matrix3d::Identity()};
        descend(0, &ball, nullptr);
        return std::move(results_);
    }

private:
    const std::vector<ToaCandidate>& list(std::size_t k) const { return candidates_[order_[k]]; }

    // Candidates of star k with delta_t in [lo, hi].
    std::pair<std::size_t, std::size_t> window(std::size_t k, double lo, double hi) const {
        const auto& l = list(k);
        auto cmp_lo = [](const ToaCandidate& c, double v) { return c.delta_t_s < v; };
        auto cmp_hi = [](double v, const ToaCandidate& c) { return v < c.delta_t_s; };
        const auto first = std::lower_bound(l.begin(), l.end(), lo, cmp_lo);
        const auto last = std::upper_bound(first, l.end(), hi, cmp_hi);
        return {static_cast<std::size_t>(first - l.begin()), static_cast<std::size_t>(last - l.begin())};
    }

    // Range of v . p over the feasible set.
    std::pair<double, double> extent(const Feasible& f, const Eigen::Vector3d& v) const {
        const double mid = v.dot(f.point);
        const double half = f.radius * (f.projector * v).norm() + slack_;
        return {mid - half, mid + half};
    }

    bool time_feasible(const Feasible& f) const {
        const auto [lo, hi] = extent(f, u_[0]);
        const double t_hi = dt_[0] - lo / kC;
        const double t_lo = dt_[0] - hi / kC;
        return t_hi >= region_.time_center_s - region_.time_half_width_s - slack_ / kC &&
               t_lo <= region_.time_center_s + region_.time_half_width_s + slack_ / kC;
    }

    // Restricts f by the wavefront of star k; false if the result is empty.
    bool restrict(const Feasible& f, std::size_t k, Feasible& out) const {
        const Eigen::Vector3d n = u_[k] - u_[0];
        const double g = kC * (dt_[k] - dt_[0]);
        const Eigen::Vector3d q = f.projector * n;
        const double qq = q.squaredNorm();
        if (qq < 1e-20) {
            // parallel to earlier constraints: keep the previous set, the exact
            // solve at four stars decides
            out = f;
            return true;
        }
        const Eigen::Vector3d shift = q * ((g - n.dot(f.point)) / qq);
        const double r2 = f.radius * f.radius - shift.squaredNorm();
        if (r2 < -slack_ * (2.0 * f.radius + slack_)) return false;
        out.point = f.point + shift;
        out.radius = std::sqrt(std::max(0.0, r2));
        out.projector = f.projector - q * q.transpose() / qq;
        return true;
    }

    void descend(std::size_t k, const Feasible* feasible, const StateSolution* prev) {
        const std::size_t n = order_.size();
        const Eigen::Vector3d& u = u_[k];
        Eigen::Vector4d a;
        a << 1.0, u;

        std::pair<std::size_t, std::size_t> range{0, list(k).size()};
        double pred = 0.0, model_var = 0.0;
        if (k == 0) {
            const double lo = region_.time_center_s - region_.time_half_width_s +
                              (u.dot(region_.center) - region_.radius_au - slack_) / kC;
            const double hi = region_.time_center_s + region_.time_half_width_s +
                              (u.dot(region_.center) + region_.radius_au + slack_) / kC;
            range = window(k, lo, hi);
        } else if (k < 4) {
            const auto [lo, hi] = extent(*feasible, u - u_[0]);
            range = window(k, dt_[0] + lo / kC, dt_[0] + hi / kC);
        } else {
            Eigen::Vector4d g;
            g << 1.0, u / kC;
            pred = prev->clock_offset_s + u.dot(prev->p) / kC;
            model_var = g.dot(prev->covariance * g);
            const double half = options_.gate_sigmas * std::sqrt(max_sigma_[k] * max_sigma_[k] + model_var);
            range = window(k, pred - half, pred + half);
        }

        for (std::size_t j = range.first; j < range.second; ++j) {
            const auto& cand = list(k)[j];
            if (stats_) ++stats_->nodes;
            if (k >= 4) {
                const double gate = options_.gate_sigmas * std::sqrt(cand.sigma_s * cand.sigma_s + model_var);
                if (!(std::abs(cand.delta_t_s - pred) < gate)) continue;
            }
            pick_[k] = j;
            dt_[k] = cand.delta_t_s;
            sigma_[k] = cand.sigma_s;

            const double d = kC * cand.delta_t_s - u.dot(b_);
            const double w = 1.0 / (kC * kC * cand.sigma_s * cand.sigma_s);
            normal_[k + 1] = normal_[k] + w * a * a.transpose();
            rhs_[k + 1] = rhs_[k] + w * d * a;

            Feasible next;
            if (k < 3) {
                if (k == 0) {
                    next = *feasible;
                } else if (!restrict(*feasible, k, next)) {
                    continue;
                }
                if (!time_feasible(next)) continue;
                descend(k + 1, &next, nullptr);
                continue;
            }

            StateSolution sol;
            if (!solve_prefix(k + 1, sol)) continue;
            if (k + 1 == n) {
                sol.chosen.resize(n);
                sol.delta_t_s.resize(n);
                for (std::size_t m = 0; m < n; ++m) {
                    sol.chosen[order_[m]] = pick_[m];
                    sol.delta_t_s[order_[m]] = dt_[m];
                }
                results_.push_back(std::move(sol));
            } else {
                descend(k + 1, nullptr, &sol);
            }
        }
    }

    // WLS over the first `count` ordered stars plus the region and residual tests.
    bool solve_prefix(std::size_t count, StateSolution& sol) {
        if (stats_) ++stats_->wls_solves;
        Eigen::Vector4d s;
        Eigen::Matrix4d inverse;
        if (!solve_normal(normal_[count], rhs_[count], s, inverse)) return false;
        sol.clock_offset_s = s(0) / kC;
        sol.r = s.tail<3>();
        sol.p = sol.r + b_;
        if (!region_.contains(sol.p, sol.clock_offset_s)) return false;
        double chi2 = 0.0;
        for (std::size_t m = 0; m < count; ++m) {
            const double d = kC * dt_[m] - u_[m].dot(b_);
            const double e = (s(0) + u_[m].dot(sol.r) - d) / (kC * sigma_[m]);
            if (std::abs(e) > options_.residual_bound) return false;
            chi2 += e * e;
        }
        if (chi2 > chi2_limit_[count]) return false;
        sol.chi2 = chi2;
        sol.residual_norm = std::sqrt(chi2);
        sol.covariance = to_time_units(inverse);
        return true;
    }

    std::span<const std::vector<ToaCandidate>> candidates_;
    Eigen::Vector3d b_;
    SearchRegion region_;
    SearchOptions options_;
    SearchStats* stats_;
    std::vector<std::size_t> order_;
    std::vector<Eigen::Vector3d> u_;
    std::vector<double> max_sigma_;
    std::vector<double> chi2_limit_;
    std::vector<std::size_t> pick_;
    std::vector<double> dt_;
    std::vector<double> sigma_;
    std::vector<Eigen::Matrix4d> normal_;
    std::vector<Eigen::Vector4d> rhs_;
    double slack_ = 0.0;
    std::vector<StateSolution> results_;
};

} // namespace

std::vector<StateSolution> ambiguity_search(std::span<const std::vector<ToaCandidate>> candidates,
                                            std::span<const LosVector> los, const Eigen::Vector3d& b,
                                            const SearchRegion& region, const SearchOptions& options,
                                            SearchStats* stats) {
    if (candidates.size() != los.size()) throw NavError("ambiguity_search: one line of sight per star");
    if (candidates.size() < 4) throw NavError("underdetermined: at least 4 stars are required");
    region.validate();
    for (const auto& list : candidates) {
        if (list.empty()) return {};
        for (std::size_t i = 1; i < list.size(); ++i) {
            if (list[i].delta_t_s < list[i - 1].delta_t_s) {
                throw NavError("ambiguity_search: candidate lists must be sorted by delta_t");
            }
        }
    }
    Searcher searcher(candidates, los, b, region, options, stats);
    return searcher.run();
}

StateSolution select_solution(std::span<const StateSolution> solutions) {
    if (solutions.empty()) throw NavError("ambiguity unresolved: no candidate solution");
    const auto best = std::min_element(solutions.begin(), solutions.end(), [](const auto& x, const auto& y) {
        if (x.residual_norm != y.residual_norm) return x.residual_norm < y.residual_norm;
        return std::abs(x.clock_offset_s) < std::abs(y.clock_offset_s);
    });
    return *best;
}

} // namespace scutinav::navsolver
