#pragma once
// scutinav/navsolver.hpp - position and clock offset from per-star time shifts.
//
// Each star contributes one row of the linear timing system
//
//   u_i . r + c t_offset = c dt_i - u_i . b        (A s = d + n)
//
// with s = [c t_offset, r], r = p - b in au and c in au/s. Ambiguous shifts
// are resolved by a depth-first search over the per-star candidate lists.

#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "scutinav/catalog.hpp"
#include "scutinav/estimation.hpp"

namespace scutinav::navsolver {

using catalog::LosVector;
using estimation::ToaCandidate;

class NavError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TimingSelection {
    double delta_t_s = 0.0;
    double sigma_s = 1.0;
};

struct TimingSystem {
    Eigen::MatrixXd a;      ///< N x 4, rows [1, u_i^T]
    Eigen::VectorXd d;      ///< c dt_i - u_i . b [au]
    Eigen::VectorXd weight; ///< diagonal of W = 1 / (c sigma_i)^2 [1/au^2]

    Eigen::MatrixXd weight_matrix() const { return weight.asDiagonal(); }
};

/// Throws NavError("underdetermined") for fewer than 4 rows.
TimingSystem build_system(std::span<const TimingSelection> selections, std::span<const LosVector> los,
                          const Eigen::Vector3d& b);

struct StateSolution {
    double clock_offset_s = 0.0;
    Eigen::Vector3d r = Eigen::Vector3d::Zero(); ///< relative to b [au]
    Eigen::Vector3d p = Eigen::Vector3d::Zero(); ///< r + b [au]
    /// Covariance of (t_offset [s], r [au]).
    Eigen::Matrix4d covariance = Eigen::Matrix4d::Zero();
    double chi2 = 0.0;          ///< weighted residual sum of squares
    double residual_norm = 0.0; ///< sqrt(chi2)
    std::vector<std::size_t> chosen;  ///< candidate index per star (search output only)
    std::vector<double> delta_t_s;    ///< selected shift per star (search output only)
};

/// Condition number of A^T W A above which geometry counts as degenerate.
inline constexpr double kMaxCondition = 1e12;

/// Closed-form weighted least squares. Throws NavError("degenerate geometry").
StateSolution solve_wls(const TimingSystem& system, const Eigen::Vector3d& b = Eigen::Vector3d::Zero());

struct SearchRegion {
    Eigen::Vector3d center = Eigen::Vector3d::Zero(); ///< relative to the SSB [au]
    double radius_au = 40.0;
    double time_center_s = 0.0;
    double time_half_width_s = 864000.0;

    void validate() const;
    bool contains(const Eigen::Vector3d& p, double t_offset_s) const;
};

struct SearchOptions {
    double gate_sigmas = 3.0;      ///< wavefront gate once four stars are fixed
    double residual_bound = 3.0;   ///< per-star weighted residual bound
    double chi2_probability = 0.99;
};

struct SearchStats {
    std::size_t nodes = 0;     ///< candidate wavefronts examined
    std::size_t wls_solves = 0;
};

/// Star visiting order: ascending candidate count, then ascending smallest sigma.
std::vector<std::size_t> search_order(std::span<const std::vector<ToaCandidate>> candidates);

/// Every full-depth solution surviving the region, residual and gate tests.
/// Stars with no candidates make the result empty.
std::vector<StateSolution> ambiguity_search(std::span<const std::vector<ToaCandidate>> candidates,
                                            std::span<const LosVector> los, const Eigen::Vector3d& b,
                                            const SearchRegion& region, const SearchOptions& options = {},
                                            SearchStats* stats = nullptr);

/// Minimum residual norm, ties broken by smaller |t_offset|.
/// Throws NavError("ambiguity unresolved") on an empty list.
StateSolution select_solution(std::span<const StateSolution> solutions);

} // namespace scutinav::navsolver
