// SPDX-License-Identifier: Apache-2.0
//
// maisac - movable-antenna ISAC beamforming and positioning toolkit
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef MAISAC_SUBPROBLEMS_HPP
#define MAISAC_SUBPROBLEMS_HPP

#include "maisac/crb.hpp"
#include "maisac/model.hpp"
#include "maisac/qp.hpp"
#include "maisac/sdp.hpp"

#include <string>
#include <vector>

namespace maisac
{

// ---- transmit beamforming ------------------------------------------------

struct SdrOptions
{
    double tol = 1e-8;
    int max_iter = 100;
};

struct SdrOutcome
{
    std::vector<Eigen::MatrixXcd> covariance_blocks; // W_k
    double t_value = 0.0;                            // auxiliary t at the optimum
    BeamformingMatrix recovered;
    double sdr_objective = 0.0; // Fisher bracket of sum_k W_k
    double recovery_gap = 0.0;  // relative bracket loss after rank-one recovery
    SolveReport report;
};

/// Maximize the Fisher bracket of sum_k W_k under per-user SINR and total
/// power constraints (semidefinite relaxation), then recover beamformers.
/// Throws InfeasibleSinr when the SINR targets cannot be met and
/// SolverFailure when the conic solve does not converge.
SdrOutcome solve_beamforming_sdr(const SteeringContext &ctx, const std::vector<Eigen::VectorXcd> &channels,
                                 const SystemConfig &config, const SdrOptions &options = {});

/// w_k = W_k h_k / sqrt(h_k^H W_k h_k). Throws DegenerateInput when h_k^H W_k h_k <= 0.
BeamformingMatrix recover_rank_one(const std::vector<Eigen::MatrixXcd> &blocks,
                                   const std::vector<Eigen::VectorXcd> &channels);

/// Per-user SINR in dB that single-user full-power transmission falls short of the target.
std::vector<double> sinr_shortfall_db(const std::vector<Eigen::VectorXcd> &channels, const SystemConfig &config);

// ---- receive antenna positions --------------------------------------------

// Fisher bracket as a function of d_r for fixed R_X:
//   constant + s2_coef ||d||^2 + coupling'd - (d'E d + f'd) / m22
// with the ||d||^2 term replaced by its tangent at `center` in the surrogate.
struct P21Data
{
    Eigen::MatrixXd e;
    Eigen::VectorXd f;
    Eigen::VectorXd linear_coupling;
    double m22 = 0.0;
    double s2_coef = 0.0;    // (2 pi / lambda)^2 cos^2(theta) tr(A R_X)
    double constant = 0.0;   // terms free of d_r, including -|N_r tr(D_t A R_X)|^2 / m22
    Eigen::VectorXd center;

    double true_objective(const Eigen::VectorXd &d) const;
    double surrogate(const Eigen::VectorXd &d) const;
};

P21Data assemble_p21(const Eigen::VectorXd &d_r_center, const SteeringContext &ctx, const Eigen::MatrixXcd &r_x,
                     const SystemConfig &config);

struct ScaOptions
{
    double eps = 1e-5;
    int max_rounds = 30;
};

struct BsPositionResult
{
    Eigen::VectorXd d_r;
    std::vector<double> surrogate_values; // surrogate optimum per round
    std::vector<double> true_values;      // Fisher bracket at each accepted iterate, starting point first
    int rounds = 0;
    SolveStatus last_status = SolveStatus::optimal;
};

/// Successive convex approximation over the receive array. d_r_init must satisfy the layout constraints.
BsPositionResult solve_bs_positions(const Eigen::MatrixXcd &r_x, const SteeringContext &ctx,
                                    const Eigen::VectorXd &d_r_init, const SystemConfig &config,
                                    const ScaOptions &options = {});

/// Pushes a nearly feasible receive array onto {d_0 >= 0, d_N <= d_max, gaps >= d_min}.
Eigen::VectorXd repair_receive_layout(Eigen::VectorXd d, double d_min, double d_max);

// ---- user antenna positions -----------------------------------------------

/// A_kq = Sigma_k T_k W_q T_k^H Sigma_k^H for a transmit covariance W_q.
Eigen::MatrixXcd path_covariance(const UserChannelGeometry &geom, const std::vector<Position2d> &tx_positions,
                                 const Eigen::MatrixXcd &w_q, double wavelength);

/// f(u)^H A f(u) written as tr(A) + 2 sum_{i<j} |A_ij| cos(psi_ij).
double varsigma(const Position2d &u, const Eigen::MatrixXcd &a, const UserChannelGeometry &geom, double wavelength);

/// Gradient of varsigma w.r.t. (x, y).
Eigen::Vector2d varsigma_gradient(const Position2d &u, const Eigen::MatrixXcd &a, const UserChannelGeometry &geom,
                                  double wavelength);

/// Bound on the spectral norm of the Hessian of varsigma over the whole plane.
double varsigma_curvature(const Eigen::MatrixXcd &a, const UserChannelGeometry &geom, double wavelength);

struct UserSurrogate
{
    Position2d center;
    int user = 0;
    std::vector<Eigen::Vector2d> grad; // per q; entry q == user is the signal term
    std::vector<double> tau;           // per q; entry q == user holds delta
    std::vector<double> values_at_center;
    double delta = 0.0;

    double signal_lower(const Position2d &u) const;            // eta lower bound
    double interference_upper(std::size_t q, const Position2d &u) const; // varsigma_q upper bound
};

UserSurrogate user_surrogate(const Position2d &center, std::size_t k, const BeamformingMatrix &w,
                             const UserChannelGeometry &geom, const std::vector<Position2d> &tx_positions,
                             double wavelength);

enum class UserMoveStatus
{
    improved,
    unchanged,
    no_feasible_point,
};

std::string to_string(UserMoveStatus s);

struct UserPositionResult
{
    Position2d u;
    std::vector<double> slack_trace; // true SINR slack at each accepted center, in watts
    UserMoveStatus status = UserMoveStatus::unchanged;
};

/// Max-slack successive approximation of the SINR-feasibility problem for one user.
UserPositionResult solve_user_position(std::size_t k, const BeamformingMatrix &w, const UserChannelGeometry &geom,
                                       const std::vector<Position2d> &tx_positions, const Position2d &u_init,
                                       const SystemConfig &config, const ScaOptions &options = {1e-5, 20});

/// |h_k^H w_k|^2 - gamma (sum_{q != k} |h_k^H w_q|^2 + sigma^2) evaluated directly.
double sinr_slack(std::size_t k, const BeamformingMatrix &w, const Eigen::VectorXcd &h, const SystemConfig &config);

} // namespace maisac

#endif
