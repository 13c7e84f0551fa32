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

#include "maisac/subproblems.hpp"

#include <algorithm>
#include <cmath>

namespace maisac
{

namespace
{

Eigen::Vector2d path_direction(const UserChannelGeometry &geom, Eigen::Index i)
{
    return {std::sin(geom.rx_elevations(i)) * std::cos(geom.rx_azimuths(i)), std::cos(geom.rx_elevations(i))};
}

} // namespace

std::string to_string(UserMoveStatus s)
{
    switch (s)
    {
    case UserMoveStatus::improved:
        return "improved";
    case UserMoveStatus::unchanged:
        return "unchanged";
    case UserMoveStatus::no_feasible_point:
        return "no-feasible-point";
    }
    return "unknown";
}

Eigen::MatrixXcd path_covariance(const UserChannelGeometry &geom, const std::vector<Position2d> &tx_positions,
                                 const Eigen::MatrixXcd &w_q, double wavelength)
{
    const Eigen::MatrixXcd st = geom.prm_diag.asDiagonal() * transmit_field_response_matrix(geom, tx_positions, wavelength);
    return st * w_q * st.adjoint();
}

double varsigma(const Position2d &u, const Eigen::MatrixXcd &a, const UserChannelGeometry &geom, double wavelength)
{
    const double k = 2.0 * kPi / wavelength;
    const auto l = a.rows();
    double acc = a.trace().real();
    for (Eigen::Index i = 0; i < l; ++i)
    {
        const double rho_i = path_phase_distance(u, geom.rx_elevations(i), geom.rx_azimuths(i));
        for (Eigen::Index j = i + 1; j < l; ++j)
        {
            const double rho_j = path_phase_distance(u, geom.rx_elevations(j), geom.rx_azimuths(j));
            const double psi = k * (rho_i - rho_j) - std::arg(a(i, j));
            acc += 2.0 * std::abs(a(i, j)) * std::cos(psi);
        }
    }
    return acc;
}

Eigen::Vector2d varsigma_gradient(const Position2d &u, const Eigen::MatrixXcd &a, const UserChannelGeometry &geom,
                                  double wavelength)
{
    const double k = 2.0 * kPi / wavelength;
    const auto l = a.rows();
    Eigen::Vector2d g = Eigen::Vector2d::Zero();
    for (Eigen::Index i = 0; i < l; ++i)
    {
        const double rho_i = path_phase_distance(u, geom.rx_elevations(i), geom.rx_azimuths(i));
        for (Eigen::Index j = i + 1; j < l; ++j)
        {
            const double rho_j = path_phase_distance(u, geom.rx_elevations(j), geom.rx_azimuths(j));
            const double psi = k * (rho_i - rho_j) - std::arg(a(i, j));
            g -= 2.0 * k * std::abs(a(i, j)) * std::sin(psi) * (path_direction(geom, i) - path_direction(geom, j));
        }
    }
    return g;
}

double varsigma_curvature(const Eigen::MatrixXcd &a, const UserChannelGeometry &geom, double wavelength)
{
    const double k = 2.0 * kPi / wavelength;
    double sum_abs = 0.0;
    double pairwise = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = i + 1; j < a.rows(); ++j)
        {
            const double m = std::abs(a(i, j));
            sum_abs += m;
            pairwise += m * (path_direction(geom, i) - path_direction(geom, j)).squaredNorm();
        }
    return std::max(4.0 * k * k * sum_abs, 2.0 * k * k * pairwise);
}

double UserSurrogate::signal_lower(const Position2d &u) const
{
    const auto ku = static_cast<std::size_t>(user);
    const Eigen::Vector2d d(u.x - center.x, u.y - center.y);
    return values_at_center[ku] + grad[ku].dot(d) - 0.5 * delta * d.squaredNorm();
}

double UserSurrogate::interference_upper(std::size_t q, const Position2d &u) const
{
    const Eigen::Vector2d d(u.x - center.x, u.y - center.y);
    return values_at_center[q] + grad[q].dot(d) + 0.5 * tau[q] * d.squaredNorm();
}

UserSurrogate user_surrogate(const Position2d &center, std::size_t k, const BeamformingMatrix &w,
                             const UserChannelGeometry &geom, const std::vector<Position2d> &tx_positions,
                             double wavelength)
{
    UserSurrogate s;
    s.center = center;
    s.user = static_cast<int>(k);
    for (Eigen::Index q = 0; q < w.n_users(); ++q)
    {
        const Eigen::VectorXcd wq = w.columns.col(q);
        const Eigen::MatrixXcd a = path_covariance(geom, tx_positions, wq * wq.adjoint(), wavelength);
        s.values_at_center.push_back(varsigma(center, a, geom, wavelength));
        s.grad.push_back(varsigma_gradient(center, a, geom, wavelength));
        s.tau.push_back(varsigma_curvature(a, geom, wavelength));
    }
    s.delta = s.tau[k];
    return s;
}

double sinr_slack(std::size_t k, const BeamformingMatrix &w, const Eigen::VectorXcd &h, const SystemConfig &config)
{
    double signal = 0.0;
    double interference = 0.0;
    for (Eigen::Index q = 0; q < w.n_users(); ++q)
    {
        const double g = std::norm(h.dot(w.columns.col(q)));
        if (static_cast<std::size_t>(q) == k)
            signal = g;
        else
            interference += g;
    }
    return signal - config.sinr_threshold * (interference + config.noise_comm);
}

UserPositionResult solve_user_position(std::size_t k, const BeamformingMatrix &w, const UserChannelGeometry &geom,
                                       const std::vector<Position2d> &tx_positions, const Position2d &u_init,
                                       const SystemConfig &config, const ScaOptions &options)
{
    const double lambda = config.wavelength;
    const double gamma = config.sinr_threshold;
    const double unit = config.noise_comm;
    const double half = config.user_region_half_side;
    const Box2d box{-half, half, -half, half};

    auto true_slack = [&](const Position2d &u)
    { return sinr_slack(k, w, channel_vector(u, geom, tx_positions, lambda), config); };

    UserPositionResult out;
    out.u = u_init;
    double current = true_slack(u_init);
    out.slack_trace.push_back(current);

    for (int round = 0; round < options.max_rounds; ++round)
    {
        const UserSurrogate s = user_surrogate(out.u, k, w, geom, tx_positions, lambda);
        double curvature = s.delta;
        Eigen::Vector2d g = s.grad[k];
        double g0 = s.values_at_center[k] - gamma * config.noise_comm;
        for (std::size_t q = 0; q < s.grad.size(); ++q)
        {
            if (q == k)
                continue;
            curvature += gamma * s.tau[q];
            g -= gamma * s.grad[q];
            g0 -= gamma * s.values_at_center[q];
        }
        const double a = 0.5 * curvature / unit;
        g /= unit;
        g0 /= unit;
        const Eigen::Vector2d c(out.u.x, out.u.y);
        const auto best = max_concave_quadratic_2d(-a * Eigen::Matrix2d::Identity(), g + 2.0 * a * c,
                                                   g0 - g.dot(c) - a * c.squaredNorm(), box);
        const Position2d cand{best.point.x(), best.point.y()};
        const double value = true_slack(cand);
        if (!(value > current + 1e-12 * std::max(std::abs(current), s.values_at_center[k])))
            break;
        const double gain = value - current;
        const double predicted = best.value * unit - current;
        out.u = cand;
        current = value;
        out.slack_trace.push_back(current);
        const double ref = std::max(std::abs(current), 1e-300);
        if (gain <= options.eps * ref || predicted <= options.eps * ref)
            break;
    }

    if (current < 0.0)
    {
        out.u = u_init;
        out.status = UserMoveStatus::no_feasible_point;
    }
    else
        out.status = (out.u == u_init) ? UserMoveStatus::unchanged : UserMoveStatus::improved;
    return out;
}

} // namespace maisac
