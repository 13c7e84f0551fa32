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

#include "maisac/model.hpp"
#include "maisac/errors.hpp"

#include <cmath>
#include <sstream>

namespace maisac
{

SystemConfig SystemConfig::with_wavelength(double lambda)
{
    SystemConfig c;
    c.wavelength = lambda;
    c.d_min = lambda / 5.0;
    c.d_max = 4.0 * lambda;
    c.user_region_half_side = lambda;
    return c;
}

void SystemConfig::validate() const
{
    std::vector<std::string> bad;
    auto require = [&](bool ok, const char *msg)
    {
        if (!ok)
            bad.emplace_back(msg);
    };

    require(n_tx >= 1, "n_tx must be >= 1");
    require(n_rx >= 1, "n_rx must be >= 1");
    require(n_users >= 1, "n_users must be >= 1");
    require(frame_len >= 1, "frame_len must be >= 1");
    require(n_tx_paths >= 1, "n_tx_paths must be >= 1");
    require(n_rx_paths >= 1, "n_rx_paths must be >= 1");
    require(n_tx_paths == n_rx_paths, "n_tx_paths must equal n_rx_paths (square diagonal PRM)");
    require(std::isfinite(wavelength) && wavelength > 0.0, "wavelength must be > 0");
    require(std::isfinite(power_budget) && power_budget > 0.0, "power_budget must be > 0");
    require(std::isfinite(sinr_threshold) && sinr_threshold >= 0.0, "sinr_threshold must be >= 0");
    require(std::isfinite(noise_comm) && noise_comm > 0.0, "noise_comm must be > 0");
    require(std::isfinite(noise_radar) && noise_radar > 0.0, "noise_radar must be > 0");
    require(std::isfinite(d_min) && d_min > 0.0, "d_min must be > 0");
    require(std::isfinite(d_max) && d_max > 0.0, "d_max must be > 0");
    require(std::isfinite(user_region_half_side) && user_region_half_side > 0.0,
            "user_region_half_side must be > 0");
    require(std::isfinite(target_distance) && target_distance > 0.0, "target_distance must be > 0");
    require(std::isfinite(ref_gain_1m) && ref_gain_1m > 0.0, "ref_gain_1m must be > 0");
    require(std::isfinite(pathloss_exp) && pathloss_exp > 0.0, "pathloss_exp must be > 0");
    require(user_dist_min > 0.0 && user_dist_max >= user_dist_min,
            "user distance range must satisfy 0 < min <= max");
    require(!reflect_gain || (std::isfinite(*reflect_gain) && *reflect_gain > 0.0), "reflect_gain must be > 0");
    require(std::abs(target_angle) < kPi / 2.0 && std::cos(target_angle) > 0.0,
            "target_angle must lie in (-pi/2, pi/2)");
    if (n_rx >= 1 && d_min > 0.0 && d_max > 0.0)
        require(static_cast<double>(n_rx - 1) * d_min <= d_max * (1.0 + 1e-12),
                "d_max too small: (n_rx - 1) * d_min exceeds d_max");

    if (!bad.empty())
    {
        std::ostringstream os;
        os << "invalid configuration:";
        for (const auto &b : bad)
            os << "\n  - " << b;
        throw InvalidConfig(os.str());
    }
}

double SystemConfig::effective_reflect_gain() const
{
    if (reflect_gain)
        return *reflect_gain;
    const double one_way = ref_gain_1m * std::pow(target_distance, -pathloss_exp);
    return one_way * one_way;
}

void UserChannelGeometry::validate() const
{
    const auto l = prm_diag.size();
    if (rx_elevations.size() != l || rx_azimuths.size() != l || tx_elevations.size() != l ||
        tx_azimuths.size() != l)
        throw InvalidConfig("user geometry: path counts of angles and PRM diagonal differ");
    auto in_range = [](const Eigen::VectorXd &v)
    { return v.size() == 0 || v.cwiseAbs().maxCoeff() <= kPi / 2.0 + 1e-12; };
    if (!in_range(rx_elevations) || !in_range(rx_azimuths) || !in_range(tx_elevations) || !in_range(tx_azimuths))
        throw InvalidConfig("user geometry: angles must lie in [-pi/2, pi/2]");
}

Eigen::VectorXd build_transmit_array(const SystemConfig &config)
{
    Eigen::VectorXd d_t(config.n_tx);
    for (int n = 0; n < config.n_tx; ++n)
        d_t(n) = n * config.wavelength / 2.0;
    return d_t;
}

std::vector<Position2d> tx_positions_2d(const Eigen::VectorXd &d_t)
{
    std::vector<Position2d> out;
    out.reserve(static_cast<std::size_t>(d_t.size()));
    for (Eigen::Index n = 0; n < d_t.size(); ++n)
        out.push_back({d_t(n), 0.0});
    return out;
}

Eigen::VectorXcd receive_field_response(const Position2d &u, const UserChannelGeometry &geom, double wavelength)
{
    const double k = 2.0 * kPi / wavelength;
    Eigen::VectorXcd f(geom.rx_elevations.size());
    for (Eigen::Index i = 0; i < f.size(); ++i)
        f(i) = std::polar(1.0, k * path_phase_distance(u, geom.rx_elevations(i), geom.rx_azimuths(i)));
    return f;
}

Eigen::MatrixXcd transmit_field_response_matrix(const UserChannelGeometry &geom,
                                                const std::vector<Position2d> &tx_positions,
                                                double wavelength)
{
    const double k = 2.0 * kPi / wavelength;
    const auto n_paths = geom.tx_elevations.size();
    Eigen::MatrixXcd t(n_paths, static_cast<Eigen::Index>(tx_positions.size()));
    for (Eigen::Index n = 0; n < t.cols(); ++n)
        for (Eigen::Index j = 0; j < n_paths; ++j)
            t(j, n) = std::polar(1.0, k * path_phase_distance(tx_positions[static_cast<std::size_t>(n)],
                                                              geom.tx_elevations(j), geom.tx_azimuths(j)));
    return t;
}

Eigen::VectorXcd channel_vector(const Position2d &u, const UserChannelGeometry &geom,
                                const std::vector<Position2d> &tx_positions, double wavelength)
{
    const Eigen::VectorXcd f = receive_field_response(u, geom, wavelength);
    const Eigen::MatrixXcd t = transmit_field_response_matrix(geom, tx_positions, wavelength);
    // h^H = f^H Sigma T  =>  h = T^H Sigma^H f
    return t.adjoint() * (geom.prm_diag.conjugate().asDiagonal() * f);
}

std::vector<Eigen::VectorXcd> channel_vectors(const std::vector<Position2d> &users,
                                              const std::vector<UserChannelGeometry> &geoms,
                                              const std::vector<Position2d> &tx_positions, double wavelength)
{
    std::vector<Eigen::VectorXcd> out;
    out.reserve(users.size());
    for (std::size_t k = 0; k < users.size(); ++k)
        out.push_back(channel_vector(users[k], geoms[k], tx_positions, wavelength));
    return out;
}

double sinr(std::size_t k, const BeamformingMatrix &w, const std::vector<Eigen::VectorXcd> &channels,
            double noise_power)
{
    if (!(noise_power > 0.0))
        throw InvalidConfig("sinr: noise power must be > 0");
    const auto &h = channels.at(k);
    double interference = 0.0;
    double signal = 0.0;
    for (Eigen::Index q = 0; q < w.n_users(); ++q)
    {
        const double g = std::norm(h.dot(w.columns.col(q))); // h^H w_q
        if (static_cast<std::size_t>(q) == k)
            signal = g;
        else
            interference += g;
    }
    return signal / (interference + noise_power);
}

Eigen::MatrixXcd sample_covariance(const BeamformingMatrix &w)
{
    return w.columns * w.columns.adjoint();
}

ScenarioDraw draw_random_geometry(const SystemConfig &config, std::mt19937_64 &rng)
{
    std::uniform_real_distribution<double> dist(config.user_dist_min, config.user_dist_max);
    std::uniform_real_distribution<double> angle(-kPi / 2.0, kPi / 2.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    ScenarioDraw draw;
    draw.users.reserve(static_cast<std::size_t>(config.n_users));
    const auto l = static_cast<Eigen::Index>(config.n_rx_paths);
    for (int k = 0; k < config.n_users; ++k)
    {
        UserChannelGeometry g;
        g.distance = dist(rng);
        g.rx_elevations.resize(l);
        g.rx_azimuths.resize(l);
        g.tx_elevations.resize(l);
        g.tx_azimuths.resize(l);
        for (Eigen::Index i = 0; i < l; ++i)
        {
            g.rx_elevations(i) = angle(rng);
            g.rx_azimuths(i) = angle(rng);
        }
        for (Eigen::Index j = 0; j < l; ++j)
        {
            g.tx_elevations(j) = angle(rng);
            g.tx_azimuths(j) = angle(rng);
        }
        // CN(0, c0 d^-alpha / L) with L the path count
        const double variance =
            config.ref_gain_1m * std::pow(g.distance, -config.pathloss_exp) / static_cast<double>(l);
        const double sd = std::sqrt(variance / 2.0);
        g.prm_diag.resize(l);
        for (Eigen::Index i = 0; i < l; ++i)
        {
            const double re = gauss(rng);
            const double im = gauss(rng);
            g.prm_diag(i) = cd(sd * re, sd * im);
        }
        draw.users.push_back(std::move(g));
    }
    draw.reflect_gain = config.effective_reflect_gain();
    return draw;
}

bool in_user_region(const Position2d &u, double half_side, double tol)
{
    return std::abs(u.x) <= half_side + tol && std::abs(u.y) <= half_side + tol;
}

std::vector<std::string> receive_layout_violations(const Eigen::VectorXd &d_r, double d_min, double d_max,
                                                   double tol)
{
    std::vector<std::string> out;
    if (d_r.size() == 0)
    {
        out.emplace_back("empty receive APV");
        return out;
    }
    if (d_r(0) < -tol)
        out.emplace_back("first receive element below 0");
    if (d_r(d_r.size() - 1) > d_max + tol)
        out.emplace_back("last receive element beyond d_max");
    for (Eigen::Index n = 1; n < d_r.size(); ++n)
        if (d_r(n) - d_r(n - 1) < d_min - tol)
        {
            out.emplace_back("spacing below d_min between elements " + std::to_string(n - 1) + " and " +
                             std::to_string(n));
        }
    return out;
}

} // namespace maisac
