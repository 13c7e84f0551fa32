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

#ifndef MAISAC_MODEL_HPP
#define MAISAC_MODEL_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace maisac
{

using cd = std::complex<double>;

constexpr double kPi = std::numbers::pi;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

// Every scenario parameter. All quantities are SI (meters, watts, radians,
// linear ratios); dB conversions happen at the configuration boundary.
struct SystemConfig
{
    int n_tx = 10;
    int n_rx = 10;
    int n_users = 5;
    double wavelength = 0.05;
    int frame_len = 256;
    double power_budget = 1.0;   // 30 dBm
    double sinr_threshold = 10.0; // 10 dB
    double noise_comm = 1e-11;   // -80 dBm
    double noise_radar = 1e-11;  // -80 dBm
    double d_min = 0.05 / 5.0;
    double d_max = 4.0 * 0.05;
    double user_region_half_side = 0.05;
    double target_angle = kPi / 3.0;
    double target_distance = 30.0;
    std::optional<double> reflect_gain; // |alpha|^2; derived from the path loss when unset
    double ref_gain_1m = 1e-4;          // -40 dB
    double pathloss_exp = 2.8;
    int n_tx_paths = 10;
    int n_rx_paths = 10;
    double user_dist_min = 20.0;
    double user_dist_max = 60.0;
    std::uint64_t rng_seed = 1;

    /// Defaults rescaled to a given wavelength (d_min = λ/5, d_max = 4λ, C_k half side λ).
    static SystemConfig with_wavelength(double lambda);

    /// Throws InvalidConfig listing every offending field.
    void validate() const;

    /// |alpha|^2, defaulting to the squared one-way path gain at the target distance.
    double effective_reflect_gain() const;
};

struct Position2d
{
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Position2d &, const Position2d &) = default;
};

// Per-user multipath geometry. Path angles and the diagonal of the path
// response matrix stay constant within a trial.
struct UserChannelGeometry
{
    Eigen::VectorXd rx_elevations;
    Eigen::VectorXd rx_azimuths;
    Eigen::VectorXd tx_elevations;
    Eigen::VectorXd tx_azimuths;
    Eigen::VectorXcd prm_diag;
    double distance = 0.0;

    Eigen::Index n_paths() const { return prm_diag.size(); }
    void validate() const;
};

// Columns are the per-user beamformers w_k.
struct BeamformingMatrix
{
    Eigen::MatrixXcd columns;

    Eigen::Index n_tx() const { return columns.rows(); }
    Eigen::Index n_users() const { return columns.cols(); }
    double power() const { return columns.squaredNorm(); }
};

struct AntennaLayout
{
    Eigen::VectorXd d_t;
    Eigen::VectorXd d_r;
    std::vector<Position2d> tx_positions;
    std::vector<Position2d> user_positions;
};

struct ScenarioDraw
{
    std::vector<UserChannelGeometry> users;
    double reflect_gain = 0.0;
};

/// Half-wavelength ULA on the x axis, first element at the origin.
Eigen::VectorXd build_transmit_array(const SystemConfig &config);

/// (d_t[n], 0) for every transmit element.
std::vector<Position2d> tx_positions_2d(const Eigen::VectorXd &d_t);

/// Path phase offset rho(u) = x sin(theta) cos(phi) + y cos(theta).
inline double path_phase_distance(const Position2d &u, double elevation, double azimuth)
{
    return u.x * std::sin(elevation) * std::cos(azimuth) + u.y * std::cos(elevation);
}

/// f_k(u): one unit-modulus entry per receive path.
Eigen::VectorXcd receive_field_response(const Position2d &u, const UserChannelGeometry &geom, double wavelength);

/// T_k: L_t x N_t, column n is the transmit field response of element n.
Eigen::MatrixXcd transmit_field_response_matrix(const UserChannelGeometry &geom,
                                                const std::vector<Position2d> &tx_positions,
                                                double wavelength);

/// h_k such that h_k^H = f_k(u)^H Sigma_k T_k.
Eigen::VectorXcd channel_vector(const Position2d &u, const UserChannelGeometry &geom,
                                const std::vector<Position2d> &tx_positions, double wavelength);

/// Channels of every user at the given positions.
std::vector<Eigen::VectorXcd> channel_vectors(const std::vector<Position2d> &users,
                                              const std::vector<UserChannelGeometry> &geoms,
                                              const std::vector<Position2d> &tx_positions, double wavelength);

/// |h_k^H w_k|^2 / (sum_{q != k} |h_k^H w_q|^2 + sigma^2).
double sinr(std::size_t k, const BeamformingMatrix &w, const std::vector<Eigen::VectorXcd> &channels,
            double noise_power);

/// R_X = W W^H.
Eigen::MatrixXcd sample_covariance(const BeamformingMatrix &w);

/// Random user geometry for one trial plus the target reflection gain.
ScenarioDraw draw_random_geometry(const SystemConfig &config, std::mt19937_64 &rng);

/// True when u lies in the square box [-half, half]^2 (with slack tol).
bool in_user_region(const Position2d &u, double half_side, double tol = 0.0);

/// Human-readable spacing and segment violations of a receive layout; empty when valid.
std::vector<std::string> receive_layout_violations(const Eigen::VectorXd &d_r, double d_min, double d_max,
                                                   double tol = 1e-12);

} // namespace maisac

#endif
