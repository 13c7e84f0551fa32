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

#ifndef MAISAC_CRB_HPP
#define MAISAC_CRB_HPP

#include "maisac/model.hpp"

#include <limits>

namespace maisac
{

constexpr double kInfiniteCrb = std::numeric_limits<double>::infinity();

// Steering vectors toward the target and their derivatives w.r.t. the
// direction. The derivative matrices are diagonal and purely imaginary,
// so only their diagonals are stored.
struct SteeringContext
{
    Eigen::VectorXcd a;      // transmit steering vector, N_t
    Eigen::VectorXcd b;      // receive steering vector, N_r
    Eigen::VectorXcd a_dot;  // da/dtheta
    Eigen::VectorXcd b_dot;  // db/dtheta
    Eigen::MatrixXcd A;      // a a^H
    Eigen::VectorXcd D_t;    // diagonal of j (2 pi / lambda) diag(d_t) cos(theta)
    Eigen::VectorXcd D_r;    // diagonal of j (2 pi / lambda) diag(d_r) cos(theta)
    double cos_theta = 1.0;

    Eigen::VectorXd d_t;
    Eigen::VectorXd d_r;
    double theta = 0.0;
    double wavelength = 0.0;

    Eigen::Index n_tx() const { return a.size(); }
    Eigen::Index n_rx() const { return b.size(); }
};

// Entries of the 2x2 Fisher matrix whose Schur complement M11 - |M12|^2/M22
// is the bracket in the CRB denominator.
struct FimBlocks
{
    cd m11;
    cd m12;
    cd m21;
    cd m22;

    double schur() const;
};

// Radar link parameters entering the CRB prefactor.
struct RadarParams
{
    double reflect_gain = 1.0; // |alpha|^2
    double noise_power = 1.0;  // sigma_R^2
    int frame_len = 1;         // L
};

SteeringContext steering_context(const Eigen::VectorXd &d_t, const Eigen::VectorXd &d_r, double theta,
                                 double wavelength);

FimBlocks fim_blocks(const SteeringContext &ctx, const Eigen::MatrixXcd &r_x);

/// Fisher bracket M11 - |M12|^2/M22 (without |alpha|^2). Zero when M22 vanishes.
double fisher_bracket(const SteeringContext &ctx, const Eigen::MatrixXcd &r_x);

/// Literal evaluation from the target response G = alpha b a^H and its derivative.
double crb_general(const SteeringContext &ctx, const Eigen::MatrixXcd &r_x, const RadarParams &radar);

/// Closed form via trace identities; the production path.
double crb_expanded(const Eigen::VectorXd &d_t, const Eigen::VectorXd &d_r, double theta, double wavelength,
                    const Eigen::MatrixXcd &r_x, const RadarParams &radar);

/// crb_general with dG/dtheta replaced by a central difference of step h.
double crb_fd_oracle(const Eigen::VectorXd &d_t, const Eigen::VectorXd &d_r, double theta, double wavelength,
                     const Eigen::MatrixXcd &r_x, const RadarParams &radar, double h);

/// sigma_R^2 / (2 |alpha|^2 L bracket), with +inf below the degeneracy threshold.
double crb_from_bracket(double bracket, double scale, const RadarParams &radar);

/// Reference magnitude used by the degeneracy threshold (bracket <= 1e-10 * scale -> +inf).
double bracket_scale(const Eigen::VectorXd &d_t, const Eigen::VectorXd &d_r, double wavelength,
                     const Eigen::MatrixXcd &r_x);

} // namespace maisac

#endif
