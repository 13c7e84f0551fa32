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

#ifndef MAISAC_QP_HPP
#define MAISAC_QP_HPP

#include "maisac/sdp.hpp"

#include <Eigen/Dense>

#include <utility>

namespace maisac
{

// minimize 0.5 x' H x + c' x  s.t.  A x <= b
struct QpProblem
{
    Eigen::Index dim = 0;
    Eigen::MatrixXd hessian;
    Eigen::VectorXd linear_term;
    Eigen::MatrixXd a;
    Eigen::VectorXd b;

    /// Throws std::invalid_argument on size mismatch or a hessian that is not PSD to 1e-9.
    void validate() const;
};

/// Mehrotra predictor-corrector interior point. The returned report uses
/// primal_residual for |Ax + s - b| and dual_residual for |Hx + c + A'z|,
/// both relative.
std::pair<Eigen::VectorXd, SolveReport> solve_qp(const QpProblem &p, double tol = 1e-9, int max_iter = 100);

struct Box2d
{
    double lo_x = 0.0;
    double hi_x = 0.0;
    double lo_y = 0.0;
    double hi_y = 0.0;

    bool contains(const Eigen::Vector2d &p, double tol = 0.0) const
    {
        return p.x() >= lo_x - tol && p.x() <= hi_x + tol && p.y() >= lo_y - tol && p.y() <= hi_y + tol;
    }
};

struct BoxMaximum
{
    Eigen::Vector2d point = Eigen::Vector2d::Zero();
    double value = 0.0;
};

/// Global maximum of x' quad x + lin' x + constant over the box. quad must be
/// negative semidefinite.
BoxMaximum max_concave_quadratic_2d(const Eigen::Matrix2d &quad, const Eigen::Vector2d &lin, double constant,
                                    const Box2d &box);

} // namespace maisac

#endif
