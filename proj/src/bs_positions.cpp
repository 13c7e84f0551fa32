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

#include "maisac/errors.hpp"
#include "maisac/subproblems.hpp"

#include <algorithm>
#include <cmath>

namespace maisac
{

double P21Data::true_objective(const Eigen::VectorXd &d) const
{
    return constant + s2_coef * d.squaredNorm() + linear_coupling.dot(d) - (d.dot(e * d) + f.dot(d)) / m22;
}

double P21Data::surrogate(const Eigen::VectorXd &d) const
{
    const double s2_lower = 2.0 * center.dot(d) - center.squaredNorm();
    return constant + s2_coef * s2_lower + linear_coupling.dot(d) - (d.dot(e * d) + f.dot(d)) / m22;
}

P21Data assemble_p21(const Eigen::VectorXd &d_r_center, const SteeringContext &ctx, const Eigen::MatrixXcd &r_x,
                     const SystemConfig &config)
{
    (void)config;
    const auto n_r = d_r_center.size();
    const double k = 2.0 * kPi / ctx.wavelength;
    const double c2 = k * k * ctx.cos_theta * ctx.cos_theta;
    const Eigen::MatrixXcd ar = ctx.A * r_x;
    const double p = ar.trace().real();                          // tr(A R_X)
    const cd q = (ctx.d_t.cast<cd>().asDiagonal() * ar).trace(); // tr(diag(d_t) A R_X)
    const Eigen::MatrixXcd dt_a_dth = ctx.D_t.asDiagonal() * ctx.A * ctx.D_t.conjugate().asDiagonal();
    const double s = (dt_a_dth * r_x).trace().real(); // tr(D_t A D_t^H R_X)

    P21Data data;
    data.center = d_r_center;
    data.m22 = static_cast<double>(n_r) * p;
    data.e = c2 * p * p * Eigen::MatrixXd::Ones(n_r, n_r);
    data.f = Eigen::VectorXd::Constant(n_r, -2.0 * c2 * p * static_cast<double>(n_r) * q.real());
    // d_t^T ((R A + A R) .* I) 1 = 2 Re tr(diag(d_t) A R)
    data.linear_coupling = Eigen::VectorXd::Constant(n_r, -2.0 * c2 * q.real());
    data.s2_coef = c2 * p;
    const double n = static_cast<double>(n_r);
    data.constant = n * s - (n * n * c2 * std::norm(q)) / (data.m22 > 0.0 ? data.m22 : 1.0);
    if (!(data.m22 > 0.0))
        data.m22 = 1.0;
    return data;
}

Eigen::VectorXd repair_receive_layout(Eigen::VectorXd d, double d_min, double d_max)
{
    const auto n = d.size();
    if (n == 0)
        return d;
    d(0) = std::max(d(0), 0.0);
    for (Eigen::Index i = 1; i < n; ++i)
        d(i) = std::max(d(i), d(i - 1) + d_min);
    d(n - 1) = std::min(d(n - 1), d_max);
    for (Eigen::Index i = n - 2; i >= 0; --i)
        d(i) = std::min(d(i), d(i + 1) - d_min);
    d(0) = std::max(d(0), 0.0);
    return d;
}

BsPositionResult solve_bs_positions(const Eigen::MatrixXcd &r_x, const SteeringContext &ctx,
                                    const Eigen::VectorXd &d_r_init, const SystemConfig &config,
                                    const ScaOptions &options)
{
    const auto n_r = d_r_init.size();
    if (n_r != ctx.n_rx())
        throw DegenerateInput("solve_bs_positions: receive array size mismatch");
    const auto bad = receive_layout_violations(d_r_init, config.d_min, config.d_max, 1e-9 * config.d_max);
    if (!bad.empty())
        throw InvalidConfig("solve_bs_positions: initial receive array violates " + bad.front());

    const double lambda = ctx.wavelength;
    auto bracket_at = [&](const Eigen::VectorXd &d)
    { return fisher_bracket(steering_context(ctx.d_t, d, ctx.theta, lambda), r_x); };

    BsPositionResult out;
    out.d_r = d_r_init;
    double current = bracket_at(out.d_r);
    out.true_values.push_back(current);

    // Spacing constraints in wavelength units
    QpProblem qp;
    qp.dim = n_r;
    qp.a = Eigen::MatrixXd::Zero(n_r + 1, n_r);
    qp.b = Eigen::VectorXd::Zero(n_r + 1);
    qp.a(0, 0) = -1.0;
    qp.a(1, n_r - 1) = 1.0;
    qp.b(1) = config.d_max / lambda;
    for (Eigen::Index i = 1; i < n_r; ++i)
    {
        qp.a(i + 1, i - 1) = 1.0;
        qp.a(i + 1, i) = -1.0;
        qp.b(i + 1) = -config.d_min / lambda;
    }

    for (int round = 0; round < options.max_rounds; ++round)
    {
        const P21Data data = assemble_p21(out.d_r, ctx, r_x, config);
        const double scale = data.s2_coef * lambda * lambda;
        if (!(scale > 0.0))
            break;
        ++out.rounds;

        // maximize the surrogate  <=>  minimize 0.5 x'Hx + g'x with d = lambda x
        const Eigen::VectorXd v = 2.0 * data.s2_coef * data.center + data.linear_coupling - data.f / data.m22;
        qp.hessian = 2.0 * lambda * lambda * data.e / (data.m22 * scale);
        qp.linear_term = -lambda * v / scale;
        const auto [x, report] = solve_qp(qp);
        out.last_status = report.status;
        if (report.status != SolveStatus::optimal)
            break;

        const Eigen::VectorXd cand = repair_receive_layout(lambda * x, config.d_min, config.d_max);
        const double sur = data.surrogate(cand);
        out.surrogate_values.push_back(sur);
        const double value = bracket_at(cand);
        if (!(value >= current))
            break;
        const double gain = (value - current) / std::max(std::abs(current), 1e-300);
        out.d_r = cand;
        current = value;
        out.true_values.push_back(current);
        if ((sur - data.surrogate(data.center)) <= options.eps * std::max(std::abs(data.surrogate(data.center)), 1e-300) ||
            gain <= options.eps)
            break;
    }
    return out;
}

} // namespace maisac
