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

#include <cmath>
#include <limits>
#include <sstream>

namespace maisac
{

namespace
{

// Hermitian coefficient matrices H with M = tr(H R) for Hermitian R.
struct FimCoefficients
{
    Eigen::MatrixXcd m11;
    Eigen::MatrixXcd m12_re;
    Eigen::MatrixXcd m12_im;
    Eigen::MatrixXcd m22;
};

Eigen::MatrixXcd hermitian_part(const Eigen::MatrixXcd &x) { return 0.5 * (x + x.adjoint()); }

FimCoefficients fim_coefficients(const SteeringContext &ctx)
{
    const double n_r = static_cast<double>(ctx.n_rx());
    const cd tr_dr = ctx.D_r.sum();
    const double tr_drh_dr = ctx.D_r.squaredNorm();
    const Eigen::MatrixXcd dt_a = ctx.D_t.asDiagonal() * ctx.A;
    const Eigen::MatrixXcd a_dth = ctx.A * ctx.D_t.conjugate().asDiagonal();
    const Eigen::MatrixXcd dt_a_dth = dt_a * ctx.D_t.conjugate().asDiagonal();

    FimCoefficients c;
    c.m11 = hermitian_part(dt_a * tr_dr + a_dth * std::conj(tr_dr) + n_r * dt_a_dth + tr_drh_dr * ctx.A);
    const Eigen::MatrixXcd x12 = n_r * dt_a + std::conj(tr_dr) * ctx.A;
    c.m12_re = hermitian_part(x12);
    c.m12_im = (x12 - x12.adjoint()) / cd(0.0, 2.0);
    c.m22 = n_r * ctx.A;
    return c;
}

double spectral_norm(const Eigen::MatrixXcd &h)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

} // namespace

std::vector<double> sinr_shortfall_db(const std::vector<Eigen::VectorXcd> &channels, const SystemConfig &config)
{
    std::vector<double> out;
    out.reserve(channels.size());
    for (const auto &h : channels)
    {
        const double snr = config.power_budget * h.squaredNorm() / config.noise_comm;
        if (config.sinr_threshold <= 0.0)
            out.push_back(-std::numeric_limits<double>::infinity());
        else if (snr <= 0.0)
            out.push_back(std::numeric_limits<double>::infinity());
        else
            out.push_back(linear_to_db(config.sinr_threshold) - linear_to_db(snr));
    }
    return out;
}

BeamformingMatrix recover_rank_one(const std::vector<Eigen::MatrixXcd> &blocks,
                                   const std::vector<Eigen::VectorXcd> &channels)
{
    if (blocks.empty() || blocks.size() != channels.size())
        throw DegenerateInput("recover_rank_one: block and channel counts differ");
    const auto n = blocks.front().rows();
    BeamformingMatrix w{Eigen::MatrixXcd::Zero(n, static_cast<Eigen::Index>(blocks.size()))};
    for (std::size_t k = 0; k < blocks.size(); ++k)
    {
        const Eigen::VectorXcd wh = blocks[k] * channels[k];
        const double g = channels[k].dot(wh).real();
        if (!(g > 0.0))
            throw DegenerateInput("recover_rank_one: h^H W h vanishes for user " + std::to_string(k));
        w.columns.col(static_cast<Eigen::Index>(k)) = wh / std::sqrt(g);
    }
    return w;
}

SdrOutcome solve_beamforming_sdr(const SteeringContext &ctx, const std::vector<Eigen::VectorXcd> &channels,
                                 const SystemConfig &config, const SdrOptions &options)
{
    const auto n_users = channels.size();
    const auto n_tx = ctx.n_tx();
    if (n_users == 0)
        throw DegenerateInput("solve_beamforming_sdr: no users");
    const double power = config.power_budget;
    const double gamma = config.sinr_threshold;

    const auto shortfall = sinr_shortfall_db(channels, config);
    for (double s : shortfall)
        if (s > 0.0)
        {
            std::ostringstream os;
            os << "SINR target unreachable even with full-power single-user transmission; shortfall (dB):";
            for (double v : shortfall)
                os << ' ' << v;
            throw InfeasibleSinr(os.str(), shortfall);
        }

    const FimCoefficients coef = fim_coefficients(ctx);
    double s1 = spectral_norm(coef.m11);
    double s2 = spectral_norm(coef.m22);
    if (!(s1 > 0.0))
        s1 = 1.0;
    if (!(s2 > 0.0))
        s2 = 1.0;
    const double s12 = std::sqrt(s1 * s2);

    SdpProblem p;
    p.psd_block_dims.assign(n_users, 2 * n_tx);
    p.scalar_var_count = 1;
    p.objective.add_scalar(0, -1.0);

    const Eigen::MatrixXd r11 = 0.5 * realify(coef.m11) / s1;
    const Eigen::MatrixXd r12_re = 0.5 * realify(coef.m12_re) / s12;
    const Eigen::MatrixXd r12_im = 0.5 * realify(coef.m12_im) / s12;
    const Eigen::MatrixXd r22 = 0.5 * realify(coef.m22) / s2;

    LmiConstraint lmi(4);
    for (std::size_t k = 0; k < n_users; ++k)
    {
        for (Eigen::Index d : {0, 2})
            lmi.entry(d, d).add_block(k, r11);
        for (Eigen::Index d : {1, 3})
            lmi.entry(d, d).add_block(k, r22);
        lmi.entry(0, 1).add_block(k, r12_re);
        lmi.entry(2, 3).add_block(k, r12_re);
        lmi.entry(0, 3).add_block(k, -r12_im);
        lmi.entry(1, 2).add_block(k, r12_im);
    }
    lmi.entry(0, 0).add_scalar(0, -1.0);
    lmi.entry(2, 2).add_scalar(0, -1.0);
    p.lmis.push_back(std::move(lmi));

    if (gamma > 0.0)
    {
        const double norm = gamma * config.noise_comm / power;
        for (std::size_t k = 0; k < n_users; ++k)
        {
            const Eigen::MatrixXd hk = 0.5 * realify(channels[k] * channels[k].adjoint()) / norm;
            LinearConstraint row;
            for (std::size_t q = 0; q < n_users; ++q)
                row.lhs.add_block(q, q == k ? Eigen::MatrixXd(-hk) : Eigen::MatrixXd(gamma * hk));
            row.rhs = -1.0;
            p.inequalities.push_back(std::move(row));
        }
    }
    LinearConstraint budget;
    for (std::size_t k = 0; k < n_users; ++k)
        budget.lhs.add_block(k, 0.5 * Eigen::MatrixXd::Identity(2 * n_tx, 2 * n_tx));
    budget.rhs = 1.0;
    p.inequalities.push_back(std::move(budget));

    auto [sol, report] = solve_sdp(p, options.tol, options.max_iter);
    if (report.status == SolveStatus::infeasible)
        throw InfeasibleSinr("SINR targets are jointly infeasible under the power budget", shortfall);
    if (report.status != SolveStatus::optimal)
    {
        const bool near = report.primal_residual <= 1e-6 && report.dual_residual <= 1e-6 &&
                          report.relative_gap <= 1e-6;
        if (!near)
            throw SolverFailure("beamforming SDP ended with status " + to_string(report.status));
    }

    SdrOutcome out;
    out.report = report;
    Eigen::MatrixXcd r_sum = Eigen::MatrixXcd::Zero(n_tx, n_tx);
    for (std::size_t k = 0; k < n_users; ++k)
    {
        Eigen::MatrixXcd w = power * complexify(sol.blocks[k]);
        w = hermitian_part(w);
        r_sum += w;
        out.covariance_blocks.push_back(std::move(w));
    }
    out.t_value = power * s1 * sol.scalars(0);
    out.sdr_objective = fisher_bracket(ctx, r_sum);
    out.recovered = recover_rank_one(out.covariance_blocks, channels);
    const double rec = fisher_bracket(ctx, sample_covariance(out.recovered));
    out.recovery_gap = out.sdr_objective > 0.0 ? (out.sdr_objective - rec) / out.sdr_objective : 0.0;
    return out;
}

} // namespace maisac
