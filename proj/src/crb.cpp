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

#include "maisac/crb.hpp"
#include "maisac/errors.hpp"

#include <cmath>

namespace maisac
{

namespace
{

constexpr double kDegenerateRel = 1e-10;

Eigen::VectorXcd steering(const Eigen::VectorXd &d, double theta, double wavelength)
{
    const double k = 2.0 * kPi / wavelength;
    Eigen::VectorXcd v(d.size());
    for (Eigen::Index n = 0; n < d.size(); ++n)
        v(n) = std::polar(1.0, k * d(n) * std::sin(theta));
    return v;
}

void require_covariance(const Eigen::MatrixXcd &r_x, Eigen::Index n_tx)
{
    if (r_x.rows() != n_tx || r_x.cols() != n_tx)
        throw DegenerateInput("covariance dimension does not match the transmit array");
    if (!(r_x.trace().real() > 0.0))
        throw DegenerateInput("covariance has zero trace");
}

// tr(diag(x) M diag(y)^H R) for diagonal matrices stored as vectors.
cd trace_diag_sandwich(const Eigen::VectorXcd &x, const Eigen::MatrixXcd &m, const Eigen::VectorXcd &y,
                       const Eigen::MatrixXcd &r)
{
    cd acc = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            acc += x(i) * m(i, j) * std::conj(y(j)) * r(j, i);
    return acc;
}

// tr(diag(x) M) where M is a product already formed.
cd trace_diag(const Eigen::VectorXcd &x, const Eigen::MatrixXcd &m)
{
    return (x.array() * m.diagonal().array()).sum();
}

// Bracket tr(Gd^H Gd R) - |tr(Gd^H G R)|^2 / tr(G^H G R) for explicit matrices.
double bracket_from_responses(const Eigen::MatrixXcd &g, const Eigen::MatrixXcd &g_dot, const Eigen::MatrixXcd &r)
{
    const cd t_dd = (g_dot.adjoint() * g_dot * r).trace();
    const cd t_dg = (g_dot.adjoint() * g * r).trace();
    const cd t_gg = (g.adjoint() * g * r).trace();
    if (!(t_gg.real() > 0.0))
        return 0.0;
    return t_dd.real() - std::norm(t_dg) / t_gg.real();
}

} // namespace

double FimBlocks::schur() const
{
    if (!(m22.real() > 0.0))
        return 0.0;
    return m11.real() - std::norm(m12) / m22.real();
}

SteeringContext steering_context(const Eigen::VectorXd &d_t, const Eigen::VectorXd &d_r, double theta,
                                 double wavelength)
{
    if (d_t.size() == 0 || d_r.size() == 0)
        throw DegenerateInput("steering_context: empty antenna position vector");

    SteeringContext ctx;
    ctx.d_t = d_t;
    ctx.d_r = d_r;
    ctx.theta = theta;
    ctx.wavelength = wavelength;
    ctx.cos_theta = std::cos(theta);

    const cd scale(0.0, 2.0 * kPi / wavelength * ctx.cos_theta);
    ctx.a = steering(d_t, theta, wavelength);
    ctx.b = steering(d_r, theta, wavelength);
    ctx.D_t = scale * d_t.cast<cd>();
    ctx.D_r = scale * d_r.cast<cd>();
    ctx.a_dot = ctx.D_t.cwiseProduct(ctx.a);
    ctx.b_dot = ctx.D_r.cwiseProduct(ctx.b);
    ctx.A = ctx.a * ctx.a.adjoint();
    return ctx;
}

FimBlocks fim_blocks(const SteeringContext &ctx, const Eigen::MatrixXcd &r_x)
{
    const double n_r = static_cast<double>(ctx.n_rx());
    const Eigen::MatrixXcd ar = ctx.A * r_x;
    const cd tr_ar = ar.trace();
    const cd tr_dt_ar = trace_diag(ctx.D_t, ar);                              // tr(D_t A R)
    const cd tr_dt_a_dth_r = trace_diag_sandwich(ctx.D_t, ctx.A, ctx.D_t, r_x); // tr(D_t A D_t^H R)
    const cd tr_a_dth_r = std::conj(tr_dt_ar);                                // tr(A D_t^H R)
    const cd tr_dr = ctx.D_r.sum();
    const cd tr_drh = std::conj(tr_dr);
    const double tr_drh_dr = ctx.D_r.squaredNorm();

    FimBlocks m;
    m.m11 = tr_dt_ar * tr_dr + tr_dt_a_dth_r * n_r + tr_ar * tr_drh_dr + tr_a_dth_r * tr_drh;
    m.m12 = n_r * tr_dt_ar + tr_drh * tr_ar;
    m.m21 = std::conj(m.m12);
    m.m22 = n_r * tr_ar;
    if (!(m.m22.real() > 0.0))
        throw DegenerateInput("fim_blocks: M22 = N_r tr(A R_X) vanishes");
    return m;
}

double fisher_bracket(const SteeringContext &ctx, const Eigen::MatrixXcd &r_x)
{
    const double n_r = static_cast<double>(ctx.n_rx());
    const Eigen::MatrixXcd ar = ctx.A * r_x;
    const double tr_ar = ar.trace().real();
    if (!(tr_ar > 0.0))
        return 0.0;
    FimBlocks m;
    const cd tr_dt_ar = trace_diag(ctx.D_t, ar);
    const cd tr_dr = ctx.D_r.sum();
    m.m11 = tr_dt_ar * tr_dr + trace_diag_sandwich(ctx.D_t, ctx.A, ctx.D_t, r_x) * n_r +
            tr_ar * ctx.D_r.squaredNorm() + std::conj(tr_dt_ar) * std::conj(tr_dr);
    m.m12 = n_r * tr_dt_ar + std::conj(tr_dr) * tr_ar;
    m.m21 = std::conj(m.m12);
    m.m22 = n_r * tr_ar;
    return m.schur();
}

double bracket_scale(const Eigen::VectorXd &d_t, const Eigen::VectorXd &d_r, double wavelength,
                     const Eigen::MatrixXcd &r_x)
{
    const double k = 2.0 * kPi / wavelength;
    return k * k * static_cast<double>(d_r.size()) * r_x.trace().real() *
           static_cast<double>(d_t.size()) * (d_t.squaredNorm() + d_r.squaredNorm());
}

double crb_from_bracket(double bracket, double scale, const RadarParams &radar)
{
    if (!(bracket > kDegenerateRel * scale))
        return kInfiniteCrb;
    return radar.noise_power / (2.0 * radar.reflect_gain * radar.frame_len * bracket);
}

double crb_general(const SteeringContext &ctx, const Eigen::MatrixXcd &r_x, const RadarParams &radar)
{
    require_covariance(r_x, ctx.n_tx());
    const double alpha = std::sqrt(radar.reflect_gain);
    const Eigen::MatrixXcd g = alpha * ctx.b * ctx.a.adjoint();
    const Eigen::MatrixXcd g_dot = alpha * (ctx.b_dot * ctx.a.adjoint() + ctx.b * ctx.a_dot.adjoint());
    // G carries alpha, so the bracket already holds |alpha|^2 once
    const double bracket = bracket_from_responses(g, g_dot, r_x) / radar.reflect_gain;
    return crb_from_bracket(bracket, bracket_scale(ctx.d_t, ctx.d_r, ctx.wavelength, r_x), radar);
}

double crb_expanded(const Eigen::VectorXd &d_t, const Eigen::VectorXd &d_r, double theta, double wavelength,
                    const Eigen::MatrixXcd &r_x, const RadarParams &radar)
{
    const SteeringContext ctx = steering_context(d_t, d_r, theta, wavelength);
    require_covariance(r_x, ctx.n_tx());
    return crb_from_bracket(fisher_bracket(ctx, r_x), bracket_scale(d_t, d_r, wavelength, r_x), radar);
}

double crb_fd_oracle(const Eigen::VectorXd &d_t, const Eigen::VectorXd &d_r, double theta, double wavelength,
                     const Eigen::MatrixXcd &r_x, const RadarParams &radar, double h)
{
    if (!(h > 0.0))
        throw DegenerateInput("crb_fd_oracle: step must be > 0");
    require_covariance(r_x, d_t.size());
    const double alpha = std::sqrt(radar.reflect_gain);
    auto response = [&](double th)
    { return Eigen::MatrixXcd(alpha * steering(d_r, th, wavelength) * steering(d_t, th, wavelength).adjoint()); };
    const Eigen::MatrixXcd g = response(theta);
    const Eigen::MatrixXcd g_dot = (response(theta + h) - response(theta - h)) / (2.0 * h);
    const double bracket = bracket_from_responses(g, g_dot, r_x) / radar.reflect_gain;
    return crb_from_bracket(bracket, bracket_scale(d_t, d_r, wavelength, r_x), radar);
}

} // namespace maisac
