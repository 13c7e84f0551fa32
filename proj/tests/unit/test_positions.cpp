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

#include "doctest.h"
#include "oracles.hpp"
#include "scenario.hpp"

#include "maisac/subproblems.hpp"

#include <random>

using namespace maisac;

namespace
{

Eigen::VectorXd sorted_layout(Eigen::Index n, const SystemConfig &c, std::mt19937_64 &rng)
{
    // random feasible layout: gaps d_min + random share of the leftover span
    Eigen::VectorXd gaps(n);
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
    {
        gaps(i) = oracle::uniform(rng, 0.0, 1.0);
        total += gaps(i);
    }
    const double spare = 0.999 * (c.d_max - (n - 1) * c.d_min);
    Eigen::VectorXd d(n);
    double pos = gaps(0) / total * spare;
    for (Eigen::Index i = 0; i < n; ++i)
    {
        if (i > 0)
            pos += c.d_min + gaps(i) / total * spare;
        d(i) = pos;
    }
    return d;
}

} // namespace

TEST_CASE("receive-array objective data")
{
    std::mt19937_64 rng(71);
    SystemConfig c;
    c.n_tx = 4;
    c.n_rx = 5;
    const auto dt = build_transmit_array(c);
    for (int inst = 0; inst < 20; ++inst)
    {
        const Eigen::VectorXd center = sorted_layout(5, c, rng);
        const auto ctx = steering_context(dt, center, c.target_angle, c.wavelength);
        const auto r = oracle::random_hermitian_psd(4, 2, rng);
        const auto data = assemble_p21(center, ctx, r, c);

        const double k = 2 * kPi / c.wavelength;
        const double p = (ctx.A * r).trace().real();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(data.e);
        const double expected = k * k * std::pow(std::cos(c.target_angle), 2) * p * p * 5;
        CHECK(oracle::relative_diff(es.eigenvalues().maxCoeff(), expected) <= 1e-10);
        CHECK(std::abs(es.eigenvalues()(3)) <= 1e-10 * expected);

        const double f0 = fisher_bracket(ctx, r);
        CHECK(oracle::relative_diff(data.surrogate(center), f0) <= 1e-10);
        CHECK(oracle::relative_diff(data.true_objective(center), f0) <= 1e-10);
        for (int t = 0; t < 10; ++t)
        {
            const Eigen::VectorXd d = sorted_layout(5, c, rng);
            const double truth = fisher_bracket(steering_context(dt, d, c.target_angle, c.wavelength), r);
            CHECK(oracle::relative_diff(data.true_objective(d), truth) <= 1e-9);
            CHECK(data.surrogate(d) <= truth * (1 + 1e-12));
        }
    }

    const Eigen::VectorXd center = sorted_layout(5, c, rng);
    const auto r = oracle::random_hermitian_psd(4, 2, rng);
    const auto flat = assemble_p21(center, steering_context(dt, center, kPi / 2, c.wavelength), r, c);
    const auto ref = assemble_p21(center, steering_context(dt, center, 0.0, c.wavelength), r, c);
    CHECK(flat.e.norm() <= 1e-30 * ref.e.norm());
    CHECK(flat.f.norm() <= 1e-15 * ref.f.norm() + 1e-300);
    CHECK(flat.linear_coupling.norm() <= 1e-15 * ref.linear_coupling.norm() + 1e-300);
}

TEST_CASE("receive-array SCA is monotone and has fixed points")
{
    std::mt19937_64 rng(72);
    SystemConfig c;
    c.n_tx = 4;
    c.n_rx = 6;
    const auto dt = build_transmit_array(c);
    for (int inst = 0; inst < 10; ++inst)
    {
        const Eigen::VectorXd init = sorted_layout(6, c, rng);
        const auto r = oracle::random_hermitian_psd(4, 2, rng);
        const auto ctx = steering_context(dt, init, c.target_angle, c.wavelength);
        const auto res = solve_bs_positions(r, ctx, init, c);
        CHECK(receive_layout_violations(res.d_r, c.d_min, c.d_max).empty());
        for (std::size_t i = 1; i < res.true_values.size(); ++i)
            CHECK(res.true_values[i] >= res.true_values[i - 1] * (1 - 1e-9));

        const auto again = solve_bs_positions(r, steering_context(dt, res.d_r, c.target_angle, c.wavelength), res.d_r, c);
        CHECK(again.rounds == 1);
        CHECK((again.d_r - res.d_r).norm() <= 1e-9 * c.d_max);
    }
}

TEST_CASE("two receive antennas: SCA against a fine grid")
{
    std::mt19937_64 rng(73);
    SystemConfig c;
    c.n_tx = 4;
    c.n_rx = 2;
    const auto dt = build_transmit_array(c);
    const double step = c.wavelength / 200;
    int within = 0;
    const int total = 10;
    for (int inst = 0; inst < total; ++inst)
    {
        const Eigen::VectorXd init = sorted_layout(2, c, rng);
        const auto r = oracle::random_hermitian_psd(4, 2, rng);
        const auto res = solve_bs_positions(r, steering_context(dt, init, c.target_angle, c.wavelength), init, c);
        const double got = res.true_values.back();
        double best = 0.0;
        const int n = static_cast<int>(std::floor(c.d_max / step + 1e-9));
        for (int i = 0; i <= n; ++i)
            for (int j = i; j <= n; ++j)
            {
                Eigen::Vector2d d(i * step, j * step);
                if (d(1) - d(0) < c.d_min - 1e-12)
                    continue;
                best = std::max(best, fisher_bracket(steering_context(dt, d, c.target_angle, c.wavelength), r));
            }
        if (got >= 0.95 * best)
            ++within;
    }
    CHECK(within >= 8);
}

TEST_CASE("varsigma matches the channel")
{
    std::mt19937_64 rng(74);
    SystemConfig c;
    c.n_tx = 4;
    c.n_users = 1;
    const auto s = scenario::make(c, 74);
    const auto &g = s.draw.users[0];
    for (int inst = 0; inst < 20; ++inst)
    {
        const Eigen::VectorXcd w = oracle::random_complex(4, 1, rng);
        const Eigen::MatrixXcd a = path_covariance(g, s.tx, w * w.adjoint(), c.wavelength);
        const Position2d u{oracle::uniform(rng, -0.05, 0.05), oracle::uniform(rng, -0.05, 0.05)};
        const double direct = std::norm(channel_vector(u, g, s.tx, c.wavelength).dot(w));
        CHECK(oracle::relative_diff(varsigma(u, a, g, c.wavelength), direct) <= 1e-9);

        const double h = 1e-7;
        const Eigen::Vector2d grad = varsigma_gradient(u, a, g, c.wavelength);
        const double fx = (varsigma({u.x + h, u.y}, a, g, c.wavelength) - varsigma({u.x - h, u.y}, a, g, c.wavelength)) / (2 * h);
        const double fy = (varsigma({u.x, u.y + h}, a, g, c.wavelength) - varsigma({u.x, u.y - h}, a, g, c.wavelength)) / (2 * h);
        CHECK((grad - Eigen::Vector2d(fx, fy)).norm() <= 1e-5 * grad.norm());
    }

    Eigen::MatrixXcd diag = Eigen::MatrixXcd::Zero(g.n_paths(), g.n_paths());
    for (Eigen::Index i = 0; i < g.n_paths(); ++i)
        diag(i, i) = 0.1 * (i + 1);
    CHECK(varsigma({0.03, -0.02}, diag, g, c.wavelength) == doctest::Approx(diag.trace().real()));

    UserChannelGeometry one;
    one.rx_elevations = g.rx_elevations.head(1);
    one.rx_azimuths = g.rx_azimuths.head(1);
    one.tx_elevations = g.tx_elevations.head(1);
    one.tx_azimuths = g.tx_azimuths.head(1);
    one.prm_diag = g.prm_diag.head(1);
    Eigen::MatrixXcd a1(1, 1);
    a1(0, 0) = 2.5;
    CHECK(varsigma({0.01, 0.01}, a1, one, c.wavelength) == 2.5);
}

TEST_CASE("user surrogates bound the true terms over the whole region")
{
    SystemConfig c;
    c.n_tx = 4;
    c.n_users = 3;
    for (std::uint64_t seed = 1; seed <= 8; ++seed)
    {
        const auto s = scenario::make(c, 100 + seed);
        std::mt19937_64 rng(seed);
        const BeamformingMatrix w{oracle::random_complex(4, 3, rng)};
        const double half = c.user_region_half_side;
        const Position2d center{oracle::uniform(rng, -half, half), oracle::uniform(rng, -half, half)};
        for (std::size_t k = 0; k < 3; ++k)
        {
            const auto &g = s.draw.users[k];
            const auto sur = user_surrogate(center, k, w, g, s.tx, c.wavelength);
            std::vector<Eigen::MatrixXcd> a;
            for (Eigen::Index q = 0; q < 3; ++q)
                a.push_back(path_covariance(g, s.tx, w.columns.col(q) * w.columns.col(q).adjoint(), c.wavelength));
            for (std::size_t q = 0; q < 3; ++q)
            {
                const double at = varsigma(center, a[q], g, c.wavelength);
                const double bound = q == k ? sur.signal_lower(center) : sur.interference_upper(q, center);
                CHECK(std::abs(bound - at) <= 1e-10 * std::abs(at));
            }
            int bad = 0;
            for (int i = 0; i < 100; ++i)
                for (int j = 0; j < 100; ++j)
                {
                    const Position2d u{-half + 2 * half * i / 99.0, -half + 2 * half * j / 99.0};
                    for (std::size_t q = 0; q < 3; ++q)
                    {
                        const double v = varsigma(u, a[q], g, c.wavelength);
                        const double tol = 1e-12 * (std::abs(v) + a[q].trace().real());
                        if (q == k ? sur.signal_lower(u) > v + tol : sur.interference_upper(q, u) < v - tol)
                            ++bad;
                    }
                }
            CHECK(bad == 0);
        }
    }
}

TEST_CASE("user position search keeps the SINR constraint")
{
    SystemConfig c;
    c.n_tx = 4;
    c.n_users = 2;
    c.n_rx = 4;
    int moved = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed)
    {
        const auto s = scenario::make(c, 200 + seed);
        const auto out = solve_beamforming_sdr(s.context(), s.channels, c);
        for (std::size_t k = 0; k < 2; ++k)
        {
            const auto res = solve_user_position(k, out.recovered, s.draw.users[k], s.tx, {0, 0}, c);
            const double margin = sinr_slack(k, out.recovered, s.channels[k], c);
            CHECK(res.slack_trace.front() == doctest::Approx(margin).epsilon(1e-12));
            for (std::size_t i = 1; i < res.slack_trace.size(); ++i)
                CHECK(res.slack_trace[i] >= res.slack_trace[i - 1]);
            CHECK(in_user_region(res.u, c.user_region_half_side, 1e-15));
            if (res.status != UserMoveStatus::no_feasible_point)
            {
                auto users = s.users;
                users[k] = res.u;
                const auto ch = channel_vectors(users, s.draw.users, s.tx, c.wavelength);
                CHECK(sinr(k, out.recovered, ch, c.noise_comm) >= c.sinr_threshold * (1 - 1e-6));
            }
            if (res.status == UserMoveStatus::improved)
                ++moved;
        }
    }
    CHECK(moved > 0);
}

TEST_CASE("single-path user has nothing to gain from moving")
{
    SystemConfig c;
    c.n_tx = 4;
    c.n_users = 1;
    c.n_tx_paths = c.n_rx_paths = 1;
    const auto s = scenario::make(c, 300);
    const auto out = solve_beamforming_sdr(s.context(), s.channels, c);
    const Position2d start{0.01, -0.02};
    const auto res = solve_user_position(0, out.recovered, s.draw.users[0], s.tx, start, c);
    CHECK(res.u == start);
    CHECK(res.status == UserMoveStatus::unchanged);
}
