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

#include "maisac/errors.hpp"
#include "maisac/subproblems.hpp"

using namespace maisac;

namespace
{

SystemConfig small_config(int n_tx, int n_users)
{
    SystemConfig c;
    c.n_tx = n_tx;
    c.n_users = n_users;
    c.n_rx = 4;
    return c;
}

} // namespace

TEST_CASE("SDR solution satisfies every constraint and recovery keeps the bracket")
{
    for (std::uint64_t seed = 1; seed <= 10; ++seed)
    {
        const auto s = scenario::make(small_config(4, 2), seed);
        const auto ctx = s.context();
        const auto out = solve_beamforming_sdr(ctx, s.channels, s.config);
        CHECK(out.report.status == SolveStatus::optimal);

        double trace_sum = 0.0;
        Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(4, 4);
        for (const auto &w : out.covariance_blocks)
        {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(w);
            CHECK(es.eigenvalues().minCoeff() >= -1e-9 * es.eigenvalues().maxCoeff());
            trace_sum += w.trace().real();
            r += w;
        }
        CHECK(trace_sum <= s.config.power_budget * (1 + 1e-6));
        CHECK(oracle::relative_diff(out.t_value, fisher_bracket(ctx, r)) <= 1e-6);
        CHECK(oracle::relative_diff(out.sdr_objective, fisher_bracket(ctx, r)) <= 1e-12);

        for (std::size_t k = 0; k < 2; ++k)
            CHECK(sinr(k, out.recovered, s.channels, s.config.noise_comm) >=
                  s.config.sinr_threshold * (1 - 1e-6));
        CHECK(out.recovered.power() <= trace_sum * (1 + 1e-12));
        CHECK(std::abs(out.recovery_gap) <= 1e-4);
    }
}

TEST_CASE("single user without a SINR target reaches the sensing optimum")
{
    SystemConfig c = small_config(2, 1);
    c.sinr_threshold = 0.0;
    const auto s = scenario::make(c, 3);
    const auto ctx = s.context();
    const auto out = solve_beamforming_sdr(ctx, s.channels, s.config);

    // rank-one grid: v = (cos a, sin a e^{j phi}), 100 x 100 points
    double best = 0.0;
    for (int i = 0; i < 100; ++i)
        for (int j = 0; j < 100; ++j)
        {
            const double a = (kPi / 2) * i / 99.0;
            const double phi = 2 * kPi * j / 100.0;
            Eigen::Vector2cd v(std::cos(a), std::sin(a) * std::polar(1.0, phi));
            best = std::max(best, fisher_bracket(ctx, c.power_budget * v * v.adjoint()));
        }
    CHECK(out.t_value >= best * (1 - 1e-9));
    CHECK(oracle::relative_diff(out.t_value, best) <= 1e-3);

    SystemConfig c2 = c;
    c2.power_budget *= 2;
    const auto out2 = solve_beamforming_sdr(ctx, s.channels, c2);
    CHECK(oracle::relative_diff(out2.t_value, 2 * out.t_value) <= 1e-6);
}

TEST_CASE("SINR beyond single-user capacity is rejected")
{
    SystemConfig c = small_config(4, 1);
    const auto s = scenario::make(c, 5);
    const double capacity = c.power_budget * s.channels[0].squaredNorm() / c.noise_comm;

    c.sinr_threshold = capacity * 1.001;
    try
    {
        solve_beamforming_sdr(s.context(), s.channels, c);
        FAIL("expected InfeasibleSinr");
    }
    catch (const InfeasibleSinr &e)
    {
        REQUIRE(e.shortfall_db().size() == 1);
        CHECK(e.shortfall_db()[0] == doctest::Approx(10 * std::log10(1.001)));
    }
    c.sinr_threshold = capacity * 0.999;
    const auto out = solve_beamforming_sdr(s.context(), s.channels, c);
    CHECK(sinr(0, out.recovered, s.channels, c.noise_comm) >= c.sinr_threshold * (1 - 1e-6));
}

TEST_CASE("joint infeasibility from interference is detected")
{
    // two users with identical channels cannot both reach a high SINR
    SystemConfig c = small_config(4, 2);
    auto s = scenario::make(c, 9);
    s.channels[1] = s.channels[0];
    c.sinr_threshold = 4.0;
    CHECK_THROWS_AS(solve_beamforming_sdr(s.context(), s.channels, c), InfeasibleSinr);
}

TEST_CASE("rank-one recovery")
{
    std::mt19937_64 rng(61);
    const Eigen::VectorXcd w = oracle::random_complex(4, 1, rng);
    const Eigen::VectorXcd h = oracle::random_complex(4, 1, rng);
    const auto rec = recover_rank_one({w * w.adjoint()}, {h});
    const Eigen::MatrixXcd back = rec.columns * rec.columns.adjoint();
    CHECK((back - w * w.adjoint()).norm() <= 1e-10 * w.squaredNorm());

    const Eigen::MatrixXcd wp = oracle::random_hermitian_psd(4, 3, rng);
    const auto r2 = recover_rank_one({wp}, {h});
    CHECK(oracle::relative_diff(std::norm(h.dot(r2.columns.col(0))), h.dot(wp * h).real()) <= 1e-8);
    CHECK(r2.power() <= wp.trace().real() * (1 + 1e-12));

    CHECK_THROWS_AS(recover_rank_one({Eigen::MatrixXcd::Zero(4, 4)}, {h}), DegenerateInput);
}
