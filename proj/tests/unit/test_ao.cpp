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

#include "maisac/ao.hpp"
#include "maisac/errors.hpp"

#include <chrono>

using namespace maisac;

namespace
{

ScenarioDraw draw_for(const SystemConfig &c, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    return draw_random_geometry(c, rng);
}

SystemConfig small_config()
{
    SystemConfig c;
    c.n_tx = 4;
    c.n_rx = 4;
    c.n_users = 2;
    return c;
}

} // namespace

TEST_CASE("mode names round-trip")
{
    for (AOMode m : {AOMode::FullMA, AOMode::FPA, AOMode::BsMaOnly, AOMode::UserMaOnly})
        CHECK(parse_mode(to_string(m)) == m);
    CHECK_THROWS_AS(parse_mode("fullma"), InvalidConfig);
}

TEST_CASE("initial state")
{
    SystemConfig c;
    c.d_min = c.wavelength / 5;
    c.d_max = 4 * c.wavelength;
    const auto full = init_state(c, AOMode::FullMA);
    REQUIRE(full.d_r.size() == 10);
    CHECK(full.d_r(1) - full.d_r(0) == doctest::Approx(4 * c.wavelength / 9).epsilon(1e-14));
    CHECK(full.d_r(9) <= c.d_max * (1 + 1e-12));
    for (const auto &u : full.user_positions)
        CHECK(u == Position2d{});

    c.d_max = 8 * c.wavelength;
    const auto fpa = init_state(c, AOMode::FPA);
    CHECK(fpa.d_r(1) - fpa.d_r(0) == doctest::Approx(c.wavelength / 2).epsilon(1e-14));
    CHECK(init_state(c, AOMode::UserMaOnly).d_r == fpa.d_r);
    CHECK(init_state(c, AOMode::BsMaOnly).d_r == init_state(c, AOMode::BsMaOnly).d_r);
    CHECK(init_state(c, AOMode::FullMA).d_r(9) == doctest::Approx(8 * c.wavelength));
}

TEST_CASE("algorithm 1 is monotone and its traces certify")
{
    const SystemConfig c = small_config();
    for (std::uint64_t seed = 1; seed <= 4; ++seed)
    {
        const auto draw = draw_for(c, seed);
        for (AOMode m : {AOMode::FullMA, AOMode::FPA, AOMode::BsMaOnly, AOMode::UserMaOnly})
        {
            const auto trace = run_algorithm1(c, draw, m);
            REQUIRE(trace.feasible);
            REQUIRE(!trace.records.empty());
            for (std::size_t i = 1; i < trace.records.size(); ++i)
                CHECK(trace.records[i].crb <= trace.records[i - 1].crb * (1 + 1e-7));
            for (const auto &r : trace.records)
                CHECK(r.audit.ok());
            const auto fin = evaluate_final(trace, c, draw);
            CHECK(oracle::relative_diff(fin.crb_general, fin.crb_expanded) <= 1e-8);
            CHECK(fin.crb == doctest::Approx(trace.final_crb()).epsilon(1e-12));
            if (m == AOMode::FPA)
            {
                CHECK(trace.records.size() == 1);
                CHECK(trace.records.back().d_r == trace.initial.d_r);
            }
            if (!moves_receive_array(m))
                for (const auto &r : trace.records)
                    CHECK(r.d_r == trace.initial.d_r);
            if (!moves_users(m))
                for (const auto &r : trace.records)
                    CHECK(r.users == trace.initial.user_positions);
        }
    }
}

TEST_CASE("loose threshold converges quickly")
{
    const SystemConfig c = small_config();
    const auto draw = draw_for(c, 9);
    AOOptions o;
    o.eps1 = 0.5;
    const auto trace = run_algorithm1(c, draw, AOMode::FullMA, o);
    CHECK(trace.converged());
    MESSAGE("outer iterations at eps1 = 0.5: " << trace.outer_iterations());
}

TEST_CASE("richer modes do not lose to the fixed array on the same geometry")
{
    const SystemConfig c = small_config();
    int wins = 0;
    for (std::uint64_t seed = 1; seed <= 4; ++seed)
    {
        const auto draw = draw_for(c, 50 + seed);
        const double fpa = run_algorithm1(c, draw, AOMode::FPA).final_crb();
        const double full = run_algorithm1(c, draw, AOMode::FullMA).final_crb();
        if (full <= fpa * (1 + 1e-6))
            ++wins;
    }
    CHECK(wins == 4);
}

TEST_CASE("tampered traces are rejected")
{
    const SystemConfig c = small_config();
    const auto draw = draw_for(c, 3);
    const auto trace = run_algorithm1(c, draw, AOMode::FullMA);
    REQUIRE(trace.feasible);
    CHECK_NOTHROW(evaluate_final(trace, c, draw));

    auto t1 = trace;
    t1.records.back().crb *= 0.9;
    CHECK_THROWS_AS(evaluate_final(t1, c, draw), ConsistencyError);

    auto t2 = trace;
    t2.records.back().w.columns *= 0.5;
    CHECK_THROWS_AS(evaluate_final(t2, c, draw), ConsistencyError);

    auto t3 = trace;
    t3.records.back().audit.sinr[0] *= 1.01;
    CHECK_THROWS_AS(evaluate_final(t3, c, draw), ConsistencyError);

    auto t4 = run_algorithm1(c, draw, AOMode::FPA);
    t4.records.back().d_r(1) += 1e-6;
    CHECK_THROWS_AS(evaluate_final(t4, c, draw), ConsistencyError);
}

TEST_CASE("infeasible SINR aborts the trial with a diagnostic")
{
    SystemConfig c = small_config();
    c.power_budget = dbm_to_watts(-40);
    const auto trace = run_algorithm1(c, draw_for(c, 4), AOMode::FullMA);
    CHECK_FALSE(trace.feasible);
    CHECK(trace.diagnostic.find("shortfall") != std::string::npos);
    CHECK(trace.final_crb() == kInfiniteCrb);
    CHECK_FALSE(evaluate_final(trace, c, draw_for(c, 4)).feasible);
}

TEST_CASE("default-size run finishes in reasonable time")
{
    const SystemConfig c;
    const auto draw = draw_for(c, 1);
    const auto t0 = std::chrono::steady_clock::now();
    const auto trace = run_algorithm1(c, draw, AOMode::FullMA);
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    REQUIRE(trace.feasible);
    MESSAGE("default FullMA: " << trace.outer_iterations() << " iterations, " << s << " s");
    for (std::size_t i = 1; i < trace.records.size(); ++i)
        CHECK(trace.records[i].crb <= trace.records[i - 1].crb * (1 + 1e-7));
}
