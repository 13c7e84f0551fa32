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

#include "maisac/ao.hpp"

#include "maisac/errors.hpp"
#include "maisac/subproblems.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace maisac
{

namespace
{

RadarParams radar_params(const SystemConfig &config, const ScenarioDraw &draw)
{
    return {draw.reflect_gain, config.noise_radar, config.frame_len};
}

double layout_tolerance(const SystemConfig &config) { return 1e-9 * config.d_max; }

Eigen::VectorXd uniform_receive_array(int n, double spacing)
{
    Eigen::VectorXd d(n);
    for (int i = 0; i < n; ++i)
        d(i) = i * spacing;
    return d;
}

double relative(double a, double b)
{
    if (a == b)
        return 0.0;
    return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

} // namespace

std::string to_string(AOMode mode)
{
    switch (mode)
    {
    case AOMode::FullMA:
        return "FullMA";
    case AOMode::FPA:
        return "FPA";
    case AOMode::BsMaOnly:
        return "BsMaOnly";
    case AOMode::UserMaOnly:
        return "UserMaOnly";
    }
    return "unknown";
}

AOMode parse_mode(const std::string &name)
{
    for (AOMode m : {AOMode::FullMA, AOMode::FPA, AOMode::BsMaOnly, AOMode::UserMaOnly})
        if (to_string(m) == name)
            return m;
    throw InvalidConfig("unknown mode '" + name + "' (expected FullMA, FPA, BsMaOnly or UserMaOnly)");
}

bool moves_receive_array(AOMode mode) { return mode == AOMode::FullMA || mode == AOMode::BsMaOnly; }

bool moves_users(AOMode mode) { return mode == AOMode::FullMA || mode == AOMode::UserMaOnly; }

double AOTrace::final_crb() const
{
    if (!feasible || records.empty())
        return kInfiniteCrb;
    return records.back().crb;
}

ConstraintAudit audit_state(const AntennaLayout &layout, const BeamformingMatrix &w, const ScenarioDraw &draw,
                            const SystemConfig &config)
{
    ConstraintAudit a;
    a.power = w.power();
    if (a.power > config.power_budget * (1 + 1e-6))
    {
        std::ostringstream os;
        os << "transmit power " << a.power << " W exceeds budget " << config.power_budget << " W";
        a.violations.push_back(os.str());
    }

    const auto channels = channel_vectors(layout.user_positions, draw.users, layout.tx_positions, config.wavelength);
    for (std::size_t k = 0; k < channels.size(); ++k)
    {
        a.sinr.push_back(sinr(k, w, channels, config.noise_comm));
        if (a.sinr.back() < config.sinr_threshold * (1 - 1e-6))
        {
            std::ostringstream os;
            os << "user " << k << " SINR " << a.sinr.back() << " below " << config.sinr_threshold;
            a.violations.push_back(os.str());
        }
    }

    for (const auto &v : receive_layout_violations(layout.d_r, config.d_min, config.d_max, layout_tolerance(config)))
        a.violations.push_back(v);

    for (std::size_t k = 0; k < layout.user_positions.size(); ++k)
        if (!in_user_region(layout.user_positions[k], config.user_region_half_side,
                            1e-12 * config.user_region_half_side))
            a.violations.push_back("user " + std::to_string(k) + " outside its region");
    return a;
}

AntennaLayout init_state(const SystemConfig &config, AOMode mode)
{
    config.validate();
    AntennaLayout s;
    s.d_t = build_transmit_array(config);
    s.tx_positions = tx_positions_2d(s.d_t);
    s.user_positions.assign(static_cast<std::size_t>(config.n_users), Position2d{});

    const int n = config.n_rx;
    if (n == 1)
        s.d_r = Eigen::VectorXd::Zero(1);
    else
    {
        const double fill = config.d_max / (n - 1);
        double spacing = moves_receive_array(mode) ? std::max(config.d_min, fill)
                                                   : std::min(config.wavelength / 2.0, fill);
        spacing = std::min(spacing, fill);
        s.d_r = uniform_receive_array(n, spacing);
    }

    const auto bad = receive_layout_violations(s.d_r, config.d_min, config.d_max, layout_tolerance(config));
    if (!bad.empty())
        throw InvalidConfig("initial receive array infeasible: " + bad.front());
    return s;
}

AOTrace run_algorithm1(const SystemConfig &config, const ScenarioDraw &draw, AOMode mode, const AOOptions &options)
{
    using clock = std::chrono::steady_clock;
    const RadarParams radar = radar_params(config, draw);

    AOTrace trace;
    trace.mode = mode;
    trace.initial = init_state(config, mode);
    AntennaLayout state = trace.initial;

    auto crb_of = [&](const Eigen::VectorXd &d_r, const BeamformingMatrix &w)
    { return crb_expanded(state.d_t, d_r, config.target_angle, config.wavelength, sample_covariance(w), radar); };

    BeamformingMatrix w;
    double crb = kInfiniteCrb;
    double t_value = 0.0;

    for (int it = 1; it <= options.max_outer; ++it)
    {
        const auto start = clock::now();
        AORecord rec;
        rec.iteration = it;

        // W block
        const auto ctx = steering_context(state.d_t, state.d_r, config.target_angle, config.wavelength);
        const auto channels =
            channel_vectors(state.user_positions, draw.users, state.tx_positions, config.wavelength);
        try
        {
            const auto out = solve_beamforming_sdr(ctx, channels, config);
            const double cand = crb_of(state.d_r, out.recovered);
            if (it == 1 || cand <= crb)
            {
                w = out.recovered;
                crb = cand;
                t_value = out.t_value;
                rec.w_status = to_string(out.report.status);
            }
            else
                rec.w_status = "rolled_back";
        }
        catch (const InfeasibleSinr &e)
        {
            if (it == 1)
            {
                trace.feasible = false;
                std::ostringstream os;
                os << e.what() << "; shortfall dB:";
                for (double s : e.shortfall_db())
                    os << ' ' << s;
                trace.diagnostic = os.str();
                return trace;
            }
            rec.w_status = "rolled_back: infeasible";
        }
        catch (const SolverFailure &e)
        {
            if (it == 1)
            {
                trace.feasible = false;
                trace.diagnostic = e.what();
                return trace;
            }
            rec.w_status = std::string("rolled_back: ") + e.what();
        }

        // receive array block
        if (moves_receive_array(mode))
        {
            try
            {
                const auto res = solve_bs_positions(sample_covariance(w), ctx, state.d_r, config);
                const double cand = crb_of(res.d_r, w);
                if (cand <= crb)
                {
                    state.d_r = res.d_r;
                    crb = cand;
                    rec.d_r_status = "rounds=" + std::to_string(res.rounds);
                }
                else
                    rec.d_r_status = "rolled_back";
            }
            catch (const std::runtime_error &e)
            {
                rec.d_r_status = std::string("rolled_back: ") + e.what();
            }
        }
        else
            rec.d_r_status = "fixed";

        // user blocks; each user's move only changes its own channel
        if (moves_users(mode))
        {
            int moved = 0;
            for (std::size_t k = 0; k < state.user_positions.size(); ++k)
            {
                const auto res = solve_user_position(k, w, draw.users[k], state.tx_positions,
                                                     state.user_positions[k], config);
                if (res.status == UserMoveStatus::improved)
                {
                    state.user_positions[k] = res.u;
                    ++moved;
                }
            }
            rec.u_status = "moved=" + std::to_string(moved);
        }
        else
            rec.u_status = "fixed";

        rec.crb = crb;
        rec.t_value = t_value;
        rec.d_r = state.d_r;
        rec.users = state.user_positions;
        rec.w = w;
        rec.audit = audit_state(state, w, draw, config);
        if (!rec.audit.ok())
            throw ConsistencyError("iteration " + std::to_string(it) + ": " + rec.audit.violations.front());
        rec.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();

        if (!trace.records.empty())
        {
            const double prev = trace.records.back().crb;
            const double decrease = (prev - crb) / prev;
            rec.converged = !(decrease >= options.eps1);
        }
        if (mode == AOMode::FPA)
            rec.converged = true;
        trace.records.push_back(std::move(rec));
        if (trace.records.back().converged)
            break;
    }
    return trace;
}

FinalSummary evaluate_final(const AOTrace &trace, const SystemConfig &config, const ScenarioDraw &draw)
{
    FinalSummary s;
    if (!trace.feasible)
        return s;
    if (trace.records.empty())
        throw ConsistencyError("feasible trace without records");

    const AORecord &last = trace.records.back();
    const RadarParams radar = radar_params(config, draw);
    const Eigen::MatrixXcd r = sample_covariance(last.w);

    s.crb_general =
        crb_general(steering_context(trace.initial.d_t, last.d_r, config.target_angle, config.wavelength), r, radar);
    s.crb_expanded = crb_expanded(trace.initial.d_t, last.d_r, config.target_angle, config.wavelength, r, radar);
    if (relative(s.crb_general, s.crb_expanded) > 1e-6)
        throw ConsistencyError("CRB evaluation paths disagree on the final state");
    if (relative(s.crb_expanded, last.crb) > 1e-6)
        throw ConsistencyError("recorded CRB does not match the final state");

    if (!moves_receive_array(trace.mode) && last.d_r != trace.initial.d_r)
        throw ConsistencyError("fixed receive array moved under mode " + to_string(trace.mode));
    if (!moves_users(trace.mode) && last.users != trace.initial.user_positions)
        throw ConsistencyError("fixed users moved under mode " + to_string(trace.mode));

    AntennaLayout layout = trace.initial;
    layout.d_r = last.d_r;
    layout.user_positions = last.users;
    const ConstraintAudit a = audit_state(layout, last.w, draw, config);
    if (!a.ok())
        throw ConsistencyError("final state violates a constraint: " + a.violations.front());
    if (a.sinr.size() != last.audit.sinr.size())
        throw ConsistencyError("recorded SINR count mismatch");
    for (std::size_t k = 0; k < a.sinr.size(); ++k)
        if (relative(a.sinr[k], last.audit.sinr[k]) > 1e-6)
            throw ConsistencyError("recorded SINR of user " + std::to_string(k) + " does not match");

    s.feasible = true;
    s.crb = s.crb_expanded;
    s.sinr = a.sinr;
    s.power = a.power;
    return s;
}

} // namespace maisac
