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

#include "maisac/selfcheck.hpp"

#include "maisac/ao.hpp"
#include "maisac/crb.hpp"
#include "maisac/sdp.hpp"
#include "maisac/subproblems.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <random>
#include <sstream>

namespace maisac
{

namespace
{

double rel(double a, double b)
{
    if (a == b)
        return 0.0;
    return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

Eigen::MatrixXcd random_covariance(int n, std::mt19937_64 &rng)
{
    std::normal_distribution<double> g;
    Eigen::MatrixXcd b(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            b(i, j) = cd(g(rng), g(rng));
    return b * b.adjoint() / n;
}

Eigen::VectorXd random_positions(int n, double span, std::mt19937_64 &rng)
{
    std::uniform_real_distribution<double> u(0.0, span);
    Eigen::VectorXd d(n);
    for (int i = 0; i < n; ++i)
        d(i) = u(rng);
    std::sort(d.begin(), d.end());
    return d;
}

CheckResult guarded(const std::string &name, const std::function<CheckResult()> &body)
{
    try
    {
        return body();
    }
    catch (const std::exception &e)
    {
        return {name, false, std::string("threw: ") + e.what()};
    }
}

std::string sci(double v)
{
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

} // namespace

std::vector<CheckResult> run_selfcheck(std::uint64_t seed)
{
    std::vector<CheckResult> out;
    std::mt19937_64 rng(seed);
    const double lambda = 0.05;
    const RadarParams radar{1e-10, 1e-11, 256};

    out.push_back(guarded("crb dual formula",
                          [&]
                          {
                              double worst = 0.0;
                              for (int i = 0; i < 50; ++i)
                              {
                                  const int nt = 2 + i % 7, nr = 1 + i % 5;
                                  const auto dt = random_positions(nt, 4 * lambda, rng);
                                  const auto dr = random_positions(nr, 4 * lambda, rng);
                                  const auto r = random_covariance(nt, rng);
                                  const double a = crb_general(steering_context(dt, dr, 0.7, lambda), r, radar);
                                  const double b = crb_expanded(dt, dr, 0.7, lambda, r, radar);
                                  worst = std::max(worst, rel(a, b));
                              }
                              return CheckResult{"crb dual formula", worst <= 1e-8, "max rel diff " + sci(worst)};
                          }));

    out.push_back(guarded("crb derivative",
                          [&]
                          {
                              double worst = 0.0;
                              for (int i = 0; i < 20; ++i)
                              {
                                  const auto dt = random_positions(4, 4 * lambda, rng);
                                  const auto dr = random_positions(4, 4 * lambda, rng);
                                  const auto r = random_covariance(4, rng);
                                  const double a = crb_general(steering_context(dt, dr, 0.5, lambda), r, radar);
                                  const double b = crb_fd_oracle(dt, dr, 0.5, lambda, r, radar, 1e-6);
                                  worst = std::max(worst, rel(a, b));
                              }
                              return CheckResult{"crb derivative", worst <= 1e-5, "max rel diff " + sci(worst)};
                          }));

    out.push_back(guarded("sdp 2x2 lmi",
                          [&]
                          {
                              SdpProblem p;
                              p.scalar_var_count = 1;
                              p.objective.add_scalar(0, 1.0);
                              LmiConstraint l(2);
                              l.entry(0, 0).add_scalar(0, 1.0);
                              l.entry(1, 1).add_scalar(0, 1.0);
                              l.entry(0, 1).constant = 1.0;
                              p.lmis.push_back(l);
                              const auto [sol, rep] = solve_sdp(p);
                              const double err = std::abs(sol.scalars(0) - 1.0);
                              return CheckResult{"sdp 2x2 lmi", rep.status == SolveStatus::optimal && err <= 1e-6,
                                                 "x = " + std::to_string(sol.scalars(0))};
                          }));

    SystemConfig c;
    c.n_tx = 4;
    c.n_rx = 4;
    c.n_users = 2;
    std::mt19937_64 geo(seed);
    const ScenarioDraw draw = draw_random_geometry(c, geo);
    const AntennaLayout layout = init_state(c, AOMode::FullMA);

    out.push_back(guarded("sdr recovery",
                          [&]
                          {
                              const auto ch = channel_vectors(layout.user_positions, draw.users,
                                                              layout.tx_positions, c.wavelength);
                              const auto ctx = steering_context(layout.d_t, layout.d_r, c.target_angle, c.wavelength);
                              const auto sdr = solve_beamforming_sdr(ctx, ch, c);
                              bool ok = sdr.recovery_gap <= 1e-4;
                              for (std::size_t k = 0; k < ch.size(); ++k)
                                  ok = ok && sinr(k, sdr.recovered, ch, c.noise_comm) >=
                                                 c.sinr_threshold * (1 - 1e-6);
                              return CheckResult{"sdr recovery", ok, "gap " + sci(sdr.recovery_gap)};
                          }));

    out.push_back(guarded("user surrogate bounds",
                          [&]
                          {
                              std::normal_distribution<double> g;
                              BeamformingMatrix w{Eigen::MatrixXcd(c.n_tx, c.n_users)};
                              for (Eigen::Index i = 0; i < w.columns.size(); ++i)
                                  w.columns(i) = cd(g(rng), g(rng));
                              const double h = c.user_region_half_side;
                              const Position2d centre{0.3 * h, -0.2 * h};
                              int bad = 0;
                              for (std::size_t k = 0; k < 2; ++k)
                              {
                                  const auto &geom = draw.users[k];
                                  const auto s = user_surrogate(centre, k, w, geom, layout.tx_positions, c.wavelength);
                                  for (int i = 0; i < 30; ++i)
                                      for (int j = 0; j < 30; ++j)
                                      {
                                          const Position2d u{-h + 2 * h * i / 29.0, -h + 2 * h * j / 29.0};
                                          const auto ch = channel_vector(u, geom, layout.tx_positions, c.wavelength);
                                          for (std::size_t q = 0; q < 2; ++q)
                                          {
                                              const double v = std::norm(ch.dot(w.columns.col(q)));
                                              const double tol = 1e-9 * (v + s.values_at_center[q]);
                                              if (q == k ? s.signal_lower(u) > v + tol
                                                         : s.interference_upper(q, u) < v - tol)
                                                  ++bad;
                                          }
                                      }
                              }
                              return CheckResult{"user surrogate bounds", bad == 0,
                                                 std::to_string(bad) + " violations on 30x30 grids"};
                          }));

    out.push_back(guarded("ao monotone and certified",
                          [&]
                          {
                              const auto trace = run_algorithm1(c, draw, AOMode::FullMA);
                              bool ok = trace.feasible;
                              for (std::size_t i = 1; ok && i < trace.records.size(); ++i)
                                  ok = trace.records[i].crb <= trace.records[i - 1].crb * (1 + 1e-7);
                              if (ok)
                                  evaluate_final(trace, c, draw);
                              return CheckResult{"ao monotone and certified", ok,
                                                 std::to_string(trace.outer_iterations()) + " iterations"};
                          }));
    return out;
}

} // namespace maisac
