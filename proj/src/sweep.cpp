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

#include "maisac/sweep.hpp"

#include "maisac/errors.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

namespace maisac
{

std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t hash_seed(std::initializer_list<std::uint64_t> parts)
{
    std::uint64_t h = 0;
    for (std::uint64_t p : parts)
        h = mix64(h ^ mix64(p));
    return h;
}

std::uint64_t geometry_seed(std::uint64_t master, int seed_index)
{
    return hash_seed({master, static_cast<std::uint64_t>(seed_index)});
}

std::uint64_t trial_seed(std::uint64_t master, int grid_index, AOMode mode, int seed_index)
{
    return hash_seed({master, static_cast<std::uint64_t>(grid_index), static_cast<std::uint64_t>(mode),
                      static_cast<std::uint64_t>(seed_index)});
}

TrialRow run_trial(const SweepSpec &spec, int grid_index, AOMode mode, int seed_index, bool record_timing)
{
    const auto start = std::chrono::steady_clock::now();
    TrialRow row;
    row.sweep_value = spec.grid.at(static_cast<std::size_t>(grid_index));
    row.mode = to_string(mode);
    row.seed = seed_index;
    row.trial_id = trial_seed(spec.base.rng_seed, grid_index, mode, seed_index);

    const SystemConfig config = apply_sweep_value(spec.base, spec.variable, row.sweep_value);
    try
    {
        std::mt19937_64 rng(geometry_seed(spec.base.rng_seed, seed_index));
        const ScenarioDraw draw = draw_random_geometry(config, rng);
        const AOTrace trace = run_algorithm1(config, draw, mode, spec.ao);
        const FinalSummary fin = evaluate_final(trace, config, draw);
        row.outer_iters = trace.outer_iterations();
        row.feasible = fin.feasible && std::isfinite(fin.crb);
        if (row.feasible)
        {
            row.crb = fin.crb;
            row.crb_db = linear_to_db(fin.crb);
        }
        else
            row.diagnostic = trace.diagnostic.empty() ? "infinite CRB" : trace.diagnostic;
    }
    catch (const ConsistencyError &)
    {
        throw;
    }
    catch (const std::exception &e)
    {
        row.feasible = false;
        row.crb = row.crb_db = kInfiniteCrb;
        row.diagnostic = e.what();
    }
    if (record_timing)
        row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return row;
}

std::vector<TrialRow> run_sweep(const SweepSpec &spec, const SweepOptions &options)
{
    spec.validate();
    struct Task
    {
        int grid;
        AOMode mode;
        int seed;
    };
    std::vector<Task> tasks;
    for (int g = 0; g < static_cast<int>(spec.grid.size()); ++g)
        for (AOMode m : spec.modes)
            for (int s = 0; s < spec.n_seeds; ++s)
                tasks.push_back({g, m, s});

    std::vector<TrialRow> rows(tasks.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_lock;

    auto worker = [&]
    {
        for (;;)
        {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size())
                return;
            try
            {
                rows[i] = run_trial(spec, tasks[i].grid, tasks[i].mode, tasks[i].seed, options.record_timing);
            }
            catch (...)
            {
                std::lock_guard lock(failure_lock);
                if (!failure)
                    failure = std::current_exception();
                next = tasks.size();
            }
        }
    };

    const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(tasks.size())));
    if (jobs == 1)
        worker();
    else
    {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j)
            pool.emplace_back(worker);
        for (auto &t : pool)
            t.join();
    }
    if (failure)
        std::rethrow_exception(failure);
    return rows;
}

std::string format_double(double v)
{
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    if (std::isnan(v))
        return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string format_csv(const std::vector<TrialRow> &rows)
{
    std::string out = "sweep_value,mode,seed,crb,crb_db,outer_iters,feasible,wall_ms\n";
    for (const auto &r : rows)
    {
        out += format_double(r.sweep_value) + ',' + r.mode + ',' + std::to_string(r.seed) + ',' +
               format_double(r.crb) + ',' + format_double(r.crb_db) + ',' + std::to_string(r.outer_iters) + ',' +
               (r.feasible ? "true" : "false") + ',' + format_double(r.wall_ms) + '\n';
    }
    return out;
}

void write_csv(const std::vector<TrialRow> &rows, const std::string &path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error(path + ": cannot open for writing");
    const std::string text = format_csv(rows);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out)
        throw std::runtime_error(path + ": write failed");
}

namespace
{

double percentile(std::vector<double> v, double q)
{
    std::sort(v.begin(), v.end());
    const double pos = q * (v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - lo) * (v[hi] - v[lo]);
}

} // namespace

std::vector<SummaryCell> summarize(const std::vector<TrialRow> &rows, std::uint64_t bootstrap_seed, int resamples)
{
    std::vector<SummaryCell> cells;
    std::vector<std::vector<double>> values;
    for (const auto &r : rows)
    {
        auto it = std::find_if(cells.begin(), cells.end(), [&](const SummaryCell &c)
                               { return c.sweep_value == r.sweep_value && c.mode == r.mode; });
        if (it == cells.end())
        {
            cells.push_back({r.sweep_value, r.mode});
            values.emplace_back();
            it = cells.end() - 1;
        }
        auto &vals = values[static_cast<std::size_t>(it - cells.begin())];
        if (r.feasible && std::isfinite(r.crb_db))
        {
            ++it->n_feasible;
            vals.push_back(r.crb_db);
        }
        else
            ++it->n_infeasible;
    }

    for (std::size_t i = 0; i < cells.size(); ++i)
    {
        auto &c = cells[i];
        const auto &v = values[i];
        if (v.empty())
        {
            c.mean_db = c.median_db = c.ci_lo_db = c.ci_hi_db = kInfiniteCrb;
            continue;
        }
        c.mean_db = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
        c.median_db = percentile(v, 0.5);
        std::mt19937_64 rng(hash_seed({bootstrap_seed, i}));
        std::uniform_int_distribution<std::size_t> pick(0, v.size() - 1);
        std::vector<double> means(static_cast<std::size_t>(resamples));
        for (auto &m : means)
        {
            double s = 0.0;
            for (std::size_t j = 0; j < v.size(); ++j)
                s += v[pick(rng)];
            m = s / v.size();
        }
        c.ci_lo_db = percentile(means, 0.025);
        c.ci_hi_db = percentile(means, 0.975);
    }
    return cells;
}

std::string format_summary(const std::vector<SummaryCell> &cells)
{
    std::ostringstream os;
    os << std::left << std::setw(12) << "value" << std::setw(12) << "mode" << std::right << std::setw(6) << "n"
       << std::setw(8) << "infeas" << std::setw(12) << "mean_dB" << std::setw(12) << "median_dB" << std::setw(24)
       << "95% CI (dB)" << '\n';
    os << std::fixed << std::setprecision(3);
    for (const auto &c : cells)
    {
        os << std::left << std::setw(12) << format_double(c.sweep_value) << std::setw(12) << c.mode << std::right
           << std::setw(6) << c.n_feasible << std::setw(8) << c.n_infeasible;
        if (c.n_feasible == 0)
            os << std::setw(48) << "all trials infeasible" << '\n';
        else
        {
            std::ostringstream ci;
            ci << std::fixed << std::setprecision(3) << '[' << c.ci_lo_db << ", " << c.ci_hi_db << ']';
            os << std::setw(12) << c.mean_db << std::setw(12) << c.median_db << std::setw(24) << ci.str() << '\n';
        }
    }
    return os.str();
}

} // namespace maisac
