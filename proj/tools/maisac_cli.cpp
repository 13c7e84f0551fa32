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
#include "maisac/config_io.hpp"
#include "maisac/errors.hpp"
#include "maisac/selfcheck.hpp"
#include "maisac/sweep.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

using namespace maisac;

namespace
{

std::vector<AOMode> parse_modes(const std::string &csv)
{
    std::vector<AOMode> modes;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            modes.push_back(parse_mode(item));
    if (modes.empty())
        throw InvalidConfig("--modes: empty list");
    return modes;
}

LoadedConfig load_or_default(const std::string &path)
{
    return path.empty() ? parse_config("{}", "<defaults>") : load_config(path);
}

int cmd_run(const std::string &config_path, const std::string &sweep, const std::string &modes, int seeds,
            const std::string &out, int jobs, const std::vector<double> &grid, bool timing, bool quiet)
{
    LoadedConfig loaded = load_or_default(config_path);
    SweepSpec spec = loaded.sweep;
    if (!sweep.empty())
    {
        const SweepVariable v = parse_sweep_variable(sweep);
        if (v != spec.variable)
            spec.grid = default_grid(v);
        spec.variable = v;
    }
    if (!grid.empty())
        spec.grid = grid;
    if (!modes.empty())
        spec.modes = parse_modes(modes);
    if (seeds > 0)
        spec.n_seeds = seeds;
    spec.validate();

    const auto rows = run_sweep(spec, {jobs, timing});
    write_csv(rows, out);
    if (!quiet)
        std::cout << "sweep " << to_string(spec.variable) << ": " << rows.size() << " trials -> " << out << "\n\n"
                  << format_summary(summarize(rows));
    return 0;
}

int cmd_check()
{
    bool all = true;
    for (const auto &r : run_selfcheck())
    {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
        all = all && r.passed;
    }
    return all ? 0 : 2;
}

int cmd_crb_eval(const std::string &config_path, const std::string &mode_name, int seed_index)
{
    const LoadedConfig loaded = load_or_default(config_path);
    const SystemConfig &c = loaded.config;
    const AOMode mode = parse_mode(mode_name);
    std::mt19937_64 rng(geometry_seed(c.rng_seed, seed_index));
    const ScenarioDraw draw = draw_random_geometry(c, rng);
    const AOTrace trace = run_algorithm1(c, draw, mode, loaded.sweep.ao);
    if (!trace.feasible)
    {
        std::cout << "infeasible: " << trace.diagnostic << '\n';
        return 0;
    }
    const FinalSummary fin = evaluate_final(trace, c, draw);
    std::cout << "mode " << to_string(mode) << ", seed " << seed_index << '\n';
    for (const auto &r : trace.records)
        std::cout << "  iter " << r.iteration << "  crb " << format_double(r.crb) << "  W " << r.w_status
                  << "  d_r " << r.d_r_status << "  u " << r.u_status << '\n';
    std::cout << "crb (general)  " << format_double(fin.crb_general) << '\n'
              << "crb (expanded) " << format_double(fin.crb_expanded) << '\n'
              << "crb_db         " << format_double(linear_to_db(fin.crb)) << '\n'
              << "power W        " << format_double(fin.power) << '\n';
    for (std::size_t k = 0; k < fin.sinr.size(); ++k)
        std::cout << "sinr_db[" << k << "]     " << format_double(linear_to_db(fin.sinr[k])) << '\n';
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Movable-antenna ISAC beamforming and CRB sweeps"};
    app.require_subcommand(1);

    std::string config_path, sweep, modes, out = "sweep.csv", mode = "FullMA";
    int seeds = 0, jobs = 1, seed_index = 0;
    std::vector<double> grid;
    bool timing = false, quiet = false;

    auto *run = app.add_subcommand("run", "run a parameter sweep and write CSV");
    run->add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    run->add_option("--sweep", sweep, "power | sinr | region");
    run->add_option("--modes", modes, "comma list of FullMA,FPA,BsMaOnly,UserMaOnly");
    run->add_option("--seeds", seeds, "seeds per grid point")->check(CLI::PositiveNumber);
    run->add_option("--out", out, "output CSV path");
    run->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    run->add_option("--grid", grid, "explicit grid values")->delimiter(',');
    run->add_flag("--timing", timing, "record wall-clock time per trial in the CSV");
    run->add_flag("--quiet", quiet, "do not print the summary table");

    auto *check = app.add_subcommand("check", "run the built-in invariant and oracle checks");

    auto *eval = app.add_subcommand("crb-eval", "run one trial and print its CRB trace");
    eval->add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    eval->add_option("--mode", mode, "AO mode");
    eval->add_option("--seed-index", seed_index, "geometry seed index");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try
    {
        if (*run)
            return cmd_run(config_path, sweep, modes, seeds, out, jobs, grid, timing, quiet);
        if (*check)
            return cmd_check();
        if (*eval)
            return cmd_crb_eval(config_path, mode, seed_index);
    }
    catch (const InvalidConfig &e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    }
    catch (const ConsistencyError &e)
    {
        std::cerr << "consistency error: " << e.what() << '\n';
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
