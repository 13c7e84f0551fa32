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

#ifndef MAISAC_SWEEP_HPP
#define MAISAC_SWEEP_HPP

#include "maisac/config_io.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace maisac
{

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Order-sensitive hash of a list of integers, seeded by the first one.
std::uint64_t hash_seed(std::initializer_list<std::uint64_t> parts);

/// Geometry seed of seed index s; shared by every grid point and mode.
std::uint64_t geometry_seed(std::uint64_t master, int seed_index);

/// Per-trial identifier: hash(master, grid index, mode, seed index).
std::uint64_t trial_seed(std::uint64_t master, int grid_index, AOMode mode, int seed_index);

struct TrialRow
{
    double sweep_value = 0.0;
    std::string mode;
    int seed = 0;
    double crb = kInfiniteCrb;
    double crb_db = kInfiniteCrb;
    int outer_iters = 0;
    bool feasible = false;
    double wall_ms = 0.0;

    std::uint64_t trial_id = 0;
    std::string diagnostic;
};

struct SweepOptions
{
    int jobs = 1;
    bool record_timing = false; // otherwise wall_ms is written as 0 so reruns are byte-identical
};

/// Runs every (grid value, mode, seed) trial. Rows come back in that order for any job count.
/// Trial failures become infeasible rows; ConsistencyError propagates.
std::vector<TrialRow> run_sweep(const SweepSpec &spec, const SweepOptions &options = {});

/// Runs one trial and certifies it with evaluate_final.
TrialRow run_trial(const SweepSpec &spec, int grid_index, AOMode mode, int seed_index, bool record_timing);

std::string format_double(double v);

std::string format_csv(const std::vector<TrialRow> &rows);

void write_csv(const std::vector<TrialRow> &rows, const std::string &path);

struct SummaryCell
{
    double sweep_value = 0.0;
    std::string mode;
    int n_feasible = 0;
    int n_infeasible = 0;
    double mean_db = 0.0;
    double median_db = 0.0;
    double ci_lo_db = 0.0;
    double ci_hi_db = 0.0;
};

/// Per (grid value, mode) statistics of crb_db over feasible rows, with a 95% percentile bootstrap CI.
std::vector<SummaryCell> summarize(const std::vector<TrialRow> &rows, std::uint64_t bootstrap_seed = 20240601,
                                   int resamples = 1000);

std::string format_summary(const std::vector<SummaryCell> &cells);

} // namespace maisac

#endif
