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

#ifndef MAISAC_CONFIG_IO_HPP
#define MAISAC_CONFIG_IO_HPP

#include "maisac/ao.hpp"
#include "maisac/model.hpp"

#include <string>
#include <vector>

namespace maisac
{

enum class SweepVariable
{
    power_dbm,
    sinr_db,
    region_wavelengths,
};

std::string to_string(SweepVariable v);

/// Accepts "power", "sinr", "region" and the full names.
SweepVariable parse_sweep_variable(const std::string &name);

/// Nine evenly spaced points covering the usual range of each variable.
std::vector<double> default_grid(SweepVariable v);

struct SweepSpec
{
    SweepVariable variable = SweepVariable::power_dbm;
    std::vector<double> grid = default_grid(SweepVariable::power_dbm);
    std::vector<AOMode> modes{AOMode::FullMA, AOMode::FPA, AOMode::BsMaOnly, AOMode::UserMaOnly};
    int n_seeds = 20;
    AOOptions ao;
    SystemConfig base;

    void validate() const;
};

/// Copy of base with only the swept field replaced.
SystemConfig apply_sweep_value(const SystemConfig &base, SweepVariable v, double value);

struct LoadedConfig
{
    SystemConfig config;
    SweepSpec sweep;
};

/// Parses a JSON document; `source` names it in diagnostics. Throws InvalidConfig.
LoadedConfig parse_config(const std::string &text, const std::string &source = "<config>");

LoadedConfig load_config(const std::string &path);

} // namespace maisac

#endif
