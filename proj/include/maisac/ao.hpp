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

#ifndef MAISAC_AO_HPP
#define MAISAC_AO_HPP

#include "maisac/crb.hpp"
#include "maisac/model.hpp"

#include <string>
#include <vector>

namespace maisac
{

enum class AOMode
{
    FullMA,
    FPA,
    BsMaOnly,
    UserMaOnly,
};

std::string to_string(AOMode mode);

/// Accepts the names produced by to_string; throws InvalidConfig otherwise.
AOMode parse_mode(const std::string &name);

bool moves_receive_array(AOMode mode);
bool moves_users(AOMode mode);

struct AOOptions
{
    double eps1 = 1e-3;
    int max_outer = 30;
};

struct ConstraintAudit
{
    double power = 0.0;
    std::vector<double> sinr;
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
};

/// Power, SINR, receive spacing/segment and user-region checks on one state.
ConstraintAudit audit_state(const AntennaLayout &layout, const BeamformingMatrix &w, const ScenarioDraw &draw,
                            const SystemConfig &config);

struct AORecord
{
    int iteration = 0;
    double crb = 0.0;
    double t_value = 0.0;
    Eigen::VectorXd d_r;
    std::vector<Position2d> users;
    BeamformingMatrix w;
    std::string w_status;
    std::string d_r_status;
    std::string u_status;
    double wall_ms = 0.0;
    ConstraintAudit audit;
    bool converged = false;
};

struct AOTrace
{
    AOMode mode = AOMode::FullMA;
    AntennaLayout initial;
    std::vector<AORecord> records;
    bool feasible = true;
    std::string diagnostic;

    bool converged() const { return !records.empty() && records.back().converged; }
    int outer_iterations() const { return static_cast<int>(records.size()); }
    double final_crb() const;
};

AntennaLayout init_state(const SystemConfig &config, AOMode mode);

/// Alternates W, d_r and user positions until the relative CRB decrease drops below eps1.
AOTrace run_algorithm1(const SystemConfig &config, const ScenarioDraw &draw, AOMode mode,
                       const AOOptions &options = {});

struct FinalSummary
{
    bool feasible = false;
    double crb = kInfiniteCrb;
    double crb_general = kInfiniteCrb;
    double crb_expanded = kInfiniteCrb;
    std::vector<double> sinr;
    double power = 0.0;
};

/// Recomputes the last record from scratch; throws ConsistencyError on any disagreement.
FinalSummary evaluate_final(const AOTrace &trace, const SystemConfig &config, const ScenarioDraw &draw);

} // namespace maisac

#endif
