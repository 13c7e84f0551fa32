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

#ifndef MAISAC_ERRORS_HPP
#define MAISAC_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace maisac
{

/// Scenario parameters that violate their documented invariants.
class InvalidConfig : public std::invalid_argument
{
public:
    explicit InvalidConfig(const std::string &what) : std::invalid_argument(what) {}
};

/// Numerically degenerate input (zero covariance, empty block, ...).
class DegenerateInput : public std::domain_error
{
public:
    explicit DegenerateInput(const std::string &what) : std::domain_error(what) {}
};

/// The per-user SINR targets cannot be met jointly under the power budget.
class InfeasibleSinr : public std::runtime_error
{
public:
    InfeasibleSinr(const std::string &what, std::vector<double> shortfall_db)
        : std::runtime_error(what), shortfall_db_(std::move(shortfall_db))
    {
    }

    /// Per user: required SINR minus the single-user (full power MRT) SINR, in dB.
    /// Positive entries mark users that cannot be served even alone.
    const std::vector<double> &shortfall_db() const { return shortfall_db_; }

private:
    std::vector<double> shortfall_db_;
};

/// A conic solve ended without an optimal certificate.
class SolverFailure : public std::runtime_error
{
public:
    explicit SolverFailure(const std::string &what) : std::runtime_error(what) {}
};

/// Recomputed quantities disagree with a recorded trace.
class ConsistencyError : public std::logic_error
{
public:
    explicit ConsistencyError(const std::string &what) : std::logic_error(what) {}
};

} // namespace maisac

#endif
