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

#ifndef MAISAC_SELFCHECK_HPP
#define MAISAC_SELFCHECK_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace maisac
{

struct CheckResult
{
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Quick invariant and oracle checks on small random instances.
std::vector<CheckResult> run_selfcheck(std::uint64_t seed = 7);

} // namespace maisac

#endif
