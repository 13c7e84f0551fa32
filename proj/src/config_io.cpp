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

#include "maisac/config_io.hpp"

#include "maisac/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace maisac
{

using nlohmann::json;

std::string to_string(SweepVariable v)
{
    switch (v)
    {
    case SweepVariable::power_dbm:
        return "power_dbm";
    case SweepVariable::sinr_db:
        return "sinr_db";
    case SweepVariable::region_wavelengths:
        return "region_wavelengths";
    }
    return "unknown";
}

SweepVariable parse_sweep_variable(const std::string &name)
{
    if (name == "power" || name == "power_dbm")
        return SweepVariable::power_dbm;
    if (name == "sinr" || name == "sinr_db")
        return SweepVariable::sinr_db;
    if (name == "region" || name == "region_wavelengths")
        return SweepVariable::region_wavelengths;
    throw InvalidConfig("unknown sweep variable '" + name + "' (expected power, sinr or region)");
}

std::vector<double> default_grid(SweepVariable v)
{
    double lo = 20.0, step = 2.5;
    if (v == SweepVariable::sinr_db)
        lo = 5.0, step = 1.25;
    else if (v == SweepVariable::region_wavelengths)
        lo = 2.0, step = 0.75;
    std::vector<double> g;
    for (int i = 0; i < 9; ++i)
        g.push_back(lo + step * i);
    return g;
}

void SweepSpec::validate() const
{
    std::vector<std::string> bad;
    if (grid.empty())
        bad.emplace_back("sweep.grid must not be empty");
    for (std::size_t i = 0; i < grid.size(); ++i)
    {
        if (!std::isfinite(grid[i]))
            bad.emplace_back("sweep.grid values must be finite");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            bad.emplace_back("sweep.grid must be strictly increasing");
    }
    if (modes.empty())
        bad.emplace_back("sweep.modes must not be empty");
    if (n_seeds < 1)
        bad.emplace_back("sweep.n_seeds must be >= 1");
    if (!(ao.eps1 > 0.0))
        bad.emplace_back("sweep.eps1 must be > 0");
    if (ao.max_outer < 1)
        bad.emplace_back("sweep.max_outer must be >= 1");
    if (!bad.empty())
    {
        std::string msg = "invalid sweep:";
        for (const auto &b : bad)
            msg += "\n  " + b;
        throw InvalidConfig(msg);
    }
    for (double v : grid)
        apply_sweep_value(base, variable, v).validate();
}

SystemConfig apply_sweep_value(const SystemConfig &base, SweepVariable v, double value)
{
    SystemConfig c = base;
    switch (v)
    {
    case SweepVariable::power_dbm:
        c.power_budget = dbm_to_watts(value);
        break;
    case SweepVariable::sinr_db:
        c.sinr_threshold = db_to_linear(value);
        break;
    case SweepVariable::region_wavelengths:
        c.d_max = value * base.wavelength;
        break;
    }
    return c;
}

namespace
{

std::string position_of(const std::string &text, std::size_t byte)
{
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i)
    {
        if (text[i] == '\n')
        {
            ++line;
            col = 1;
        }
        else
            ++col;
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

class Reader
{
public:
    Reader(const json &obj, std::string prefix, std::vector<std::string> &errors)
        : obj_(obj), prefix_(std::move(prefix)), errors_(errors)
    {
    }

    void number(const char *key, const std::function<void(double)> &set)
    {
        seen_.insert(key);
        const auto it = obj_.find(key);
        if (it == obj_.end())
            return;
        if (!it->is_number())
            fail(key, "expected a number");
        else
            set(it->get<double>());
    }

    void integer(const char *key, const std::function<void(long long)> &set)
    {
        seen_.insert(key);
        const auto it = obj_.find(key);
        if (it == obj_.end())
            return;
        if (!it->is_number_integer())
            fail(key, "expected an integer");
        else
            set(it->get<long long>());
    }

    const json *raw(const char *key)
    {
        seen_.insert(key);
        const auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    void fail(const std::string &key, const std::string &msg) { errors_.push_back(prefix_ + key + ": " + msg); }

    void reject_unknown()
    {
        for (auto it = obj_.begin(); it != obj_.end(); ++it)
            if (!seen_.count(it.key()))
                errors_.push_back(prefix_ + it.key() + ": unknown field");
    }

private:
    const json &obj_;
    std::string prefix_;
    std::vector<std::string> &errors_;
    std::set<std::string> seen_;
};

int to_count(long long v) { return v > 1'000'000 || v < -1'000'000 ? -1 : static_cast<int>(v); }

} // namespace

LoadedConfig parse_config(const std::string &text, const std::string &source)
{
    json doc;
    try
    {
        doc = json::parse(text);
    }
    catch (const json::parse_error &e)
    {
        std::string what = e.what();
        const auto pos = what.find("error while parsing");
        throw InvalidConfig(source + ": parse error at " + position_of(text, e.byte == 0 ? 0 : e.byte - 1) + ": " +
                            (pos == std::string::npos ? what : what.substr(pos)));
    }
    if (!doc.is_object())
        throw InvalidConfig(source + ": top level must be a JSON object");

    std::vector<std::string> errors;
    Reader r(doc, "", errors);

    double lambda = 0.05;
    r.number("wavelength_m", [&](double v) { lambda = v; });
    if (!(lambda > 0.0) || !std::isfinite(lambda))
    {
        r.fail("wavelength_m", "must be > 0");
        lambda = 0.05;
    }

    LoadedConfig out;
    SystemConfig &c = out.config;
    c = SystemConfig::with_wavelength(lambda);

    auto positive_count = [&](const char *key, int &field)
    {
        r.integer(key,
                  [&, key](long long v)
                  {
                      if (v < 1 || to_count(v) < 1)
                          r.fail(key, "must be a positive integer");
                      else
                          field = static_cast<int>(v);
                  });
    };
    positive_count("n_tx", c.n_tx);
    positive_count("n_rx", c.n_rx);
    positive_count("n_users", c.n_users);
    positive_count("frame_len", c.frame_len);
    positive_count("n_tx_paths", c.n_tx_paths);
    positive_count("n_rx_paths", c.n_rx_paths);

    auto positive = [&](const char *key, const std::function<void(double)> &set)
    {
        r.number(key,
                 [&, key](double v)
                 {
                     if (!(v > 0.0) || !std::isfinite(v))
                         r.fail(key, "must be > 0");
                     else
                         set(v);
                 });
    };

    r.number("power_dbm", [&](double v) { c.power_budget = dbm_to_watts(v); });
    if (doc.contains("power_dbm") && doc.contains("power_w"))
        r.fail("power_w", "give either power_dbm or power_w, not both");
    positive("power_w", [&](double v) { c.power_budget = v; });
    r.number("sinr_db", [&](double v) { c.sinr_threshold = db_to_linear(v); });
    r.number("noise_comm_dbm", [&](double v) { c.noise_comm = dbm_to_watts(v); });
    r.number("noise_radar_dbm", [&](double v) { c.noise_radar = dbm_to_watts(v); });
    positive("d_min_wavelengths", [&](double v) { c.d_min = v * lambda; });
    positive("d_max_wavelengths", [&](double v) { c.d_max = v * lambda; });
    positive("region_half_side_wavelengths", [&](double v) { c.user_region_half_side = v * lambda; });
    r.number("target_angle_deg",
             [&](double v)
             {
                 if (!(std::abs(v) < 90.0))
                     r.fail("target_angle_deg", "must lie strictly between -90 and 90");
                 else
                     c.target_angle = v * kPi / 180.0;
             });
    positive("target_distance_m", [&](double v) { c.target_distance = v; });
    r.number("reflect_gain_db", [&](double v) { c.reflect_gain = db_to_linear(v); });
    r.number("ref_gain_1m_db", [&](double v) { c.ref_gain_1m = db_to_linear(v); });
    positive("pathloss_exp", [&](double v) { c.pathloss_exp = v; });

    if (const json *range = r.raw("user_dist_range_m"))
    {
        if (!range->is_array() || range->size() != 2 || !(*range)[0].is_number() || !(*range)[1].is_number())
            r.fail("user_dist_range_m", "expected [min, max] in metres");
        else
        {
            c.user_dist_min = (*range)[0].get<double>();
            c.user_dist_max = (*range)[1].get<double>();
        }
    }

    if (const json *seed = r.raw("seed"))
    {
        if (!seed->is_number_unsigned())
            r.fail("seed", "expected a non-negative integer");
        else
            c.rng_seed = seed->get<std::uint64_t>();
    }

    SweepSpec &s = out.sweep;
    bool grid_given = false;
    if (const json *sw = r.raw("sweep"))
    {
        if (!sw->is_object())
            r.fail("sweep", "expected an object");
        else
        {
            Reader q(*sw, "sweep.", errors);
            if (const json *v = q.raw("variable"))
            {
                if (!v->is_string())
                    q.fail("variable", "expected a string");
                else
                    try
                    {
                        s.variable = parse_sweep_variable(v->get<std::string>());
                    }
                    catch (const InvalidConfig &e)
                    {
                        q.fail("variable", e.what());
                    }
            }
            if (const json *g = q.raw("grid"))
            {
                grid_given = true;
                s.grid.clear();
                if (!g->is_array())
                    q.fail("grid", "expected an array of numbers");
                else
                    for (const auto &x : *g)
                    {
                        if (!x.is_number())
                        {
                            q.fail("grid", "expected an array of numbers");
                            break;
                        }
                        s.grid.push_back(x.get<double>());
                    }
            }
            if (const json *m = q.raw("modes"))
            {
                s.modes.clear();
                if (!m->is_array())
                    q.fail("modes", "expected an array of mode names");
                else
                    for (const auto &x : *m)
                    {
                        try
                        {
                            if (!x.is_string())
                                throw InvalidConfig("expected a mode name");
                            s.modes.push_back(parse_mode(x.get<std::string>()));
                        }
                        catch (const InvalidConfig &e)
                        {
                            q.fail("modes", e.what());
                        }
                    }
            }
            q.integer("n_seeds",
                      [&](long long v)
                      {
                          if (v < 1 || to_count(v) < 1)
                              q.fail("n_seeds", "must be a positive integer");
                          else
                              s.n_seeds = static_cast<int>(v);
                      });
            q.number("eps1",
                     [&](double v)
                     {
                         if (!(v > 0.0))
                             q.fail("eps1", "must be > 0");
                         else
                             s.ao.eps1 = v;
                     });
            q.integer("max_outer",
                      [&](long long v)
                      {
                          if (v < 1 || to_count(v) < 1)
                              q.fail("max_outer", "must be a positive integer");
                          else
                              s.ao.max_outer = static_cast<int>(v);
                      });
            q.reject_unknown();
        }
    }
    if (!grid_given)
        s.grid = default_grid(s.variable);
    r.reject_unknown();

    if (errors.empty())
    {
        try
        {
            c.validate();
        }
        catch (const InvalidConfig &e)
        {
            errors.emplace_back(e.what());
        }
    }
    if (!errors.empty())
    {
        std::string msg = source + ": schema violation";
        for (const auto &e : errors)
            msg += "\n  " + e;
        throw InvalidConfig(msg);
    }

    s.base = c;
    s.validate();
    return out;
}

LoadedConfig load_config(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InvalidConfig(path + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

} // namespace maisac
