/* Copyright 2026 The plc-gauntlet Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License. */
#include "plcg/plcsim.hpp"

#include <algorithm>

namespace plcg::plcsim {

namespace {

using R = Requirement;
using logicvm::IllegalReaction;
using logicvm::LoadValidation;
using logicvm::WatchdogReaction;

constexpr R O = R::Open;
constexpr R A = R::AuthRequired;
constexpr R D = R::Denied;
constexpr R N = R::NotSupported;

struct ModeRow {
    const char* mode;
    std::array<R, 5> cells;  // ReadId, Upload, R/W vars, Run/Stop, Download
};

struct DeviceRow {
    const char* name;
    const char* profile;
    std::vector<ModeRow> modes;
    IllegalReaction illegal = IllegalReaction::Fault;
    WatchdogReaction watchdog = WatchdogReaction::HaltApp;
    LoadValidation load = LoadValidation::None;
    std::optional<wire::AuthModel> auth_override;
    std::vector<std::string> read_only_modes;
    bool private_tags = false;
};

constexpr auto Crash = IllegalReaction::Crash;
constexpr auto Halt = WatchdogReaction::HaltApp;

const std::vector<DeviceRow>& rows()
{
    static const std::vector<DeviceRow> table = {
        {"cpu317_like", "s7comm_like", {{"W protection", {O, O, O, O, A}}, {"R/W protection", {O, D, O, O, D}}}},
        {"cpu1217_like", "s7commplus_like",
         {{"R Access", {O, O, D, O, D}}, {"HMI Access", {O, D, D, D, D}}, {"No Access", {O, D, D, D, D}}}},
        {"cpu1511_like", "s7commplus_like",
         {{"R Access", {O, O, D, O, D}}, {"HMI Access", {O, D, D, D, D}}, {"No Access", {O, D, D, D, D}}}},
        {"micrologix1100_like", "pcccplus_like", {{"RUN password", {O, A, A, A, D}}}},
        {"controllogix_like", "pccc_like", {{"RUN", {O, O, O, N, D}}}, IllegalReaction::Fault, Halt,
         LoadValidation::None, std::nullopt, {}, true},
        {"rx3i_like", "ge_srtp_like",
         {{"Level Three", {O, O, O, O, O}}, {"Level Two", {O, O, O, D, D}}, {"Level One", {O, O, O, D, D}}}, Crash,
         WatchdogReaction::Dos, LoadValidation::None, std::nullopt, {"Level Two", "Level One"}},
        {"mp3008_like", "tristation_like", {{"RUN password", {O, A, A, A, D}}}, IllegalReaction::Fault, Halt,
         LoadValidation::Static},
        {"lk207_like", "hollysys_like", {{"RUN", {O, O, O, D, D}}}, Crash, WatchdogReaction::Reboot},
        {"lk210_like", "hollysys_like", {{"RUN", {O, O, O, D, D}}}, Crash, WatchdogReaction::Reboot},
        {"fm802_like", "hollysys_like", {{"default", {O, O, O, O, O}}}, Crash, WatchdogReaction::Reboot,
         LoadValidation::None, wire::AuthModel::NoPassword},
        {"pfc200_like", "wago_like", {{"password", {O, D, D, D, D}}}, Crash},
        {"m340_like", "m340_like", {{"password", {O, A, A, A, A}}}, Crash},
        {"m580_like", "m580_like", {{"password", {O, A, A, A, A}}}, Crash},
        {"na300_like", "na300_like", {{"password", {O, A, A, A, A}}}, Crash, WatchdogReaction::Dos},
        {"na400_like", "na400_like", {{"password", {O, A, A, A, A}}}, Crash},
        {"pm573_like", "abb_like", {{"password", {O, D, D, D, D}}}, Crash},
        {"r08cpu_like", "melsoft_like", {{"password", {O, A, A, A, A}}}},
        {"cs1h_like", "fins_like", {{"password", {O, D, O, O, O}}}},
        {"t16s0p_like", "haiwell_like", {{"password", {O, A, A, A, A}}}, IllegalReaction::Fault, Halt,
         LoadValidation::Static},
    };
    return table;
}

std::vector<VariableSpec> default_variables()
{
    return {{"scratch", 0, true, false}, {"setpoint", 100, true, false}};
}

void fill_modes(DeviceFixture& f, const std::vector<ModeRow>& modes)
{
    for (const auto& row : modes) {
        f.modes.emplace_back(row.mode);
        for (std::size_t i = 0; i < kProbedManipulations.size(); ++i)
            f.capabilities.set(row.mode, kProbedManipulations[i], row.cells[i]);
        f.capabilities.set(row.mode, Manipulation::ModeChange, A);
    }
    f.initial_mode = f.modes.front();
}

DeviceFixture build(const DeviceRow& r)
{
    DeviceFixture f;
    f.name = r.name;
    f.profile = r.profile;
    f.auth_override = r.auth_override;
    f.identity = std::string(r.name) + " (" + r.profile + ") fw 1.0";
    // a NoPassword device still has a password the workstation may send; it is ignored
    f.password = std::string("pw-") + r.name;
    fill_modes(f, r.modes);
    f.read_only_modes.insert(r.read_only_modes.begin(), r.read_only_modes.end());
    f.variables = default_variables();
    if (r.private_tags)
        f.variables.push_back({"recipe", 42, false, false});
    f.supervision.illegal_reaction = r.illegal;
    f.supervision.watchdog_reaction = r.watchdog;
    f.supervision.load_validation = r.load;
    validate(f);
    return f;
}

DeviceFixture hardened()
{
    DeviceFixture f;
    f.name = "hardened_like";
    f.profile = "s7commplus_like";
    f.identity = "hardened_like (s7commplus_like) fw 1.0";
    f.password = "pw-hardened_like";
    fill_modes(f, {{"protected", {O, A, A, A, A}}});
    f.variables = default_variables();
    f.supervision.whitelist_enabled = true;
    f.supervision.load_validation = LoadValidation::Static;
    validate(f);
    return f;
}

}  // namespace

void validate(const DeviceFixture& f)
{
    auto fail = [&](const std::string& why) {
        throw std::invalid_argument("device fixture '" + f.name + "': " + why);
    };
    if (f.name.empty())
        fail("empty name");
    auto profiles = wire::profile_names();
    if (std::find(profiles.begin(), profiles.end(), f.profile) == profiles.end())
        fail("unknown profile " + f.profile);
    if (f.modes.empty())
        fail("no modes");
    if (std::find(f.modes.begin(), f.modes.end(), f.initial_mode) == f.modes.end())
        fail("initial mode '" + f.initial_mode + "' not in mode list");
    if (!f.capabilities.complete_for(f.modes))
        fail("capability matrix misses a (mode, manipulation) pair");
    for (const auto& [key, req] : f.capabilities.entries())
        if (std::find(f.modes.begin(), f.modes.end(), key.first) == f.modes.end())
            fail("capability entry for unknown mode '" + key.first + "'");
    for (const auto& m : f.read_only_modes)
        if (std::find(f.modes.begin(), f.modes.end(), m) == f.modes.end())
            fail("read-only mode '" + m + "' not in mode list");
    std::set<std::string> names;
    std::set<std::uint16_t> ids;
    for (const auto& v : f.variables) {
        if (!names.insert(v.name).second)
            fail("duplicate variable " + v.name);
        if (!ids.insert(wire::variable_id(v.name)).second)
            fail("variable id collision on " + v.name);
    }
    if (!names.count(f.scratch_variable))
        fail("scratch variable '" + f.scratch_variable + "' not declared");
    if (f.supervision.watchdog_limit == 0)
        fail("watchdog_limit must be positive");
    auto model = f.auth_override.value_or(wire::profile_by_name(f.profile).auth_model);
    if (model != wire::AuthModel::NoPassword && !f.password)
        fail("auth model " + to_string(model) + " needs a password");
}

wire::ProtocolProfile effective_profile(const DeviceFixture& f)
{
    auto p = wire::profile_by_name(f.profile);
    if (f.auth_override)
        p.auth_model = *f.auth_override;
    return p;
}

std::vector<DeviceFixture> load_device_fixtures()
{
    std::vector<DeviceFixture> out;
    for (const auto& r : rows())
        out.push_back(build(r));
    return out;
}

DeviceFixture device_fixture_by_name(std::string_view name)
{
    constexpr std::string_view bench = "bench:";
    if (name.substr(0, bench.size()) == bench)
        return make_bench_fixture(std::string(name.substr(bench.size())));
    if (name == "hardened_like")
        return hardened();
    for (const auto& r : rows())
        if (name == r.name)
            return build(r);
    throw std::invalid_argument("unknown device fixture: " + std::string(name));
}

std::vector<std::string> device_fixture_names()
{
    std::vector<std::string> out;
    for (const auto& r : rows())
        out.emplace_back(r.name);
    out.emplace_back("hardened_like");
    return out;
}

DeviceFixture bench_twin(const DeviceFixture& f)
{
    DeviceFixture t = f;
    t.name = f.name + "/bench";
    t.modes = {"bench"};
    t.initial_mode = "bench";
    t.capabilities = {};
    for (auto m : kProbedManipulations)
        t.capabilities.set("bench", m, Requirement::Open);
    t.capabilities.set("bench", Manipulation::ModeChange, Requirement::Open);
    t.read_only_modes.clear();
    for (auto& v : t.variables) {
        v.is_public = true;
        v.read_only = false;
    }
    validate(t);
    return t;
}

DeviceFixture make_bench_fixture(const std::string& profile)
{
    DeviceFixture f;
    f.name = "bench:" + profile;
    f.profile = profile;
    f.identity = profile + " bench unit";
    f.password = "pw-bench";
    f.variables = default_variables();
    fill_modes(f, {{"bench", {O, O, O, O, O}}});
    f.capabilities.set("bench", Manipulation::ModeChange, Requirement::Open);
    validate(f);
    return f;
}

}  // namespace plcg::plcsim
