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

namespace plcg::plcsim {

using nlohmann::json;

json fixture_to_json(const DeviceFixture& f)
{
    json caps = json::array();
    for (const auto& [key, req] : f.capabilities.entries())
        caps.push_back({{"mode", key.first}, {"manipulation", to_string(key.second)}, {"requirement", to_string(req)}});
    json vars = json::array();
    for (const auto& v : f.variables)
        vars.push_back({{"name", v.name}, {"initial", v.initial}, {"public", v.is_public}, {"read_only", v.read_only}});
    const auto& s = f.supervision;
    return {
        {"name", f.name},
        {"profile", f.profile},
        {"auth_override", f.auth_override ? json(wire::to_string(*f.auth_override)) : json()},
        {"identity", f.identity},
        {"password", f.password ? json(*f.password) : json()},
        {"modes", f.modes},
        {"initial_mode", f.initial_mode},
        {"capabilities", caps},
        {"read_only_modes", f.read_only_modes},
        {"variables", vars},
        {"scratch_variable", f.scratch_variable},
        {"supervision",
         {{"whitelist", s.whitelist_enabled},
          {"load_validation", logicvm::to_string(s.load_validation)},
          {"watchdog_limit", s.watchdog_limit},
          {"watchdog_reaction", logicvm::to_string(s.watchdog_reaction)},
          {"illegal_reaction", logicvm::to_string(s.illegal_reaction)}}},
        {"flash_size", f.flash_size},
        {"flash_app_hex", f.flash_app ? json(to_hex(logicvm::serialize(*f.flash_app))) : json()},
    };
}

DeviceFixture fixture_from_json(const json& j)
{
    DeviceFixture f;
    try {
        f.name = j.at("name").get<std::string>();
        f.profile = j.at("profile").get<std::string>();
        if (j.contains("auth_override") && !j["auth_override"].is_null())
            f.auth_override = wire::auth_model_from_string(j["auth_override"].get<std::string>());
        f.identity = j.value("identity", f.name);
        if (j.contains("password") && !j["password"].is_null())
            f.password = j["password"].get<std::string>();
        f.modes = j.at("modes").get<std::vector<std::string>>();
        f.initial_mode = j.value("initial_mode", f.modes.empty() ? std::string() : f.modes.front());
        for (const auto& c : j.at("capabilities"))
            f.capabilities.set(c.at("mode").get<std::string>(),
                               manipulation_from_string(c.at("manipulation").get<std::string>()),
                               requirement_from_string(c.at("requirement").get<std::string>()));
        if (j.contains("read_only_modes"))
            for (const auto& m : j["read_only_modes"])
                f.read_only_modes.insert(m.get<std::string>());
        for (const auto& v : j.at("variables"))
            f.variables.push_back({v.at("name").get<std::string>(), v.value("initial", Value{0}),
                                   v.value("public", true), v.value("read_only", false)});
        f.scratch_variable = j.value("scratch_variable", f.scratch_variable);
        if (j.contains("supervision")) {
            const auto& s = j["supervision"];
            f.supervision.whitelist_enabled = s.value("whitelist", false);
            f.supervision.load_validation = logicvm::load_validation_from_string(s.value("load_validation", "None"));
            f.supervision.watchdog_limit = s.value("watchdog_limit", f.supervision.watchdog_limit);
            f.supervision.watchdog_reaction =
                logicvm::watchdog_reaction_from_string(s.value("watchdog_reaction", "HaltApp"));
            f.supervision.illegal_reaction =
                logicvm::illegal_reaction_from_string(s.value("illegal_reaction", "Fault"));
        }
        f.flash_size = j.value("flash_size", f.flash_size);
        if (j.contains("flash_app_hex") && !j["flash_app_hex"].is_null())
            f.flash_app = logicvm::parse_image(from_hex(j["flash_app_hex"].get<std::string>()));
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("device fixture JSON: ") + e.what());
    } catch (const logicvm::VmError& e) {
        throw std::invalid_argument(std::string("device fixture JSON: flash app: ") + e.what());
    }
    validate(f);
    return f;
}

}  // namespace plcg::plcsim
