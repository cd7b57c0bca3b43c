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
#include "harness_internal.hpp"

#include "plcg/mitm.hpp"
#include "plcg/workstation.hpp"

#include <fstream>
#include <set>

namespace plcg::harness {

using nlohmann::json;

namespace {

const std::set<std::string> kOps{"ws",           "rules",         "tick",         "reboot",      "set_mode",
                                 "set_variable", "wait",          "verify_fdi",   "verify_spoof", "snapshot",
                                 "attack_matrix", "ge_case_study", "probe_ac",    "auth_classify", "logic_suite"};

const std::set<std::string> kVerbs{"auth", "read_id", "upload", "download", "read", "write",
                                   "run",  "stop",    "reset",  "set_mode", "monitor"};

std::vector<std::string> names_or_all(const json& a, const std::string& key, const std::vector<std::string>& all)
{
    if (!a.contains(key) || (a[key].is_string() && a[key] == "all"))
        return all;
    return a.at(key).get<std::vector<std::string>>();
}

std::vector<std::string> all_table5_profiles()
{
    std::vector<std::string> out;
    for (const auto& p : wire::load_profile_fixtures())
        out.push_back(p.name);
    return out;
}

std::vector<std::string> all_devices()
{
    std::vector<std::string> out;
    for (const auto& f : plcsim::load_device_fixtures())
        out.push_back(f.name);
    return out;
}

}  // namespace

ScenarioConfig scenario_from_json(const json& j)
{
    ScenarioConfig c;
    try {
        if (!j.is_object())
            throw ConfigError("scenario must be a JSON object");
        c.name = j.value("name", "scenario");
        c.seed = j.value("seed", std::uint64_t{0});
        for (const auto& d : j.value("devices", json::array())) {
            DeviceSpec spec;
            spec.id = d.at("id").get<std::string>();
            const auto& fx = d.at("fixture");
            spec.fixture = fx.is_string() ? plcsim::device_fixture_by_name(fx.get<std::string>())
                                          : plcsim::fixture_from_json(fx);
            if (d.value("bench", false))
                spec.fixture = plcsim::bench_twin(spec.fixture);
            if (d.contains("mode"))
                spec.fixture.initial_mode = d["mode"].get<std::string>();
            spec.via_proxy = d.value("proxy", false);
            c.devices.push_back(std::move(spec));
        }
        for (const auto& a : j.value("actions", json::array()))
            c.actions.push_back(a);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario JSON: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    } catch (const std::out_of_range& e) {
        throw ConfigError(e.what());
    }
    validate(c);
    return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open scenario " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return scenario_from_json(j);
}

void validate(const ScenarioConfig& c)
{
    std::set<std::string> ids;
    for (const auto& d : c.devices) {
        if (d.id.empty() || !ids.insert(d.id).second)
            throw ConfigError("device id '" + d.id + "' is empty or repeated");
        try {
            plcsim::validate(d.fixture);
        } catch (const std::exception& e) {
            throw ConfigError("device " + d.id + ": " + e.what());
        }
    }
    const auto profiles = wire::profile_names();
    const auto devices = plcsim::device_fixture_names();
    for (std::size_t i = 0; i < c.actions.size(); ++i) {
        const auto& a = c.actions[i];
        const auto where = "action " + std::to_string(i);
        if (!a.is_object() || !a.contains("op") || !a["op"].is_string() || !kOps.count(a["op"].get<std::string>()))
            throw ConfigError(where + ": missing or unknown op");
        const auto op = a["op"].get<std::string>();
        if (a.contains("device") && !ids.count(a.value("device", "")))
            throw ConfigError(where + ": unknown device '" + a.value("device", "") + "'");
        const bool needs_device = op == "ws" || op == "rules" || op == "tick" || op == "reboot" || op == "set_mode" ||
                                  op == "set_variable" || op == "wait" || op == "verify_fdi" ||
                                  op == "verify_spoof" || op == "snapshot";
        if (needs_device && !a.contains("device"))
            throw ConfigError(where + ": " + op + " needs a device");
        if (op == "ws" && !kVerbs.count(a.value("verb", "")))
            throw ConfigError(where + ": unknown workstation verb '" + a.value("verb", "") + "'");
        if (op == "rules" || op == "verify_spoof") {
            bool proxied = false;
            for (const auto& d : c.devices)
                proxied = proxied || (d.id == a["device"] && d.via_proxy);
            if (!proxied)
                throw ConfigError(where + ": device " + a["device"].get<std::string>() + " has no proxy");
        }
        if (op == "rules") {
            try {
                mitm::rules_from_json(a.at("rules"));
            } catch (const std::exception& e) {
                throw ConfigError(where + ": " + e.what());
            }
        }
        if (op == "attack_matrix" && a.contains("profiles") && a["profiles"].is_array())
            for (const auto& p : a["profiles"])
                if (!p.is_string() || std::find(profiles.begin(), profiles.end(), p.get<std::string>()) == profiles.end())
                    throw ConfigError(where + ": unknown profile " + p.dump());
        if ((op == "probe_ac" || op == "auth_classify") && a.contains("devices") && a["devices"].is_array())
            for (const auto& d : a["devices"])
                if (!d.is_string() || std::find(devices.begin(), devices.end(), d.get<std::string>()) == devices.end())
                    throw ConfigError(where + ": unknown device fixture " + d.dump());
    }
}

namespace {

logicvm::AppImage app_from_json(const json& j)
{
    if (j.is_object() && j.contains("hex"))
        return logicvm::parse_image(from_hex(j["hex"].get<std::string>()));
    const auto s = j.get<std::string>();
    const auto colon = s.find(':');
    const auto kind = s.substr(0, colon);
    const auto arg = colon == std::string::npos ? std::string() : s.substr(colon + 1);
    if (kind == "benign")
        return logicvm::build_benign_app();
    if (kind == "assign")
        return logicvm::build_assign_app(static_cast<Value>(std::stoul(arg)));
    if (kind == "deadloop")
        return logicvm::build_deadloop_app(arg == "guarded");
    if (kind == "illegal")
        return logicvm::build_illegal_app(logicvm::build_benign_app());
    if (kind == "backdoor")
        return logicvm::build_backdoor_app(logicvm::build_benign_app(), logicvm::Endpoint::parse(arg));
    throw ConfigError("unknown app '" + s + "'");
}

struct Node {
    std::unique_ptr<plcsim::Device> device;
    std::unique_ptr<net::DeviceServer> server;
    std::unique_ptr<mitm::Proxy> proxy;
    net::Server& front() { return proxy ? static_cast<net::Server&>(*proxy) : *server; }
};

class Runner {
public:
    Runner(const ScenarioConfig& c, Report& r) : config_(c), report_(r), network_(c.seed)
    {
        for (const auto& d : c.devices) {
            Node n;
            n.device = std::make_unique<plcsim::Device>(d.fixture);
            n.server = std::make_unique<net::DeviceServer>(*n.device);
            if (d.via_proxy)
                n.proxy = std::make_unique<mitm::Proxy>(*n.server, "mitm:" + d.id);
            nodes_.emplace(d.id, std::move(n));
        }
    }


    void run()
    {
        std::size_t i = 0;
        for (const auto& a : config_.actions)
            step(a, i++);
        if (!network_.capture().empty())
            report_.captures["scripted"] = network_.capture();
    }

private:
    ws::Session& session(const std::string& device, const std::string& name)
    {
        auto key = device + "/" + name;
        auto it = sessions_.find(key);
        if (it == sessions_.end()) {
            auto& n = nodes_.at(device);
            it = sessions_.emplace(key, ws::Session(n.device->profile(), network_.connect(n.front(), "ws:" + name)))
                     .first;
        }
        return it->second;
    }

    void log(const std::string& line) { report_.log.push_back(line); }

    void step(const json& a, std::size_t index)
    {
        const auto op = a.at("op").get<std::string>();
        const auto seed = config_.seed;
        if (op == "attack_matrix")
            return run_attack_matrix(report_, names_or_all(a, "profiles", all_table5_profiles()), seed);
        if (op == "ge_case_study")
            return run_ge_case_study(report_, seed);
        if (op == "probe_ac")
            return run_probe_ac(report_, names_or_all(a, "devices", all_devices()), seed);
        if (op == "auth_classify")
            return run_auth_classification(report_, names_or_all(a, "devices", all_devices()), seed);
        if (op == "logic_suite")
            return run_logic_suite(report_, seed);

        const auto id = a.at("device").get<std::string>();
        auto& node = nodes_.at(id);
        auto& dev = *node.device;
        const auto tag = "[" + std::to_string(index) + "] " + id + " ";

        if (op == "ws")
            return workstation(a, id, tag);
        if (op == "rules") {
            node.proxy->set_rules(mitm::rules_from_json(a["rules"]));
            return log(tag + "rules set: " + std::to_string(node.proxy->rules().size()));
        }
        if (op == "tick") {
            for (int i = 0; i < a.value("count", 1); ++i)
                dev.tick();
            return;
        }
        if (op == "reboot") {
            dev.reboot();
            return log(tag + "rebooted, " + plcsim::to_string(dev.state().run_state));
        }
        if (op == "set_mode")
            return dev.set_mode(a.at("mode").get<std::string>());
        if (op == "set_variable")
            return dev.set_variable(a.at("var").get<std::string>(), a.at("value").get<Value>());
        if (op == "snapshot") {
            report_.snapshots[a.value("name", slug(id) + "-" + std::to_string(index))] = dev.snapshot();
            return;
        }
        if (op == "wait") {
            const auto var = a.at("var").get<std::string>();
            const auto want = a.at("equals").get<Value>();
            const int limit = a.value("max_ticks", 1000);
            for (int i = 0; i <= limit; ++i) {
                if (dev.variable(var) == want)
                    return;
                if (!dev.responsive() || dev.state().run_state != plcsim::RunState::Running)
                    break;
                dev.tick();
            }
            throw ScenarioDeadlock(tag + "waiting for " + var + " = " + std::to_string(want) + " cannot proceed (" +
                                   plcsim::to_string(dev.state().run_state) + ")");
        }
        if (op == "verify_fdi") {
            const auto var = a.at("var").get<std::string>();
            const auto fake = a.at("fake").get<Value>();
            auto v = mitm::verify_fdi(dev, var, fake);
            const auto snap = "scripted-" + std::to_string(index);
            report_.snapshots[snap] = dev.snapshot();
            report_.verdicts.push_back({"scripted/" + std::to_string(index) + "/fdi", "fdi", id, v.success, v.note,
                                        {{"type", "fdi"}, {"snapshot", snap}, {"var", var}, {"fake", fake}}});
            return;
        }
        if (op == "verify_spoof") {
            const auto var = a.at("var").get<std::string>();
            const auto fake = a.at("fake").get<Value>();
            auto& s = session(id, a.value("session", "operator"));
            const auto from = network_.capture().size();
            std::vector<Value> readings;
            std::string note;
            try {
                for (const auto& r : ws::monitor_loop(s, {var}, a.value("cycles", std::size_t{3})))
                    readings.insert(readings.end(), r.values.begin(), r.values.end());
            } catch (const ws::WsError& e) {
                note = std::string(e.what()) + "; ";
            }
            auto v = mitm::verify_spoof(readings, dev.variable(var).value_or(0), fake);
            const auto name = "scripted-" + std::to_string(index);
            const auto& all = network_.capture();
            report_.captures[name] = wire::CaptureSet(all.begin() + static_cast<std::ptrdiff_t>(from), all.end());
            report_.snapshots[name] = dev.snapshot();
            auto sigs = json::array();
            for (const auto& r : node.proxy->rules())
                if (r.direction == Direction::PlcToWorkstation)
                    sigs.push_back(diff::to_json(r.signature));
            report_.verdicts.push_back({"scripted/" + std::to_string(index) + "/spoof", "spoof", id, v.success,
                                        note + v.note,
                                        {{"type", "spoof"},
                                         {"capture", name},
                                         {"profile", dev.profile().name},
                                         {"signatures", sigs},
                                         {"fake", fake},
                                         {"snapshot", name},
                                         {"var", var}}});
            return;
        }
    }

    void workstation(const json& a, const std::string& id, const std::string& tag)
    {
        auto& s = session(id, a.value("session", "operator"));
        const auto verb = a.at("verb").get<std::string>();
        std::string result;
        try {
            ws::Response r;
            if (verb == "auth") {
                ws::authenticate(s, a.at("password").get<std::string>());
                result = "authenticated";
            } else if (verb == "monitor") {
                auto readings = ws::monitor_loop(s, a.at("vars").get<std::vector<std::string>>(),
                                                 a.value("cycles", std::size_t{1}));
                for (const auto& rd : readings) {
                    result += rd.var + "=";
                    for (auto v : rd.values)
                        result += std::to_string(v) + " ";
                }
            } else {
                if (verb == "read_id")
                    r = ws::read_id(s);
                else if (verb == "upload")
                    r = ws::upload(s);
                else if (verb == "download")
                    r = ws::download(s, app_from_json(a.at("app")), a.value("flash", false));
                else if (verb == "read")
                    r = ws::read_var(s, a.at("var").get<std::string>());
                else if (verb == "write")
                    r = ws::write_var(s, a.at("var").get<std::string>(), a.at("value").get<Value>());
                else if (verb == "run")
                    r = ws::run(s);
                else if (verb == "stop")
                    r = ws::stop(s);
                else if (verb == "reset")
                    r = ws::reset(s);
                else if (verb == "set_mode")
                    r = ws::set_mode(s, a.at("mode").get<std::string>());
                result = wire::to_string(r.status);
                if (r.executed() && !r.messages.empty() && r.first().value && (verb == "read" || verb == "write"))
                    result += " value=" + std::to_string(*r.first().value);
            }
        } catch (const ws::WsError& e) {
            result = std::string("error: ") + e.what();
        }
        log(tag + verb + ": " + result);
    }

    const ScenarioConfig& config_;
    Report& report_;
    net::Network network_;
    std::map<std::string, Node> nodes_;
    std::map<std::string, ws::Session> sessions_;
};

}  // namespace

Report run_scenario(const ScenarioConfig& config)
{
    validate(config);
    Report report;
    report.scenario = config.name;
    report.seed = config.seed;
    try {
        Runner(config, report).run();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario action: ") + e.what());
    }
    return report;
}

}  // namespace plcg::harness
