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

// plc-gauntlet: command line front end.
//
// Exit codes: 0 ok, 1 runtime failure, 2 bad configuration, 3 report evidence mismatch.

#include "plcg/acprobe.hpp"
#include "plcg/diffanalysis.hpp"
#include "plcg/harness.hpp"
#include "plcg/mitm.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

using namespace plcg;
using nlohmann::json;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitMismatch = 3;

json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw harness::ConfigError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw harness::ConfigError(path + ": " + e.what());
    }
}

harness::ReportFormat parse_format(const std::string& f)
{
    return f == "json" ? harness::ReportFormat::Json : harness::ReportFormat::Table;
}

// "verb[:arg]" -> a scenario ws action. write takes "var=value", monitor "v1,v2".
json step_from_text(const std::string& text, std::size_t cycles)
{
    const auto colon = text.find(':');
    const auto verb = text.substr(0, colon);
    const auto arg = colon == std::string::npos ? std::string() : text.substr(colon + 1);
    json a{{"op", "ws"}, {"device", "plc"}, {"verb", verb}};
    if (verb == "auth") {
        a["password"] = arg;
    } else if (verb == "download") {
        a["app"] = arg.empty() ? "benign" : arg;
    } else if (verb == "read") {
        a["var"] = arg;
    } else if (verb == "write") {
        const auto eq = arg.find('=');
        if (eq == std::string::npos)
            throw harness::ConfigError("write needs var=value, got '" + arg + "'");
        a["var"] = arg.substr(0, eq);
        a["value"] = std::stoul(arg.substr(eq + 1), nullptr, 0);
    } else if (verb == "set_mode") {
        a["mode"] = arg;
    } else if (verb == "monitor") {
        std::vector<std::string> vars;
        std::stringstream ss(arg);
        for (std::string v; std::getline(ss, v, ',');)
            vars.push_back(v);
        a["vars"] = vars;
        a["cycles"] = cycles;
    }
    return a;
}

harness::Report run_session(const std::string& device, const std::vector<std::string>& steps, std::size_t cycles,
                            std::uint64_t seed, const json* rules)
{
    json scenario{{"name", "cli"},
                  {"seed", seed},
                  {"devices", {{{"id", "plc"}, {"fixture", device}, {"proxy", rules != nullptr}}}},
                  {"actions", json::array()}};
    if (rules)
        scenario["actions"].push_back({{"op", "rules"}, {"device", "plc"}, {"rules", *rules}});
    for (const auto& s : steps)
        scenario["actions"].push_back(step_from_text(s, cycles));
    scenario["actions"].push_back({{"op", "snapshot"}, {"device", "plc"}, {"name", "final"}});
    return harness::run_scenario(harness::scenario_from_json(scenario));
}

void print_log(const harness::Report& r)
{
    for (const auto& line : r.log)
        std::cout << line << "\n";
}

void tee_to(const std::string& path, const harness::Report& r)
{
    if (path.empty())
        return;
    auto it = r.captures.find("scripted");
    harness::write_capture(path, it == r.captures.end() ? wire::CaptureSet{} : it->second);
}

json analyze_captures(const std::vector<std::string>& files, const std::vector<Value>& probes,
                      const std::vector<std::string>& encodings, const std::string& direction)
{
    diff::ProbeCaptures per;
    for (std::size_t i = 0; i < files.size(); ++i) {
        auto cap = harness::read_capture(files[i]);
        if (i < probes.size()) {
            per[probes[i]] = cap;
        } else {
            for (auto& [x, c] : diff::split_by_tag(cap))
                per[x].insert(per[x].end(), c.begin(), c.end());
        }
    }
    if (direction != "both") {
        const auto d = direction == "p2w" ? Direction::PlcToWorkstation : Direction::WorkstationToPlc;
        for (auto& [x, c] : per)
            c = wire::filter_direction(c, d);
    }
    diff::DifferentialPlan plan;
    plan.probes.clear();
    for (const auto& [x, _] : per)
        plan.probes.push_back(x);
    if (!encodings.empty()) {
        plan.encodings.clear();
        for (const auto& e : encodings)
            plan.encodings.push_back(encoding_from_string(e));
    }
    auto result = diff::analyze(plan, per);
    auto out = diff::to_json(result);
    out["signature"] = nullptr;
    if (result.candidates.size() == 1) {
        try {
            out["signature"] = diff::to_json(diff::extract_signature(per, *result.candidates.begin()));
        } catch (const diff::DiffError& e) {
            out["signature_error"] = e.what();
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"plc-gauntlet: PLC protocol and access control test bench"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir, format = "table", device, tee, rule_path;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> steps, files, encodings, devices;
    std::vector<Value> probes;
    std::string direction = "w2p";
    std::size_t cycles = 1;

    auto add_scenario = [&](CLI::App* c) {
        c->add_option("--scenario", scenario_path, "scenario JSON file")->required()->check(CLI::ExistingFile);
        c->add_option("--seed", seed, "override the scenario seed");
        c->add_option("--out", out_dir, "directory for report.json, captures and snapshots");
    };

    auto* simulate = app.add_subcommand("simulate", "run a scenario and print its summary");
    add_scenario(simulate);

    auto* report = app.add_subcommand("report", "run a scenario and render the full report");
    add_scenario(report);
    report->add_option("--format", format, "table or json")->check(CLI::IsMember({"table", "json"}));

    auto* verify = app.add_subcommand("verify-report", "re-derive every success verdict of a written report");
    verify->add_option("--out", out_dir, "report directory")->required()->check(CLI::ExistingDirectory);

    auto* wscmd = app.add_subcommand("ws", "drive one simulated device as the engineering workstation");
    wscmd->add_option("--device", device, "device fixture name")->required();
    wscmd->add_option("steps", steps,
                      "auth:PW read_id upload download[:APP] read:VAR write:VAR=N run stop reset set_mode:M "
                      "monitor:V1,V2");
    wscmd->add_option("--cycles", cycles, "monitor cycles");
    wscmd->add_option("--tee", tee, "write the traffic to a JSONL capture");
    wscmd->add_option("--seed", seed);

    auto* mitmcmd = app.add_subcommand("mitm", "drive a device through the rewriting proxy");
    mitmcmd->add_option("--device", device, "device fixture name")->required();
    mitmcmd->add_option("--rule", rule_path, "JSON list of rewrite rules")->required()->check(CLI::ExistingFile);
    mitmcmd->add_option("steps", steps, "workstation steps, as for ws");
    mitmcmd->add_option("--cycles", cycles, "monitor cycles");
    mitmcmd->add_option("--tee", tee, "write the sniffed traffic to a JSONL capture");
    mitmcmd->add_option("--seed", seed);

    auto* analyzecmd = app.add_subcommand("analyze", "differential analysis over JSONL captures");
    analyzecmd->add_option("captures", files, "capture files")->required()->check(CLI::ExistingFile);
    analyzecmd->add_option("--probe", probes, "probe value of each untagged file, in order");
    analyzecmd->add_option("--encoding", encodings, "value encodings such as 2be, 4le");
    analyzecmd->add_option("--direction", direction, "w2p, p2w or both")->check(CLI::IsMember({"w2p", "p2w", "both"}));

    auto* probecmd = app.add_subcommand("probe-ac", "probe the access control of device fixtures");
    probecmd->add_option("--device", devices, "device fixture names (default: all)");
    probecmd->add_option("--format", format, "table or json")->check(CLI::IsMember({"table", "json"}));
    probecmd->add_option("--seed", seed);

    auto* schemacmd = app.add_subcommand("schema", "print the report JSON schema");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed() || report->parsed()) {
            auto config = harness::load_scenario(scenario_path);
            if (seed)
                config.seed = *seed;
            auto r = harness::run_scenario(config);
            if (!out_dir.empty())
                harness::write_report(r, out_dir);
            if (report->parsed()) {
                std::cout << harness::render_report(r, parse_format(format));
            } else {
                std::cout << "scenario " << r.scenario << " seed " << r.seed << "\n";
                for (const auto& [kind, count] : r.summary())
                    std::cout << kind << ": " << count << "\n";
            }
            return 0;
        }
        if (verify->parsed()) {
            auto v = harness::verify_report(out_dir);
            for (const auto& m : v.mismatches)
                std::cout << "MISMATCH " << m << "\n";
            std::cout << "checked " << v.checked << " success verdicts, " << v.mismatches.size() << " mismatches\n";
            return v.ok() ? 0 : kExitMismatch;
        }
        if (wscmd->parsed() || mitmcmd->parsed()) {
            json rules;
            if (mitmcmd->parsed())
                rules = read_json_file(rule_path);
            auto r = run_session(device, steps, cycles, seed.value_or(0), mitmcmd->parsed() ? &rules : nullptr);
            print_log(r);
            tee_to(tee, r);
            return 0;
        }
        if (analyzecmd->parsed()) {
            std::cout << analyze_captures(files, probes, encodings, direction).dump(2) << "\n";
            return 0;
        }
        if (probecmd->parsed()) {
            if (devices.empty())
                devices = plcsim::device_fixture_names();
            auto matrices = json::array();
            for (const auto& name : devices) {
                plcsim::DeviceFixture f;
                try {
                    f = plcsim::device_fixture_by_name(name);
                } catch (const std::exception& e) {
                    throw harness::ConfigError(e.what());
                }
                acprobe::ProbeTarget target(f, seed.value_or(0));
                auto m = acprobe::probe_capabilities(
                    target, f.modes, {plcsim::kProbedManipulations.begin(), plcsim::kProbedManipulations.end()});
                if (format == "json")
                    matrices.push_back(acprobe::to_json(m));
                else
                    std::cout << acprobe::render_table(m);
            }
            if (format == "json")
                std::cout << matrices.dump(2) << "\n";
            return 0;
        }
        if (schemacmd->parsed()) {
            std::cout << harness::report_schema().dump(2) << "\n";
            return 0;
        }
    } catch (const harness::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return 0;
}
