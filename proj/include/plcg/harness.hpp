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
#pragma once

#include "plcg/acprobe.hpp"
#include "plcg/capture.hpp"
#include "plcg/diffanalysis.hpp"
#include "plcg/plcsim.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

/// Scenario orchestration and reporting.
namespace plcg::harness {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A scripted wait that can never be satisfied.
class ScenarioDeadlock : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DeviceSpec {
    std::string id;
    plcsim::DeviceFixture fixture;
    bool via_proxy = false;
};

struct ScenarioConfig {
    std::string name = "scenario";
    std::uint64_t seed = 0;
    std::vector<DeviceSpec> devices;
    std::vector<nlohmann::json> actions;
};

/// Throws ConfigError. Fixtures are named or inline objects.
ScenarioConfig scenario_from_json(const nlohmann::json& j);
ScenarioConfig load_scenario(const std::filesystem::path& path);
void validate(const ScenarioConfig& config);

/// One claim in a report. `check` is the recipe verify_report follows to
/// re-derive `success` from the saved captures and snapshots.
struct Verdict {
    std::string id;
    std::string kind;  // lp, sniff, fdi, spoof, probe, auth, transmission, logic
    std::string subject;
    bool success = false;
    std::string detail;
    nlohmann::json check;
};

struct LpRow {
    std::string profile;
    diff::CandidateSet command;
    diff::CandidateSet response;
    bool sniff = false;
    bool spoof = false;
    bool fdi = false;
    bool transparent = false;  // empty-rule proxy relayed identical bytes
};

struct AuthRow {
    std::string device;
    acprobe::AuthVerdict verdict = acprobe::AuthVerdict::SecureProcess;
    acprobe::PasswordTransmission transmission = acprobe::PasswordTransmission::NotFound;
};

struct LogicRow {
    std::string case_name;
    std::string device;
    std::string outcome;
    std::string run_state;
    bool success = false;
};

struct Report {
    std::string scenario;
    std::uint64_t seed = 0;
    std::vector<Verdict> verdicts;
    std::vector<LpRow> lp_rows;
    std::vector<acprobe::ProbeMatrix> probe_matrices;
    std::vector<AuthRow> auth_rows;
    std::vector<LogicRow> logic_rows;
    std::vector<std::string> log;
    std::map<std::string, wire::CaptureSet> captures;
    std::map<std::string, nlohmann::json> snapshots;

    const Verdict* find(const std::string& id) const;
    /// "a/b" success counts per verdict kind.
    std::map<std::string, std::string> summary() const;
};

/// Identical (config, seed) gives an identical report.
Report run_scenario(const ScenarioConfig& config);

// The experiments behind the bundled scenarios; each appends to `report`.
void run_attack_matrix(Report& report, const std::vector<std::string>& profiles, std::uint64_t seed);
void run_ge_case_study(Report& report, std::uint64_t seed);
void run_probe_ac(Report& report, const std::vector<std::string>& devices, std::uint64_t seed);
void run_auth_classification(Report& report, const std::vector<std::string>& devices, std::uint64_t seed);
void run_logic_suite(Report& report, std::uint64_t seed);

/// Probes used to learn field positions.
inline const std::vector<Value> kProbeValues{0x1234, 0x3456, 0x5678};
inline constexpr Value kCaseStudyConstant = 305419896;

/// Captures and snapshots are referenced as "captures/<name>.jsonl" and "snapshots/<name>.json".
nlohmann::json report_to_json(const Report& report);

enum class ReportFormat { Table, Json };
std::string render_report(const Report& report, ReportFormat format);

/// Writes report.json, captures/ and snapshots/ under `dir`.
void write_report(const Report& report, const std::filesystem::path& dir);

struct VerifyResult {
    std::size_t checked = 0;
    std::vector<std::string> mismatches;
    bool ok() const { return mismatches.empty(); }
};

/// Re-derives every success verdict of a written report from its files alone.
VerifyResult verify_report(const std::filesystem::path& dir);

/// The published report schema, and a validator for the subset of JSON
/// Schema it uses (type, required, properties, items, enum, additionalProperties).
nlohmann::json report_schema();
std::vector<std::string> validate_schema(const nlohmann::json& instance, const nlohmann::json& schema);

}  // namespace plcg::harness
