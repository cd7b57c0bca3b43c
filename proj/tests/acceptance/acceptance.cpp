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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "plcg/harness.hpp"
#include "plcg/mitm.hpp"
#include "plcg/workstation.hpp"
#include "synthetic.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>

using namespace plcg;
using plcsim::Manipulation;

namespace {

using Clock = std::chrono::steady_clock;
using Pairs = std::set<std::pair<std::size_t, std::size_t>>;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Collects the reasons a criterion fails; an empty list is a pass.
struct Check {
    std::vector<std::string> problems;
    std::string measured;

    void expect(bool ok, const std::string& what)
    {
        if (!ok)
            problems.push_back(what);
    }
};

std::string show(const Pairs& p)
{
    std::ostringstream o;
    o << "{";
    for (auto it = p.begin(); it != p.end(); ++it)
        o << (it == p.begin() ? "" : ",") << "(" << it->first << "," << it->second << ")";
    o << "}";
    return o.str();
}

std::string join(const std::set<std::string>& s)
{
    std::string out;
    for (const auto& x : s)
        out += (out.empty() ? "" : ",") + x;
    return "{" + out + "}";
}

constexpr std::uint64_t kSeed = 7;

// Command and response (length, position) per protocol fixture.
const std::map<std::string, std::pair<Pairs, Pairs>> kLpTable{
    {"ge_srtp_like", {{{76, 74}}, {{56, 44}}}},
    {"m241_like", {{{96, 94}}, {{272, 270}}}},
    {"m258_like", {{{124, 82}}, {{176, 58}}}},
    {"m340_like", {{{46, 37}}, {{22, 13}}}},
    {"m580_like", {{{46, 37}}, {{22, 13}}}},
    {"melsoft_like", {{{89, 85}}, {{93, 85}}}},
    {"fins_like", {{{20, 18}}, {{17, 15}}}},
    {"s7comm_like", {{{71, 69}}, {{55, 53}, {79, 77}}}},
    {"s7commplus_like", {{{153, 124}}, {{225, 185}}}},
    {"pccc_like", {{{71, 69}}, {{70, 62}}}},
    {"pcccplus_like", {{{99, 71}}, {{433, 96}}}},
    {"wago_like", {{{42, 40}}, {{79, 73}}}},
    {"abb_like", {{{24, 22}}, {{19, 17}}}},
    {"haiwell_like", {{{12, 10}}, {{12, 10}}}},
    {"na300_like", {{{16, 12}}, {{16, 12}, {571, 297}}}},
    {"na400_like", {{{16, 12}}, {{16, 12}, {639, 357}}}},
    {"tristation_like", {{{30, 24}}, {{42, 24}}}},
    {"hollysys_like", {{{24, 22}}, {{19, 17}}}},
};

const std::set<std::string> kIntegrityProtected{"s7commplus_like", "pcccplus_like"};

std::vector<std::string> table_profiles()
{
    std::vector<std::string> out;
    for (const auto& [name, _] : kLpTable)
        out.push_back(name);
    return out;
}

// Glyph rows: ReadId, UploadApp, ReadWriteVars, RunStop, DownloadApp.
// A trailing note after ':' is the cell annotation.
using Row = std::array<std::string, 5>;
const std::map<std::string, std::vector<std::pair<std::string, Row>>> kCapabilityTable{
    {"cpu317_like", {{"W protection", {"✓", "✓", "✓", "✓", "⊘"}}, {"R/W protection", {"✓", "⊗", "✓", "✓", "⊗"}}}},
    {"cpu1217_like",
     {{"R Access", {"✓", "✓", "⊗", "✓", "⊗"}},
      {"HMI Access", {"✓", "⊗", "⊗", "⊗", "⊗"}},
      {"No Access", {"✓", "⊗", "⊗", "⊗", "⊗"}}}},
    {"cpu1511_like",
     {{"R Access", {"✓", "✓", "⊗", "✓", "⊗"}},
      {"HMI Access", {"✓", "⊗", "⊗", "⊗", "⊗"}},
      {"No Access", {"✓", "⊗", "⊗", "⊗", "⊗"}}}},
    {"micrologix1100_like", {{"RUN password", {"✓", "⊘", "⊘", "⊘", "⊗"}}}},
    {"controllogix_like", {{"RUN", {"✓", "✓", "✓:public tags", "N/A", "⊗"}}}},
    {"rx3i_like",
     {{"Level Three", {"✓", "✓", "✓", "✓", "✓"}},
      {"Level Two", {"✓", "✓", "✓:read only", "⊗", "⊗"}},
      {"Level One", {"✓", "✓", "✓:read only", "⊗", "⊗"}}}},
    {"mp3008_like", {{"RUN password", {"✓", "⊘", "⊘", "⊘", "⊗"}}}},
    {"lk207_like", {{"RUN", {"✓", "✓", "✓", "⊗", "⊗"}}}},
    {"lk210_like", {{"RUN", {"✓", "✓", "✓", "⊗", "⊗"}}}},
    {"fm802_like", {{"default", {"✓", "✓", "✓", "✓", "✓"}}}},
    {"pfc200_like", {{"password", {"✓", "⊗", "⊗", "⊗", "⊗"}}}},
    {"m340_like", {{"password", {"✓", "⊘", "⊘", "⊘", "⊘"}}}},
    {"m580_like", {{"password", {"✓", "⊘", "⊘", "⊘", "⊘"}}}},
    {"na300_like", {{"password", {"✓", "⊘", "⊘", "⊘", "⊘"}}}},
    {"na400_like", {{"password", {"✓", "⊘", "⊘", "⊘", "⊘"}}}},
    {"pm573_like", {{"password", {"✓", "⊗", "⊗", "⊗", "⊗"}}}},
    {"r08cpu_like", {{"password", {"✓", "⊘", "⊘", "⊘", "⊘"}}}},
    {"cs1h_like", {{"password", {"✓", "⊗", "✓", "✓", "✓"}}}},
    {"t16s0p_like", {{"password", {"✓", "⊘", "⊘", "⊘", "⊘"}}}},
};

const std::set<std::string> kClientSideGroup{"micrologix1100_like", "mp3008_like", "m340_like", "m580_like",
                                             "na300_like",          "na400_like",  "t16s0p_like"};
// Devices with no bypassable authentication, plus the hardened fixture.
const std::set<std::string> kSecureGroup{"rx3i_like",  "pfc200_like", "lk207_like",   "lk210_like",
                                         "pm573_like", "cs1h_like",   "hardened_like"};
const std::map<std::string, acprobe::PasswordTransmission> kTransmission{
    {"cpu317_like", acprobe::PasswordTransmission::Plaintext},
    {"micrologix1100_like", acprobe::PasswordTransmission::Plaintext},
    {"m340_like", acprobe::PasswordTransmission::Hashed},
    {"m580_like", acprobe::PasswordTransmission::Hashed},
    {"rx3i_like", acprobe::PasswordTransmission::Plaintext},
    {"pfc200_like", acprobe::PasswordTransmission::Plaintext},
    {"na300_like", acprobe::PasswordTransmission::Hashed},
    {"na400_like", acprobe::PasswordTransmission::Hashed},
    {"lk207_like", acprobe::PasswordTransmission::Plaintext},
    {"lk210_like", acprobe::PasswordTransmission::Plaintext},
    {"fm802_like", acprobe::PasswordTransmission::Plaintext},
    {"mp3008_like", acprobe::PasswordTransmission::Plaintext},
    {"pm573_like", acprobe::PasswordTransmission::Plaintext},
    {"r08cpu_like", acprobe::PasswordTransmission::Plaintext},
    {"cs1h_like", acprobe::PasswordTransmission::Plaintext},
    {"t16s0p_like", acprobe::PasswordTransmission::Hashed},
};

// ---------------------------------------------------------------------------

Check ac1_lp_recovery(harness::Report& matrix)
{
    Check c;
    const auto t0 = Clock::now();
    harness::run_attack_matrix(matrix, table_profiles(), kSeed);
    const double dt = seconds_since(t0);
    c.measured = std::to_string(dt) + " s";
    c.expect(dt < 10.0, "runtime " + c.measured + " >= 10 s");

    std::set<std::string> fixtures;
    for (const auto& p : wire::load_profile_fixtures())
        fixtures.insert(p.name);
    std::set<std::string> expected;
    for (const auto& [name, _] : kLpTable)
        expected.insert(name);
    c.expect(fixtures == expected, "protocol fixtures " + join(fixtures) + " differ from the table");

    c.expect(matrix.lp_rows.size() == kLpTable.size(), "rows " + std::to_string(matrix.lp_rows.size()));
    for (const auto& row : matrix.lp_rows) {
        auto it = kLpTable.find(row.profile);
        if (it == kLpTable.end()) {
            c.expect(false, "unexpected row " + row.profile);
            continue;
        }
        const auto cmd = diff::lp_pairs(row.command), rsp = diff::lp_pairs(row.response);
        c.expect(cmd == it->second.first, row.profile + " command " + show(cmd) + " != " + show(it->second.first));
        c.expect(rsp == it->second.second, row.profile + " response " + show(rsp) + " != " + show(it->second.second));
    }
    return c;
}

Check ac2_attack_matrix(const harness::Report& matrix)
{
    Check c;
    std::set<std::string> all, sniff, fdi, spoof;
    for (const auto& row : matrix.lp_rows) {
        all.insert(row.profile);
        if (row.sniff)
            sniff.insert(row.profile);
        if (row.fdi)
            fdi.insert(row.profile);
        if (row.spoof)
            spoof.insert(row.profile);
    }
    std::set<std::string> unprotected;
    for (const auto& [name, _] : kLpTable)
        if (!kIntegrityProtected.count(name))
            unprotected.insert(name);
    c.expect(all.size() == 18, "profiles " + std::to_string(all.size()));
    c.expect(sniff == all, "sniff " + join(sniff));
    c.expect(fdi == unprotected, "fdi " + join(fdi));
    c.expect(spoof == unprotected, "spoof " + join(spoof));
    // the report flags must agree with the verdicts the report carries
    for (const auto& row : matrix.lp_rows) {
        for (const auto& [kind, flag] :
             {std::pair{"sniff", row.sniff}, std::pair{"fdi", row.fdi}, std::pair{"spoof", row.spoof}}) {
            const auto* v = matrix.find(std::string(kind) + "/" + row.profile);
            c.expect(v && v->success == flag, std::string(kind) + "/" + row.profile + " verdict disagrees");
        }
    }
    c.measured = "sniff " + std::to_string(sniff.size()) + "/18, fdi " + std::to_string(fdi.size()) + "/18, spoof " +
                 std::to_string(spoof.size()) + "/18";
    return c;
}

Check ac3_ge_case_study()
{
    Check c;
    auto r = harness::run_scenario(harness::load_scenario(PLCG_SOURCE_DIR "/scenarios/ge-case-study.json"));
    const auto* fdi = r.find("ge/stage1-fdi");
    const auto* spoof = r.find("ge/stage2-spoof");
    c.expect(fdi && fdi->success, "stage1 fdi verdict");
    c.expect(spoof && spoof->success, "stage2 spoof verdict");
    if (!fdi || !spoof)
        return c;

    const auto dword = [&](const std::string& snap) -> nlohmann::json {
        auto it = r.snapshots.find(snap);
        return it == r.snapshots.end() ? nlohmann::json() : it->second["variables"].value("DWORD", nlohmann::json());
    };
    c.expect(dword("ge-stage1") == 0, "stage1 device DWORD " + dword("ge-stage1").dump());
    c.expect(dword("ge-stage2") == 0, "stage2 device DWORD " + dword("ge-stage2").dump());

    // what the download carried, read back from the tee with the learned signature
    const auto sig1 = diff::signature_from_json(fdi->check["signature"]);
    const auto carried =
        mitm::sniff(wire::filter_direction(r.captures.at(fdi->check["tee"]), Direction::WorkstationToPlc), sig1);
    c.expect(carried == std::vector<Value>{harness::kCaseStudyConstant},
             "download carried " + nlohmann::json(carried).dump());

    // what the workstation was shown
    std::vector<Value> shown;
    for (const auto& s : spoof->check["signatures"]) {
        auto v = mitm::sniff(wire::filter_direction(r.captures.at(spoof->check["capture"]), Direction::PlcToWorkstation),
                             diff::signature_from_json(s));
        shown.insert(shown.end(), v.begin(), v.end());
    }
    c.expect(!shown.empty() && std::all_of(shown.begin(), shown.end(),
                                           [](Value v) { return v == harness::kCaseStudyConstant; }),
             "workstation saw " + nlohmann::json(shown).dump());
    c.measured = "device DWORD=" + dword("ge-stage2").dump() + ", carried " + nlohmann::json(carried).dump() +
                 ", shown " + nlohmann::json(shown).dump();
    return c;
}

bool contains(const Bytes& hay, const Bytes& needle)
{
    return !needle.empty() && std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

Check ac4_capability_table()
{
    Check c;
    const auto names = plcsim::device_fixture_names();
    std::size_t rows = 0, cells = 0;
    for (const auto& [device, expected_rows] : kCapabilityTable) {
        const auto f = plcsim::device_fixture_by_name(device);
        acprobe::ProbeTarget target(f, kSeed);
        const auto m = acprobe::probe_capabilities(
            target, f.modes, {plcsim::kProbedManipulations.begin(), plcsim::kProbedManipulations.end()});
        c.expect(m.modes.size() == expected_rows.size(), device + " mode count");
        const std::string password = f.password.value_or("");
        const Bytes plain(password.begin(), password.end());
        const Bytes digest = password.empty() ? Bytes{} : wire::password_digest(password);
        for (const auto& [mode, row] : expected_rows) {
            ++rows;
            for (std::size_t k = 0; k < row.size(); ++k) {
                const auto manip = plcsim::kProbedManipulations[k];
                const auto label = device + "/" + mode + "/" + plcsim::to_string(manip);
                if (!m.cells.count({mode, manip})) {
                    c.expect(false, label + " not probed");
                    continue;
                }
                ++cells;
                const auto& cell = m.at(mode, manip);
                const auto colon = row[k].find(':');
                const auto want_glyph = row[k].substr(0, colon);
                const auto want_note = colon == std::string::npos ? std::string() : row[k].substr(colon + 1);
                c.expect(acprobe::glyph(cell.verdict) == want_glyph,
                         label + " " + acprobe::glyph(cell.verdict) + " != " + want_glyph);
                c.expect(cell.note == want_note, label + " note '" + cell.note + "' != '" + want_note + "'");
                if (cell.verdict == acprobe::Observed::Bypassed)
                    c.expect(cell.method == "client_patch" || cell.method == "replay",
                             label + " bypassed via '" + cell.method + "'");
                // the attacker never sends the password, in clear or hashed
                for (const auto& rec : cell.traffic) {
                    if (rec.direction != Direction::WorkstationToPlc || rec.src.rfind("attacker", 0) != 0)
                        continue;
                    c.expect(!contains(rec.payload, plain) && !contains(rec.payload, digest),
                             label + " attacker frame carries the password");
                }
            }
        }
    }
    c.expect(rows == 26, "rows " + std::to_string(rows));
    std::set<std::string> covered;
    for (const auto& [d, _] : kCapabilityTable)
        covered.insert(d);
    for (const auto& n : names)
        c.expect(covered.count(n) || n == "hardened_like", n + " has no table row");
    c.measured = std::to_string(rows) + " rows, " + std::to_string(cells) + " cells";
    return c;
}

Check ac5_auth_classification()
{
    Check c;
    auto devices = plcsim::device_fixture_names();
    harness::Report r;
    harness::run_auth_classification(r, devices, kSeed);
    std::set<std::string> client_side, secure;
    std::map<std::string, acprobe::AuthVerdict> verdict;
    for (const auto& row : r.auth_rows) {
        verdict[row.device] = row.verdict;
        if (row.verdict == acprobe::AuthVerdict::ClientSideValidation)
            client_side.insert(row.device);
        if (row.verdict == acprobe::AuthVerdict::SecureProcess)
            secure.insert(row.device);
        auto t = kTransmission.find(row.device);
        if (t != kTransmission.end())
            c.expect(row.transmission == t->second, row.device + " transmission " + acprobe::to_string(row.transmission));
    }
    c.expect(verdict.size() == devices.size(), "rows " + std::to_string(verdict.size()));
    c.expect(client_side == kClientSideGroup, "client side " + join(client_side));
    c.expect(verdict.count("r08cpu_like") && verdict["r08cpu_like"] == acprobe::AuthVerdict::NoUserVerification,
             "r08cpu_like not NoUserVerification");
    for (const auto& d : kSecureGroup)
        c.expect(secure.count(d) == 1, d + " not SecureProcess");
    c.measured = "client side " + std::to_string(client_side.size()) + "/7, secure " +
                 std::to_string(std::count_if(kSecureGroup.begin(), kSecureGroup.end(),
                                              [&](const auto& d) { return secure.count(d) == 1; })) +
                 "/" + std::to_string(kSecureGroup.size());
    return c;
}

// Backdoor app and base app stay in lockstep, scan by scan.
std::size_t backdoor_divergent_scans(std::size_t scans)
{
    auto f = plcsim::bench_twin(plcsim::device_fixture_by_name("pm573_like"));
    f.supervision.whitelist_enabled = false;
    const auto base_app = logicvm::build_benign_app();
    const auto bd_app = logicvm::build_backdoor_app(base_app, logicvm::Endpoint::parse("192.168.1.99:4444"));
    plcsim::Device base(f), bd(f);
    net::DeviceServer sb(base), sd(bd);
    net::Network n;
    ws::Session s1(base.profile(), n.connect(sb, "ws1")), s2(bd.profile(), n.connect(sd, "ws2"));
    ws::download(s1, base_app);
    ws::download(s2, bd_app);
    std::size_t divergent = 0;
    for (std::size_t i = 0; i < scans; ++i) {
        base.tick();
        bd.tick();
        if (base.snapshot()["variables"] != bd.snapshot()["variables"] || base.state().run_state != bd.state().run_state)
            ++divergent;
    }
    return divergent;
}

Check ac6_logic_suite()
{
    Check c;
    harness::Report r;
    harness::run_logic_suite(r, kSeed);
    const std::map<std::string, std::pair<std::string, std::string>> expected{
        {"backdoor-whitelist-off", {"BackdoorSpawned(192.168.1.99:4444)", "Running"}},
        {"backdoor-whitelist-on", {"PrivilegedTrapped", "Halted"}},
        {"illegal-crash", {"IllegalCrashed", "Dos"}},
        {"illegal-flash", {"NoRecoveryDos", "NoRecoveryDos"}},
        {"deadloop-guarded", {"WatchdogTripped", "Halted"}},
        {"watchdog-haltapp", {"HaltApp", "Halted"}},
        {"watchdog-dos", {"Dos", "Dos"}},
        {"watchdog-reboot", {"Reboot", "Running"}},
    };
    std::size_t ok = 0;
    for (const auto& row : r.logic_rows) {
        auto it = expected.find(row.case_name);
        if (it == expected.end()) {
            c.expect(false, "unexpected case " + row.case_name);
            continue;
        }
        const bool match = row.success && row.outcome == it->second.first && row.run_state == it->second.second;
        c.expect(match, row.case_name + " -> " + row.outcome + "/" + row.run_state);
        ok += match;
    }
    c.expect(r.logic_rows.size() == expected.size(), "cases " + std::to_string(r.logic_rows.size()));

    const auto snap = [&](const std::string& n) { return r.snapshots.count(n) ? r.snapshots.at(n) : nlohmann::json(); };
    c.expect(snap("logic-backdoor")["scans"] == 100, "backdoor scans " + snap("logic-backdoor")["scans"].dump());
    c.expect(snap("logic-backdoor")["init_runs"] == 1, "init ran " + snap("logic-backdoor")["init_runs"].dump());
    c.expect(snap("logic-illegal-flash-boot2")["run_state"] == "NoRecoveryDos", "flash crash did not survive reboot");
    c.expect(snap("logic-deadloop-dormant")["run_state"] == "Running", "dead loop fired at v1=0");
    c.expect(snap("logic-deadloop-rebooted")["run_state"] == "Running", "no recovery after reboot");

    const auto divergent = backdoor_divergent_scans(100);
    c.expect(divergent == 0, std::to_string(divergent) + " divergent scans");

    std::set<std::string> watchdog_states{snap("logic-watchdog-haltapp")["run_state"].dump(),
                                          snap("logic-watchdog-dos")["run_state"].dump(),
                                          snap("logic-watchdog-reboot")["run_state"].dump()};
    c.expect(watchdog_states.size() == 3, "watchdog reactions not distinct");
    c.measured = std::to_string(ok) + "/8 cases, " + std::to_string(divergent) + " divergent scans of 100";
    return c;
}

Check ac7_oracle_equivalence()
{
    Check c;
    constexpr std::size_t kCases = 1000;
    std::mt19937_64 rng(20260);
    std::size_t mismatches = 0, nonempty = 0;
    const auto t0 = Clock::now();
    for (std::size_t i = 0; i < kCases; ++i) {
        const auto sc = synth::random_case(rng);
        const auto got = diff::differential_analysis(sc.plan, sc.captures);
        const auto want = diff::brute_force_oracle(sc.plan, sc.captures);
        if (got != want)
            ++mismatches;
        nonempty += !want.empty();
    }
    const double dt = seconds_since(t0);
    c.expect(mismatches == 0, std::to_string(mismatches) + " mismatches");
    c.expect(dt < 60.0, "runtime " + std::to_string(dt) + " s");
    c.measured = std::to_string(kCases) + " cases, " + std::to_string(mismatches) + " mismatches, " +
                 std::to_string(nonempty) + " with candidates, " + std::to_string(dt) + " s";
    return c;
}

Check ac8_determinism(const harness::Report& matrix)
{
    Check c;
    std::size_t scenarios = 0;
    for (const auto& name : {"table5", "scripted-mitm", "ge-case-study", "logic"}) {
        const auto cfg = harness::load_scenario(std::string(PLCG_SOURCE_DIR "/scenarios/") + name + ".json");
        const auto a = harness::report_to_json(harness::run_scenario(cfg)).dump();
        const auto b = harness::report_to_json(harness::run_scenario(cfg)).dump();
        c.expect(a == b, std::string(name) + " reports differ");
        ++scenarios;
    }

    std::size_t streams = 0;
    for (const auto& row : matrix.lp_rows)
        c.expect(row.transparent, row.profile + " empty-rule proxy changed bytes");
    for (const auto& profile : table_profiles()) {
        plcsim::Device dev(plcsim::make_bench_fixture(profile));
        net::DeviceServer server(dev);
        mitm::Proxy proxy(server, "mitm");
        net::Network n(kSeed);
        ws::Session s(dev.profile(), n.connect(proxy, "ws"));
        try {
            ws::read_id(s);
            ws::write_var(s, "scratch", 0x1234);
            ws::monitor_loop(s, {"scratch"}, 3);
            ws::upload(s);
            ws::download(s, logicvm::build_benign_app());
        } catch (const ws::WsError& e) {
            c.expect(false, profile + ": " + e.what());
        }
        for (auto d : {Direction::WorkstationToPlc, Direction::PlcToWorkstation}) {
            c.expect(proxy.stream_hash(d, false) == proxy.stream_hash(d, true), profile + " stream hash differs");
            ++streams;
        }
    }
    c.measured = std::to_string(scenarios) + " scenarios rerun, " + std::to_string(streams) + " proxied streams";
    return c;
}

}  // namespace

int main()
{
    harness::Report matrix;
    const std::vector<std::pair<std::string, std::function<Check()>>> criteria{
        {"AC1 lp-recovery (exact, < 10 s)", [&] { return ac1_lp_recovery(matrix); }},
        {"AC2 attack-matrix (exact sets)", [&] { return ac2_attack_matrix(matrix); }},
        {"AC3 ge-case-study (exact values)", [] { return ac3_ge_case_study(); }},
        {"AC4 capability-table (exact)", [] { return ac4_capability_table(); }},
        {"AC5 auth-classification (exact)", [] { return ac5_auth_classification(); }},
        {"AC6 logic-vm-suite (exact outcomes)", [] { return ac6_logic_suite(); }},
        {"AC7 oracle-equivalence (0 mismatches, < 60 s)", [] { return ac7_oracle_equivalence(); }},
        {"AC8 determinism-transparency (0 diffs)", [&] { return ac8_determinism(matrix); }},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Check c;
        try {
            c = run();
        } catch (const std::exception& e) {
            c.problems.push_back(std::string("exception: ") + e.what());
        }
        const bool ok = c.problems.empty();
        failed += !ok;
        std::cout << (ok ? "PASS " : "FAIL ") << name << " | " << c.measured << "\n";
        for (const auto& p : c.problems)
            std::cout << "    " << p << "\n";
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
