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

#include <fstream>
#include <sstream>

namespace plcg::harness {

using nlohmann::json;
namespace fs = std::filesystem;

const Verdict* Report::find(const std::string& id) const
{
    for (const auto& v : verdicts)
        if (v.id == id)
            return &v;
    return nullptr;
}

std::map<std::string, std::string> Report::summary() const
{
    std::map<std::string, std::pair<std::size_t, std::size_t>> counts;
    for (const auto& v : verdicts) {
        auto& c = counts[v.kind];
        c.first += v.success;
        ++c.second;
    }
    std::map<std::string, std::string> out;
    for (const auto& [k, c] : counts)
        out[k] = std::to_string(c.first) + "/" + std::to_string(c.second);
    return out;
}

namespace {

std::string capture_path(const std::string& name) { return "captures/" + name + ".jsonl"; }
std::string snapshot_path(const std::string& name) { return "snapshots/" + name + ".json"; }

std::string pairs_text(const diff::CandidateSet& c)
{
    std::string out;
    for (const auto& [l, p] : diff::lp_pairs(c))
        out += (out.empty() ? "" : ",") + ("(" + std::to_string(l) + "," + std::to_string(p) + ")");
    return out.empty() ? "-" : out;
}

const char* mark(bool b) { return b ? "✓" : "✗"; }

}  // namespace

json report_to_json(const Report& r)
{
    auto verdicts = json::array();
    for (const auto& v : r.verdicts)
        verdicts.push_back({{"id", v.id},
                            {"kind", v.kind},
                            {"subject", v.subject},
                            {"success", v.success},
                            {"detail", v.detail},
                            {"check", v.check}});
    auto lp = json::array();
    for (const auto& row : r.lp_rows)
        lp.push_back({{"profile", row.profile},
                      {"command", lp_list(row.command)},
                      {"response", lp_list(row.response)},
                      {"sniff", row.sniff},
                      {"spoof", row.spoof},
                      {"fdi", row.fdi},
                      {"transparent", row.transparent}});
    auto probes = json::array();
    for (const auto& m : r.probe_matrices)
        probes.push_back(acprobe::to_json(m));
    auto auth = json::array();
    for (const auto& a : r.auth_rows)
        auth.push_back({{"device", a.device},
                        {"verdict", acprobe::to_string(a.verdict)},
                        {"transmission", acprobe::to_string(a.transmission)}});
    auto logic = json::array();
    for (const auto& l : r.logic_rows)
        logic.push_back({{"case", l.case_name},
                         {"device", l.device},
                         {"outcome", l.outcome},
                         {"run_state", l.run_state},
                         {"success", l.success}});
    auto captures = json::object();
    for (const auto& [name, _] : r.captures)
        captures[name] = capture_path(name);
    auto snapshots = json::object();
    for (const auto& [name, _] : r.snapshots)
        snapshots[name] = snapshot_path(name);
    return {{"scenario", r.scenario},
            {"seed", r.seed},
            {"summary", r.summary()},
            {"verdicts", verdicts},
            {"lp_rows", lp},
            {"probe_matrices", probes},
            {"auth_rows", auth},
            {"logic_rows", logic},
            {"log", r.log},
            {"captures", captures},
            {"snapshots", snapshots}};
}

std::string render_report(const Report& r, ReportFormat format)
{
    if (format == ReportFormat::Json)
        return report_to_json(r).dump(2) + "\n";

    std::ostringstream out;
    out << "scenario " << r.scenario << " (seed " << r.seed << ")\n\n";
    out << "Protocol | T_S (Length, Position) | T_R (Length, Position) | Sniffing | Spoofing | FDI\n";
    for (const auto& row : r.lp_rows)
        out << row.profile << " | " << pairs_text(row.command) << " | " << pairs_text(row.response) << " | "
            << mark(row.sniff) << " | " << mark(row.spoof) << " | " << mark(row.fdi) << "\n";

    out << "\nDevice | Mode | Read Id | Upload App | Read/Write Vars | Run/Stop | Download App\n";
    for (const auto& m : r.probe_matrices)
        for (const auto& mode : m.modes) {
            out << m.device << " | " << mode;
            for (auto man : m.manipulations) {
                const auto& c = m.at(mode, man);
                out << " | " << (c.note.empty() ? "" : c.note + " ") << acprobe::glyph(c.verdict);
            }
            out << "\n";
        }

    out << "\nDevice | Authentication process | Password transmission\n";
    for (const auto& a : r.auth_rows)
        out << a.device << " | " << acprobe::to_string(a.verdict) << " | " << acprobe::to_string(a.transmission) << "\n";

    out << "\nCase | Device | Outcome | Run state | Result\n";
    for (const auto& l : r.logic_rows)
        out << l.case_name << " | " << l.device << " | " << l.outcome << " | " << l.run_state << " | " << mark(l.success)
            << "\n";

    out << "\nSummary\n";
    for (const auto& [kind, count] : r.summary())
        out << kind << ": " << count << "\n";
    for (const auto& line : r.log)
        out << "log " << line << "\n";
    return out.str();
}

void write_report(const Report& r, const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir / "captures", ec);
    fs::create_directories(dir / "snapshots", ec);
    if (ec)
        throw CaptureError(CaptureErrc::IoError, "cannot create " + dir.string() + ": " + ec.message());
    for (const auto& [name, cap] : r.captures)
        write_capture(dir / capture_path(name), cap);
    for (const auto& [name, snap] : r.snapshots) {
        std::ofstream out(dir / snapshot_path(name));
        out << snap.dump(2) << "\n";
        if (!out)
            throw CaptureError(CaptureErrc::IoError, "cannot write snapshot " + name);
    }
    std::ofstream out(dir / "report.json");
    out << report_to_json(r).dump(2) << "\n";
    if (!out)
        throw CaptureError(CaptureErrc::IoError, "cannot write " + (dir / "report.json").string());
}

namespace {

class Evidence {
public:
    explicit Evidence(fs::path dir) : dir_(std::move(dir)) {}

    const wire::CaptureSet& capture(const std::string& name)
    {
        auto it = captures_.find(name);
        if (it == captures_.end())
            it = captures_.emplace(name, read_capture(dir_ / capture_path(name))).first;
        return it->second;
    }

    const json& snapshot(const std::string& name)
    {
        auto it = snapshots_.find(name);
        if (it == snapshots_.end()) {
            std::ifstream in(dir_ / snapshot_path(name));
            if (!in)
                throw CaptureError(CaptureErrc::IoError, "missing snapshot " + name);
            json j;
            in >> j;
            it = snapshots_.emplace(name, std::move(j)).first;
        }
        return it->second;
    }

private:
    fs::path dir_;
    std::map<std::string, wire::CaptureSet> captures_;
    std::map<std::string, json> snapshots_;
};

std::optional<wire::Message> decode_or_none(const wire::ProtocolProfile& p, ByteView payload)
{
    try {
        return wire::decode(p, payload);
    } catch (const wire::WireError&) {
        return std::nullopt;
    }
}

std::vector<Value> sniff_dir(const wire::CaptureSet& c, const json& sig, Direction d)
{
    if (sig.is_null())
        return {};
    return mitm::sniff(wire::filter_direction(c, d), diff::signature_from_json(sig));
}

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

bool ok_response(const wire::CaptureSet& c, const wire::ProtocolProfile& p, const std::string& client_prefix,
                 const std::function<bool(wire::RequestKind)>& kind_ok)
{
    for (const auto& rec : c)
        if (rec.direction == Direction::PlcToWorkstation && starts_with(rec.dst, client_prefix))
            if (auto m = decode_or_none(p, rec.payload); m && kind_ok(m->kind) && m->status() == wire::Status::Ok)
                return true;
    return false;
}

std::optional<Bytes> first_auth_request(const wire::CaptureSet& c, const wire::ProtocolProfile& p)
{
    for (const auto& rec : c)
        if (rec.direction == Direction::WorkstationToPlc)
            if (auto m = decode_or_none(p, rec.payload); m && m->kind == wire::RequestKind::AuthRequest)
                return rec.payload;
    return std::nullopt;
}

diff::CandidateSet recompute_lp(const wire::CaptureSet& cap, const json& check, Direction d)
{
    diff::DifferentialPlan plan;
    plan.probes = check.at("probes").get<std::vector<Value>>();
    plan.encodings.clear();
    for (const auto& e : check.at("encodings"))
        plan.encodings.push_back(encoding_from_string(e.get<std::string>()));
    diff::ProbeCaptures per;
    for (const auto& [x, c] : diff::split_by_tag(cap))
        per[x] = wire::filter_direction(c, d);
    return diff::differential_analysis(plan, per);
}

/// Empty string when the verdict re-derives; otherwise the reason it does not.
std::string rederive(const json& check, Evidence& ev)
{
    if (check.is_null())
        return "no evidence recorded";
    const auto type = check.at("type").get<std::string>();
    if (type == "lp") {
        const auto& cap = ev.capture(check.at("capture").get<std::string>());
        for (auto [key, dir] : {std::pair{"command", Direction::WorkstationToPlc},
                                std::pair{"response", Direction::PlcToWorkstation}}) {
            const auto& want = check.at(key);
            if (!want.empty() && lp_list(recompute_lp(cap, check, dir)) != want)
                return std::string(key) + " candidates differ";
        }
        return {};
    }
    if (type == "sniff") {
        auto got = sniff_dir(ev.capture(check.at("capture").get<std::string>()), check.at("signature"),
                             Direction::WorkstationToPlc);
        return got == check.at("expected").get<std::vector<Value>>() && !got.empty() ? "" : "sniffed values differ";
    }
    if (type == "fdi") {
        const auto& snap = ev.snapshot(check.at("snapshot").get<std::string>());
        const auto var = check.at("var").get<std::string>();
        if (!snap.at("variables").contains(var) || snap["variables"][var] != check.at("fake"))
            return var + " does not hold the injected value";
        if (check.contains("tee")) {
            auto carried = sniff_dir(ev.capture(check["tee"].get<std::string>()), check.at("signature"),
                                     Direction::WorkstationToPlc);
            if (carried != std::vector<Value>{check.at("carried").get<Value>()})
                return "the workstation did not send the original value";
        }
        return {};
    }
    if (type == "spoof") {
        const auto profile = wire::profile_by_name(check.at("profile").get<std::string>());
        const auto& cap = ev.capture(check.at("capture").get<std::string>());
        std::vector<diff::Signature> sigs;
        for (const auto& s : check.at("signatures"))
            sigs.push_back(diff::signature_from_json(s));
        std::vector<Value> readings;
        for (const auto& rec : cap) {
            if (rec.direction != Direction::PlcToWorkstation)
                continue;
            for (const auto& sig : sigs)
                if (sig.matches(rec.payload) && decode_or_none(profile, rec.payload)) {
                    readings.push_back(diff::read_field(rec.payload, sig.field));
                    break;
                }
        }
        const auto fake = check.at("fake").get<Value>();
        const auto& snap = ev.snapshot(check.at("snapshot").get<std::string>());
        auto truth = snap.at("variables").value(check.at("var").get<std::string>(), json());
        if (readings.empty())
            return "no accepted readings in the capture";
        for (auto v : readings)
            if (v != fake)
                return "a reading shows " + std::to_string(v);
        return truth == json(fake) ? "the device itself holds the fake value" : "";
    }
    if (type == "probe") {
        const auto profile = wire::profile_by_name(check.at("profile").get<std::string>());
        std::vector<std::string> kinds = check.at("kinds").get<std::vector<std::string>>();
        auto kind_ok = [&](wire::RequestKind k) {
            return std::find(kinds.begin(), kinds.end(), wire::to_string(k)) != kinds.end();
        };
        return ok_response(ev.capture(check.at("capture").get<std::string>()), profile,
                           check.at("client_prefix").get<std::string>(), kind_ok)
                   ? ""
                   : "no accepted response to the attacker";
    }
    if (type == "auth") {
        const auto profile = wire::profile_by_name(check.at("profile").get<std::string>());
        const auto verdict = check.at("verdict").get<std::string>();
        const auto& wrong = ev.capture(check.at("wrong").get<std::string>());
        const auto& correct = ev.capture(check.at("correct").get<std::string>());
        if (verdict == "ClientSideValidation") {
            auto a = first_auth_request(wrong, profile), b = first_auth_request(correct, profile);
            return a && b && *a == *b ? "" : "authentication requests depend on the password";
        }
        if (verdict == "NoAuthentication")
            return ok_response(wrong, profile, "", [](wire::RequestKind k) { return k == wire::RequestKind::AuthRequest; })
                       ? ""
                       : "the wrong password was not accepted";
        if (verdict == "NoUserVerification")
            return ok_response(ev.capture(check.at("classify").get<std::string>()), profile, "attacker-replay",
                               [](wire::RequestKind k) {
                                   return k != wire::RequestKind::AuthRequest && k != wire::RequestKind::ReadId;
                               })
                       ? ""
                       : "no replayed request was accepted";
        return "verdict " + verdict + " is not a finding";
    }
    if (type == "transmission") {
        auto got = acprobe::classify_password_transmission(ev.capture(check.at("capture").get<std::string>()),
                                                           check.at("password").get<std::string>());
        return acprobe::to_string(got) == check.at("result").get<std::string>() ? "" : "password transmission differs";
    }
    if (type == "logic") {
        for (const auto& c : check.at("conditions")) {
            const auto& snap = ev.snapshot(c.at("snapshot").get<std::string>());
            json::json_pointer p(c.at("pointer").get<std::string>());
            if (!snap.contains(p))
                return c.dump() + " is missing";
            const auto& want = c.contains("same_as") ? ev.snapshot(c["same_as"].get<std::string>()).value(p, json())
                                                     : c.at("equals");
            if (snap.at(p) != want)
                return c.dump() + " does not hold";
        }
        return {};
    }
    return "unknown check type " + type;
}

}  // namespace

VerifyResult verify_report(const fs::path& dir)
{
    std::ifstream in(dir / "report.json");
    if (!in)
        throw CaptureError(CaptureErrc::IoError, "cannot read " + (dir / "report.json").string());
    json report;
    try {
        in >> report;
    } catch (const json::exception& e) {
        throw CaptureError(CaptureErrc::ParseError, std::string("report.json: ") + e.what());
    }
    VerifyResult out;
    Evidence ev(dir);
    for (const auto& v : report.at("verdicts")) {
        if (!v.at("success").get<bool>())
            continue;
        ++out.checked;
        std::string why;
        try {
            why = rederive(v.at("check"), ev);
        } catch (const std::exception& e) {
            why = e.what();
        }
        if (!why.empty())
            out.mismatches.push_back(v.at("id").get<std::string>() + ": " + why);
    }
    return out;
}

json report_schema()
{
    static const char* const text = R"json({
  "$schema": "http://json-schema.org/draft-07/schema#",
  "title": "plc-gauntlet report",
  "type": "object",
  "required": ["scenario", "seed", "summary", "verdicts", "lp_rows", "probe_matrices", "auth_rows",
               "logic_rows", "log", "captures", "snapshots"],
  "additionalProperties": false,
  "properties": {
    "scenario": {"type": "string"},
    "seed": {"type": "integer"},
    "summary": {"type": "object", "additionalProperties": {"type": "string"}},
    "verdicts": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["id", "kind", "subject", "success", "detail", "check"],
        "additionalProperties": false,
        "properties": {
          "id": {"type": "string"},
          "kind": {"type": "string",
                   "enum": ["lp", "sniff", "fdi", "spoof", "probe", "auth", "transmission", "logic"]},
          "subject": {"type": "string"},
          "success": {"type": "boolean"},
          "detail": {"type": "string"},
          "check": {"type": ["object", "null"]}
        }
      }
    },
    "lp_rows": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["profile", "command", "response", "sniff", "spoof", "fdi", "transparent"],
        "additionalProperties": false,
        "properties": {
          "profile": {"type": "string"},
          "command": {"type": "array", "items": {"type": "object", "required": ["length", "position"],
                      "properties": {"length": {"type": "integer"}, "position": {"type": "integer"}}}},
          "response": {"type": "array", "items": {"type": "object", "required": ["length", "position"],
                       "properties": {"length": {"type": "integer"}, "position": {"type": "integer"}}}},
          "sniff": {"type": "boolean"},
          "spoof": {"type": "boolean"},
          "fdi": {"type": "boolean"},
          "transparent": {"type": "boolean"}
        }
      }
    },
    "probe_matrices": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["device", "modes"],
        "properties": {"device": {"type": "string"}, "modes": {"type": "array"}}
      }
    },
    "auth_rows": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["device", "verdict", "transmission"],
        "additionalProperties": false,
        "properties": {
          "device": {"type": "string"},
          "verdict": {"type": "string", "enum": ["ClientSideValidation", "NoUserVerification",
                                                  "SecureProcess", "NoAuthentication"]},
          "transmission": {"type": "string", "enum": ["Plaintext", "Hashed", "NotFound"]}
        }
      }
    },
    "logic_rows": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["case", "device", "outcome", "run_state", "success"],
        "additionalProperties": false,
        "properties": {
          "case": {"type": "string"},
          "device": {"type": "string"},
          "outcome": {"type": "string"},
          "run_state": {"type": "string"},
          "success": {"type": "boolean"}
        }
      }
    },
    "log": {"type": "array", "items": {"type": "string"}},
    "captures": {"type": "object", "additionalProperties": {"type": "string"}},
    "snapshots": {"type": "object", "additionalProperties": {"type": "string"}}
  }
})json";
    return json::parse(text);
}

namespace {

bool has_type(const json& v, const std::string& t)
{
    if (t == "object")
        return v.is_object();
    if (t == "array")
        return v.is_array();
    if (t == "string")
        return v.is_string();
    if (t == "integer")
        return v.is_number_integer();
    if (t == "number")
        return v.is_number();
    if (t == "boolean")
        return v.is_boolean();
    if (t == "null")
        return v.is_null();
    return false;
}

void check_node(const json& v, const json& s, const std::string& path, std::vector<std::string>& errors)
{
    if (s.contains("type")) {
        bool ok = false;
        if (s["type"].is_array()) {
            for (const auto& t : s["type"])
                ok = ok || has_type(v, t.get<std::string>());
        } else {
            ok = has_type(v, s["type"].get<std::string>());
        }
        if (!ok) {
            errors.push_back(path + ": expected type " + s["type"].dump());
            return;
        }
    }
    if (s.contains("enum")) {
        bool found = false;
        for (const auto& e : s["enum"])
            found = found || e == v;
        if (!found)
            errors.push_back(path + ": " + v.dump() + " not in enum");
    }
    if (v.is_object()) {
        for (const auto& r : s.value("required", json::array()))
            if (!v.contains(r.get<std::string>()))
                errors.push_back(path + ": missing " + r.get<std::string>());
        const auto props = s.value("properties", json::object());
        for (const auto& [k, child] : v.items()) {
            if (props.contains(k))
                check_node(child, props[k], path + "/" + k, errors);
            else if (s.contains("additionalProperties")) {
                const auto& ap = s["additionalProperties"];
                if (ap.is_boolean() && !ap.get<bool>())
                    errors.push_back(path + ": unexpected property " + k);
                else if (ap.is_object())
                    check_node(child, ap, path + "/" + k, errors);
            }
        }
    }
    if (v.is_array() && s.contains("items"))
        for (std::size_t i = 0; i < v.size(); ++i)
            check_node(v[i], s["items"], path + "/" + std::to_string(i), errors);
}

}  // namespace

std::vector<std::string> validate_schema(const json& instance, const json& schema)
{
    std::vector<std::string> errors;
    check_node(instance, schema, "", errors);
    return errors;
}

}  // namespace plcg::harness
