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
#include "plcg/acprobe.hpp"

#include <sstream>

namespace plcg::acprobe {

using plcsim::Effect;
using plcsim::Manipulation;
using wire::RequestKind;
using wire::Status;

ProbeTarget::ProbeTarget(plcsim::DeviceFixture fixture, std::uint64_t seed)
    : fixture_(std::move(fixture)), profile_(plcsim::effective_profile(fixture_)), network_(seed)
{
    if (!fixture_.flash_app)
        fixture_.flash_app = logicvm::build_benign_app();
    reset();
}

void ProbeTarget::reset(const std::optional<std::string>& mode)
{
    // channels hold a reference to the server, so they go first
    operators_.clear();
    server_.reset();
    device_ = std::make_unique<plcsim::Device>(fixture_);
    if (mode)
        device_->set_mode(*mode);
    server_ = std::make_unique<net::DeviceServer>(*device_);
}

ws::Session ProbeTarget::connect(const std::string& who)
{
    return ws::Session(profile_, network_.connect(*server_, who));
}

std::vector<std::string> ProbeTarget::known_variables() const
{
    std::vector<std::string> out;
    for (const auto& v : fixture_.variables)
        out.push_back(v.name);
    return out;
}

wire::CaptureSet ProbeTarget::operator_session(const std::function<void(ws::Session&)>& script)
{
    const auto before = network_.capture().size();
    auto s = connect("operator");
    try {
        ws::authenticate(s, fixture_.password.value_or(""));
        script(s);
    } catch (const ws::WsError&) {
        // the operator's traffic is still useful evidence
    }
    operators_.push_back(std::move(s));
    const auto& all = network_.capture();
    return wire::CaptureSet(all.begin() + static_cast<std::ptrdiff_t>(before), all.end());
}

std::string to_string(Observed o)
{
    switch (o) {
    case Observed::Allowed: return "Allowed";
    case Observed::Bypassed: return "Bypassed";
    case Observed::Denied: return "Denied";
    case Observed::NotSupported: return "NotSupported";
    }
    return "?";
}

std::string glyph(Observed o)
{
    switch (o) {
    case Observed::Allowed: return "✓";
    case Observed::Bypassed: return "⊘";
    case Observed::Denied: return "⊗";
    case Observed::NotSupported: return "N/A";
    }
    return "?";
}

namespace {

struct Attempt {
    bool executed = false;
    bool unsupported = false;
    std::string note;
};

bool logged_since(const plcsim::Device& d, std::size_t from, ws::Session& s, Effect::Kind k)
{
    const auto& e = d.effects();
    for (std::size_t i = from; i < e.size(); ++i)
        if (e[i].kind == k && e[i].conn == s.id())
            return true;
    return false;
}

Value mask_for(std::size_t width)
{
    return width >= 4 ? 0xffffffffu : static_cast<Value>((std::uint64_t{1} << (8 * width)) - 1);
}

// Every verdict is checked against the device itself, never the response alone.
Attempt attempt(ProbeTarget& t, ws::Session& s, Manipulation m)
{
    auto& d = t.device();
    Attempt a;
    const auto from = d.effects().size();
    try {
        switch (m) {
        case Manipulation::ReadId: {
            auto r = ws::read_id(s);
            a.unsupported = r.status == Status::Unsupported;
            a.executed = r.executed() && !r.first().blob.empty() && logged_since(d, from, s, Effect::Kind::IdRead);
            break;
        }
        case Manipulation::UploadApp: {
            auto r = ws::upload(s);
            a.unsupported = r.status == Status::Unsupported;
            a.executed = r.executed() && d.active_app() && r.first().blob == logicvm::serialize(*d.active_app()) &&
                         logged_since(d, from, s, Effect::Kind::AppUploaded);
            break;
        }
        case Manipulation::ReadWriteVars: {
            const auto& var = t.fixture().scratch_variable;
            auto truth = d.variable(var).value_or(0);
            auto rr = ws::read_var(s, var);
            bool read_ok = rr.executed() && rr.first().value == truth && logged_since(d, from, s, Effect::Kind::VarRead);
            auto next = (truth + 0x11) & mask_for(t.profile().value_width);
            auto wr = ws::write_var(s, var, next);
            bool write_ok = wr.executed() && d.variable(var) == next && logged_since(d, from, s, Effect::Kind::VarWritten);
            a.unsupported = rr.status == Status::Unsupported && wr.status == Status::Unsupported;
            a.executed = read_ok || write_ok;
            if (a.executed && !write_ok)
                a.note = "read only";
            if (a.executed && a.note.empty())
                for (const auto& other : t.known_variables()) {
                    if (other == var)
                        continue;
                    if (!ws::read_var(s, other).executed()) {
                        a.note = "public tags";
                        break;
                    }
                }
            break;
        }
        case Manipulation::RunStop: {
            auto r = ws::stop(s);
            a.unsupported = r.status == Status::Unsupported;
            a.executed = r.executed() && d.state().run_state == plcsim::RunState::Stopped &&
                         logged_since(d, from, s, Effect::Kind::RunStateChanged);
            break;
        }
        case Manipulation::DownloadApp: {
            // re-downloading what is already there leaves the process untouched
            auto image = logicvm::build_benign_app();
            auto up = ws::upload(s);
            if (up.executed() && !up.first().blob.empty())
                try {
                    image = logicvm::parse_image(up.first().blob);
                } catch (const std::exception&) {
                }
            const auto before = d.downloads();
            auto r = ws::download(s, image);
            a.unsupported = r.status == Status::Unsupported;
            a.executed = r.executed() && d.downloads() == before + 1 &&
                         logged_since(d, from, s, Effect::Kind::AppDownloaded);
            break;
        }
        case Manipulation::ModeChange: {
            std::string other;
            for (const auto& mode : t.fixture().modes)
                if (mode != d.state().mode)
                    other = mode;
            if (other.empty())
                other = d.state().mode;
            auto r = ws::set_mode(s, other);
            a.unsupported = r.status == Status::Unsupported;
            a.executed = r.executed() && d.state().mode == other && logged_since(d, from, s, Effect::Kind::ModeChanged);
            break;
        }
        }
    } catch (const ws::WsError&) {
        a.executed = false;
    }
    return a;
}

void operator_script(ProbeTarget& t, ws::Session& s, Manipulation m)
{
    switch (m) {
    case Manipulation::ReadId: ws::read_id(s); break;
    case Manipulation::UploadApp: ws::upload(s); break;
    case Manipulation::ReadWriteVars: {
        const auto& var = t.fixture().scratch_variable;
        ws::read_var(s, var);
        ws::write_var(s, var, 0x0042);
        break;
    }
    case Manipulation::RunStop: ws::stop(s); break;
    case Manipulation::DownloadApp: {
        auto image = logicvm::build_benign_app();
        auto up = ws::upload(s);
        if (up.executed() && !up.first().blob.empty())
            try {
                image = logicvm::parse_image(up.first().blob);
            } catch (const std::exception&) {
            }
        ws::download(s, image);
        break;
    }
    case Manipulation::ModeChange: {
        for (const auto& mode : t.fixture().modes)
            if (mode != t.device().state().mode) {
                ws::set_mode(s, mode);
                break;
            }
        break;
    }
    }
}

bool evidence_for(Manipulation m, Effect::Kind k)
{
    switch (m) {
    case Manipulation::ReadId: return k == Effect::Kind::IdRead;
    case Manipulation::UploadApp: return k == Effect::Kind::AppUploaded;
    case Manipulation::ReadWriteVars: return k == Effect::Kind::VarRead || k == Effect::Kind::VarWritten;
    case Manipulation::RunStop: return k == Effect::Kind::RunStateChanged;
    case Manipulation::DownloadApp: return k == Effect::Kind::AppDownloaded;
    case Manipulation::ModeChange: return k == Effect::Kind::ModeChanged;
    }
    return false;
}

std::optional<wire::Message> try_decode(const wire::ProtocolProfile& p, ByteView payload)
{
    try {
        return wire::decode(p, payload);
    } catch (const wire::WireError&) {
        return std::nullopt;
    }
}

}  // namespace

ProbeMatrix probe_capabilities(ProbeTarget& target, const std::vector<std::string>& modes,
                               const std::vector<Manipulation>& manipulations)
{
    ProbeMatrix out;
    out.device = target.fixture().name;
    out.modes = modes;
    out.manipulations = manipulations;
    for (const auto& mode : modes)
        for (auto m : manipulations) {
            target.reset(mode);
            target.network().take_capture();
            {
                auto live = target.connect("prober");
                try {
                    ws::read_id(live);
                } catch (const ws::WsError& e) {
                    throw ProbeError(ProbeErrc::Unreachable, target.fixture().name + " did not answer ReadId: " + e.what());
                }
            }

            ProbeCell cell;
            auto s = target.connect("attacker");
            auto a = attempt(target, s, m);
            if (a.executed) {
                cell = {Observed::Allowed, "unauthenticated", a.note};
            } else if (a.unsupported) {
                cell = {Observed::NotSupported, "", ""};
            } else {
                if (target.profile().auth_model == wire::AuthModel::ClientSideValidation) {
                    auto p = target.connect("attacker-patched");
                    bypass_client_side(p);
                    try {
                        ws::authenticate(p, "not-the-password");
                        auto b = attempt(target, p, m);
                        if (b.executed)
                            cell = {Observed::Bypassed, "client_patch", b.note};
                    } catch (const ws::WsError&) {
                    }
                }
                if (cell.verdict != Observed::Bypassed) {
                    auto capture = target.operator_session([&](ws::Session& s2) { operator_script(target, s2, m); });
                    auto r = replay_privileged(capture, target);
                    bool hit = false;
                    for (auto k : r.effects)
                        hit = hit || evidence_for(m, k);
                    if (r.executed && hit)
                        cell = {Observed::Bypassed, "replay", ""};
                }
            }
            cell.traffic = target.network().take_capture();
            out.cells[{mode, m}] = cell;
        }
    return out;
}

ws::Session& bypass_client_side(ws::Session& session)
{
    if (session.profile().auth_model != wire::AuthModel::ClientSideValidation)
        throw ProbeError(ProbeErrc::NotApplicable, "the client patch only applies to client-side validation, " +
                                                       session.profile().name + " uses " +
                                                       wire::to_string(session.profile().auth_model));
    session.client_patch = true;
    return session;
}

ReplayResult replay_privileged(const wire::CaptureSet& capture, ProbeTarget& target)
{
    ReplayResult out;
    out.stateless_prereq = target.profile().stateless;
    std::vector<Bytes> privileged;
    bool after_auth = false;
    for (const auto& rec : capture) {
        if (rec.direction != Direction::WorkstationToPlc)
            continue;
        auto m = try_decode(target.profile(), rec.payload);
        if (!m)
            continue;
        if (m->kind == RequestKind::AuthRequest) {
            after_auth = true;
            continue;
        }
        if (after_auth && m->kind != RequestKind::ReadId)
            privileged.push_back(rec.payload);
    }

    auto s = target.connect("attacker-replay");
    auto& d = target.device();
    for (const auto& p : privileged) {
        const auto from = d.effects().size();
        try {
            auto r = s.exchange_raw(p);
            out.statuses.push_back(r.status);
            bool effect = false;
            for (std::size_t i = from; i < d.effects().size(); ++i)
                if (d.effects()[i].conn == s.id()) {
                    effect = true;
                    out.effects.push_back(d.effects()[i].kind);
                }
            out.executed = out.executed || (r.executed() && effect);
        } catch (const ws::WsError&) {
        }
        ++out.replayed;
    }
    return out;
}

nlohmann::json to_json(const ProbeMatrix& m)
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& mode : m.modes) {
        nlohmann::json cells = nlohmann::json::object();
        for (auto man : m.manipulations) {
            const auto& c = m.at(mode, man);
            cells[plcsim::to_string(man)] = {
                {"verdict", to_string(c.verdict)}, {"glyph", glyph(c.verdict)}, {"method", c.method}, {"note", c.note}};
        }
        rows.push_back({{"mode", mode}, {"cells", cells}});
    }
    return {{"device", m.device}, {"modes", rows}};
}

std::string render_table(const ProbeMatrix& m)
{
    std::ostringstream out;
    out << m.device << "\n";
    for (const auto& mode : m.modes) {
        out << "  " << mode << ":";
        for (auto man : m.manipulations) {
            const auto& c = m.at(mode, man);
            out << "  " << plcsim::to_string(man) << "=" << glyph(c.verdict);
            if (!c.note.empty())
                out << " (" << c.note << ")";
        }
        out << "\n";
    }
    return out.str();
}

std::string to_string(AuthVerdict v)
{
    switch (v) {
    case AuthVerdict::ClientSideValidation: return "ClientSideValidation";
    case AuthVerdict::NoUserVerification: return "NoUserVerification";
    case AuthVerdict::SecureProcess: return "SecureProcess";
    case AuthVerdict::NoAuthentication: return "NoAuthentication";
    }
    return "?";
}

wire::AuthModel model_of(AuthVerdict v)
{
    switch (v) {
    case AuthVerdict::ClientSideValidation: return wire::AuthModel::ClientSideValidation;
    case AuthVerdict::NoUserVerification: return wire::AuthModel::ServerNoUserVerification;
    case AuthVerdict::SecureProcess: return wire::AuthModel::SecureProcess;
    case AuthVerdict::NoAuthentication: return wire::AuthModel::NoPassword;
    }
    return wire::AuthModel::SecureProcess;
}

wire::CaptureSet record_auth_attempt(ProbeTarget& target, const std::string& password)
{
    target.reset();
    target.network().take_capture();
    auto s = target.connect("workstation");
    try {
        ws::authenticate(s, password);
        ws::stop(s);
        ws::write_var(s, target.fixture().scratch_variable, 0x0042);
        auto up = ws::upload(s);
        auto image = logicvm::build_benign_app();
        if (up.executed() && !up.first().blob.empty())
            try {
                image = logicvm::parse_image(up.first().blob);
            } catch (const std::exception&) {
            }
        ws::download(s, image);
    } catch (const ws::WsError&) {
    }
    return target.network().take_capture();
}

namespace {

const wire::PacketRecord* first_auth_request(const wire::CaptureSet& c, const wire::ProtocolProfile& p)
{
    for (const auto& rec : c)
        if (rec.direction == Direction::WorkstationToPlc)
            if (auto m = try_decode(p, rec.payload); m && m->kind == RequestKind::AuthRequest)
                return &rec;
    return nullptr;
}

bool login_accepted(const wire::CaptureSet& c, const wire::ProtocolProfile& p)
{
    for (const auto& rec : c)
        if (rec.direction == Direction::PlcToWorkstation)
            if (auto m = try_decode(p, rec.payload); m && m->kind == RequestKind::AuthRequest && m->status() == Status::Ok)
                return true;
    return false;
}

}  // namespace

AuthClassification classify_auth_process(const wire::CaptureSet& traffic_wrong, const wire::CaptureSet& traffic_correct,
                                         ProbeTarget& target)
{
    if (traffic_wrong.empty() || traffic_correct.empty())
        throw ProbeError(ProbeErrc::InconclusiveTraffic, "both authentication captures are needed");
    const auto& p = target.profile();
    AuthClassification out;

    const auto* a = first_auth_request(traffic_wrong, p);
    const auto* b = first_auth_request(traffic_correct, p);
    if (!a || !b)
        throw ProbeError(ProbeErrc::InconclusiveTraffic, "no authentication request in the captured traffic");
    if (a->payload == b->payload) {
        out.verdict = AuthVerdict::ClientSideValidation;
        out.evidence.push_back("first authentication request is password independent: " + to_hex(a->payload));
        return out;
    }
    out.evidence.push_back("authentication requests differ with the password");

    if (login_accepted(traffic_wrong, p)) {
        out.verdict = AuthVerdict::NoAuthentication;
        out.evidence.push_back("a wrong password was accepted");
        return out;
    }

    std::vector<Bytes> candidates;
    bool after_auth = false;
    for (const auto& rec : traffic_correct) {
        if (rec.direction != Direction::WorkstationToPlc)
            continue;
        auto m = try_decode(p, rec.payload);
        if (!m)
            continue;
        if (m->kind == RequestKind::AuthRequest)
            after_auth = true;
        else if (after_auth && m->kind != RequestKind::ReadId)
            candidates.push_back(rec.payload);
    }
    for (const auto& cmd : candidates) {
        auto kind = wire::to_string(try_decode(p, cmd)->kind);
        // only requests the device gates on authentication say anything
        target.reset();
        {
            auto s = target.connect("attacker-unauth");
            try {
                if (s.exchange_raw(cmd).executed())
                    continue;
            } catch (const ws::WsError&) {
                continue;
            }
        }
        target.reset();
        target.operator_session([](ws::Session&) {});
        auto& d = target.device();
        auto s = target.connect("attacker-replay");
        const auto from = d.effects().size();
        try {
            auto r = s.exchange_raw(cmd);
            bool effect = false;
            for (std::size_t i = from; i < d.effects().size(); ++i)
                effect = effect || d.effects()[i].conn == s.id();
            if (r.executed() && effect) {
                out.verdict = AuthVerdict::NoUserVerification;
                out.evidence.push_back(kind + " refused before login, executed from a fresh connection after another "
                                              "peer logged in: " + to_hex(cmd));
                return out;
            }
            out.evidence.push_back(kind + " replay from a fresh connection refused");
        } catch (const ws::WsError& e) {
            out.evidence.push_back(kind + " replay failed: " + e.what());
        }
    }
    out.verdict = AuthVerdict::SecureProcess;
    return out;
}

std::string to_string(PasswordTransmission p)
{
    switch (p) {
    case PasswordTransmission::Plaintext: return "Plaintext";
    case PasswordTransmission::Hashed: return "Hashed";
    case PasswordTransmission::NotFound: return "NotFound";
    }
    return "?";
}

PasswordTransmission classify_password_transmission(const wire::CaptureSet& capture, const std::string& password)
{
    if (password.empty())
        return PasswordTransmission::NotFound;
    const auto plain = to_bytes(password);
    const auto digest = wire::password_digest(password);
    bool hashed = false;
    for (const auto& rec : capture) {
        if (!find_all(rec.payload, plain).empty())
            return PasswordTransmission::Plaintext;
        hashed = hashed || !find_all(rec.payload, digest).empty();
    }
    return hashed ? PasswordTransmission::Hashed : PasswordTransmission::NotFound;
}

}  // namespace plcg::acprobe
