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

using wire::Message;
using wire::RequestKind;
using wire::Status;

std::string to_string(Manipulation m)
{
    switch (m) {
    case Manipulation::ReadId: return "ReadId";
    case Manipulation::UploadApp: return "UploadApp";
    case Manipulation::ReadWriteVars: return "ReadWriteVars";
    case Manipulation::RunStop: return "RunStop";
    case Manipulation::DownloadApp: return "DownloadApp";
    case Manipulation::ModeChange: return "ModeChange";
    }
    return "?";
}

Manipulation manipulation_from_string(std::string_view s)
{
    for (auto m : {Manipulation::ReadId, Manipulation::UploadApp, Manipulation::ReadWriteVars, Manipulation::RunStop,
                   Manipulation::DownloadApp, Manipulation::ModeChange})
        if (to_string(m) == s)
            return m;
    throw std::invalid_argument("unknown manipulation: " + std::string(s));
}

std::optional<Manipulation> manipulation_for(RequestKind k)
{
    switch (k) {
    case RequestKind::ReadId: return Manipulation::ReadId;
    case RequestKind::UploadApp: return Manipulation::UploadApp;
    case RequestKind::DownloadApp: return Manipulation::DownloadApp;
    case RequestKind::ReadVar:
    case RequestKind::WriteVar:
    case RequestKind::Monitor: return Manipulation::ReadWriteVars;
    case RequestKind::Run:
    case RequestKind::Stop:
    case RequestKind::Reset: return Manipulation::RunStop;
    case RequestKind::SetMode: return Manipulation::ModeChange;
    case RequestKind::AuthRequest: return std::nullopt;
    }
    return std::nullopt;
}

std::string to_string(Requirement r)
{
    switch (r) {
    case Requirement::Open: return "Open";
    case Requirement::AuthRequired: return "AuthRequired";
    case Requirement::Denied: return "Denied";
    case Requirement::NotSupported: return "NotSupported";
    }
    return "?";
}

Requirement requirement_from_string(std::string_view s)
{
    for (auto r : {Requirement::Open, Requirement::AuthRequired, Requirement::Denied, Requirement::NotSupported})
        if (to_string(r) == s)
            return r;
    throw std::invalid_argument("unknown requirement: " + std::string(s));
}

Requirement CapabilityMatrix::at(const std::string& mode, Manipulation m) const
{
    auto it = entries_.find({mode, m});
    if (it == entries_.end())
        throw std::out_of_range("no capability entry for (" + mode + ", " + to_string(m) + ")");
    return it->second;
}

bool CapabilityMatrix::complete_for(const std::vector<std::string>& modes) const
{
    for (const auto& mode : modes)
        for (auto m : {Manipulation::ReadId, Manipulation::UploadApp, Manipulation::ReadWriteVars,
                       Manipulation::RunStop, Manipulation::DownloadApp, Manipulation::ModeChange})
            if (!entries_.count({mode, m}))
                return false;
    return true;
}

std::string to_string(RunState s)
{
    switch (s) {
    case RunState::Running: return "Running";
    case RunState::Stopped: return "Stopped";
    case RunState::Halted: return "Halted";
    case RunState::Dos: return "Dos";
    case RunState::NoRecoveryDos: return "NoRecoveryDos";
    }
    return "?";
}

std::string to_string(Effect::Kind k)
{
    switch (k) {
    case Effect::Kind::IdRead: return "IdRead";
    case Effect::Kind::AppUploaded: return "AppUploaded";
    case Effect::Kind::VarRead: return "VarRead";
    case Effect::Kind::VarWritten: return "VarWritten";
    case Effect::Kind::RunStateChanged: return "RunStateChanged";
    case Effect::Kind::AppDownloaded: return "AppDownloaded";
    case Effect::Kind::ModeChanged: return "ModeChanged";
    case Effect::Kind::Rebooted: return "Rebooted";
    case Effect::Kind::Authenticated: return "Authenticated";
    case Effect::Kind::BackdoorRegistered: return "BackdoorRegistered";
    case Effect::Kind::AppFault: return "AppFault";
    }
    return "?";
}

Device::Device(DeviceFixture fixture) : fixture_(std::move(fixture))
{
    validate(fixture_);
    profile_ = effective_profile(fixture_);
    state_.mode = fixture_.initial_mode;
    state_.app_flash = fixture_.flash_app;
    reset_variables();
    if (state_.app_flash) {
        load_active(state_.app_flash);
        run_cycle(Phase::Boot);
    }
}

void Device::log(Effect::Kind k, ConnId conn, std::string detail)
{
    effects_.push_back({k, conn, std::move(detail)});
}

void Device::reset_variables()
{
    state_.variables.clear();
    for (const auto& v : fixture_.variables)
        state_.variables[v.name] = v.initial;
}

const VariableSpec* Device::spec_for(const std::string& name) const
{
    for (const auto& v : fixture_.variables)
        if (v.name == name)
            return &v;
    return nullptr;
}

std::optional<std::string> Device::name_for(std::uint16_t id) const
{
    for (const auto& [name, value] : state_.variables)
        if (wire::variable_id(name) == id)
            return name;
    return std::nullopt;
}

std::optional<Value> Device::variable(const std::string& name) const
{
    auto it = state_.variables.find(name);
    if (it == state_.variables.end())
        return std::nullopt;
    return it->second;
}

void Device::set_mode(const std::string& mode)
{
    if (std::find(fixture_.modes.begin(), fixture_.modes.end(), mode) == fixture_.modes.end())
        throw std::invalid_argument(fixture_.name + " has no mode '" + mode + "'");
    state_.mode = mode;
    log(Effect::Kind::ModeChanged, 0, mode);
}

void Device::set_variable(const std::string& name, Value v)
{
    state_.variables[name] = v;
}

bool Device::authorized(ConnId conn) const
{
    switch (profile_.auth_model) {
    case wire::AuthModel::NoPassword: return true;
    case wire::AuthModel::ServerNoUserVerification: return state_.unlocked;
    case wire::AuthModel::ClientSideValidation:
    case wire::AuthModel::SecureProcess: return state_.authenticated_peers.count(conn) > 0;
    }
    return false;
}

void Device::connection_closed(ConnId conn)
{
    state_.authenticated_peers.erase(conn);
}

Message Device::respond(const Message& req, Status st) const
{
    Message m;
    m.kind = req.kind;
    m.is_response = true;
    m.var = req.var;
    m.aux = static_cast<std::uint8_t>(st);
    if (profile_.response_shapes.at(req.kind)[0].value_position)
        m.value = 0;
    return m;
}

std::vector<Bytes> Device::handle_packet(ConnId conn, ByteView payload)
{
    if (!responsive())
        return {};
    Message req;
    try {
        req = wire::decode(profile_, payload);
    } catch (const wire::WireError& e) {
        if (e.code() == wire::WireErrc::IntegrityFailure && e.kind && !e.is_response) {
            Message probe;
            probe.kind = *e.kind;
            return {wire::encode(profile_, respond(probe, Status::IntegrityFailure))};
        }
        return {};
    }
    if (req.is_response)
        return {};

    auto encode_one = [&](const Message& m) { return std::vector<Bytes>{wire::encode(profile_, m)}; };

    if (auto manip = manipulation_for(req.kind)) {
        Requirement r = Requirement::Denied;
        try {
            r = fixture_.capabilities.at(state_.mode, *manip);
        } catch (const std::out_of_range&) {
        }
        if (r == Requirement::Denied || (r == Requirement::AuthRequired && !authorized(conn)))
            return encode_one(respond(req, Status::Refused));
        if (r == Requirement::NotSupported)
            return encode_one(respond(req, Status::Unsupported));
    }

    Message resp = respond(req, Status::Ok);
    Status st = Status::Ok;
    switch (req.kind) {
    case RequestKind::ReadId:
        resp.blob = to_bytes(fixture_.identity);
        log(Effect::Kind::IdRead, conn, fixture_.identity);
        break;
    case RequestKind::UploadApp:
        if (active_)
            resp.blob = logicvm::serialize(*active_);
        log(Effect::Kind::AppUploaded, conn, std::to_string(resp.blob.size()) + " bytes");
        break;
    case RequestKind::ReadVar:
    case RequestKind::WriteVar:
        st = handle_var(conn, req, resp);
        break;
    case RequestKind::Monitor: {
        st = handle_var(conn, req, resp);
        if (st != Status::Ok)
            break;
        std::vector<Bytes> out;
        const auto& shapes = profile_.response_shapes.at(RequestKind::Monitor);
        for (std::size_t i = 0; i < shapes.size(); ++i) {
            Message m = resp;
            m.shape_index = i;
            if (!shapes[i].value_position)
                m.value.reset();
            out.push_back(wire::encode(profile_, m));
        }
        return out;
    }
    case RequestKind::Run:
        state_.run_state = RunState::Running;
        log(Effect::Kind::RunStateChanged, conn, "Running");
        break;
    case RequestKind::Stop:
        state_.run_state = RunState::Stopped;
        log(Effect::Kind::RunStateChanged, conn, "Stopped");
        break;
    case RequestKind::Reset: {
        auto out = encode_one(resp);
        reboot();
        return out;
    }
    case RequestKind::DownloadApp:
        st = handle_download(conn, req);
        break;
    case RequestKind::SetMode: {
        std::string mode(req.blob.begin(), req.blob.end());
        if (std::find(fixture_.modes.begin(), fixture_.modes.end(), mode) == fixture_.modes.end()) {
            st = Status::Refused;
            break;
        }
        state_.mode = mode;
        log(Effect::Kind::ModeChanged, conn, mode);
        break;
    }
    case RequestKind::AuthRequest:
        st = handle_auth(conn, req, resp);
        break;
    }
    resp.aux = static_cast<std::uint8_t>(st);
    return encode_one(resp);
}

Status Device::handle_var(ConnId conn, const Message& req, Message& resp)
{
    auto name = name_for(req.var);
    if (!name)
        return Status::Refused;
    const auto* spec = spec_for(*name);
    if (spec && !spec->is_public && !authorized(conn))
        return Status::Refused;
    if (req.kind == RequestKind::WriteVar) {
        bool read_only = (spec && spec->read_only) || fixture_.read_only_modes.count(state_.mode);
        if (read_only || !req.value)
            return Status::Refused;
        state_.variables[*name] = *req.value;
        log(Effect::Kind::VarWritten, conn, *name + "=" + std::to_string(*req.value));
    } else if (req.kind == RequestKind::ReadVar) {
        log(Effect::Kind::VarRead, conn, *name);
    }
    Value v = state_.variables[*name];
    if (resp.value && fits_width(v, profile_.value_width))
        resp.value = v;
    return Status::Ok;
}

Status Device::handle_auth(ConnId conn, const Message& req, Message& resp)
{
    using wire::AuthModel;
    using wire::AuthOp;
    const auto model = profile_.auth_model;
    const bool hashed = profile_.confidentiality == wire::Confidentiality::HashedPassword;
    const std::string secret = fixture_.password.value_or("");
    auto grant = [&] {
        if (model == AuthModel::ServerNoUserVerification)
            state_.unlocked = true;
        else
            state_.authenticated_peers.insert(conn);
        log(Effect::Kind::Authenticated, conn, to_string(model));
    };

    switch (static_cast<AuthOp>(req.aux & 0x0f)) {
    case AuthOp::Login: {
        if (model == AuthModel::ClientSideValidation)
            return Status::Unsupported;
        if (model == AuthModel::NoPassword || !fixture_.password) {
            grant();
            return Status::Ok;
        }
        Bytes expect = hashed ? wire::password_digest(secret) : to_bytes(secret);
        if (req.blob != expect)
            return Status::Refused;
        grant();
        return Status::Ok;
    }
    case AuthOp::FetchSecret:
        if (model != AuthModel::ClientSideValidation)
            return Status::Unsupported;
        resp.blob = hashed ? wire::password_digest(secret) : to_bytes(secret);
        return Status::Ok;
    case AuthOp::Verdict:
        if (model != AuthModel::ClientSideValidation)
            return Status::Unsupported;
        if (!(req.aux & wire::kVerdictAccept))
            return Status::Refused;
        grant();
        return Status::Ok;
    }
    return Status::Malformed;
}

Status Device::handle_download(ConnId conn, const Message& req)
{
    logicvm::AppImage image;
    try {
        image = logicvm::parse_image(req.blob);
    } catch (const logicvm::VmError&) {
        return Status::Malformed;
    }
    if (req.blob.size() > fixture_.flash_size)
        return Status::Refused;
    if (!logicvm::validate_app(image, fixture_.supervision).passed())
        return Status::Refused;

    bool to_flash = req.aux & 0x01;
    state_.app_ram = image;
    if (to_flash)
        state_.app_flash = image;
    ++downloads_;
    log(Effect::Kind::AppDownloaded, conn, to_flash ? "flash" : "ram");
    load_active(image);
    if (state_.run_state == RunState::Halted)
        state_.run_state = RunState::Running;
    return Status::Ok;
}

void Device::load_active(std::optional<logicvm::AppImage> app)
{
    active_ = std::move(app);
    init_pending_ = active_.has_value();
    kernel_ = {};
}

void Device::tick()
{
    if (state_.run_state == RunState::Running && active_)
        run_cycle(Phase::Normal);
}

void Device::run_cycle(Phase phase)
{
    if (!active_)
        return;
    if (init_pending_) {
        init_pending_ = false;
        apply_outcome(logicvm::run_init(*active_, fixture_.supervision, state_.variables, kernel_), phase);
        if (state_.run_state != RunState::Running || !active_)
            return;
    }
    ++scans_;
    apply_outcome(logicvm::run_scan_cycle(*active_, fixture_.supervision, state_.variables, kernel_), phase);
}

void Device::apply_outcome(const logicvm::VmOutcome& o, Phase phase)
{
    using K = logicvm::VmOutcome::Kind;
    last_outcome_ = o;
    const bool boot = phase == Phase::Boot;
    auto enter = [&](RunState s) {
        state_.run_state = s;
        log(Effect::Kind::RunStateChanged, 0, to_string(s));
    };
    switch (o.kind) {
    case K::Completed: return;
    case K::BackdoorSpawned:
        if (o.backdoor && o.backdoor->runtime_replaced) {
            log(Effect::Kind::AppFault, 0, "runtime replaced by " + o.backdoor->path);
            enter(boot ? RunState::NoRecoveryDos : RunState::Dos);
            return;
        }
        if (o.backdoor)
            log(Effect::Kind::BackdoorRegistered, 0,
                (o.backdoor->endpoint ? o.backdoor->endpoint->to_string() : std::string("-")) + " " +
                    o.backdoor->path);
        return;
    case K::IllegalTrapped:
    case K::PrivilegedTrapped:
        log(Effect::Kind::AppFault, 0, logicvm::describe(o));
        enter(RunState::Halted);
        return;
    case K::IllegalCrashed:
        log(Effect::Kind::AppFault, 0, logicvm::describe(o));
        enter(boot ? RunState::NoRecoveryDos : RunState::Dos);
        return;
    case K::WatchdogTripped:
        log(Effect::Kind::AppFault, 0, logicvm::describe(o));
        switch (fixture_.supervision.watchdog_reaction) {
        case logicvm::WatchdogReaction::HaltApp: enter(RunState::Halted); return;
        case logicvm::WatchdogReaction::Dos: enter(boot ? RunState::NoRecoveryDos : RunState::Dos); return;
        case logicvm::WatchdogReaction::Reboot:
            if (boot)
                enter(RunState::NoRecoveryDos);
            else
                reboot();
            return;
        }
    }
}

void Device::reboot()
{
    ++boot_count_;
    log(Effect::Kind::Rebooted, 0, "boot " + std::to_string(boot_count_));
    reset_variables();
    state_.app_ram.reset();
    state_.authenticated_peers.clear();
    state_.unlocked = false;
    state_.run_state = RunState::Running;
    last_outcome_.reset();
    load_active(state_.app_flash);
    run_cycle(Phase::Boot);
}

nlohmann::json Device::snapshot() const
{
    nlohmann::json vars = nlohmann::json::object();
    for (const auto& [k, v] : state_.variables)
        vars[k] = v;
    auto app_digest = [](const std::optional<logicvm::AppImage>& a) -> nlohmann::json {
        if (!a)
            return nullptr;
        auto bytes = logicvm::serialize(*a);
        return to_hex(wire::password_digest(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size())));
    };
    nlohmann::json backdoors = nlohmann::json::array();
    for (const auto& b : kernel_.backdoors)
        backdoors.push_back({{"endpoint", b.endpoint ? nlohmann::json(b.endpoint->to_string()) : nlohmann::json()},
                             {"path", b.path}});
    return {
        {"device", fixture_.name},
        {"mode", state_.mode},
        {"run_state", to_string(state_.run_state)},
        {"variables", vars},
        {"app_ram", app_digest(state_.app_ram)},
        {"app_flash", app_digest(state_.app_flash)},
        {"active_app", app_digest(active_)},
        {"boot_count", boot_count_},
        {"downloads", downloads_},
        {"scans", scans_},
        {"init_runs", kernel_.init_runs},
        {"backdoors", backdoors},
        {"last_outcome", last_outcome_ ? nlohmann::json(to_string(last_outcome_->kind)) : nlohmann::json()},
    };
}

}  // namespace plcg::plcsim
