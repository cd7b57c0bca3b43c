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

#include "plcg/logicvm.hpp"
#include "plcg/wire.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace plcg::plcsim {

enum class Manipulation : std::uint8_t { ReadId, UploadApp, ReadWriteVars, RunStop, DownloadApp, ModeChange };

/// The five columns of a capability probe, in table order.
inline constexpr std::array kProbedManipulations{
    Manipulation::ReadId, Manipulation::UploadApp, Manipulation::ReadWriteVars,
    Manipulation::RunStop, Manipulation::DownloadApp,
};

std::string to_string(Manipulation m);
Manipulation manipulation_from_string(std::string_view s);
/// AuthRequest is ungated and maps to nothing.
std::optional<Manipulation> manipulation_for(wire::RequestKind k);

enum class Requirement : std::uint8_t { Open, AuthRequired, Denied, NotSupported };

std::string to_string(Requirement r);
Requirement requirement_from_string(std::string_view s);

class CapabilityMatrix {
public:
    void set(const std::string& mode, Manipulation m, Requirement r) { entries_[{mode, m}] = r; }
    /// Throws std::out_of_range for a missing pair.
    Requirement at(const std::string& mode, Manipulation m) const;
    bool complete_for(const std::vector<std::string>& modes) const;
    const std::map<std::pair<std::string, Manipulation>, Requirement>& entries() const { return entries_; }

private:
    std::map<std::pair<std::string, Manipulation>, Requirement> entries_;
};

enum class RunState : std::uint8_t { Running, Stopped, Halted, Dos, NoRecoveryDos };

std::string to_string(RunState s);

struct VariableSpec {
    std::string name;
    Value initial = 0;
    bool is_public = true;
    bool read_only = false;
};

struct DeviceFixture {
    std::string name;
    std::string profile;
    std::optional<wire::AuthModel> auth_override;
    std::string identity;
    std::optional<std::string> password;
    std::vector<std::string> modes;
    std::string initial_mode;
    CapabilityMatrix capabilities;
    std::set<std::string> read_only_modes;
    std::vector<VariableSpec> variables;
    std::string scratch_variable = "scratch";
    logicvm::SupervisionPolicy supervision;
    std::size_t flash_size = 64 * 1024;
    std::optional<logicvm::AppImage> flash_app;
};

/// Throws std::invalid_argument naming the broken invariant.
void validate(const DeviceFixture& f);

/// The profile the device actually speaks: its protocol fixture with the auth override applied.
wire::ProtocolProfile effective_profile(const DeviceFixture& f);

/// One fixture per PLC row of the access-control table (nineteen devices).
std::vector<DeviceFixture> load_device_fixtures();
/// Knows every PLC fixture plus "hardened_like" and "bench:<profile>".
DeviceFixture device_fixture_by_name(std::string_view name);
std::vector<std::string> device_fixture_names();
/// Every manipulation Open in a single "bench" mode; keeps supervision and variables.
DeviceFixture bench_twin(const DeviceFixture& f);
DeviceFixture make_bench_fixture(const std::string& profile);

nlohmann::json fixture_to_json(const DeviceFixture& f);
DeviceFixture fixture_from_json(const nlohmann::json& j);

using ConnId = std::uint64_t;

struct Effect {
    enum class Kind : std::uint8_t {
        IdRead,
        AppUploaded,
        VarRead,
        VarWritten,
        RunStateChanged,
        AppDownloaded,
        ModeChanged,
        Rebooted,
        Authenticated,
        BackdoorRegistered,
        AppFault,
    };
    Kind kind;
    ConnId conn = 0;  // 0 for effects of the device itself
    std::string detail;
};

std::string to_string(Effect::Kind k);

struct DeviceState {
    std::string mode;
    std::map<std::string, Value> variables;
    std::optional<logicvm::AppImage> app_ram;
    std::optional<logicvm::AppImage> app_flash;
    RunState run_state = RunState::Running;
    std::set<ConnId> authenticated_peers;
    bool unlocked = false;  // server-side verdict of a stateless protocol
};

/// A simulated PLC. Deterministic; callers serialize access.
class Device {
public:
    explicit Device(DeviceFixture fixture);

    const DeviceFixture& fixture() const { return fixture_; }
    const wire::ProtocolProfile& profile() const { return profile_; }
    const DeviceState& state() const { return state_; }

    /// Responses to one inbound payload; empty when the device is unresponsive or drops the packet.
    std::vector<Bytes> handle_packet(ConnId conn, ByteView payload);
    /// One scan cycle of the loaded application, when running.
    void tick();
    void reboot();
    void connection_closed(ConnId conn);

    /// Harness-side controls (hardware key, local panel).
    void set_mode(const std::string& mode);
    void set_variable(const std::string& name, Value v);

    std::optional<Value> variable(const std::string& name) const;
    const std::optional<logicvm::AppImage>& active_app() const { return active_; }
    const std::vector<Effect>& effects() const { return effects_; }
    const logicvm::VmKernel& kernel() const { return kernel_; }
    std::optional<logicvm::VmOutcome> last_outcome() const { return last_outcome_; }
    std::uint64_t boot_count() const { return boot_count_; }
    std::uint64_t downloads() const { return downloads_; }
    std::uint64_t scans() const { return scans_; }
    bool responsive() const { return state_.run_state != RunState::Dos && state_.run_state != RunState::NoRecoveryDos; }

    nlohmann::json snapshot() const;

private:
    enum class Phase { Normal, Boot };

    wire::Message respond(const wire::Message& req, wire::Status st) const;
    bool authorized(ConnId conn) const;
    wire::Status handle_auth(ConnId conn, const wire::Message& req, wire::Message& resp);
    wire::Status handle_var(ConnId conn, const wire::Message& req, wire::Message& resp);
    wire::Status handle_download(ConnId conn, const wire::Message& req);
    void load_active(std::optional<logicvm::AppImage> app);
    void apply_outcome(const logicvm::VmOutcome& o, Phase phase);
    void run_cycle(Phase phase);
    void reset_variables();
    const VariableSpec* spec_for(const std::string& name) const;
    std::optional<std::string> name_for(std::uint16_t id) const;
    void log(Effect::Kind k, ConnId conn, std::string detail);

    DeviceFixture fixture_;
    wire::ProtocolProfile profile_;
    DeviceState state_;
    std::optional<logicvm::AppImage> active_;
    bool init_pending_ = false;
    logicvm::VmKernel kernel_;
    std::optional<logicvm::VmOutcome> last_outcome_;
    std::vector<Effect> effects_;
    std::uint64_t boot_count_ = 0;
    std::uint64_t downloads_ = 0;
    std::uint64_t scans_ = 0;
};

}  // namespace plcg::plcsim
