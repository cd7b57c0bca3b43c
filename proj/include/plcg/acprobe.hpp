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

#include "plcg/net.hpp"
#include "plcg/plcsim.hpp"
#include "plcg/workstation.hpp"

#include <json.hpp>

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

/// Rogue-workstation toolkit: capability probing per mode, authentication
/// process classification, and the client-patch and replay bypasses.
namespace plcg::acprobe {

enum class ProbeErrc { Unreachable, NotApplicable, InconclusiveTraffic };

class ProbeError : public std::runtime_error {
public:
    ProbeError(ProbeErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ProbeErrc code() const noexcept { return code_; }

private:
    ProbeErrc code_;
};

/// A device under test plus the harness controls a tester has on the bench:
/// power cycling into a fresh state, the mode key, and a legitimate operator
/// who knows the password. The probing code itself never reads the password.
class ProbeTarget {
public:
    explicit ProbeTarget(plcsim::DeviceFixture fixture, std::uint64_t seed = 0);

    const plcsim::DeviceFixture& fixture() const { return fixture_; }
    const wire::ProtocolProfile& profile() const { return profile_; }
    plcsim::Device& device() { return *device_; }
    net::Network& network() { return network_; }

    /// Fresh device (benign app in flash) in `mode`, or the initial mode.
    void reset(const std::optional<std::string>& mode = std::nullopt);
    ws::Session connect(const std::string& who);
    /// Tag names the tester learned from the project file.
    std::vector<std::string> known_variables() const;

    /// A legitimate operator logs in with the real password and runs `script`;
    /// returns the traffic of that session. The session stays open.
    wire::CaptureSet operator_session(const std::function<void(ws::Session&)>& script);

private:
    plcsim::DeviceFixture fixture_;
    wire::ProtocolProfile profile_;
    net::Network network_;
    std::unique_ptr<plcsim::Device> device_;
    std::unique_ptr<net::DeviceServer> server_;
    std::vector<ws::Session> operators_;
};

enum class Observed : std::uint8_t { Allowed, Bypassed, Denied, NotSupported };

std::string to_string(Observed o);
/// The table glyphs: ✓ ⊘ ⊗ N/A.
std::string glyph(Observed o);

struct ProbeCell {
    Observed verdict = Observed::Denied;
    std::string method;  // "unauthenticated", "client_patch", "replay" or empty
    std::string note;    // "read only", "public tags"
    wire::CaptureSet traffic;  // everything exchanged while probing this cell
};

struct ProbeMatrix {
    std::string device;
    std::vector<std::string> modes;
    std::vector<plcsim::Manipulation> manipulations;
    std::map<std::pair<std::string, plcsim::Manipulation>, ProbeCell> cells;

    const ProbeCell& at(const std::string& mode, plcsim::Manipulation m) const { return cells.at({mode, m}); }
};

nlohmann::json to_json(const ProbeMatrix& m);
std::string render_table(const ProbeMatrix& m);

/// For each (mode, manipulation): unauthenticated attempt, then the client
/// patch, then replay of a legitimate operator's command. Throws Unreachable
/// when the liveness ReadId goes unanswered.
ProbeMatrix probe_capabilities(ProbeTarget& target, const std::vector<std::string>& modes,
                               const std::vector<plcsim::Manipulation>& manipulations);

/// Marks the session patched; throws NotApplicable unless the device validates on the client.
ws::Session& bypass_client_side(ws::Session& session);

struct ReplayResult {
    bool executed = false;
    std::size_t replayed = 0;
    bool stateless_prereq = false;  // the profile carries no session binding
    std::vector<wire::Status> statuses;
    std::vector<plcsim::Effect::Kind> effects;  // device effects attributed to the replaying connection
};

/// Re-sends the privileged commands found after a successful login in
/// `capture` on a new, unauthenticated connection.
ReplayResult replay_privileged(const wire::CaptureSet& capture, ProbeTarget& target);

enum class AuthVerdict : std::uint8_t { ClientSideValidation, NoUserVerification, SecureProcess, NoAuthentication };

std::string to_string(AuthVerdict v);
/// The auth model a verdict corresponds to.
wire::AuthModel model_of(AuthVerdict v);

struct AuthClassification {
    AuthVerdict verdict = AuthVerdict::SecureProcess;
    std::vector<std::string> evidence;
};

/// Scripted login attempt with `password`; a successful login is followed by
/// the privileged candidates (stop, write, upload, download).
wire::CaptureSet record_auth_attempt(ProbeTarget& target, const std::string& password);

AuthClassification classify_auth_process(const wire::CaptureSet& traffic_wrong, const wire::CaptureSet& traffic_correct,
                                         ProbeTarget& target);

enum class PasswordTransmission : std::uint8_t { Plaintext, Hashed, NotFound };

std::string to_string(PasswordTransmission p);
PasswordTransmission classify_password_transmission(const wire::CaptureSet& capture, const std::string& password);

}  // namespace plcg::acprobe
