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
#include "plcg/net.hpp"
#include "plcg/wire.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

/// The engineering workstation: manipulation requests, monitoring, and the
/// client half of each authentication process.
namespace plcg::ws {

enum class AuthState : std::uint8_t { Unauthenticated, Authenticated };

enum class WsErrc { WrongPassword, TransportError, Timeout, Refused, MalformedResponse, IntegrityFailure };

std::string to_string(WsErrc e);

class WsError : public std::runtime_error {
public:
    WsError(WsErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    WsErrc code() const noexcept { return code_; }

private:
    WsErrc code_;
};

struct Response {
    wire::Status status = wire::Status::Ok;
    std::vector<wire::Message> messages;

    bool executed() const { return status == wire::Status::Ok; }
    const wire::Message& first() const { return messages.front(); }
};

class Session {
public:
    Session(wire::ProtocolProfile profile, std::unique_ptr<net::Channel> channel);

    const wire::ProtocolProfile& profile() const { return profile_; }
    net::ConnId id() const { return channel_->id(); }
    AuthState auth_state() const { return auth_state_; }
    void set_auth_state(AuthState s) { auth_state_ = s; }
    /// Forces the local password check to accept (a patched programming tool).
    bool client_patch = false;

    /// One request/response exchange. Throws WsError{Timeout, MalformedResponse, IntegrityFailure}.
    Response exchange(const wire::Message& request);
    /// Sends raw bytes as they were captured; same error contract as exchange().
    Response exchange_raw(ByteView payload);
    void close() { channel_->close(); }

private:
    Response collect(std::vector<Bytes> replies);

    wire::ProtocolProfile profile_;
    std::unique_ptr<net::Channel> channel_;
    AuthState auth_state_ = AuthState::Unauthenticated;
};

/// Runs the handshake the profile's auth model dictates; throws WsError{WrongPassword} on rejection.
void authenticate(Session& session, const std::string& password);

/// Issues one request; a Refused status is returned, not thrown.
Response issue_request(Session& session, const wire::Message& request);

Response read_id(Session& s);
Response upload(Session& s);
Response download(Session& s, const logicvm::AppImage& image, bool flash = false);
Response read_var(Session& s, const std::string& var);
Response write_var(Session& s, const std::string& var, Value v);
Response run(Session& s);
Response stop(Session& s);
Response reset(Session& s);
Response set_mode(Session& s, const std::string& mode);

struct Reading {
    std::string var;
    std::vector<Value> values;  // one per valued response shape
};

/// `cycles` rounds of Monitor requests over `vars`, in order. Throws
/// WsError{Timeout} when the device goes silent and WsError{Refused} on refusal.
std::vector<Reading> monitor_loop(Session& s, const std::vector<std::string>& vars, std::size_t cycles);

}  // namespace plcg::ws
