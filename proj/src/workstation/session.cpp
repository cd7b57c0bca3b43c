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
#include "plcg/workstation.hpp"

namespace plcg::ws {

using wire::AuthOp;
using wire::Message;
using wire::RequestKind;
using wire::Status;

std::string to_string(WsErrc e)
{
    switch (e) {
    case WsErrc::WrongPassword: return "WrongPassword";
    case WsErrc::TransportError: return "TransportError";
    case WsErrc::Timeout: return "Timeout";
    case WsErrc::Refused: return "Refused";
    case WsErrc::MalformedResponse: return "MalformedResponse";
    case WsErrc::IntegrityFailure: return "IntegrityFailure";
    }
    return "?";
}

Session::Session(wire::ProtocolProfile profile, std::unique_ptr<net::Channel> channel)
    : profile_(std::move(profile)), channel_(std::move(channel))
{
}

Response Session::exchange(const Message& request)
{
    return exchange_raw(wire::encode_command(profile_, request));
}

Response Session::exchange_raw(ByteView payload)
{
    std::vector<Bytes> replies;
    try {
        replies = channel_->transact(payload);
    } catch (const net::TransportError& e) {
        throw WsError(WsErrc::TransportError, e.what());
    }
    return collect(std::move(replies));
}

Response Session::collect(std::vector<Bytes> replies)
{
    if (replies.empty())
        throw WsError(WsErrc::Timeout, "no response within " + std::to_string(net::kTimeoutTicks) + " ticks");
    Response r;
    for (const auto& bytes : replies) {
        try {
            auto m = wire::decode(profile_, bytes);
            if (!m.is_response)
                throw WsError(WsErrc::MalformedResponse, "device echoed a command");
            r.messages.push_back(std::move(m));
        } catch (const wire::WireError& e) {
            if (e.code() == wire::WireErrc::IntegrityFailure)
                throw WsError(WsErrc::IntegrityFailure, e.what());
            throw WsError(WsErrc::MalformedResponse, e.what());
        }
    }
    r.status = r.messages.front().status();
    return r;
}

void authenticate(Session& s, const std::string& password)
{
    const auto& p = s.profile();
    const bool hashed = p.confidentiality == wire::Confidentiality::HashedPassword;
    const Bytes offered = hashed ? wire::password_digest(password) : to_bytes(password);

    if (p.auth_model == wire::AuthModel::ClientSideValidation) {
        auto secret = s.exchange(wire::make_request(RequestKind::AuthRequest, 0, std::nullopt,
                                                    static_cast<std::uint8_t>(AuthOp::FetchSecret)));
        if (!secret.executed())
            throw WsError(WsErrc::Refused, "device refused to hand out its secret");
        // The local check; the patched tool ignores its result.
        bool match = secret.first().blob == offered;
        if (!match && !s.client_patch)
            throw WsError(WsErrc::WrongPassword, "password rejected by the local check");
        auto verdict = s.exchange(wire::make_request(
            RequestKind::AuthRequest, 0, std::nullopt,
            static_cast<std::uint8_t>(static_cast<std::uint8_t>(AuthOp::Verdict) | wire::kVerdictAccept)));
        if (!verdict.executed())
            throw WsError(WsErrc::WrongPassword, "device rejected the verdict");
        s.set_auth_state(AuthState::Authenticated);
        return;
    }

    auto r = s.exchange(wire::make_request(RequestKind::AuthRequest, 0, std::nullopt,
                                           static_cast<std::uint8_t>(AuthOp::Login), offered));
    if (!r.executed())
        throw WsError(WsErrc::WrongPassword, "device answered " + wire::to_string(r.status));
    s.set_auth_state(AuthState::Authenticated);
}

Response issue_request(Session& s, const Message& request) { return s.exchange(request); }

Response read_id(Session& s) { return issue_request(s, wire::make_request(RequestKind::ReadId)); }

Response upload(Session& s) { return issue_request(s, wire::make_request(RequestKind::UploadApp)); }

Response download(Session& s, const logicvm::AppImage& image, bool flash)
{
    return issue_request(s, wire::make_request(RequestKind::DownloadApp, 0, std::nullopt, flash ? 1 : 0,
                                               logicvm::serialize(image)));
}

Response read_var(Session& s, const std::string& var)
{
    return issue_request(s, wire::make_request(RequestKind::ReadVar, wire::variable_id(var)));
}

Response write_var(Session& s, const std::string& var, Value v)
{
    return issue_request(s, wire::make_request(RequestKind::WriteVar, wire::variable_id(var), v));
}

Response run(Session& s) { return issue_request(s, wire::make_request(RequestKind::Run)); }
Response stop(Session& s) { return issue_request(s, wire::make_request(RequestKind::Stop)); }
Response reset(Session& s) { return issue_request(s, wire::make_request(RequestKind::Reset)); }

Response set_mode(Session& s, const std::string& mode)
{
    return issue_request(s, wire::make_request(RequestKind::SetMode, 0, std::nullopt, 0, to_bytes(mode)));
}

std::vector<Reading> monitor_loop(Session& s, const std::vector<std::string>& vars, std::size_t cycles)
{
    std::vector<Reading> out;
    for (std::size_t c = 0; c < cycles; ++c) {
        for (const auto& var : vars) {
            auto r = issue_request(s, wire::make_request(RequestKind::Monitor, wire::variable_id(var)));
            if (!r.executed())
                throw WsError(WsErrc::Refused, "monitor of " + var + ": " + wire::to_string(r.status));
            Reading reading{var, {}};
            for (const auto& m : r.messages)
                if (m.value)
                    reading.values.push_back(*m.value);
            out.push_back(std::move(reading));
        }
    }
    return out;
}

}  // namespace plcg::ws
