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

#include "plcg/diffanalysis.hpp"
#include "plcg/net.hpp"
#include "plcg/plcsim.hpp"

#include <json.hpp>

#include <array>
#include <optional>
#include <string>
#include <vector>

/// In-path attacker between workstation and PLC: passive sniffing and
/// value-field rewriting in either direction.
namespace plcg::mitm {

struct RewriteRule {
    Direction direction = Direction::WorkstationToPlc;  // WorkstationToPlc = FDI, PlcToWorkstation = spoofing
    diff::Signature signature;
    Value fake = 0;
    std::optional<Value> original;  // rewrite only when the field currently holds this

    const diff::LpPair& field() const { return signature.field; }
};

/// Throws std::invalid_argument when the fake value does not fit the field.
void validate(const RewriteRule& rule);

nlohmann::json to_json(const RewriteRule& r);
RewriteRule rule_from_json(const nlohmann::json& j);
std::vector<RewriteRule> rules_from_json(const nlohmann::json& j);

/// Values of every packet that matches the signature, in capture order.
std::vector<Value> sniff(const wire::CaptureSet& capture, const diff::Signature& signature);

/// Rewrites `payload` in place when the rule applies; true when it did.
bool apply(const RewriteRule& rule, Bytes& payload);

struct InjectResult {
    std::vector<Bytes> stream;
    std::size_t rewrites = 0;
};

InjectResult inject(const std::vector<Bytes>& stream, const RewriteRule& rule);

/// Relays frames to an upstream server, applying the active rules. Every
/// relayed frame is tee'd (as seen before rewriting) and both sides of each
/// direction are hashed so transparency can be checked.
class Proxy : public net::Server {
public:
    Proxy(net::Server& upstream, std::string address);

    std::vector<Bytes> on_frame(net::ConnId conn, ByteView payload) override;
    void on_close(net::ConnId conn) override { upstream_.on_close(conn); }
    std::string address() const override { return address_; }

    /// Replaces the rule set; rules never change in the middle of a frame.
    void set_rules(std::vector<RewriteRule> rules);
    const std::vector<RewriteRule>& rules() const { return rules_; }
    std::size_t rewrites() const { return rewrites_; }
    const wire::CaptureSet& tee() const { return tee_; }

    /// BLAKE2b-256 over the framed bytes entering (`outbound=false`) or leaving the proxy in one direction.
    std::array<std::uint8_t, 32> stream_hash(Direction d, bool outbound) const;

private:
    void relay(Direction d, Bytes& payload, const std::string& src, const std::string& dst);

    net::Server& upstream_;
    std::string address_;
    std::vector<RewriteRule> rules_;
    std::size_t rewrites_ = 0;
    wire::CaptureSet tee_;
    std::uint64_t seq_ = 0;
    // [direction][0 = in, 1 = out]
    std::array<std::array<Bytes, 2>, 2> streams_;
};

struct AttackVerdict {
    enum class Kind : std::uint8_t { Sniff, Fdi, Spoof };
    Kind kind = Kind::Sniff;
    bool success = false;
    std::vector<Value> evidence;
    std::string note;
};

std::string to_string(AttackVerdict::Kind k);
nlohmann::json to_json(const AttackVerdict& v);

/// Sniffing succeeds when the extracted values are exactly the ones the workstation sent.
AttackVerdict verify_sniff(const std::vector<Value>& extracted, const std::vector<Value>& sent);
/// Reads the device's stored value (ground truth) and compares it with the fake value.
AttackVerdict verify_fdi(const plcsim::Device& device, const std::string& variable, Value fake);
/// Succeeds when every workstation reading shows the fake value while the device holds something else.
AttackVerdict verify_spoof(const std::vector<Value>& readings, Value ground_truth, Value fake);

}  // namespace plcg::mitm
