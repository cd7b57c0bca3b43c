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
#include "plcg/mitm.hpp"

#include <sodium.h>

namespace plcg::mitm {

void validate(const RewriteRule& rule)
{
    const auto& f = rule.field();
    if (rule.signature.length != f.length || rule.signature.mask.size() != f.length)
        throw std::invalid_argument("rule signature and field disagree on packet length");
    if (!fits_width(rule.fake, f.encoding.width))
        throw std::invalid_argument("fake value " + std::to_string(rule.fake) + " does not fit " +
                                    plcg::to_string(f.encoding));
    if (rule.original && !fits_width(*rule.original, f.encoding.width))
        throw std::invalid_argument("original filter does not fit the field");
}

nlohmann::json to_json(const RewriteRule& r)
{
    return {{"direction", plcg::to_string(r.direction)},
            {"signature", diff::to_json(r.signature)},
            {"fake", r.fake},
            {"original", r.original ? nlohmann::json(*r.original) : nlohmann::json()}};
}

RewriteRule rule_from_json(const nlohmann::json& j)
{
    RewriteRule r;
    try {
        r.direction = direction_from_string(j.at("direction").get<std::string>());
        r.signature = diff::signature_from_json(j.at("signature"));
        r.fake = j.at("fake").get<Value>();
        if (j.contains("original") && !j["original"].is_null())
            r.original = j["original"].get<Value>();
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("rewrite rule JSON: ") + e.what());
    }
    validate(r);
    return r;
}

std::vector<RewriteRule> rules_from_json(const nlohmann::json& j)
{
    std::vector<RewriteRule> out;
    const auto& list = j.is_object() && j.contains("rules") ? j["rules"] : j;
    if (!list.is_array())
        throw std::invalid_argument("rewrite rules must be a JSON array");
    for (const auto& r : list)
        out.push_back(rule_from_json(r));
    return out;
}

std::vector<Value> sniff(const wire::CaptureSet& capture, const diff::Signature& signature)
{
    std::vector<Value> out;
    for (const auto& rec : capture)
        if (signature.matches(rec.payload))
            out.push_back(diff::read_field(rec.payload, signature.field));
    return out;
}

bool apply(const RewriteRule& rule, Bytes& payload)
{
    if (!rule.signature.matches(payload))
        return false;
    const auto& f = rule.field();
    if (rule.original && diff::read_field(payload, f) != *rule.original)
        return false;
    put_uint(std::span(payload).subspan(f.position, f.encoding.width), rule.fake, f.encoding);
    return true;
}

InjectResult inject(const std::vector<Bytes>& stream, const RewriteRule& rule)
{
    InjectResult r;
    r.stream = stream;
    for (auto& p : r.stream)
        r.rewrites += apply(rule, p);
    return r;
}

Proxy::Proxy(net::Server& upstream, std::string address) : upstream_(upstream), address_(std::move(address)) {}

void Proxy::set_rules(std::vector<RewriteRule> rules)
{
    for (const auto& r : rules)
        validate(r);
    rules_ = std::move(rules);
}

void Proxy::relay(Direction d, Bytes& payload, const std::string& src, const std::string& dst)
{
    auto& s = streams_[static_cast<std::size_t>(d)];
    auto in = wire::frame(payload);
    s[0].insert(s[0].end(), in.begin(), in.end());

    wire::PacketRecord rec;
    rec.seq = seq_++;
    rec.direction = d;
    rec.src = src;
    rec.dst = dst;
    rec.payload = payload;
    tee_.push_back(std::move(rec));

    for (const auto& rule : rules_)
        if (rule.direction == d && apply(rule, payload)) {
            ++rewrites_;
            break;
        }
    auto out = wire::frame(payload);
    s[1].insert(s[1].end(), out.begin(), out.end());
}

std::vector<Bytes> Proxy::on_frame(net::ConnId conn, ByteView payload)
{
    Bytes request(payload.begin(), payload.end());
    const auto peer = "ws#" + std::to_string(conn);
    relay(Direction::WorkstationToPlc, request, peer, upstream_.address());
    auto replies = upstream_.on_frame(conn, request);
    for (auto& r : replies)
        relay(Direction::PlcToWorkstation, r, upstream_.address(), peer);
    return replies;
}

std::array<std::uint8_t, 32> Proxy::stream_hash(Direction d, bool outbound) const
{
    if (sodium_init() < 0)
        throw std::runtime_error("libsodium initialization failed");
    const auto& bytes = streams_[static_cast<std::size_t>(d)][outbound ? 1 : 0];
    std::array<std::uint8_t, 32> h{};
    crypto_generichash(h.data(), h.size(), bytes.data(), bytes.size(), nullptr, 0);
    return h;
}

std::string to_string(AttackVerdict::Kind k)
{
    switch (k) {
    case AttackVerdict::Kind::Sniff: return "Sniff";
    case AttackVerdict::Kind::Fdi: return "Fdi";
    case AttackVerdict::Kind::Spoof: return "Spoof";
    }
    return "?";
}

nlohmann::json to_json(const AttackVerdict& v)
{
    return {{"kind", to_string(v.kind)}, {"success", v.success}, {"evidence", v.evidence}, {"note", v.note}};
}

AttackVerdict verify_sniff(const std::vector<Value>& extracted, const std::vector<Value>& sent)
{
    AttackVerdict v{AttackVerdict::Kind::Sniff, false, extracted, {}};
    v.success = !extracted.empty() && extracted == sent;
    v.note = v.success ? "extracted values equal the values sent" : "extracted values differ from the values sent";
    return v;
}

AttackVerdict verify_fdi(const plcsim::Device& device, const std::string& variable, Value fake)
{
    AttackVerdict v{AttackVerdict::Kind::Fdi, false, {}, {}};
    auto truth = device.variable(variable);
    if (!truth) {
        v.note = "device has no variable " + variable;
        return v;
    }
    v.evidence = {*truth};
    v.success = *truth == fake;
    v.note = variable + " holds " + std::to_string(*truth);
    return v;
}

AttackVerdict verify_spoof(const std::vector<Value>& readings, Value ground_truth, Value fake)
{
    AttackVerdict v{AttackVerdict::Kind::Spoof, false, readings, {}};
    bool all_fake = !readings.empty();
    for (auto r : readings)
        all_fake = all_fake && r == fake;
    v.success = all_fake && ground_truth != fake;
    v.note = "device holds " + std::to_string(ground_truth);
    return v;
}

}  // namespace plcg::mitm
