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
#include "plcg/wire.hpp"

#include <sodium.h>

namespace plcg::wire {

namespace {

using Lp = std::pair<std::size_t, std::size_t>;

constexpr std::size_t kPlainCommand = 16;
constexpr std::size_t kPlainResponse = 14;

struct Row {
    const char* name;
    Endianness endian;
    Lp command;
    std::vector<Lp> monitor;
    Confidentiality conf = Confidentiality::Plaintext;
    IntegrityKind integrity = IntegrityKind::None;
    bool stateless = false;
    AuthModel auth = AuthModel::SecureProcess;
    std::optional<Lp> write_echo;
    std::size_t width = 2;
};

Key16 derive_key(std::string_view label, std::string_view name)
{
    if (sodium_init() < 0)
        throw std::runtime_error("libsodium initialization failed");
    std::string input = std::string(label) + ":" + std::string(name);
    Key16 key{};
    crypto_generichash(key.data(), key.size(), reinterpret_cast<const unsigned char*>(input.data()),
                       input.size(), nullptr, 0);
    return key;
}

MessageShape shape(const std::array<std::uint8_t, 2>& magic, RequestKind kind, bool response, std::size_t index,
                   std::size_t length, std::optional<std::size_t> position = std::nullopt, bool blob = false)
{
    MessageShape s;
    s.kind = kind;
    s.length = length;
    s.value_position = position;
    s.carries_blob = blob;
    auto k = static_cast<std::uint8_t>(kind);
    s.header = {magic[0], magic[1], static_cast<std::uint8_t>(response ? (k | 0x80) : k),
                static_cast<std::uint8_t>(index)};
    return s;
}

ProtocolProfile build(const Row& r)
{
    ProtocolProfile p;
    p.name = r.name;
    p.endianness = r.endian;
    p.value_width = r.width;
    p.confidentiality = r.conf;
    p.integrity.kind = r.integrity;
    if (r.integrity == IntegrityKind::Mac16)
        p.integrity.key = derive_key("mac16", r.name);
    if (r.conf == Confidentiality::EncryptedPayload)
        p.payload_key = derive_key("payload", r.name);
    p.stateless = r.stateless;
    p.auth_model = r.auth;

    auto h = fnv1a(r.name);
    std::array<std::uint8_t, 2> magic{static_cast<std::uint8_t>(h >> 8), static_cast<std::uint8_t>(h)};

    for (auto k : kAllRequestKinds) {
        bool blob = k == RequestKind::DownloadApp || k == RequestKind::AuthRequest || k == RequestKind::SetMode;
        if (k == RequestKind::WriteVar)
            p.command_shapes[k] = shape(magic, k, false, 0, r.command.first, r.command.second);
        else
            p.command_shapes[k] = shape(magic, k, false, 0, kPlainCommand, std::nullopt, blob);
    }

    for (auto k : kAllRequestKinds) {
        auto& out = p.response_shapes[k];
        switch (k) {
        case RequestKind::Monitor:
            for (std::size_t i = 0; i < r.monitor.size(); ++i)
                out.push_back(shape(magic, k, true, i, r.monitor[i].first, r.monitor[i].second));
            break;
        case RequestKind::ReadVar:
            out.push_back(shape(magic, k, true, 0, r.monitor[0].first, r.monitor[0].second));
            break;
        case RequestKind::WriteVar:
            if (r.write_echo)
                out.push_back(shape(magic, k, true, 0, r.write_echo->first, r.write_echo->second));
            else
                out.push_back(shape(magic, k, true, 0, kPlainResponse));
            break;
        case RequestKind::ReadId:
        case RequestKind::UploadApp:
        case RequestKind::AuthRequest:
            out.push_back(shape(magic, k, true, 0, kPlainResponse, std::nullopt, true));
            break;
        default:
            out.push_back(shape(magic, k, true, 0, kPlainResponse));
        }
    }
    validate(p);
    return p;
}

const std::vector<Row>& rows()
{
    using E = Endianness;
    using C = Confidentiality;
    using A = AuthModel;
    static const std::vector<Row> table = {
        {"ge_srtp_like", E::Big, {76, 74}, {{56, 44}}},
        {"m241_like", E::Little, {96, 94}, {{272, 270}}},
        {"m258_like", E::Little, {124, 82}, {{176, 58}}},
        {"m340_like", E::Big, {46, 37}, {{22, 13}}, C::HashedPassword, IntegrityKind::None, false,
         A::ClientSideValidation},
        {"m580_like", E::Big, {46, 37}, {{22, 13}}, C::HashedPassword, IntegrityKind::None, false,
         A::ClientSideValidation},
        {"melsoft_like", E::Little, {89, 85}, {{93, 85}}, C::Plaintext, IntegrityKind::None, true,
         A::ServerNoUserVerification},
        {"fins_like", E::Big, {20, 18}, {{17, 15}}},
        {"s7comm_like", E::Big, {71, 69}, {{55, 53}, {79, 77}}, C::Plaintext, IntegrityKind::None, true,
         A::ServerNoUserVerification},
        {"s7commplus_like", E::Big, {153, 124}, {{225, 185}}, C::HashedPassword, IntegrityKind::Mac16},
        {"pccc_like", E::Little, {71, 69}, {{70, 62}}},
        {"pcccplus_like", E::Little, {99, 71}, {{433, 96}}, C::Plaintext, IntegrityKind::Mac16, false,
         A::ClientSideValidation},
        {"wago_like", E::Little, {42, 40}, {{79, 73}}},
        {"abb_like", E::Little, {24, 22}, {{19, 17}}},
        {"haiwell_like", E::Big, {12, 10}, {{12, 10}}, C::HashedPassword, IntegrityKind::None, false,
         A::ClientSideValidation},
        {"na300_like", E::Little, {16, 12}, {{571, 297}}, C::HashedPassword, IntegrityKind::None, false,
         A::ClientSideValidation, Lp{16, 12}},
        {"na400_like", E::Little, {16, 12}, {{639, 357}}, C::HashedPassword, IntegrityKind::None, false,
         A::ClientSideValidation, Lp{16, 12}},
        {"tristation_like", E::Little, {30, 24}, {{42, 24}}, C::Plaintext, IntegrityKind::None, false,
         A::ClientSideValidation},
        {"hollysys_like", E::Little, {24, 22}, {{19, 17}}},
    };
    return table;
}

// Scenario-only profiles that are not rows of the protocol table.
const std::vector<Row>& aux_rows()
{
    static const std::vector<Row> table = {
        {"ge_srtp_dword_like", Endianness::Little, {78, 74}, {{56, 44}}, Confidentiality::Plaintext,
         IntegrityKind::None, false, AuthModel::SecureProcess, std::nullopt, 4},
        {"sealed_like", Endianness::Big, {40, 30}, {{40, 30}}, Confidentiality::EncryptedPayload,
         IntegrityKind::Checksum16},
    };
    return table;
}

}  // namespace

std::vector<ProtocolProfile> load_profile_fixtures()
{
    std::vector<ProtocolProfile> out;
    for (const auto& r : rows())
        out.push_back(build(r));
    return out;
}

ProtocolProfile profile_by_name(std::string_view name)
{
    for (const auto* table : {&rows(), &aux_rows()})
        for (const auto& r : *table)
            if (name == r.name)
                return build(r);
    throw std::invalid_argument("unknown profile: " + std::string(name));
}

std::vector<std::string> profile_names()
{
    std::vector<std::string> out;
    for (const auto* table : {&rows(), &aux_rows()})
        for (const auto& r : *table)
            out.emplace_back(r.name);
    return out;
}

}  // namespace plcg::wire
