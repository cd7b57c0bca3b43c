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

#include <algorithm>
#include <random>

namespace plcg::wire {

namespace {

void ensure_sodium()
{
    static const bool ok = sodium_init() >= 0;
    if (!ok)
        throw std::runtime_error("libsodium initialization failed");
}

// var id (2) + aux (1), plus blob length (2) for blob shapes
std::size_t fixed_fields_end(const MessageShape& s)
{
    return s.header.size() + 3 + (s.carries_blob ? 2 : 0);
}

Bytes filler(const ProtocolProfile& p, const MessageShape& s, bool response, std::size_t index)
{
    std::string seed = p.name + "/" + to_string(s.kind) + (response ? "/r" : "/c") + std::to_string(index);
    std::mt19937_64 rng(fnv1a(seed));
    Bytes out(s.length);
    for (auto& b : out)
        b = static_cast<std::uint8_t>(rng());
    return out;
}

void apply_keystream(const ProtocolProfile& p, std::span<std::uint8_t> body, const MessageShape& s)
{
    ensure_sodium();
    std::array<std::uint8_t, crypto_stream_xchacha20_NONCEBYTES> nonce{};
    std::copy_n(s.header.begin(), std::min(s.header.size(), nonce.size()), nonce.begin());
    std::array<std::uint8_t, crypto_stream_xchacha20_KEYBYTES> key{};
    std::copy(p.payload_key.begin(), p.payload_key.end(), key.begin());
    std::copy(p.payload_key.begin(), p.payload_key.end(), key.begin() + 16);
    crypto_stream_xchacha20_xor(body.data(), body.data(), body.size(), nonce.data(), key.data());
}

std::uint16_t trailer_value(const ProtocolProfile& p, ByteView covered)
{
    if (p.integrity.kind == IntegrityKind::Checksum16)
        return checksum16(covered);
    return mac16(p.integrity.key, covered);
}

struct ShapeRef {
    const MessageShape* shape;
    bool response;
    std::size_t index;
};

std::vector<ShapeRef> all_shapes(const ProtocolProfile& p)
{
    std::vector<ShapeRef> out;
    for (const auto& [k, s] : p.command_shapes)
        out.push_back({&s, false, 0});
    for (const auto& [k, v] : p.response_shapes)
        for (std::size_t i = 0; i < v.size(); ++i)
            out.push_back({&v[i], true, i});
    return out;
}

}  // namespace

std::string to_string(RequestKind k)
{
    switch (k) {
    case RequestKind::ReadId: return "ReadId";
    case RequestKind::UploadApp: return "UploadApp";
    case RequestKind::DownloadApp: return "DownloadApp";
    case RequestKind::ReadVar: return "ReadVar";
    case RequestKind::WriteVar: return "WriteVar";
    case RequestKind::Run: return "Run";
    case RequestKind::Stop: return "Stop";
    case RequestKind::Reset: return "Reset";
    case RequestKind::AuthRequest: return "AuthRequest";
    case RequestKind::Monitor: return "Monitor";
    case RequestKind::SetMode: return "SetMode";
    }
    return "?";
}

RequestKind request_kind_from_string(std::string_view s)
{
    for (auto k : kAllRequestKinds)
        if (to_string(k) == s)
            return k;
    throw std::invalid_argument("unknown request kind: " + std::string(s));
}

std::string to_string(Confidentiality c)
{
    switch (c) {
    case Confidentiality::Plaintext: return "Plaintext";
    case Confidentiality::HashedPassword: return "HashedPassword";
    case Confidentiality::EncryptedPayload: return "EncryptedPayload";
    }
    return "?";
}

std::string to_string(IntegrityKind k)
{
    switch (k) {
    case IntegrityKind::None: return "None";
    case IntegrityKind::Checksum16: return "Checksum16";
    case IntegrityKind::Mac16: return "Mac16";
    }
    return "?";
}

std::string to_string(AuthModel m)
{
    switch (m) {
    case AuthModel::NoPassword: return "NoPassword";
    case AuthModel::ClientSideValidation: return "ClientSideValidation";
    case AuthModel::ServerNoUserVerification: return "ServerNoUserVerification";
    case AuthModel::SecureProcess: return "SecureProcess";
    }
    return "?";
}

std::string to_string(Status s)
{
    switch (s) {
    case Status::Ok: return "Ok";
    case Status::Refused: return "Refused";
    case Status::IntegrityFailure: return "IntegrityFailure";
    case Status::Unsupported: return "Unsupported";
    case Status::Malformed: return "Malformed";
    }
    return "Status(" + std::to_string(static_cast<int>(s)) + ")";
}

Confidentiality confidentiality_from_string(std::string_view s)
{
    for (auto c : {Confidentiality::Plaintext, Confidentiality::HashedPassword, Confidentiality::EncryptedPayload})
        if (to_string(c) == s)
            return c;
    throw std::invalid_argument("unknown confidentiality: " + std::string(s));
}

IntegrityKind integrity_kind_from_string(std::string_view s)
{
    for (auto k : {IntegrityKind::None, IntegrityKind::Checksum16, IntegrityKind::Mac16})
        if (to_string(k) == s)
            return k;
    throw std::invalid_argument("unknown integrity: " + std::string(s));
}

AuthModel auth_model_from_string(std::string_view s)
{
    for (auto m : {AuthModel::NoPassword, AuthModel::ClientSideValidation, AuthModel::ServerNoUserVerification,
                   AuthModel::SecureProcess})
        if (to_string(m) == s)
            return m;
    throw std::invalid_argument("unknown auth model: " + std::string(s));
}

Message make_request(RequestKind kind, std::uint16_t var, std::optional<Value> value, std::uint8_t aux, Bytes blob)
{
    Message m;
    m.kind = kind;
    m.var = var;
    m.value = value;
    m.aux = aux;
    m.blob = std::move(blob);
    return m;
}

std::uint16_t variable_id(std::string_view name)
{
    auto h = fnv1a(name);
    return static_cast<std::uint16_t>(h ^ (h >> 16) ^ (h >> 32) ^ (h >> 48));
}

Bytes password_digest(std::string_view password)
{
    ensure_sodium();
    Bytes out(16);
    crypto_generichash(out.data(), out.size(), reinterpret_cast<const unsigned char*>(password.data()),
                       password.size(), nullptr, 0);
    return out;
}

std::uint16_t checksum16(ByteView data)
{
    std::uint32_t sum = 0;
    for (std::size_t i = 0; i < data.size(); i += 2) {
        std::uint32_t word = std::uint32_t{data[i]} << 8;
        if (i + 1 < data.size())
            word |= data[i + 1];
        sum += word;
        sum = (sum & 0xffff) + (sum >> 16);
    }
    return static_cast<std::uint16_t>(~sum & 0xffff);
}

std::uint16_t mac16(const Key16& key, ByteView data)
{
    ensure_sodium();
    std::array<std::uint8_t, crypto_shorthash_BYTES> out{};
    crypto_shorthash(out.data(), data.data(), data.size(), key.data());
    return static_cast<std::uint16_t>(out[0] | (out[1] << 8));
}

void validate(const ProtocolProfile& p)
{
    auto fail = [&](const std::string& why) {
        throw WireError(WireErrc::InvalidProfile, "profile '" + p.name + "': " + why);
    };
    if (p.name.empty())
        fail("empty name");
    if (p.value_width == 0 || p.value_width > 4)
        fail("value_width must be 1..4");
    auto check = [&](const MessageShape& s, const std::string& where) {
        std::size_t body_end = s.length - std::min(s.length, p.trailer_length());
        if (s.header.empty())
            fail(where + ": empty header");
        if (fixed_fields_end(s) > body_end)
            fail(where + ": length " + std::to_string(s.length) + " too small for fixed fields");
        if (s.value_position) {
            if (s.carries_blob)
                fail(where + ": blob shapes carry no value field");
            if (*s.value_position < fixed_fields_end(s))
                fail(where + ": value overlaps fixed fields");
            if (*s.value_position + p.value_width > body_end)
                fail(where + ": position + value_width exceeds length");
        }
    };
    for (const auto& [k, s] : p.command_shapes) {
        if (s.kind != k)
            fail("command shape kind mismatch for " + to_string(k));
        check(s, "command " + to_string(k));
    }
    for (const auto& [k, v] : p.response_shapes) {
        if (v.empty())
            fail("empty response list for " + to_string(k));
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (v[i].kind != k)
                fail("response shape kind mismatch for " + to_string(k));
            check(v[i], "response " + to_string(k) + "#" + std::to_string(i));
        }
    }
    // Two shapes sharing header and length would make decode ambiguous.
    auto shapes = all_shapes(p);
    for (std::size_t i = 0; i < shapes.size(); ++i)
        for (std::size_t j = i + 1; j < shapes.size(); ++j)
            if (shapes[i].shape->header == shapes[j].shape->header)
                fail("duplicate header " + to_hex(shapes[i].shape->header));
}

const MessageShape& shape_for(const ProtocolProfile& p, const Message& m)
{
    if (!m.is_response) {
        auto it = p.command_shapes.find(m.kind);
        if (it == p.command_shapes.end())
            throw WireError(WireErrc::UnsupportedRequest,
                            p.name + " has no command shape for " + to_string(m.kind));
        return it->second;
    }
    auto it = p.response_shapes.find(m.kind);
    if (it == p.response_shapes.end() || m.shape_index >= it->second.size())
        throw WireError(WireErrc::UnsupportedRequest,
                        p.name + " has no response shape " + std::to_string(m.shape_index) + " for " +
                            to_string(m.kind));
    return it->second[m.shape_index];
}

Bytes encode(const ProtocolProfile& p, const Message& m)
{
    const auto& s = shape_for(p, m);
    const std::size_t trailer = p.trailer_length();
    if (m.blob.size() > kMaxFrame)
        throw WireError(WireErrc::BlobTooLarge, "blob of " + std::to_string(m.blob.size()) + " bytes");
    if (!s.carries_blob && !m.blob.empty())
        throw WireError(WireErrc::UnsupportedRequest, to_string(m.kind) + " shape carries no blob");
    if (s.value_position && m.value && !fits_width(*m.value, p.value_width))
        throw WireError(WireErrc::ValueOverflow, "value " + std::to_string(*m.value) + " exceeds " +
                                                     std::to_string(p.value_width) + " bytes");

    Bytes body = filler(p, s, m.is_response, m.is_response ? m.shape_index : 0);
    body.resize(s.length - trailer);
    std::copy(s.header.begin(), s.header.end(), body.begin());
    std::size_t at = s.header.size();
    put_uint(std::span(body).subspan(at, 2), m.var, p.field_encoding(2));
    body[at + 2] = m.aux;
    if (s.carries_blob)
        put_uint(std::span(body).subspan(at + 3, 2), m.blob.size(), p.field_encoding(2));
    if (s.value_position)
        put_uint(std::span(body).subspan(*s.value_position, p.value_width), m.value.value_or(0),
                 p.value_encoding());
    body.insert(body.end(), m.blob.begin(), m.blob.end());

    if (p.confidentiality == Confidentiality::EncryptedPayload)
        apply_keystream(p, std::span(body).subspan(s.header.size()), s);

    if (trailer) {
        auto t = trailer_value(p, body);
        body.push_back(static_cast<std::uint8_t>(t >> 8));
        body.push_back(static_cast<std::uint8_t>(t & 0xff));
    }
    return body;
}

Bytes encode_command(const ProtocolProfile& p, const Message& request)
{
    Message m = request;
    m.is_response = false;
    m.shape_index = 0;
    return encode(p, m);
}

Message decode(const ProtocolProfile& p, ByteView payload)
{
    const std::size_t trailer = p.trailer_length();
    for (const auto& ref : all_shapes(p)) {
        const auto& s = *ref.shape;
        if (payload.size() < s.length || !std::equal(s.header.begin(), s.header.end(), payload.begin()))
            continue;
        if (!s.carries_blob && payload.size() != s.length)
            continue;

        Bytes body(payload.begin(), payload.end() - static_cast<std::ptrdiff_t>(trailer));
        Bytes clear = body;
        if (p.confidentiality == Confidentiality::EncryptedPayload)
            apply_keystream(p, std::span(clear).subspan(s.header.size()), s);

        std::size_t at = s.header.size();
        std::size_t blob_len = 0;
        if (s.carries_blob) {
            blob_len = get_uint(ByteView(clear).subspan(at + 3, 2), p.field_encoding(2));
            if (payload.size() != s.length + blob_len)
                continue;
        }

        if (trailer) {
            auto expect = trailer_value(p, body);
            auto got = static_cast<std::uint16_t>((payload[payload.size() - 2] << 8) | payload.back());
            if (expect != got) {
                WireError err(WireErrc::IntegrityFailure,
                              "integrity trailer mismatch on " + to_string(s.kind) +
                                  (ref.response ? " response" : " command"));
                err.kind = s.kind;
                err.is_response = ref.response;
                throw err;
            }
        }

        Message m;
        m.kind = s.kind;
        m.is_response = ref.response;
        m.shape_index = ref.index;
        m.var = static_cast<std::uint16_t>(get_uint(ByteView(clear).subspan(at, 2), p.field_encoding(2)));
        m.aux = clear[at + 2];
        if (s.value_position)
            m.value = static_cast<Value>(
                get_uint(ByteView(clear).subspan(*s.value_position, p.value_width), p.value_encoding()));
        std::size_t blob_at = s.length - trailer;
        m.blob.assign(clear.begin() + static_cast<std::ptrdiff_t>(blob_at),
                      clear.begin() + static_cast<std::ptrdiff_t>(blob_at + blob_len));
        return m;
    }
    throw WireError(WireErrc::UnknownShape,
                    p.name + ": no shape matches " + std::to_string(payload.size()) + "-byte payload");
}

Bytes frame(ByteView payload)
{
    if (payload.size() > kMaxFrame)
        throw WireError(WireErrc::BlobTooLarge, "frame of " + std::to_string(payload.size()) + " bytes");
    Bytes out;
    out.reserve(payload.size() + 2);
    out.push_back(static_cast<std::uint8_t>(payload.size() >> 8));
    out.push_back(static_cast<std::uint8_t>(payload.size() & 0xff));
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

void FrameReader::feed(ByteView chunk) { buffer_.insert(buffer_.end(), chunk.begin(), chunk.end()); }

std::optional<Bytes> FrameReader::next()
{
    if (buffer_.size() < 2)
        return std::nullopt;
    std::size_t len = (std::size_t{buffer_[0]} << 8) | buffer_[1];
    if (buffer_.size() < len + 2)
        return std::nullopt;
    Bytes out(buffer_.begin() + 2, buffer_.begin() + 2 + static_cast<std::ptrdiff_t>(len));
    buffer_.erase(buffer_.begin(), buffer_.begin() + 2 + static_cast<std::ptrdiff_t>(len));
    return out;
}

}  // namespace plcg::wire
