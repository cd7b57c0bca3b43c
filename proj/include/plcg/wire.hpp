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

#include "plcg/common.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

/// Simulated proprietary PLC protocols: profiles, byte-exact codec, framing.
///
/// Every packet of a shape has the layout
///
///   [header][var id:2][aux:1][blob len:2]? ... [value]? ... [blob]? [trailer]?
///
/// where the bytes not covered by a field are a fixed per-shape filler. A
/// shape's `length` counts everything except the blob, so fixed-size shapes
/// are exactly `length` bytes long and blob shapes are `length + blob.size()`.
namespace plcg::wire {

enum class RequestKind : std::uint8_t {
    ReadId = 1,
    UploadApp,
    DownloadApp,
    ReadVar,
    WriteVar,
    Run,
    Stop,
    Reset,
    AuthRequest,
    Monitor,
    SetMode,
};

inline constexpr std::array kAllRequestKinds{
    RequestKind::ReadId, RequestKind::UploadApp, RequestKind::DownloadApp, RequestKind::ReadVar,
    RequestKind::WriteVar, RequestKind::Run, RequestKind::Stop, RequestKind::Reset,
    RequestKind::AuthRequest, RequestKind::Monitor, RequestKind::SetMode,
};

std::string to_string(RequestKind k);
RequestKind request_kind_from_string(std::string_view s);

enum class Confidentiality : std::uint8_t { Plaintext, HashedPassword, EncryptedPayload };
enum class IntegrityKind : std::uint8_t { None, Checksum16, Mac16 };
enum class AuthModel : std::uint8_t { NoPassword, ClientSideValidation, ServerNoUserVerification, SecureProcess };

std::string to_string(Confidentiality c);
std::string to_string(IntegrityKind k);
std::string to_string(AuthModel m);
Confidentiality confidentiality_from_string(std::string_view s);
IntegrityKind integrity_kind_from_string(std::string_view s);
AuthModel auth_model_from_string(std::string_view s);

using Key16 = std::array<std::uint8_t, 16>;

struct Integrity {
    IntegrityKind kind = IntegrityKind::None;
    Key16 key{};  // Mac16 only; never serialized into packets
};

struct MessageShape {
    RequestKind kind = RequestKind::ReadId;
    std::size_t length = 0;
    std::optional<std::size_t> value_position;
    Bytes header;
    bool carries_blob = false;
};

struct ProtocolProfile {
    std::string name;
    std::map<RequestKind, MessageShape> command_shapes;
    std::map<RequestKind, std::vector<MessageShape>> response_shapes;
    std::size_t value_width = 2;
    Endianness endianness = Endianness::Big;
    Confidentiality confidentiality = Confidentiality::Plaintext;
    Integrity integrity;
    bool stateless = false;
    AuthModel auth_model = AuthModel::SecureProcess;
    Key16 payload_key{};  // EncryptedPayload only

    std::size_t trailer_length() const { return integrity.kind == IntegrityKind::None ? 0 : 2; }
    Encoding value_encoding() const
    {
        return Encoding{static_cast<std::uint8_t>(value_width), endianness};
    }
    Encoding field_encoding(std::uint8_t width) const { return Encoding{width, endianness}; }
};

/// Response status codes carried in the aux byte of every response.
enum class Status : std::uint8_t {
    Ok = 0,
    Refused = 1,
    IntegrityFailure = 2,
    Unsupported = 3,
    Malformed = 4,
};

std::string to_string(Status s);

/// Sub-operations of AuthRequest, carried in the low nibble of aux.
enum class AuthOp : std::uint8_t { Login = 1, FetchSecret = 2, Verdict = 3 };
inline constexpr std::uint8_t kVerdictAccept = 0x80;

/// One decoded request or response.
struct Message {
    RequestKind kind = RequestKind::ReadId;
    bool is_response = false;
    std::size_t shape_index = 0;
    std::uint16_t var = 0;
    std::uint8_t aux = 0;
    std::optional<Value> value;
    Bytes blob;

    Status status() const { return static_cast<Status>(aux); }

    friend bool operator==(const Message&, const Message&) = default;
};

Message make_request(RequestKind kind, std::uint16_t var = 0, std::optional<Value> value = std::nullopt,
                     std::uint8_t aux = 0, Bytes blob = {});

enum class WireErrc {
    UnsupportedRequest,
    ValueOverflow,
    UnknownShape,
    IntegrityFailure,
    InvalidProfile,
    BlobTooLarge,
};

class WireError : public std::runtime_error {
public:
    WireError(WireErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    WireErrc code() const noexcept { return code_; }

    /// For IntegrityFailure: the shape that matched before the trailer check.
    std::optional<RequestKind> kind;
    bool is_response = false;

private:
    WireErrc code_;
};

/// Shape used to encode `m`; throws UnsupportedRequest when the profile lacks it.
const MessageShape& shape_for(const ProtocolProfile& profile, const Message& m);

Bytes encode(const ProtocolProfile& profile, const Message& m);
Bytes encode_command(const ProtocolProfile& profile, const Message& request);
Message decode(const ProtocolProfile& profile, ByteView payload);

/// Throws WireError{InvalidProfile} naming the first violated invariant.
void validate(const ProtocolProfile& profile);

/// Tag-addressed variables: the wire id is a 16-bit fold of the name.
std::uint16_t variable_id(std::string_view name);

/// The 16-byte digest used by HashedPassword profiles.
Bytes password_digest(std::string_view password);
std::uint16_t checksum16(ByteView data);
std::uint16_t mac16(const Key16& key, ByteView data);

/// Two-byte big-endian length prefix.
inline constexpr std::size_t kMaxFrame = 0xffff;
Bytes frame(ByteView payload);

/// Incremental splitter for a length-prefixed byte stream.
class FrameReader {
public:
    void feed(ByteView chunk);
    std::optional<Bytes> next();
    std::size_t buffered() const { return buffer_.size(); }

private:
    Bytes buffer_;
};

/// The eighteen protocol fixtures, one per row of the measured protocol table.
std::vector<ProtocolProfile> load_profile_fixtures();
/// Fixture lookup by name; also knows the auxiliary profiles used by scenarios.
ProtocolProfile profile_by_name(std::string_view name);
std::vector<std::string> profile_names();

nlohmann::json profile_to_json(const ProtocolProfile& profile);
ProtocolProfile profile_from_json(const nlohmann::json& j);

}  // namespace plcg::wire
