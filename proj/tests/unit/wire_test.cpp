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
#include "plcg/capture.hpp"
#include "plcg/wire.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

using namespace plcg;
using namespace plcg::wire;

namespace {

using Lp = std::pair<std::size_t, std::size_t>;

struct Expected {
    const char* name;
    Lp command;
    std::set<Lp> response;
};

// Written out by hand from the measured protocol table, independently of the fixture code.
const std::vector<Expected> kTable = {
    {"ge_srtp_like", {76, 74}, {{56, 44}}},
    {"m241_like", {96, 94}, {{272, 270}}},
    {"m258_like", {124, 82}, {{176, 58}}},
    {"m340_like", {46, 37}, {{22, 13}}},
    {"m580_like", {46, 37}, {{22, 13}}},
    {"melsoft_like", {89, 85}, {{93, 85}}},
    {"fins_like", {20, 18}, {{17, 15}}},
    {"s7comm_like", {71, 69}, {{55, 53}, {79, 77}}},
    {"s7commplus_like", {153, 124}, {{225, 185}}},
    {"pccc_like", {71, 69}, {{70, 62}}},
    {"pcccplus_like", {99, 71}, {{433, 96}}},
    {"wago_like", {42, 40}, {{79, 73}}},
    {"abb_like", {24, 22}, {{19, 17}}},
    {"haiwell_like", {12, 10}, {{12, 10}}},
    {"na300_like", {16, 12}, {{16, 12}, {571, 297}}},
    {"na400_like", {16, 12}, {{16, 12}, {639, 357}}},
    {"tristation_like", {30, 24}, {{42, 24}}},
    {"hollysys_like", {24, 22}, {{19, 17}}},
};

std::set<Lp> valued_response_geometry(const ProtocolProfile& p)
{
    std::set<Lp> out;
    for (auto k : {RequestKind::WriteVar, RequestKind::Monitor})
        for (const auto& s : p.response_shapes.at(k))
            if (s.value_position)
                out.insert({s.length, *s.value_position});
    return out;
}

Message random_message(const ProtocolProfile& p, std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> coin(0, 1);
    Message m;
    m.kind = kAllRequestKinds[rng() % kAllRequestKinds.size()];
    m.is_response = coin(rng) == 1;
    const auto& s = m.is_response ? p.response_shapes.at(m.kind)[rng() % p.response_shapes.at(m.kind).size()]
                                  : p.command_shapes.at(m.kind);
    if (m.is_response)
        m.shape_index = static_cast<std::size_t>(&s - p.response_shapes.at(m.kind).data());
    m.var = static_cast<std::uint16_t>(rng());
    m.aux = static_cast<std::uint8_t>(rng());
    if (s.value_position)
        m.value = static_cast<Value>(rng() & ((p.value_width >= 4) ? 0xffffffffu : ((1u << (8 * p.value_width)) - 1)));
    if (s.carries_blob) {
        m.blob.resize(rng() % 64);
        for (auto& b : m.blob)
            b = static_cast<std::uint8_t>(rng());
    }
    return m;
}

}  // namespace

TEST(WireFixtures, EighteenRowsMatchTable)
{
    auto profiles = load_profile_fixtures();
    ASSERT_EQ(profiles.size(), kTable.size());
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        const auto& p = profiles[i];
        SCOPED_TRACE(p.name);
        EXPECT_EQ(p.name, kTable[i].name);
        const auto& w = p.command_shapes.at(RequestKind::WriteVar);
        EXPECT_EQ(Lp(w.length, w.value_position.value()), kTable[i].command);
        EXPECT_EQ(valued_response_geometry(p), kTable[i].response);
    }
}

TEST(WireFixtures, OnlyTwoProfilesCarryIntegrity)
{
    std::set<std::string> mac;
    for (const auto& p : load_profile_fixtures()) {
        if (p.integrity.kind != IntegrityKind::None)
            mac.insert(p.name);
        EXPECT_NE(p.confidentiality, Confidentiality::EncryptedPayload) << p.name;
    }
    EXPECT_EQ(mac, (std::set<std::string>{"s7commplus_like", "pcccplus_like"}));
}

TEST(WireEncode, SrtpWriteVarPlacesValueAt74)
{
    auto p = profile_by_name("ge_srtp_like");
    auto bytes = encode_command(p, make_request(RequestKind::WriteVar, 7, 0x1234));
    ASSERT_EQ(bytes.size(), 76u);
    EXPECT_EQ(bytes[74], 0x12);
    EXPECT_EQ(bytes[75], 0x34);
}

TEST(WireEncode, ZeroValueEncodesZeroBytes)
{
    for (const auto& p : load_profile_fixtures()) {
        auto bytes = encode_command(p, make_request(RequestKind::WriteVar, 1, 0));
        auto pos = *p.command_shapes.at(RequestKind::WriteVar).value_position;
        EXPECT_EQ(bytes[pos], 0) << p.name;
        EXPECT_EQ(bytes[pos + 1], 0) << p.name;
    }
}

TEST(WireEncode, GeometryHoldsForEveryProfileAndEncoding)
{
    for (const auto& p : load_profile_fixtures()) {
        const auto& w = p.command_shapes.at(RequestKind::WriteVar);
        for (Value v : {0x1234u, 0x3456u, 0x5678u}) {
            auto bytes = encode_command(p, make_request(RequestKind::WriteVar, 9, v));
            ASSERT_EQ(bytes.size(), w.length) << p.name;
            auto hi = static_cast<std::uint8_t>(v >> 8);
            auto lo = static_cast<std::uint8_t>(v);
            auto at = *w.value_position;
            if (p.endianness == Endianness::Big) {
                EXPECT_EQ(bytes[at], hi);
                EXPECT_EQ(bytes[at + 1], lo);
            } else {
                EXPECT_EQ(bytes[at], lo);
                EXPECT_EQ(bytes[at + 1], hi);
            }
        }
    }
}

TEST(WireEncode, UnsupportedAndOverflow)
{
    auto p = profile_by_name("fins_like");
    p.command_shapes.erase(RequestKind::Reset);
    try {
        encode_command(p, make_request(RequestKind::Reset));
        FAIL() << "expected UnsupportedRequest";
    } catch (const WireError& e) {
        EXPECT_EQ(e.code(), WireErrc::UnsupportedRequest);
    }
    try {
        encode_command(p, make_request(RequestKind::WriteVar, 1, 0x10000));
        FAIL() << "expected ValueOverflow";
    } catch (const WireError& e) {
        EXPECT_EQ(e.code(), WireErrc::ValueOverflow);
    }
}

TEST(WireDecode, RoundTripRandomMessages)
{
    std::mt19937_64 rng(20260101);
    auto profiles = load_profile_fixtures();
    profiles.push_back(profile_by_name("ge_srtp_dword_like"));
    profiles.push_back(profile_by_name("sealed_like"));
    for (const auto& p : profiles) {
        for (int i = 0; i < 1000; ++i) {
            auto m = random_message(p, rng);
            auto bytes = encode(p, m);
            const auto& s = shape_for(p, m);
            ASSERT_EQ(bytes.size(), s.length + m.blob.size()) << p.name;
            ASSERT_EQ(decode(p, bytes), m) << p.name << " " << to_string(m.kind);
        }
    }
}

TEST(WireDecode, HaiwellWriteVarRoundTrip)
{
    auto p = profile_by_name("haiwell_like");
    auto req = make_request(RequestKind::WriteVar, variable_id("v1"), 0x5678);
    auto bytes = encode_command(p, req);
    EXPECT_EQ(bytes.size(), 12u);
    EXPECT_EQ(decode(p, bytes), req);
}

TEST(WireDecode, FlipHarness)
{
    for (const auto& p : load_profile_fixtures()) {
        SCOPED_TRACE(p.name);
        auto bytes = encode_command(p, make_request(RequestKind::WriteVar, 3, 0x3456));
        auto pos = *p.command_shapes.at(RequestKind::WriteVar).value_position;
        for (std::size_t i = pos; i < pos + p.value_width; ++i) {
            auto bad = bytes;
            bad[i] ^= 0x01;
            if (p.integrity.kind == IntegrityKind::Mac16) {
                try {
                    decode(p, bad);
                    ADD_FAILURE() << "flip at " << i << " not detected";
                } catch (const WireError& e) {
                    EXPECT_EQ(e.code(), WireErrc::IntegrityFailure);
                    EXPECT_EQ(e.kind, RequestKind::WriteVar);
                }
            } else {
                auto m = decode(p, bad);
                EXPECT_NE(m.value, Value{0x3456});
                Bytes expect_bytes = encode_uint(*m.value, p.value_encoding());
                EXPECT_EQ(Bytes(bad.begin() + pos, bad.begin() + pos + 2), expect_bytes);
            }
        }
    }
}

TEST(WireDecode, MacDetectsEveryNonHeaderFlip)
{
    auto p = profile_by_name("pcccplus_like");
    auto bytes = encode_command(p, make_request(RequestKind::WriteVar, 3, 0x1234));
    for (std::size_t i = 4; i < bytes.size(); ++i) {
        auto bad = bytes;
        bad[i] ^= 0x80;
        EXPECT_THROW(decode(p, bad), WireError) << "offset " << i;
    }
}

TEST(WireDecode, UnknownShape)
{
    auto p = profile_by_name("fins_like");
    Bytes junk(33, 0xaa);
    try {
        decode(p, junk);
        FAIL();
    } catch (const WireError& e) {
        EXPECT_EQ(e.code(), WireErrc::UnknownShape);
    }
}

TEST(WireProfile, MacKeyNeverOnWire)
{
    std::mt19937_64 rng(7);
    for (const auto& name : {"s7commplus_like", "pcccplus_like"}) {
        auto p = profile_by_name(name);
        Bytes key(p.integrity.key.begin(), p.integrity.key.end());
        for (int i = 0; i < 200; ++i) {
            auto bytes = encode(p, random_message(p, rng));
            for (std::size_t at = 0; at + 8 <= key.size(); ++at)
                EXPECT_TRUE(find_all(bytes, ByteView(key).subspan(at, 8)).empty());
        }
    }
}

TEST(WireProfile, JsonRoundTrip)
{
    for (const auto& name : profile_names()) {
        auto p = profile_by_name(name);
        auto q = profile_from_json(profile_to_json(p));
        auto m = make_request(RequestKind::WriteVar, 5, 0x1234);
        EXPECT_EQ(encode_command(p, m), encode_command(q, m)) << name;
        EXPECT_EQ(profile_to_json(p), profile_to_json(q)) << name;
    }
}

TEST(WireProfile, ValidateRejectsOverlongPosition)
{
    auto j = profile_to_json(profile_by_name("fins_like"));
    for (auto& s : j["shapes"])
        if (s["kind"] == "WriteVar" && s["direction"] == "ws_to_plc")
            s["position"] = 19;
    try {
        profile_from_json(j);
        FAIL();
    } catch (const WireError& e) {
        EXPECT_EQ(e.code(), WireErrc::InvalidProfile);
    }
}

TEST(WireFraming, SplitsArbitraryChunks)
{
    std::mt19937_64 rng(3);
    std::vector<Bytes> payloads;
    Bytes stream;
    for (int i = 0; i < 50; ++i) {
        Bytes p(rng() % 700);
        for (auto& b : p)
            b = static_cast<std::uint8_t>(rng());
        auto f = frame(p);
        stream.insert(stream.end(), f.begin(), f.end());
        payloads.push_back(std::move(p));
    }
    FrameReader reader;
    std::vector<Bytes> got;
    std::size_t at = 0;
    while (at < stream.size()) {
        std::size_t n = std::min<std::size_t>(1 + rng() % 97, stream.size() - at);
        reader.feed(ByteView(stream).subspan(at, n));
        at += n;
        while (auto f = reader.next())
            got.push_back(*f);
    }
    EXPECT_EQ(got, payloads);
    EXPECT_EQ(reader.buffered(), 0u);
}

TEST(WireDigest, DeterministicSixteenBytes)
{
    auto a = password_digest("hunter2");
    EXPECT_EQ(a.size(), 16u);
    EXPECT_EQ(a, password_digest("hunter2"));
    EXPECT_NE(a, password_digest("hunter3"));
}

TEST(WireChecksum, OnesComplementOfKnownWords)
{
    // 0x0001 + 0xf203 + 0xf4f5 + 0xf6f7 = 0x2ddf0 -> fold 0xddf2 -> complement 0x220d
    Bytes data{0x00, 0x01, 0xf2, 0x03, 0xf4, 0xf5, 0xf6, 0xf7};
    EXPECT_EQ(checksum16(data), 0x220d);
}

TEST(Capture, JsonlRoundTrip)
{
    std::mt19937_64 rng(11);
    wire::CaptureSet records;
    for (std::uint64_t i = 0; i < 10000; ++i) {
        wire::PacketRecord r;
        r.seq = i;
        r.direction = rng() % 2 ? Direction::WorkstationToPlc : Direction::PlcToWorkstation;
        r.src = "ws" + std::to_string(rng() % 4);
        r.dst = "plc" + std::to_string(rng() % 4);
        r.payload.resize(rng() % 40);
        for (auto& b : r.payload)
            b = static_cast<std::uint8_t>(rng());
        if (rng() % 3 == 0)
            r.tag = rng() % 0x10000;
        records.push_back(std::move(r));
    }
    std::istringstream in(harness::capture_to_jsonl(records));
    EXPECT_EQ(harness::capture_from_jsonl(in), records);
}

TEST(Capture, EmptyAndMalformed)
{
    std::istringstream empty("");
    EXPECT_TRUE(harness::capture_from_jsonl(empty).empty());

    std::istringstream bad(
        "{\"seq\":0,\"direction\":\"ws_to_plc\",\"src\":\"a\",\"dst\":\"b\",\"payload_hex\":\"0102\"}\n"
        "{\"seq\":1,\"direction\":\"ws_to_plc\",\"src\":\"a\",\"dst\":\"b\",\"payload_hex\":\"010\"}\n");
    try {
        harness::capture_from_jsonl(bad);
        FAIL();
    } catch (const harness::CaptureError& e) {
        EXPECT_EQ(e.code(), harness::CaptureErrc::ParseError);
        EXPECT_EQ(e.line(), 2u);
    }
}
