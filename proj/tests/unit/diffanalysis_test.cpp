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
#include "plcg/diffanalysis.hpp"
#include "plcg/plcsim.hpp"
#include "synthetic.hpp"

#include <gtest/gtest.h>

using namespace plcg;
using namespace plcg::diff;
using wire::RequestKind;

namespace {

const Encoding k2be{2, Endianness::Big};
const Encoding k2le{2, Endianness::Little};

wire::PacketRecord rec(Bytes payload, Direction d = Direction::WorkstationToPlc)
{
    return {0, d, "ws", "plc", std::move(payload), std::nullopt};
}

// WriteVar commands for each probe value, encoded straight from the profile.
ProbeCaptures write_captures(const std::string& profile, const std::vector<Value>& probes)
{
    const auto p = wire::profile_by_name(profile);
    ProbeCaptures out;
    for (auto x : probes)
        out[x].push_back(rec(wire::encode_command(p, wire::make_request(RequestKind::WriteVar, wire::variable_id("scratch"), x))));
    return out;
}

// Monitor responses from a bench device holding each probe value.
ProbeCaptures monitor_captures(const std::string& profile, const std::vector<Value>& probes)
{
    ProbeCaptures out;
    for (auto x : probes) {
        plcsim::Device dev(plcsim::make_bench_fixture(profile));
        dev.set_variable("scratch", x);
        auto req = wire::encode_command(dev.profile(), wire::make_request(RequestKind::Monitor, wire::variable_id("scratch")));
        for (auto& r : dev.handle_packet(1, req))
            out[x].push_back(rec(r, Direction::PlcToWorkstation));
    }
    return out;
}

std::set<std::pair<std::size_t, std::size_t>> pairs(const CandidateSet& c) { return lp_pairs(c); }

}  // namespace

TEST(Filter, FinsWriteVarAtEighteen)
{
    auto caps = write_captures("fins_like", {0x1234});
    auto got = filter_packets_containing(caps[0x1234], 0x1234, {k2be, k2le});
    ASSERT_EQ(got.size(), 1u);
    ASSERT_EQ(got[0].matches.size(), 1u);
    EXPECT_EQ(got[0].matches[0].offset, 18u);
    EXPECT_EQ(got[0].matches[0].encoding.width, 2);
}

TEST(Filter, AbsentValueIsEmpty)
{
    wire::CaptureSet c{rec({0x00, 0x11, 0x22, 0x33})};
    EXPECT_TRUE(filter_packets_containing(c, 0x1234, {k2be, k2le}).empty());
}

TEST(Filter, ReportsEveryOccurrence)
{
    const Bytes p{0x00, 0x12, 0x34, 0x00, 0x12, 0x34, 0x34, 0x12};
    wire::CaptureSet c{rec(p)};
    auto got = filter_packets_containing(c, 0x1234, {k2be, k2le});
    ASSERT_EQ(got.size(), 1u);
    // linear scan oracle
    std::set<std::pair<std::size_t, bool>> want;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        if (p[i] == 0x12 && p[i + 1] == 0x34)
            want.insert({i, true});
        if (p[i] == 0x34 && p[i + 1] == 0x12)
            want.insert({i, false});
    }
    std::set<std::pair<std::size_t, bool>> have;
    for (const auto& m : got[0].matches)
        have.insert({m.offset, m.encoding.endian == Endianness::Big});
    EXPECT_EQ(have, want);
    EXPECT_EQ(want.size(), 3u);
}

TEST(Differential, WagoWriteVar)
{
    DifferentialPlan plan;
    auto lp = differential_analysis(plan, write_captures("wago_like", plan.probes));
    EXPECT_EQ(pairs(lp), (std::set<std::pair<std::size_t, std::size_t>>{{42, 40}}));
}

TEST(Differential, S7commMonitorKeepsBothShapes)
{
    DifferentialPlan plan;
    auto lp = differential_analysis(plan, monitor_captures("s7comm_like", plan.probes));
    EXPECT_EQ(pairs(lp), (std::set<std::pair<std::size_t, std::size_t>>{{55, 53}, {79, 77}}));
}

TEST(Differential, MissingCapture)
{
    DifferentialPlan plan;
    auto caps = write_captures("wago_like", {0x1234, 0x3456});
    try {
        differential_analysis(plan, caps);
        FAIL() << "expected MissingCapture";
    } catch (const DiffError& e) {
        EXPECT_EQ(e.code(), DiffErrc::MissingCapture);
    }
    EXPECT_THROW(brute_force_oracle(plan, caps), DiffError);
}

TEST(Differential, ValueThatNeverAppearsGivesEmptySet)
{
    DifferentialPlan plan;
    auto caps = write_captures("wago_like", plan.probes);
    caps[0x5678] = {rec(Bytes(42, 0))};
    EXPECT_TRUE(differential_analysis(plan, caps).empty());
}

TEST(Differential, DecoyCollidingWithOneValueIsExcluded)
{
    DifferentialPlan plan;
    plan.encodings = {k2be};
    ProbeCaptures caps;
    for (auto x : plan.probes) {
        Bytes p(16, 0);
        synth::plant(p, 10, x, k2be);
        caps[x].push_back(rec(p));
    }
    // 0x3456 also sits at offset 2 in the 0x1234 capture only
    synth::plant(caps[0x1234][0].payload, 2, 0x3456, k2be);
    // hand enumeration: only (16,10) is shared by all three values
    EXPECT_EQ(pairs(differential_analysis(plan, caps)), (std::set<std::pair<std::size_t, std::size_t>>{{16, 10}}));
    EXPECT_EQ(brute_force_oracle(plan, caps), differential_analysis(plan, caps));
}

TEST(Differential, SinglePacketPerValue)
{
    DifferentialPlan plan;
    plan.encodings = {k2le};
    ProbeCaptures caps;
    for (auto x : plan.probes) {
        Bytes p(9, 0xaa);
        synth::plant(p, 3, x, k2le);
        caps[x].push_back(rec(p));
    }
    auto oracle = brute_force_oracle(plan, caps);
    ASSERT_EQ(oracle.size(), 1u);
    EXPECT_EQ(*oracle.begin(), (LpPair{9, 3, k2le}));
}

TEST(Differential, MatchesOracleOnRandomTraffic)
{
    std::mt19937_64 rng(2026);
    for (int i = 0; i < 200; ++i) {
        auto c = synth::random_case(rng);
        EXPECT_EQ(differential_analysis(c.plan, c.captures), brute_force_oracle(c.plan, c.captures)) << "case " << i;
    }
}

TEST(Differential, EveryPairIsWitnessedPerValue)
{
    std::mt19937_64 rng(7);
    for (int i = 0; i < 100; ++i) {
        auto c = synth::random_case(rng);
        for (const auto& lp : differential_analysis(c.plan, c.captures))
            for (auto x : c.plan.probes) {
                bool seen = false;
                for (const auto& r : c.captures[x])
                    seen = seen || (r.payload.size() == lp.length &&
                                    get_uint(ByteView(r.payload).subspan(lp.position, lp.encoding.width), lp.encoding) == x);
                EXPECT_TRUE(seen) << to_string(lp) << " value " << x;
            }
    }
}

TEST(Differential, AddingAValueNeverEnlarges)
{
    std::mt19937_64 rng(11);
    for (int i = 0; i < 100; ++i) {
        auto c = synth::random_case(rng);
        if (c.plan.probes.size() < 3)
            continue;
        auto fewer = c.plan;
        fewer.probes.pop_back();
        auto small = differential_analysis(fewer, c.captures);
        auto big = differential_analysis(c.plan, c.captures);
        EXPECT_TRUE(std::includes(small.begin(), small.end(), big.begin(), big.end())) << "case " << i;
    }
}

TEST(Plan, Validation)
{
    DifferentialPlan p;
    EXPECT_NO_THROW(p.validate());
    p.probes = {0x1234};
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p.probes = {0x1234, 0x1234};
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p.probes = {0x1234, 0x3412};  // one is the other byte-swapped
    EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Signature, M340WriteVarWildcardsTheField)
{
    DifferentialPlan plan;
    auto caps = write_captures("m340_like", plan.probes);
    auto lp = differential_analysis(plan, caps);
    ASSERT_EQ(pairs(lp), (std::set<std::pair<std::size_t, std::size_t>>{{46, 37}}));
    auto sig = extract_signature(caps, *lp.begin());
    ASSERT_EQ(sig.mask.size(), 46u);
    EXPECT_FALSE(sig.mask[37]);
    EXPECT_FALSE(sig.mask[38]);
    for (std::size_t i = 0; i < 37; ++i)
        EXPECT_TRUE(sig.mask[i]) << i;
    for (const auto& [x, c] : caps)
        EXPECT_TRUE(sig.matches(c[0].payload));
}

TEST(Signature, IdenticalPacketsFixEverythingButTheField)
{
    std::vector<Bytes> ps;
    for (Value x : {0x1234, 0x3456}) {
        Bytes p(12, 0x5a);
        synth::plant(p, 4, x, k2be);
        ps.push_back(p);
    }
    auto sig = extract_signature(ps, LpPair{12, 4, k2be});
    EXPECT_EQ(sig.fixed_count(), 10u);
}

TEST(Signature, DiscriminatesOtherKindsOfTheSameLength)
{
    DifferentialPlan plan;
    for (const auto& p : wire::load_profile_fixtures()) {
        const auto& name = p.name;
        auto caps = write_captures(name, plan.probes);
        auto lp = differential_analysis(plan, caps);
        ASSERT_EQ(lp.size(), 1u) << name;
        auto sig = extract_signature(caps, *lp.begin());
        for (auto kind : wire::kAllRequestKinds) {
            if (kind == RequestKind::WriteVar)
                continue;
            Bytes other;
            try {
                other = wire::encode_command(p, wire::make_request(kind, wire::variable_id("scratch"), 0x1234));
            } catch (const wire::WireError&) {
                continue;
            }
            EXPECT_FALSE(sig.matches(other)) << name << " " << wire::to_string(kind);
        }
    }
}

TEST(Signature, Errors)
{
    try {
        extract_signature(std::vector<Bytes>{Bytes(8, 0)}, LpPair{8, 0, k2be});
        FAIL();
    } catch (const DiffError& e) {
        EXPECT_EQ(e.code(), DiffErrc::InsufficientSamples);
    }
    std::mt19937_64 rng(3);
    std::vector<Bytes> noise;
    for (int i = 0; i < 4; ++i) {
        Bytes p(8);
        for (auto& b : p)
            b = static_cast<std::uint8_t>(rng());
        noise.push_back(p);
    }
    try {
        extract_signature(noise, LpPair{8, 0, k2be});
        FAIL();
    } catch (const DiffError& e) {
        EXPECT_EQ(e.code(), DiffErrc::TooFewFixedBytes);
    }
}

TEST(Signature, JsonRoundTrip)
{
    DifferentialPlan plan;
    auto caps = write_captures("abb_like", plan.probes);
    auto sig = extract_signature(caps, *differential_analysis(plan, caps).begin());
    auto back = signature_from_json(to_json(sig));
    EXPECT_EQ(back.pattern(), sig.pattern());
    EXPECT_EQ(back.field, sig.field);
}
