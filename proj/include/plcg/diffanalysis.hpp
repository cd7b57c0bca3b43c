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

#include "plcg/capture.hpp"
#include "plcg/wire.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

/// Locating the value field of an unknown protocol from traffic alone:
/// probe with known constants, collect every (length, position) at which
/// each constant shows up, and intersect across constants.
namespace plcg::diff {

struct DifferentialPlan {
    wire::RequestKind command = wire::RequestKind::WriteVar;
    std::string variable = "scratch";
    std::vector<Value> probes{0x1234, 0x3456, 0x5678};
    std::vector<Encoding> encodings = default_encodings();

    static std::vector<Encoding> default_encodings();
    /// Throws std::invalid_argument naming the violated condition.
    void validate() const;
};

struct LpPair {
    std::size_t length = 0;
    std::size_t position = 0;
    Encoding encoding;

    friend auto operator<=>(const LpPair&, const LpPair&) = default;
};

using CandidateSet = std::set<LpPair>;

std::string to_string(const LpPair& lp);
/// Drops the encoding: the (length, position) pairs only.
std::set<std::pair<std::size_t, std::size_t>> lp_pairs(const CandidateSet& c);

struct Match {
    std::size_t offset;
    Encoding encoding;
};

struct FilteredPacket {
    const wire::PacketRecord* record;
    std::vector<Match> matches;
};

std::vector<FilteredPacket> filter_packets_containing(const wire::CaptureSet& capture, Value value,
                                                      const std::vector<Encoding>& encodings);

enum class DiffErrc { MissingCapture, InsufficientSamples, TooFewFixedBytes };

class DiffError : public std::runtime_error {
public:
    DiffError(DiffErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    DiffErrc code() const noexcept { return code_; }

private:
    DiffErrc code_;
};

using ProbeCaptures = std::map<Value, wire::CaptureSet>;

struct AnalysisResult {
    CandidateSet candidates;
    std::map<Value, CandidateSet> per_value;  // LP_x
};

AnalysisResult analyze(const DifferentialPlan& plan, const ProbeCaptures& captures);
CandidateSet differential_analysis(const DifferentialPlan& plan, const ProbeCaptures& captures);
/// Independent exhaustive enumeration; must agree with differential_analysis on every input.
CandidateSet brute_force_oracle(const DifferentialPlan& plan, const ProbeCaptures& captures);

/// Splits a tagged capture by probe tag.
ProbeCaptures split_by_tag(const wire::CaptureSet& capture);

struct Signature {
    std::size_t length = 0;
    std::vector<std::optional<std::uint8_t>> mask;  // nullopt = wildcard
    LpPair field;

    std::size_t fixed_count() const;
    bool matches(ByteView payload) const;
    /// "a1 b2 ?? ..." with wildcards as ??.
    std::string pattern() const;
};

inline constexpr std::size_t kMinFixedBytes = 4;

/// Packets of other lengths are ignored; fewer than two of the right length is InsufficientSamples.
Signature extract_signature(const std::vector<Bytes>& packets, const LpPair& field,
                            std::size_t min_fixed = kMinFixedBytes);
/// Uses the packets of `capture` that carried any probe value at the field.
Signature extract_signature(const ProbeCaptures& captures, const LpPair& field,
                            std::size_t min_fixed = kMinFixedBytes);

Value read_field(ByteView payload, const LpPair& field);

nlohmann::json to_json(const LpPair& lp);
LpPair lp_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Signature& s);
Signature signature_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AnalysisResult& r);

}  // namespace plcg::diff
