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

#include <algorithm>
#include <sstream>

namespace plcg::diff {

std::vector<Encoding> DifferentialPlan::default_encodings()
{
    return {{2, Endianness::Big}, {2, Endianness::Little}};
}

void DifferentialPlan::validate() const
{
    if (probes.size() < 2)
        throw std::invalid_argument("a differential plan needs at least two probe values");
    if (encodings.empty())
        throw std::invalid_argument("a differential plan needs at least one candidate encoding");
    for (std::size_t i = 0; i < probes.size(); ++i)
        for (std::size_t j = i + 1; j < probes.size(); ++j)
            if (probes[i] == probes[j])
                throw std::invalid_argument("duplicate probe value " + std::to_string(probes[i]));
    for (auto e : encodings)
        for (auto v : probes)
            if (!fits_width(v, e.width))
                throw std::invalid_argument("probe " + std::to_string(v) + " does not fit " + plcg::to_string(e));
    for (auto a : probes)
        for (auto b : probes) {
            if (a == b)
                continue;
            for (auto ea : encodings)
                for (auto eb : encodings) {
                    auto na = encode_uint(a, ea);
                    auto hb = encode_uint(b, eb);
                    if (!find_all(hb, na).empty())
                        throw std::invalid_argument("encoding of probe " + std::to_string(a) +
                                                    " occurs inside the encoding of probe " + std::to_string(b));
                }
        }
}

std::string to_string(const LpPair& lp)
{
    return "(" + std::to_string(lp.length) + "," + std::to_string(lp.position) + ") " + plcg::to_string(lp.encoding);
}

std::set<std::pair<std::size_t, std::size_t>> lp_pairs(const CandidateSet& c)
{
    std::set<std::pair<std::size_t, std::size_t>> out;
    for (const auto& lp : c)
        out.insert({lp.length, lp.position});
    return out;
}

std::vector<FilteredPacket> filter_packets_containing(const wire::CaptureSet& capture, Value value,
                                                      const std::vector<Encoding>& encodings)
{
    std::vector<std::pair<Encoding, Bytes>> needles;
    for (auto e : encodings)
        if (fits_width(value, e.width))
            needles.emplace_back(e, encode_uint(value, e));
    std::vector<FilteredPacket> out;
    for (const auto& rec : capture) {
        FilteredPacket fp{&rec, {}};
        for (const auto& [enc, needle] : needles)
            for (auto off : find_all(rec.payload, needle))
                fp.matches.push_back({off, enc});
        if (!fp.matches.empty())
            out.push_back(std::move(fp));
    }
    return out;
}

AnalysisResult analyze(const DifferentialPlan& plan, const ProbeCaptures& captures)
{
    plan.validate();
    AnalysisResult result;
    bool first = true;
    for (auto x : plan.probes) {
        auto it = captures.find(x);
        if (it == captures.end())
            throw DiffError(DiffErrc::MissingCapture, "no capture for probe value " + std::to_string(x));
        CandidateSet lp_x;
        for (const auto& fp : filter_packets_containing(it->second, x, plan.encodings))
            for (const auto& m : fp.matches)
                lp_x.insert({fp.record->payload.size(), m.offset, m.encoding});
        if (first) {
            result.candidates = lp_x;
            first = false;
        } else {
            CandidateSet kept;
            std::set_intersection(result.candidates.begin(), result.candidates.end(), lp_x.begin(), lp_x.end(),
                                  std::inserter(kept, kept.end()));
            result.candidates = std::move(kept);
        }
        result.per_value[x] = std::move(lp_x);
    }
    return result;
}

CandidateSet differential_analysis(const DifferentialPlan& plan, const ProbeCaptures& captures)
{
    return analyze(plan, captures).candidates;
}

CandidateSet brute_force_oracle(const DifferentialPlan& plan, const ProbeCaptures& captures)
{
    plan.validate();
    for (auto x : plan.probes)
        if (!captures.count(x))
            throw DiffError(DiffErrc::MissingCapture, "no capture for probe value " + std::to_string(x));

    auto holds_at = [](const Bytes& p, std::size_t pos, Value x, Encoding e) {
        for (std::size_t i = 0; i < e.width; ++i) {
            std::size_t shift = e.endian == Endianness::Big ? 8 * (e.width - 1 - i) : 8 * i;
            if (p[pos + i] != static_cast<std::uint8_t>((std::uint64_t{x} >> shift) & 0xff))
                return false;
        }
        return true;
    };

    std::set<std::size_t> lengths;
    for (const auto& rec : captures.at(plan.probes.front()))
        lengths.insert(rec.payload.size());

    CandidateSet out;
    for (auto len : lengths)
        for (auto e : plan.encodings) {
            if (e.width > len)
                continue;
            for (std::size_t pos = 0; pos + e.width <= len; ++pos) {
                bool all = true;
                for (auto x : plan.probes) {
                    if (!fits_width(x, e.width)) {
                        all = false;
                        break;
                    }
                    bool seen = false;
                    for (const auto& rec : captures.at(x))
                        if (rec.payload.size() == len && holds_at(rec.payload, pos, x, e)) {
                            seen = true;
                            break;
                        }
                    if (!seen) {
                        all = false;
                        break;
                    }
                }
                if (all)
                    out.insert({len, pos, e});
            }
        }
    return out;
}

ProbeCaptures split_by_tag(const wire::CaptureSet& capture)
{
    ProbeCaptures out;
    for (const auto& rec : capture)
        if (rec.tag)
            out[static_cast<Value>(*rec.tag)].push_back(rec);
    return out;
}

Value read_field(ByteView payload, const LpPair& field)
{
    return static_cast<Value>(get_uint(payload.subspan(field.position, field.encoding.width), field.encoding));
}

std::size_t Signature::fixed_count() const
{
    return static_cast<std::size_t>(std::count_if(mask.begin(), mask.end(), [](const auto& b) { return b.has_value(); }));
}

bool Signature::matches(ByteView payload) const
{
    if (payload.size() != length)
        return false;
    for (std::size_t i = 0; i < length; ++i)
        if (mask[i] && *mask[i] != payload[i])
            return false;
    return true;
}

std::string Signature::pattern() const
{
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (i)
            out += ' ';
        if (mask[i]) {
            out += hex[*mask[i] >> 4];
            out += hex[*mask[i] & 0xf];
        } else {
            out += "??";
        }
    }
    return out;
}

Signature extract_signature(const std::vector<Bytes>& packets, const LpPair& field, std::size_t min_fixed)
{
    std::vector<const Bytes*> samples;
    for (const auto& p : packets)
        if (p.size() == field.length)
            samples.push_back(&p);
    if (samples.size() < 2)
        throw DiffError(DiffErrc::InsufficientSamples, "signature for " + to_string(field) + " needs two samples, got " +
                                                           std::to_string(samples.size()));
    Signature sig;
    sig.length = field.length;
    sig.field = field;
    sig.mask.resize(field.length);
    for (std::size_t i = 0; i < field.length; ++i) {
        bool fixed = i < field.position || i >= field.position + field.encoding.width;
        for (const auto* s : samples)
            if ((*s)[i] != (*samples.front())[i])
                fixed = false;
        if (fixed)
            sig.mask[i] = (*samples.front())[i];
    }
    if (sig.fixed_count() < min_fixed)
        throw DiffError(DiffErrc::TooFewFixedBytes, "signature for " + to_string(field) + " has " +
                                                        std::to_string(sig.fixed_count()) + " fixed bytes, minimum " +
                                                        std::to_string(min_fixed));
    return sig;
}

Signature extract_signature(const ProbeCaptures& captures, const LpPair& field, std::size_t min_fixed)
{
    std::vector<Bytes> packets;
    for (const auto& [x, capture] : captures)
        for (const auto& rec : capture)
            if (rec.payload.size() == field.length && read_field(rec.payload, field) == x)
                packets.push_back(rec.payload);
    return extract_signature(packets, field, min_fixed);
}

nlohmann::json to_json(const LpPair& lp)
{
    return {{"length", lp.length},
            {"position", lp.position},
            {"width", lp.encoding.width},
            {"endianness", plcg::to_string(lp.encoding.endian)}};
}

LpPair lp_from_json(const nlohmann::json& j)
{
    LpPair lp;
    lp.length = j.at("length").get<std::size_t>();
    lp.position = j.at("position").get<std::size_t>();
    lp.encoding.width = j.at("width").get<std::uint8_t>();
    lp.encoding.endian = endianness_from_string(j.at("endianness").get<std::string>());
    if (lp.position + lp.encoding.width > lp.length)
        throw std::invalid_argument("field " + to_string(lp) + " exceeds its packet length");
    return lp;
}

nlohmann::json to_json(const Signature& s)
{
    return {{"length", s.length}, {"pattern", s.pattern()}, {"field", to_json(s.field)}};
}

Signature signature_from_json(const nlohmann::json& j)
{
    Signature s;
    s.length = j.at("length").get<std::size_t>();
    s.field = lp_from_json(j.at("field"));
    std::istringstream in(j.at("pattern").get<std::string>());
    std::string tok;
    while (in >> tok) {
        if (tok == "??")
            s.mask.emplace_back();
        else
            s.mask.emplace_back(from_hex(tok).at(0));
    }
    if (s.mask.size() != s.length)
        throw std::invalid_argument("signature pattern has " + std::to_string(s.mask.size()) + " bytes, length " +
                                    std::to_string(s.length));
    return s;
}

nlohmann::json to_json(const AnalysisResult& r)
{
    nlohmann::json cands = nlohmann::json::array();
    for (const auto& lp : r.candidates)
        cands.push_back(to_json(lp));
    nlohmann::json per = nlohmann::json::object();
    for (const auto& [x, set] : r.per_value) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& lp : set)
            a.push_back(to_json(lp));
        per[to_hex(encode_uint(x, {4, Endianness::Big}))] = a;
    }
    return {{"candidates", cands}, {"per_value", per}};
}

}  // namespace plcg::diff
