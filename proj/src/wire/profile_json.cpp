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

namespace plcg::wire {

using nlohmann::json;

namespace {

json shape_json(const MessageShape& s, Direction d)
{
    json j;
    j["kind"] = to_string(s.kind);
    j["direction"] = to_string(d);
    j["length"] = s.length;
    j["position"] = s.value_position ? json(*s.value_position) : json(nullptr);
    j["header_hex"] = to_hex(s.header);
    j["blob"] = s.carries_blob;
    return j;
}

Key16 key_from_hex(const std::string& hex)
{
    auto bytes = from_hex(hex);
    if (bytes.size() != 16)
        throw WireError(WireErrc::InvalidProfile, "key_hex must encode 16 bytes");
    Key16 k{};
    std::copy(bytes.begin(), bytes.end(), k.begin());
    return k;
}

}  // namespace

json profile_to_json(const ProtocolProfile& p)
{
    json j;
    j["name"] = p.name;
    j["endianness"] = to_string(p.endianness);
    j["value_width"] = p.value_width;
    j["confidentiality"] = to_string(p.confidentiality);
    j["integrity"] = {{"kind", to_string(p.integrity.kind)}};
    if (p.integrity.kind == IntegrityKind::Mac16)
        j["integrity"]["key_hex"] = to_hex(p.integrity.key);
    if (p.confidentiality == Confidentiality::EncryptedPayload)
        j["payload_key_hex"] = to_hex(p.payload_key);
    j["stateless"] = p.stateless;
    j["auth_model"] = to_string(p.auth_model);
    json shapes = json::array();
    for (const auto& [k, s] : p.command_shapes)
        shapes.push_back(shape_json(s, Direction::WorkstationToPlc));
    for (const auto& [k, v] : p.response_shapes)
        for (const auto& s : v)
            shapes.push_back(shape_json(s, Direction::PlcToWorkstation));
    j["shapes"] = shapes;
    return j;
}

ProtocolProfile profile_from_json(const json& j)
{
    try {
        ProtocolProfile p;
        p.name = j.at("name").get<std::string>();
        p.endianness = endianness_from_string(j.value("endianness", "big"));
        p.value_width = j.value("value_width", std::size_t{2});
        p.confidentiality = confidentiality_from_string(j.value("confidentiality", "Plaintext"));
        if (j.contains("integrity")) {
            const auto& ij = j["integrity"];
            if (ij.is_string()) {
                p.integrity.kind = integrity_kind_from_string(ij.get<std::string>());
            } else {
                p.integrity.kind = integrity_kind_from_string(ij.at("kind").get<std::string>());
                if (ij.contains("key_hex"))
                    p.integrity.key = key_from_hex(ij["key_hex"].get<std::string>());
            }
        }
        if (j.contains("payload_key_hex"))
            p.payload_key = key_from_hex(j["payload_key_hex"].get<std::string>());
        p.stateless = j.value("stateless", false);
        p.auth_model = auth_model_from_string(j.value("auth_model", "SecureProcess"));
        for (const auto& sj : j.at("shapes")) {
            MessageShape s;
            s.kind = request_kind_from_string(sj.at("kind").get<std::string>());
            s.length = sj.at("length").get<std::size_t>();
            if (sj.contains("position") && !sj["position"].is_null())
                s.value_position = sj["position"].get<std::size_t>();
            s.header = from_hex(sj.at("header_hex").get<std::string>());
            s.carries_blob = sj.value("blob", false);
            auto dir = direction_from_string(sj.value("direction", "ws_to_plc"));
            if (dir == Direction::WorkstationToPlc)
                p.command_shapes[s.kind] = s;
            else
                p.response_shapes[s.kind].push_back(s);
        }
        validate(p);
        return p;
    } catch (const json::exception& e) {
        throw WireError(WireErrc::InvalidProfile, std::string("profile json: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw WireError(WireErrc::InvalidProfile, std::string("profile json: ") + e.what());
    }
}

}  // namespace plcg::wire
