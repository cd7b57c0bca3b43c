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

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace plcg::wire {

CaptureSet filter_direction(const CaptureSet& capture, Direction d)
{
    CaptureSet out;
    for (const auto& r : capture)
        if (r.direction == d)
            out.push_back(r);
    return out;
}

}  // namespace plcg::wire

namespace plcg::harness {

using nlohmann::json;

std::string capture_to_jsonl(const wire::CaptureSet& records)
{
    std::string out;
    for (const auto& r : records) {
        json j;
        j["seq"] = r.seq;
        j["direction"] = to_string(r.direction);
        j["src"] = r.src;
        j["dst"] = r.dst;
        j["payload_hex"] = to_hex(r.payload);
        if (r.tag)
            j["tag"] = *r.tag;
        out += j.dump();
        out += '\n';
    }
    return out;
}

wire::CaptureSet capture_from_jsonl(std::istream& in)
{
    wire::CaptureSet out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        try {
            auto j = json::parse(line);
            wire::PacketRecord r;
            r.seq = j.at("seq").get<std::uint64_t>();
            r.direction = direction_from_string(j.at("direction").get<std::string>());
            r.src = j.value("src", "");
            r.dst = j.value("dst", "");
            r.payload = from_hex(j.at("payload_hex").get<std::string>());
            if (j.contains("tag") && !j["tag"].is_null())
                r.tag = j["tag"].get<std::uint64_t>();
            out.push_back(std::move(r));
        } catch (const std::exception& e) {
            throw CaptureError(CaptureErrc::ParseError,
                               "capture line " + std::to_string(lineno) + ": " + e.what(), lineno);
        }
    }
    return out;
}

void write_capture(const std::filesystem::path& path, const wire::CaptureSet& records)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw CaptureError(CaptureErrc::IoError, "cannot write " + path.string());
    out << capture_to_jsonl(records);
    if (!out)
        throw CaptureError(CaptureErrc::IoError, "write failed for " + path.string());
}

wire::CaptureSet read_capture(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw CaptureError(CaptureErrc::IoError, "cannot read " + path.string());
    return capture_from_jsonl(in);
}

}  // namespace plcg::harness
