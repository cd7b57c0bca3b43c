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

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace plcg::wire {

struct PacketRecord {
    std::uint64_t seq = 0;
    Direction direction = Direction::WorkstationToPlc;
    std::string src;
    std::string dst;
    Bytes payload;
    /// Probe value the traffic was generated under, when the capture is one of a differential set.
    std::optional<std::uint64_t> tag;

    friend bool operator==(const PacketRecord&, const PacketRecord&) = default;
};

using CaptureSet = std::vector<PacketRecord>;

CaptureSet filter_direction(const CaptureSet& capture, Direction d);

}  // namespace plcg::wire

namespace plcg::harness {

enum class CaptureErrc { IoError, ParseError };

class CaptureError : public std::runtime_error {
public:
    CaptureError(CaptureErrc code, const std::string& what, std::size_t line = 0)
        : std::runtime_error(what), code_(code), line_(line)
    {
    }
    CaptureErrc code() const noexcept { return code_; }
    /// 1-based line number for ParseError.
    std::size_t line() const noexcept { return line_; }

private:
    CaptureErrc code_;
    std::size_t line_;
};

std::string capture_to_jsonl(const wire::CaptureSet& records);
wire::CaptureSet capture_from_jsonl(std::istream& in);

void write_capture(const std::filesystem::path& path, const wire::CaptureSet& records);
wire::CaptureSet read_capture(const std::filesystem::path& path);

}  // namespace plcg::harness
