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

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace plcg {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// Variable values travel as unsigned integers of a profile-defined width.
using Value = std::uint32_t;

enum class Endianness : std::uint8_t { Big, Little };

/// How an integer is laid out on the wire: byte width plus byte order.
struct Encoding {
    std::uint8_t width = 2;
    Endianness endian = Endianness::Big;

    friend auto operator<=>(const Encoding&, const Encoding&) = default;
};

enum class Direction : std::uint8_t { WorkstationToPlc, PlcToWorkstation };

std::string to_string(Endianness e);
Endianness endianness_from_string(std::string_view s);
std::string to_string(Direction d);
Direction direction_from_string(std::string_view s);
std::string to_string(Encoding e);
/// Parses "2be", "4le"; throws std::invalid_argument.
Encoding encoding_from_string(std::string_view s);

std::string to_hex(ByteView bytes);
/// Throws std::invalid_argument on odd length or non-hex characters.
Bytes from_hex(std::string_view hex);

inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

/// True when `value` is representable in `width` bytes.
bool fits_width(std::uint64_t value, std::size_t width);

void put_uint(std::span<std::uint8_t> out, std::uint64_t value, Encoding enc);
std::uint64_t get_uint(ByteView in, Encoding enc);
Bytes encode_uint(std::uint64_t value, Encoding enc);

/// Offsets where `needle` occurs in `haystack`, overlapping matches included.
std::vector<std::size_t> find_all(ByteView haystack, ByteView needle);

/// 64-bit FNV-1a; used for stable ids and deterministic filler.
std::uint64_t fnv1a(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace plcg
