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
#include "plcg/common.hpp"

#include <algorithm>

namespace plcg {

std::string to_string(Endianness e) { return e == Endianness::Big ? "big" : "little"; }

Endianness endianness_from_string(std::string_view s)
{
    if (s == "big" || s == "Big")
        return Endianness::Big;
    if (s == "little" || s == "Little")
        return Endianness::Little;
    throw std::invalid_argument("unknown endianness: " + std::string(s));
}

std::string to_string(Direction d)
{
    return d == Direction::WorkstationToPlc ? "ws_to_plc" : "plc_to_ws";
}

Direction direction_from_string(std::string_view s)
{
    if (s == "ws_to_plc" || s == "WorkstationToPlc")
        return Direction::WorkstationToPlc;
    if (s == "plc_to_ws" || s == "PlcToWorkstation")
        return Direction::PlcToWorkstation;
    throw std::invalid_argument("unknown direction: " + std::string(s));
}

std::string to_string(Encoding e)
{
    return std::to_string(e.width) + (e.endian == Endianness::Big ? "be" : "le");
}

Encoding encoding_from_string(std::string_view s)
{
    if (s.size() != 3 || s[0] < '1' || s[0] > '4' || (s.substr(1) != "be" && s.substr(1) != "le"))
        throw std::invalid_argument("bad encoding '" + std::string(s) + "'");
    return {static_cast<std::uint8_t>(s[0] - '0'), s.substr(1) == "be" ? Endianness::Big : Endianness::Little};
}

std::string to_hex(ByteView bytes)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0f]);
    }
    return out;
}

namespace {
int nibble(char c)
{
    if (c >= '0' && c <= '9')
        return c - '0';
    if (c >= 'a' && c <= 'f')
        return c - 'a' + 10;
    if (c >= 'A' && c <= 'F')
        return c - 'A' + 10;
    return -1;
}
}  // namespace

Bytes from_hex(std::string_view hex)
{
    if (hex.size() % 2 != 0)
        throw std::invalid_argument("hex string has odd length");
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        int hi = nibble(hex[2 * i]);
        int lo = nibble(hex[2 * i + 1]);
        if (hi < 0 || lo < 0)
            throw std::invalid_argument("invalid hex digit");
        out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
    return out;
}

bool fits_width(std::uint64_t value, std::size_t width)
{
    if (width >= 8)
        return true;
    return value < (std::uint64_t{1} << (8 * width));
}

void put_uint(std::span<std::uint8_t> out, std::uint64_t value, Encoding enc)
{
    for (std::size_t i = 0; i < enc.width; ++i) {
        auto byte = static_cast<std::uint8_t>(value >> (8 * i));
        std::size_t idx = enc.endian == Endianness::Big ? enc.width - 1 - i : i;
        out[idx] = byte;
    }
}

std::uint64_t get_uint(ByteView in, Encoding enc)
{
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < enc.width; ++i) {
        std::size_t idx = enc.endian == Endianness::Big ? enc.width - 1 - i : i;
        v |= std::uint64_t{in[idx]} << (8 * i);
    }
    return v;
}

Bytes encode_uint(std::uint64_t value, Encoding enc)
{
    Bytes out(enc.width);
    put_uint(out, value, enc);
    return out;
}

std::vector<std::size_t> find_all(ByteView haystack, ByteView needle)
{
    std::vector<std::size_t> hits;
    if (needle.empty() || needle.size() > haystack.size())
        return hits;
    auto it = haystack.begin();
    while (true) {
        it = std::search(it, haystack.end(), needle.begin(), needle.end());
        if (it == haystack.end())
            break;
        hits.push_back(static_cast<std::size_t>(it - haystack.begin()));
        ++it;
    }
    return hits;
}

std::uint64_t fnv1a(std::string_view data, std::uint64_t seed)
{
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace plcg
