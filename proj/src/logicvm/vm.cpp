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

std::string to_string(LoadValidation v) { return v == LoadValidation::Static ? "Static" : "None"; }

std::string to_string(WatchdogReaction r)
{
    switch (r) {
    case WatchdogReaction::HaltApp: return "HaltApp";
    case WatchdogReaction::Dos: return "Dos";
    case WatchdogReaction::Reboot: return "Reboot";
    }
    return "?";
}

std::string to_string(IllegalReaction r) { return r == IllegalReaction::Crash ? "Crash" : "Fault"; }

LoadValidation load_validation_from_string(std::string_view s)
{
    if (s == "None")
        return LoadValidation::None;
    if (s == "Static")
        return LoadValidation::Static;
    throw std::invalid_argument("unknown load_validation: " + std::string(s));
}

WatchdogReaction watchdog_reaction_from_string(std::string_view s)
{
    for (auto r : {WatchdogReaction::HaltApp, WatchdogReaction::Dos, WatchdogReaction::Reboot})
        if (to_string(r) == s)
            return r;
    throw std::invalid_argument("unknown watchdog_reaction: " + std::string(s));
}

IllegalReaction illegal_reaction_from_string(std::string_view s)
{
    if (s == "Fault")
        return IllegalReaction::Fault;
    if (s == "Crash")
        return IllegalReaction::Crash;
    throw std::invalid_argument("unknown illegal_reaction: " + std::string(s));
}

std::string to_string(VmOutcome::Kind k)
{
    using K = VmOutcome::Kind;
    switch (k) {
    case K::Completed: return "Completed";
    case K::WatchdogTripped: return "WatchdogTripped";
    case K::IllegalTrapped: return "IllegalTrapped";
    case K::IllegalCrashed: return "IllegalCrashed";
    case K::PrivilegedTrapped: return "PrivilegedTrapped";
    case K::BackdoorSpawned: return "BackdoorSpawned";
    }
    return "?";
}

std::string describe(const VmOutcome& o)
{
    std::string s = to_string(o.kind);
    if (o.sys)
        s += "(" + to_string(*o.sys) + ")";
    if (o.backdoor) {
        s += "(" + (o.backdoor->endpoint ? o.backdoor->endpoint->to_string() : std::string("unconnected"));
        if (o.backdoor->runtime_replaced)
            s += ", runtime replaced";
        s += ")";
    }
    if (o.kind == VmOutcome::Kind::Completed)
        s += "(" + std::to_string(o.instructions) + ")";
    return s;
}

std::string to_string(Section s) { return s == Section::Init ? "init" : "cyclic"; }

namespace {

class Machine {
public:
    Machine(const AppImage& image, const SupervisionPolicy& policy, VarTable& vars, VmKernel& kernel)
        : image_(image), policy_(policy), vars_(vars), kernel_(kernel)
    {
    }

    VmOutcome run(ByteView code)
    {
        using K = VmOutcome::Kind;
        std::array<std::uint32_t, kRegisters> reg{};
        std::vector<std::size_t> stack;
        std::size_t pc = 0;
        std::uint64_t count = 0;
        std::optional<BackdoorSession> spawned;

        auto finish = [&](K kind, std::size_t at) {
            VmOutcome o;
            o.kind = kind;
            o.instructions = count;
            o.offset = at;
            o.variables = vars_;
            return o;
        };
        auto end_section = [&] {
            auto o = finish(spawned ? K::BackdoorSpawned : K::Completed, pc);
            o.backdoor = spawned;
            return o;
        };
        auto illegal = [&](std::size_t at) {
            if (policy_.whitelist_enabled || policy_.illegal_reaction == IllegalReaction::Fault)
                return finish(K::IllegalTrapped, at);
            return finish(K::IllegalCrashed, at);
        };

        while (pc < code.size()) {
            if (count >= policy_.watchdog_limit)
                return finish(K::WatchdogTripped, pc);
            ++count;
            auto ins = decode_at(code, pc);
            std::size_t next = pc + ins.size;
            auto jump_target = [&]() -> std::optional<std::size_t> {
                auto t = static_cast<std::int64_t>(next) + ins.off;
                if (t < 0 || t > static_cast<std::int64_t>(code.size()))
                    return std::nullopt;
                return static_cast<std::size_t>(t);
            };

            switch (ins.op) {
            case Op::Nop:
                break;
            case Op::Load:
                if (ins.var >= image_.data.size())
                    return illegal(pc);
                reg[ins.reg] = vars_[image_.data[ins.var].name];
                break;
            case Op::Store:
                if (ins.var >= image_.data.size())
                    return illegal(pc);
                vars_[image_.data[ins.var].name] = reg[ins.reg];
                break;
            case Op::Addi:
                reg[ins.reg] += ins.imm;
                break;
            case Op::Jmp:
            case Op::Jz:
            case Op::Call: {
                auto t = jump_target();
                if (!t)
                    return illegal(pc);
                if (ins.op == Op::Jz && reg[ins.reg] != 0)
                    break;
                if (ins.op == Op::Call) {
                    if (stack.size() >= kMaxCallDepth)
                        return finish(K::WatchdogTripped, pc);
                    stack.push_back(next);
                }
                next = *t;
                break;
            }
            case Op::Ret:
                if (stack.empty())
                    return end_section();
                next = stack.back();
                stack.pop_back();
                break;
            case Op::EndScan:
                return end_section();
            case Op::Sys: {
                if (policy_.whitelist_enabled) {
                    auto o = finish(K::PrivilegedTrapped, pc);
                    o.sys = ins.sys;
                    return o;
                }
                if (auto replaced = syscall(ins, spawned)) {
                    auto o = finish(K::BackdoorSpawned, pc);
                    o.backdoor = *replaced;
                    return o;
                }
                break;
            }
            case Op::Illegal:
                return illegal(pc);
            }
            pc = next;
        }
        return end_section();
    }

private:
    // Returns a session only when EXEC replaced the runtime itself.
    std::optional<BackdoorSession> syscall(const Instruction& ins, std::optional<BackdoorSession>& spawned)
    {
        switch (ins.sys) {
        case SysNo::Socket: {
            int fd = kernel_.next_fd++;
            kernel_.events.push_back({ins.sys, "fd=" + std::to_string(fd)});
            break;
        }
        case SysNo::Connect:
            kernel_.connected = ins.endpoint;
            kernel_.events.push_back({ins.sys, ins.endpoint.to_string()});
            break;
        case SysNo::Dup2:
            kernel_.events.push_back({ins.sys, "fd " + std::to_string(ins.fd)});
            break;
        case SysNo::Fork:
            kernel_.child = true;
            kernel_.events.push_back({ins.sys, "child"});
            break;
        case SysNo::Exec: {
            kernel_.events.push_back({ins.sys, ins.path});
            BackdoorSession b{kernel_.connected, ins.path, !kernel_.child};
            kernel_.backdoors.push_back(b);
            if (!kernel_.child)
                return b;
            kernel_.child = false;
            spawned = b;
            break;
        }
        }
        return std::nullopt;
    }

    const AppImage& image_;
    const SupervisionPolicy& policy_;
    VarTable& vars_;
    VmKernel& kernel_;
};

}  // namespace

VmOutcome run_init(const AppImage& image, const SupervisionPolicy& policy, VarTable& vars, VmKernel& kernel)
{
    for (const auto& e : image.data)
        vars[e.name] = e.initial;
    ++kernel.init_runs;
    return Machine(image, policy, vars, kernel).run(image.init);
}

VmOutcome run_scan_cycle(const AppImage& image, const SupervisionPolicy& policy, VarTable& vars, VmKernel& kernel)
{
    return Machine(image, policy, vars, kernel).run(image.cyclic);
}

std::size_t ValidationReport::count(Finding::Kind k) const
{
    std::size_t n = 0;
    for (const auto& f : findings)
        n += f.kind == k;
    return n;
}

ValidationReport validate_app(const AppImage& image, const SupervisionPolicy& policy)
{
    ValidationReport report;
    if (policy.load_validation == LoadValidation::None)
        return report;
    for (auto section : {Section::Init, Section::Cyclic}) {
        const Bytes& code = section == Section::Init ? image.init : image.cyclic;
        std::size_t at = 0;
        while (at < code.size()) {
            auto ins = decode_at(code, at);
            bool bad_var = (ins.op == Op::Load || ins.op == Op::Store) && ins.var >= image.data.size();
            if (ins.op == Op::Illegal || bad_var) {
                auto& f = report.findings;
                if (!f.empty() && f.back().kind == Finding::Kind::Illegal && f.back().section == section &&
                    f.back().offset + f.back().length == at)
                    f.back().length += ins.size;
                else
                    f.push_back({Finding::Kind::Illegal, section, at, ins.size, std::nullopt});
            } else if (ins.op == Op::Sys) {
                report.findings.push_back({Finding::Kind::Privileged, section, at, ins.size, ins.sys});
            } else if (ins.op == Op::Jmp && ins.off < 0 &&
                       static_cast<std::int64_t>(at + ins.size) + ins.off <= static_cast<std::int64_t>(at)) {
                report.findings.push_back({Finding::Kind::Loop, section, at, ins.size, std::nullopt});
            }
            at += ins.size;
        }
    }
    return report;
}

}  // namespace plcg::logicvm
