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

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

/// Logic-application images and the runtime that executes them.
///
/// Image layout (all integers big-endian):
///
///   "PLGA" | version:1 | flags:1 (bit0 = flash) |
///   init_len:4 init | cyclic_len:4 cyclic | data_len:4 data
///
/// data = count:2 then { name_len:1 name value:4 } per variable. Instructions
/// address variables by their index in the data table.
namespace plcg::logicvm {

enum class Op : std::uint8_t {
    Nop = 0x00,
    Load = 0x01,     // r, var:2
    Store = 0x02,    // r, var:2
    Addi = 0x03,     // r, imm:4
    Jmp = 0x04,      // off:2, relative to the next instruction
    Jz = 0x05,       // r, off:2
    Call = 0x06,     // off:2
    Ret = 0x07,
    EndScan = 0x08,
    Sys = 0x10,      // n, args
    Illegal = 0xff,  // decoder marker; any undefined byte decodes to this
};

enum class SysNo : std::uint8_t { Socket = 1, Connect = 2, Dup2 = 3, Fork = 4, Exec = 5 };

std::string to_string(SysNo n);

inline constexpr std::size_t kRegisters = 8;
inline constexpr std::size_t kMaxCallDepth = 256;

enum class StoreTarget : std::uint8_t { Ram, Flash };

struct DataEntry {
    std::string name;
    Value initial = 0;

    friend bool operator==(const DataEntry&, const DataEntry&) = default;
};

struct AppImage {
    std::uint8_t version = 1;
    StoreTarget target = StoreTarget::Ram;
    Bytes init;
    Bytes cyclic;
    std::vector<DataEntry> data;

    friend bool operator==(const AppImage&, const AppImage&) = default;
};

enum class VmErrc { MalformedImage, InitTooSmall, EmptyCyclic, ImageTooLarge };

class VmError : public std::runtime_error {
public:
    VmError(VmErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    VmErrc code() const noexcept { return code_; }

private:
    VmErrc code_;
};

Bytes serialize(const AppImage& image);
/// Throws VmError{MalformedImage}.
AppImage parse_image(ByteView bytes);

struct Endpoint {
    std::array<std::uint8_t, 4> ip{};
    std::uint16_t port = 0;

    std::string to_string() const;
    static Endpoint parse(std::string_view text);  // "a.b.c.d:port"
    friend bool operator==(const Endpoint&, const Endpoint&) = default;
};

struct Instruction {
    Op op = Op::Nop;
    std::size_t size = 1;
    std::uint8_t reg = 0;
    std::uint16_t var = 0;
    std::uint32_t imm = 0;
    std::int16_t off = 0;
    SysNo sys = SysNo::Socket;
    Endpoint endpoint;    // Connect
    std::uint8_t fd = 0;  // Dup2
    std::string path;     // Exec
    std::uint8_t raw = 0; // first byte, kept for Illegal
};

/// Decodes one instruction at `at`; undefined or truncated encodings yield Op::Illegal of size 1.
Instruction decode_at(ByteView section, std::size_t at);

/// Builds a section from instructions; labels resolve jump offsets.
class Assembler {
public:
    Assembler& nop(std::size_t count = 1);
    Assembler& load(std::uint8_t r, std::uint16_t var);
    Assembler& store(std::uint8_t r, std::uint16_t var);
    Assembler& addi(std::uint8_t r, std::uint32_t imm);
    Assembler& jmp(const std::string& label);
    Assembler& jz(std::uint8_t r, const std::string& label);
    Assembler& call(const std::string& label);
    Assembler& ret();
    Assembler& endscan();
    Assembler& sys_socket();
    Assembler& sys_connect(const Endpoint& ep);
    Assembler& sys_dup2(std::uint8_t fd);
    Assembler& sys_fork();
    Assembler& sys_exec(const std::string& path);
    Assembler& raw(std::uint8_t byte);
    Assembler& label(const std::string& name);

    /// Throws std::logic_error on an undefined label.
    Bytes finish() const;

private:
    struct Fixup {
        std::size_t at;       // position of the 2-byte offset
        std::size_t next;     // address of the following instruction
        std::string label;
    };
    Bytes code_;
    std::map<std::string, std::size_t> labels_;
    std::vector<Fixup> fixups_;
};

enum class LoadValidation : std::uint8_t { None, Static };
enum class WatchdogReaction : std::uint8_t { HaltApp, Dos, Reboot };
enum class IllegalReaction : std::uint8_t { Fault, Crash };

std::string to_string(LoadValidation v);
std::string to_string(WatchdogReaction r);
std::string to_string(IllegalReaction r);
LoadValidation load_validation_from_string(std::string_view s);
WatchdogReaction watchdog_reaction_from_string(std::string_view s);
IllegalReaction illegal_reaction_from_string(std::string_view s);

struct SupervisionPolicy {
    bool whitelist_enabled = false;
    LoadValidation load_validation = LoadValidation::None;
    std::uint32_t watchdog_limit = 10000;
    WatchdogReaction watchdog_reaction = WatchdogReaction::HaltApp;
    IllegalReaction illegal_reaction = IllegalReaction::Fault;
};

/// A privileged effect the VM performed on behalf of the application.
struct SysEvent {
    SysNo sys = SysNo::Socket;
    std::string detail;
};

/// Registered by a child-path EXEC; the reverse shell the payload would open.
struct BackdoorSession {
    std::optional<Endpoint> endpoint;
    std::string path;
    bool runtime_replaced = false;
};

/// Process-level state the VM kernel tracks across sections of one loaded app.
struct VmKernel {
    int next_fd = 3;
    std::optional<Endpoint> connected;
    bool child = false;
    std::vector<SysEvent> events;
    std::vector<BackdoorSession> backdoors;
    std::uint64_t init_runs = 0;
};

using VarTable = std::map<std::string, Value>;

struct VmOutcome {
    enum class Kind : std::uint8_t {
        Completed,
        WatchdogTripped,
        IllegalTrapped,
        IllegalCrashed,
        PrivilegedTrapped,
        BackdoorSpawned,
    };
    Kind kind = Kind::Completed;
    std::uint64_t instructions = 0;
    std::optional<SysNo> sys;              // PrivilegedTrapped
    std::optional<BackdoorSession> backdoor;  // BackdoorSpawned
    std::size_t offset = 0;                // faulting instruction
    VarTable variables;

    bool operator==(const VmOutcome& o) const
    {
        return kind == o.kind && instructions == o.instructions && sys == o.sys && offset == o.offset &&
               variables == o.variables && backdoor.has_value() == o.backdoor.has_value() &&
               (!backdoor || (backdoor->endpoint == o.backdoor->endpoint && backdoor->path == o.backdoor->path &&
                              backdoor->runtime_replaced == o.backdoor->runtime_replaced));
    }
};

std::string to_string(VmOutcome::Kind k);
std::string describe(const VmOutcome& o);

/// Applies the data-section initial values, then executes the init section once.
VmOutcome run_init(const AppImage& image, const SupervisionPolicy& policy, VarTable& vars, VmKernel& kernel);
VmOutcome run_scan_cycle(const AppImage& image, const SupervisionPolicy& policy, VarTable& vars,
                         VmKernel& kernel);

enum class Section : std::uint8_t { Init, Cyclic };
std::string to_string(Section s);

struct Finding {
    enum class Kind : std::uint8_t { Illegal, Privileged, Loop };  // Loop: backward unconditional jump
    Kind kind = Kind::Illegal;
    Section section = Section::Init;
    std::size_t offset = 0;
    std::size_t length = 1;
    std::optional<SysNo> sys;
};

struct ValidationReport {
    std::vector<Finding> findings;
    bool passed() const { return findings.empty(); }
    std::size_t count(Finding::Kind k) const;
};

ValidationReport validate_app(const AppImage& image, const SupervisionPolicy& policy);

/// Counter app with a 48-byte NOP run at the head of init; each scan bumps `counter` and `out`.
AppImage build_benign_app();
/// Replaces the leading NOP run of the init section with the reverse-shell payload and a jump to the tail.
AppImage build_backdoor_app(const AppImage& base, const Endpoint& endpoint);
AppImage build_deadloop_app(bool guarded);
AppImage build_illegal_app(const AppImage& base);
/// K_DWORD holds `constant`; every scan copies it into DWORD.
AppImage build_assign_app(Value constant);

std::string disassemble(const AppImage& image);

}  // namespace plcg::logicvm
