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

#include <charconv>
#include <sstream>

namespace plcg::logicvm {

namespace {

constexpr std::array<std::uint8_t, 4> kMagic{'P', 'L', 'G', 'A'};
constexpr Encoding kU32{4, Endianness::Big};
constexpr Encoding kU16{2, Endianness::Big};

void append_u32(Bytes& out, std::uint32_t v)
{
    auto b = encode_uint(v, kU32);
    out.insert(out.end(), b.begin(), b.end());
}

class Reader {
public:
    explicit Reader(ByteView in) : in_(in) {}

    ByteView take(std::size_t n)
    {
        if (n > in_.size() - at_)
            throw VmError(VmErrc::MalformedImage, "image truncated at byte " + std::to_string(at_));
        auto out = in_.subspan(at_, n);
        at_ += n;
        return out;
    }
    std::uint64_t uint(Encoding e) { return get_uint(take(e.width), e); }
    bool done() const { return at_ == in_.size(); }

private:
    ByteView in_;
    std::size_t at_ = 0;
};

}  // namespace

Bytes serialize(const AppImage& image)
{
    Bytes data;
    auto count = encode_uint(image.data.size(), kU16);
    data.insert(data.end(), count.begin(), count.end());
    for (const auto& e : image.data) {
        if (e.name.size() > 0xff)
            throw VmError(VmErrc::MalformedImage, "variable name too long: " + e.name);
        data.push_back(static_cast<std::uint8_t>(e.name.size()));
        data.insert(data.end(), e.name.begin(), e.name.end());
        append_u32(data, e.initial);
    }

    Bytes out(kMagic.begin(), kMagic.end());
    out.push_back(image.version);
    out.push_back(image.target == StoreTarget::Flash ? 0x01 : 0x00);
    for (const Bytes* section : std::initializer_list<const Bytes*>{&image.init, &image.cyclic, &data}) {
        append_u32(out, static_cast<std::uint32_t>(section->size()));
        out.insert(out.end(), section->begin(), section->end());
    }
    return out;
}

AppImage parse_image(ByteView bytes)
{
    Reader r(bytes);
    auto magic = r.take(4);
    if (!std::equal(magic.begin(), magic.end(), kMagic.begin()))
        throw VmError(VmErrc::MalformedImage, "bad image magic");
    AppImage image;
    image.version = r.take(1)[0];
    auto flags = r.take(1)[0];
    image.target = (flags & 0x01) ? StoreTarget::Flash : StoreTarget::Ram;
    auto init = r.take(r.uint(kU32));
    image.init.assign(init.begin(), init.end());
    auto cyclic = r.take(r.uint(kU32));
    image.cyclic.assign(cyclic.begin(), cyclic.end());

    Reader d(r.take(r.uint(kU32)));
    auto count = d.uint(kU16);
    for (std::uint64_t i = 0; i < count; ++i) {
        auto len = d.take(1)[0];
        auto name = d.take(len);
        DataEntry e;
        e.name.assign(name.begin(), name.end());
        e.initial = static_cast<Value>(d.uint(kU32));
        image.data.push_back(std::move(e));
    }
    if (!d.done() || !r.done())
        throw VmError(VmErrc::MalformedImage, "trailing bytes in image");
    return image;
}

std::string Endpoint::to_string() const
{
    std::ostringstream s;
    s << int(ip[0]) << '.' << int(ip[1]) << '.' << int(ip[2]) << '.' << int(ip[3]) << ':' << port;
    return s.str();
}

Endpoint Endpoint::parse(std::string_view text)
{
    Endpoint ep;
    auto bad = [&] { return std::invalid_argument("bad endpoint: " + std::string(text)); };
    auto colon = text.rfind(':');
    if (colon == std::string_view::npos)
        throw bad();
    std::string_view host = text.substr(0, colon);
    std::string_view port = text.substr(colon + 1);
    for (int i = 0; i < 4; ++i) {
        auto dot = host.find('.');
        auto part = i < 3 ? host.substr(0, dot) : host;
        if (i < 3 && dot == std::string_view::npos)
            throw bad();
        unsigned v = 0;
        auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (ec != std::errc() || p != part.data() + part.size() || v > 255)
            throw bad();
        ep.ip[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v);
        if (i < 3)
            host.remove_prefix(dot + 1);
    }
    unsigned pv = 0;
    auto [p, ec] = std::from_chars(port.data(), port.data() + port.size(), pv);
    if (ec != std::errc() || p != port.data() + port.size() || pv > 0xffff)
        throw bad();
    ep.port = static_cast<std::uint16_t>(pv);
    return ep;
}

std::string to_string(SysNo n)
{
    switch (n) {
    case SysNo::Socket: return "SOCKET";
    case SysNo::Connect: return "CONNECT";
    case SysNo::Dup2: return "DUP2";
    case SysNo::Fork: return "FORK";
    case SysNo::Exec: return "EXEC";
    }
    return "SYS?";
}

Instruction decode_at(ByteView s, std::size_t at)
{
    Instruction ins;
    ins.raw = s[at];
    auto illegal = [&] {
        Instruction bad;
        bad.op = Op::Illegal;
        bad.size = 1;
        bad.raw = s[at];
        return bad;
    };
    auto need = [&](std::size_t n) { return at + n <= s.size(); };
    auto u16 = [&](std::size_t off) { return static_cast<std::uint16_t>(get_uint(s.subspan(at + off, 2), kU16)); };

    switch (s[at]) {
    case 0x00: ins.op = Op::Nop; return ins;
    case 0x07: ins.op = Op::Ret; return ins;
    case 0x08: ins.op = Op::EndScan; return ins;
    case 0x01:
    case 0x02:
        if (!need(4) || s[at + 1] >= kRegisters)
            return illegal();
        ins.op = s[at] == 0x01 ? Op::Load : Op::Store;
        ins.size = 4;
        ins.reg = s[at + 1];
        ins.var = u16(2);
        return ins;
    case 0x03:
        if (!need(6) || s[at + 1] >= kRegisters)
            return illegal();
        ins.op = Op::Addi;
        ins.size = 6;
        ins.reg = s[at + 1];
        ins.imm = static_cast<std::uint32_t>(get_uint(s.subspan(at + 2, 4), kU32));
        return ins;
    case 0x04:
    case 0x06:
        if (!need(3))
            return illegal();
        ins.op = s[at] == 0x04 ? Op::Jmp : Op::Call;
        ins.size = 3;
        ins.off = static_cast<std::int16_t>(u16(1));
        return ins;
    case 0x05:
        if (!need(4) || s[at + 1] >= kRegisters)
            return illegal();
        ins.op = Op::Jz;
        ins.size = 4;
        ins.reg = s[at + 1];
        ins.off = static_cast<std::int16_t>(u16(2));
        return ins;
    case 0x10: {
        if (!need(2))
            return illegal();
        ins.op = Op::Sys;
        switch (s[at + 1]) {
        case 1:
            ins.sys = SysNo::Socket;
            ins.size = 2;
            return ins;
        case 2:
            if (!need(8))
                return illegal();
            ins.sys = SysNo::Connect;
            ins.size = 8;
            std::copy_n(s.begin() + static_cast<std::ptrdiff_t>(at + 2), 4, ins.endpoint.ip.begin());
            ins.endpoint.port = u16(6);
            return ins;
        case 3:
            if (!need(3))
                return illegal();
            ins.sys = SysNo::Dup2;
            ins.size = 3;
            ins.fd = s[at + 2];
            return ins;
        case 4:
            ins.sys = SysNo::Fork;
            ins.size = 2;
            return ins;
        case 5: {
            if (!need(3) || !need(3 + s[at + 2]))
                return illegal();
            ins.sys = SysNo::Exec;
            ins.size = 3 + s[at + 2];
            auto p = s.subspan(at + 3, s[at + 2]);
            ins.path.assign(p.begin(), p.end());
            return ins;
        }
        default:
            return illegal();
        }
    }
    default:
        return illegal();
    }
}

Assembler& Assembler::nop(std::size_t count)
{
    code_.insert(code_.end(), count, 0x00);
    return *this;
}

Assembler& Assembler::load(std::uint8_t r, std::uint16_t var)
{
    code_.insert(code_.end(), {0x01, r, static_cast<std::uint8_t>(var >> 8), static_cast<std::uint8_t>(var)});
    return *this;
}

Assembler& Assembler::store(std::uint8_t r, std::uint16_t var)
{
    code_.insert(code_.end(), {0x02, r, static_cast<std::uint8_t>(var >> 8), static_cast<std::uint8_t>(var)});
    return *this;
}

Assembler& Assembler::addi(std::uint8_t r, std::uint32_t imm)
{
    code_.insert(code_.end(), {0x03, r});
    append_u32(code_, imm);
    return *this;
}

Assembler& Assembler::jmp(const std::string& label)
{
    code_.insert(code_.end(), {0x04, 0x00, 0x00});
    fixups_.push_back({code_.size() - 2, code_.size(), label});
    return *this;
}

Assembler& Assembler::jz(std::uint8_t r, const std::string& label)
{
    code_.insert(code_.end(), {0x05, r, 0x00, 0x00});
    fixups_.push_back({code_.size() - 2, code_.size(), label});
    return *this;
}

Assembler& Assembler::call(const std::string& label)
{
    code_.insert(code_.end(), {0x06, 0x00, 0x00});
    fixups_.push_back({code_.size() - 2, code_.size(), label});
    return *this;
}

Assembler& Assembler::ret()
{
    code_.push_back(0x07);
    return *this;
}

Assembler& Assembler::endscan()
{
    code_.push_back(0x08);
    return *this;
}

Assembler& Assembler::sys_socket()
{
    code_.insert(code_.end(), {0x10, 0x01});
    return *this;
}

Assembler& Assembler::sys_connect(const Endpoint& ep)
{
    code_.insert(code_.end(), {0x10, 0x02});
    code_.insert(code_.end(), ep.ip.begin(), ep.ip.end());
    code_.push_back(static_cast<std::uint8_t>(ep.port >> 8));
    code_.push_back(static_cast<std::uint8_t>(ep.port));
    return *this;
}

Assembler& Assembler::sys_dup2(std::uint8_t fd)
{
    code_.insert(code_.end(), {0x10, 0x03, fd});
    return *this;
}

Assembler& Assembler::sys_fork()
{
    code_.insert(code_.end(), {0x10, 0x04});
    return *this;
}

Assembler& Assembler::sys_exec(const std::string& path)
{
    if (path.size() > 0xff)
        throw std::invalid_argument("exec path too long");
    code_.insert(code_.end(), {0x10, 0x05, static_cast<std::uint8_t>(path.size())});
    code_.insert(code_.end(), path.begin(), path.end());
    return *this;
}

Assembler& Assembler::raw(std::uint8_t byte)
{
    code_.push_back(byte);
    return *this;
}

Assembler& Assembler::label(const std::string& name)
{
    labels_[name] = code_.size();
    return *this;
}

Bytes Assembler::finish() const
{
    Bytes out = code_;
    for (const auto& f : fixups_) {
        auto it = labels_.find(f.label);
        if (it == labels_.end())
            throw std::logic_error("undefined label " + f.label);
        auto off = static_cast<std::int64_t>(it->second) - static_cast<std::int64_t>(f.next);
        auto u = static_cast<std::uint16_t>(static_cast<std::int16_t>(off));
        out[f.at] = static_cast<std::uint8_t>(u >> 8);
        out[f.at + 1] = static_cast<std::uint8_t>(u);
    }
    return out;
}

namespace {

std::string mnemonic(const Instruction& ins, std::size_t at, const AppImage& image)
{
    auto var = [&](std::uint16_t v) {
        return v < image.data.size() ? image.data[v].name : "#" + std::to_string(v);
    };
    auto target = [&] { return static_cast<std::int64_t>(at + ins.size) + ins.off; };
    std::ostringstream s;
    switch (ins.op) {
    case Op::Nop: s << "NOP"; break;
    case Op::Load: s << "LOAD r" << int(ins.reg) << ", " << var(ins.var); break;
    case Op::Store: s << "STORE r" << int(ins.reg) << ", " << var(ins.var); break;
    case Op::Addi: s << "ADDI r" << int(ins.reg) << ", " << ins.imm; break;
    case Op::Jmp: s << "JMP " << target(); break;
    case Op::Jz: s << "JZ r" << int(ins.reg) << ", " << target(); break;
    case Op::Call: s << "CALL " << target(); break;
    case Op::Ret: s << "RET"; break;
    case Op::EndScan: s << "ENDSCAN"; break;
    case Op::Sys:
        s << "SYS " << to_string(ins.sys);
        if (ins.sys == SysNo::Connect)
            s << " " << ins.endpoint.to_string();
        if (ins.sys == SysNo::Dup2)
            s << " " << int(ins.fd);
        if (ins.sys == SysNo::Exec)
            s << " \"" << ins.path << "\"";
        break;
    case Op::Illegal: {
        static constexpr char hex[] = "0123456789ABCDEF";
        s << "ILLEGAL " << hex[ins.raw >> 4] << hex[ins.raw & 0xf];
        break;
    }
    }
    return s.str();
}

void listing(std::ostringstream& out, const char* name, ByteView section, const AppImage& image)
{
    out << name << ": " << section.size() << " bytes\n";
    std::size_t at = 0;
    while (at < section.size()) {
        auto ins = decode_at(section, at);
        std::size_t run = 1;
        if (ins.op == Op::Nop)
            while (at + run < section.size() && section[at + run] == 0x00)
                ++run;
        char buf[16];
        std::snprintf(buf, sizeof buf, "  %04zx  ", at);
        out << buf << mnemonic(ins, at, image);
        if (run > 1)
            out << " x" << run;
        out << "\n";
        at += ins.op == Op::Nop ? run : ins.size;
    }
}

}  // namespace

std::string disassemble(const AppImage& image)
{
    std::ostringstream out;
    out << "PLGA v" << int(image.version) << " target=" << (image.target == StoreTarget::Flash ? "flash" : "ram")
        << "\n";
    listing(out, "init", image.init, image);
    listing(out, "cyclic", image.cyclic, image);
    out << "data: " << image.data.size() << " variables\n";
    for (std::size_t i = 0; i < image.data.size(); ++i)
        out << "  [" << i << "] " << image.data[i].name << " = " << image.data[i].initial << "\n";
    return out.str();
}

}  // namespace plcg::logicvm
