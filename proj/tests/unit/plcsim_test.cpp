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
#include "plcg/plcsim.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace plcg;
using namespace plcg::plcsim;
using wire::Message;
using wire::RequestKind;
using wire::Status;

namespace {

// Sends one request and returns every decoded response.
std::vector<Message> send(Device& d, ConnId conn, const Message& req)
{
    std::vector<Message> out;
    for (const auto& bytes : d.handle_packet(conn, wire::encode_command(d.profile(), req)))
        out.push_back(wire::decode(d.profile(), bytes));
    return out;
}

Status status_of(Device& d, ConnId conn, const Message& req)
{
    auto r = send(d, conn, req);
    return r.empty() ? static_cast<Status>(0xff) : r.front().status();
}

Message download(const logicvm::AppImage& img, bool flash)
{
    return wire::make_request(RequestKind::DownloadApp, 0, std::nullopt, flash ? 1 : 0, logicvm::serialize(img));
}

Message write(const std::string& var, Value v)
{
    return wire::make_request(RequestKind::WriteVar, wire::variable_id(var), v);
}

Message auth(wire::AuthOp op, Bytes blob = {}, std::uint8_t flags = 0)
{
    return wire::make_request(RequestKind::AuthRequest, 0, std::nullopt, static_cast<std::uint8_t>(op) | flags,
                              std::move(blob));
}

}  // namespace

TEST(DeviceFixtures, NineteenValidFixtures)
{
    auto all = load_device_fixtures();
    ASSERT_EQ(all.size(), 19u);
    for (const auto& f : all) {
        EXPECT_NO_THROW(validate(f)) << f.name;
        EXPECT_TRUE(f.capabilities.complete_for(f.modes)) << f.name;
        for (const auto& m : f.modes)
            EXPECT_EQ(f.capabilities.at(m, Manipulation::ReadId), Requirement::Open) << f.name << " " << m;
    }
}

TEST(DeviceFixtures, JsonRoundTrip)
{
    auto names = device_fixture_names();
    names.push_back("bench:fins_like");
    for (const auto& n : names) {
        auto f = device_fixture_by_name(n);
        f.flash_app = logicvm::build_benign_app();
        auto g = fixture_from_json(fixture_to_json(f));
        EXPECT_EQ(fixture_to_json(g), fixture_to_json(f)) << n;
    }
}

TEST(DeviceFixtures, ValidationRejectsIncompleteMatrix)
{
    auto f = device_fixture_by_name("cpu317_like");
    auto j = fixture_to_json(f);
    j["capabilities"].erase(0);
    EXPECT_THROW(fixture_from_json(j), std::invalid_argument);
    f.initial_mode = "nope";
    EXPECT_THROW(validate(f), std::invalid_argument);
}

TEST(Device, Cpu317WriteProtectStopsWithoutAuth)
{
    Device d(device_fixture_by_name("cpu317_like"));
    d.set_mode("W protection");
    EXPECT_EQ(status_of(d, 1, wire::make_request(RequestKind::Stop)), Status::Ok);
    EXPECT_EQ(d.state().run_state, RunState::Stopped);
}

TEST(Device, Cpu1217NoAccessRefusesUpload)
{
    Device d(device_fixture_by_name("cpu1217_like"));
    d.set_mode("No Access");
    EXPECT_EQ(status_of(d, 1, wire::make_request(RequestKind::UploadApp)), Status::Refused);
}

TEST(Device, ReadIdAlwaysAnswers)
{
    for (const auto& f : load_device_fixtures()) {
        for (const auto& mode : f.modes) {
            Device d(f);
            d.set_mode(mode);
            auto r = send(d, 7, wire::make_request(RequestKind::ReadId));
            ASSERT_EQ(r.size(), 1u) << f.name;
            EXPECT_EQ(r[0].status(), Status::Ok);
            EXPECT_EQ(std::string(r[0].blob.begin(), r[0].blob.end()), f.identity);
        }
    }
}

TEST(Device, DownloadUploadRoundTripIsByteIdentical)
{
    Device d(make_bench_fixture("wago_like"));
    auto img = logicvm::build_benign_app();
    ASSERT_EQ(status_of(d, 1, download(img, false)), Status::Ok);
    auto r = send(d, 1, wire::make_request(RequestKind::UploadApp));
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r[0].blob, logicvm::serialize(img));
}

TEST(Device, MonitorEmitsEveryResponseShape)
{
    Device d(make_bench_fixture("s7comm_like"));
    d.set_variable("scratch", 0x3456);
    auto r = send(d, 1, wire::make_request(RequestKind::Monitor, wire::variable_id("scratch")));
    ASSERT_EQ(r.size(), 2u);
    EXPECT_EQ(r[0].value, 0x3456u);
    EXPECT_EQ(r[1].value, 0x3456u);
}

TEST(Device, ReadOnlyModeRefusesWritesButAllowsReads)
{
    Device d(device_fixture_by_name("rx3i_like"));
    d.set_mode("Level One");
    EXPECT_EQ(status_of(d, 1, write("scratch", 5)), Status::Refused);
    EXPECT_EQ(d.variable("scratch"), 0u);
    EXPECT_EQ(status_of(d, 1, wire::make_request(RequestKind::ReadVar, wire::variable_id("setpoint"))), Status::Ok);
    d.set_mode("Level Three");
    EXPECT_EQ(status_of(d, 1, write("scratch", 5)), Status::Ok);
    EXPECT_EQ(d.variable("scratch"), 5u);
}

TEST(Device, PrivateTagsNeedAuthentication)
{
    Device d(device_fixture_by_name("controllogix_like"));
    EXPECT_EQ(status_of(d, 1, write("scratch", 9)), Status::Ok);
    EXPECT_EQ(status_of(d, 1, write("recipe", 9)), Status::Refused);
    EXPECT_EQ(d.variable("recipe"), 42u);
    EXPECT_EQ(status_of(d, 1, wire::make_request(RequestKind::Stop)), Status::Unsupported);
}

TEST(Device, SecureProcessBindsAuthToConnection)
{
    auto f = device_fixture_by_name("hardened_like");
    Device d(f);
    EXPECT_EQ(status_of(d, 1, wire::make_request(RequestKind::Stop)), Status::Refused);
    EXPECT_EQ(status_of(d, 1, auth(wire::AuthOp::Login, wire::password_digest("wrong"))), Status::Refused);
    EXPECT_EQ(status_of(d, 1, auth(wire::AuthOp::Login, wire::password_digest(*f.password))), Status::Ok);
    EXPECT_EQ(status_of(d, 2, wire::make_request(RequestKind::Stop)), Status::Refused);
    EXPECT_EQ(status_of(d, 1, wire::make_request(RequestKind::Stop)), Status::Ok);
    // Client-side verdicts are not accepted by a server that validates itself.
    EXPECT_EQ(status_of(d, 3, auth(wire::AuthOp::Verdict, {}, wire::kVerdictAccept)), Status::Unsupported);
}

TEST(Device, ClientSideTrustsVerdict)
{
    auto f = device_fixture_by_name("m580_like");
    Device d(f);
    auto r = send(d, 1, auth(wire::AuthOp::FetchSecret));
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r[0].blob, wire::password_digest(*f.password));
    EXPECT_EQ(status_of(d, 1, auth(wire::AuthOp::Login, to_bytes("anything"))), Status::Unsupported);
    EXPECT_EQ(status_of(d, 1, wire::make_request(RequestKind::Stop)), Status::Refused);
    EXPECT_EQ(status_of(d, 1, auth(wire::AuthOp::Verdict, {}, wire::kVerdictAccept)), Status::Ok);
    EXPECT_EQ(status_of(d, 1, wire::make_request(RequestKind::Stop)), Status::Ok);
}

TEST(Device, ClientSidePlaintextSecret)
{
    auto f = device_fixture_by_name("micrologix1100_like");
    Device d(f);
    auto r = send(d, 1, auth(wire::AuthOp::FetchSecret));
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r[0].blob, to_bytes(*f.password));
}

TEST(Device, StatelessUnlockIsGlobal)
{
    auto f = device_fixture_by_name("r08cpu_like");
    Device d(f);
    EXPECT_EQ(status_of(d, 2, wire::make_request(RequestKind::Stop)), Status::Refused);
    EXPECT_EQ(status_of(d, 1, auth(wire::AuthOp::Login, to_bytes(*f.password))), Status::Ok);
    EXPECT_EQ(status_of(d, 2, wire::make_request(RequestKind::Stop)), Status::Ok);
}

TEST(Device, NoPasswordExecutesEverything)
{
    Device d(device_fixture_by_name("fm802_like"));
    EXPECT_EQ(d.profile().auth_model, wire::AuthModel::NoPassword);
    EXPECT_EQ(status_of(d, 1, download(logicvm::build_benign_app(), false)), Status::Ok);
    EXPECT_EQ(status_of(d, 1, wire::make_request(RequestKind::Stop)), Status::Ok);
}

TEST(Device, ModeChangeIsGated)
{
    auto f = device_fixture_by_name("rx3i_like");
    Device d(f);
    Message m = wire::make_request(RequestKind::SetMode, 0, std::nullopt, 0, to_bytes("Level One"));
    EXPECT_EQ(status_of(d, 1, m), Status::Refused);
    EXPECT_EQ(d.state().mode, "Level Three");
    ASSERT_EQ(status_of(d, 1, auth(wire::AuthOp::Login, to_bytes(*f.password))), Status::Ok);
    EXPECT_EQ(status_of(d, 1, m), Status::Ok);
    EXPECT_EQ(d.state().mode, "Level One");
}

TEST(Device, MacProfileReportsIntegrityFailure)
{
    Device d(make_bench_fixture("pcccplus_like"));
    auto bytes = wire::encode_command(d.profile(), write("scratch", 0x1234));
    bytes[71] ^= 0xff;
    auto out = d.handle_packet(1, bytes);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(wire::decode(d.profile(), out[0]).status(), Status::IntegrityFailure);
    EXPECT_EQ(d.variable("scratch"), 0u);
}

TEST(Device, UnknownShapeIsDropped)
{
    Device d(make_bench_fixture("fins_like"));
    EXPECT_TRUE(d.handle_packet(1, Bytes(5, 0xaa)).empty());
}

TEST(Reboot, FlashIllegalAppIsNoRecoveryDos)
{
    auto f = bench_twin(device_fixture_by_name("m340_like"));
    Device d(f);
    auto img = logicvm::build_illegal_app(logicvm::build_benign_app());
    ASSERT_EQ(status_of(d, 1, download(img, true)), Status::Ok);
    d.tick();
    EXPECT_EQ(d.state().run_state, RunState::Dos);
    EXPECT_TRUE(d.handle_packet(1, wire::encode_command(d.profile(), wire::make_request(RequestKind::ReadId))).empty());
    d.reboot();
    EXPECT_EQ(d.state().run_state, RunState::NoRecoveryDos);
    d.reboot();
    EXPECT_EQ(d.state().run_state, RunState::NoRecoveryDos);
    EXPECT_TRUE(d.handle_packet(1, wire::encode_command(d.profile(), wire::make_request(RequestKind::ReadId))).empty());
}

TEST(Reboot, RamDeadLoopIsGoneAfterReboot)
{
    Device d(make_bench_fixture("wago_like"));
    ASSERT_EQ(status_of(d, 1, download(logicvm::build_deadloop_app(false), false)), Status::Ok);
    d.tick();
    EXPECT_EQ(d.state().run_state, RunState::Halted);
    d.reboot();
    EXPECT_EQ(d.state().run_state, RunState::Running);
    EXPECT_FALSE(d.active_app().has_value());
    EXPECT_FALSE(d.state().app_ram.has_value());
}

TEST(Reboot, GuardedFlashDeadLoopRecovers)
{
    Device d(make_bench_fixture("wago_like"));
    ASSERT_EQ(status_of(d, 1, download(logicvm::build_deadloop_app(true), true)), Status::Ok);
    d.tick();
    EXPECT_EQ(d.state().run_state, RunState::Running);
    ASSERT_EQ(status_of(d, 1, write("v1", 1)), Status::Ok);
    d.tick();
    EXPECT_EQ(d.state().run_state, RunState::Halted);
    EXPECT_EQ(d.last_outcome()->kind, logicvm::VmOutcome::Kind::WatchdogTripped);
    d.reboot();
    EXPECT_EQ(d.state().run_state, RunState::Running);
    EXPECT_EQ(d.variable("v1"), 0u);
    d.tick();
    EXPECT_EQ(d.last_outcome()->kind, logicvm::VmOutcome::Kind::Completed);
}

TEST(Supervision, WatchdogReactionsAreDistinct)
{
    auto run = [](const char* device) {
        Device d(bench_twin(device_fixture_by_name(device)));
        EXPECT_EQ(status_of(d, 1, download(logicvm::build_deadloop_app(false), false)), Status::Ok);
        d.tick();
        auto monitor = d.handle_packet(
            1, wire::encode_command(d.profile(), wire::make_request(RequestKind::Monitor, wire::variable_id("out"))));
        return std::tuple{d.state().run_state, !monitor.empty(), d.boot_count()};
    };
    EXPECT_EQ(run("cpu317_like"), std::tuple(RunState::Halted, true, 0ull));
    EXPECT_EQ(run("rx3i_like"), std::tuple(RunState::Dos, false, 0ull));
    // Rebooted into an empty RAM: running and answering, nothing loaded.
    auto [state, responsive, boots] = run("lk207_like");
    EXPECT_EQ(state, RunState::Running);
    EXPECT_TRUE(responsive);
    EXPECT_EQ(boots, 1u);
}

TEST(Supervision, StaticValidationRejectsLoopsAndIllegalCode)
{
    Device d(bench_twin(device_fixture_by_name("mp3008_like")));
    EXPECT_EQ(status_of(d, 1, download(logicvm::build_deadloop_app(true), false)), Status::Refused);
    EXPECT_EQ(status_of(d, 1, download(logicvm::build_illegal_app(logicvm::build_benign_app()), false)),
              Status::Refused);
    EXPECT_EQ(status_of(d, 1, download(logicvm::build_benign_app(), false)), Status::Ok);
    EXPECT_EQ(d.downloads(), 1u);
}

TEST(Supervision, BackdoorRegistersAndScansContinue)
{
    Device d(make_bench_fixture("wago_like"));
    auto img = logicvm::build_backdoor_app(logicvm::build_benign_app(), {{192, 168, 1, 99}, 4444});
    ASSERT_EQ(status_of(d, 1, download(img, false)), Status::Ok);
    for (int i = 0; i < 10; ++i)
        d.tick();
    EXPECT_EQ(d.state().run_state, RunState::Running);
    ASSERT_EQ(d.kernel().backdoors.size(), 1u);
    EXPECT_EQ(d.kernel().backdoors[0].endpoint->to_string(), "192.168.1.99:4444");
    EXPECT_EQ(d.variable("counter"), 10u);
    EXPECT_EQ(d.kernel().init_runs, 1u);
}

TEST(Properties, DeniedNeverMutates)
{
    std::mt19937_64 rng(17);
    for (const auto& f : load_device_fixtures()) {
        for (const auto& mode : f.modes) {
            Device d(f);
            d.set_mode(mode);
            for (int i = 0; i < 60; ++i) {
                auto kind = wire::kAllRequestKinds[rng() % wire::kAllRequestKinds.size()];
                auto manip = manipulation_for(kind);
                if (!manip || f.capabilities.at(mode, *manip) != Requirement::Denied)
                    continue;
                Message m = wire::make_request(kind, wire::variable_id(rng() % 2 ? "scratch" : "setpoint"));
                if (kind == RequestKind::WriteVar)
                    m.value = static_cast<Value>(rng() & 0xffff);
                if (kind == RequestKind::DownloadApp)
                    m.blob = logicvm::serialize(logicvm::build_benign_app());
                if (kind == RequestKind::SetMode)
                    m.blob = to_bytes(f.modes.front());
                auto before = d.snapshot();
                EXPECT_EQ(status_of(d, 1 + rng() % 3, m), Status::Refused) << f.name << " " << to_string(kind);
                EXPECT_EQ(d.snapshot(), before) << f.name << " " << to_string(kind);
            }
        }
    }
}

TEST(Properties, SecureProcessGatesPerSession)
{
    auto f = device_fixture_by_name("hardened_like");
    std::mt19937_64 rng(5);
    for (int round = 0; round < 20; ++round) {
        Device d(f);
        std::set<ConnId> authed;
        for (int i = 0; i < 50; ++i) {
            ConnId c = 1 + rng() % 4;
            if (rng() % 5 == 0) {
                bool good = rng() % 2;
                auto st = status_of(d, c, auth(wire::AuthOp::Login, wire::password_digest(good ? *f.password : "x")));
                if (good && st == Status::Ok)
                    authed.insert(c);
                continue;
            }
            auto st = status_of(d, c, wire::make_request(rng() % 2 ? RequestKind::Stop : RequestKind::Run));
            EXPECT_EQ(st == Status::Ok, authed.count(c) > 0);
        }
    }
}
