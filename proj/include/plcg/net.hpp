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

#include "plcg/capture.hpp"
#include "plcg/plcsim.hpp"

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

/// Transport between workstations, proxies and devices. Payloads travel as
/// length-prefixed frames; the in-process network chops each stream into
/// seed-dependent chunks so receivers exercise real reassembly.
namespace plcg::net {

using ConnId = std::uint64_t;

/// Ticks a client waits for a reply before giving up.
inline constexpr std::uint64_t kTimeoutTicks = 100;

/// Anything that answers frames: a device, or a proxy in front of one.
class Server {
public:
    virtual ~Server() = default;
    virtual std::vector<Bytes> on_frame(ConnId conn, ByteView payload) = 0;
    virtual void on_close(ConnId) {}
    virtual std::string address() const = 0;
};

/// Serves a simulated PLC. Each delivered frame is preceded by one scan
/// cycle, so the device runs in lockstep with the clock.
class DeviceServer : public Server {
public:
    explicit DeviceServer(plcsim::Device& device, bool scan_per_frame = true)
        : device_(device), scan_per_frame_(scan_per_frame)
    {
    }

    std::vector<Bytes> on_frame(ConnId conn, ByteView payload) override;
    void on_close(ConnId conn) override { device_.connection_closed(conn); }
    std::string address() const override { return "plc:" + device_.fixture().name; }
    plcsim::Device& device() { return device_; }

private:
    plcsim::Device& device_;
    bool scan_per_frame_;
};

class Clock {
public:
    std::uint64_t now() const { return now_; }
    void advance(std::uint64_t ticks = 1) { now_ += ticks; }

private:
    std::uint64_t now_ = 0;
};

class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Client end of one connection.
class Channel {
public:
    virtual ~Channel() = default;
    virtual ConnId id() const = 0;
    /// Sends one payload and collects the replies; empty when the peer stayed
    /// silent for kTimeoutTicks.
    virtual std::vector<Bytes> transact(ByteView payload) = 0;
    virtual void close() = 0;
};

/// Deterministic in-process network with a shared clock and a capture tap on
/// the client side of every connection.
class Network {
public:
    explicit Network(std::uint64_t seed = 0) : rng_(seed) {}

    std::unique_ptr<Channel> connect(Server& server, const std::string& client_address);

    Clock& clock() { return clock_; }
    const wire::CaptureSet& capture() const { return capture_; }
    wire::CaptureSet take_capture();
    /// Tag stamped on subsequent records; used to label probe values.
    void set_tag(std::optional<std::uint64_t> tag) { tag_ = tag; }

private:
    friend class InProcessChannel;
    void record(Direction dir, const std::string& src, const std::string& dst, ByteView payload);
    /// Pushes a framed stream through a reassembler in random-sized chunks.
    std::vector<Bytes> carry(ByteView stream);

    Clock clock_;
    std::mt19937_64 rng_;
    wire::CaptureSet capture_;
    std::uint64_t next_seq_ = 0;
    ConnId next_conn_ = 1;
    std::optional<std::uint64_t> tag_;
};

/// Loopback TCP server for manual demos. Connections are served one frame at a
/// time under a lock, so the wrapped server sees the same serial order as in-process.
class TcpServer {
public:
    TcpServer(Server& server, std::uint16_t port);
    ~TcpServer();
    TcpServer(const TcpServer&) = delete;
    TcpServer& operator=(const TcpServer&) = delete;

    std::uint16_t port() const { return port_; }
    void stop();

private:
    void accept_loop();
    void serve(int fd, ConnId conn);

    Server& server_;
    std::mutex mutex_;
    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
    std::atomic<bool> running_{true};
    std::thread acceptor_;
    std::vector<std::thread> workers_;
    std::vector<int> client_fds_;
    ConnId next_conn_ = 1;
};

/// Client for TcpServer. Waits `timeout_ms` of wall time for replies.
class TcpChannel : public Channel {
public:
    TcpChannel(const std::string& host, std::uint16_t port, int timeout_ms = 500);
    ~TcpChannel() override;

    ConnId id() const override { return static_cast<ConnId>(fd_); }
    std::vector<Bytes> transact(ByteView payload) override;
    void close() override;

private:
    int fd_ = -1;
    int timeout_ms_;
    wire::FrameReader reader_;
};

}  // namespace plcg::net
