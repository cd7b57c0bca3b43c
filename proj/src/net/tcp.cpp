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
#include "plcg/net.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace plcg::net {

namespace {

[[noreturn]] void sys_fail(const std::string& what)
{
    throw TransportError(what + ": " + std::strerror(errno));
}

bool write_all(int fd, ByteView data)
{
    std::size_t at = 0;
    while (at < data.size()) {
        auto n = ::send(fd, data.data() + at, data.size() - at, MSG_NOSIGNAL);
        if (n < 0 && errno == EINTR)
            continue;
        if (n <= 0)
            return false;
        at += static_cast<std::size_t>(n);
    }
    return true;
}

enum class Read { Data, Timeout, Closed };

Read read_some(int fd, wire::FrameReader& reader, int timeout_ms)
{
    pollfd p{fd, POLLIN, 0};
    int r = ::poll(&p, 1, timeout_ms);
    if (r == 0)
        return Read::Timeout;
    if (r < 0)
        return Read::Closed;
    std::uint8_t buf[4096];
    auto n = ::recv(fd, buf, sizeof buf, 0);
    if (n <= 0)
        return Read::Closed;
    reader.feed(ByteView(buf, static_cast<std::size_t>(n)));
    return Read::Data;
}

}  // namespace

TcpServer::TcpServer(Server& server, std::uint16_t port) : server_(server)
{
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0)
        sys_fail("socket");
    int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(port);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
        ::close(listen_fd_);
        sys_fail("bind");
    }
    if (::listen(listen_fd_, 8) < 0) {
        ::close(listen_fd_);
        sys_fail("listen");
    }
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    acceptor_ = std::thread([this] { accept_loop(); });
}

TcpServer::~TcpServer() { stop(); }

void TcpServer::stop()
{
    if (!running_.exchange(false))
        return;
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    if (acceptor_.joinable())
        acceptor_.join();
    {
        std::lock_guard lock(mutex_);
        for (int fd : client_fds_)
            ::shutdown(fd, SHUT_RDWR);
    }
    for (auto& w : workers_)
        if (w.joinable())
            w.join();
}

void TcpServer::accept_loop()
{
    while (running_) {
        pollfd p{listen_fd_, POLLIN, 0};
        if (::poll(&p, 1, 100) <= 0)
            continue;
        int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0)
            continue;
        int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
        std::lock_guard lock(mutex_);
        client_fds_.push_back(fd);
        ConnId conn = next_conn_++;
        workers_.emplace_back([this, fd, conn] { serve(fd, conn); });
    }
}

void TcpServer::serve(int fd, ConnId conn)
{
    wire::FrameReader reader;
    while (running_ && read_some(fd, reader, 100) != Read::Closed) {
        while (auto f = reader.next()) {
            std::vector<Bytes> replies;
            {
                std::lock_guard lock(mutex_);
                replies = server_.on_frame(conn, *f);
            }
            for (const auto& reply : replies)
                if (!write_all(fd, wire::frame(reply)))
                    break;
        }
    }
    {
        std::lock_guard lock(mutex_);
        server_.on_close(conn);
    }
    ::close(fd);
}

TcpChannel::TcpChannel(const std::string& host, std::uint16_t port, int timeout_ms) : timeout_ms_(timeout_ms)
{
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0)
        sys_fail("socket");
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(fd_);
        throw TransportError("bad IPv4 address: " + host);
    }
    if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
        ::close(fd_);
        fd_ = -1;
        sys_fail("connect " + host + ":" + std::to_string(port));
    }
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

TcpChannel::~TcpChannel() { close(); }

std::vector<Bytes> TcpChannel::transact(ByteView payload)
{
    if (fd_ < 0)
        throw TransportError("channel is closed");
    if (!write_all(fd_, wire::frame(payload)))
        sys_fail("send");
    std::vector<Bytes> out;
    // First reply within the timeout; further replies of the same exchange follow closely.
    int wait = timeout_ms_;
    while (read_some(fd_, reader_, wait) == Read::Data) {
        while (auto f = reader_.next()) {
            out.push_back(std::move(*f));
            wait = 20;
        }
    }
    return out;
}

void TcpChannel::close()
{
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

}  // namespace plcg::net
