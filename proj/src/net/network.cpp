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

namespace plcg::net {

std::vector<Bytes> DeviceServer::on_frame(ConnId conn, ByteView payload)
{
    if (scan_per_frame_)
        device_.tick();
    return device_.handle_packet(conn, payload);
}

class InProcessChannel : public Channel {
public:
    InProcessChannel(Network& net, Server& server, ConnId id, std::string client)
        : net_(net), server_(server), id_(id), client_(std::move(client))
    {
    }
    ~InProcessChannel() override { close(); }

    ConnId id() const override { return id_; }

    std::vector<Bytes> transact(ByteView payload) override
    {
        if (closed_)
            throw TransportError("channel " + std::to_string(id_) + " is closed");
        const auto server_addr = server_.address();
        std::vector<Bytes> replies;
        for (const auto& frame : net_.carry(wire::frame(payload))) {
            net_.clock().advance();
            net_.record(Direction::WorkstationToPlc, client_, server_addr, frame);
            for (const auto& reply : server_.on_frame(id_, frame)) {
                for (auto& r : net_.carry(wire::frame(reply))) {
                    net_.clock().advance();
                    net_.record(Direction::PlcToWorkstation, server_addr, client_, r);
                    replies.push_back(std::move(r));
                }
            }
        }
        if (replies.empty())
            net_.clock().advance(kTimeoutTicks);
        return replies;
    }

    void close() override
    {
        if (closed_)
            return;
        closed_ = true;
        server_.on_close(id_);
    }

private:
    Network& net_;
    Server& server_;
    ConnId id_;
    std::string client_;
    bool closed_ = false;
};

std::unique_ptr<Channel> Network::connect(Server& server, const std::string& client_address)
{
    return std::make_unique<InProcessChannel>(*this, server, next_conn_++, client_address);
}

wire::CaptureSet Network::take_capture()
{
    wire::CaptureSet out;
    out.swap(capture_);
    return out;
}

void Network::record(Direction dir, const std::string& src, const std::string& dst, ByteView payload)
{
    wire::PacketRecord r;
    r.seq = next_seq_++;
    r.direction = dir;
    r.src = src;
    r.dst = dst;
    r.payload.assign(payload.begin(), payload.end());
    r.tag = tag_;
    capture_.push_back(std::move(r));
}

std::vector<Bytes> Network::carry(ByteView stream)
{
    wire::FrameReader reader;
    std::vector<Bytes> out;
    std::size_t at = 0;
    while (at < stream.size()) {
        std::size_t n = std::min<std::size_t>(stream.size() - at, 1 + rng_() % 64);
        reader.feed(stream.subspan(at, n));
        at += n;
        while (auto f = reader.next())
            out.push_back(std::move(*f));
    }
    return out;
}

}  // namespace plcg::net
