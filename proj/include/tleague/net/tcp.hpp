#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "tleague/proto/codec.hpp"

namespace tleague::net {

struct NetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// host:port endpoint string, e.g. "127.0.0.1:9003".
struct Endpoint {
  std::string host;
  std::uint16_t port = 0;

  static Endpoint Parse(const std::string& s);
  std::string str() const;
};

// Blocking framed-message connection over one TCP socket. Send and receive
// are independently serialized, so one reader thread plus concurrent senders
// are fine.
class Connection {
 public:
  explicit Connection(int fd);
  ~Connection();

  Connection(const Connection&) = delete;
  Connection& operator=(const Connection&) = delete;

  static std::unique_ptr<Connection> Dial(const Endpoint& ep);

  void Send(const proto::Message& msg);

  // Blocks for the next complete message. Throws NetError on EOF/reset.
  proto::Message Recv();

  void Close();

 private:
  std::atomic<int> fd_{-1};
  std::mutex send_mu_;
  std::mutex recv_mu_;
  proto::FrameSplitter splitter_;
};

// Thread-per-connection message server. The handler receives each decoded
// request and returns the reply to send back on the same connection.
class Server {
 public:
  using Handler = std::function<proto::Message(const proto::Message&)>;

  // port 0 picks a free port; see port().
  Server(const std::string& host, std::uint16_t port, Handler handler);
  ~Server();

  std::uint16_t port() const { return port_; }
  Endpoint endpoint() const { return {host_, port_}; }

  void Stop();

 private:
  void AcceptLoop();
  void ServeConn(std::shared_ptr<Connection> conn);

  std::string host_;
  std::uint16_t port_ = 0;
  int listen_fd_ = -1;
  Handler handler_;
  std::atomic<bool> stopping_{false};
  std::thread accept_thread_;
  std::mutex workers_mu_;
  std::vector<std::thread> workers_;
  std::vector<std::weak_ptr<Connection>> conns_;
};

// Simple blocking request/reply client: one in-flight request at a time per
// Call (internally serialized), correlation ids checked. Reconnects on
// demand after a broken connection.
class RpcClient {
 public:
  explicit RpcClient(Endpoint ep) : ep_(std::move(ep)) {}

  // Sends the payload, waits for the reply. Throws NetError on transport
  // failure after `retries` reconnect attempts with exponential backoff.
  proto::Message Call(proto::Payload payload, int retries = 5);

  const Endpoint& endpoint() const { return ep_; }

 private:
  Endpoint ep_;
  std::mutex mu_;
  std::unique_ptr<Connection> conn_;
  std::uint64_t next_corr_ = 1;
};

// Throws a runtime_error carrying the server-side message if `reply` is an
// Error; otherwise returns the expected body type.
template <typename Body>
const Body& Expect(const proto::Message& reply) {
  if (const auto* err = std::get_if<proto::ErrorBody>(&reply.payload)) {
    throw std::runtime_error("rpc error " + std::to_string(err->code) + ": " + err->message);
  }
  const Body* body = std::get_if<Body>(&reply.payload);
  if (!body) throw std::runtime_error("unexpected rpc reply kind");
  return *body;
}

}  // namespace tleague::net
