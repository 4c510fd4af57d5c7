#include "tleague/net/tcp.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cstring>

namespace tleague::net {

namespace {

void SetNoDelay(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

sockaddr_in MakeAddr(const Endpoint& ep) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(ep.port);
  if (::inet_pton(AF_INET, ep.host.c_str(), &addr.sin_addr) != 1)
    throw NetError("bad address: " + ep.host);
  return addr;
}

}  // namespace

Endpoint Endpoint::Parse(const std::string& s) {
  auto colon = s.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == s.size())
    throw NetError("bad endpoint (want host:port): " + s);
  Endpoint ep;
  ep.host = s.substr(0, colon);
  unsigned long port = 0;
  try {
    port = std::stoul(s.substr(colon + 1));
  } catch (const std::exception&) {
    throw NetError("bad endpoint port: " + s);
  }
  if (port == 0 || port > 65535) throw NetError("bad endpoint port: " + s);
  ep.port = static_cast<std::uint16_t>(port);
  return ep;
}

std::string Endpoint::str() const { return host + ":" + std::to_string(port); }

Connection::Connection(int fd) : fd_(fd) { SetNoDelay(fd); }

Connection::~Connection() { Close(); }

std::unique_ptr<Connection> Connection::Dial(const Endpoint& ep) {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw NetError("socket: " + std::string(std::strerror(errno)));
  sockaddr_in addr = MakeAddr(ep);
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    int err = errno;
    ::close(fd);
    throw NetError("connect " + ep.str() + ": " + std::strerror(err));
  }
  return std::make_unique<Connection>(fd);
}

void Connection::Send(const proto::Message& msg) {
  std::vector<std::uint8_t> frame = proto::Encode(msg);
  std::lock_guard lock(send_mu_);
  const int fd = fd_.load();
  std::size_t off = 0;
  while (off < frame.size()) {
    ssize_t n = ::send(fd, frame.data() + off, frame.size() - off, MSG_NOSIGNAL);
    if (n <= 0) throw NetError("send: " + std::string(std::strerror(errno)));
    off += static_cast<std::size_t>(n);
  }
}

proto::Message Connection::Recv() {
  std::lock_guard lock(recv_mu_);
  const int fd = fd_.load();
  std::vector<std::uint8_t> frame;
  while (!splitter_.Next(frame)) {
    std::uint8_t buf[16384];
    ssize_t n = ::recv(fd, buf, sizeof(buf), 0);
    if (n == 0) throw NetError("connection closed by peer");
    if (n < 0) throw NetError("recv: " + std::string(std::strerror(errno)));
    splitter_.Feed({buf, static_cast<std::size_t>(n)});
  }
  return proto::Decode(frame);
}

void Connection::Close() {
  // Idempotent and safe to race with a blocked Recv (it fails with EBADF).
  const int fd = fd_.exchange(-1);
  if (fd >= 0) {
    ::shutdown(fd, SHUT_RDWR);
    ::close(fd);
  }
}

Server::Server(const std::string& host, std::uint16_t port, Handler handler)
    : host_(host), handler_(std::move(handler)) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw NetError("socket: " + std::string(std::strerror(errno)));
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr = MakeAddr({host, port});
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    int err = errno;
    ::close(listen_fd_);
    throw NetError("bind " + host + ":" + std::to_string(port) + ": " + std::strerror(err));
  }
  socklen_t len = sizeof(addr);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  if (::listen(listen_fd_, 128) != 0) {
    int err = errno;
    ::close(listen_fd_);
    throw NetError("listen: " + std::string(std::strerror(err)));
  }
  accept_thread_ = std::thread([this] { AcceptLoop(); });
}

Server::~Server() { Stop(); }

void Server::Stop() {
  if (stopping_.exchange(true)) return;
  if (listen_fd_ >= 0) {
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    listen_fd_ = -1;
  }
  if (accept_thread_.joinable()) accept_thread_.join();
  std::vector<std::thread> workers;
  {
    std::lock_guard lock(workers_mu_);
    workers.swap(workers_);
    // unblock workers parked in recv() on still-open client connections
    for (auto& weak : conns_)
      if (auto conn = weak.lock()) conn->Close();
    conns_.clear();
  }
  for (auto& t : workers)
    if (t.joinable()) t.join();
}

void Server::AcceptLoop() {
  while (!stopping_.load()) {
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (stopping_.load()) return;
      continue;
    }
    auto conn = std::make_shared<Connection>(fd);
    std::lock_guard lock(workers_mu_);
    conns_.push_back(conn);
    workers_.emplace_back(&Server::ServeConn, this, std::move(conn));
  }
}

void Server::ServeConn(std::shared_ptr<Connection> conn) {
  while (!stopping_.load()) {
    proto::Message req;
    try {
      req = conn->Recv();
    } catch (const NetError&) {
      return;  // peer went away
    } catch (const proto::DecodeError& e) {
      try {
        conn->Send(proto::MakeError(0, proto::kErrProtocol, e.what()));
      } catch (const NetError&) {
      }
      return;
    }
    proto::Message reply;
    try {
      reply = handler_(req);
    } catch (const std::exception& e) {
      reply = proto::MakeError(req.correlation_id, proto::kErrUnknown, e.what());
    }
    reply.correlation_id = req.correlation_id;
    try {
      conn->Send(reply);
    } catch (const NetError&) {
      return;
    }
  }
}

proto::Message RpcClient::Call(proto::Payload payload, int retries) {
  std::lock_guard lock(mu_);
  int backoff_ms = 20;
  for (int attempt = 0;; ++attempt) {
    try {
      if (!conn_) conn_ = Connection::Dial(ep_);
      std::uint64_t corr = next_corr_++;
      conn_->Send(proto::MakeMessage(corr, payload));
      proto::Message reply = conn_->Recv();
      if (reply.correlation_id != corr)
        throw NetError("correlation id mismatch in rpc reply");
      return reply;
    } catch (const NetError&) {
      conn_.reset();
      if (attempt >= retries) throw;
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
      backoff_ms = std::min(backoff_ms * 2, 2000);
    }
  }
}

}  // namespace tleague::net
