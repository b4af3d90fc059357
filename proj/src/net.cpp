#include "ecleak/net.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <sys/time.h>
#include <time.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "ecleak/bigint.hpp"
#include "ecleak/rng.hpp"

namespace ecleak {

namespace {

void put_u64be(std::vector<uint8_t>& out, uint64_t v) {
  for (int i = 7; i >= 0; --i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

uint64_t get_u64be(const uint8_t* p) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | p[i];
  return v;
}

struct Addr {
  sockaddr_in sa{};
};

Addr parse_target(const std::string& target) {
  auto colon = target.rfind(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("address must be host:port, got: " + target);
  std::string host = target.substr(0, colon);
  int port = std::stoi(target.substr(colon + 1));
  if (port < 0 || port > 65535) throw std::invalid_argument("bad port");
  Addr a;
  a.sa.sin_family = AF_INET;
  a.sa.sin_port = htons(static_cast<uint16_t>(port));
  if (host.empty()) host = "0.0.0.0";
  if (inet_pton(AF_INET, host.c_str(), &a.sa.sin_addr) != 1)
    throw std::invalid_argument("bad IPv4 address: " + host);
  return a;
}

void set_recv_timeout(int fd, int ms) {
  timeval tv{};
  tv.tv_sec = ms / 1000;
  tv.tv_usec = (ms % 1000) * 1000;
  setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
}

double monotonic_s() {
  timespec ts{};
  clock_gettime(CLOCK_MONOTONIC, &ts);
  return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

void sleep_s(double s) {
  if (s <= 0) return;
  timespec ts{};
  ts.tv_sec = static_cast<time_t>(s);
  ts.tv_nsec = static_cast<long>((s - static_cast<double>(ts.tv_sec)) * 1e9);
  while (nanosleep(&ts, &ts) == -1 && errno == EINTR) {
  }
}

}  // namespace

std::vector<uint8_t> encode_request(const SignRequest& rq) {
  std::vector<uint8_t> out(kWireMagic.begin(), kWireMagic.end());
  put_u64be(out, rq.request_id);
  out.insert(out.end(), rq.msg_hash.begin(), rq.msg_hash.end());
  return out;
}

std::vector<uint8_t> encode_response(const SignResponse& rs) {
  std::vector<uint8_t> out(kWireMagic.begin(), kWireMagic.end());
  put_u64be(out, rs.request_id);
  out.insert(out.end(), rs.r.begin(), rs.r.end());
  out.insert(out.end(), rs.s.begin(), rs.s.end());
  return out;
}

std::optional<SignRequest> decode_request(const uint8_t* data, size_t len) {
  if (len != kRequestSize) return std::nullopt;
  if (std::memcmp(data, kWireMagic.data(), 4) != 0) return std::nullopt;
  SignRequest rq;
  rq.request_id = get_u64be(data + 4);
  std::memcpy(rq.msg_hash.data(), data + 12, 32);
  return rq;
}

std::optional<SignResponse> decode_response(const uint8_t* data, size_t len) {
  if (len != kResponseSize) return std::nullopt;
  if (std::memcmp(data, kWireMagic.data(), 4) != 0) return std::nullopt;
  SignResponse rs;
  rs.request_id = get_u64be(data + 4);
  std::memcpy(rs.r.data(), data + 12, 32);
  std::memcpy(rs.s.data(), data + 44, 32);
  return rs;
}

SigningServer::SigningServer(const std::string& bind_addr, LeakyDevice device)
    : device_(std::move(device)) {
  Addr a = parse_target(bind_addr);
  fd_ = socket(AF_INET, SOCK_DGRAM, 0);
  if (fd_ < 0) throw std::runtime_error("socket() failed");
  int one = 1;
  setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  if (bind(fd_, reinterpret_cast<sockaddr*>(&a.sa), sizeof a.sa) != 0) {
    close(fd_);
    fd_ = -1;
    throw std::runtime_error("bind failed: " + bind_addr);
  }
  sockaddr_in got{};
  socklen_t glen = sizeof got;
  getsockname(fd_, reinterpret_cast<sockaddr*>(&got), &glen);
  port_ = ntohs(got.sin_port);
  set_recv_timeout(fd_, 100);  // periodic stop-flag checks
}

SigningServer::~SigningServer() {
  if (fd_ >= 0) close(fd_);
}

void SigningServer::stop() { running_.store(false); }

void SigningServer::serve() {
  running_.store(true);
  uint8_t buf[512];
  while (running_.load()) {
    sockaddr_in peer{};
    socklen_t plen = sizeof peer;
    ssize_t got = recvfrom(fd_, buf, sizeof buf, 0,
                           reinterpret_cast<sockaddr*>(&peer), &plen);
    if (got < 0) {
      if (errno == EAGAIN || errno == EWOULDBLOCK || errno == EINTR) continue;
      throw std::runtime_error("recvfrom failed");
    }
    auto rq = decode_request(buf, static_cast<size_t>(got));
    if (!rq) {
      malformed_.fetch_add(1);
      continue;
    }
    mpz_class msg = mpz_from_be(rq->msg_hash.data(), 32);
    TimedSample ts = device_.sign(msg);
    sleep_s(static_cast<double>(ts.cycles) / device_.profile().freq_hz);
    SignResponse rs;
    rs.request_id = rq->request_id;
    mpz_to_be(ts.sig.r, rs.r.data(), 32);
    mpz_to_be(ts.sig.s, rs.s.data(), 32);
    auto out = encode_response(rs);
    sendto(fd_, out.data(), out.size(), 0, reinterpret_cast<sockaddr*>(&peer),
           plen);
    served_.fetch_add(1);
  }
}

CollectOutcome collect_remote(const std::string& target,
                              const CollectOptions& opt) {
  Addr a = parse_target(target);
  int fd = socket(AF_INET, SOCK_DGRAM, 0);
  if (fd < 0) throw std::runtime_error("socket() failed");
  set_recv_timeout(fd, opt.timeout_ms);

  CollectOutcome out;
  Rng rng(opt.seed);
  uint64_t next_id = 1;
  int consecutive_timeouts = 0;
  uint8_t buf[512];

  try {
    while (out.samples.size() < opt.count) {
      SignRequest rq;
      rq.request_id = next_id++;
      rq.msg_hash = rng.msg32();
      auto wire = encode_request(rq);

      double t0 = monotonic_s();
      if (sendto(fd, wire.data(), wire.size(), 0,
                 reinterpret_cast<sockaddr*>(&a.sa), sizeof a.sa) < 0)
        throw std::runtime_error("sendto failed");
      ++out.requests_sent;

      std::optional<SignResponse> rs;
      double deadline = t0 + opt.timeout_ms * 1e-3;
      for (;;) {
        ssize_t got = recvfrom(fd, buf, sizeof buf, 0, nullptr, nullptr);
        if (got < 0) {
          if (errno == EINTR) continue;
          break;  // timeout
        }
        auto dec = decode_response(buf, static_cast<size_t>(got));
        // stale ids (responses to timed-out requests) are dropped: their
        // timing is unusable
        if (dec && dec->request_id == rq.request_id) {
          rs = dec;
          break;
        }
        if (monotonic_s() > deadline) break;
      }
      double rtt = monotonic_s() - t0;

      if (!rs) {
        ++out.retries;
        if (++consecutive_timeouts >= opt.max_consecutive_timeouts)
          throw std::runtime_error("collect: target unresponsive (" +
                                   std::to_string(consecutive_timeouts) +
                                   " consecutive timeouts)");
        continue;
      }
      consecutive_timeouts = 0;

      TimedSample s;
      s.sig.r = mpz_from_be(rs->r.data(), 32);
      s.sig.s = mpz_from_be(rs->s.data(), 32);
      s.sig.msg = mpz_from_be(rq.msg_hash.data(), 32);
      double cycles = rtt * opt.freq_hz;
      if (opt.net_sigma_cycles > 0) cycles += rng.gauss(opt.net_sigma_cycles);
      s.cycles = std::max<int64_t>(1, llround(cycles));
      s.id = out.samples.size();
      out.samples.push_back(std::move(s));
    }
  } catch (...) {
    close(fd);
    throw;
  }
  close(fd);
  return out;
}

}  // namespace ecleak
