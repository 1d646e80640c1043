#pragma once

#include <arpa/inet.h>
#include <netdb.h>
#include <sys/socket.h>
#include <sys/time.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rplatoon/drivers.hpp"
#include "rplatoon/log.hpp"
#include "rplatoon/scrc_codec.hpp"

// UDP adapter for driving an external SCRC-speaking server: handshake with
// "<id>(init ...)", wait for ***identified***, then sensor-in/action-out
// cycles. ***restart*** resets the driver to its initial signal function,
// ***shutdown*** ends the run.

namespace rplatoon {

struct ScrcClientConfig {
  std::string host = "127.0.0.1";
  int port = 3001;
  std::string client_id = "SCR";
  double dt = 0.02;               // controller step per received sample
  double timeout_seconds = 1.0;   // receive timeout; each one resends the handshake
  int max_timeouts = 10;          // consecutive timeouts before giving up
  long long max_cycles = -1;      // stop after this many control cycles (<0: unlimited)
};

namespace detail {

class UdpClientSocket {
 public:
  UdpClientSocket(const std::string& host, int port, double timeout_seconds) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_DGRAM;
    addrinfo* result = nullptr;
    int rc = ::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &result);
    if (rc != 0)
      throw std::runtime_error(std::string("scrc-client: cannot resolve host: ") +
                               ::gai_strerror(rc));
    fd_ = ::socket(result->ai_family, result->ai_socktype, result->ai_protocol);
    if (fd_ < 0) {
      ::freeaddrinfo(result);
      throw std::runtime_error(std::string("scrc-client: socket: ") + std::strerror(errno));
    }
    rc = ::connect(fd_, result->ai_addr, result->ai_addrlen);
    ::freeaddrinfo(result);
    if (rc != 0) {
      ::close(fd_);
      throw std::runtime_error(std::string("scrc-client: connect: ") + std::strerror(errno));
    }
    timeval tv{};
    tv.tv_sec = static_cast<time_t>(timeout_seconds);
    tv.tv_usec = static_cast<suseconds_t>((timeout_seconds - static_cast<double>(tv.tv_sec)) * 1e6);
    ::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
  }

  UdpClientSocket(const UdpClientSocket&) = delete;
  UdpClientSocket& operator=(const UdpClientSocket&) = delete;

  ~UdpClientSocket() {
    if (fd_ >= 0) ::close(fd_);
  }

  void send(std::string_view datagram) const {
    if (::send(fd_, datagram.data(), datagram.size(), 0) < 0)
      throw std::runtime_error(std::string("scrc-client: send: ") + std::strerror(errno));
  }

  /// Bytes received, or -1 on timeout.
  long receive(char* buf, std::size_t cap) const {
    long n = ::recv(fd_, buf, cap, 0);
    if (n < 0) {
      if (errno == EAGAIN || errno == EWOULDBLOCK) return -1;
      throw std::runtime_error(std::string("scrc-client: recv: ") + std::strerror(errno));
    }
    return n;
  }

 private:
  int fd_ = -1;
};

}  // namespace detail

/// Runs the sensor/action loop against a server; returns the number of
/// completed control cycles. Throws on socket failure or when the server
/// stays silent past the timeout budget.
inline long long run_scrc_client(Driver driver, const ScrcClientConfig& cfg) {
  std::vector<double> beam_angles;
  beam_angles.reserve(kRangeBeamCount);
  for (int i = 0; i < kRangeBeamCount; ++i)
    beam_angles.push_back(-90.0 + kRangeBeamSpacingDeg * i);
  const std::string handshake = init_message(cfg.client_id, beam_angles);
  const Driver initial = driver;
  const frp::TimeDelta dt(cfg.dt);

  detail::UdpClientSocket socket(cfg.host, cfg.port, cfg.timeout_seconds);
  socket.send(handshake);
  log_info("scrc-client: handshake sent to " + cfg.host + ":" + std::to_string(cfg.port));

  long long cycles = 0;
  int consecutive_timeouts = 0;
  char buf[8192];
  while (true) {
    long n = socket.receive(buf, sizeof(buf));
    if (n < 0) {
      if (++consecutive_timeouts >= cfg.max_timeouts)
        throw std::runtime_error("scrc-client: server silent after " +
                                 std::to_string(consecutive_timeouts) + " timeouts");
      socket.send(handshake);
      continue;
    }
    consecutive_timeouts = 0;
    std::string_view datagram(buf, static_cast<std::size_t>(n));

    switch (parse_control(datagram)) {
      case ControlMessage::Identified:
        log_info("scrc-client: identified");
        continue;
      case ControlMessage::Shutdown:
        log_info("scrc-client: shutdown received");
        return cycles;
      case ControlMessage::Restart:
        log_info("scrc-client: restart received, driver reset");
        driver = initial;
        continue;
      case ControlMessage::NotControl:
        break;
    }

    auto sensors = parse_sensors(datagram);
    if (!sensors) {
      log_warn("scrc-client: malformed sensor datagram at byte " +
               std::to_string(sensors.error->offset) + ": " + sensors.error->detail);
      continue;
    }
    auto [command, next] = driver.step(dt, sensors.value);
    driver = std::move(next);
    socket.send(serialize_actions(clamped(command)));
    ++cycles;
    if (cfg.max_cycles >= 0 && cycles >= cfg.max_cycles) return cycles;
  }
}

}  // namespace rplatoon
