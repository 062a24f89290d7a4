// Copyright 2026 The pkiscope Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pkiscope::net {

using Millis = std::chrono::milliseconds;

/// RAII file descriptor.
class Fd {
public:
    Fd() = default;
    explicit Fd(int fd) : fd_(fd) {}
    ~Fd() { reset(); }
    Fd(Fd&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }
    Fd& operator=(Fd&& other) noexcept {
        if (this != &other) {
            reset();
            fd_ = other.fd_;
            other.fd_ = -1;
        }
        return *this;
    }
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;

    int get() const { return fd_; }
    bool valid() const { return fd_ >= 0; }
    int release() {
        int fd = fd_;
        fd_ = -1;
        return fd;
    }
    void reset();

private:
    int fd_ = -1;
};

enum class ConnectResult { ok, refused, timeout, error };

/// TCP connect with timeout to a literal IPv4/IPv6 address.
ConnectResult tcp_connect(const std::string& address, std::uint16_t port, Millis timeout, Fd* out);

/// Blocking send of the whole buffer.
bool send_all(int fd, std::span<const std::uint8_t> data);

/// Receives up to max_len bytes, waiting at most timeout. Returns bytes read,
/// 0 on orderly close, -1 on timeout/error.
int recv_some(int fd, std::uint8_t* buf, std::size_t max_len, Millis timeout);

/// One UDP request/response exchange. Returns nullopt on timeout.
std::optional<std::vector<std::uint8_t>> udp_exchange(const std::string& address,
                                                      std::uint16_t port,
                                                      std::span<const std::uint8_t> request,
                                                      Millis timeout, std::size_t max_reply);

/// Resolves a host name to an IPv4 address string via the system resolver.
std::optional<std::string> system_resolve_ipv4(const std::string& host);

}  // namespace pkiscope::net
