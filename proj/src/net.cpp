// Copyright 2026 The pkiscope Authors
// SPDX-License-Identifier: Apache-2.0
#include "pkiscope/net.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace pkiscope::net {

void Fd::reset() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

namespace {

bool parse_sockaddr(const std::string& address, std::uint16_t port, sockaddr_storage* ss,
                    socklen_t* len) {
    std::memset(ss, 0, sizeof *ss);
    auto* v4 = reinterpret_cast<sockaddr_in*>(ss);
    if (inet_pton(AF_INET, address.c_str(), &v4->sin_addr) == 1) {
        v4->sin_family = AF_INET;
        v4->sin_port = htons(port);
        *len = sizeof(sockaddr_in);
        return true;
    }
    auto* v6 = reinterpret_cast<sockaddr_in6*>(ss);
    if (inet_pton(AF_INET6, address.c_str(), &v6->sin6_addr) == 1) {
        v6->sin6_family = AF_INET6;
        v6->sin6_port = htons(port);
        *len = sizeof(sockaddr_in6);
        return true;
    }
    return false;
}

bool wait_fd(int fd, short events, Millis timeout) {
    pollfd pfd{fd, events, 0};
    int r = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
    return r > 0 && (pfd.revents & events);
}

}  // namespace

ConnectResult tcp_connect(const std::string& address, std::uint16_t port, Millis timeout, Fd* out) {
    sockaddr_storage ss;
    socklen_t slen = 0;
    if (!parse_sockaddr(address, port, &ss, &slen)) return ConnectResult::error;

    Fd fd(::socket(ss.ss_family, SOCK_STREAM | SOCK_NONBLOCK, 0));
    if (!fd.valid()) return ConnectResult::error;

    int r = ::connect(fd.get(), reinterpret_cast<sockaddr*>(&ss), slen);
    if (r != 0 && errno != EINPROGRESS) {
        return errno == ECONNREFUSED ? ConnectResult::refused : ConnectResult::error;
    }
    if (r != 0) {
        if (!wait_fd(fd.get(), POLLOUT, timeout)) return ConnectResult::timeout;
        int err = 0;
        socklen_t elen = sizeof err;
        getsockopt(fd.get(), SOL_SOCKET, SO_ERROR, &err, &elen);
        if (err == ECONNREFUSED) return ConnectResult::refused;
        if (err != 0) return ConnectResult::error;
    }
    // Back to blocking; per-operation timeouts are handled with poll.
    int flags = fcntl(fd.get(), F_GETFL, 0);
    fcntl(fd.get(), F_SETFL, flags & ~O_NONBLOCK);
    int one = 1;
    setsockopt(fd.get(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    *out = std::move(fd);
    return ConnectResult::ok;
}

bool send_all(int fd, std::span<const std::uint8_t> data) {
    std::size_t sent = 0;
    while (sent < data.size()) {
        ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
        if (n <= 0) return false;
        sent += static_cast<std::size_t>(n);
    }
    return true;
}

int recv_some(int fd, std::uint8_t* buf, std::size_t max_len, Millis timeout) {
    if (!wait_fd(fd, POLLIN, timeout)) return -1;
    ssize_t n = ::recv(fd, buf, max_len, 0);
    return n < 0 ? -1 : static_cast<int>(n);
}

std::optional<std::vector<std::uint8_t>> udp_exchange(const std::string& address,
                                                      std::uint16_t port,
                                                      std::span<const std::uint8_t> request,
                                                      Millis timeout, std::size_t max_reply) {
    sockaddr_storage ss;
    socklen_t slen = 0;
    if (!parse_sockaddr(address, port, &ss, &slen)) return std::nullopt;
    Fd fd(::socket(ss.ss_family, SOCK_DGRAM, 0));
    if (!fd.valid()) return std::nullopt;
    if (::sendto(fd.get(), request.data(), request.size(), 0, reinterpret_cast<sockaddr*>(&ss),
                 slen) < 0) {
        return std::nullopt;
    }
    if (!wait_fd(fd.get(), POLLIN, timeout)) return std::nullopt;
    std::vector<std::uint8_t> reply(max_reply);
    ssize_t n = ::recv(fd.get(), reply.data(), reply.size(), 0);
    if (n <= 0) return std::nullopt;
    reply.resize(static_cast<std::size_t>(n));
    return reply;
}

std::optional<std::string> system_resolve_ipv4(const std::string& host) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (getaddrinfo(host.c_str(), nullptr, &hints, &res) != 0 || !res) return std::nullopt;
    char buf[INET_ADDRSTRLEN] = {0};
    auto* v4 = reinterpret_cast<sockaddr_in*>(res->ai_addr);
    inet_ntop(AF_INET, &v4->sin_addr, buf, sizeof buf);
    freeaddrinfo(res);
    return std::string(buf);
}

}  // namespace pkiscope::net
