// Copyright 2026 The pkiscope Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pkiscope {

/// UTC wall-clock time in milliseconds since the Unix epoch.
using UtcMillis = std::int64_t;

inline UtcMillis now_utc_millis() {
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

/// Thrown by parsers for structurally invalid input. `position` is a line
/// number for text formats and a byte offset for binary ones.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string message, std::size_t position)
        : std::runtime_error(std::move(message)), position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

std::string to_hex(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> from_hex(const std::string& hex);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(const std::string& text);

/// SHA-256 digest, the fingerprint function used throughout.
std::vector<std::uint8_t> sha256(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> sha512(std::span<const std::uint8_t> bytes);
std::string sha256_hex(std::span<const std::uint8_t> bytes);

std::string to_lower(std::string s);

/// RFC 3339 UTC timestamp with millisecond precision, e.g. "2026-08-09T12:00:00.000Z".
std::string format_utc_millis(UtcMillis t);

/// Splits on a delimiter; keeps empty fields.
std::vector<std::string> split(const std::string& s, char delim);

}  // namespace pkiscope
