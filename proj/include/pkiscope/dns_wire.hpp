// Copyright 2026 The pkiscope Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pkiscope::dns {

// Record types the collector understands. Values are IANA type codes.
enum class RecordType : std::uint16_t {
    A = 1,
    NS = 2,
    SOA = 6,
    AAAA = 28,
    OPT = 41,
    RRSIG = 46,
    TLSA = 52,
    CAA = 257,
};

const char* record_type_name(std::uint16_t type);
std::optional<RecordType> record_type_from_name(const std::string& name);

enum class Rcode : std::uint8_t {
    noerror = 0,
    formerr = 1,
    servfail = 2,
    nxdomain = 3,
    notimp = 4,
    refused = 5,
};

struct Question {
    std::string qname;  // lowercase, no trailing dot
    std::uint16_t qtype = 0;
};

/// One resource record. `rdata` is wire-format with any embedded names
/// re-encoded uncompressed, so it is self-contained.
struct WireRecord {
    std::string name;
    std::uint16_t type = 0;
    std::uint32_t ttl = 0;
    std::vector<std::uint8_t> rdata;
};

struct DnsMessage {
    std::uint16_t id = 0;
    bool qr = false;
    bool aa = false;
    bool tc = false;
    bool rd = true;
    bool ra = false;
    Rcode rcode = Rcode::noerror;
    bool edns = false;
    bool dnssec_ok = false;
    std::vector<Question> questions;
    std::vector<WireRecord> answers;
    std::vector<WireRecord> authority;
    std::vector<WireRecord> additional;  // OPT excluded
};

std::vector<std::uint8_t> encode_query(std::uint16_t id, const std::string& qname,
                                       std::uint16_t qtype, bool dnssec_ok);

/// Encodes a full message (responder side). Names are written uncompressed.
std::vector<std::uint8_t> encode_message(const DnsMessage& msg);

/// Decodes a message, following compression pointers. Throws ParseError with
/// the byte offset on malformed input.
DnsMessage decode_message(std::span<const std::uint8_t> wire);

// Typed rdata views over self-contained rdata.
struct SoaData {
    std::string mname;
    std::string rname;
    std::uint32_t serial = 0, refresh = 0, retry = 0, expire = 0, minimum = 0;
};
struct TlsaData {
    std::uint8_t usage = 0;
    std::uint8_t selector = 0;
    std::uint8_t matching_type = 0;
    std::vector<std::uint8_t> association;
};
struct RrsigData {
    std::uint16_t type_covered = 0;
    std::int64_t inception_ms = 0;   // UTC milliseconds
    std::int64_t expiration_ms = 0;  // UTC milliseconds
    std::string signer;
};

std::string parse_a_rdata(std::span<const std::uint8_t> rdata);
std::string parse_aaaa_rdata(std::span<const std::uint8_t> rdata);
std::string parse_name_rdata(std::span<const std::uint8_t> rdata);  // NS
SoaData parse_soa_rdata(std::span<const std::uint8_t> rdata);
TlsaData parse_tlsa_rdata(std::span<const std::uint8_t> rdata);
RrsigData parse_rrsig_rdata(std::span<const std::uint8_t> rdata);

std::vector<std::uint8_t> encode_name(const std::string& name);

/// Canonical one-line presentation, e.g. "a.test 300 IN A 127.0.0.1". Used as
/// the byte-level oracle against fixture zone content.
std::string present_record(const WireRecord& rec);

}  // namespace pkiscope::dns
