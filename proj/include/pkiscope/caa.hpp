// Copyright 2026 The pkiscope Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace pkiscope::dns {

enum class CaaParseStatus { ok, unparsable, reserved_bit };

const char* caa_parse_status_name(CaaParseStatus s);

/// One CAA record with the malformedness taxonomy applied. Parsing never
/// throws: broken records are classified, and the original bytes are always
/// recoverable from `raw`.
struct CaaRecord {
    std::uint8_t flags = 0;
    std::string tag;    // normalized lowercase
    std::string value;  // normalized (quotes stripped for presentation input)
    CaaParseStatus parse_status = CaaParseStatus::unparsable;
    std::vector<std::uint8_t> raw;

    bool is_issue() const { return tag == "issue" || tag == "issuewild"; }

    /// For ok issue/issuewild records: the issuer domain portion of the value
    /// (empty for an explicit deny such as ";").
    std::string issuer_domain() const;
};

/// Parses CAA rdata in wire format (flags, tag-length, tag, value).
CaaRecord parse_caa(std::span<const std::uint8_t> rdata);

/// Parses CAA in presentation syntax, e.g. `0 issue "letsencrypt.org"`.
CaaRecord parse_caa_presentation(const std::string& text);

}  // namespace pkiscope::dns
