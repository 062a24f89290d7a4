// Copyright 2026 The pkiscope Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <set>
#include <string>

namespace pkiscope::ingest {

/// Parsed public-suffix list. Lookup follows the publicsuffix.org algorithm:
/// exception rules beat wildcard/plain rules, otherwise the rule with the most
/// labels wins, and a name with no matching rule falls back to its last label.
/// A wildcard rule ("*.ck") never matches the bare label it wildcards.
class PublicSuffixTable {
public:
    PublicSuffixTable() = default;

    /// Parses the standard text format: one rule per line, "//" comments,
    /// blank lines ignored. Throws ParseError naming the offending line.
    static PublicSuffixTable parse(const std::string& document, std::string snapshot_date = "");

    /// Effective public suffix of `name` (lowercase, no trailing dot).
    std::string public_suffix(const std::string& name) const;

    /// Public suffix plus one label. When the name equals its suffix (or is
    /// shorter), returns the name unchanged and reports is_public_suffix.
    struct EsldResult {
        std::string esld;
        bool is_public_suffix = false;
    };
    EsldResult esld(const std::string& name) const;

    std::size_t rule_count() const { return plain_.size() + wildcard_.size() + exception_.size(); }
    const std::string& snapshot_date() const { return snapshot_date_; }

private:
    std::set<std::string> plain_;
    std::set<std::string> wildcard_;   // stored without the "*." prefix
    std::set<std::string> exception_;  // stored without the "!" prefix
    std::string snapshot_date_;
};

/// True iff `name` is a syntactically valid DNS name: 1-63 octet labels of
/// letters, digits, hyphen, or underscore, total length <= 253, no empty
/// labels. A single leading "*" label is accepted (wildcard SANs).
bool is_valid_dns_name(const std::string& name);

}  // namespace pkiscope::ingest
