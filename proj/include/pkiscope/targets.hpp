// Copyright 2026 The pkiscope Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pkiscope/certificate.hpp"
#include "pkiscope/common.hpp"
#include "pkiscope/public_suffix.hpp"

namespace pkiscope::ingest {

enum class TargetSource { hit_list, ct_san, manual };

const char* target_source_name(TargetSource s);
std::optional<TargetSource> target_source_from_name(const std::string& name);

enum class TargetFlag { is_public_suffix, wildcard_derived, duplicate_esld };

struct TargetEntry {
    std::string name;  // lowercase FQDN, no trailing dot
    std::optional<std::uint64_t> rank;
    TargetSource source = TargetSource::manual;
    std::set<TargetFlag> flags;

    bool has_flag(TargetFlag f) const { return flags.contains(f); }
};

struct TargetList {
    std::vector<TargetEntry> entries;
    std::string provenance;
    UtcMillis retrieved_at = 0;
};

enum class HitlistFormat { rank_comma_name, name_only };

struct HitlistResult {
    TargetList list;
    std::size_t skipped_lines = 0;
};

/// One entry per non-empty line, names lowercased, ranks parsed when the
/// format carries them. Malformed lines are skipped and counted, not fatal.
HitlistResult parse_hitlist(const std::string& document, HitlistFormat format,
                            std::string provenance = "");

struct CtExtraction {
    TargetList list;
    std::size_t wildcard_san_count = 0;
    std::size_t wildcard_only_cert_count = 0;
    std::size_t ip_san_count = 0;  // recorded, never emitted as targets
};

/// Every non-wildcard DNS SAN becomes a target of source ct-san. Wildcard
/// SANs are counted; certificates carrying only wildcard SANs are counted
/// separately.
CtExtraction extract_ct_sans(const std::vector<x509::CertificateRecord>& certs);

/// Trims a name to its eSLD per the table, flagging names that are themselves
/// public suffixes (returned unchanged).
TargetEntry esld_trim(const TargetEntry& entry, const PublicSuffixTable& table);

/// Removes exact-name duplicates (lowest rank wins, first-seen breaks ties)
/// and flags — without removing — entries sharing an eSLD with an earlier one.
TargetList dedupe_and_flag(const TargetList& list, const PublicSuffixTable& table);

/// JSON Lines, one {name, rank, source, flags} object per entry.
std::string serialize_targets(const TargetList& list);
TargetList parse_targets_jsonl(const std::string& text);

}  // namespace pkiscope::ingest
