// Copyright 2026 The pkiscope Authors
// SPDX-License-Identifier: Apache-2.0
#include "pkiscope/targets.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>

#include <json.hpp>

namespace pkiscope::ingest {

using nlohmann::json;

const char* target_source_name(TargetSource s) {
    switch (s) {
        case TargetSource::hit_list: return "hit-list";
        case TargetSource::ct_san: return "ct-san";
        case TargetSource::manual: return "manual";
    }
    return "manual";
}

std::optional<TargetSource> target_source_from_name(const std::string& name) {
    if (name == "hit-list") return TargetSource::hit_list;
    if (name == "ct-san") return TargetSource::ct_san;
    if (name == "manual") return TargetSource::manual;
    return std::nullopt;
}

static const char* flag_name(TargetFlag f) {
    switch (f) {
        case TargetFlag::is_public_suffix: return "is-public-suffix";
        case TargetFlag::wildcard_derived: return "wildcard-derived";
        case TargetFlag::duplicate_esld: return "duplicate-esld";
    }
    return "";
}

static std::optional<TargetFlag> flag_from_name(const std::string& name) {
    if (name == "is-public-suffix") return TargetFlag::is_public_suffix;
    if (name == "wildcard-derived") return TargetFlag::wildcard_derived;
    if (name == "duplicate-esld") return TargetFlag::duplicate_esld;
    return std::nullopt;
}

HitlistResult parse_hitlist(const std::string& document, HitlistFormat format,
                            std::string provenance) {
    HitlistResult result;
    result.list.provenance = std::move(provenance);
    result.list.retrieved_at = now_utc_millis();
    std::istringstream in(document);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        TargetEntry entry;
        entry.source = TargetSource::hit_list;
        if (format == HitlistFormat::rank_comma_name) {
            std::size_t comma = line.find(',');
            if (comma == std::string::npos) {
                result.skipped_lines++;
                continue;
            }
            std::string rank_text = line.substr(0, comma);
            std::string name = line.substr(comma + 1);
            std::uint64_t rank = 0;
            auto [ptr, ec] = std::from_chars(rank_text.data(), rank_text.data() + rank_text.size(), rank);
            if (ec != std::errc() || ptr != rank_text.data() + rank_text.size() || rank < 1) {
                result.skipped_lines++;
                continue;
            }
            entry.rank = rank;
            entry.name = to_lower(name);
        } else {
            entry.name = to_lower(line);
        }
        if (!is_valid_dns_name(entry.name)) {
            result.skipped_lines++;
            continue;
        }
        result.list.entries.push_back(std::move(entry));
    }
    return result;
}

CtExtraction extract_ct_sans(const std::vector<x509::CertificateRecord>& certs) {
    CtExtraction out;
    out.list.provenance = "ct-corpus";
    out.list.retrieved_at = now_utc_millis();
    for (const auto& cert : certs) {
        std::size_t dns_total = 0;
        std::size_t wildcards = 0;
        for (const auto& san : cert.sans) {
            if (san.type == x509::SanType::ip) {
                out.ip_san_count++;
                continue;
            }
            if (san.type != x509::SanType::dns) continue;
            dns_total++;
            if (san.value.rfind("*.", 0) == 0) {
                wildcards++;
                out.wildcard_san_count++;
                continue;
            }
            if (!is_valid_dns_name(san.value)) continue;
            TargetEntry entry;
            entry.name = san.value;
            entry.source = TargetSource::ct_san;
            out.list.entries.push_back(std::move(entry));
        }
        if (dns_total > 0 && wildcards == dns_total) out.wildcard_only_cert_count++;
    }
    return out;
}

TargetEntry esld_trim(const TargetEntry& entry, const PublicSuffixTable& table) {
    TargetEntry out = entry;
    auto r = table.esld(entry.name);
    out.name = r.esld;
    if (r.is_public_suffix) out.flags.insert(TargetFlag::is_public_suffix);
    return out;
}

TargetList dedupe_and_flag(const TargetList& list, const PublicSuffixTable& table) {
    TargetList out;
    out.provenance = list.provenance;
    out.retrieved_at = list.retrieved_at;

    // Exact-name dedup, lowest rank wins; unranked loses to ranked.
    std::map<std::string, std::size_t> by_name;
    for (const auto& entry : list.entries) {
        auto it = by_name.find(entry.name);
        if (it == by_name.end()) {
            out.entries.push_back(entry);
            by_name[entry.name] = out.entries.size() - 1;
            continue;
        }
        TargetEntry& kept = out.entries[it->second];
        bool replace = entry.rank.has_value() &&
                       (!kept.rank.has_value() || *entry.rank < *kept.rank);
        if (replace) {
            auto flags = kept.flags;  // keep accumulated flags
            kept = entry;
            kept.flags.insert(flags.begin(), flags.end());
        }
    }

    std::stable_sort(out.entries.begin(), out.entries.end(),
                     [](const TargetEntry& a, const TargetEntry& b) {
                         if (a.rank.has_value() != b.rank.has_value()) return a.rank.has_value();
                         if (a.rank && b.rank && *a.rank != *b.rank) return *a.rank < *b.rank;
                         return false;
                     });

    std::set<std::string> seen_eslds;
    for (auto& entry : out.entries) {
        std::string esld = table.esld(entry.name).esld;
        if (!seen_eslds.insert(esld).second) entry.flags.insert(TargetFlag::duplicate_esld);
    }
    return out;
}

std::string serialize_targets(const TargetList& list) {
    std::string out;
    for (const auto& entry : list.entries) {
        json j;
        j["name"] = entry.name;
        if (entry.rank) j["rank"] = *entry.rank;
        j["source"] = target_source_name(entry.source);
        json flags = json::array();
        for (TargetFlag f : entry.flags) flags.push_back(flag_name(f));
        j["flags"] = flags;
        out += j.dump();
        out += '\n';
    }
    return out;
}

TargetList parse_targets_jsonl(const std::string& text) {
    TargetList list;
    list.retrieved_at = now_utc_millis();
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.contains("name")) {
            throw ParseError("malformed target line", lineno);
        }
        TargetEntry entry;
        entry.name = to_lower(j["name"].get<std::string>());
        if (j.contains("rank") && !j["rank"].is_null()) entry.rank = j["rank"].get<std::uint64_t>();
        if (j.contains("source")) {
            auto src = target_source_from_name(j["source"].get<std::string>());
            if (src) entry.source = *src;
        }
        if (j.contains("flags")) {
            for (const auto& f : j["flags"]) {
                auto flag = flag_from_name(f.get<std::string>());
                if (flag) entry.flags.insert(*flag);
            }
        }
        list.entries.push_back(std::move(entry));
    }
    return list;
}

}  // namespace pkiscope::ingest
