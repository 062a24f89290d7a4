// Copyright 2026 The pkiscope Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "pkiscope/caa.hpp"
#include "pkiscope/common.hpp"
#include "pkiscope/dns_wire.hpp"
#include "pkiscope/net.hpp"

namespace pkiscope::dns {

enum class ResolutionStatus { resolved, nxdomain, timeout, servfail };
enum class ReachabilityClass { usable, unresolved, transient_failure };

const char* resolution_status_name(ResolutionStatus s);
const char* reachability_class_name(ReachabilityClass c);

/// Inception/expiration window of an RRSIG covering one record type.
struct RrsigWindow {
    UtcMillis inception = 0;
    UtcMillis expiration = 0;
};

/// All records collected for one target in a single burst. collected_at is
/// set once for the whole snapshot; every member record shares it.
struct DnsSnapshot {
    std::string target;
    std::string resolver;  // "address:port"
    UtcMillis collected_at = 0;
    ResolutionStatus resolution_status = ResolutionStatus::timeout;
    bool partial = false;
    std::map<std::string, std::vector<WireRecord>> records;  // keyed by type name
    std::map<std::string, RrsigWindow> rrsig_windows;

    std::vector<std::string> addresses() const;  // A then AAAA presentation
    std::vector<CaaRecord> caa_records() const;
    std::vector<TlsaData> tlsa_records() const;
};

struct ResolverConfig {
    std::string address = "8.8.8.8";
    std::uint16_t port = 53;
    net::Millis timeout{3000};
    bool dnssec_ok = false;
    std::uint16_t tlsa_port = 443;  // TLSA owner is _<port>._tcp.<target>
};

/// Queries every requested type (plus A, which governs the snapshot status)
/// in one burst. A timeout on any query yields status timeout with the
/// records that did arrive preserved and the snapshot marked partial.
/// "nxdomain" covers both NXDOMAIN and a NOERROR answer without any address
/// record: either way the name does not resolve to an address.
DnsSnapshot collect_snapshot(const std::string& target, const std::set<RecordType>& types,
                             const ResolverConfig& resolver);

/// Total classification for the orchestrator's filtering step.
ReachabilityClass classify_resolution(const DnsSnapshot& snapshot);

nlohmann::json snapshot_to_json(const DnsSnapshot& snapshot);
DnsSnapshot snapshot_from_json(const nlohmann::json& j);

}  // namespace pkiscope::dns
