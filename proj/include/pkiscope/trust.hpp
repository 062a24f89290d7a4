// Copyright 2026 The pkiscope Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pkiscope/certificate.hpp"

namespace pkiscope::x509 {

/// Trust anchors plus a pool of known intermediates, mirroring a relying
/// party that ships a root store and caches disclosed intermediates.
struct TrustStore {
    std::vector<CertificateRecord> anchors;
    std::vector<CertificateRecord> intermediate_pool;
    std::string store_label;
    std::string snapshot_date;

    /// Loads PEM bundles. Non-CA certificates in the anchor bundle are
    /// rejected.
    static TrustStore load(const std::string& roots_pem, const std::string& intermediates_pem,
                           std::string label, std::string snapshot_date);
};

enum class ChainVerdict {
    valid,
    expired,
    unknown_anchor,
    broken_signature,
    name_mismatch,  // produced by reclassify_with_hostname, never by build_chains
    incomplete,
};

const char* chain_verdict_name(ChainVerdict v);

struct ChainEvaluation {
    std::string leaf;                             // fingerprint
    std::vector<std::string> presented;           // fingerprints as served
    std::vector<std::vector<std::string>> paths_found;  // signature-verified leaf->anchor paths
    std::optional<std::vector<std::string>> chosen_path;
    int presented_length = 0;
    // Member count of the chosen path without its trust anchor: the shortest
    // chain a server needs to deliver, given the relying party holds the
    // anchor. length_diff = presented_length - shortest_length, so redundant
    // members (served roots, cross-signs) push it positive and missing
    // intermediates negative.
    std::optional<int> shortest_length;
    std::optional<int> length_diff;
    ChainVerdict verdict = ChainVerdict::incomplete;
    std::vector<std::string> verdict_reasons;
    UtcMillis evaluated_at = 0;
    bool hostname_checked = false;
    bool hostname_matched = false;
};

struct ChainBuildOptions {
    int max_depth = 8;
    /// When set, the leaf's SANs are matched against this host and the result
    /// recorded in hostname_checked/hostname_matched. Validity is unaffected.
    std::optional<std::string> expected_host;
};

/// Enumerates every simple signature-verified path from the leaf through
/// presented ∪ intermediate_pool ∪ anchors, selects the shortest (ties:
/// lexicographically smallest anchor fingerprint, then smallest path
/// sequence), and derives the verdict and chain-length diff.
ChainEvaluation build_chains(const CertificateRecord& leaf,
                             const std::vector<CertificateRecord>& presented,
                             const TrustStore& store, UtcMillis at,
                             const ChainBuildOptions& options = {});

/// Report-side view that folds the hostname flag into the verdict.
ChainVerdict reclassify_with_hostname(const ChainEvaluation& evaluation);

/// RFC 6125-style match of a host against a leaf's DNS SANs (single-label
/// wildcard in the leftmost position only).
bool hostname_matches(const CertificateRecord& leaf, const std::string& host);

nlohmann::json evaluation_to_json(const ChainEvaluation& evaluation);
ChainEvaluation evaluation_from_json(const nlohmann::json& j);

}  // namespace pkiscope::x509
