// Copyright 2026 The pkiscope Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "pkiscope/certificate.hpp"
#include "pkiscope/common.hpp"

struct evp_pkey_st;  // OpenSSL EVP_PKEY

namespace pkiscope::fixture {

/// Declarative PKI graph. Edges are issuer->subject signing relations; an
/// edge into a root materializes a cross-signed variant of that root (same
/// subject and key, different issuer).
struct PkiNodeSpec {
    std::string name;
    std::string role;  // root | cross-signed-root | intermediate | leaf
    std::string key_type = "ed25519";
    int not_before_days = -30;
    int not_after_days = 365;
    bool swap_validity = false;  // deliberately malformed: notBefore after notAfter
    std::vector<std::string> sans;
    std::set<std::string> policy_oids;
    std::map<std::string, std::string> subject_extra;  // e.g. O, surname, givenName
};

struct PkiEdge {
    std::string issuer;
    std::string subject;
};

struct TlsaPublication {
    std::string leaf;        // owner: _<port>._tcp.<first SAN of leaf>
    std::string match_node;  // node whose certificate/key the association derives from
    std::uint8_t usage = 3;
    std::uint8_t selector = 1;
    std::uint8_t matching_type = 1;
    std::uint16_t port = 443;
};

struct PkiSpec {
    std::vector<PkiNodeSpec> nodes;
    std::vector<PkiEdge> edges;
    std::vector<TlsaPublication> tlsa_publications;

    static PkiSpec from_json(const nlohmann::json& j);

    const PkiNodeSpec* find(const std::string& name) const;
};

struct MaterializedCert {
    std::string subject_node;
    std::string issuer_node;  // equals subject_node for self-signed roots
    x509::CertificateRecord record;
};

/// Generated certificates plus the construction-graph path oracle. The oracle
/// walks the declared edges, never signatures, so it is independent of the
/// analyzer's path search.
class MaterializedPki {
public:
    std::vector<MaterializedCert> certs;
    std::map<std::string, std::shared_ptr<evp_pkey_st>> keys;
    UtcMillis generated_at = 0;

    const MaterializedCert* primary_cert(const std::string& node) const;
    const MaterializedCert* cert_for_edge(const std::string& issuer,
                                          const std::string& subject) const;
    std::shared_ptr<evp_pkey_st> key(const std::string& node) const;

    /// Self-signed root certificates (the default trust anchors).
    std::vector<x509::CertificateRecord> anchors() const;
    /// Every CA certificate that is not a self-signed root (intermediates and
    /// cross-signed root variants).
    std::vector<x509::CertificateRecord> intermediates() const;

    /// Chain as a server would present it: the leaf's primary certificate
    /// followed by primary issuer certificates, excluding the self-signed
    /// root unless include_root.
    std::vector<x509::CertificateRecord> served_chain(const std::string& leaf,
                                                      bool include_root = false) const;

    /// All simple certificate paths from the leaf's primary certificate to
    /// any anchor, using only certificates in `available` (fingerprints).
    std::vector<std::vector<std::string>> enumerate_paths(
        const std::string& leaf, const std::set<std::string>& anchor_fps,
        const std::set<std::string>& available) const;

    /// Oracle for the analyzer's chosen path: shortest, ties broken by
    /// lexicographically smallest anchor fingerprint, then smallest path
    /// fingerprint sequence.
    std::optional<std::vector<std::string>> expected_shortest(
        const std::string& leaf, const std::set<std::string>& anchor_fps,
        const std::set<std::string>& available) const;

    /// Independent digest computation for a TLSA publication.
    std::vector<std::uint8_t> tlsa_association(const TlsaPublication& pub) const;

    const x509::CertificateRecord* find_by_fingerprint(const std::string& fp) const;
};

/// Deterministic for a fixed (spec, seed, now): keys are Ed25519 derived from
/// the seed and Ed25519 signatures are deterministic. `now` of 0 means wall
/// clock.
/// Throws std::runtime_error for unsatisfiable specs (a leaf with no path to
/// any root).
MaterializedPki generate_pki(const PkiSpec& spec, std::uint64_t seed, UtcMillis now = 0);

/// Random well-formed spec for property tests: 1-3 roots, up to 4
/// intermediates with optional cross-signs, 1-4 leaves, every leaf reaching a
/// root by construction.
PkiSpec random_pki_spec(std::mt19937_64& rng);

}  // namespace pkiscope::fixture
