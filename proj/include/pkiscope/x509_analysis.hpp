// Copyright 2026 The pkiscope Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "pkiscope/caa.hpp"
#include "pkiscope/certificate.hpp"
#include "pkiscope/dns_wire.hpp"
#include "pkiscope/public_suffix.hpp"
#include "pkiscope/trust.hpp"

namespace pkiscope::x509 {

// ---- Validation-type classification -------------------------------------

enum class ValidationType { DV, OV, IV, EV, unknown, conflicting };

const char* validation_type_name(ValidationType t);

using ValidationOidTable = std::map<std::string, ValidationType>;

/// CA/B Forum reserved policy identifiers. Operators may extend this table,
/// since CAs define their own OIDs on top of the reserved set.
ValidationOidTable default_validation_oid_table();

/// Single class when exactly one class of policy OIDs is present,
/// `conflicting` when several, `unknown` when none is recognized.
ValidationType classify_validation_type(const CertificateRecord& cert,
                                        const ValidationOidTable& table);

// ---- SAN statistics ------------------------------------------------------

struct SanStats {
    int total_dns_sans = 0;  // capped at 100 for reporting
    int wildcard_sans = 0;   // capped at 100
    int unique_eslds = 0;    // capped at 100
    bool single_san = false;
    int raw_total_dns_sans = 0;
    int raw_wildcard_sans = 0;
    int raw_unique_eslds = 0;
};

/// Counts DNS SANs, wildcards, and unique eSLDs (computed after stripping a
/// leading "*." label). Reported fields cap at 100; raw counts are kept.
SanStats san_statistics(const CertificateRecord& cert, const ingest::PublicSuffixTable& table);

// ---- CAA matching --------------------------------------------------------

enum class CaaResult { match, mismatch, no_caa, unparsable_only };

const char* caa_result_name(CaaResult r);

/// Maps CAA identifier domains to CA operators (CSV "identifier,operator").
/// The issuing CA is tied to an operator through its subject O (fallback CN).
class CaaIdentifierMap {
public:
    static CaaIdentifierMap from_csv(const std::string& csv_text);

    void add(const std::string& identifier_domain, const std::string& operator_name);
    std::set<std::string> identifiers_for_operator(const std::string& operator_name) const;
    std::optional<std::string> operator_for_issuer(const CertificateRecord& issuing_ca) const;
    std::string digest() const;  // manifest provenance
    bool empty() const { return identifier_to_operator_.empty(); }

private:
    std::map<std::string, std::string> identifier_to_operator_;
};

struct CaaVerdict {
    std::vector<dns::CaaRecord> records_considered;
    std::set<std::string> issuer_identifiers;
    CaaResult result = CaaResult::no_caa;
};

/// Compares ok issue/issuewild values against the identifiers mapped to the
/// leaf's issuer operator. A record set without any usable issue directive
/// places no restriction and counts as match.
CaaVerdict match_caa(const std::vector<dns::CaaRecord>& records,
                     const CertificateRecord& issuing_ca, const CaaIdentifierMap& identifiers);

// ---- DANE / TLSA matching ------------------------------------------------

enum class DaneMatchTarget { leaf, chain_member, anchor };

const char* dane_match_target_name(DaneMatchTarget t);

struct DaneVerdict {
    dns::TlsaData tlsa;
    bool matched = false;
    bool unsupported = false;  // usage/selector/matching-type outside the supported set
    std::optional<DaneMatchTarget> matched_against;
    std::string detail;
};

/// Selector picks full certificate or SPKI, matching type exact/SHA-256/
/// SHA-512, usage the chain member class (end-entity vs trust anchor/CA).
/// PKIX usages 0 and 1 additionally require a valid chain. Comparison is
/// bit-exact.
DaneVerdict match_tlsa(const dns::TlsaData& tlsa, const ChainEvaluation& chain,
                       const std::map<std::string, CertificateRecord>& certs_by_fingerprint);

// ---- Revocation ----------------------------------------------------------

enum class RevocationStatus {
    not_checked,
    good_stapled,
    revoked_stapled,
    stale_staple,
    decode_failure,
    signature_invalid,
};

const char* revocation_status_name(RevocationStatus s);

struct RevocationReport {
    std::vector<std::string> ocsp_urls;
    std::vector<std::string> crl_urls;
    RevocationStatus status = RevocationStatus::not_checked;
    std::optional<UtcMillis> this_update;
    std::optional<UtcMillis> next_update;
    std::string detail;
};

/// Lists revocation endpoints and, when a stapled OCSP response is supplied,
/// checks its window against `at` and its responder signature against the
/// presented chain. Never touches the network; live fetching is the
/// separately gated fetch_ocsp_live.
RevocationReport check_revocation_info(const CertificateRecord& cert,
                                       std::optional<std::span<const std::uint8_t>> stapled,
                                       UtcMillis at,
                                       const std::vector<CertificateRecord>& chain);

/// Gated live OCSP query over HTTP POST to one of the certificate's AIA
/// endpoints. Returns the DER response or nullopt on transport failure.
std::optional<std::vector<std::uint8_t>> fetch_ocsp_live(const CertificateRecord& cert,
                                                         const CertificateRecord& issuer,
                                                         const std::string& url,
                                                         int timeout_ms);

// ---- Conformance linting -------------------------------------------------

struct ConformanceFinding {
    std::string rule_id;
    std::string detail;
};

/// Small bundled rule set; each finding cites its rule id.
std::vector<ConformanceFinding> lint_conformance(const CertificateRecord& cert);

nlohmann::json san_stats_to_json(const SanStats& stats);
nlohmann::json caa_verdict_to_json(const CaaVerdict& verdict);
nlohmann::json dane_verdict_to_json(const DaneVerdict& verdict);
nlohmann::json revocation_report_to_json(const RevocationReport& report);

}  // namespace pkiscope::x509
