// Copyright 2026 The pkiscope Authors
// SPDX-License-Identifier: Apache-2.0
#include "pkiscope/x509_analysis.hpp"

#include <openssl/ocsp.h>
#include <openssl/x509.h>

#include <algorithm>
#include <sstream>

namespace pkiscope::x509 {

using nlohmann::json;

// ---- Validation-type classification -------------------------------------

const char* validation_type_name(ValidationType t) {
    switch (t) {
        case ValidationType::DV: return "DV";
        case ValidationType::OV: return "OV";
        case ValidationType::IV: return "IV";
        case ValidationType::EV: return "EV";
        case ValidationType::unknown: return "unknown";
        case ValidationType::conflicting: return "conflicting";
    }
    return "unknown";
}

ValidationOidTable default_validation_oid_table() {
    return {
        {"2.23.140.1.2.1", ValidationType::DV},
        {"2.23.140.1.2.2", ValidationType::OV},
        {"2.23.140.1.2.3", ValidationType::IV},
        {"2.23.140.1.1", ValidationType::EV},
    };
}

ValidationType classify_validation_type(const CertificateRecord& cert,
                                        const ValidationOidTable& table) {
    std::set<ValidationType> classes;
    for (const auto& oid : cert.policy_oids) {
        auto it = table.find(oid);
        if (it != table.end()) classes.insert(it->second);
    }
    if (classes.empty()) return ValidationType::unknown;
    if (classes.size() > 1) return ValidationType::conflicting;
    return *classes.begin();
}

// ---- SAN statistics ------------------------------------------------------

SanStats san_statistics(const CertificateRecord& cert, const ingest::PublicSuffixTable& table) {
    SanStats stats;
    std::set<std::string> eslds;
    for (const auto& san : cert.sans) {
        if (san.type != SanType::dns) continue;
        stats.raw_total_dns_sans++;
        std::string name = san.value;
        if (name.rfind("*.", 0) == 0) {
            stats.raw_wildcard_sans++;
            name = name.substr(2);
        }
        eslds.insert(table.esld(name).esld);
    }
    stats.raw_unique_eslds = static_cast<int>(eslds.size());
    stats.total_dns_sans = std::min(stats.raw_total_dns_sans, 100);
    stats.wildcard_sans = std::min(stats.raw_wildcard_sans, 100);
    stats.unique_eslds = std::min(stats.raw_unique_eslds, 100);
    stats.single_san = stats.raw_total_dns_sans == 1;
    return stats;
}

// ---- CAA matching --------------------------------------------------------

const char* caa_result_name(CaaResult r) {
    switch (r) {
        case CaaResult::match: return "match";
        case CaaResult::mismatch: return "mismatch";
        case CaaResult::no_caa: return "no-caa";
        case CaaResult::unparsable_only: return "unparsable-only";
    }
    return "no-caa";
}

CaaIdentifierMap CaaIdentifierMap::from_csv(const std::string& csv_text) {
    CaaIdentifierMap map;
    std::istringstream in(csv_text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::size_t comma = line.find(',');
        if (comma == std::string::npos) throw ParseError("identifier map line lacks comma", lineno);
        std::string identifier = to_lower(line.substr(0, comma));
        std::string operator_name = line.substr(comma + 1);
        if (lineno == 1 && identifier == "identifier") continue;  // header
        map.add(identifier, operator_name);
    }
    return map;
}

void CaaIdentifierMap::add(const std::string& identifier_domain, const std::string& operator_name) {
    identifier_to_operator_[to_lower(identifier_domain)] = operator_name;
}

std::set<std::string> CaaIdentifierMap::identifiers_for_operator(
    const std::string& operator_name) const {
    std::set<std::string> out;
    std::string want = to_lower(operator_name);
    for (const auto& [identifier, op] : identifier_to_operator_) {
        if (to_lower(op) == want) out.insert(identifier);
    }
    return out;
}

std::optional<std::string> CaaIdentifierMap::operator_for_issuer(
    const CertificateRecord& issuing_ca) const {
    for (const std::string& key : {std::string("O"), std::string("CN")}) {
        std::string attr = key == "O" ? issuing_ca.subject_attr("O") : issuing_ca.subject_attr("CN");
        if (attr.empty()) continue;
        std::string want = to_lower(attr);
        for (const auto& [identifier, op] : identifier_to_operator_) {
            if (to_lower(op) == want) return op;
        }
    }
    return std::nullopt;
}

std::string CaaIdentifierMap::digest() const {
    std::string flat;
    for (const auto& [identifier, op] : identifier_to_operator_) {
        flat += identifier + "," + op + "\n";
    }
    return sha256_hex({reinterpret_cast<const std::uint8_t*>(flat.data()), flat.size()});
}

CaaVerdict match_caa(const std::vector<dns::CaaRecord>& records,
                     const CertificateRecord& issuing_ca, const CaaIdentifierMap& identifiers) {
    CaaVerdict verdict;
    verdict.records_considered = records;
    if (records.empty()) {
        verdict.result = CaaResult::no_caa;
        return verdict;
    }
    auto op = identifiers.operator_for_issuer(issuing_ca);
    if (op) verdict.issuer_identifiers = identifiers.identifiers_for_operator(*op);

    bool any_ok = false;
    bool any_issue = false;
    bool matched = false;
    for (const auto& rec : records) {
        if (rec.parse_status != dns::CaaParseStatus::ok) continue;
        any_ok = true;
        if (!rec.is_issue()) continue;
        any_issue = true;
        std::string domain = rec.issuer_domain();
        if (!domain.empty() && verdict.issuer_identifiers.contains(domain)) matched = true;
    }
    if (!any_ok) {
        verdict.result = CaaResult::unparsable_only;
    } else if (!any_issue) {
        // Only iodef or alike: no issuance restriction expressed.
        verdict.result = CaaResult::match;
    } else {
        verdict.result = matched ? CaaResult::match : CaaResult::mismatch;
    }
    return verdict;
}

// ---- DANE / TLSA matching ------------------------------------------------

const char* dane_match_target_name(DaneMatchTarget t) {
    switch (t) {
        case DaneMatchTarget::leaf: return "leaf";
        case DaneMatchTarget::chain_member: return "chain-member";
        case DaneMatchTarget::anchor: return "anchor";
    }
    return "leaf";
}

namespace {

std::vector<std::uint8_t> dane_material(const CertificateRecord& cert, std::uint8_t selector,
                                        std::uint8_t matching_type) {
    std::vector<std::uint8_t> input;
    if (selector == 0) {
        input = cert.raw;
    } else {
        unsigned char* spki = nullptr;
        int len = i2d_X509_PUBKEY(X509_get_X509_PUBKEY(cert.handle.get()), &spki);
        input.assign(spki, spki + len);
        OPENSSL_free(spki);
    }
    switch (matching_type) {
        case 0: return input;
        case 1: return sha256(input);
        case 2: return sha512(input);
    }
    return {};
}

}  // namespace

DaneVerdict match_tlsa(const dns::TlsaData& tlsa, const ChainEvaluation& chain,
                       const std::map<std::string, CertificateRecord>& certs_by_fingerprint) {
    DaneVerdict verdict;
    verdict.tlsa = tlsa;
    if (tlsa.usage > 3 || tlsa.selector > 1 || tlsa.matching_type > 2) {
        verdict.unsupported = true;
        verdict.detail = "unsupported usage/selector/matching-type";
        return verdict;
    }
    bool pkix = tlsa.usage == 0 || tlsa.usage == 1;
    if (pkix && chain.verdict != ChainVerdict::valid) {
        verdict.detail = "PKIX usage requires a valid chain";
        return verdict;
    }
    bool end_entity = tlsa.usage == 1 || tlsa.usage == 3;

    const std::vector<std::string>& members =
        chain.chosen_path ? *chain.chosen_path : chain.presented;
    for (std::size_t i = 0; i < members.size(); i++) {
        if (end_entity && i != 0) break;
        if (!end_entity && i == 0) continue;
        auto it = certs_by_fingerprint.find(members[i]);
        if (it == certs_by_fingerprint.end()) continue;
        auto material = dane_material(it->second, tlsa.selector, tlsa.matching_type);
        if (!material.empty() && material == tlsa.association) {
            verdict.matched = true;
            if (i == 0) {
                verdict.matched_against = DaneMatchTarget::leaf;
            } else if (chain.chosen_path && i + 1 == members.size()) {
                verdict.matched_against = DaneMatchTarget::anchor;
            } else {
                verdict.matched_against = DaneMatchTarget::chain_member;
            }
            return verdict;
        }
    }
    return verdict;
}

// ---- Revocation ----------------------------------------------------------

const char* revocation_status_name(RevocationStatus s) {
    switch (s) {
        case RevocationStatus::not_checked: return "not-checked";
        case RevocationStatus::good_stapled: return "good-stapled";
        case RevocationStatus::revoked_stapled: return "revoked-stapled";
        case RevocationStatus::stale_staple: return "stale-staple";
        case RevocationStatus::decode_failure: return "decode-failure";
        case RevocationStatus::signature_invalid: return "signature-invalid";
    }
    return "not-checked";
}

namespace {

UtcMillis generalized_time_to_millis(const ASN1_GENERALIZEDTIME* t) {
    std::tm tm{};
    if (!t || ASN1_TIME_to_tm(t, &tm) != 1) return 0;
    return static_cast<UtcMillis>(timegm(&tm)) * 1000;
}

}  // namespace

RevocationReport check_revocation_info(const CertificateRecord& cert,
                                       std::optional<std::span<const std::uint8_t>> stapled,
                                       UtcMillis at,
                                       const std::vector<CertificateRecord>& chain) {
    RevocationReport report;
    report.ocsp_urls = cert.aia_ocsp_urls;
    report.crl_urls = cert.crl_urls;
    if (!stapled) {
        report.status = RevocationStatus::not_checked;
        return report;
    }

    const unsigned char* p = stapled->data();
    OCSP_RESPONSE* resp = d2i_OCSP_RESPONSE(nullptr, &p, static_cast<long>(stapled->size()));
    if (!resp) {
        report.status = RevocationStatus::decode_failure;
        report.detail = "undecodable OCSP response";
        return report;
    }
    OCSP_BASICRESP* basic = OCSP_response_get1_basic(resp);
    if (!basic) {
        OCSP_RESPONSE_free(resp);
        report.status = RevocationStatus::decode_failure;
        report.detail = "response carries no basic response";
        return report;
    }

    // Responder signature against the presented chain: members are both the
    // trusted set and the untrusted helper stack.
    STACK_OF(X509)* others = sk_X509_new_null();
    for (const auto& member : chain) sk_X509_push(others, member.handle.get());
    X509_STORE* empty_store = X509_STORE_new();
    bool signature_ok = OCSP_basic_verify(basic, others, empty_store, OCSP_TRUSTOTHER) == 1;
    X509_STORE_free(empty_store);
    sk_X509_free(others);

    int cert_status = V_OCSP_CERTSTATUS_UNKNOWN;
    ASN1_GENERALIZEDTIME* this_upd = nullptr;
    ASN1_GENERALIZEDTIME* next_upd = nullptr;
    if (OCSP_resp_count(basic) > 0) {
        OCSP_SINGLERESP* single = OCSP_resp_get0(basic, 0);
        cert_status = OCSP_single_get0_status(single, nullptr, nullptr, &this_upd, &next_upd);
    }
    if (this_upd) report.this_update = generalized_time_to_millis(this_upd);
    if (next_upd) report.next_update = generalized_time_to_millis(next_upd);

    if (!signature_ok) {
        report.status = RevocationStatus::signature_invalid;
        report.detail = "responder signature did not verify against the presented chain";
    } else if (report.next_update && *report.next_update < at) {
        report.status = RevocationStatus::stale_staple;
    } else if (cert_status == V_OCSP_CERTSTATUS_REVOKED) {
        report.status = RevocationStatus::revoked_stapled;
    } else {
        report.status = RevocationStatus::good_stapled;
    }

    OCSP_BASICRESP_free(basic);
    OCSP_RESPONSE_free(resp);
    return report;
}

// ---- Conformance linting -------------------------------------------------

std::vector<ConformanceFinding> lint_conformance(const CertificateRecord& cert) {
    std::vector<ConformanceFinding> findings;
    auto table = default_validation_oid_table();

    if (cert.not_before >= cert.not_after) {
        findings.push_back({"VALIDITY-ORDER", "notBefore is not earlier than notAfter"});
    }

    std::set<ValidationType> classes;
    for (const auto& oid : cert.policy_oids) {
        auto it = table.find(oid);
        if (it != table.end()) classes.insert(it->second);
    }
    if (classes.size() > 1) {
        findings.push_back({"POLICY-CONFLICT", "multiple validation-class policy OIDs present"});
    }
    if (classes.contains(ValidationType::IV)) {
        bool surname = cert.subject.contains("SN") || cert.subject.contains("surname");
        bool given = cert.subject.contains("GN") || cert.subject.contains("givenName");
        if (!surname || !given) {
            findings.push_back(
                {"IV-SUBJECT-NAME", "IV policy without surname and givenName in subject"});
        }
    }
    if (!cert.is_ca && cert.ext_key_usage.contains("serverAuth")) {
        bool has_dns_or_ip = std::any_of(cert.sans.begin(), cert.sans.end(), [](const San& s) {
            return s.type == SanType::dns || s.type == SanType::ip;
        });
        if (!has_dns_or_ip) {
            findings.push_back({"LEAF-NO-SAN", "server-auth leaf without DNS or IP SAN"});
        }
    }
    if (cert.is_ca && !cert.key_usage.empty() && !cert.key_usage.contains("keyCertSign")) {
        findings.push_back({"CA-NO-KEYCERTSIGN", "CA certificate without keyCertSign key usage"});
    }
    return findings;
}

// ---- serialization -------------------------------------------------------

json san_stats_to_json(const SanStats& s) {
    return {{"total_dns_sans", s.total_dns_sans},
            {"wildcard_sans", s.wildcard_sans},
            {"unique_eslds", s.unique_eslds},
            {"single_san", s.single_san},
            {"raw_total_dns_sans", s.raw_total_dns_sans},
            {"raw_wildcard_sans", s.raw_wildcard_sans},
            {"raw_unique_eslds", s.raw_unique_eslds}};
}

json caa_verdict_to_json(const CaaVerdict& v) {
    json records = json::array();
    for (const auto& rec : v.records_considered) {
        records.push_back({{"flags", rec.flags},
                           {"tag", rec.tag},
                           {"value", rec.value},
                           {"parse_status", dns::caa_parse_status_name(rec.parse_status)},
                           {"raw", base64_encode(rec.raw)}});
    }
    return {{"records_considered", records},
            {"issuer_identifiers", v.issuer_identifiers},
            {"result", caa_result_name(v.result)}};
}

json dane_verdict_to_json(const DaneVerdict& v) {
    json j = {{"usage", v.tlsa.usage},
              {"selector", v.tlsa.selector},
              {"matching_type", v.tlsa.matching_type},
              {"association", to_hex(v.tlsa.association)},
              {"matched", v.matched},
              {"unsupported", v.unsupported}};
    if (v.matched_against) j["matched_against"] = dane_match_target_name(*v.matched_against);
    if (!v.detail.empty()) j["detail"] = v.detail;
    return j;
}

json revocation_report_to_json(const RevocationReport& r) {
    json j = {{"ocsp_urls", r.ocsp_urls},
              {"crl_urls", r.crl_urls},
              {"status", revocation_status_name(r.status)}};
    if (r.this_update) j["this_update"] = *r.this_update;
    if (r.next_update) j["next_update"] = *r.next_update;
    if (!r.detail.empty()) j["detail"] = r.detail;
    return j;
}

}  // namespace pkiscope::x509
