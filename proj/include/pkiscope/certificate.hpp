// Copyright 2026 The pkiscope Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "pkiscope/common.hpp"

struct x509_st;  // OpenSSL X509

namespace pkiscope::x509 {

enum class SanType { dns, ip, email };

struct San {
    SanType type;
    std::string value;
};

const char* san_type_name(SanType t);

/// One parsed certificate. Field extraction is lossless: the DER bytes are
/// retained and unrecognized extensions are preserved by OID.
struct CertificateRecord {
    std::string fingerprint;  // hex SHA-256 of the DER encoding
    std::map<std::string, std::vector<std::string>> subject;
    std::map<std::string, std::vector<std::string>> issuer;
    std::vector<San> sans;
    UtcMillis not_before = 0;
    UtcMillis not_after = 0;
    std::set<std::string> policy_oids;
    bool is_ca = false;
    bool self_signed = false;
    std::set<std::string> key_usage;
    std::set<std::string> ext_key_usage;
    int sct_count = 0;
    std::vector<std::string> aia_ocsp_urls;
    std::vector<std::string> crl_urls;
    std::string spki_digest;  // hex SHA-256 of the SubjectPublicKeyInfo DER
    std::vector<std::uint8_t> raw;
    std::map<std::string, std::string> unknown_extensions;  // OID -> base64 value

    std::shared_ptr<x509_st> handle;

    /// First value for an attribute key ("CN", "O", ...) or empty.
    std::string subject_attr(const std::string& key) const;
    std::string issuer_attr(const std::string& key) const;

    /// Display label: subject CN, falling back to O, falling back to the
    /// fingerprint prefix.
    std::string display_name() const;
};

/// Parses a DER certificate. Throws ParseError carrying the byte offset where
/// the ASN.1 structure becomes undecodable.
CertificateRecord parse_certificate(std::span<const std::uint8_t> der);

/// All certificates from a PEM bundle, in order of appearance.
std::vector<CertificateRecord> parse_pem_bundle(const std::string& pem_text);

std::string to_pem(const CertificateRecord& cert);

}  // namespace pkiscope::x509
