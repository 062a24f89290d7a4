// Copyright 2026 The pkiscope Authors
// SPDX-License-Identifier: Apache-2.0
#include "pkiscope/certificate.hpp"

#include <openssl/asn1.h>
#include <openssl/bio.h>
#include <openssl/ct.h>
#include <openssl/objects.h>
#include <openssl/pem.h>
#include <openssl/x509.h>
#include <openssl/x509v3.h>

#include <cstring>

namespace pkiscope::x509 {

namespace {

// Walks DER TLV structure and returns the first byte offset at which the
// encoding is inconsistent (truncated length, overrun, bad length form).
// Returns nullopt when the structure is well-formed at this level.
std::optional<std::size_t> der_error_offset(std::span<const std::uint8_t> data, std::size_t base) {
    std::size_t pos = 0;
    while (pos < data.size()) {
        std::size_t tag_pos = pos;
        std::uint8_t tag = data[pos++];
        if (pos >= data.size()) return base + pos;
        std::uint8_t len0 = data[pos++];
        std::size_t len = 0;
        if (len0 < 0x80) {
            len = len0;
        } else {
            std::size_t nbytes = len0 & 0x7f;
            if (nbytes == 0 || nbytes > sizeof(std::size_t)) return base + pos - 1;
            if (pos + nbytes > data.size()) return base + data.size();
            for (std::size_t i = 0; i < nbytes; i++) len = (len << 8) | data[pos++];
        }
        if (pos + len > data.size()) return base + data.size();
        bool constructed = (tag & 0x20) != 0;
        if (constructed) {
            auto inner = der_error_offset(data.subspan(pos, len), base + pos);
            if (inner) return inner;
        }
        (void)tag_pos;
        pos += len;
    }
    return std::nullopt;
}

UtcMillis asn1_time_to_millis(const ASN1_TIME* t) {
    std::tm tm{};
    if (ASN1_TIME_to_tm(t, &tm) != 1) return 0;
    time_t secs = timegm(&tm);
    return static_cast<UtcMillis>(secs) * 1000;
}

std::map<std::string, std::vector<std::string>> name_to_map(X509_NAME* name) {
    std::map<std::string, std::vector<std::string>> out;
    int n = X509_NAME_entry_count(name);
    for (int i = 0; i < n; i++) {
        X509_NAME_ENTRY* entry = X509_NAME_get_entry(name, i);
        ASN1_OBJECT* obj = X509_NAME_ENTRY_get_object(entry);
        char key[128];
        OBJ_obj2txt(key, sizeof key, obj, 0);  // short name, else dotted OID
        unsigned char* value = nullptr;
        int len = ASN1_STRING_to_UTF8(&value, X509_NAME_ENTRY_get_data(entry));
        if (len >= 0 && value) {
            out[key].emplace_back(reinterpret_cast<char*>(value), len);
            OPENSSL_free(value);
        }
    }
    return out;
}

}  // namespace

const char* san_type_name(SanType t) {
    switch (t) {
        case SanType::dns: return "dns";
        case SanType::ip: return "ip";
        case SanType::email: return "email";
    }
    return "dns";
}

std::string CertificateRecord::subject_attr(const std::string& key) const {
    auto it = subject.find(key);
    return (it != subject.end() && !it->second.empty()) ? it->second.front() : "";
}

std::string CertificateRecord::issuer_attr(const std::string& key) const {
    auto it = issuer.find(key);
    return (it != issuer.end() && !it->second.empty()) ? it->second.front() : "";
}

std::string CertificateRecord::display_name() const {
    std::string cn = subject_attr("CN");
    if (!cn.empty()) return cn;
    std::string o = subject_attr("O");
    if (!o.empty()) return o;
    return fingerprint.substr(0, 16);
}

CertificateRecord parse_certificate(std::span<const std::uint8_t> der) {
    const unsigned char* p = der.data();
    X509* x = d2i_X509(nullptr, &p, static_cast<long>(der.size()));
    if (!x) {
        std::size_t offset = der_error_offset(der, 0).value_or(
            static_cast<std::size_t>(p - der.data()));
        throw ParseError("undecodable ASN.1 in certificate", offset);
    }

    CertificateRecord rec;
    rec.handle = std::shared_ptr<x509_st>(x, X509_free);
    rec.raw.assign(der.begin(), der.end());
    rec.fingerprint = sha256_hex(rec.raw);

    rec.subject = name_to_map(X509_get_subject_name(x));
    rec.issuer = name_to_map(X509_get_issuer_name(x));
    rec.not_before = asn1_time_to_millis(X509_get0_notBefore(x));
    rec.not_after = asn1_time_to_millis(X509_get0_notAfter(x));
    rec.self_signed = X509_NAME_cmp(X509_get_subject_name(x), X509_get_issuer_name(x)) == 0;

    auto* sans = static_cast<GENERAL_NAMES*>(X509_get_ext_d2i(x, NID_subject_alt_name, nullptr, nullptr));
    if (sans) {
        for (int i = 0; i < sk_GENERAL_NAME_num(sans); i++) {
            GENERAL_NAME* gn = sk_GENERAL_NAME_value(sans, i);
            if (gn->type == GEN_DNS) {
                const unsigned char* s = ASN1_STRING_get0_data(gn->d.dNSName);
                rec.sans.push_back({SanType::dns, to_lower(std::string(
                    reinterpret_cast<const char*>(s), ASN1_STRING_length(gn->d.dNSName)))});
            } else if (gn->type == GEN_IPADD) {
                const unsigned char* s = ASN1_STRING_get0_data(gn->d.iPAddress);
                int len = ASN1_STRING_length(gn->d.iPAddress);
                char buf[64] = {0};
                if (len == 4) {
                    std::snprintf(buf, sizeof buf, "%u.%u.%u.%u", s[0], s[1], s[2], s[3]);
                } else {
                    std::string hex = to_hex({s, static_cast<std::size_t>(len)});
                    std::snprintf(buf, sizeof buf, "%s", hex.c_str());
                }
                rec.sans.push_back({SanType::ip, buf});
            } else if (gn->type == GEN_EMAIL) {
                const unsigned char* s = ASN1_STRING_get0_data(gn->d.rfc822Name);
                rec.sans.push_back({SanType::email, std::string(
                    reinterpret_cast<const char*>(s), ASN1_STRING_length(gn->d.rfc822Name))});
            }
        }
        GENERAL_NAMES_free(sans);
    }

    auto* policies = static_cast<CERTIFICATEPOLICIES*>(
        X509_get_ext_d2i(x, NID_certificate_policies, nullptr, nullptr));
    if (policies) {
        for (int i = 0; i < sk_POLICYINFO_num(policies); i++) {
            POLICYINFO* pi = sk_POLICYINFO_value(policies, i);
            char oid[128];
            OBJ_obj2txt(oid, sizeof oid, pi->policyid, 1);
            rec.policy_oids.insert(oid);
        }
        CERTIFICATEPOLICIES_free(policies);
    }

    std::uint32_t ex_flags = X509_get_extension_flags(x);
    rec.is_ca = (ex_flags & EXFLAG_CA) != 0;
    if (ex_flags & EXFLAG_KUSAGE) {
        std::uint32_t ku = X509_get_key_usage(x);
        static const std::pair<std::uint32_t, const char*> kMasks[] = {
            {KU_DIGITAL_SIGNATURE, "digitalSignature"}, {KU_NON_REPUDIATION, "nonRepudiation"},
            {KU_KEY_ENCIPHERMENT, "keyEncipherment"},   {KU_DATA_ENCIPHERMENT, "dataEncipherment"},
            {KU_KEY_AGREEMENT, "keyAgreement"},         {KU_KEY_CERT_SIGN, "keyCertSign"},
            {KU_CRL_SIGN, "cRLSign"},                   {KU_ENCIPHER_ONLY, "encipherOnly"},
            {KU_DECIPHER_ONLY, "decipherOnly"},
        };
        for (const auto& [mask, name] : kMasks) {
            if (ku & mask) rec.key_usage.insert(name);
        }
    }

    auto* eku = static_cast<EXTENDED_KEY_USAGE*>(
        X509_get_ext_d2i(x, NID_ext_key_usage, nullptr, nullptr));
    if (eku) {
        for (int i = 0; i < sk_ASN1_OBJECT_num(eku); i++) {
            char oid[128];
            OBJ_obj2txt(oid, sizeof oid, sk_ASN1_OBJECT_value(eku, i), 0);
            rec.ext_key_usage.insert(oid);
        }
        EXTENDED_KEY_USAGE_free(eku);
    }

    int sct_idx = X509_get_ext_by_NID(x, NID_ct_precert_scts, -1);
    if (sct_idx >= 0) {
        X509_EXTENSION* ext = X509_get_ext(x, sct_idx);
        ASN1_OCTET_STRING* data = X509_EXTENSION_get_data(ext);
        const unsigned char* sp = ASN1_STRING_get0_data(data);
        STACK_OF(SCT)* scts = nullptr;
        const unsigned char* q = sp;
        scts = d2i_SCT_LIST(nullptr, &q, ASN1_STRING_length(data));
        if (scts) {
            rec.sct_count = sk_SCT_num(scts);
            SCT_LIST_free(scts);
        }
    }

    STACK_OF(OPENSSL_STRING)* ocsp = X509_get1_ocsp(x);
    if (ocsp) {
        for (int i = 0; i < sk_OPENSSL_STRING_num(ocsp); i++) {
            rec.aia_ocsp_urls.emplace_back(sk_OPENSSL_STRING_value(ocsp, i));
        }
        X509_email_free(ocsp);
    }

    auto* crldp = static_cast<CRL_DIST_POINTS*>(
        X509_get_ext_d2i(x, NID_crl_distribution_points, nullptr, nullptr));
    if (crldp) {
        for (int i = 0; i < sk_DIST_POINT_num(crldp); i++) {
            DIST_POINT* dp = sk_DIST_POINT_value(crldp, i);
            if (!dp->distpoint || dp->distpoint->type != 0) continue;
            GENERAL_NAMES* names = dp->distpoint->name.fullname;
            for (int j = 0; j < sk_GENERAL_NAME_num(names); j++) {
                GENERAL_NAME* gn = sk_GENERAL_NAME_value(names, j);
                if (gn->type == GEN_URI) {
                    const unsigned char* s = ASN1_STRING_get0_data(gn->d.uniformResourceIdentifier);
                    rec.crl_urls.emplace_back(reinterpret_cast<const char*>(s),
                                              ASN1_STRING_length(gn->d.uniformResourceIdentifier));
                }
            }
        }
        CRL_DIST_POINTS_free(crldp);
    }

    X509_PUBKEY* pubkey = X509_get_X509_PUBKEY(x);
    unsigned char* spki = nullptr;
    int spki_len = i2d_X509_PUBKEY(pubkey, &spki);
    if (spki_len > 0) {
        rec.spki_digest = sha256_hex({spki, static_cast<std::size_t>(spki_len)});
        OPENSSL_free(spki);
    }

    static const std::set<int> kParsedNids = {
        NID_subject_alt_name,   NID_certificate_policies, NID_key_usage,
        NID_ext_key_usage,      NID_basic_constraints,    NID_ct_precert_scts,
        NID_info_access,        NID_crl_distribution_points,
        NID_authority_key_identifier, NID_subject_key_identifier,
    };
    int ext_count = X509_get_ext_count(x);
    for (int i = 0; i < ext_count; i++) {
        X509_EXTENSION* ext = X509_get_ext(x, i);
        ASN1_OBJECT* obj = X509_EXTENSION_get_object(ext);
        int nid = OBJ_obj2nid(obj);
        if (nid != NID_undef && kParsedNids.contains(nid)) continue;
        char oid[128];
        OBJ_obj2txt(oid, sizeof oid, obj, 1);
        ASN1_OCTET_STRING* data = X509_EXTENSION_get_data(ext);
        rec.unknown_extensions[oid] = base64_encode(
            {ASN1_STRING_get0_data(data), static_cast<std::size_t>(ASN1_STRING_length(data))});
    }

    return rec;
}

std::vector<CertificateRecord> parse_pem_bundle(const std::string& pem_text) {
    std::vector<CertificateRecord> out;
    BIO* bio = BIO_new_mem_buf(pem_text.data(), static_cast<int>(pem_text.size()));
    while (true) {
        X509* x = PEM_read_bio_X509(bio, nullptr, nullptr, nullptr);
        if (!x) break;
        unsigned char* der = nullptr;
        int len = i2d_X509(x, &der);
        X509_free(x);
        if (len <= 0) continue;
        out.push_back(parse_certificate({der, static_cast<std::size_t>(len)}));
        OPENSSL_free(der);
    }
    BIO_free(bio);
    return out;
}

std::string to_pem(const CertificateRecord& cert) {
    BIO* bio = BIO_new(BIO_s_mem());
    PEM_write_bio_X509(bio, cert.handle.get());
    char* data = nullptr;
    long len = BIO_get_mem_data(bio, &data);
    std::string pem(data, static_cast<std::size_t>(len));
    BIO_free(bio);
    return pem;
}

}  // namespace pkiscope::x509
