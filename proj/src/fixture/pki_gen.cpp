// Copyright 2026 The pkiscope Authors
// SPDX-License-Identifier: Apache-2.0
#include "pkiscope/fixture/pki_gen.hpp"

#include <openssl/evp.h>
#include <openssl/rsa.h>
#include <openssl/x509.h>
#include <openssl/x509v3.h>

#include <algorithm>
#include <cstring>
#include <functional>

namespace pkiscope::fixture {

using nlohmann::json;

namespace {

using KeyPtr = std::shared_ptr<evp_pkey_st>;

KeyPtr derive_key(const std::string& key_type, std::uint64_t seed, const std::string& node) {
    if (key_type == "rsa2048") {
        // RSA keygen is not seedable; only Ed25519 nodes are byte-deterministic.
        EVP_PKEY* k = EVP_PKEY_Q_keygen(nullptr, nullptr, "RSA", 2048);
        return {k, EVP_PKEY_free};
    }
    std::vector<std::uint8_t> material(sizeof seed + node.size());
    std::memcpy(material.data(), &seed, sizeof seed);
    std::memcpy(material.data() + sizeof seed, node.data(), node.size());
    auto raw = sha256(material);
    EVP_PKEY* k = EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, raw.data(), raw.size());
    return {k, EVP_PKEY_free};
}

void add_ext(X509* cert, X509* issuer, int nid, const char* value) {
    X509V3_CTX ctx;
    X509V3_set_ctx_nodb(&ctx);
    X509V3_set_ctx(&ctx, issuer, cert, nullptr, nullptr, 0);
    X509_EXTENSION* ext = X509V3_EXT_conf_nid(nullptr, &ctx, nid, value);
    if (ext) {
        X509_add_ext(cert, ext, -1);
        X509_EXTENSION_free(ext);
    }
}

void set_name(X509_NAME* name, const PkiNodeSpec& node) {
    auto add = [&](const char* key, const std::string& value) {
        X509_NAME_add_entry_by_txt(name, key, MBSTRING_ASC,
                                   reinterpret_cast<const unsigned char*>(value.c_str()), -1, -1, 0);
    };
    add("CN", node.name);
    for (const auto& [key, value] : node.subject_extra) add(key.c_str(), value);
}

x509::CertificateRecord materialize(const PkiNodeSpec& subject, const PkiNodeSpec& issuer,
                                    EVP_PKEY* subject_key, EVP_PKEY* issuer_key,
                                    X509* issuer_cert, UtcMillis now, std::uint64_t seed) {
    X509* x = X509_new();
    X509_set_version(x, 2);

    // Deterministic serial from (seed, issuer, subject).
    std::string serial_src = std::to_string(seed) + "/" + issuer.name + "/" + subject.name;
    auto digest = sha256({reinterpret_cast<const std::uint8_t*>(serial_src.data()), serial_src.size()});
    ASN1_INTEGER* serial = ASN1_INTEGER_new();
    BIGNUM* bn = BN_bin2bn(digest.data(), 8, nullptr);
    BN_set_negative(bn, 0);
    BN_to_ASN1_INTEGER(bn, serial);
    BN_free(bn);
    X509_set_serialNumber(x, serial);
    ASN1_INTEGER_free(serial);

    time_t base = static_cast<time_t>(now / 1000);
    int before_days = subject.not_before_days;
    int after_days = subject.not_after_days;
    if (subject.swap_validity) std::swap(before_days, after_days);
    X509_time_adj_ex(X509_getm_notBefore(x), before_days, 0, &base);
    X509_time_adj_ex(X509_getm_notAfter(x), after_days, 0, &base);

    X509_set_pubkey(x, subject_key);
    set_name(X509_get_subject_name(x), subject);
    set_name(X509_get_issuer_name(x), issuer);

    bool is_ca = subject.role != "leaf";
    X509* v3_issuer = issuer_cert ? issuer_cert : x;
    add_ext(x, v3_issuer, NID_basic_constraints, is_ca ? "critical,CA:TRUE" : "critical,CA:FALSE");
    add_ext(x, v3_issuer, NID_key_usage,
            is_ca ? "critical,keyCertSign,cRLSign" : "critical,digitalSignature");
    add_ext(x, v3_issuer, NID_subject_key_identifier, "hash");
    if (issuer_cert) add_ext(x, v3_issuer, NID_authority_key_identifier, "keyid:always");
    if (!is_ca) add_ext(x, v3_issuer, NID_ext_key_usage, "serverAuth");

    if (!subject.sans.empty()) {
        std::string san_value;
        for (const auto& san : subject.sans) {
            if (!san_value.empty()) san_value += ",";
            san_value += "DNS:" + san;
        }
        add_ext(x, v3_issuer, NID_subject_alt_name, san_value.c_str());
    }
    if (!subject.policy_oids.empty()) {
        std::string policies;
        for (const auto& oid : subject.policy_oids) {
            if (!policies.empty()) policies += ",";
            policies += oid;
        }
        add_ext(x, v3_issuer, NID_certificate_policies, policies.c_str());
    }

    if (X509_sign(x, issuer_key, EVP_PKEY_id(issuer_key) == EVP_PKEY_ED25519 ? nullptr : EVP_sha256()) <= 0) {
        X509_free(x);
        throw std::runtime_error("failed to sign fixture certificate for " + subject.name);
    }

    unsigned char* der = nullptr;
    int len = i2d_X509(x, &der);
    X509_free(x);
    if (len <= 0) throw std::runtime_error("failed to encode fixture certificate");
    auto record = x509::parse_certificate({der, static_cast<std::size_t>(len)});
    OPENSSL_free(der);
    return record;
}

}  // namespace

PkiSpec PkiSpec::from_json(const json& j) {
    PkiSpec spec;
    for (const auto& n : j.at("nodes")) {
        PkiNodeSpec node;
        node.name = n.at("name").get<std::string>();
        node.role = n.at("role").get<std::string>();
        node.key_type = n.value("key_type", "ed25519");
        node.not_before_days = n.value("not_before_days", -30);
        node.not_after_days = n.value("not_after_days", 365);
        node.swap_validity = n.value("swap_validity", false);
        if (n.contains("sans")) node.sans = n["sans"].get<std::vector<std::string>>();
        if (n.contains("policy_oids"))
            for (const auto& oid : n["policy_oids"]) node.policy_oids.insert(oid.get<std::string>());
        if (n.contains("subject_extra"))
            for (const auto& [k, v] : n["subject_extra"].items())
                node.subject_extra[k] = v.get<std::string>();
        spec.nodes.push_back(std::move(node));
    }
    for (const auto& e : j.at("edges")) {
        spec.edges.push_back({e.at("issuer").get<std::string>(), e.at("subject").get<std::string>()});
    }
    if (j.contains("tlsa_publications")) {
        for (const auto& t : j["tlsa_publications"]) {
            TlsaPublication pub;
            pub.leaf = t.at("leaf").get<std::string>();
            pub.match_node = t.at("match_node").get<std::string>();
            pub.usage = t.value("usage", 3);
            pub.selector = t.value("selector", 1);
            pub.matching_type = t.value("matching_type", 1);
            pub.port = t.value("port", 443);
            spec.tlsa_publications.push_back(std::move(pub));
        }
    }
    return spec;
}

const PkiNodeSpec* PkiSpec::find(const std::string& name) const {
    for (const auto& node : nodes) {
        if (node.name == name) return &node;
    }
    return nullptr;
}

const MaterializedCert* MaterializedPki::primary_cert(const std::string& node) const {
    for (const auto& cert : certs) {
        if (cert.subject_node == node) return &cert;
    }
    return nullptr;
}

const MaterializedCert* MaterializedPki::cert_for_edge(const std::string& issuer,
                                                       const std::string& subject) const {
    for (const auto& cert : certs) {
        if (cert.subject_node == subject && cert.issuer_node == issuer) return &cert;
    }
    return nullptr;
}

std::shared_ptr<evp_pkey_st> MaterializedPki::key(const std::string& node) const {
    auto it = keys.find(node);
    return it == keys.end() ? nullptr : it->second;
}

std::vector<x509::CertificateRecord> MaterializedPki::anchors() const {
    std::vector<x509::CertificateRecord> out;
    for (const auto& cert : certs) {
        if (cert.subject_node == cert.issuer_node) out.push_back(cert.record);
    }
    return out;
}

std::vector<x509::CertificateRecord> MaterializedPki::intermediates() const {
    std::vector<x509::CertificateRecord> out;
    for (const auto& cert : certs) {
        if (cert.subject_node != cert.issuer_node && cert.record.is_ca)
            out.push_back(cert.record);
    }
    return out;
}

std::vector<x509::CertificateRecord> MaterializedPki::served_chain(const std::string& leaf,
                                                                   bool include_root) const {
    std::vector<x509::CertificateRecord> out;
    const MaterializedCert* current = primary_cert(leaf);
    std::set<std::string> seen;
    while (current && seen.insert(current->subject_node).second) {
        bool self = current->subject_node == current->issuer_node;
        if (self && !include_root) break;
        out.push_back(current->record);
        if (self) break;
        current = primary_cert(current->issuer_node);
    }
    return out;
}

std::vector<std::vector<std::string>> MaterializedPki::enumerate_paths(
    const std::string& leaf, const std::set<std::string>& anchor_fps,
    const std::set<std::string>& available) const {
    std::vector<std::vector<std::string>> results;
    const MaterializedCert* start = primary_cert(leaf);
    if (!start || !available.contains(start->record.fingerprint)) return results;

    // DFS over construction edges: after a certificate for node S issued by
    // I, the next certificate is any available one whose subject node is I.
    std::vector<std::string> path{start->record.fingerprint};
    std::vector<const MaterializedCert*> stack{start};

    std::function<void()> dfs = [&] {
        const MaterializedCert* top = stack.back();
        if (anchor_fps.contains(top->record.fingerprint)) {
            results.push_back(path);
            return;
        }
        if (top->subject_node == top->issuer_node) return;  // self-signed non-anchor
        for (const auto& cert : certs) {
            if (cert.subject_node != top->issuer_node) continue;
            if (!available.contains(cert.record.fingerprint)) continue;
            if (std::find(path.begin(), path.end(), cert.record.fingerprint) != path.end())
                continue;
            path.push_back(cert.record.fingerprint);
            stack.push_back(&cert);
            dfs();
            stack.pop_back();
            path.pop_back();
        }
    };
    dfs();
    return results;
}

std::optional<std::vector<std::string>> MaterializedPki::expected_shortest(
    const std::string& leaf, const std::set<std::string>& anchor_fps,
    const std::set<std::string>& available) const {
    auto paths = enumerate_paths(leaf, anchor_fps, available);
    if (paths.empty()) return std::nullopt;
    auto better = [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        if (a.back() != b.back()) return a.back() < b.back();  // anchor fingerprint
        return a < b;
    };
    return *std::min_element(paths.begin(), paths.end(), better);
}

std::vector<std::uint8_t> MaterializedPki::tlsa_association(const TlsaPublication& pub) const {
    const MaterializedCert* cert = primary_cert(pub.match_node);
    if (!cert) throw std::runtime_error("tlsa publication names unknown node " + pub.match_node);
    std::vector<std::uint8_t> input;
    if (pub.selector == 0) {
        input = cert->record.raw;
    } else {
        input = from_hex(cert->record.spki_digest);  // already SHA-256 of SPKI
        if (pub.matching_type == 1) return input;    // selector 1 + SHA-256 is exactly that
        // For other matching types we need the SPKI bytes themselves.
        X509* x = cert->record.handle.get();
        unsigned char* spki = nullptr;
        int len = i2d_X509_PUBKEY(X509_get_X509_PUBKEY(x), &spki);
        input.assign(spki, spki + len);
        OPENSSL_free(spki);
    }
    switch (pub.matching_type) {
        case 0: return input;
        case 1: return sha256(input);
        case 2: return sha512(input);
        default: throw std::runtime_error("unsupported matching type in fixture");
    }
}

const x509::CertificateRecord* MaterializedPki::find_by_fingerprint(const std::string& fp) const {
    for (const auto& cert : certs) {
        if (cert.record.fingerprint == fp) return &cert.record;
    }
    return nullptr;
}

MaterializedPki generate_pki(const PkiSpec& spec, std::uint64_t seed, UtcMillis now) {
    MaterializedPki pki;
    pki.generated_at = now == 0 ? now_utc_millis() : now;

    for (const auto& node : spec.nodes) {
        pki.keys[node.name] = derive_key(node.key_type, seed, node.name);
        if (!pki.keys[node.name]) throw std::runtime_error("key generation failed for " + node.name);
    }

    // Self-signed certificates for roots first (issuers of everything else).
    for (const auto& node : spec.nodes) {
        if (node.role == "root" || node.role == "cross-signed-root") {
            auto record = materialize(node, node, pki.keys[node.name].get(),
                                      pki.keys[node.name].get(), nullptr, pki.generated_at, seed);
            pki.certs.push_back({node.name, node.name, std::move(record)});
        }
    }
    // Then one certificate per edge, in spec order.
    for (const auto& edge : spec.edges) {
        const PkiNodeSpec* subject = spec.find(edge.subject);
        const PkiNodeSpec* issuer = spec.find(edge.issuer);
        if (!subject || !issuer)
            throw std::runtime_error("edge references unknown node " + edge.issuer + "->" + edge.subject);
        const MaterializedCert* issuer_cert = pki.primary_cert(edge.issuer);
        auto record = materialize(*subject, *issuer, pki.keys[edge.subject].get(),
                                  pki.keys[edge.issuer].get(),
                                  issuer_cert ? issuer_cert->record.handle.get() : nullptr,
                                  pki.generated_at, seed);
        pki.certs.push_back({edge.subject, edge.issuer, std::move(record)});
    }

    // Reject specs where a leaf cannot reach any root.
    std::set<std::string> anchor_fps;
    std::set<std::string> all_fps;
    for (const auto& cert : pki.certs) {
        all_fps.insert(cert.record.fingerprint);
        if (cert.subject_node == cert.issuer_node) anchor_fps.insert(cert.record.fingerprint);
    }
    for (const auto& node : spec.nodes) {
        if (node.role != "leaf") continue;
        if (pki.enumerate_paths(node.name, anchor_fps, all_fps).empty()) {
            throw std::runtime_error("unsatisfiable spec: leaf " + node.name +
                                     " has no path to a root");
        }
    }
    return pki;
}

PkiSpec random_pki_spec(std::mt19937_64& rng) {
    PkiSpec spec;
    auto pick = [&](int lo, int hi) {
        return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
    };

    int roots = pick(1, 3);
    int intermediates = pick(1, 4);
    int leaves = pick(1, 4);

    for (int i = 0; i < roots; i++) {
        spec.nodes.push_back({.name = "root-" + std::to_string(i), .role = "root"});
    }
    for (int i = 0; i < intermediates; i++) {
        std::string name = "int-" + std::to_string(i);
        spec.nodes.push_back({.name = name, .role = "intermediate"});
        // Parent: a root, or an earlier intermediate (chains of depth > 2).
        if (i > 0 && pick(0, 2) == 0) {
            spec.edges.push_back({"int-" + std::to_string(pick(0, i - 1)), name});
        } else {
            spec.edges.push_back({"root-" + std::to_string(pick(0, roots - 1)), name});
        }
        // Occasional extra parent: multiple paths through cross certification.
        if (pick(0, 2) == 0) {
            std::string extra = "root-" + std::to_string(pick(0, roots - 1));
            if (extra != spec.edges.back().issuer) spec.edges.push_back({extra, name});
        }
    }
    // Random cross-signs between roots.
    if (roots > 1 && pick(0, 1) == 0) {
        int a = pick(0, roots - 1);
        int b = pick(0, roots - 1);
        if (a != b)
            spec.edges.push_back({"root-" + std::to_string(a), "root-" + std::to_string(b)});
    }
    for (int i = 0; i < leaves; i++) {
        std::string name = "leaf-" + std::to_string(i);
        spec.nodes.push_back({.name = name,
                              .role = "leaf",
                              .sans = {name + ".fixture.test"}});
        spec.edges.push_back({"int-" + std::to_string(pick(0, intermediates - 1)), name});
    }
    return spec;
}

}  // namespace pkiscope::fixture
