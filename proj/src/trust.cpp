// Copyright 2026 The pkiscope Authors
// SPDX-License-Identifier: Apache-2.0
#include "pkiscope/trust.hpp"

#include <openssl/evp.h>
#include <openssl/x509.h>

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace pkiscope::x509 {

using nlohmann::json;

const char* chain_verdict_name(ChainVerdict v) {
    switch (v) {
        case ChainVerdict::valid: return "valid";
        case ChainVerdict::expired: return "expired";
        case ChainVerdict::unknown_anchor: return "unknown-anchor";
        case ChainVerdict::broken_signature: return "broken-signature";
        case ChainVerdict::name_mismatch: return "name-mismatch";
        case ChainVerdict::incomplete: return "incomplete";
    }
    return "incomplete";
}

TrustStore TrustStore::load(const std::string& roots_pem, const std::string& intermediates_pem,
                            std::string label, std::string snapshot_date) {
    TrustStore store;
    store.store_label = std::move(label);
    store.snapshot_date = std::move(snapshot_date);
    store.anchors = parse_pem_bundle(roots_pem);
    for (const auto& anchor : store.anchors) {
        if (!anchor.is_ca)
            throw std::runtime_error("trust anchor without CA flag: " + anchor.display_name());
    }
    if (!intermediates_pem.empty()) store.intermediate_pool = parse_pem_bundle(intermediates_pem);
    return store;
}

namespace {

std::string name_key(X509_NAME* name) {
    unsigned char* der = nullptr;
    int len = i2d_X509_NAME(name, &der);
    std::string key(reinterpret_cast<char*>(der), static_cast<std::size_t>(std::max(len, 0)));
    OPENSSL_free(der);
    return key;
}

struct Candidate {
    const CertificateRecord* cert;
    bool is_anchor;
};

bool signature_ok(const CertificateRecord& child, const CertificateRecord& parent) {
    EVP_PKEY* key = X509_get0_pubkey(parent.handle.get());
    if (!key) return false;
    return X509_verify(child.handle.get(), key) == 1;
}

bool time_valid(const CertificateRecord& cert, UtcMillis at) {
    return cert.not_before <= at && at <= cert.not_after;
}

bool path_better(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    if (a.back() != b.back()) return a.back() < b.back();
    return a < b;
}

}  // namespace

ChainEvaluation build_chains(const CertificateRecord& leaf,
                             const std::vector<CertificateRecord>& presented,
                             const TrustStore& store, UtcMillis at,
                             const ChainBuildOptions& options) {
    ChainEvaluation eval;
    eval.leaf = leaf.fingerprint;
    eval.evaluated_at = at;
    eval.presented_length = static_cast<int>(presented.size());
    for (const auto& cert : presented) eval.presented.push_back(cert.fingerprint);
    if (eval.presented.empty()) {
        eval.presented.push_back(leaf.fingerprint);
        eval.presented_length = 1;
    }

    if (options.expected_host) {
        eval.hostname_checked = true;
        eval.hostname_matched = hostname_matches(leaf, *options.expected_host);
    }

    // Candidate index over presented ∪ pool ∪ anchors, deduplicated by
    // fingerprint. Anchor status wins on collision.
    std::map<std::string, Candidate> by_fingerprint;
    auto add = [&](const CertificateRecord& cert, bool anchor) {
        auto [it, inserted] = by_fingerprint.try_emplace(cert.fingerprint, Candidate{&cert, anchor});
        if (!inserted && anchor) it->second.is_anchor = true;
    };
    for (const auto& cert : presented) add(cert, false);
    for (const auto& cert : store.intermediate_pool) add(cert, false);
    for (const auto& cert : store.anchors) add(cert, true);
    add(leaf, false);

    std::map<std::string, std::vector<const Candidate*>> by_subject;
    for (auto& [fp, cand] : by_fingerprint) {
        by_subject[name_key(X509_get_subject_name(cand.cert->handle.get()))].push_back(&cand);
    }
    auto issuers_of = [&](const CertificateRecord& cert) -> const std::vector<const Candidate*>* {
        auto it = by_subject.find(name_key(X509_get_issuer_name(cert.handle.get())));
        return it == by_subject.end() ? nullptr : &it->second;
    };

    bool leaf_issuer_name_matched = false;
    bool broken_edge_seen = false;
    std::vector<std::string> broken_edges;

    // DFS for simple signature-verified paths ending at an anchor.
    std::vector<std::string> path{leaf.fingerprint};
    std::set<std::string> on_path{leaf.fingerprint};
    std::function<void(const CertificateRecord&, bool, int)> dfs =
        [&](const CertificateRecord& current, bool current_is_anchor, int depth) {
            if (current_is_anchor) {
                eval.paths_found.push_back(path);
                return;
            }
            if (depth >= options.max_depth) return;
            const auto* candidates = issuers_of(current);
            if (!candidates) return;
            for (const Candidate* cand : *candidates) {
                if (on_path.contains(cand->cert->fingerprint)) continue;
                if (&current == &leaf) leaf_issuer_name_matched = true;
                if (!signature_ok(current, *cand->cert)) {
                    broken_edge_seen = true;
                    broken_edges.push_back(current.fingerprint.substr(0, 12) + "->" +
                                           cand->cert->fingerprint.substr(0, 12));
                    continue;
                }
                path.push_back(cand->cert->fingerprint);
                on_path.insert(cand->cert->fingerprint);
                dfs(*cand->cert, cand->is_anchor, depth + 1);
                on_path.erase(cand->cert->fingerprint);
                path.pop_back();
            }
        };
    bool leaf_is_anchor = by_fingerprint.at(leaf.fingerprint).is_anchor;
    dfs(leaf, leaf_is_anchor, 0);

    std::sort(eval.paths_found.begin(), eval.paths_found.end(), path_better);

    if (!eval.paths_found.empty()) {
        // Prefer fully time-valid paths; fall back to expired ones.
        auto members_time_valid = [&](const std::vector<std::string>& p) {
            return std::all_of(p.begin(), p.end(), [&](const std::string& fp) {
                return time_valid(*by_fingerprint.at(fp).cert, at);
            });
        };
        const std::vector<std::string>* best_valid = nullptr;
        for (const auto& p : eval.paths_found) {
            if (members_time_valid(p)) {
                best_valid = &p;
                break;
            }
        }
        if (best_valid) {
            eval.chosen_path = *best_valid;
            eval.verdict = ChainVerdict::valid;
        } else {
            eval.chosen_path = eval.paths_found.front();
            eval.verdict = ChainVerdict::expired;
            for (const auto& fp : *eval.chosen_path) {
                const CertificateRecord& cert = *by_fingerprint.at(fp).cert;
                if (!time_valid(cert, at)) {
                    eval.verdict_reasons.push_back(
                        (at < cert.not_before ? "not yet valid: " : "expired: ") +
                        fp.substr(0, 12));
                }
            }
        }
        eval.shortest_length = static_cast<int>(eval.chosen_path->size()) - 1;
        eval.length_diff = eval.presented_length - *eval.shortest_length;
    } else if (broken_edge_seen) {
        eval.verdict = ChainVerdict::broken_signature;
        for (const auto& edge : broken_edges)
            eval.verdict_reasons.push_back("signature check failed: " + edge);
    } else if (leaf_issuer_name_matched) {
        eval.verdict = ChainVerdict::unknown_anchor;
        eval.verdict_reasons.push_back("issuer chain does not terminate at a trust anchor");
    } else {
        eval.verdict = ChainVerdict::incomplete;
        eval.verdict_reasons.push_back("no candidate matches the leaf issuer name");
    }
    return eval;
}

ChainVerdict reclassify_with_hostname(const ChainEvaluation& evaluation) {
    if (evaluation.verdict == ChainVerdict::valid && evaluation.hostname_checked &&
        !evaluation.hostname_matched) {
        return ChainVerdict::name_mismatch;
    }
    return evaluation.verdict;
}

bool hostname_matches(const CertificateRecord& leaf, const std::string& host) {
    std::string want = to_lower(host);
    for (const auto& san : leaf.sans) {
        if (san.type != SanType::dns) continue;
        const std::string& pattern = san.value;
        if (pattern == want) return true;
        if (pattern.rfind("*.", 0) == 0) {
            std::size_t dot = want.find('.');
            if (dot != std::string::npos && want.substr(dot + 1) == pattern.substr(2)) return true;
        }
    }
    return false;
}

json evaluation_to_json(const ChainEvaluation& e) {
    json j;
    j["leaf"] = e.leaf;
    j["presented"] = e.presented;
    j["paths_found"] = e.paths_found;
    if (e.chosen_path) j["chosen_path"] = *e.chosen_path;
    j["presented_length"] = e.presented_length;
    if (e.shortest_length) j["shortest_length"] = *e.shortest_length;
    if (e.length_diff) j["length_diff"] = *e.length_diff;
    j["verdict"] = chain_verdict_name(e.verdict);
    j["verdict_reasons"] = e.verdict_reasons;
    j["evaluated_at"] = e.evaluated_at;
    j["hostname_checked"] = e.hostname_checked;
    j["hostname_matched"] = e.hostname_matched;
    return j;
}

ChainEvaluation evaluation_from_json(const json& j) {
    ChainEvaluation e;
    e.leaf = j.at("leaf").get<std::string>();
    e.presented = j.at("presented").get<std::vector<std::string>>();
    e.paths_found = j.value("paths_found", std::vector<std::vector<std::string>>{});
    if (j.contains("chosen_path")) e.chosen_path = j["chosen_path"].get<std::vector<std::string>>();
    e.presented_length = j.at("presented_length").get<int>();
    if (j.contains("shortest_length")) e.shortest_length = j["shortest_length"].get<int>();
    if (j.contains("length_diff")) e.length_diff = j["length_diff"].get<int>();
    std::string verdict = j.at("verdict").get<std::string>();
    for (ChainVerdict v : {ChainVerdict::valid, ChainVerdict::expired, ChainVerdict::unknown_anchor,
                           ChainVerdict::broken_signature, ChainVerdict::name_mismatch,
                           ChainVerdict::incomplete}) {
        if (verdict == chain_verdict_name(v)) e.verdict = v;
    }
    e.verdict_reasons = j.value("verdict_reasons", std::vector<std::string>{});
    e.evaluated_at = j.value("evaluated_at", static_cast<UtcMillis>(0));
    e.hostname_checked = j.value("hostname_checked", false);
    e.hostname_matched = j.value("hostname_matched", false);
    return e;
}

}  // namespace pkiscope::x509
