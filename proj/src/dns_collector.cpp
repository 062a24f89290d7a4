// Copyright 2026 The pkiscope Authors
// SPDX-License-Identifier: Apache-2.0
#include "pkiscope/dns_collector.hpp"

#include <random>

namespace pkiscope::dns {

using nlohmann::json;

const char* resolution_status_name(ResolutionStatus s) {
    switch (s) {
        case ResolutionStatus::resolved: return "resolved";
        case ResolutionStatus::nxdomain: return "nxdomain";
        case ResolutionStatus::timeout: return "timeout";
        case ResolutionStatus::servfail: return "servfail";
    }
    return "timeout";
}

const char* reachability_class_name(ReachabilityClass c) {
    switch (c) {
        case ReachabilityClass::usable: return "usable";
        case ReachabilityClass::unresolved: return "unresolved";
        case ReachabilityClass::transient_failure: return "transient-failure";
    }
    return "unresolved";
}

std::vector<std::string> DnsSnapshot::addresses() const {
    std::vector<std::string> out;
    if (auto it = records.find("A"); it != records.end()) {
        for (const auto& rec : it->second) out.push_back(parse_a_rdata(rec.rdata));
    }
    if (auto it = records.find("AAAA"); it != records.end()) {
        for (const auto& rec : it->second) out.push_back(parse_aaaa_rdata(rec.rdata));
    }
    return out;
}

std::vector<CaaRecord> DnsSnapshot::caa_records() const {
    std::vector<CaaRecord> out;
    if (auto it = records.find("CAA"); it != records.end()) {
        for (const auto& rec : it->second) out.push_back(parse_caa(rec.rdata));
    }
    return out;
}

std::vector<TlsaData> DnsSnapshot::tlsa_records() const {
    std::vector<TlsaData> out;
    if (auto it = records.find("TLSA"); it != records.end()) {
        for (const auto& rec : it->second) out.push_back(parse_tlsa_rdata(rec.rdata));
    }
    return out;
}

namespace {

enum class QueryOutcome { answered, nxdomain, nodata, servfail, timeout };

struct QueryResult {
    QueryOutcome outcome = QueryOutcome::timeout;
    std::vector<WireRecord> matching;  // answers of the queried type
    std::vector<WireRecord> rrsigs;    // covering RRSIGs, when present
};

std::uint16_t fresh_query_id() {
    static thread_local std::mt19937 rng(std::random_device{}());
    return static_cast<std::uint16_t>(rng() & 0xffff);
}

std::optional<DnsMessage> dns_exchange(const ResolverConfig& cfg,
                                   std::span<const std::uint8_t> query) {
    auto reply = net::udp_exchange(cfg.address, cfg.port, query, cfg.timeout, 4096);
    if (!reply) return std::nullopt;
    DnsMessage msg = decode_message(*reply);
    if (!msg.tc) return msg;
    // Truncated: retry over TCP with a 2-byte length prefix.
    net::Fd fd;
    if (net::tcp_connect(cfg.address, cfg.port, cfg.timeout, &fd) != net::ConnectResult::ok)
        return std::nullopt;
    std::vector<std::uint8_t> framed;
    framed.push_back(static_cast<std::uint8_t>(query.size() >> 8));
    framed.push_back(static_cast<std::uint8_t>(query.size() & 0xff));
    framed.insert(framed.end(), query.begin(), query.end());
    if (!net::send_all(fd.get(), framed)) return std::nullopt;
    std::uint8_t lenbuf[2];
    if (net::recv_some(fd.get(), lenbuf, 2, cfg.timeout) != 2) return std::nullopt;
    std::size_t want = (static_cast<std::size_t>(lenbuf[0]) << 8) | lenbuf[1];
    std::vector<std::uint8_t> body(want);
    std::size_t got = 0;
    while (got < want) {
        int n = net::recv_some(fd.get(), body.data() + got, want - got, cfg.timeout);
        if (n <= 0) return std::nullopt;
        got += static_cast<std::size_t>(n);
    }
    return decode_message(body);
}

QueryResult run_query(const ResolverConfig& cfg, const std::string& owner, RecordType type) {
    QueryResult result;
    std::uint16_t id = fresh_query_id();
    auto query = encode_query(id, owner, static_cast<std::uint16_t>(type), cfg.dnssec_ok);
    std::optional<DnsMessage> reply;
    try {
        reply = dns_exchange(cfg, query);
    } catch (const ParseError&) {
        reply = std::nullopt;
    }
    if (!reply || reply->id != id) {
        result.outcome = QueryOutcome::timeout;
        return result;
    }
    if (reply->rcode == Rcode::servfail) {
        result.outcome = QueryOutcome::servfail;
        return result;
    }
    if (reply->rcode == Rcode::nxdomain) {
        result.outcome = QueryOutcome::nxdomain;
        return result;
    }
    for (auto& rec : reply->answers) {
        if (rec.type == static_cast<std::uint16_t>(type)) {
            result.matching.push_back(std::move(rec));
        } else if (rec.type == static_cast<std::uint16_t>(RecordType::RRSIG)) {
            RrsigData sig = parse_rrsig_rdata(rec.rdata);
            if (sig.type_covered == static_cast<std::uint16_t>(type))
                result.rrsigs.push_back(std::move(rec));
        }
    }
    result.outcome = result.matching.empty() ? QueryOutcome::nodata : QueryOutcome::answered;
    return result;
}

}  // namespace

DnsSnapshot collect_snapshot(const std::string& target, const std::set<RecordType>& types,
                             const ResolverConfig& resolver) {
    DnsSnapshot snapshot;
    snapshot.target = to_lower(target);
    snapshot.resolver = resolver.address + ":" + std::to_string(resolver.port);
    snapshot.collected_at = now_utc_millis();

    std::set<RecordType> all = types;
    all.insert(RecordType::A);  // address resolution governs the status

    bool any_timeout = false;
    bool any_records = false;
    QueryOutcome address_outcome = QueryOutcome::timeout;

    for (RecordType type : all) {
        std::string owner = snapshot.target;
        if (type == RecordType::TLSA)
            owner = "_" + std::to_string(resolver.tlsa_port) + "._tcp." + snapshot.target;
        QueryResult qr = run_query(resolver, owner, type);
        if (type == RecordType::A) address_outcome = qr.outcome;
        if (qr.outcome == QueryOutcome::timeout) {
            any_timeout = true;
            continue;
        }
        if (!qr.matching.empty()) {
            any_records = true;
            auto& bucket = snapshot.records[record_type_name(static_cast<std::uint16_t>(type))];
            for (auto& rec : qr.matching) bucket.push_back(std::move(rec));
        }
        if (!qr.rrsigs.empty()) {
            RrsigData sig = parse_rrsig_rdata(qr.rrsigs.front().rdata);
            snapshot.rrsig_windows[record_type_name(static_cast<std::uint16_t>(type))] = {
                sig.inception_ms, sig.expiration_ms};
        }
    }

    bool address_present = !snapshot.addresses().empty();
    if (any_timeout) {
        snapshot.resolution_status = ResolutionStatus::timeout;
        snapshot.partial = any_records;
    } else if (address_outcome == QueryOutcome::servfail) {
        snapshot.resolution_status = ResolutionStatus::servfail;
        snapshot.partial = any_records;
    } else if (address_present) {
        snapshot.resolution_status = ResolutionStatus::resolved;
    } else {
        snapshot.resolution_status = ResolutionStatus::nxdomain;
        snapshot.partial = any_records;
    }
    return snapshot;
}

ReachabilityClass classify_resolution(const DnsSnapshot& snapshot) {
    switch (snapshot.resolution_status) {
        case ResolutionStatus::resolved: return ReachabilityClass::usable;
        case ResolutionStatus::nxdomain: return ReachabilityClass::unresolved;
        case ResolutionStatus::timeout:
        case ResolutionStatus::servfail: return ReachabilityClass::transient_failure;
    }
    return ReachabilityClass::unresolved;
}

json snapshot_to_json(const DnsSnapshot& snapshot) {
    json j;
    j["target"] = snapshot.target;
    j["resolver"] = snapshot.resolver;
    j["collected_at"] = snapshot.collected_at;
    j["resolution_status"] = resolution_status_name(snapshot.resolution_status);
    j["partial"] = snapshot.partial;
    json records = json::object();
    for (const auto& [type, recs] : snapshot.records) {
        json arr = json::array();
        for (const auto& rec : recs) {
            arr.push_back({{"name", rec.name},
                           {"type", rec.type},
                           {"ttl", rec.ttl},
                           {"rdata", base64_encode(rec.rdata)}});
        }
        records[type] = arr;
    }
    j["records"] = records;
    json windows = json::object();
    for (const auto& [type, w] : snapshot.rrsig_windows) {
        windows[type] = {{"inception", w.inception}, {"expiration", w.expiration}};
    }
    j["rrsig_windows"] = windows;
    return j;
}

DnsSnapshot snapshot_from_json(const json& j) {
    DnsSnapshot snapshot;
    snapshot.target = j.at("target").get<std::string>();
    snapshot.resolver = j.value("resolver", "");
    snapshot.collected_at = j.at("collected_at").get<UtcMillis>();
    std::string status = j.at("resolution_status").get<std::string>();
    if (status == "resolved") snapshot.resolution_status = ResolutionStatus::resolved;
    else if (status == "nxdomain") snapshot.resolution_status = ResolutionStatus::nxdomain;
    else if (status == "servfail") snapshot.resolution_status = ResolutionStatus::servfail;
    else snapshot.resolution_status = ResolutionStatus::timeout;
    snapshot.partial = j.value("partial", false);
    if (j.contains("records")) {
        for (const auto& [type, arr] : j["records"].items()) {
            for (const auto& rec_json : arr) {
                WireRecord rec;
                rec.name = rec_json.at("name").get<std::string>();
                rec.type = rec_json.at("type").get<std::uint16_t>();
                rec.ttl = rec_json.at("ttl").get<std::uint32_t>();
                rec.rdata = base64_decode(rec_json.at("rdata").get<std::string>());
                snapshot.records[type].push_back(std::move(rec));
            }
        }
    }
    if (j.contains("rrsig_windows")) {
        for (const auto& [type, w] : j["rrsig_windows"].items()) {
            snapshot.rrsig_windows[type] = {w.at("inception").get<UtcMillis>(),
                                            w.at("expiration").get<UtcMillis>()};
        }
    }
    return snapshot;
}

}  // namespace pkiscope::dns
