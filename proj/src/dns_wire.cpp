// Copyright 2026 The pkiscope Authors
// SPDX-License-Identifier: Apache-2.0
#include "pkiscope/dns_wire.hpp"

#include <cstdio>
#include <cstring>

#include "pkiscope/caa.hpp"
#include "pkiscope/common.hpp"

namespace pkiscope::dns {

namespace {

constexpr std::uint16_t kClassIn = 1;
constexpr std::uint16_t kEdnsUdpSize = 1232;

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    put_u16(out, static_cast<std::uint16_t>(v >> 16));
    put_u16(out, static_cast<std::uint16_t>(v & 0xffff));
}

struct Reader {
    std::span<const std::uint8_t> data;
    std::size_t pos = 0;

    std::uint8_t u8() {
        if (pos >= data.size()) throw ParseError("truncated DNS message", pos);
        return data[pos++];
    }
    std::uint16_t u16() { return static_cast<std::uint16_t>(u8() << 8 | u8()); }
    std::uint32_t u32() {
        std::uint32_t hi = u16();
        return hi << 16 | u16();
    }
    std::span<const std::uint8_t> bytes(std::size_t n) {
        if (pos + n > data.size()) throw ParseError("truncated DNS message", pos);
        auto s = data.subspan(pos, n);
        pos += n;
        return s;
    }
};

// Reads a possibly-compressed name starting at reader.pos.
std::string read_name(Reader& r) {
    std::string name;
    std::size_t jumps = 0;
    std::size_t pos = r.pos;
    bool jumped = false;
    while (true) {
        if (pos >= r.data.size()) throw ParseError("name runs past message end", pos);
        std::uint8_t len = r.data[pos];
        if ((len & 0xc0) == 0xc0) {
            if (pos + 1 >= r.data.size()) throw ParseError("truncated compression pointer", pos);
            std::size_t target = (static_cast<std::size_t>(len & 0x3f) << 8) | r.data[pos + 1];
            if (!jumped) r.pos = pos + 2;
            jumped = true;
            if (++jumps > 64) throw ParseError("compression loop", pos);
            pos = target;
            continue;
        }
        if (len > 63) throw ParseError("bad label length", pos);
        if (len == 0) {
            if (!jumped) r.pos = pos + 1;
            break;
        }
        if (pos + 1 + len > r.data.size()) throw ParseError("label past end", pos);
        if (!name.empty()) name += '.';
        name.append(reinterpret_cast<const char*>(r.data.data()) + pos + 1, len);
        pos += 1 + len;
    }
    return to_lower(name);
}

// Re-encodes rdata so embedded (possibly compressed) names become absolute.
std::vector<std::uint8_t> normalize_rdata(std::uint16_t type, Reader& r, std::size_t rdlen) {
    std::size_t end = r.pos + rdlen;
    std::vector<std::uint8_t> out;
    switch (static_cast<RecordType>(type)) {
        case RecordType::NS: {
            std::string host = read_name(r);
            out = encode_name(host);
            break;
        }
        case RecordType::SOA: {
            std::string mname = read_name(r);
            std::string rname = read_name(r);
            out = encode_name(mname);
            auto rn = encode_name(rname);
            out.insert(out.end(), rn.begin(), rn.end());
            for (int i = 0; i < 5; i++) put_u32(out, r.u32());
            break;
        }
        case RecordType::RRSIG: {
            // type covered(2) alg(1) labels(1) orig ttl(4) exp(4) inc(4) tag(2)
            auto head = r.bytes(18);
            out.assign(head.begin(), head.end());
            std::string signer = read_name(r);
            auto sn = encode_name(signer);
            out.insert(out.end(), sn.begin(), sn.end());
            auto sig = r.bytes(end - r.pos);
            out.insert(out.end(), sig.begin(), sig.end());
            break;
        }
        default: {
            auto raw = r.bytes(rdlen);
            out.assign(raw.begin(), raw.end());
            break;
        }
    }
    if (r.pos != end) throw ParseError("rdata length mismatch", r.pos);
    return out;
}

WireRecord read_record(Reader& r, bool* is_opt, DnsMessage& msg) {
    WireRecord rec;
    rec.name = read_name(r);
    rec.type = r.u16();
    std::uint16_t rclass = r.u16();
    rec.ttl = r.u32();
    std::uint16_t rdlen = r.u16();
    if (rec.type == static_cast<std::uint16_t>(RecordType::OPT)) {
        *is_opt = true;
        msg.edns = true;
        msg.dnssec_ok = (rec.ttl & 0x8000) != 0;
        r.bytes(rdlen);
        return rec;
    }
    (void)rclass;
    *is_opt = false;
    rec.rdata = normalize_rdata(rec.type, r, rdlen);
    return rec;
}

}  // namespace

const char* record_type_name(std::uint16_t type) {
    switch (static_cast<RecordType>(type)) {
        case RecordType::A: return "A";
        case RecordType::NS: return "NS";
        case RecordType::SOA: return "SOA";
        case RecordType::AAAA: return "AAAA";
        case RecordType::OPT: return "OPT";
        case RecordType::RRSIG: return "RRSIG";
        case RecordType::TLSA: return "TLSA";
        case RecordType::CAA: return "CAA";
    }
    return "TYPE?";
}

std::optional<RecordType> record_type_from_name(const std::string& name) {
    if (name == "A") return RecordType::A;
    if (name == "NS") return RecordType::NS;
    if (name == "SOA") return RecordType::SOA;
    if (name == "AAAA") return RecordType::AAAA;
    if (name == "RRSIG") return RecordType::RRSIG;
    if (name == "TLSA") return RecordType::TLSA;
    if (name == "CAA") return RecordType::CAA;
    return std::nullopt;
}

std::vector<std::uint8_t> encode_name(const std::string& name) {
    std::vector<std::uint8_t> out;
    if (!name.empty() && name != ".") {
        for (const std::string& label : split(name, '.')) {
            if (label.empty() || label.size() > 63) throw ParseError("bad label: " + name, 0);
            out.push_back(static_cast<std::uint8_t>(label.size()));
            out.insert(out.end(), label.begin(), label.end());
        }
    }
    out.push_back(0);
    return out;
}

std::vector<std::uint8_t> encode_query(std::uint16_t id, const std::string& qname,
                                       std::uint16_t qtype, bool dnssec_ok) {
    std::vector<std::uint8_t> out;
    put_u16(out, id);
    put_u16(out, 0x0100);  // RD
    put_u16(out, 1);       // QDCOUNT
    put_u16(out, 0);
    put_u16(out, 0);
    put_u16(out, 1);  // ARCOUNT (OPT)
    auto qn = encode_name(to_lower(qname));
    out.insert(out.end(), qn.begin(), qn.end());
    put_u16(out, qtype);
    put_u16(out, kClassIn);
    // EDNS0 OPT pseudo-record.
    out.push_back(0);  // root name
    put_u16(out, static_cast<std::uint16_t>(RecordType::OPT));
    put_u16(out, kEdnsUdpSize);
    put_u32(out, dnssec_ok ? 0x8000 : 0);  // extended rcode/version/flags (DO)
    put_u16(out, 0);                       // no options
    return out;
}

std::vector<std::uint8_t> encode_message(const DnsMessage& msg) {
    std::vector<std::uint8_t> out;
    put_u16(out, msg.id);
    std::uint16_t flags = 0;
    if (msg.qr) flags |= 0x8000;
    if (msg.aa) flags |= 0x0400;
    if (msg.tc) flags |= 0x0200;
    if (msg.rd) flags |= 0x0100;
    if (msg.ra) flags |= 0x0080;
    flags |= static_cast<std::uint16_t>(msg.rcode) & 0xf;
    put_u16(out, flags);
    put_u16(out, static_cast<std::uint16_t>(msg.questions.size()));
    put_u16(out, static_cast<std::uint16_t>(msg.answers.size()));
    put_u16(out, static_cast<std::uint16_t>(msg.authority.size()));
    put_u16(out, static_cast<std::uint16_t>(msg.additional.size() + (msg.edns ? 1 : 0)));
    for (const auto& q : msg.questions) {
        auto qn = encode_name(q.qname);
        out.insert(out.end(), qn.begin(), qn.end());
        put_u16(out, q.qtype);
        put_u16(out, kClassIn);
    }
    auto write_rr = [&](const WireRecord& rec) {
        auto n = encode_name(rec.name);
        out.insert(out.end(), n.begin(), n.end());
        put_u16(out, rec.type);
        put_u16(out, kClassIn);
        put_u32(out, rec.ttl);
        put_u16(out, static_cast<std::uint16_t>(rec.rdata.size()));
        out.insert(out.end(), rec.rdata.begin(), rec.rdata.end());
    };
    for (const auto& rec : msg.answers) write_rr(rec);
    for (const auto& rec : msg.authority) write_rr(rec);
    for (const auto& rec : msg.additional) write_rr(rec);
    if (msg.edns) {
        out.push_back(0);
        put_u16(out, static_cast<std::uint16_t>(RecordType::OPT));
        put_u16(out, kEdnsUdpSize);
        put_u32(out, msg.dnssec_ok ? 0x8000 : 0);
        put_u16(out, 0);
    }
    return out;
}

DnsMessage decode_message(std::span<const std::uint8_t> wire) {
    Reader r{wire};
    DnsMessage msg;
    msg.id = r.u16();
    std::uint16_t flags = r.u16();
    msg.qr = flags & 0x8000;
    msg.aa = flags & 0x0400;
    msg.tc = flags & 0x0200;
    msg.rd = flags & 0x0100;
    msg.ra = flags & 0x0080;
    msg.rcode = static_cast<Rcode>(flags & 0xf);
    std::uint16_t qd = r.u16(), an = r.u16(), ns = r.u16(), ar = r.u16();
    for (int i = 0; i < qd; i++) {
        Question q;
        q.qname = read_name(r);
        q.qtype = r.u16();
        r.u16();  // class
        msg.questions.push_back(std::move(q));
    }
    auto read_section = [&](std::vector<WireRecord>& section, int count) {
        for (int i = 0; i < count; i++) {
            bool is_opt = false;
            WireRecord rec = read_record(r, &is_opt, msg);
            if (!is_opt) section.push_back(std::move(rec));
        }
    };
    read_section(msg.answers, an);
    read_section(msg.authority, ns);
    read_section(msg.additional, ar);
    return msg;
}

std::string parse_a_rdata(std::span<const std::uint8_t> rdata) {
    if (rdata.size() != 4) throw ParseError("A rdata must be 4 bytes", 0);
    char buf[20];
    std::snprintf(buf, sizeof buf, "%u.%u.%u.%u", rdata[0], rdata[1], rdata[2], rdata[3]);
    return buf;
}

std::string parse_aaaa_rdata(std::span<const std::uint8_t> rdata) {
    if (rdata.size() != 16) throw ParseError("AAAA rdata must be 16 bytes", 0);
    std::string out;
    char buf[8];
    for (int i = 0; i < 16; i += 2) {
        std::snprintf(buf, sizeof buf, "%x", (rdata[i] << 8) | rdata[i + 1]);
        if (i > 0) out += ':';
        out += buf;
    }
    return out;
}

std::string parse_name_rdata(std::span<const std::uint8_t> rdata) {
    Reader r{rdata};
    return read_name(r);
}

SoaData parse_soa_rdata(std::span<const std::uint8_t> rdata) {
    Reader r{rdata};
    SoaData soa;
    soa.mname = read_name(r);
    soa.rname = read_name(r);
    soa.serial = r.u32();
    soa.refresh = r.u32();
    soa.retry = r.u32();
    soa.expire = r.u32();
    soa.minimum = r.u32();
    return soa;
}

TlsaData parse_tlsa_rdata(std::span<const std::uint8_t> rdata) {
    Reader r{rdata};
    TlsaData tlsa;
    tlsa.usage = r.u8();
    tlsa.selector = r.u8();
    tlsa.matching_type = r.u8();
    auto rest = r.bytes(rdata.size() - 3);
    tlsa.association.assign(rest.begin(), rest.end());
    return tlsa;
}

RrsigData parse_rrsig_rdata(std::span<const std::uint8_t> rdata) {
    Reader r{rdata};
    RrsigData sig;
    sig.type_covered = r.u16();
    r.u8();   // algorithm
    r.u8();   // labels
    r.u32();  // original ttl
    sig.expiration_ms = static_cast<std::int64_t>(r.u32()) * 1000;
    sig.inception_ms = static_cast<std::int64_t>(r.u32()) * 1000;
    r.u16();  // key tag
    sig.signer = read_name(r);
    return sig;
}

std::string present_record(const WireRecord& rec) {
    std::string rd;
    switch (static_cast<RecordType>(rec.type)) {
        case RecordType::A: rd = parse_a_rdata(rec.rdata); break;
        case RecordType::AAAA: rd = parse_aaaa_rdata(rec.rdata); break;
        case RecordType::NS: rd = parse_name_rdata(rec.rdata); break;
        case RecordType::SOA: {
            SoaData soa = parse_soa_rdata(rec.rdata);
            rd = soa.mname + " " + soa.rname + " " + std::to_string(soa.serial) + " " +
                 std::to_string(soa.refresh) + " " + std::to_string(soa.retry) + " " +
                 std::to_string(soa.expire) + " " + std::to_string(soa.minimum);
            break;
        }
        case RecordType::TLSA: {
            TlsaData tlsa = parse_tlsa_rdata(rec.rdata);
            rd = std::to_string(tlsa.usage) + " " + std::to_string(tlsa.selector) + " " +
                 std::to_string(tlsa.matching_type) + " " + to_hex(tlsa.association);
            break;
        }
        case RecordType::CAA: {
            CaaRecord caa = parse_caa(rec.rdata);
            rd = std::to_string(caa.flags) + " " + caa.tag + " \"" + caa.value + "\"";
            break;
        }
        default: rd = to_hex(rec.rdata); break;
    }
    return rec.name + " " + std::to_string(rec.ttl) + " IN " +
           record_type_name(rec.type) + " " + rd;
}

}  // namespace pkiscope::dns
