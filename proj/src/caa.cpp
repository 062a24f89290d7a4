// Copyright 2026 The pkiscope Authors
// SPDX-License-Identifier: Apache-2.0
#include "pkiscope/caa.hpp"

#include <algorithm>
#include <cctype>

#include "pkiscope/common.hpp"
#include "pkiscope/public_suffix.hpp"

namespace pkiscope::dns {

namespace {

bool valid_tag(const std::string& tag) {
    if (tag.empty() || tag.size() > 15) return false;
    return std::all_of(tag.begin(), tag.end(),
                       [](unsigned char c) { return std::isalnum(c) != 0; });
}

// issue/issuewild value grammar: optional issuer domain, optionally followed
// by ";"-separated parameters. An empty value or bare ";" is a valid explicit
// deny. Anything that is not a plain domain name in the issuer slot (URLs,
// mailto:, stray quotes) is unparsable.
bool valid_issue_value(const std::string& value) {
    std::string v = value;
    std::size_t semi = v.find(';');
    std::string domain = (semi == std::string::npos) ? v : v.substr(0, semi);
    auto trim = [](std::string s) {
        std::size_t a = s.find_first_not_of(" \t");
        std::size_t b = s.find_last_not_of(" \t");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    domain = trim(domain);
    if (domain.empty()) return true;
    if (!ingest::is_valid_dns_name(domain)) return false;
    // Parameters after ";" must look like tag=value pairs.
    if (semi != std::string::npos) {
        std::string params = v.substr(semi + 1);
        for (const std::string& part : split(params, ';')) {
            std::string p = trim(part);
            if (p.empty()) continue;
            if (p.find('=') == std::string::npos) return false;
        }
    }
    return true;
}

bool valid_iodef_value(const std::string& value) {
    return value.rfind("mailto:", 0) == 0 || value.rfind("http://", 0) == 0 ||
           value.rfind("https://", 0) == 0;
}

void classify(CaaRecord& rec) {
    if (rec.flags != 0) {
        // The framework implements no critical-flag handling, so any set flag
        // bit makes the record one it does not understand.
        rec.parse_status = CaaParseStatus::reserved_bit;
        return;
    }
    if (!valid_tag(rec.tag)) {
        rec.parse_status = CaaParseStatus::unparsable;
        return;
    }
    if (rec.tag == "issue" || rec.tag == "issuewild") {
        rec.parse_status =
            valid_issue_value(rec.value) ? CaaParseStatus::ok : CaaParseStatus::unparsable;
    } else if (rec.tag == "iodef") {
        rec.parse_status =
            valid_iodef_value(rec.value) ? CaaParseStatus::ok : CaaParseStatus::unparsable;
    } else {
        rec.parse_status = CaaParseStatus::unparsable;
    }
}

}  // namespace

const char* caa_parse_status_name(CaaParseStatus s) {
    switch (s) {
        case CaaParseStatus::ok: return "ok";
        case CaaParseStatus::unparsable: return "unparsable";
        case CaaParseStatus::reserved_bit: return "reserved-bit";
    }
    return "unparsable";
}

std::string CaaRecord::issuer_domain() const {
    std::size_t semi = value.find(';');
    std::string domain = (semi == std::string::npos) ? value : value.substr(0, semi);
    std::size_t a = domain.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = domain.find_last_not_of(" \t");
    return to_lower(domain.substr(a, b - a + 1));
}

CaaRecord parse_caa(std::span<const std::uint8_t> rdata) {
    CaaRecord rec;
    rec.raw.assign(rdata.begin(), rdata.end());
    if (rdata.size() < 2) {
        rec.parse_status = CaaParseStatus::unparsable;
        return rec;
    }
    rec.flags = rdata[0];
    std::size_t tag_len = rdata[1];
    if (2 + tag_len > rdata.size()) {
        rec.parse_status = CaaParseStatus::unparsable;
        return rec;
    }
    rec.tag = to_lower(std::string(reinterpret_cast<const char*>(rdata.data()) + 2, tag_len));
    rec.value.assign(reinterpret_cast<const char*>(rdata.data()) + 2 + tag_len,
                     rdata.size() - 2 - tag_len);
    classify(rec);
    return rec;
}

CaaRecord parse_caa_presentation(const std::string& text) {
    CaaRecord rec;
    rec.raw.assign(text.begin(), text.end());

    // flags SP tag SP value; value may be a quoted string.
    std::size_t pos = 0;
    auto skip_ws = [&] { while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) pos++; };
    auto take_token = [&]() -> std::string {
        std::size_t start = pos;
        while (pos < text.size() && text[pos] != ' ' && text[pos] != '\t') pos++;
        return text.substr(start, pos - start);
    };

    skip_ws();
    std::string flags_text = take_token();
    unsigned long flags = 0;
    try {
        std::size_t used = 0;
        flags = std::stoul(flags_text, &used, 10);
        if (used != flags_text.size() || flags > 255) throw std::invalid_argument("flags");
    } catch (const std::exception&) {
        rec.parse_status = CaaParseStatus::unparsable;
        return rec;
    }
    rec.flags = static_cast<std::uint8_t>(flags);

    skip_ws();
    rec.tag = to_lower(take_token());
    skip_ws();

    std::string value = text.substr(pos);
    while (!value.empty() && (value.back() == ' ' || value.back() == '\t')) value.pop_back();
    if (!value.empty() && value.front() == '"') {
        // Quoted string: must close, no interior unescaped quotes.
        if (value.size() < 2 || value.back() != '"') {
            rec.value = value;
            rec.parse_status = CaaParseStatus::unparsable;
            return rec;
        }
        std::string body = value.substr(1, value.size() - 2);
        if (body.find('"') != std::string::npos) {
            rec.value = value;
            rec.parse_status = CaaParseStatus::unparsable;
            return rec;
        }
        rec.value = body;
    } else {
        if (value.find('"') != std::string::npos) {
            rec.value = value;
            rec.parse_status = CaaParseStatus::unparsable;
            return rec;
        }
        rec.value = value;
    }

    classify(rec);
    return rec;
}

}  // namespace pkiscope::dns
