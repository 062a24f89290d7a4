// Copyright 2026 The pkiscope Authors
// SPDX-License-Identifier: Apache-2.0
#include "pkiscope/public_suffix.hpp"

#include <sstream>

#include "pkiscope/common.hpp"

namespace pkiscope::ingest {

namespace {

bool valid_rule_text(const std::string& rule) {
    if (rule.empty()) return false;
    for (char c : rule) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-')) return false;
    }
    return rule.front() != '.' && rule.back() != '.' && rule.find("..") == std::string::npos;
}

}  // namespace

PublicSuffixTable PublicSuffixTable::parse(const std::string& document, std::string snapshot_date) {
    PublicSuffixTable table;
    table.snapshot_date_ = std::move(snapshot_date);
    std::istringstream in(document);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        // Rules end at the first whitespace per the list format.
        std::size_t ws = line.find_first_of(" \t");
        if (ws != std::string::npos) line.resize(ws);
        if (line.empty() || line.rfind("//", 0) == 0) continue;
        std::string rule = to_lower(line);
        if (rule.rfind("!", 0) == 0) {
            std::string body = rule.substr(1);
            if (!valid_rule_text(body) || split(body, '.').size() < 2)
                throw ParseError("malformed exception rule: " + line, lineno);
            table.exception_.insert(body);
        } else if (rule.rfind("*.", 0) == 0) {
            std::string body = rule.substr(2);
            if (!valid_rule_text(body)) throw ParseError("malformed wildcard rule: " + line, lineno);
            table.wildcard_.insert(body);
        } else {
            if (!valid_rule_text(rule)) throw ParseError("malformed rule: " + line, lineno);
            table.plain_.insert(rule);
        }
    }
    return table;
}

std::string PublicSuffixTable::public_suffix(const std::string& raw) const {
    std::string name = to_lower(raw);
    if (!name.empty() && name.back() == '.') name.pop_back();
    std::vector<std::string> labels = split(name, '.');

    // Exception rules win outright; the matched suffix is the rule minus its
    // leftmost label.
    for (std::size_t i = 0; i < labels.size(); i++) {
        std::string candidate;
        for (std::size_t j = i; j < labels.size(); j++) {
            candidate += (j > i ? "." : "") + labels[j];
        }
        if (exception_.contains(candidate)) {
            std::size_t dot = candidate.find('.');
            return candidate.substr(dot + 1);
        }
    }

    std::string best;
    std::size_t best_labels = 0;
    for (std::size_t i = 0; i < labels.size(); i++) {
        std::string candidate;
        for (std::size_t j = i; j < labels.size(); j++) {
            candidate += (j > i ? "." : "") + labels[j];
        }
        std::size_t n = labels.size() - i;
        if (plain_.contains(candidate) && n > best_labels) {
            best = candidate;
            best_labels = n;
        }
        // "*.ck" matches "x.ck" (suffix = both labels) but never the bare "ck".
        if (i + 1 < labels.size()) {
            std::string tail;
            for (std::size_t j = i + 1; j < labels.size(); j++) {
                tail += (j > i + 1 ? "." : "") + labels[j];
            }
            if (wildcard_.contains(tail) && n > best_labels) {
                best = candidate;
                best_labels = n;
            }
        }
    }
    if (!best.empty()) return best;
    return labels.empty() ? name : labels.back();
}

PublicSuffixTable::EsldResult PublicSuffixTable::esld(const std::string& raw) const {
    std::string name = to_lower(raw);
    if (!name.empty() && name.back() == '.') name.pop_back();
    std::string suffix = public_suffix(name);
    if (name == suffix || name.size() <= suffix.size()) {
        return {name, true};
    }
    // One label in front of the suffix.
    std::string head = name.substr(0, name.size() - suffix.size() - 1);
    std::size_t last_dot = head.rfind('.');
    std::string esld =
        (last_dot == std::string::npos) ? name : head.substr(last_dot + 1) + "." + suffix;
    return {esld, false};
}

bool is_valid_dns_name(const std::string& name) {
    if (name.empty() || name.size() > 253) return false;
    std::vector<std::string> labels = split(name, '.');
    for (std::size_t i = 0; i < labels.size(); i++) {
        const std::string& label = labels[i];
        if (label.empty() || label.size() > 63) return false;
        if (label == "*" && i == 0 && labels.size() > 1) continue;
        for (char c : label) {
            if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_'))
                return false;
        }
    }
    return true;
}

}  // namespace pkiscope::ingest
