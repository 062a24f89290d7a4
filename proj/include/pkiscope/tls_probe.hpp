// Copyright 2026 The pkiscope Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "pkiscope/common.hpp"
#include "pkiscope/net.hpp"

struct ssl_st;
struct ssl_ctx_st;

namespace pkiscope::tls {

enum class TlsVersion { v1_2, v1_3 };

enum class CipherPolicy { default_policy, legacy_inclusive, named_list };

/// Client-side session material captured from one handshake, replayable
/// against the same or another host. opaque_state is the serialized session.
struct SessionState {
    std::string kind;  // "ticket" | "session-id"
    std::vector<std::uint8_t> opaque_state;
    UtcMillis issued_at = 0;
    long lifetime_hint_s = 0;
    std::string origin_host;
};

/// Full description of the ClientHello the probe offers. Every field is set
/// explicitly so platform library defaults never leak into measurements.
struct ProbeConfig {
    std::optional<std::string> sni;  // absent = no SNI extension at all
    std::set<TlsVersion> versions_offered{TlsVersion::v1_2, TlsVersion::v1_3};
    std::vector<std::string> alpn;
    CipherPolicy cipher_policy = CipherPolicy::default_policy;
    std::vector<std::string> named_ciphers;  // for CipherPolicy::named_list
    bool request_stapled_ocsp = false;
    std::optional<SessionState> session_in;
    bool capture_timing = false;
    /// Named sweep-settings variant: flip a bit inside the threaded session
    /// ticket before offering it. Acceptance of a mutated ticket is recorded,
    /// never exploited further.
    bool mutate_session = false;
};

enum class ProbeOutcomeKind { established, alert, timeout, protocol_error };

const char* probe_outcome_kind_name(ProbeOutcomeKind k);

struct ProbeOutcome {
    ProbeOutcomeKind kind = ProbeOutcomeKind::protocol_error;
    int alert_code = -1;  // wire alert description byte, unmapped
    std::string diagnostic;
};

struct Negotiated {
    std::string version;
    std::uint16_t cipher_id = 0;
    std::string cipher_name;
    std::vector<std::string> extensions_seen;
    std::optional<std::string> alpn_selected;
};

struct Endpoint {
    std::string host;
    std::string address;
    std::uint16_t port = 443;
};

struct StapleInfo {
    std::vector<std::uint8_t> raw;
    std::optional<UtcMillis> this_update;
    std::optional<UtcMillis> next_update;
};

struct TlsObservation {
    Endpoint endpoint;
    ProbeConfig config_used;
    UtcMillis started_at = 0;
    ProbeOutcome outcome;
    std::optional<Negotiated> negotiated;
    std::vector<std::vector<std::uint8_t>> chain_presented;  // DER, as served
    std::optional<StapleInfo> stapled_ocsp;
    std::optional<SessionState> session_out;
    bool resumed = false;
    long handshake_ms = -1;

    bool established() const { return outcome.kind == ProbeOutcomeKind::established; }
};

/// One full handshake per config; the connection is closed after capture.
TlsObservation handshake(const Endpoint& endpoint, const ProbeConfig& config,
                         net::Millis timeout);

/// An established connection for callers that speak an application protocol
/// afterwards (the redirect resolver). Exposes the observation captured at
/// handshake time.
class TlsConnection {
public:
    TlsConnection();
    ~TlsConnection();
    TlsConnection(TlsConnection&&) noexcept;
    TlsConnection& operator=(TlsConnection&&) noexcept;
    TlsConnection(const TlsConnection&) = delete;
    TlsConnection& operator=(const TlsConnection&) = delete;

    bool valid() const;
    const TlsObservation& observation() const;

    bool write_all(std::span<const std::uint8_t> data);
    /// Reads up to buf.size() bytes; 0 on close, -1 on timeout/error.
    int read_some(std::span<std::uint8_t> buf, net::Millis timeout);
    /// Drives ticket processing after application data is done, then updates
    /// the observation's session_out.
    void harvest_session(net::Millis wait);
    void shutdown();

private:
    friend TlsConnection open_connection(const Endpoint&, const ProbeConfig&, net::Millis);
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

TlsConnection open_connection(const Endpoint& endpoint, const ProbeConfig& config,
                              net::Millis timeout);

// ---- Stateful measurement modes ------------------------------------------

enum class StatefulMode { repeat_same, sweep_settings, cross_host_same, cross_host_sweep };

const char* stateful_mode_name(StatefulMode m);

struct StatefulPlan {
    StatefulMode mode = StatefulMode::repeat_same;
    int count = 2;                     // repeat-same; must be >= 2
    std::vector<ProbeConfig> configs;  // sweep modes
    std::vector<Endpoint> hosts;       // cross-host modes
    net::Millis inter_probe_delay{0};
};

struct StatefulRunResult {
    std::vector<TlsObservation> observations;
    std::optional<std::string> truncated_reason;
};

/// Executes the plan strictly sequentially, threading session state where the
/// mode requires it. A broken dependency chain (no ticket to replay in a
/// cross-host mode) truncates the run with a stated reason; individual failed
/// probes are recorded in sequence and do not stop the plan.
StatefulRunResult run_stateful_plan(const Endpoint& primary, const StatefulPlan& plan,
                                    const ProbeConfig& base, net::Millis timeout);

SessionState mutate_ticket(const SessionState& session);

nlohmann::json observation_to_json(const TlsObservation& obs);
TlsObservation observation_from_json(const nlohmann::json& j);
nlohmann::json probe_config_to_json(const ProbeConfig& config);
ProbeConfig probe_config_from_json(const nlohmann::json& j);

}  // namespace pkiscope::tls
