/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The ulsched authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "ulsched/mac_sched.hpp"
#include "ulsched/phy_model.hpp"
#include "ulsched/traffic.hpp"

#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ulsched {

inline constexpr UserId kUavUser = 1;
inline constexpr UserId kBackgroundUser = 2;

/// MAC/RLC header model: a fixed cost per transport block plus one per
/// message or message fragment packed into it.
struct HeaderOverheads {
    int per_grant_bytes = 0;
    int per_segment_bytes = 0;
};

struct DrainResult;

struct Segment {
    Message message;
    std::int64_t remaining_bytes = 0;
};

/// One UE: FIFO of pending message segments plus either a persistent flow or
/// the default SR/BSR pipeline.
class UeState {
public:
    explicit UeState(UserId id) : user_id_(id) {}

    UserId user_id() const noexcept { return user_id_; }

    void enqueue(const Message& m);
    std::int64_t buffered_bytes() const noexcept { return buffered_; }
    /// Recomputes the total from the segments; equals buffered_bytes() unless
    /// the bookkeeping is broken.
    std::int64_t recount_bytes() const;

    std::deque<Segment>& buffer() noexcept { return buffer_; }
    const std::deque<Segment>& buffer() const noexcept { return buffer_; }

    std::optional<SignalingPipeline> signaling;
    std::optional<PersistentFlowConfig> flow;

private:
    friend DrainResult drain_grant(UeState&, const SubframeGrant&, const HeaderOverheads&);
    UserId user_id_;
    std::deque<Segment> buffer_;
    std::int64_t buffered_ = 0;
};

struct DrainResult {
    std::int64_t bytes_carried = 0; ///< message bytes, headers excluded
    std::vector<Message> completed; ///< messages whose last byte went out
};

/// Packs the UE buffer front to back into `grant`. The per-grant header is
/// charged once; each packed segment pays the per-segment header and carries
/// at least one byte. A message that does not fit is split and its tail stays
/// at the front of the buffer. Unused capacity is lost.
DrainResult drain_grant(UeState& ue, const SubframeGrant& grant, const HeaderOverheads& overheads);

struct DelayRecord {
    std::int64_t seq = 0;
    int type_id = 0;
    double arrival_time_ms = 0.0;
    double delivery_time_ms = 0.0;
    double delay_ms = 0.0;

    friend bool operator==(const DelayRecord&, const DelayRecord&) = default;
};

struct SimConfig {
    CellConfig cell{};
    SignalingConfig signaling{};
    /// Empty: the UAV goes through the default SR/BSR pipeline instead.
    std::optional<PersistentFlowConfig> flow = PersistentFlowConfig{};
    std::int64_t duration_ms = 900'000;
    std::int64_t warmup_ms = 10'000;
    HeaderOverheads overheads{};
    std::uint64_t seed = 0;
    bool background = true;
    /// Overrides the synthetic default_profile(seed).
    std::optional<TelemetryProfile> profile;
    int message_overhead_bytes = kDefaultMessageOverheadBytes;
    double jitter_ms = 0.0;
    /// Check buffer accounting and byte conservation after every subframe.
    bool verify_invariants = false;

    void validate() const;
};

struct RunCounters {
    std::int64_t subframes = 0;
    std::int64_t injected_bytes = 0;
    std::int64_t carried_bytes = 0;
    std::int64_t buffered_bytes = 0;
    std::int64_t persistent_grants = 0;
    std::int64_t persistent_prbs = 0;
    std::int64_t background_prbs = 0;
    std::int64_t wasted_grant_bytes = 0;
    std::int64_t messages_injected = 0;
    std::int64_t messages_delivered = 0;
};

struct RunResult {
    std::vector<DelayRecord> records;
    RunCounters counters;
};

/// Optional per-subframe observer: sees every grant issued in subframe `issued_at`.
using GrantObserver = std::function<void(Subframe issued_at, std::span<const SubframeGrant> grants)>;

/// Simulates cfg.duration_ms subframes of one UAV and an optional full-buffer
/// background UE and returns the UAV's per-message delays.
///
/// Per subframe s: signaling state advances, telemetry arriving in [s, s+1) is
/// queued, the scheduler issues grants for s + grant_advance and each UE packs
/// its grant immediately. A message whose last byte rides a grant for subframe
/// t is delivered at t + 1 + processing_delay; only deliveries at or after
/// warmup are recorded. Configuration errors are thrown before subframe 0.
RunResult run_detailed(const SimConfig& cfg, const TbsTable& table = default_tbs_table(),
                       const GrantObserver& observer = {});
std::vector<DelayRecord> run(const SimConfig& cfg, const TbsTable& table = default_tbs_table());

/// One `seq type_id arrival_ms delivery_ms delay_ms` line per record.
void write_trace(std::ostream& out, std::span<const DelayRecord> records);
void write_trace(const std::string& path, std::span<const DelayRecord> records);

} // namespace ulsched
