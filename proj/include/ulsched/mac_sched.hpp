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

#include "ulsched/phy_model.hpp"

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace ulsched {

using UserId = std::uint32_t;
using Subframe = std::int64_t;

/// Overprovisioning factor alpha >= 1, held as an exact fixed-point ratio with a
/// 1e-9 denominator. Construction from a double rounds half-up at the ninth
/// decimal so that 1.5 and 2.0 are exact and grant sizing never depends on
/// floating-point comparisons.
class ProvisioningFactor {
public:
    static constexpr std::int64_t kScale = 1'000'000'000;

    ProvisioningFactor() = default;
    explicit ProvisioningFactor(double alpha);
    static ProvisioningFactor from_ratio(std::int64_t numerator, std::int64_t denominator);

    std::int64_t scaled() const noexcept { return scaled_; }
    double value() const noexcept { return static_cast<double>(scaled_) / kScale; }

    friend bool operator==(const ProvisioningFactor&, const ProvisioningFactor&) = default;

private:
    std::int64_t scaled_ = kScale;
};

struct PersistentFlowConfig {
    std::int64_t mean_rate_bps = 19'500;
    int period_subframes = 1;
    ProvisioningFactor provisioning_factor{};
    int phase_offset = 0;

    void validate() const;
};

enum class GrantKind { persistent, best_effort, bsr_opportunity };
std::string_view to_string(GrantKind kind);

/// One uplink assignment: `user_id` may transmit `tbs_bits` on `prb_count` PRBs
/// in `subframe`.
struct SubframeGrant {
    UserId user_id = 0;
    Subframe subframe = 0;
    int prb_count = 0;
    std::int64_t tbs_bits = 0;
    GrantKind kind = GrantKind::best_effort;

    friend bool operator==(const SubframeGrant&, const SubframeGrant&) = default;
};

/// SR/BSR timing. Grants issued in subframe s are usable in s + grant_advance;
/// an uplink transmission in subframe t is acted on by the eNB from subframe
/// t + 1 + processing_delay.
struct SignalingConfig {
    int sr_period_subframes = 10;
    int grant_advance_subframes = 4;
    int processing_delay_subframes = 2;

    void validate() const;
};

/// Smallest n with tbs(n, m) >= r * p * alpha / 1000, using exact integer
/// arithmetic. Throws InfeasibleAllocation if even `max_prbs` falls short.
int grant_size(const TbsTable& table, std::int64_t mean_rate_bps, int period_subframes,
               ProvisioningFactor alpha, int mcs_index, int max_prbs = kMaxPrbs);
inline int grant_size(std::int64_t mean_rate_bps, int period_subframes, ProvisioningFactor alpha,
                      int mcs_index, int max_prbs = kMaxPrbs) {
    return grant_size(default_tbs_table(), mean_rate_bps, period_subframes, alpha, mcs_index,
                      max_prbs);
}

/// Persistent users a cell of `cell_prbs` can carry with n-PRB grants every p
/// subframes: floor(N / n) * p, zero when n > N.
std::int64_t supported_users(int cell_prbs, int grant_prbs, int period_subframes);

/// Chooses a phase offset per flow so that the per-subframe sum of persistent
/// PRBs stays within the cell. Flows are placed greedily on the least loaded
/// residue, which spreads identical flows round-robin over [0, p). Incoming
/// `phase_offset` fields are ignored. Throws OversubscriptionError naming the
/// worst subframe when no placement fits.
std::vector<int> assign_phase_offsets(const TbsTable& table,
                                      std::span<const PersistentFlowConfig> flows,
                                      const CellConfig& cell);

struct BufferReport {
    UserId user_id = 0;
    std::int64_t bytes = 0;
};

/// eNB uplink scheduler for one cell.
///
/// Persistent flows are sized and capacity-checked once at construction. Each
/// call to schedule_subframe() then fills one subframe in strict priority
/// order: persistent grants that fall due, one-PRB BSR opportunities (by user
/// id), and finally best-effort grants by reported buffer, largest first with
/// ties to the lower user id, each sized to drain its report or take what is
/// left.
class UplinkScheduler {
public:
    struct PersistentUser {
        UserId user_id;
        PersistentFlowConfig flow;
        int prb_count;
        std::int64_t tbs_bits;
    };

    UplinkScheduler(const TbsTable& table, CellConfig cell,
                    std::vector<std::pair<UserId, PersistentFlowConfig>> flows);

    std::vector<SubframeGrant> schedule_subframe(Subframe sf, std::span<const BufferReport> pending,
                                                 std::span<const UserId> bsr_requests) const;

    /// PRBs needed for a grant to carry `bytes`, capped at the cell bandwidth.
    int prbs_for_bytes(std::int64_t bytes) const;

    const CellConfig& cell() const noexcept { return cell_; }
    const std::vector<PersistentUser>& persistent_users() const noexcept { return persistent_; }
    std::int64_t tbs_bits(int prb_count) const { return tbs_by_prbs_.at(static_cast<std::size_t>(prb_count)); }

private:
    CellConfig cell_;
    std::vector<PersistentUser> persistent_;
    std::vector<std::int64_t> tbs_by_prbs_; // index 0 unused
};

/// Throws OversubscriptionError if the summed persistent PRBs exceed
/// `cell_prbs` in any subframe of the hyperperiod.
void check_persistent_capacity(std::span<const UplinkScheduler::PersistentUser> users,
                               int cell_prbs);

struct SignalingActions {
    bool sr_sent = false;
    bool sr_received = false;
    bool bsr_received = false;
    bool wants_bsr_grant = false;
    std::int64_t reported_bytes = 0;

    bool any() const noexcept {
        return sr_sent || sr_received || bsr_received || wants_bsr_grant || reported_bytes > 0;
    }
};

/// The default request/report pipeline for one best-effort UE, both ends.
///
/// Pending data with nothing reported triggers an SR at the next opportunity
/// ((sf - sr_phase) mod sr_period == 0). The eNB answers a decoded SR with a
/// one-PRB BSR opportunity; the BSR it carries reports the exact buffer and
/// turns into data grants once decoded. Every data grant piggybacks a fresh
/// report of what is left. Reports are net of grants issued after they were
/// taken, so the eNB never double-books data already in flight.
class SignalingPipeline {
public:
    SignalingPipeline(SignalingConfig cfg, int sr_phase);

    /// Start-of-subframe update. `buffered_bytes` excludes data that arrives
    /// during `sf` itself.
    SignalingActions step(Subframe sf, std::int64_t buffered_bytes);

    /// The scheduler issued `grant` in subframe `issued_at`; the UE packed it and
    /// still holds `buffered_after` bytes.
    void on_grant(const SubframeGrant& grant, Subframe issued_at, std::int64_t buffered_after);

    bool sr_opportunity(Subframe sf) const noexcept;
    std::int64_t outstanding_bytes() const noexcept;
    bool idle() const noexcept;

private:
    struct PendingReport {
        Subframe visible_at;
        std::int64_t bytes;
        std::int64_t granted_snapshot;
    };

    Subframe visible_after(Subframe tx) const noexcept {
        return tx + 1 + cfg_.processing_delay_subframes;
    }

    SignalingConfig cfg_;
    int sr_phase_;
    bool sr_in_flight_ = false;
    std::optional<Subframe> sr_visible_at_;
    bool bsr_grant_owed_ = false;
    std::deque<PendingReport> reports_;
    std::int64_t reported_bytes_ = 0;
    std::int64_t granted_total_ = 0;
    std::int64_t granted_at_report_ = 0;
};

} // namespace ulsched
