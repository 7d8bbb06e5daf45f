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

#include "ulsched/engine.hpp"

#include "ulsched/errors.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace ulsched {

void UeState::enqueue(const Message& m) {
    buffer_.push_back({m, m.size_bytes});
    buffered_ += m.size_bytes;
}

std::int64_t UeState::recount_bytes() const {
    std::int64_t total = 0;
    for (const auto& s : buffer_) total += s.remaining_bytes;
    return total;
}

DrainResult drain_grant(UeState& ue, const SubframeGrant& grant, const HeaderOverheads& overheads) {
    if (grant.user_id != ue.user_id()) {
        throw ParameterError("grant", "issued to user " + std::to_string(grant.user_id) +
                                          ", not " + std::to_string(ue.user_id()));
    }
    DrainResult result;
    std::int64_t room = grant.tbs_bits / 8 - overheads.per_grant_bytes;
    while (!ue.buffer_.empty() && room > overheads.per_segment_bytes) {
        auto& front = ue.buffer_.front();
        const auto take = std::min(front.remaining_bytes, room - overheads.per_segment_bytes);
        room -= take + overheads.per_segment_bytes;
        front.remaining_bytes -= take;
        ue.buffered_ -= take;
        result.bytes_carried += take;
        if (front.remaining_bytes == 0) {
            result.completed.push_back(front.message);
            ue.buffer_.pop_front();
        }
    }
    return result;
}

void SimConfig::validate() const {
    cell.validate();
    signaling.validate();
    if (flow) flow->validate();
    if (duration_ms <= 0) throw ParameterError("duration_ms", "must be positive");
    if (warmup_ms < 0 || warmup_ms >= duration_ms) {
        throw ParameterError("warmup_ms", "must satisfy 0 <= warmup < duration");
    }
    if (overheads.per_grant_bytes < 0) throw ParameterError("per_grant_overhead_bytes", "must be >= 0");
    if (overheads.per_segment_bytes < 0) {
        throw ParameterError("per_segment_overhead_bytes", "must be >= 0");
    }
    if (message_overhead_bytes < 0) throw ParameterError("message_overhead_bytes", "must be >= 0");
}

namespace {

struct BackgroundUe {
    SignalingPipeline signaling;
    std::int64_t buffered = 0;
};

[[noreturn]] void invariant_failure(Subframe sf, const std::string& what) {
    throw std::logic_error("engine invariant violated at subframe " + std::to_string(sf) + ": " + what);
}

} // namespace

RunResult run_detailed(const SimConfig& cfg, const TbsTable& table, const GrantObserver& observer) {
    cfg.validate();

    TelemetryProfile profile =
        cfg.profile ? *cfg.profile : default_profile(cfg.seed, cfg.message_overhead_bytes);
    TelemetrySource source(std::move(profile), cfg.seed, cfg.jitter_ms);

    std::vector<std::pair<UserId, PersistentFlowConfig>> flows;
    if (cfg.flow) flows.emplace_back(kUavUser, *cfg.flow);
    const UplinkScheduler scheduler(table, cfg.cell, std::move(flows));

    const int advance = cfg.signaling.grant_advance_subframes;
    const int processing = cfg.signaling.processing_delay_subframes;
    const int sr_period = cfg.signaling.sr_period_subframes;

    UeState uav(kUavUser);
    if (cfg.flow) {
        uav.flow = cfg.flow;
    } else {
        uav.signaling.emplace(cfg.signaling, static_cast<int>(kUavUser % static_cast<UserId>(sr_period)));
    }

    const auto full_buffer = background_demand(0, cfg.cell, table);
    std::optional<BackgroundUe> background;
    if (cfg.background) {
        background.emplace(BackgroundUe{
            SignalingPipeline(cfg.signaling, static_cast<int>(kBackgroundUser % static_cast<UserId>(sr_period))),
            full_buffer});
    }

    RunResult result;
    auto& c = result.counters;
    std::vector<BufferReport> reports;
    std::vector<UserId> bsr_requests;
    std::size_t checked_records = 0;

    for (Subframe sf = 0; sf < cfg.duration_ms; ++sf) {
        reports.clear();
        bsr_requests.clear();
        auto collect = [&](UserId user, SignalingPipeline& sig, std::int64_t buffered) {
            const auto a = sig.step(sf, buffered);
            if (a.wants_bsr_grant) bsr_requests.push_back(user);
            if (a.reported_bytes > 0) reports.push_back({user, a.reported_bytes});
        };
        if (uav.signaling) collect(kUavUser, *uav.signaling, uav.buffered_bytes());
        if (background) collect(kBackgroundUser, background->signaling, background->buffered);

        for (const auto& m : source.next(static_cast<double>(sf + 1))) {
            uav.enqueue(m);
            c.injected_bytes += m.size_bytes;
            ++c.messages_injected;
        }
        if (background) background->buffered = std::max(background->buffered, full_buffer);

        const auto grants = scheduler.schedule_subframe(sf + advance, reports, bsr_requests);
        int granted_prbs = 0;
        for (const auto& g : grants) granted_prbs += g.prb_count;
        if (granted_prbs > cfg.cell.bandwidth_prbs) {
            invariant_failure(sf, "granted " + std::to_string(granted_prbs) + " PRBs");
        }

        for (const auto& g : grants) {
            if (g.user_id == kUavUser) {
                if (g.kind == GrantKind::persistent) {
                    ++c.persistent_grants;
                    c.persistent_prbs += g.prb_count;
                }
                if (g.kind != GrantKind::bsr_opportunity) {
                    const auto drained = drain_grant(uav, g, cfg.overheads);
                    c.carried_bytes += drained.bytes_carried;
                    if (drained.bytes_carried == 0) c.wasted_grant_bytes += g.tbs_bits / 8;
                    const auto delivered_at = static_cast<double>(g.subframe + 1 + processing);
                    for (const auto& m : drained.completed) {
                        ++c.messages_delivered;
                        if (delivered_at < static_cast<double>(cfg.warmup_ms)) continue;
                        result.records.push_back({m.seq, m.type_id, m.arrival_time_ms, delivered_at,
                                                  delivered_at - m.arrival_time_ms});
                    }
                }
                if (uav.signaling) uav.signaling->on_grant(g, sf, uav.buffered_bytes());
            } else if (background && g.user_id == kBackgroundUser) {
                if (g.kind == GrantKind::best_effort) {
                    c.background_prbs += g.prb_count;
                    const auto room = std::max<std::int64_t>(0, g.tbs_bits / 8 - cfg.overheads.per_grant_bytes);
                    background->buffered -= std::min(background->buffered, room);
                }
                background->signaling.on_grant(g, sf, background->buffered);
            } else {
                invariant_failure(sf, "grant for unknown user " + std::to_string(g.user_id));
            }
        }
        if (observer) observer(sf, grants);

        if (cfg.verify_invariants) {
            if (uav.recount_bytes() != uav.buffered_bytes()) invariant_failure(sf, "buffer total drifted");
            if (c.injected_bytes != uav.buffered_bytes() + c.carried_bytes) {
                invariant_failure(sf, "bytes not conserved");
            }
            if (cfg.flow) {
                const double floor_ms = advance + processing;
                for (auto i = checked_records; i < result.records.size(); ++i) {
                    if (result.records[i].delay_ms < floor_ms) invariant_failure(sf, "delay below floor");
                }
                checked_records = result.records.size();
            }
        }
        ++c.subframes;
    }
    c.buffered_bytes = uav.buffered_bytes();
    return result;
}

std::vector<DelayRecord> run(const SimConfig& cfg, const TbsTable& table) {
    return run_detailed(cfg, table).records;
}

void write_trace(std::ostream& out, std::span<const DelayRecord> records) {
    char line[128];
    for (const auto& r : records) {
        std::snprintf(line, sizeof line, "%" PRId64 " %d %.6f %.6f %.6f\n", r.seq, r.type_id,
                      r.arrival_time_ms, r.delivery_time_ms, r.delay_ms);
        out << line;
    }
}

void write_trace(const std::string& path, std::span<const DelayRecord> records) {
    std::ofstream out(path);
    if (!out) throw IoError(path, "cannot open trace file for writing");
    write_trace(out, records);
    if (!out) throw IoError(path, "write failed");
}

} // namespace ulsched
