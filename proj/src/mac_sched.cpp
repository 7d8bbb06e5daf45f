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

#include "ulsched/mac_sched.hpp"

#include "ulsched/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ulsched {

namespace {

using u128 = unsigned __int128;

// Hyperperiods beyond this are rejected rather than enumerated.
constexpr std::int64_t kMaxHyperperiod = std::int64_t{1} << 22;

std::int64_t hyperperiod(std::span<const int> periods) {
    std::int64_t h = 1;
    for (int p : periods) {
        h = std::lcm(h, static_cast<std::int64_t>(p));
        if (h > kMaxHyperperiod) {
            throw ParameterError("period_subframes",
                                 "hyperperiod of persistent flows exceeds " +
                                     std::to_string(kMaxHyperperiod) + " subframes");
        }
    }
    return h;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
    const auto r = a % m;
    return r < 0 ? r + m : r;
}

} // namespace

ProvisioningFactor::ProvisioningFactor(double alpha) {
    if (!(alpha >= 1.0) || !std::isfinite(alpha)) {
        throw ParameterError("provisioning_factor", "must be a finite value >= 1");
    }
    scaled_ = static_cast<std::int64_t>(std::floor(alpha * static_cast<double>(kScale) + 0.5));
}

ProvisioningFactor ProvisioningFactor::from_ratio(std::int64_t numerator, std::int64_t denominator) {
    if (denominator <= 0 || numerator < denominator) {
        throw ParameterError("provisioning_factor", "ratio must be >= 1 with positive denominator");
    }
    ProvisioningFactor f;
    const auto num = static_cast<__int128>(numerator) * kScale * 2 + denominator;
    f.scaled_ = static_cast<std::int64_t>(num / (static_cast<__int128>(denominator) * 2));
    return f;
}

void PersistentFlowConfig::validate() const {
    if (mean_rate_bps <= 0) throw ParameterError("mean_rate_bps", "must be positive");
    if (period_subframes < 1) throw ParameterError("period_subframes", "must be >= 1");
    if (provisioning_factor.scaled() < ProvisioningFactor::kScale) {
        throw ParameterError("provisioning_factor", "must be >= 1");
    }
    if (phase_offset < 0 || phase_offset >= period_subframes) {
        throw ParameterError("phase_offset", "must be in [0, period)");
    }
}

std::string_view to_string(GrantKind kind) {
    switch (kind) {
    case GrantKind::persistent: return "persistent";
    case GrantKind::best_effort: return "best_effort";
    case GrantKind::bsr_opportunity: return "bsr_opportunity";
    }
    return "unknown";
}

void SignalingConfig::validate() const {
    if (sr_period_subframes < 1) throw ParameterError("sr_period_subframes", "must be >= 1");
    if (grant_advance_subframes < 1) throw ParameterError("grant_advance_subframes", "must be >= 1");
    if (processing_delay_subframes < 0) {
        throw ParameterError("processing_delay_subframes", "must be >= 0");
    }
}

int grant_size(const TbsTable& table, std::int64_t mean_rate_bps, int period_subframes,
               ProvisioningFactor alpha, int mcs_index, int max_prbs) {
    if (mean_rate_bps <= 0) throw ParameterError("mean_rate_bps", "must be positive");
    if (period_subframes < 1) throw ParameterError("period_subframes", "must be >= 1");
    if (max_prbs < 1 || max_prbs > kMaxPrbs) {
        throw ParameterError("max_prbs", "must be in [1, " + std::to_string(kMaxPrbs) + "]");
    }
    const int itbs = mcs_to_itbs(mcs_index);

    // tbs >= r * p * alpha / 1000  <=>  tbs * 1000 * scale >= r * p * alpha_scaled
    const u128 demand = static_cast<u128>(mean_rate_bps) * static_cast<u128>(period_subframes) *
                        static_cast<u128>(alpha.scaled());
    const u128 unit = static_cast<u128>(1000) * ProvisioningFactor::kScale;
    for (int n = 1; n <= max_prbs; ++n) {
        if (static_cast<u128>(table.bits(n, itbs)) * unit >= demand) return n;
    }
    const double required = static_cast<double>(mean_rate_bps) * period_subframes * alpha.value() / 1000.0;
    throw InfeasibleAllocation(required, table.bits(max_prbs, itbs));
}

std::int64_t supported_users(int cell_prbs, int grant_prbs, int period_subframes) {
    if (cell_prbs < 1) throw ParameterError("cell_prbs", "must be >= 1");
    if (grant_prbs < 1) throw ParameterError("grant_prbs", "must be >= 1");
    if (period_subframes < 1) throw ParameterError("period_subframes", "must be >= 1");
    if (cell_prbs < grant_prbs) return 0;
    return static_cast<std::int64_t>(cell_prbs / grant_prbs) * period_subframes;
}

std::vector<int> assign_phase_offsets(const TbsTable& table,
                                      std::span<const PersistentFlowConfig> flows,
                                      const CellConfig& cell) {
    if (flows.empty()) throw ParameterError("flows", "must not be empty");
    cell.validate();

    std::vector<int> periods;
    std::vector<int> sizes;
    periods.reserve(flows.size());
    sizes.reserve(flows.size());
    for (const auto& f : flows) {
        if (f.period_subframes < 1) throw ParameterError("period_subframes", "must be >= 1");
        periods.push_back(f.period_subframes);
        sizes.push_back(grant_size(table, f.mean_rate_bps, f.period_subframes,
                                   f.provisioning_factor, cell.mcs_index));
    }
    const auto h = hyperperiod(periods);

    // Largest grants first; stable so identical flows keep input order.
    std::vector<std::size_t> order(flows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return sizes[a] > sizes[b]; });

    std::vector<int> load(static_cast<std::size_t>(h), 0);
    std::vector<int> offsets(flows.size(), 0);
    for (auto idx : order) {
        const int p = periods[idx];
        int best_offset = 0;
        int best_peak = std::numeric_limits<int>::max();
        for (int o = 0; o < p; ++o) {
            int peak = 0;
            for (std::int64_t t = o; t < h; t += p) peak = std::max(peak, load[static_cast<std::size_t>(t)]);
            if (peak < best_peak) {
                best_peak = peak;
                best_offset = o;
            }
        }
        offsets[idx] = best_offset;
        for (std::int64_t t = best_offset; t < h; t += p) load[static_cast<std::size_t>(t)] += sizes[idx];
    }

    const auto worst = std::max_element(load.begin(), load.end());
    if (*worst > cell.bandwidth_prbs) {
        throw OversubscriptionError(worst - load.begin(), *worst, cell.bandwidth_prbs);
    }
    return offsets;
}

void check_persistent_capacity(std::span<const UplinkScheduler::PersistentUser> users, int cell_prbs) {
    if (users.empty()) return;
    std::vector<int> periods;
    for (const auto& u : users) periods.push_back(u.flow.period_subframes);
    const auto h = hyperperiod(periods);
    std::vector<int> load(static_cast<std::size_t>(h), 0);
    for (const auto& u : users) {
        for (std::int64_t t = u.flow.phase_offset; t < h; t += u.flow.period_subframes) {
            load[static_cast<std::size_t>(t)] += u.prb_count;
        }
    }
    const auto worst = std::max_element(load.begin(), load.end());
    if (*worst > cell_prbs) throw OversubscriptionError(worst - load.begin(), *worst, cell_prbs);
}

UplinkScheduler::UplinkScheduler(const TbsTable& table, CellConfig cell,
                                 std::vector<std::pair<UserId, PersistentFlowConfig>> flows)
    : cell_(cell) {
    cell_.validate();
    tbs_by_prbs_.assign(static_cast<std::size_t>(cell_.bandwidth_prbs) + 1, 0);
    for (int n = 1; n <= cell_.bandwidth_prbs; ++n) {
        tbs_by_prbs_[static_cast<std::size_t>(n)] = tbs_lookup(table, n, cell_.mcs_index);
    }
    for (auto& [user, flow] : flows) {
        flow.validate();
        const int n = grant_size(table, flow.mean_rate_bps, flow.period_subframes,
                                 flow.provisioning_factor, cell_.mcs_index, cell_.bandwidth_prbs);
        persistent_.push_back({user, flow, n, tbs_by_prbs_[static_cast<std::size_t>(n)]});
    }
    check_persistent_capacity(persistent_, cell_.bandwidth_prbs);
}

int UplinkScheduler::prbs_for_bytes(std::int64_t bytes) const {
    const auto bits = bytes * 8;
    auto it = std::lower_bound(tbs_by_prbs_.begin() + 1, tbs_by_prbs_.end(), bits);
    if (it == tbs_by_prbs_.end()) return cell_.bandwidth_prbs;
    return static_cast<int>(it - tbs_by_prbs_.begin());
}

std::vector<SubframeGrant> UplinkScheduler::schedule_subframe(Subframe sf,
                                                              std::span<const BufferReport> pending,
                                                              std::span<const UserId> bsr_requests) const {
    std::vector<SubframeGrant> grants;
    int remaining = cell_.bandwidth_prbs;
    auto already_granted = [&](UserId u) {
        return std::any_of(grants.begin(), grants.end(),
                           [u](const SubframeGrant& g) { return g.user_id == u; });
    };

    for (const auto& pu : persistent_) {
        if (floor_mod(sf - pu.flow.phase_offset, pu.flow.period_subframes) != 0) continue;
        grants.push_back({pu.user_id, sf, pu.prb_count, pu.tbs_bits, GrantKind::persistent});
        remaining -= pu.prb_count;
    }

    std::vector<UserId> requests(bsr_requests.begin(), bsr_requests.end());
    std::sort(requests.begin(), requests.end());
    for (auto u : requests) {
        if (remaining < 1) break;
        if (already_granted(u)) continue;
        grants.push_back({u, sf, 1, tbs_by_prbs_[1], GrantKind::bsr_opportunity});
        remaining -= 1;
    }

    std::vector<BufferReport> order;
    for (const auto& r : pending) {
        if (r.bytes > 0) order.push_back(r);
    }
    std::sort(order.begin(), order.end(), [](const BufferReport& a, const BufferReport& b) {
        return a.bytes != b.bytes ? a.bytes > b.bytes : a.user_id < b.user_id;
    });
    for (const auto& r : order) {
        if (remaining < 1) break;
        if (already_granted(r.user_id)) continue;
        const int n = std::min(remaining, prbs_for_bytes(r.bytes));
        grants.push_back({r.user_id, sf, n, tbs_by_prbs_[static_cast<std::size_t>(n)],
                          GrantKind::best_effort});
        remaining -= n;
    }
    return grants;
}

SignalingPipeline::SignalingPipeline(SignalingConfig cfg, int sr_phase) : cfg_(cfg), sr_phase_(sr_phase) {
    cfg_.validate();
    sr_phase_ = static_cast<int>(floor_mod(sr_phase, cfg_.sr_period_subframes));
}

bool SignalingPipeline::sr_opportunity(Subframe sf) const noexcept {
    return floor_mod(sf - sr_phase_, cfg_.sr_period_subframes) == 0;
}

std::int64_t SignalingPipeline::outstanding_bytes() const noexcept {
    return std::max<std::int64_t>(0, reported_bytes_ - (granted_total_ - granted_at_report_));
}

bool SignalingPipeline::idle() const noexcept {
    return !sr_in_flight_ && !bsr_grant_owed_ && reports_.empty() && outstanding_bytes() == 0;
}

SignalingActions SignalingPipeline::step(Subframe sf, std::int64_t buffered_bytes) {
    SignalingActions actions;
    if (sr_visible_at_ && *sr_visible_at_ <= sf) {
        sr_visible_at_.reset();
        bsr_grant_owed_ = true;
        actions.sr_received = true;
    }
    while (!reports_.empty() && reports_.front().visible_at <= sf) {
        reported_bytes_ = reports_.front().bytes;
        granted_at_report_ = reports_.front().granted_snapshot;
        reports_.pop_front();
        actions.bsr_received = true;
    }
    if (buffered_bytes > 0 && idle() && sr_opportunity(sf)) {
        sr_in_flight_ = true;
        sr_visible_at_ = visible_after(sf);
        actions.sr_sent = true;
    }
    actions.wants_bsr_grant = bsr_grant_owed_;
    actions.reported_bytes = outstanding_bytes();
    return actions;
}

void SignalingPipeline::on_grant(const SubframeGrant& grant, Subframe /*issued_at*/,
                                 std::int64_t buffered_after) {
    switch (grant.kind) {
    case GrantKind::bsr_opportunity:
        bsr_grant_owed_ = false;
        break;
    case GrantKind::best_effort:
        granted_total_ += grant.tbs_bits / 8;
        break;
    case GrantKind::persistent:
        return;
    }
    sr_in_flight_ = false;
    reports_.push_back({visible_after(grant.subframe), buffered_after, granted_total_});
}

} // namespace ulsched
