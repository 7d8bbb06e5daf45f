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

#include "ulsched/metrics.hpp"

#include "ulsched/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ulsched {

double nearest_rank_percentile(std::span<const double> delays, double q) {
    if (delays.empty()) throw EmptySampleError();
    if (!(q > 0.0 && q <= 1.0)) throw ParameterError("q", "must be in (0, 1]");
    std::vector<double> sorted(delays.begin(), delays.end());
    std::sort(sorted.begin(), sorted.end());
    // Integer ceil for the reliability quantile; avoids 0.999 * 1000 rounding up to 1000.
    const auto n = static_cast<std::int64_t>(sorted.size());
    const auto per_million = static_cast<std::int64_t>(std::llround(q * 1e6));
    auto rank = (per_million * n + 999'999) / 1'000'000;
    rank = std::clamp<std::int64_t>(rank, 1, n);
    return sorted[static_cast<std::size_t>(rank - 1)];
}

DelayStats summarize(std::span<const double> delays_ms, double deadline_ms) {
    if (delays_ms.empty()) throw EmptySampleError();
    DelayStats s;
    s.count = static_cast<std::int64_t>(delays_ms.size());

    // Sorting first makes the sums independent of input order.
    std::vector<double> sorted(delays_ms.begin(), delays_ms.end());
    std::sort(sorted.begin(), sorted.end());

    double sum = 0.0;
    for (double d : sorted) sum += d;
    s.mean_ms = sum / static_cast<double>(s.count);
    double sq = 0.0;
    for (double d : sorted) sq += (d - s.mean_ms) * (d - s.mean_ms);
    s.std_ms = s.count > 1 ? std::sqrt(sq / static_cast<double>(s.count - 1)) : 0.0;

    s.p999_ms = nearest_rank_percentile(sorted, kReliabilityQuantile);
    s.min_ms = sorted.front();
    s.max_ms = sorted.back();
    const auto over = std::upper_bound(sorted.begin(), sorted.end(), deadline_ms);
    s.exceed_freq = static_cast<double>(sorted.end() - over) / static_cast<double>(s.count);
    return s;
}

DelayStats summarize(std::span<const DelayRecord> records, double deadline_ms) {
    std::vector<double> delays;
    delays.reserve(records.size());
    for (const auto& r : records) delays.push_back(r.delay_ms);
    return summarize(std::span<const double>(delays), deadline_ms);
}

ResourceMetrics resource_metrics(const PersistentFlowConfig& flow, const CellConfig& cell,
                                 const TbsTable& table) {
    flow.validate();
    cell.validate();
    ResourceMetrics m;
    m.prbs_per_grant = grant_size(table, flow.mean_rate_bps, flow.period_subframes,
                                  flow.provisioning_factor, cell.mcs_index, cell.bandwidth_prbs);
    m.tbs_bits = tbs_lookup(table, m.prbs_per_grant, cell.mcs_index);
    m.allocated_bps = static_cast<double>(m.tbs_bits) * 1000.0 / flow.period_subframes;
    m.overalloc_ratio = m.allocated_bps / static_cast<double>(flow.mean_rate_bps);
    m.users_supported = supported_users(cell.bandwidth_prbs, m.prbs_per_grant, flow.period_subframes);
    return m;
}

} // namespace ulsched
