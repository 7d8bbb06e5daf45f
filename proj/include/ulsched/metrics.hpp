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

#include "ulsched/engine.hpp"
#include "ulsched/mac_sched.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace ulsched {

inline constexpr double kDeadlineMs = 50.0;
inline constexpr double kReliabilityQuantile = 0.999;

struct DelayStats {
    std::int64_t count = 0;
    double mean_ms = 0.0;
    double std_ms = 0.0;      ///< sample standard deviation (n - 1)
    double p999_ms = 0.0;     ///< nearest-rank 99.9th percentile
    double min_ms = 0.0;
    double max_ms = 0.0;
    double exceed_freq = 0.0; ///< fraction of delays strictly above the deadline
};

/// Nearest-rank percentile: the value at 1-based rank ceil(q * n) of the sorted
/// sample (rank 1 when that rounds to zero). `q` is in (0, 1].
double nearest_rank_percentile(std::span<const double> delays, double q);

DelayStats summarize(std::span<const double> delays_ms, double deadline_ms = kDeadlineMs);
DelayStats summarize(std::span<const DelayRecord> records, double deadline_ms = kDeadlineMs);

struct ResourceMetrics {
    int prbs_per_grant = 0;
    std::int64_t tbs_bits = 0;
    double allocated_bps = 0.0;  ///< tbs(n, m) * 1000 / p
    double overalloc_ratio = 0.0; ///< allocated / r
    std::int64_t users_supported = 0;
};

/// Grant size, delivered rate and cell capacity for a persistent flow.
ResourceMetrics resource_metrics(const PersistentFlowConfig& flow, const CellConfig& cell,
                                 const TbsTable& table = default_tbs_table());

} // namespace ulsched
