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
#include "ulsched/metrics.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ulsched {

/// 1, 4, 7, ..., 49.
std::vector<int> default_periods();

struct SweepSpec {
    std::vector<int> periods_ms = default_periods();
    std::vector<double> alphas{1.0, 1.5, 2.0};
    int repetitions = 1;
    /// Explicit per-repetition seeds; when empty, repetition k uses base.seed + k.
    std::vector<std::uint64_t> seeds;
    /// Template for every point; its flow period and provisioning factor are overwritten.
    SimConfig base{};
    /// Worker threads; 0 means std::thread::hardware_concurrency().
    int jobs = 0;

    void validate() const;
    std::vector<std::uint64_t> seed_list() const;
};

enum class PointStatus { ok, infeasible, no_samples };
std::string_view to_string(PointStatus status);

struct SweepRow {
    int period_ms = 0;
    double alpha = 0.0;
    std::uint64_t seed = 0;
    PointStatus status = PointStatus::ok;
    std::string detail; ///< error text for points that did not run
    DelayStats stats;
    ResourceMetrics resources;
};

struct SweepResult {
    /// Grid order: period-major, then alpha, then repetition.
    std::vector<SweepRow> rows;
};

SweepResult run_sweep(const SweepSpec& spec, const TbsTable& table = default_tbs_table());

struct Table1Row {
    std::string selection; ///< "least_resource" or "min_mean"
    double alpha = 0.0;
    int period_ms = 0;
    double mean_ms = 0.0;
    double p999_ms = 0.0;
    double std_ms = 0.0;
    double overalloc = 0.0;
};

/// Per alpha the lowest-overallocation point whose p999 meets the deadline
/// (ties to the longer period), then the point with the smallest mean delay.
/// Repetitions of a point are averaged first.
std::vector<Table1Row> select_table1(const SweepResult& result, double deadline_ms = kDeadlineMs);

void write_sweep_csv(std::ostream& out, const SweepResult& result);
/// Inverse of write_sweep_csv. Rows with count 0 come back as not run.
SweepResult read_sweep_csv(std::istream& in, std::string_view source = "<sweep.csv>");
void write_table1_csv(std::ostream& out, const std::vector<Table1Row>& rows);

/// Writes sweep.csv, table1.csv and fig2_delay.svg, fig3_reliability.svg,
/// fig4_resources.svg into out_dir (created if missing). Returns the paths.
std::vector<std::string> emit(const SweepResult& result, const std::string& out_dir,
                              const CellConfig& cell = {}, std::int64_t mean_rate_bps = 19'500,
                              const TbsTable& table = default_tbs_table());

} // namespace ulsched
