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

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace ulsched {

inline constexpr int kMaxPrbs = 100;
inline constexpr int kMaxMcs = 28;
inline constexpr int kNumItbs = 27;

/// Uplink cell parameters. The grid has `bandwidth_prbs` PRBs per 1 ms subframe
/// (25/50/75/100 for 5/10/15/20 MHz); `mcs_index` is fixed for every grant.
struct CellConfig {
    int bandwidth_prbs = 25;
    int mcs_index = 7;

    /// Throws ParameterError when either field is out of range.
    void validate() const;
};

/// Uplink MCS index to TBS index. MCS 11 and 21 repeat the previous I_TBS at the
/// next modulation order; all of 0..28 are regular transmissions on the uplink.
int mcs_to_itbs(int mcs_index);

/// Transport block sizes in bits, indexed by (I_TBS, PRB count).
///
/// Loaded from a text file with one `itbs prb_count bits` record per line and a
/// leading `#` line carrying the standard's version. Every (I_TBS, PRB) pair in
/// range must be present exactly once and bits must be non-decreasing along both
/// axes; anything else is rejected with FormatError.
class TbsTable {
public:
    static TbsTable parse(std::istream& in, std::string_view source = "<tbs>");
    static TbsTable load(const std::string& path);

    /// Bits carried by `prb_count` PRBs at TBS index `itbs`.
    std::int64_t bits(int prb_count, int itbs) const;

    const std::string& version() const noexcept { return version_; }

private:
    TbsTable() = default;

    std::array<std::array<std::int32_t, kMaxPrbs>, kNumItbs> bits_{};
    std::string version_;
};

/// The table compiled into the library, or the file named by the
/// ULSCHED_TBS_TABLE environment variable if set. Loaded once; immutable.
const TbsTable& default_tbs_table();

/// The embedded table text, for tests and tooling.
std::string_view embedded_tbs_table_text();

/// tbs(n, m): bits deliverable by `prb_count` contiguous PRBs at MCS `mcs_index`.
std::int64_t tbs_lookup(const TbsTable& table, int prb_count, int mcs_index);
inline std::int64_t tbs_lookup(int prb_count, int mcs_index) {
    return tbs_lookup(default_tbs_table(), prb_count, mcs_index);
}

/// Bits per PRB for a grant of `prb_count` PRBs.
double spectral_efficiency(const TbsTable& table, int prb_count, int mcs_index);
inline double spectral_efficiency(int prb_count, int mcs_index) {
    return spectral_efficiency(default_tbs_table(), prb_count, mcs_index);
}

} // namespace ulsched
