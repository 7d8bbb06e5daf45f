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

#include "ulsched/phy_model.hpp"

#include "ulsched/errors.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ulsched {

namespace {

constexpr std::array<int, kMaxMcs + 1> kUplinkMcsToItbs = {
    0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 10, 11, 12, 13,
    14, 15, 16, 17, 18, 19, 19, 20, 21, 22, 23, 24, 25, 26};

void check_prb_count(int prb_count) {
    if (prb_count < 1 || prb_count > kMaxPrbs) {
        throw ParameterError("prb_count", "must be in [1, " + std::to_string(kMaxPrbs) +
                                              "], got " + std::to_string(prb_count));
    }
}

void check_mcs(int mcs_index) {
    if (mcs_index < 0 || mcs_index > kMaxMcs) {
        throw ParameterError("mcs_index", "must be in [0, " + std::to_string(kMaxMcs) +
                                              "], got " + std::to_string(mcs_index));
    }
}

} // namespace

void CellConfig::validate() const {
    if (bandwidth_prbs < 1 || bandwidth_prbs > kMaxPrbs) {
        throw ParameterError("bandwidth_prbs", "must be in [1, " + std::to_string(kMaxPrbs) +
                                                   "], got " + std::to_string(bandwidth_prbs));
    }
    check_mcs(mcs_index);
}

int mcs_to_itbs(int mcs_index) {
    check_mcs(mcs_index);
    return kUplinkMcsToItbs[static_cast<std::size_t>(mcs_index)];
}

TbsTable TbsTable::parse(std::istream& in, std::string_view source) {
    const std::string src(source);
    TbsTable table;
    std::array<std::array<bool, kMaxPrbs>, kNumItbs> seen{};
    std::string line;
    std::size_t line_no = 0;
    std::size_t records = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line.front() == '#') {
            if (table.version_.empty()) {
                auto start = line.find_first_not_of("# ");
                table.version_ = start == std::string::npos ? std::string{} : line.substr(start);
            }
            continue;
        }
        std::istringstream fields(line);
        long itbs = -1, prbs = -1, bits = -1;
        std::string rest;
        if (!(fields >> itbs >> prbs >> bits) || (fields >> rest)) {
            throw FormatError(src, line_no, "expected `itbs prb_count bits`");
        }
        if (itbs < 0 || itbs >= kNumItbs || prbs < 1 || prbs > kMaxPrbs || bits <= 0) {
            throw FormatError(src, line_no, "record out of range");
        }
        auto& slot = seen[static_cast<std::size_t>(itbs)][static_cast<std::size_t>(prbs - 1)];
        if (slot) throw FormatError(src, line_no, "duplicate record");
        slot = true;
        table.bits_[static_cast<std::size_t>(itbs)][static_cast<std::size_t>(prbs - 1)] =
            static_cast<std::int32_t>(bits);
        ++records;
    }
    if (table.version_.empty()) throw FormatError(src, 1, "missing version header line");
    if (records != static_cast<std::size_t>(kNumItbs) * kMaxPrbs) {
        throw FormatError(src, line_no,
                          "expected " + std::to_string(kNumItbs * kMaxPrbs) + " records, got " +
                              std::to_string(records));
    }
    for (std::size_t i = 0; i < kNumItbs; ++i) {
        for (std::size_t n = 0; n < kMaxPrbs; ++n) {
            const auto v = table.bits_[i][n];
            if ((n > 0 && v < table.bits_[i][n - 1]) || (i > 0 && v < table.bits_[i - 1][n])) {
                throw FormatError(src, 0,
                                  "table not monotone at itbs " + std::to_string(i) + ", prb " +
                                      std::to_string(n + 1));
            }
        }
    }
    return table;
}

TbsTable TbsTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path, "cannot open TBS table");
    return parse(in, path);
}

std::int64_t TbsTable::bits(int prb_count, int itbs) const {
    check_prb_count(prb_count);
    if (itbs < 0 || itbs >= kNumItbs) {
        throw ParameterError("itbs", "must be in [0, 26], got " + std::to_string(itbs));
    }
    return bits_[static_cast<std::size_t>(itbs)][static_cast<std::size_t>(prb_count - 1)];
}

const TbsTable& default_tbs_table() {
    static const TbsTable table = [] {
        if (const char* path = std::getenv("ULSCHED_TBS_TABLE"); path != nullptr && *path != '\0') {
            return TbsTable::load(path);
        }
        std::istringstream in{std::string(embedded_tbs_table_text())};
        return TbsTable::parse(in, "<embedded>");
    }();
    return table;
}

std::int64_t tbs_lookup(const TbsTable& table, int prb_count, int mcs_index) {
    check_prb_count(prb_count);
    return table.bits(prb_count, mcs_to_itbs(mcs_index));
}

double spectral_efficiency(const TbsTable& table, int prb_count, int mcs_index) {
    return static_cast<double>(tbs_lookup(table, prb_count, mcs_index)) / prb_count;
}

} // namespace ulsched
