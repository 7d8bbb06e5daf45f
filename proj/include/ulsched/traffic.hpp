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

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace ulsched {

inline constexpr double kTelemetryMessageRate = 47.0;   // msg/s
inline constexpr double kTelemetryBitRate = 19'500.0;   // bit/s, headers included
inline constexpr int kTelemetryTypes = 27;
inline constexpr int kDefaultMessageOverheadBytes = 28; // IPv4 + UDP

inline constexpr double kMinMessagePeriodMs = 100.0;
inline constexpr double kMaxMessagePeriodMs = 11'100.0;
inline constexpr int kMinPayloadBytes = 10;
inline constexpr int kMaxPayloadBytes = 40;

/// One telemetry message type, emitted at phase_ms + k * period_ms.
struct MessageSpec {
    int type_id = 0;
    double period_ms = 1000.0;
    int payload_bytes = 20;
    double phase_ms = 0.0;

    void validate() const;
};

struct TelemetryProfile {
    std::vector<MessageSpec> specs;
    int overhead_bytes_per_msg = kDefaultMessageOverheadBytes;

    double message_rate() const;        ///< messages per second
    double bit_rate_bps() const;        ///< on-air rate, payload + overhead
    double mean_interarrival_ms() const;
};

struct Message {
    double arrival_time_ms = 0.0;
    int size_bytes = 0; ///< payload + per-message overhead
    int type_id = 0;
    std::int64_t seq = 0;      ///< stream-wide, in emission order
    std::int64_t type_seq = 0; ///< k of phase + k * period

    friend bool operator==(const Message&, const Message&) = default;
};

/// Deterministic telemetry stream. next() hands out every message with
/// arrival time below the horizon that has not been returned yet, so
/// splitting a horizon over several calls yields the same stream.
class TelemetrySource {
public:
    /// `jitter_ms` > 0 adds a uniform offset in [-jitter, +jitter] to each
    /// emission, drawn from a per-type stream derived from `seed`.
    explicit TelemetrySource(TelemetryProfile profile, std::uint64_t seed = 0, double jitter_ms = 0.0);

    std::vector<Message> next(double until_ms);

    double horizon_ms() const noexcept { return horizon_; }
    const TelemetryProfile& profile() const noexcept { return profile_; }

private:
    struct TypeState {
        std::int64_t k = 0;
        double next_time = 0.0;
        std::mt19937_64 rng;
    };

    double emission_time(std::size_t type_index);

    TelemetryProfile profile_;
    double jitter_ms_;
    std::vector<TypeState> state_;
    double horizon_ = 0.0;
    std::int64_t seq_ = 0;
};

/// Synthetic 27-type autopilot profile. Periods start log-spaced over
/// [100, 11100] ms and are stretched (clamped at the top) until the stream
/// carries exactly 47 msg/s; payloads are drawn uniformly from [10, 40] bytes
/// and then nudged one byte at a time, fastest types first, until the on-air
/// rate lands within 0.5% of 19.5 kbps. Throws CalibrationError if it cannot.
TelemetryProfile default_profile(std::uint64_t seed,
                                 int overhead_bytes_per_msg = kDefaultMessageOverheadBytes);

/// Profile file: one `type_id period_ms payload_bytes phase_ms` line per type,
/// `#` starts a comment.
TelemetryProfile parse_profile(std::istream& in, int overhead_bytes_per_msg,
                               std::string_view source = "<profile>");
TelemetryProfile load_profile(const std::string& path, int overhead_bytes_per_msg);

/// Full-buffer background level in bytes: one second of the whole cell at its
/// MCS, which is always more than a single subframe can carry.
std::int64_t background_demand(Subframe sf, const CellConfig& cell, const TbsTable& table);

} // namespace ulsched
