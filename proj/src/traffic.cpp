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

#include "ulsched/traffic.hpp"

#include "ulsched/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace ulsched {

namespace {

constexpr double kCalibrationTolerance = 0.005;

double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double rate_of(const MessageSpec& s) { return 1000.0 / s.period_ms; }

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace

void MessageSpec::validate() const {
    if (!(period_ms >= kMinMessagePeriodMs && period_ms <= kMaxMessagePeriodMs)) {
        throw ParameterError("period_ms", "must be in [100, 11100], got " + std::to_string(period_ms));
    }
    if (payload_bytes < kMinPayloadBytes || payload_bytes > kMaxPayloadBytes) {
        throw ParameterError("payload_bytes", "must be in [10, 40], got " + std::to_string(payload_bytes));
    }
    if (!(phase_ms >= 0.0) || !std::isfinite(phase_ms)) {
        throw ParameterError("phase_ms", "must be finite and >= 0");
    }
}

double TelemetryProfile::message_rate() const {
    double r = 0.0;
    for (const auto& s : specs) r += rate_of(s);
    return r;
}

double TelemetryProfile::bit_rate_bps() const {
    double r = 0.0;
    for (const auto& s : specs) r += rate_of(s) * (s.payload_bytes + overhead_bytes_per_msg) * 8.0;
    return r;
}

double TelemetryProfile::mean_interarrival_ms() const {
    const double r = message_rate();
    return r > 0.0 ? 1000.0 / r : std::numeric_limits<double>::infinity();
}

TelemetrySource::TelemetrySource(TelemetryProfile profile, std::uint64_t seed, double jitter_ms)
    : profile_(std::move(profile)), jitter_ms_(jitter_ms) {
    if (!(jitter_ms_ >= 0.0)) throw ParameterError("jitter_ms", "must be >= 0");
    if (profile_.overhead_bytes_per_msg < 0) {
        throw ParameterError("overhead_bytes_per_msg", "must be >= 0");
    }
    state_.resize(profile_.specs.size());
    for (std::size_t i = 0; i < state_.size(); ++i) {
        profile_.specs[i].validate();
        if (jitter_ms_ * 2.0 >= profile_.specs[i].period_ms) {
            throw ParameterError("jitter_ms", "must be below half the shortest period");
        }
        state_[i].rng.seed(mix_seed(seed, static_cast<std::uint64_t>(profile_.specs[i].type_id)));
        state_[i].next_time = emission_time(i);
    }
}

double TelemetrySource::emission_time(std::size_t i) {
    const auto& spec = profile_.specs[i];
    auto& st = state_[i];
    double t = spec.phase_ms + static_cast<double>(st.k) * spec.period_ms;
    if (jitter_ms_ > 0.0) t = std::max(0.0, t + (2.0 * unit_uniform(st.rng) - 1.0) * jitter_ms_);
    return t;
}

std::vector<Message> TelemetrySource::next(double until_ms) {
    if (until_ms < horizon_) {
        throw ParameterError("until_ms", "horizon must not move backwards");
    }
    horizon_ = until_ms;
    std::vector<Message> out;
    for (std::size_t i = 0; i < state_.size(); ++i) {
        const auto& spec = profile_.specs[i];
        auto& st = state_[i];
        while (st.next_time < until_ms) {
            out.push_back({st.next_time, spec.payload_bytes + profile_.overhead_bytes_per_msg,
                           spec.type_id, 0, st.k});
            ++st.k;
            st.next_time = emission_time(i);
        }
    }
    std::sort(out.begin(), out.end(), [](const Message& a, const Message& b) {
        return a.arrival_time_ms != b.arrival_time_ms ? a.arrival_time_ms < b.arrival_time_ms
                                                      : a.type_id < b.type_id;
    });
    for (auto& m : out) m.seq = seq_++;
    return out;
}

TelemetryProfile default_profile(std::uint64_t seed, int overhead_bytes_per_msg) {
    if (overhead_bytes_per_msg < 0) throw ParameterError("overhead_bytes_per_msg", "must be >= 0");
    std::mt19937_64 rng(seed);

    std::vector<double> base(kTelemetryTypes);
    const double span = kMaxMessagePeriodMs / kMinMessagePeriodMs;
    for (int i = 0; i < kTelemetryTypes; ++i) {
        base[static_cast<std::size_t>(i)] =
            kMinMessagePeriodMs * std::pow(span, static_cast<double>(i) / (kTelemetryTypes - 1));
    }
    auto stretched_rate = [&](double s) {
        double r = 0.0;
        for (double p : base) r += 1000.0 / std::clamp(p * s, kMinMessagePeriodMs, kMaxMessagePeriodMs);
        return r;
    };
    // Rate falls monotonically in the stretch factor.
    double lo = 1.0, hi = span;
    if (stretched_rate(lo) < kTelemetryMessageRate || stretched_rate(hi) > kTelemetryMessageRate) {
        throw CalibrationError(stretched_rate(lo) - kTelemetryMessageRate, 0.0);
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (stretched_rate(mid) > kTelemetryMessageRate ? lo : hi) = mid;
    }
    const double stretch = 0.5 * (lo + hi);

    TelemetryProfile profile;
    profile.overhead_bytes_per_msg = overhead_bytes_per_msg;
    for (int i = 0; i < kTelemetryTypes; ++i) {
        MessageSpec s;
        s.type_id = i + 1;
        s.period_ms = std::clamp(base[static_cast<std::size_t>(i)] * stretch, kMinMessagePeriodMs,
                                 kMaxMessagePeriodMs);
        s.payload_bytes = kMinPayloadBytes +
                          static_cast<int>(rng() % (kMaxPayloadBytes - kMinPayloadBytes + 1));
        profile.specs.push_back(s);
    }
    for (auto& s : profile.specs) s.phase_ms = unit_uniform(rng) * s.period_ms;

    // Nudge payloads toward the target bit rate. Specs are ordered fastest
    // first, so each step takes the fastest type that can still move.
    const double target = kTelemetryBitRate;
    for (int guard = 0; guard < 100'000; ++guard) {
        const double err = profile.bit_rate_bps() - target;
        if (std::abs(err) <= kCalibrationTolerance * target) break;
        const int dir = err > 0 ? -1 : +1;
        bool moved = false;
        for (auto& s : profile.specs) {
            const int next = s.payload_bytes + dir;
            if (next < kMinPayloadBytes || next > kMaxPayloadBytes) continue;
            const double step = rate_of(s) * 8.0;
            if (std::abs(err + dir * step) < std::abs(err)) {
                s.payload_bytes = next;
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }

    const double rate_residual = profile.message_rate() / kTelemetryMessageRate - 1.0;
    const double bit_residual = profile.bit_rate_bps() / target - 1.0;
    if (std::abs(rate_residual) > 0.02 || std::abs(bit_residual) > 0.05) {
        throw CalibrationError(rate_residual, bit_residual);
    }
    return profile;
}

TelemetryProfile parse_profile(std::istream& in, int overhead_bytes_per_msg, std::string_view source) {
    const std::string src(source);
    TelemetryProfile profile;
    profile.overhead_bytes_per_msg = overhead_bytes_per_msg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream fields(line);
        MessageSpec s;
        std::string rest;
        if (!(fields >> s.type_id >> s.period_ms >> s.payload_bytes >> s.phase_ms) || (fields >> rest)) {
            throw FormatError(src, line_no, "expected `type_id period_ms payload_bytes phase_ms`");
        }
        try {
            s.validate();
        } catch (const ParameterError& e) {
            throw FormatError(src, line_no, e.what());
        }
        profile.specs.push_back(s);
    }
    return profile;
}

TelemetryProfile load_profile(const std::string& path, int overhead_bytes_per_msg) {
    std::ifstream in(path);
    if (!in) throw IoError(path, "cannot open telemetry profile");
    return parse_profile(in, overhead_bytes_per_msg, path);
}

std::int64_t background_demand(Subframe /*sf*/, const CellConfig& cell, const TbsTable& table) {
    return tbs_lookup(table, cell.bandwidth_prbs, cell.mcs_index) / 8 * 1000 + 1;
}

} // namespace ulsched
