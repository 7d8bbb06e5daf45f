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

#include <doctest.h>

#include "ulsched/errors.hpp"
#include "ulsched/traffic.hpp"

#include <map>
#include <sstream>

using namespace ulsched;

TEST_CASE("default profile meets the calibration targets") {
    for (std::uint64_t seed : {0ULL, 1ULL, 42ULL, 9999ULL}) {
        CAPTURE(seed);
        const auto p = default_profile(seed);
        CHECK(p.specs.size() == static_cast<std::size_t>(kTelemetryTypes));
        for (const auto& s : p.specs) {
            CHECK(s.period_ms >= 100.0);
            CHECK(s.period_ms <= 11'100.0);
            CHECK(s.payload_bytes >= 10);
            CHECK(s.payload_bytes <= 40);
            CHECK(s.phase_ms >= 0.0);
            CHECK(s.phase_ms < s.period_ms);
        }
        CHECK(p.message_rate() == doctest::Approx(47.0).epsilon(0.02));
        CHECK(p.bit_rate_bps() == doctest::Approx(19'500.0).epsilon(0.05));
        CHECK(p.mean_interarrival_ms() == doctest::Approx(1000.0 / 47.0).epsilon(0.05));
    }
}

TEST_CASE("calibration arithmetic: mean payload near 24 bytes") {
    const double mean_payload = 19'500.0 / 8.0 / 47.0 - 28.0;
    CHECK(mean_payload == doctest::Approx(23.86).epsilon(0.01));
    const auto p = default_profile(0);
    double payload_rate = 0.0;
    for (const auto& s : p.specs) payload_rate += 1000.0 / s.period_ms * s.payload_bytes;
    CHECK(payload_rate / p.message_rate() == doctest::Approx(mean_payload).epsilon(0.05));
}

TEST_CASE("default profile is deterministic per seed") {
    const auto a = default_profile(7), b = default_profile(7), c = default_profile(8);
    REQUIRE(a.specs.size() == b.specs.size());
    bool differs = false;
    for (std::size_t i = 0; i < a.specs.size(); ++i) {
        CHECK(a.specs[i].period_ms == b.specs[i].period_ms);
        CHECK(a.specs[i].payload_bytes == b.specs[i].payload_bytes);
        CHECK(a.specs[i].phase_ms == b.specs[i].phase_ms);
        differs = differs || a.specs[i].phase_ms != c.specs[i].phase_ms;
    }
    CHECK(differs);
}

TEST_CASE("fifteen minutes of telemetry") {
    TelemetrySource src(default_profile(0), 0);
    const auto msgs = src.next(900'000.0);
    CHECK(static_cast<double>(msgs.size()) == doctest::Approx(42'300.0).epsilon(0.02));

    std::int64_t bytes = 0;
    std::map<int, std::int64_t> next_k;
    for (std::size_t i = 0; i < msgs.size(); ++i) {
        CHECK(msgs[i].seq == static_cast<std::int64_t>(i));
        if (i > 0) CHECK(msgs[i].arrival_time_ms >= msgs[i - 1].arrival_time_ms);
        CHECK(msgs[i].type_seq == next_k[msgs[i].type_id]++);
        bytes += msgs[i].size_bytes;
    }
    CHECK(static_cast<double>(msgs.size()) / 900.0 == doctest::Approx(47.0).epsilon(0.02));
    CHECK(static_cast<double>(bytes) * 8.0 / 900.0 == doctest::Approx(19'500.0).epsilon(0.05));
}

TEST_CASE("empty horizon and backwards horizon") {
    TelemetrySource src(default_profile(0), 0);
    CHECK(src.next(0.0).empty());
    src.next(500.0);
    CHECK_THROWS_AS(src.next(499.0), ParameterError);
}

TEST_CASE("splitting the horizon does not change the stream") {
    TelemetrySource whole(default_profile(3), 3), parts(default_profile(3), 3);
    const auto all = whole.next(60'000.0);
    std::vector<Message> joined;
    for (double h : {0.0, 0.5, 17.0, 17.0, 1'000.0, 33'333.3, 60'000.0}) {
        const auto chunk = parts.next(h);
        joined.insert(joined.end(), chunk.begin(), chunk.end());
    }
    CHECK(joined == all);
}

TEST_CASE("jitter stays inside its window and is reproducible") {
    TelemetryProfile p;
    p.specs.push_back({1, 100.0, 20, 50.0});
    TelemetrySource a(p, 5, 10.0), b(p, 5, 10.0);
    const auto ma = a.next(10'000.0), mb = b.next(10'000.0);
    CHECK(ma == mb);
    for (const auto& m : ma) {
        const double nominal = 50.0 + 100.0 * static_cast<double>(m.type_seq);
        CHECK(std::abs(m.arrival_time_ms - nominal) <= 10.0);
        CHECK(m.size_bytes == 48);
    }
    CHECK_THROWS_AS(TelemetrySource(p, 0, 60.0), ParameterError);
    CHECK_THROWS_AS(TelemetrySource(p, 0, -1.0), ParameterError);
}

TEST_CASE("profile files") {
    std::istringstream good("# type period payload phase\n1 100 20 0\n2 250.5 40 12.5  # trailing comment\n\n");
    const auto p = parse_profile(good, 28);
    REQUIRE(p.specs.size() == 2);
    CHECK(p.specs[1].period_ms == 250.5);
    CHECK(p.overhead_bytes_per_msg == 28);
    CHECK(p.bit_rate_bps() == doctest::Approx(10.0 * 48 * 8 + 1000.0 / 250.5 * 68 * 8));

    std::istringstream short_line("1 100 20\n");
    CHECK_THROWS_AS(parse_profile(short_line, 28), FormatError);
    std::istringstream extra("1 100 20 0 9\n");
    CHECK_THROWS_AS(parse_profile(extra, 28), FormatError);
    std::istringstream bad_payload("1 100 41 0\n");
    CHECK_THROWS_AS(parse_profile(bad_payload, 28), FormatError);
    std::istringstream bad_period("1 99 20 0\n");
    CHECK_THROWS_AS(parse_profile(bad_period, 28), FormatError);
    CHECK_THROWS_AS(load_profile("/nonexistent/profile.txt", 28), IoError);
}

TEST_CASE("background demand always exceeds one subframe of the cell") {
    const auto& t = default_tbs_table();
    for (int n : {25, 50, 100}) {
        for (int m : {0, 7, 28}) {
            const CellConfig c{n, m};
            for (Subframe sf : {0LL, 1LL, 899'999LL}) {
                CHECK(background_demand(sf, c, t) >= tbs_lookup(t, n, m) / 8 + 1);
            }
        }
    }
}
