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

#include "ulsched/engine.hpp"
#include "ulsched/errors.hpp"
#include "ulsched/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace ulsched;

namespace {

Message msg(std::int64_t seq, int bytes, double at = 0.0) { return {at, bytes, 1, seq, seq}; }

SubframeGrant grant(std::int64_t bits, UserId user = kUavUser) {
    return {user, 0, 1, bits, GrantKind::persistent};
}

SimConfig short_config(int period, double alpha, std::int64_t duration_ms = 60'000) {
    SimConfig c;
    c.flow = PersistentFlowConfig{19'500, period, ProvisioningFactor(alpha), 0};
    c.duration_ms = duration_ms;
    c.warmup_ms = 1'000;
    return c;
}

// One message, default pipeline, no background: delivery time predicted by
// walking the SR -> BSR grant -> report -> data grant chain by hand.
double predicted_default_delay(double arrival, const SignalingConfig& s, int sr_phase) {
    auto sr = static_cast<std::int64_t>(std::floor(arrival)) + 1;
    while ((sr - sr_phase) % s.sr_period_subframes != 0) ++sr;
    const int hop = 1 + s.processing_delay_subframes;
    const double delivered = static_cast<double>(sr + 3 * hop + 2 * s.grant_advance_subframes);
    return delivered - arrival;
}

} // namespace

TEST_CASE("drain: 13 byte grant with MAC headers fragments a 25 byte message") {
    UeState ue(kUavUser);
    ue.enqueue(msg(0, 25));
    const auto r = drain_grant(ue, grant(104), HeaderOverheads{3, 2});
    CHECK(r.bytes_carried == 8);
    CHECK(r.completed.empty());
    CHECK(ue.buffered_bytes() == 17);
    CHECK(ue.buffer().front().remaining_bytes == 17);

    const auto r2 = drain_grant(ue, grant(104), HeaderOverheads{3, 2});
    CHECK(r2.bytes_carried == 8);
    CHECK(drain_grant(ue, grant(104), HeaderOverheads{3, 2}).bytes_carried == 8);
    const auto r4 = drain_grant(ue, grant(104), HeaderOverheads{3, 2});
    CHECK(r4.bytes_carried == 1);
    REQUIRE(r4.completed.size() == 1);
    CHECK(r4.completed[0].seq == 0);
    CHECK(ue.buffered_bytes() == 0);
}

TEST_CASE("drain: empty buffer wastes the grant") {
    UeState ue(kUavUser);
    const auto r = drain_grant(ue, grant(1'000), HeaderOverheads{});
    CHECK(r.bytes_carried == 0);
    CHECK(r.completed.empty());
}

TEST_CASE("drain: large grant empties the buffer in FIFO order") {
    UeState ue(kUavUser);
    ue.enqueue(msg(0, 30));
    ue.enqueue(msg(1, 40));
    ue.enqueue(msg(2, 10));
    const auto r = drain_grant(ue, grant((80 + 3 + 3 * 2) * 8), HeaderOverheads{3, 2});
    CHECK(r.bytes_carried == 80);
    REQUIRE(r.completed.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(r.completed[i].seq == static_cast<std::int64_t>(i));
    CHECK(ue.buffered_bytes() == 0);
    CHECK(ue.recount_bytes() == 0);
}

TEST_CASE("drain: header-only room carries nothing") {
    UeState ue(kUavUser);
    ue.enqueue(msg(0, 5));
    CHECK(drain_grant(ue, grant(5 * 8), HeaderOverheads{3, 2}).bytes_carried == 0);
    CHECK(drain_grant(ue, grant(6 * 8), HeaderOverheads{3, 2}).bytes_carried == 1);
}

TEST_CASE("drain: a grant for another user is refused") {
    UeState ue(kUavUser);
    CHECK_THROWS_AS(drain_grant(ue, grant(104, kBackgroundUser), HeaderOverheads{}), ParameterError);
}

TEST_CASE("zero-traffic profile gives no records") {
    auto c = short_config(10, 1.5);
    c.profile = TelemetryProfile{};
    const auto r = run_detailed(c);
    CHECK(r.records.empty());
    CHECK(r.counters.messages_injected == 0);
    CHECK(r.counters.persistent_grants == 6'000);
    CHECK_THROWS_AS(summarize(r.records), EmptySampleError);
}

TEST_CASE("background user does not change UAV delays") {
    for (int p : {1, 10, 25}) {
        auto with = short_config(p, 1.5);
        auto without = with;
        without.background = false;
        CHECK(run(with) == run(without));
    }
}

TEST_CASE("background absorbs every PRB the persistent flow leaves") {
    auto c = short_config(1, 1.0, 2'000);
    int checked = 0;
    run_detailed(c, default_tbs_table(), [&](Subframe sf, std::span<const SubframeGrant> grants) {
        if (sf < 20) return; // background SR/BSR chain still starting
        int persistent = 0, background = 0;
        for (const auto& g : grants) {
            (g.kind == GrantKind::persistent ? persistent : background) += g.prb_count;
        }
        CHECK(persistent == 1);
        CHECK(background == 24);
        ++checked;
    });
    CHECK(checked > 1'900);
}

TEST_CASE("persistent delays respect the floor, FIFO order and conservation") {
    for (int p : {1, 7, 19, 49}) {
        auto c = short_config(p, 2.0);
        c.verify_invariants = true;
        const auto r = run_detailed(c);
        REQUIRE_FALSE(r.records.empty());
        for (std::size_t i = 0; i < r.records.size(); ++i) {
            CHECK(r.records[i].delay_ms >= 6.0);
            if (i > 0) {
                CHECK(r.records[i].seq > r.records[i - 1].seq);
                CHECK(r.records[i].delivery_time_ms >= r.records[i - 1].delivery_time_ms);
            }
        }
        const auto& k = r.counters;
        CHECK(k.injected_bytes == k.buffered_bytes + k.carried_bytes);
        CHECK(k.subframes == c.duration_ms);
    }
}

TEST_CASE("default pipeline: single message replay matches the hop count") {
    const SignalingConfig s{};
    const int sr_phase = static_cast<int>(kUavUser % 10);
    for (double arrival : {100.0, 100.5, 101.0, 101.999, 104.25, 109.0, 110.0}) {
        CAPTURE(arrival);
        SimConfig c;
        c.flow.reset();
        c.background = false;
        c.duration_ms = 400;
        c.warmup_ms = 0;
        TelemetryProfile p;
        p.overhead_bytes_per_msg = 28;
        p.specs.push_back({1, 11'000.0, 24, arrival});
        c.profile = p;
        const auto records = run(c);
        REQUIRE(records.size() == 1);
        CHECK(records[0].delay_ms == doctest::Approx(predicted_default_delay(arrival, s, sr_phase)));
        CHECK(records[0].delay_ms > 6.0);
    }
}

TEST_CASE("default pipeline carries the full telemetry stream") {
    SimConfig c;
    c.flow.reset();
    c.background = false;
    c.duration_ms = 60'000;
    c.warmup_ms = 1'000;
    c.verify_invariants = true;
    const auto r = run_detailed(c);
    const auto stats = summarize(r.records);
    CHECK(stats.min_ms > 6.0);
    CHECK(stats.mean_ms > 6.0);
    CHECK(r.counters.messages_delivered > 2'700);
}

TEST_CASE("sample count over fifteen minutes") {
    SimConfig c;
    const auto records = run(c);
    CHECK(records.size() >= 40'000);
    CHECK(records.size() <= 43'500);
}

TEST_CASE("trace output") {
    const std::vector<DelayRecord> recs{{3, 2, 10.5, 17.0, 6.5}};
    std::ostringstream out;
    write_trace(out, recs);
    CHECK(out.str() == "3 2 10.500000 17.000000 6.500000\n");
    CHECK_THROWS_AS(write_trace("/nonexistent/dir/trace.txt", recs), IoError);
}

TEST_CASE("configuration errors surface before the run") {
    auto c = short_config(10, 1.0);
    c.warmup_ms = c.duration_ms;
    CHECK_THROWS_AS(run(c), ParameterError);
    c = short_config(10, 1.0);
    c.overheads.per_segment_bytes = -1;
    CHECK_THROWS_AS(run(c), ParameterError);
    c = short_config(49, 2.0);
    c.cell = {25, 0};
    CHECK_THROWS_AS(run(c), InfeasibleAllocation);
}
