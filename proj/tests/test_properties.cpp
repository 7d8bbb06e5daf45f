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

#include "generators.hpp"

#include "ulsched/engine.hpp"
#include "ulsched/errors.hpp"
#include "ulsched/metrics.hpp"
#include "ulsched/sweep.hpp"

#include <algorithm>
#include <sstream>

using namespace ulsched;

TEST_CASE("property: grant_size is the smallest sufficient PRB count") {
    gen::for_all(400, 1, [](gen::Rng& g) {
        const auto r = g.integer(1, 200'000);
        const int p = static_cast<int>(g.integer(1, 60));
        const int m = static_cast<int>(g.integer(0, kMaxMcs));
        const auto num = g.integer(100, 400); // alpha = num / 100
        const auto alpha = ProvisioningFactor::from_ratio(num, 100);
        const std::int64_t need_x100000 = r * p * num; // threshold * 100 * 1000
        try {
            const int n = grant_size(r, p, alpha, m);
            CHECK(tbs_lookup(n, m) * 100'000 >= need_x100000);
            if (n > 1) CHECK(tbs_lookup(n - 1, m) * 100'000 < need_x100000);
        } catch (const InfeasibleAllocation&) {
            CHECK(tbs_lookup(kMaxPrbs, m) * 100'000 < need_x100000);
        }
    });
}

TEST_CASE("property: schedule_subframe never oversubscribes the cell") {
    gen::for_all(200, 2, [](gen::Rng& g) {
        const CellConfig cell{static_cast<int>(g.pick(std::vector<int>{25, 50, 75, 100})),
                              static_cast<int>(g.integer(0, kMaxMcs))};
        std::vector<std::pair<UserId, PersistentFlowConfig>> flows;
        std::vector<PersistentFlowConfig> shapes;
        const int k = static_cast<int>(g.integer(0, 5));
        for (int i = 0; i < k; ++i) {
            const int p = static_cast<int>(g.pick(std::vector<int>{1, 2, 4, 5, 10, 20}));
            shapes.push_back({g.integer(1'000, 40'000), p, ProvisioningFactor(g.real(1.0, 2.0)), 0});
        }
        std::vector<int> offsets;
        try {
            if (!shapes.empty()) offsets = assign_phase_offsets(default_tbs_table(), shapes, cell);
        } catch (const std::exception&) {
            return; // infeasible draw, nothing to schedule
        }
        for (int i = 0; i < k; ++i) {
            auto f = shapes[static_cast<std::size_t>(i)];
            f.phase_offset = offsets[static_cast<std::size_t>(i)];
            flows.emplace_back(static_cast<UserId>(10 + i), f);
        }
        const UplinkScheduler s(default_tbs_table(), cell, flows);
        std::vector<BufferReport> pending;
        std::vector<UserId> sr;
        for (UserId u = 100; u < 100 + g.integer(0, 6); ++u) {
            if (g.coin()) pending.push_back({u, g.integer(0, 100'000)});
            if (g.coin(0.3)) sr.push_back(u);
        }
        for (Subframe sf = 0; sf < 40; ++sf) {
            const auto grants = s.schedule_subframe(sf, pending, sr);
            int total = 0;
            for (const auto& x : grants) {
                total += x.prb_count;
                CHECK(x.prb_count >= 1);
                CHECK(x.tbs_bits == tbs_lookup(x.prb_count, cell.mcs_index));
            }
            CHECK(total <= cell.bandwidth_prbs);
            for (const auto& pu : s.persistent_users()) {
                const bool due = (sf - pu.flow.phase_offset) % pu.flow.period_subframes == 0;
                const auto hit = std::count_if(grants.begin(), grants.end(), [&](const SubframeGrant& x) {
                    return x.user_id == pu.user_id && x.kind == GrantKind::persistent && x.prb_count == pu.prb_count;
                });
                CHECK(hit == (due ? 1 : 0));
            }
        }
    });
}

TEST_CASE("property: capacity formula is tight for identical flows") {
    gen::for_all(60, 3, [](gen::Rng& g) {
        const int N = static_cast<int>(g.integer(1, 30));
        const int n = static_cast<int>(g.integer(1, N));
        const int p = static_cast<int>(g.integer(1, 12));
        const PersistentFlowConfig f{tbs_lookup(n, 7) * 1000 / p, p, {}, 0};
        const auto cap = supported_users(N, n, p);
        std::vector<PersistentFlowConfig> flows(static_cast<std::size_t>(cap), f);
        const auto offsets = assign_phase_offsets(default_tbs_table(), flows, CellConfig{N, 7});
        for (int o : offsets) {
            CHECK(o >= 0);
            CHECK(o < p);
        }
        flows.push_back(f);
        CHECK_THROWS_AS(assign_phase_offsets(default_tbs_table(), flows, CellConfig{N, 7}), OversubscriptionError);
    });
}

TEST_CASE("property: summarize is permutation invariant and bounded") {
    gen::for_all(200, 4, [](gen::Rng& g) {
        std::vector<double> d(static_cast<std::size_t>(g.integer(1, 3'000)));
        for (auto& x : d) x = g.coin(0.1) ? g.real(50.0, 400.0) : g.real(6.0, 50.0);
        const auto a = summarize(std::span<const double>(d));
        g.shuffle(d);
        const auto b = summarize(std::span<const double>(d));
        CHECK(a.mean_ms == b.mean_ms);
        CHECK(a.std_ms == b.std_ms);
        CHECK(a.p999_ms == b.p999_ms);
        CHECK(a.exceed_freq == b.exceed_freq);
        CHECK(a.exceed_freq >= 0.0);
        CHECK(a.exceed_freq <= 1.0);
        CHECK(a.p999_ms >= a.min_ms);
        CHECK(a.p999_ms <= a.max_ms);
        CHECK(std::find(d.begin(), d.end(), a.p999_ms) != d.end());
    });
}

TEST_CASE("property: the engine conserves bytes and keeps FIFO order") {
    gen::for_all(12, 5, [](gen::Rng& g) {
        SimConfig c;
        c.duration_ms = 15'000;
        c.warmup_ms = static_cast<std::int64_t>(g.integer(0, 2'000));
        c.seed = g.next();
        c.verify_invariants = true;
        c.background = g.coin();
        c.overheads = {static_cast<int>(g.integer(0, 3)), static_cast<int>(g.integer(0, 2))};
        c.jitter_ms = g.coin() ? g.real(0.0, 20.0) : 0.0;
        const bool persistent = g.coin(0.8);
        if (persistent) {
            c.flow = PersistentFlowConfig{19'500, static_cast<int>(g.integer(1, 50)), ProvisioningFactor(g.real(1.2, 3.0)),
                                          0};
        } else {
            c.flow.reset();
        }
        c.cell.mcs_index = static_cast<int>(g.integer(5, 20));
        RunResult r;
        try {
            r = run_detailed(c);
        } catch (const InfeasibleAllocation&) {
            return;
        }
        const auto& k = r.counters;
        CHECK(k.injected_bytes == k.buffered_bytes + k.carried_bytes);
        for (std::size_t i = 1; i < r.records.size(); ++i) {
            CHECK(r.records[i].seq > r.records[i - 1].seq);
            CHECK(r.records[i].delivery_time_ms >= r.records[i - 1].delivery_time_ms);
        }
        for (const auto& rec : r.records) {
            CHECK(rec.delivery_time_ms >= static_cast<double>(c.warmup_ms));
            if (persistent) CHECK(rec.delay_ms >= 6.0);
        }
    });
}

TEST_CASE("property: splitting the telemetry horizon anywhere preserves the stream") {
    gen::for_all(30, 6, [](gen::Rng& g) {
        const auto seed = g.next();
        const double jitter = g.coin() ? g.real(0.0, 40.0) : 0.0;
        TelemetrySource whole(default_profile(seed), seed, jitter), parts(default_profile(seed), seed, jitter);
        const double end = g.real(1'000.0, 30'000.0);
        const auto all = whole.next(end);
        std::vector<double> cuts{end};
        for (int i = 0; i < 8; ++i) cuts.push_back(g.real(0.0, end));
        std::sort(cuts.begin(), cuts.end());
        std::vector<Message> joined;
        for (double h : cuts) {
            const auto chunk = parts.next(h);
            joined.insert(joined.end(), chunk.begin(), chunk.end());
        }
        CHECK(joined == all);
    });
}

TEST_CASE("property: sweep csv survives a write/read cycle") {
    gen::for_all(50, 7, [](gen::Rng& g) {
        SweepResult r;
        const int rows = static_cast<int>(g.integer(0, 20));
        for (int i = 0; i < rows; ++i) {
            SweepRow x;
            x.period_ms = static_cast<int>(g.integer(1, 50));
            x.alpha = g.pick(std::vector<double>{1.0, 1.5, 2.0, 1.25});
            x.seed = g.next() >> 20;
            x.status = g.coin(0.9) ? PointStatus::ok : PointStatus::infeasible;
            x.stats = {g.integer(1, 50'000), g.real(6, 300), g.real(0, 100), g.real(6, 900), 6.0, 900.0, g.real(0, 1)};
            x.resources = {static_cast<int>(g.integer(1, 25)), 0, g.real(1e3, 2e5), g.real(1, 6), g.integer(0, 1'250)};
            r.rows.push_back(x);
        }
        std::ostringstream out;
        write_sweep_csv(out, r);
        std::istringstream in(out.str());
        const auto back = read_sweep_csv(in);
        REQUIRE(back.rows.size() == r.rows.size());
        for (std::size_t i = 0; i < r.rows.size(); ++i) {
            CHECK(back.rows[i].status == r.rows[i].status);
            CHECK(back.rows[i].seed == r.rows[i].seed);
            if (r.rows[i].status != PointStatus::ok) continue;
            CHECK(back.rows[i].stats.mean_ms == doctest::Approx(r.rows[i].stats.mean_ms).epsilon(1e-5));
            CHECK(back.rows[i].stats.exceed_freq == doctest::Approx(r.rows[i].stats.exceed_freq).epsilon(1e-5));
            CHECK(back.rows[i].resources.allocated_bps == doctest::Approx(r.rows[i].resources.allocated_bps).epsilon(1e-5));
        }
        std::ostringstream again;
        write_sweep_csv(again, back);
        CHECK(again.str() == out.str());
    });
}

TEST_CASE("property: table 1 picks the cheapest reliable point per alpha") {
    gen::for_all(100, 8, [](gen::Rng& g) {
        SweepResult r;
        for (int p : default_periods()) {
            for (double a : {1.0, 1.5, 2.0}) {
                SweepRow x;
                x.period_ms = p;
                x.alpha = a;
                x.stats.count = 10;
                x.stats.mean_ms = g.real(6, 80);
                x.stats.p999_ms = g.real(10, 120);
                x.resources.overalloc_ratio = g.real(1, 6);
                r.rows.push_back(x);
            }
        }
        const auto t = select_table1(r);
        for (const auto& sel : t) {
            if (sel.selection != "least_resource") continue;
            CHECK(sel.p999_ms <= 50.0);
            for (const auto& x : r.rows) {
                if (x.alpha == sel.alpha && x.stats.p999_ms <= 50.0) CHECK(x.resources.overalloc_ratio >= sel.overalloc);
            }
        }
        REQUIRE_FALSE(t.empty());
        CHECK(t.back().selection == "min_mean");
        for (const auto& x : r.rows) CHECK(x.stats.mean_ms >= t.back().mean_ms);
    });
}
