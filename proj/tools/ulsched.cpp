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

// ulsched: run one persistent-scheduling configuration or the full grid sweep.
//
//   ulsched --period 10 --alpha 1.5 --trace delays.txt
//   ulsched --sweep --out results/ --jobs 8
//   ulsched --config run.conf --seed 3
//
// The config file holds `flag-name = value` lines (the long flag without its
// dashes); flags given on the command line win. ULSCHED_TBS_TABLE points at an
// alternative TBS table file.

#include "ulsched/engine.hpp"
#include "ulsched/errors.hpp"
#include "ulsched/metrics.hpp"
#include "ulsched/sweep.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>

using namespace ulsched;

namespace {

struct Options {
    int period = 1;
    double alpha = 1.0;
    int mcs = 7;
    int prbs = 25;
    std::int64_t rate_bps = 19'500;
    std::int64_t duration_ms = 900'000;
    std::int64_t warmup_ms = 10'000;
    std::uint64_t seed = 0;
    std::string out;
    bool sweep = false;
    std::vector<int> periods = default_periods();
    std::vector<double> alphas{1.0, 1.5, 2.0};
    int repetitions = 1;
    int jobs = 0;
    std::string profile;
    std::string trace;
    bool no_background = false;
    bool default_pipeline = false;
    int sr_period = 10;
    int grant_overhead = 0;
    int segment_overhead = 0;
    int message_overhead = kDefaultMessageOverheadBytes;
    double jitter_ms = 0.0;
    bool verify = false;
};

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

int fail(const char* kind, const std::string& msg, int code = 1) {
    std::cerr << "ulsched: error kind=" << kind << " msg=" << quoted(msg) << '\n';
    return code;
}

SimConfig make_config(const Options& o) {
    SimConfig cfg;
    cfg.cell = {o.prbs, o.mcs};
    cfg.signaling.sr_period_subframes = o.sr_period;
    cfg.duration_ms = o.duration_ms;
    cfg.warmup_ms = o.warmup_ms;
    cfg.seed = o.seed;
    cfg.background = !o.no_background;
    cfg.overheads = {o.grant_overhead, o.segment_overhead};
    cfg.message_overhead_bytes = o.message_overhead;
    cfg.jitter_ms = o.jitter_ms;
    cfg.verify_invariants = o.verify;
    if (o.default_pipeline) {
        cfg.flow.reset();
    } else {
        cfg.flow = PersistentFlowConfig{o.rate_bps, o.period, ProvisioningFactor(o.alpha), 0};
    }
    if (!o.profile.empty()) cfg.profile = load_profile(o.profile, o.message_overhead);
    return cfg;
}

void print_stats(const DelayStats& s) {
    std::printf("count=%lld mean_ms=%.4f std_ms=%.4f p999_ms=%.4f min_ms=%.4f max_ms=%.4f exceed50=%.6g\n",
                static_cast<long long>(s.count), s.mean_ms, s.std_ms, s.p999_ms, s.min_ms, s.max_ms,
                s.exceed_freq);
}

int run_single(const Options& o) {
    const SimConfig cfg = make_config(o);
    const auto result = run_detailed(cfg);
    const auto stats = summarize(result.records);
    print_stats(stats);
    if (cfg.flow) {
        const auto m = resource_metrics(*cfg.flow, cfg.cell);
        std::printf("prbs_per_grant=%d alloc_bps=%.6g overalloc=%.6g users=%lld\n", m.prbs_per_grant,
                    m.allocated_bps, m.overalloc_ratio, static_cast<long long>(m.users_supported));
        if (!o.out.empty()) {
            SweepRow row{o.period, o.alpha, o.seed, PointStatus::ok, {}, stats, m};
            for (const auto& path : emit(SweepResult{{row}}, o.out, cfg.cell, o.rate_bps)) {
                std::printf("wrote %s\n", path.c_str());
            }
        }
    } else if (!o.out.empty()) {
        std::fprintf(stderr, "ulsched: --out ignored for the default pipeline (no persistent grant)\n");
    }
    if (!o.trace.empty()) write_trace(o.trace, result.records);
    return 0;
}

int run_grid(const Options& o) {
    SweepSpec spec;
    spec.periods_ms = o.periods;
    spec.alphas = o.alphas;
    spec.repetitions = o.repetitions;
    spec.jobs = o.jobs;
    spec.base = make_config(o);
    if (!spec.base.flow) spec.base.flow = PersistentFlowConfig{o.rate_bps, 1, ProvisioningFactor(1.0), 0};
    const auto result = run_sweep(spec);
    for (const auto& r : result.rows) {
        if (r.status != PointStatus::ok) {
            std::fprintf(stderr, "ulsched: point period=%d alpha=%g seed=%llu status=%s: %s\n", r.period_ms,
                         r.alpha, static_cast<unsigned long long>(r.seed), std::string(to_string(r.status)).c_str(),
                         r.detail.c_str());
        }
    }
    const std::string dir = o.out.empty() ? "." : o.out;
    for (const auto& path : emit(result, dir, spec.base.cell, o.rate_bps)) std::printf("wrote %s\n", path.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Uplink persistent-scheduling delay simulator"};
    app.set_config("--config", "", "flat key=value config file (flag names without dashes)");
    Options o;
    app.add_option("--period", o.period, "grant period in subframes (ms)")->check(CLI::PositiveNumber);
    app.add_option("--alpha", o.alpha, "provisioning factor, >= 1");
    app.add_option("--mcs", o.mcs, "uplink MCS index 0-28");
    app.add_option("--prbs", o.prbs, "cell bandwidth in PRBs");
    app.add_option("--rate", o.rate_bps, "mean flow rate used for grant sizing, bit/s");
    app.add_option("--duration-ms", o.duration_ms, "simulated time");
    app.add_option("--warmup-ms", o.warmup_ms, "deliveries before this time are not recorded");
    app.add_option("--seed", o.seed, "traffic profile seed");
    app.add_option("--out", o.out, "output directory for CSV tables and SVG plots");
    app.add_flag("--sweep", o.sweep, "run the period x alpha grid instead of one point");
    app.add_option("--periods", o.periods, "sweep periods")->delimiter(',');
    app.add_option("--alphas", o.alphas, "sweep provisioning factors")->delimiter(',');
    app.add_option("--repetitions", o.repetitions, "seeds per sweep point (seed, seed+1, ...)");
    app.add_option("--jobs", o.jobs, "sweep worker threads (0 = hardware concurrency)");
    app.add_option("--profile", o.profile, "telemetry profile file: `type_id period_ms payload_bytes phase_ms`");
    app.add_option("--trace", o.trace, "write per-message delays to this file");
    app.add_flag("--no-background", o.no_background, "disable the full-buffer background user");
    app.add_flag("--default-pipeline", o.default_pipeline, "schedule the UAV through SR/BSR instead");
    app.add_option("--sr-period", o.sr_period, "SR opportunity period in subframes");
    app.add_option("--grant-overhead", o.grant_overhead, "MAC header bytes per transport block");
    app.add_option("--segment-overhead", o.segment_overhead, "header bytes per packed message segment");
    app.add_option("--message-overhead", o.message_overhead, "per-message protocol overhead in bytes");
    app.add_option("--jitter-ms", o.jitter_ms, "uniform +-jitter on telemetry emission times");
    app.add_flag("--verify", o.verify, "check buffer and byte-conservation invariants every subframe");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what(), 2);
    }

    try {
        return o.sweep ? run_grid(o) : run_single(o);
    } catch (const ParameterError& e) {
        return fail("parameter", e.what());
    } catch (const InfeasibleAllocation& e) {
        return fail("infeasible", e.what());
    } catch (const OversubscriptionError& e) {
        return fail("oversubscribed", e.what());
    } catch (const CalibrationError& e) {
        return fail("calibration", e.what());
    } catch (const FormatError& e) {
        return fail("format", e.what());
    } catch (const IoError& e) {
        return fail("io", e.what());
    } catch (const EmptySampleError& e) {
        return fail("empty_sample", e.what());
    } catch (const std::exception& e) {
        return fail("internal", e.what());
    }
}
