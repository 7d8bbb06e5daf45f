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

#include "ulsched/sweep.hpp"

#include "ulsched/errors.hpp"
#include "svg_plot.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

namespace ulsched {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr const char* kSweepHeader =
    "period_ms,alpha,seed,count,mean_ms,std_ms,p999_ms,exceed50,prbs_per_grant,alloc_bps,overalloc,users";
constexpr const char* kTable1Header = "selection,alpha,period_ms,mean_ms,p999_ms,std_ms,overalloc";
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

plot::Panel make_panel(std::string title, std::string x_label, std::string y_label) {
    plot::Panel p;
    p.title = std::move(title);
    p.x_label = std::move(x_label);
    p.y_label = std::move(y_label);
    return p;
}

plot::Series make_series(std::string label, std::string color) {
    plot::Series s;
    s.label = std::move(label);
    s.color = std::move(color);
    return s;
}

std::string alpha_label(double alpha) { return "alpha=" + num(alpha); }

const char* color(std::size_t i) { return kPalette[i % std::size(kPalette)]; }

struct Point {
    int period_ms = 0;
    double alpha = 0.0;
    int runs = 0;
    double mean_ms = 0.0, std_ms = 0.0, p999_ms = 0.0, exceed = 0.0, overalloc = kNaN;
};

// Repetitions of one grid point averaged; points that never produced samples are dropped.
std::vector<Point> aggregate(const SweepResult& result) {
    std::vector<Point> points;
    for (const auto& row : result.rows) {
        if (row.status != PointStatus::ok) continue;
        auto it = std::find_if(points.begin(), points.end(), [&](const Point& p) {
            return p.period_ms == row.period_ms && p.alpha == row.alpha;
        });
        if (it == points.end()) {
            points.push_back({row.period_ms, row.alpha});
            it = std::prev(points.end());
        }
        ++it->runs;
        it->mean_ms += row.stats.mean_ms;
        it->std_ms += row.stats.std_ms;
        it->p999_ms += row.stats.p999_ms;
        it->exceed += row.stats.exceed_freq;
        it->overalloc = row.resources.overalloc_ratio;
    }
    for (auto& p : points) {
        p.mean_ms /= p.runs;
        p.std_ms /= p.runs;
        p.p999_ms /= p.runs;
        p.exceed /= p.runs;
    }
    return points;
}

std::vector<double> distinct_alphas(const SweepResult& result) {
    std::vector<double> out;
    for (const auto& r : result.rows) {
        if (std::find(out.begin(), out.end(), r.alpha) == out.end()) out.push_back(r.alpha);
    }
    return out;
}

std::vector<int> distinct_periods(const SweepResult& result) {
    std::vector<int> out;
    for (const auto& r : result.rows) {
        if (std::find(out.begin(), out.end(), r.period_ms) == out.end()) out.push_back(r.period_ms);
    }
    std::sort(out.begin(), out.end());
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path.string(), "cannot open for writing");
    out << text;
    out.flush();
    if (!out) throw IoError(path.string(), "write failed");
}

std::string fig2(const SweepResult& result) {
    auto panel = make_panel("Mean delay (error bars: one std)", "grant period [ms]", "delay [ms]");
    const auto points = aggregate(result);
    const auto alphas = distinct_alphas(result);
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        auto s = make_series(alpha_label(alphas[i]), color(i));
        for (const auto& p : points) {
            if (p.alpha != alphas[i]) continue;
            s.x.push_back(p.period_ms);
            s.y.push_back(p.mean_ms);
            s.err.push_back(p.std_ms);
        }
        panel.series.push_back(std::move(s));
    }
    auto half = make_series("6 ms + p/2", "#777");
    auto full = make_series("6 ms + p", "#aaa");
    half.dashed = full.dashed = true;
    for (int p : distinct_periods(result)) {
        half.x.push_back(p);
        half.y.push_back(6.0 + p / 2.0);
        full.x.push_back(p);
        full.y.push_back(6.0 + p);
    }
    panel.series.push_back(std::move(half));
    panel.series.push_back(std::move(full));
    return plot::render({panel}, 520.0, 360.0);
}

std::string fig3(const SweepResult& result) {
    auto tail = make_panel("99.9th percentile of delay", "grant period [ms]", "delay [ms]");
    auto late = make_panel("Fraction of delays above 50 ms", "grant period [ms]", "relative frequency");
    late.log_y = true;
    tail.ref_lines.push_back({kDeadlineMs, "50 ms"});
    late.ref_lines.push_back({1e-3, "1e-3"});
    const auto points = aggregate(result);
    const auto alphas = distinct_alphas(result);
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        auto a = make_series(alpha_label(alphas[i]), color(i));
        auto b = make_series(alpha_label(alphas[i]), color(i));
        for (const auto& p : points) {
            if (p.alpha != alphas[i]) continue;
            a.x.push_back(p.period_ms);
            a.y.push_back(p.p999_ms);
            b.x.push_back(p.period_ms);
            b.y.push_back(p.exceed);
        }
        tail.series.push_back(std::move(a));
        late.series.push_back(std::move(b));
    }
    return plot::render({tail, late});
}

std::string fig4(const SweepResult& result, const CellConfig& cell, std::int64_t rate,
                 const TbsTable& table) {
    auto alloc = make_panel("Allocated rate / mean rate", "grant period [ms]", "over-allocation");
    auto prbs = make_panel("PRBs per grant", "grant period [ms]", "PRBs");
    auto users = make_panel("Users supported", "grant period [ms]", "users");
    std::vector<int> mcs_list{cell.mcs_index};
    if (cell.mcs_index != 0) mcs_list.push_back(0);
    const auto alphas = distinct_alphas(result);
    const auto periods = distinct_periods(result);
    for (int mcs : mcs_list) {
        CellConfig c = cell;
        c.mcs_index = mcs;
        for (std::size_t i = 0; i < alphas.size(); ++i) {
            const std::string label = alpha_label(alphas[i]) + " MCS " + std::to_string(mcs);
            auto a = make_series(label, color(i));
            auto n = make_series(label, color(i));
            auto u = make_series(label, color(i));
            a.dashed = n.dashed = u.dashed = mcs != cell.mcs_index;
            for (int p : periods) {
                PersistentFlowConfig flow{rate, p, ProvisioningFactor(alphas[i]), 0};
                try {
                    const auto m = resource_metrics(flow, c, table);
                    a.x.push_back(p);
                    a.y.push_back(m.overalloc_ratio);
                    n.x.push_back(p);
                    n.y.push_back(m.prbs_per_grant);
                    u.x.push_back(p);
                    u.y.push_back(static_cast<double>(m.users_supported));
                } catch (const InfeasibleAllocation&) {
                    // beyond the cell at this MCS; left out of the curve
                }
            }
            alloc.series.push_back(std::move(a));
            prbs.series.push_back(std::move(n));
            users.series.push_back(std::move(u));
        }
    }
    alloc.log_y = true;
    users.log_y = true;
    return plot::render({alloc, prbs, users}, 440.0, 340.0);
}

} // namespace

std::vector<int> default_periods() {
    std::vector<int> p;
    for (int v = 1; v <= 50; v += 3) p.push_back(v);
    return p;
}

void SweepSpec::validate() const {
    if (periods_ms.empty()) throw ParameterError("periods_ms", "must not be empty");
    if (alphas.empty()) throw ParameterError("alphas", "must not be empty");
    for (int p : periods_ms) {
        if (p < 1) throw ParameterError("periods_ms", "every period must be >= 1, got " + std::to_string(p));
    }
    for (double a : alphas) {
        if (!(a >= 1.0)) throw ParameterError("alphas", "every provisioning factor must be >= 1");
    }
    if (repetitions < 1) throw ParameterError("repetitions", "must be >= 1");
    if (!seeds.empty() && seeds.size() != static_cast<std::size_t>(repetitions)) {
        throw ParameterError("seeds", "need one seed per repetition");
    }
    if (jobs < 0) throw ParameterError("jobs", "must be >= 0");
    base.validate();
}

std::vector<std::uint64_t> SweepSpec::seed_list() const {
    if (!seeds.empty()) return seeds;
    std::vector<std::uint64_t> out;
    for (int k = 0; k < repetitions; ++k) out.push_back(base.seed + static_cast<std::uint64_t>(k));
    return out;
}

std::string_view to_string(PointStatus status) {
    switch (status) {
    case PointStatus::ok: return "ok";
    case PointStatus::infeasible: return "infeasible";
    case PointStatus::no_samples: return "no_samples";
    }
    return "?";
}

SweepResult run_sweep(const SweepSpec& spec, const TbsTable& table) {
    spec.validate();
    const auto seeds = spec.seed_list();

    SweepResult result;
    for (int p : spec.periods_ms) {
        for (double a : spec.alphas) {
            for (auto seed : seeds) {
                SweepRow row;
                row.period_ms = p;
                row.alpha = a;
                row.seed = seed;
                result.rows.push_back(row);
            }
        }
    }

    auto run_point = [&](SweepRow& row) {
        SimConfig cfg = spec.base;
        PersistentFlowConfig flow = cfg.flow.value_or(PersistentFlowConfig{});
        flow.period_subframes = row.period_ms;
        flow.provisioning_factor = ProvisioningFactor(row.alpha);
        cfg.flow = flow;
        cfg.seed = row.seed;
        row.stats = DelayStats{0, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN};
        try {
            row.resources = resource_metrics(flow, cfg.cell, table);
            const auto records = run(cfg, table);
            row.stats = summarize(records);
        } catch (const InfeasibleAllocation& e) {
            row.status = PointStatus::infeasible;
            row.detail = e.what();
        } catch (const OversubscriptionError& e) {
            row.status = PointStatus::infeasible;
            row.detail = e.what();
        } catch (const EmptySampleError& e) {
            row.status = PointStatus::no_samples;
            row.detail = e.what();
        }
    };

    unsigned workers = spec.jobs > 0 ? static_cast<unsigned>(spec.jobs) : std::thread::hardware_concurrency();
    workers = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(result.rows.size()));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto work = [&] {
        for (std::size_t i = next++; i < result.rows.size() && !failed; i = next++) {
            try {
                run_point(result.rows[i]);
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);
    return result;
}

std::vector<Table1Row> select_table1(const SweepResult& result, double deadline_ms) {
    const auto points = aggregate(result);
    std::vector<Table1Row> rows;
    for (double a : distinct_alphas(result)) {
        const Point* best = nullptr;
        for (const auto& p : points) {
            if (p.alpha != a || !(p.p999_ms <= deadline_ms)) continue;
            if (!best || p.overalloc < best->overalloc ||
                (p.overalloc == best->overalloc && p.period_ms > best->period_ms)) {
                best = &p;
            }
        }
        if (best) {
            rows.push_back({"least_resource", a, best->period_ms, best->mean_ms, best->p999_ms, best->std_ms,
                            best->overalloc});
        }
    }
    const Point* fastest = nullptr;
    for (const auto& p : points) {
        if (!fastest || p.mean_ms < fastest->mean_ms) fastest = &p;
    }
    if (fastest) {
        rows.push_back({"min_mean", fastest->alpha, fastest->period_ms, fastest->mean_ms, fastest->p999_ms,
                        fastest->std_ms, fastest->overalloc});
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
    out << kSweepHeader << '\n';
    for (const auto& r : result.rows) {
        const bool sized = r.status != PointStatus::infeasible;
        const bool ran = r.status == PointStatus::ok;
        out << r.period_ms << ',' << num(r.alpha) << ',' << r.seed << ',' << (ran ? r.stats.count : 0) << ','
            << num(ran ? r.stats.mean_ms : kNaN) << ',' << num(ran ? r.stats.std_ms : kNaN) << ','
            << num(ran ? r.stats.p999_ms : kNaN) << ',' << num(ran ? r.stats.exceed_freq : kNaN) << ','
            << (sized ? std::to_string(r.resources.prbs_per_grant) : "nan") << ','
            << num(sized ? r.resources.allocated_bps : kNaN) << ','
            << num(sized ? r.resources.overalloc_ratio : kNaN) << ','
            << (sized ? std::to_string(r.resources.users_supported) : "nan") << '\n';
    }
}

SweepResult read_sweep_csv(std::istream& in, std::string_view source) {
    const std::string src(source);
    std::string line;
    if (!std::getline(in, line) || line != kSweepHeader) throw FormatError(src, 1, "missing sweep.csv header");
    SweepResult result;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
        if (f.size() != 12) throw FormatError(src, line_no, "expected 12 fields, got " + std::to_string(f.size()));
        auto real = [&](const std::string& s) {
            char* end = nullptr;
            const double v = std::strtod(s.c_str(), &end);
            if (end == s.c_str() || *end != '\0') throw FormatError(src, line_no, "bad number `" + s + "`");
            return v;
        };
        SweepRow r;
        r.period_ms = static_cast<int>(real(f[0]));
        r.alpha = real(f[1]);
        r.seed = std::strtoull(f[2].c_str(), nullptr, 10);
        r.stats.count = static_cast<std::int64_t>(real(f[3]));
        r.stats.mean_ms = real(f[4]);
        r.stats.std_ms = real(f[5]);
        r.stats.p999_ms = real(f[6]);
        r.stats.exceed_freq = real(f[7]);
        const double prbs = real(f[8]);
        r.resources.allocated_bps = real(f[9]);
        r.resources.overalloc_ratio = real(f[10]);
        const double users = real(f[11]);
        if (std::isnan(prbs)) {
            r.status = PointStatus::infeasible;
        } else {
            r.resources.prbs_per_grant = static_cast<int>(prbs);
            r.resources.users_supported = static_cast<std::int64_t>(users);
            if (r.stats.count == 0) r.status = PointStatus::no_samples;
        }
        result.rows.push_back(r);
    }
    return result;
}

void write_table1_csv(std::ostream& out, const std::vector<Table1Row>& rows) {
    out << kTable1Header << '\n';
    for (const auto& r : rows) {
        out << r.selection << ',' << num(r.alpha) << ',' << r.period_ms << ',' << num(r.mean_ms) << ','
            << num(r.p999_ms) << ',' << num(r.std_ms) << ',' << num(r.overalloc) << '\n';
    }
}

std::vector<std::string> emit(const SweepResult& result, const std::string& out_dir, const CellConfig& cell,
                              std::int64_t mean_rate_bps, const TbsTable& table) {
    namespace fs = std::filesystem;
    const fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError(out_dir, "cannot create directory: " + ec.message());

    std::vector<std::string> written;
    auto put = [&](const char* name, const std::string& text) {
        write_file(dir / name, text);
        written.push_back((dir / name).string());
    };
    std::ostringstream sweep, table1;
    write_sweep_csv(sweep, result);
    write_table1_csv(table1, select_table1(result));
    put("sweep.csv", sweep.str());
    put("table1.csv", table1.str());
    put("fig2_delay.svg", fig2(result));
    put("fig3_reliability.svg", fig3(result));
    put("fig4_resources.svg", fig4(result, cell, mean_rate_bps, table));
    return written;
}

} // namespace ulsched
