// Copyright 2026 The qmetric Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qmetric/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "qmetric/error.hpp"
#include "qmetric/oracles.hpp"

namespace qmetric {

namespace fs = std::filesystem;

namespace {

constexpr double kOneSidedTol = 1e-9;

struct TrialOutput {
    std::vector<TrialRow> rows;
    std::vector<TraceSeries> traces;
    std::vector<std::string> violations;
};

using Job = std::function<TrialOutput()>;

std::size_t thread_budget(std::size_t requested) {
    if (requested > 0) {
        return requested;
    }
    if (const char* env = std::getenv("QMETRIC_THREADS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && v > 0) {
            return v;
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<TrialOutput> run_jobs(const std::vector<Job>& jobs, std::size_t threads) {
    std::vector<TrialOutput> out(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            try {
                out[i] = jobs[i]();
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t n = std::min(threads, jobs.size());
    if (n <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return out;
}

std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial) { return seed ^ static_cast<std::uint64_t>(trial); }

Rng state_rng(std::uint64_t seed) { return Rng(derive_seed(seed, 0x57a7e)); }

void record(TrialOutput& out, const std::string& label, std::size_t trial, std::uint64_t seed,
            const std::string& inputs, const EstimateResult& r) {
    TrialRow row;
    row.trial = trial;
    row.label = label;
    row.inputs_digest = inputs;
    row.estimate = r.estimate;
    row.oracle = r.oracle;
    row.abs_error = r.abs_error;
    row.rel_error = r.rel_error;
    row.iterations = r.iterations();
    row.seed = seed;
    row.wall_time = r.wall_time;
    row.flags = r.flags;
    if (!r.one_sided(kOneSidedTol)) {
        row.flags.push_back("one_sided_violation");
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s trial %zu: estimate %.12g exceeds variational bound %.12g", label.c_str(),
                      trial, r.estimate, *r.variational_bound);
        out.violations.emplace_back(buf);
    }
    out.rows.push_back(std::move(row));
    for (std::size_t s = 0; s < r.traces.size(); ++s) {
        const std::string stage = s < r.stage_names.size() ? r.stage_names[s] : std::to_string(s);
        for (std::size_t k = 0; k < r.traces[s].restarts.size(); ++k) {
            out.traces.push_back({label, trial, stage, k, r.traces[s].restarts[k].losses});
        }
    }
}

std::string fmt_label(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n == 0) {
        return 0.0;
    }
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

PresetRun assemble(const std::string& name, const RunOptions& opts, nlohmann::json config,
                   const std::vector<Job>& jobs) {
    const auto t0 = std::chrono::steady_clock::now();
    PresetRun run;
    run.name = name;
    run.seed = opts.seed;
    run.config = std::move(config);
    run.config["seed"] = opts.seed;
    run.config["shots"] = opts.shots ? nlohmann::json(*opts.shots) : nlohmann::json(nullptr);
    for (auto& t : run_jobs(jobs, thread_budget(opts.threads))) {
        std::move(t.rows.begin(), t.rows.end(), std::back_inserter(run.rows));
        std::move(t.traces.begin(), t.traces.end(), std::back_inserter(run.traces));
        std::move(t.violations.begin(), t.violations.end(), std::back_inserter(run.violations));
    }
    run.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return run;
}

// ---------------------------------------------------------------- presets

const DensityMatrix& plus_density() {
    static const DensityMatrix p = density_from_vector(plus_state());
    return p;
}

DensityMatrix dephased_plus(double p) { return apply_channel(plus_density(), {ChannelKind::dephasing, p}); }

PresetRun preset_table1(const RunOptions& opts) {
    const std::size_t trials = opts.trials.value_or(10);
    const DensityMatrix rho = plus_density();
    const DensityMatrix sigma = dephased_plus(0.7);
    const std::string inputs = digest({&rho.matrix(), &sigma.matrix()});
    std::vector<Job> jobs;
    for (std::size_t t = 0; t < trials; ++t) {
        jobs.push_back([=, &opts] {
            VtdeOptions o;
            o.opt.seed = trial_seed(opts.seed, t);
            o.shots = opts.shots;
            TrialOutput out;
            record(out, "table1", t, o.opt.seed, inputs, vtde(rho, sigma, o));
            return out;
        });
    }
    VtdeOptions d;
    return assemble("table1", opts,
                    {{"algorithm", "vtde"}, {"rho", "plus"}, {"sigma", "dephasing(0.7)"}, {"trials", trials},
                     {"ansatz", to_json(AnsatzSpec{d.family, 2, d.depth})}, {"optimizer", to_json(d.opt)}},
                    jobs);
}

PresetRun preset_table3(const RunOptions& opts) {
    const std::size_t trials = opts.trials.value_or(10);
    const DensityMatrix rho = dephased_plus(0.2);
    const DensityMatrix sigma = dephased_plus(0.9);
    const std::string inputs = digest({&rho.matrix(), &sigma.matrix()});
    std::vector<Job> jobs;
    for (std::size_t t = 0; t < trials; ++t) {
        jobs.push_back([=, &opts] {
            VfeOptions o;
            o.n_r = 1;
            o.opt_purify.seed = trial_seed(opts.seed, t);
            o.opt_fid.seed = derive_seed(o.opt_purify.seed, 2);
            o.shots = opts.shots;
            TrialOutput out;
            record(out, "table3", t, o.opt_purify.seed, inputs, vfe(rho, sigma, o));
            return out;
        });
    }
    VfeOptions d;
    return assemble("table3", opts,
                    {{"algorithm", "vfe"}, {"mode", "vqsl"}, {"n_r", 1}, {"rho", "dephasing(0.2) of plus"},
                     {"sigma", "dephasing(0.9) of plus"}, {"trials", trials},
                     {"purify_depth", d.purify_depth}, {"fidelity_depth", d.fidelity_depth},
                     {"optimizer_purify", to_json(d.opt_purify)}, {"optimizer_fidelity", to_json(d.opt_fid)}},
                    jobs);
}

PresetRun preset_table2(const RunOptions& opts) {
    const std::size_t trials = opts.trials.value_or(10);
    std::vector<Job> jobs;
    nlohmann::json depths = nlohmann::json::object();
    for (int n_a = 1; n_a <= 3; ++n_a) {
        depths["nA" + std::to_string(n_a)] = universal_depth(n_a);
        for (std::size_t i = 0; i < trials; ++i) {
            const std::size_t t = static_cast<std::size_t>(n_a - 1) * trials + i;
            jobs.push_back([=, &opts] {
                const std::uint64_t seed = trial_seed(opts.seed, t);
                Rng rng = state_rng(seed);
                const std::size_t full = std::size_t{1} << n_a;
                const DensityMatrix rho = random_mixed(n_a, full, rng);
                const DensityMatrix sigma = random_mixed(n_a, full, rng);
                VfeOptions o;
                o.n_r = n_a;
                o.fidelity_depth = universal_depth(n_a);
                o.opt_purify.seed = seed;
                o.opt_fid.seed = derive_seed(seed, 2);
                o.shots = opts.shots;
                TrialOutput out;
                record(out, "nA" + std::to_string(n_a), t, seed, digest({&rho.matrix(), &sigma.matrix()}),
                       vfe(rho, sigma, o));
                return out;
            });
        }
    }
    VfeOptions d;
    return assemble("table2", opts,
                    {{"algorithm", "vfe"}, {"mode", "vqsl"}, {"n_r", "n_A"}, {"pairs_per_n_a", trials},
                     {"states", "random full rank"}, {"purify_depth", d.purify_depth},
                     {"fidelity_depth", depths}, {"optimizer_purify", to_json(d.opt_purify)},
                     {"optimizer_fidelity", to_json(d.opt_fid)}},
                    jobs);
}

constexpr int kDeepVtdeDepth = 60;

PresetRun preset_fig2(const RunOptions& opts) {
    const std::size_t reps = opts.trials.value_or(1);
    const std::vector<double> ps{0.1, 0.3, 0.5, 0.7, 0.9};
    const DensityMatrix rho = density_from_vector(ghz(4));
    std::vector<Job> jobs;
    for (std::size_t pi = 0; pi < ps.size(); ++pi) {
        for (std::size_t i = 0; i < reps; ++i) {
            const std::size_t t = pi * reps + i;
            const double p = ps[pi];
            jobs.push_back([=, &opts] {
                const DensityMatrix sigma = apply_channel(rho, {ChannelKind::depolarizing, p});
                VtdeOptions o;
                o.depth = kDeepVtdeDepth;
                o.opt.seed = trial_seed(opts.seed, t);
                o.shots = opts.shots;
                TrialOutput out;
                record(out, fmt_label("p%.1f", p), t, o.opt.seed, digest({&rho.matrix(), &sigma.matrix()}),
                       vtde(rho, sigma, o));
                return out;
            });
        }
    }
    VtdeOptions d;
    return assemble("fig2", opts,
                    {{"algorithm", "vtde"}, {"rho", "ghz(4)"}, {"sigma", "depolarizing(p) of rho"},
                     {"p", ps}, {"repetitions", reps},
                     {"ansatz", to_json(AnsatzSpec{d.family, 5, kDeepVtdeDepth})}, {"optimizer", to_json(d.opt)}},
                    jobs);
}

PresetRun preset_fig3(const RunOptions& opts) {
    const std::size_t per_rank = opts.trials.value_or(20);
    const std::vector<int> depths{1, 2, 4};
    std::vector<Job> jobs;
    for (std::size_t rank = 1; rank <= 8; ++rank) {
        for (std::size_t i = 0; i < per_rank; ++i) {
            const std::size_t t = (rank - 1) * per_rank + i;
            jobs.push_back([=, &opts] {
                const std::uint64_t seed = trial_seed(opts.seed, t);
                Rng rng = state_rng(seed);
                const DensityMatrix rho = random_mixed(3, rank, rng);
                const DensityMatrix sigma = random_mixed(3, 2, rng);
                const std::string inputs = digest({&rho.matrix(), &sigma.matrix()});
                TrialOutput out;
                for (int depth : depths) {
                    VtdeOptions o;
                    o.depth = depth;
                    o.opt.seed = seed;
                    o.shots = opts.shots;
                    record(out, "rank" + std::to_string(rank) + "_L" + std::to_string(depth), t, seed, inputs,
                           vtde(rho, sigma, o));
                }
                return out;
            });
        }
    }
    VtdeOptions d;
    PresetRun run = assemble("fig3", opts,
                             {{"algorithm", "vtde"}, {"n_qubits", 3}, {"rank_sigma", 2}, {"rank_rho", "1..8"},
                              {"depths", depths}, {"pairs_per_rank", per_rank}, {"optimizer", to_json(d.opt)}},
                             jobs);
    // Ordinal check on median accuracy: 4 layers >= 2 layers >= 1 layer, pooled over ranks.
    std::map<int, std::vector<double>> acc;
    for (const auto& row : run.rows) {
        const int depth = std::stoi(row.label.substr(row.label.find("_L") + 2));
        if (row.oracle && *row.oracle > 1e-12) {
            acc[depth].push_back(row.estimate / *row.oracle);
        }
    }
    const double m1 = median(acc[1]);
    const double m2 = median(acc[2]);
    const double m4 = median(acc[4]);
    run.config["median_accuracy"] = {{"L1", m1}, {"L2", m2}, {"L4", m4}};
    if (!(m4 >= m2 && m2 >= m1)) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "fig3 ordinal check failed: median accuracy L4 %.6f, L2 %.6f, L1 %.6f", m4,
                      m2, m1);
        run.violations.emplace_back(buf);
    }
    return run;
}

PresetRun preset_fig4(const RunOptions& opts) {
    const std::size_t per_cell = opts.trials.value_or(2);
    const std::vector<std::size_t> ranks{2, 4, 8};
    std::vector<Job> jobs;
    std::size_t t = 0;
    for (std::size_t rank : ranks) {
        for (int n_r = 1; n_r <= 3; ++n_r) {
            for (std::size_t i = 0; i < per_cell; ++i, ++t) {
                jobs.push_back([=, &opts] {
                    const std::uint64_t seed = trial_seed(opts.seed, t);
                    Rng rng = state_rng(seed);
                    const DensityMatrix rho = random_mixed(3, rank, rng);
                    VqslOptions o;
                    o.n_r = n_r;
                    o.opt.seed = seed;
                    o.shots = opts.shots;
                    const auto t0 = std::chrono::steady_clock::now();
                    VqslResult v = vqsl(rho, o);
                    EstimateResult r;
                    r.algorithm = "vqsl";
                    r.estimate = v.achieved_fidelity;
                    r.set_oracle(v.fidelity_bound);
                    r.variational_bound = v.fidelity_bound;
                    r.stage_names = {"vqsl"};
                    r.traces.push_back(std::move(v.trace));
                    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                    TrialOutput out;
                    const std::string label = "rank" + std::to_string(rank) + "_nR" + std::to_string(n_r);
                    if (v.achieved_fidelity > v.fidelity_bound + 0.01) {
                        r.flags.push_back("ceiling_exceeded");
                        out.violations.push_back(label + " trial " + std::to_string(t) +
                                                 ": achieved fidelity exceeds the purification ceiling");
                    }
                    record(out, label, t, seed, digest({&rho.matrix()}), r);
                    return out;
                });
            }
        }
    }
    VqslOptions d;
    return assemble("fig4", opts,
                    {{"algorithm", "vqsl"}, {"n_qubits", 3}, {"ranks", ranks}, {"n_r", {1, 2, 3}},
                     {"states_per_cell", per_cell}, {"depth", d.depth}, {"family", to_string(d.family)},
                     {"optimizer", to_json(d.opt)}, {"oracle", "sqrt of the top 2^n_R eigenvalue sum"}},
                    jobs);
}

PresetRun preset_figS2(const RunOptions& opts) {
    const std::size_t per_stratum = opts.trials.value_or(6);
    const std::vector<std::size_t> ranks{1, 2, 4, 8, 16};
    std::vector<Job> jobs;
    for (std::size_t ri = 0; ri < ranks.size(); ++ri) {
        for (std::size_t i = 0; i < per_stratum; ++i) {
            const std::size_t t = ri * per_stratum + i;
            const std::size_t rank = ranks[ri];
            jobs.push_back([=, &opts] {
                const std::uint64_t seed = trial_seed(opts.seed, t);
                Rng rng = state_rng(seed);
                const DensityMatrix rho = random_mixed(4, rank, rng);
                const DensityMatrix sigma = random_mixed(4, 16, rng);
                const std::string inputs = digest({&rho.matrix(), &sigma.matrix()});
                const std::string pos =
                    "pos" + std::to_string(count_positive_eigs((rho.matrix() - sigma.matrix()) * Complex{0.5}));
                TrialOutput out;
                VtdeOptions vo;
                vo.depth = kDeepVtdeDepth;
                vo.opt.seed = seed;
                vo.shots = opts.shots;
                record(out, "vtde_" + pos, t, seed, inputs, vtde(rho, sigma, vo));
                NvtdeOptions no;
                no.depth = kDeepVtdeDepth;
                no.opt.seed = seed;
                record(out, "nvtde_" + pos, t, seed, inputs, nvtde(rho, sigma, no).result);
                no.fixed_k = 1;
                record(out, "nvtde_k1_" + pos, t, seed, inputs, nvtde(rho, sigma, no).result);
                return out;
            });
        }
    }
    VtdeOptions d;
    return assemble("figS2", opts,
                    {{"algorithm", "vtde, nvtde"}, {"n_qubits", 4}, {"rank_rho", ranks}, {"rank_sigma", 16},
                     {"pairs_per_rank", per_stratum}, {"depth", kDeepVtdeDepth}, {"optimizer", to_json(d.opt)},
                     {"nvtde_eps_k", NvtdeOptions{}.eps_k}, {"strata", "positive eigenvalue count of (rho - sigma)/2"}},
                    jobs);
}

using PresetFn = PresetRun (*)(const RunOptions&);

const std::map<std::string, PresetFn>& preset_table() {
    static const std::map<std::string, PresetFn> table{
        {"table1", preset_table1}, {"table2", preset_table2}, {"table3", preset_table3}, {"fig2", preset_fig2},
        {"fig3", preset_fig3},     {"fig4", preset_fig4},     {"figS2", preset_figS2}};
    return table;
}

// ------------------------------------------------------------ custom spec

std::string type_name(const nlohmann::json& j) { return j.type_name(); }

const nlohmann::json& require(const nlohmann::json& spec, const std::string& key) {
    if (!spec.contains(key)) {
        throw SpecError("missing required field '" + key + "'");
    }
    return spec.at(key);
}

template <typename T>
T field_as(const nlohmann::json& spec, const std::string& key, T fallback) {
    if (!spec.contains(key)) {
        return fallback;
    }
    const auto& v = spec.at(key);
    if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) {
            throw SpecError("field '" + key + "': expected string, got " + type_name(v));
        }
    } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) {
            throw SpecError("field '" + key + "': expected number, got " + type_name(v));
        }
    } else {
        if (!v.is_number_integer() || (v.is_number_integer() && v.get<long long>() < 0)) {
            throw SpecError("field '" + key + "': expected non-negative integer, got " + v.dump());
        }
    }
    return v.get<T>();
}

nlohmann::json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw SpecError("cannot open '" + path.string() + "'");
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw SpecError("'" + path.string() + "': " + e.what());
    }
}

nlohmann::json resolve_source(const nlohmann::json& src, const fs::path& base, const std::string& field) {
    if (src.is_string()) {
        const fs::path p = fs::path(src.get<std::string>()).is_absolute() ? fs::path(src.get<std::string>())
                                                                           : base / src.get<std::string>();
        return read_json_file(p);
    }
    if (src.is_object()) {
        return src;
    }
    throw SpecError("field '" + field + "': expected a file path or an inline matrix object");
}

ComplexMatrix load_matrix(const nlohmann::json& src, const fs::path& base, const std::string& field) {
    try {
        return matrix_from_json(resolve_source(src, base, field));
    } catch (const DimensionError& e) {
        throw SpecError("field '" + field + "': " + e.what());
    }
}

DensityMatrix load_state(const nlohmann::json& src, const fs::path& base, const std::string& field) {
    const ComplexMatrix m = load_matrix(src, base, field);
    try {
        return DensityMatrix::from_matrix(m);
    } catch (const std::exception& e) {
        throw InvariantViolation("field '" + field + "': " + e.what());
    }
}

ChannelSpec parse_channel(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw SpecError("field 'channel': expected an object");
    }
    for (const auto& [k, v] : j.items()) {
        if (k != "kind" && k != "p") {
            throw SpecError("field 'channel': unknown key '" + k + "'");
        }
    }
    const auto kind = field_as<std::string>(j, "kind", "");
    ChannelSpec ch;
    if (kind == "depolarizing") {
        ch.kind = ChannelKind::depolarizing;
    } else if (kind == "dephasing") {
        ch.kind = ChannelKind::dephasing;
    } else {
        throw SpecError("field 'channel.kind': expected depolarizing or dephasing");
    }
    ch.p = field_as<double>(require(j, "p").is_number() ? j : j, "p", 0.0);
    return ch;
}

const std::set<std::string>& known_custom_keys() {
    static const std::set<std::string> keys{
        "algorithm", "rho",   "sigma",          "channel",        "terms",          "h",
        "depth",     "n_r",   "mode",           "purify_depth",   "fidelity_depth", "optimizer",
        "optimizer_purify",   "k",              "eps_k",          "trials",         "seed",
        "output",    "format", "label",         "shots",          "expected_oracle"};
    return keys;
}

OptimConfig parse_opt(const nlohmann::json& spec, const std::string& key, OptimConfig base) {
    if (!spec.contains(key)) {
        return base;
    }
    try {
        return optim_config_from_json(spec.at(key), base);
    } catch (const nlohmann::json::exception& e) {
        throw SpecError("field '" + key + "': " + e.what());
    } catch (const std::exception& e) {
        throw SpecError("field '" + key + "': " + e.what());
    }
}

} // namespace

// ================================================================ public

std::vector<SummaryRow> PresetRun::summaries() const {
    std::vector<SummaryRow> out;
    for (const auto& label : labels()) {
        const auto rows = rows_for(label);
        SummaryRow s;
        s.label = label;
        s.count = rows.size();
        double sum = 0.0;
        for (const auto* r : rows) {
            sum += r->estimate;
            s.iterations += r->iterations;
        }
        s.mean = sum / static_cast<double>(rows.size());
        if (rows.size() > 1) {
            double ss = 0.0;
            for (const auto* r : rows) {
                ss += (r->estimate - s.mean) * (r->estimate - s.mean);
            }
            s.variance = ss / static_cast<double>(rows.size() - 1);
        }
        auto mean_of = [&](auto member) -> std::optional<double> {
            double acc = 0.0;
            for (const auto* r : rows) {
                if (!(r->*member)) {
                    return std::nullopt;
                }
                acc += *(r->*member);
            }
            return acc / static_cast<double>(rows.size());
        };
        s.mean_oracle = mean_of(&TrialRow::oracle);
        s.mean_abs_error = mean_of(&TrialRow::abs_error);
        s.mean_rel_error = mean_of(&TrialRow::rel_error);
        if (s.mean_abs_error) {
            double mx = 0.0;
            for (const auto* r : rows) {
                mx = std::max(mx, *r->abs_error);
            }
            s.max_abs_error = mx;
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<std::string> PresetRun::labels() const {
    std::vector<std::string> out;
    for (const auto& r : rows) {
        if (std::find(out.begin(), out.end(), r.label) == out.end()) {
            out.push_back(r.label);
        }
    }
    return out;
}

std::vector<const TrialRow*> PresetRun::rows_for(const std::string& label) const {
    std::vector<const TrialRow*> out;
    for (const auto& r : rows) {
        if (r.label == label) {
            out.push_back(&r);
        }
    }
    return out;
}

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& [k, v] : preset_table()) {
            n.push_back(k);
        }
        return n;
    }();
    return names;
}

bool is_known_preset(const std::string& name) { return preset_table().count(name) > 0; }

PresetRun run_preset(const std::string& name, const RunOptions& opts) {
    const auto it = preset_table().find(name);
    if (it == preset_table().end()) {
        std::string known;
        for (const auto& n : preset_names()) {
            known += (known.empty() ? "" : ", ") + n;
        }
        throw SpecError("unknown preset '" + name + "' (known: " + known + ")");
    }
    return it->second(opts);
}

CustomSpec load_custom_spec(const fs::path& path) {
    CustomSpec c;
    c.spec = read_json_file(path);
    c.base_dir = path.parent_path();
    if (!c.spec.is_object()) {
        throw SpecError("'" + path.string() + "': top level must be an object");
    }
    for (const auto& [k, v] : c.spec.items()) {
        if (!known_custom_keys().count(k)) {
            throw SpecError("unknown field '" + k + "'");
        }
    }
    const auto algo = field_as<std::string>(require(c.spec, "algorithm").is_string() ? c.spec : c.spec,
                                            "algorithm", "");
    static const std::set<std::string> algos{"vtde", "trace_norm", "trace_norm_two_sided", "vfe", "nvtde", "vqsl"};
    if (!algos.count(algo)) {
        throw SpecError("field 'algorithm': unknown algorithm '" + algo + "'");
    }
    c.output = field_as<std::string>(c.spec, "output", "results");
    if (c.output.is_relative()) {
        c.output = (c.base_dir / c.output).lexically_normal();
    }
    const auto format = field_as<std::string>(c.spec, "format", "csv");
    if (format == "csv") {
        c.format = OutputFormat::csv;
    } else if (format == "json") {
        c.format = OutputFormat::json;
    } else {
        throw SpecError("field 'format': expected csv or json, got '" + format + "'");
    }
    return c;
}

PresetRun run_custom(const CustomSpec& c, const RunOptions& base_opts) {
    const nlohmann::json& spec = c.spec;
    const auto algo = spec.at("algorithm").get<std::string>();
    RunOptions opts = base_opts;
    opts.seed = field_as<std::uint64_t>(spec, "seed", base_opts.seed);
    const std::size_t trials = field_as<std::size_t>(spec, "trials", base_opts.trials.value_or(1));
    if (trials == 0) {
        throw SpecError("field 'trials': must be positive");
    }
    if (spec.contains("shots")) {
        const auto s = field_as<std::uint64_t>(spec, "shots", 0);
        if (s == 0) {
            throw SpecError("field 'shots': must be positive");
        }
        opts.shots = s;
    }
    const std::string label = field_as<std::string>(spec, "label", algo);
    if (label.empty() || label.find_first_of(",\n\"/\\ ") != std::string::npos) {
        throw SpecError("field 'label': must be non-empty without commas, quotes, slashes or spaces");
    }
    const int depth_default = algo == "vqsl" ? 6 : 4;
    const int depth = static_cast<int>(field_as<std::size_t>(spec, "depth", depth_default));
    const OptimConfig base_opt = (algo == "vfe" || algo == "vqsl")
                                     ? vfe_defaults(0, algo == "vqsl" ? Direction::minimize : Direction::maximize)
                                     : vtde_defaults();
    const OptimConfig opt = parse_opt(spec, "optimizer", base_opt);
    const std::optional<double> expected =
        spec.contains("expected_oracle") ? std::optional<double>(field_as<double>(spec, "expected_oracle", 0.0))
                                         : std::nullopt;

    std::vector<std::string> violations;
    std::vector<Job> jobs;
    nlohmann::json config = {{"algorithm", algo}, {"depth", depth}, {"optimizer", to_json(opt)}, {"trials", trials},
                             {"label", label}};

    std::optional<DensityMatrix> rho;
    std::optional<DensityMatrix> sigma;
    auto load_pair = [&] {
        rho = load_state(require(spec, "rho"), c.base_dir, "rho");
        if (spec.contains("sigma")) {
            sigma = load_state(spec.at("sigma"), c.base_dir, "sigma");
        } else if (spec.contains("channel")) {
            sigma = apply_channel(*rho, parse_channel(spec.at("channel")));
        } else {
            throw SpecError("missing field 'sigma' (or 'channel' to derive it from rho)");
        }
        if (rho->n_qubits() != sigma->n_qubits()) {
            throw SpecError("fields 'rho' and 'sigma': qubit counts differ");
        }
    };
    auto check_expected = [&](double oracle) {
        config["oracle_recomputed"] = oracle;
        if (expected && std::abs(*expected - oracle) > 1e-9) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "bundled oracle %.12g disagrees with recomputed %.12g", *expected, oracle);
            violations.emplace_back(buf);
        }
    };

    if (algo == "vtde" || algo == "nvtde") {
        load_pair();
        check_expected(exact_trace_distance(*rho, *sigma));
        const std::string inputs = digest({&rho->matrix(), &sigma->matrix()});
        std::optional<std::size_t> k;
        if (spec.contains("k")) {
            if (algo != "nvtde") {
                throw SpecError("field 'k': only valid for nvtde");
            }
            k = field_as<std::size_t>(spec, "k", 1);
            if (*k < 1 || *k >= rho->dim()) {
                throw SpecError("field 'k': must lie in [1, 2^n - 1]");
            }
        }
        const double eps_k = field_as<double>(spec, "eps_k", NvtdeOptions{}.eps_k);
        for (std::size_t t = 0; t < trials; ++t) {
            jobs.push_back([=, &opts] {
                TrialOutput out;
                const std::uint64_t seed = trial_seed(opts.seed, t);
                if (algo == "vtde") {
                    VtdeOptions o;
                    o.depth = depth;
                    o.opt = opt;
                    o.opt.seed = seed;
                    o.shots = opts.shots;
                    record(out, label, t, seed, inputs, vtde(*rho, *sigma, o));
                } else {
                    NvtdeOptions o;
                    o.depth = depth;
                    o.opt = opt;
                    o.opt.seed = seed;
                    o.fixed_k = k;
                    o.eps_k = eps_k;
                    record(out, label, t, seed, inputs, nvtde(*rho, *sigma, o).result);
                }
                return out;
            });
        }
    } else if (algo == "vfe") {
        load_pair();
        check_expected(exact_fidelity(*rho, *sigma));
        const std::string inputs = digest({&rho->matrix(), &sigma->matrix()});
        VfeOptions base;
        base.n_r = static_cast<int>(field_as<std::size_t>(spec, "n_r", 0));
        const auto mode = field_as<std::string>(spec, "mode", "vqsl");
        if (mode != "vqsl" && mode != "exact") {
            throw SpecError("field 'mode': expected vqsl or exact");
        }
        base.mode = mode == "vqsl" ? PurificationMode::vqsl : PurificationMode::exact;
        base.purify_depth = static_cast<int>(field_as<std::size_t>(spec, "purify_depth", 6));
        base.fidelity_depth = static_cast<int>(field_as<std::size_t>(spec, "fidelity_depth", 6));
        base.opt_fid = opt;
        base.opt_purify = parse_opt(spec, "optimizer_purify", vfe_defaults(0, Direction::minimize));
        config["mode"] = mode;
        config["n_r"] = base.n_r == 0 ? rho->n_qubits() : base.n_r;
        config["purify_depth"] = base.purify_depth;
        config["fidelity_depth"] = base.fidelity_depth;
        config["optimizer_purify"] = to_json(base.opt_purify);
        for (std::size_t t = 0; t < trials; ++t) {
            jobs.push_back([=, &opts] {
                VfeOptions o = base;
                const std::uint64_t seed = trial_seed(opts.seed, t);
                o.opt_purify.seed = seed;
                o.opt_fid.seed = derive_seed(seed, 2);
                o.shots = opts.shots;
                TrialOutput out;
                record(out, label, t, seed, inputs, vfe(*rho, *sigma, o));
                return out;
            });
        }
    } else if (algo == "vqsl") {
        rho = load_state(require(spec, "rho"), c.base_dir, "rho");
        const int n_r = static_cast<int>(field_as<std::size_t>(spec, "n_r", static_cast<std::size_t>(rho->n_qubits())));
        const double bound = purification_fidelity_bound(*rho, std::size_t{1} << n_r);
        check_expected(bound);
        config["n_r"] = n_r;
        const std::string inputs = digest({&rho->matrix()});
        for (std::size_t t = 0; t < trials; ++t) {
            jobs.push_back([=, &opts] {
                VqslOptions o;
                o.n_r = n_r;
                o.depth = depth;
                o.opt = opt;
                o.opt.seed = trial_seed(opts.seed, t);
                o.shots = opts.shots;
                VqslResult v = vqsl(*rho, o);
                EstimateResult r;
                r.algorithm = "vqsl";
                r.estimate = v.achieved_fidelity;
                r.set_oracle(v.fidelity_bound);
                r.variational_bound = v.fidelity_bound;
                r.stage_names = {"vqsl"};
                r.traces.push_back(std::move(v.trace));
                TrialOutput out;
                record(out, label, t, o.opt.seed, inputs, r);
                return out;
            });
        }
    } else if (algo == "trace_norm") {
        const auto& terms = require(spec, "terms");
        if (!terms.is_array() || terms.empty()) {
            throw SpecError("field 'terms': expected a non-empty array");
        }
        std::vector<HermitianDecomposition::Term> parsed;
        for (std::size_t i = 0; i < terms.size(); ++i) {
            const std::string f = "terms[" + std::to_string(i) + "]";
            if (!terms[i].is_object() || !terms[i].contains("coefficient") || !terms[i].contains("state")) {
                throw SpecError("field '" + f + "': expected {coefficient, state}");
            }
            parsed.push_back({field_as<double>(terms[i], "coefficient", 0.0),
                              load_state(terms[i].at("state"), c.base_dir, f + ".state")});
        }
        HermitianDecomposition decomp = [&] {
            try {
                return HermitianDecomposition(std::move(parsed));
            } catch (const DimensionError& e) {
                throw SpecError(std::string("field 'terms': ") + e.what());
            }
        }();
        const ComplexMatrix h = decomp.reconstruct();
        check_expected(trace_norm(h));
        const std::string inputs = digest({&h});
        for (std::size_t t = 0; t < trials; ++t) {
            jobs.push_back([=, &opts] {
                VtdeOptions o;
                o.depth = depth;
                o.opt = opt;
                o.opt.seed = trial_seed(opts.seed, t);
                o.shots = opts.shots;
                TrialOutput out;
                record(out, label, t, o.opt.seed, inputs, trace_norm_estimate(decomp, o));
                return out;
            });
        }
    } else {
        const ComplexMatrix h = symmetrized(load_matrix(require(spec, "h"), c.base_dir, "h"));
        check_expected(trace_norm(h));
        const std::string inputs = digest({&h});
        for (std::size_t t = 0; t < trials; ++t) {
            jobs.push_back([=, &opts] {
                VtdeOptions o;
                o.depth = depth;
                o.opt = opt;
                o.opt.seed = trial_seed(opts.seed, t);
                TrialOutput out;
                record(out, label, t, o.opt.seed, inputs, trace_norm_two_sided(h, o));
                return out;
            });
        }
    }
    PresetRun run = assemble("custom_" + label, opts, config, jobs);
    run.violations.insert(run.violations.begin(), violations.begin(), violations.end());
    return run;
}

double run_oracle(const std::string& metric, const fs::path& a, const std::optional<fs::path>& b) {
    const fs::path base = fs::current_path();
    if (metric == "trace_norm") {
        const ComplexMatrix ma = load_matrix(a.string(), base, a.string());
        if (!b) {
            return trace_norm(ma);
        }
        const ComplexMatrix mb = load_matrix(b->string(), base, b->string());
        if (ma.rows() != mb.rows()) {
            throw SpecError("operators have different dimensions");
        }
        return trace_norm(ma - mb);
    }
    if (metric != "trace_distance" && metric != "fidelity") {
        throw SpecError("unknown metric '" + metric + "' (known: trace_distance, fidelity, trace_norm)");
    }
    if (!b) {
        throw SpecError(metric + " needs two state files");
    }
    const DensityMatrix ra = load_state(a.string(), base, a.string());
    const DensityMatrix rb = load_state(b->string(), base, b->string());
    if (ra.dim() != rb.dim()) {
        throw SpecError("states have different dimensions");
    }
    return metric == "trace_distance" ? exact_trace_distance(ra, rb) : exact_fidelity(ra, rb);
}

std::string format_oracle_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%#.10g", v);
    return buf;
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string digest(std::initializer_list<const ComplexMatrix*> mats) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](const void* p, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 0x100000001b3ull;
        }
    };
    for (const ComplexMatrix* m : mats) {
        const std::uint64_t dims[2] = {m->rows(), m->cols()};
        mix(dims, sizeof dims);
        for (const Complex& z : m->data()) {
            const double parts[2] = {z.real(), z.imag()};
            mix(parts, sizeof parts);
        }
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

std::string opt_num(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

std::string join_flags(const std::vector<std::string>& flags) {
    std::string out;
    for (const auto& f : flags) {
        out += (out.empty() ? "" : ";") + f;
    }
    return out;
}

} // namespace

void write_results_csv(std::ostream& out, const PresetRun& run) {
    out << "# qmetric results schema v1\n";
    out << "kind,trial,label,inputs_digest,estimate,oracle,abs_error,rel_error,iterations,seed,variance,"
           "max_abs_error,flags\n";
    for (const auto& r : run.rows) {
        out << "trial," << r.trial << ',' << r.label << ',' << r.inputs_digest << ',' << format_number(r.estimate)
            << ',' << opt_num(r.oracle) << ',' << opt_num(r.abs_error) << ',' << opt_num(r.rel_error) << ','
            << r.iterations << ',' << r.seed << ",,," << join_flags(r.flags) << '\n';
    }
    for (const auto& s : run.summaries()) {
        out << "summary," << s.count << ',' << s.label << ",," << format_number(s.mean) << ','
            << opt_num(s.mean_oracle) << ',' << opt_num(s.mean_abs_error) << ',' << opt_num(s.mean_rel_error) << ','
            << s.iterations << ',' << run.seed << ',' << format_number(s.variance) << ','
            << opt_num(s.max_abs_error) << ',' << '\n';
    }
}

void write_trace_csv(std::ostream& out, const PresetRun& run, const std::string& label) {
    out << "# qmetric trace schema v1\n";
    out << "trial,stage,restart,iteration,loss\n";
    for (const auto& t : run.traces) {
        if (t.label != label) {
            continue;
        }
        for (std::size_t i = 0; i < t.losses.size(); ++i) {
            out << t.trial << ',' << t.stage << ',' << t.restart << ',' << i << ',' << format_number(t.losses[i])
                << '\n';
        }
    }
}

void write_timing_csv(std::ostream& out, const PresetRun& run) {
    out << "# qmetric timing v1\n";
    out << "trial,label,wall_time_s\n";
    for (const auto& r : run.rows) {
        out << r.trial << ',' << r.label << ',' << format_number(r.wall_time) << '\n';
    }
    out << "total,," << format_number(run.wall_time) << '\n';
}

nlohmann::json results_json(const PresetRun& run) {
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : run.rows) {
        rows.push_back({{"trial", r.trial},           {"label", r.label},         {"inputs_digest", r.inputs_digest},
                        {"estimate", r.estimate},     {"oracle", opt(r.oracle)},  {"abs_error", opt(r.abs_error)},
                        {"rel_error", opt(r.rel_error)}, {"iterations", r.iterations}, {"seed", r.seed},
                        {"flags", r.flags}});
    }
    nlohmann::json summary = nlohmann::json::array();
    for (const auto& s : run.summaries()) {
        summary.push_back({{"label", s.label},
                           {"count", s.count},
                           {"mean", s.mean},
                           {"variance", s.variance},
                           {"mean_oracle", opt(s.mean_oracle)},
                           {"mean_abs_error", opt(s.mean_abs_error)},
                           {"mean_rel_error", opt(s.mean_rel_error)},
                           {"max_abs_error", opt(s.max_abs_error)},
                           {"iterations", s.iterations}});
    }
    nlohmann::json traces = nlohmann::json::array();
    for (const auto& t : run.traces) {
        traces.push_back(
            {{"label", t.label}, {"trial", t.trial}, {"stage", t.stage}, {"restart", t.restart}, {"losses", t.losses}});
    }
    return {{"schema", "qmetric.results.v1"}, {"preset", run.name}, {"seed", run.seed},
            {"config", run.config},           {"rows", rows},       {"summary", summary},
            {"traces", traces},               {"violations", run.violations}};
}

std::string trace_file_name(const std::string& preset, const std::string& label) {
    return preset + "_trace_" + label + ".csv";
}

std::vector<fs::path> write_outputs(const PresetRun& run, const fs::path& dir, OutputFormat format) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw OutputError("cannot create output directory '" + dir.string() + "'");
    }
    std::vector<fs::path> written;
    auto emit = [&](const fs::path& p, const std::function<void(std::ostream&)>& body) {
        std::ofstream f(p, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw OutputError("cannot write '" + p.string() + "'");
        }
        body(f);
        f.flush();
        if (!f) {
            throw OutputError("write failed for '" + p.string() + "'");
        }
        written.push_back(p);
    };
    if (format == OutputFormat::json) {
        emit(dir / (run.name + ".json"), [&](std::ostream& o) { o << results_json(run).dump(2) << '\n'; });
    } else {
        emit(dir / (run.name + "_results.csv"), [&](std::ostream& o) { write_results_csv(o, run); });
        for (const auto& label : run.labels()) {
            emit(dir / trace_file_name(run.name, label), [&](std::ostream& o) { write_trace_csv(o, run, label); });
        }
    }
    emit(dir / (run.name + "_timing.csv"), [&](std::ostream& o) { write_timing_csv(o, run); });
    return written;
}

int universal_depth(int n_qubits) {
    const long long dim_su = (1LL << (2 * n_qubits)) - 1;
    const long long per_layer = 2LL * n_qubits;
    const long long need = (dim_su + per_layer - 1) / per_layer + 1;
    return static_cast<int>(std::max<long long>(6, need));
}

} // namespace qmetric
