#ifndef NETSTRUCT_APP_HPP
#define NETSTRUCT_APP_HPP

// Command implementations behind the `netstruct` executable.  Argument
// parsing lives in tools/netstruct.cpp; everything here takes plain option
// structs so tests can drive the commands in-process.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "bnpm.hpp"
#include "error.hpp"
#include "graph.hpp"
#include "metrics.hpp"
#include "nmm.hpp"
#include "run_record.hpp"
#include "synth.hpp"

namespace netstruct::app {

namespace fs = std::filesystem;
using nlohmann::json;

enum exit_code : int { ok = 0, usage = 1, data = 2, model = 3 };

struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw data_error("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text))
        throw data_error("cannot write '" + path.string() + "'");
}

/// Loads an edge list; the graph is directed when `force_directed` is set or
/// the file carries a "#@directed" line.
inline Graph read_graph(const fs::path& path, bool force_directed = false) {
    const std::string text = read_file(path);
    try {
        return parse_edge_list(text, force_directed || declares_directed(text));
    } catch (const parse_error& e) {
        throw parse_error(e.line(), path.string() + ": " + e.what());
    }
}

inline LabeledPartition read_partition(const fs::path& path, const Graph& graph) {
    try {
        return parse_partition(read_file(path), graph);
    } catch (const parse_error& e) {
        throw parse_error(e.line(), path.string() + ": " + e.what());
    } catch (const data_error& e) {
        throw data_error(path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------- generate

inline BlockSpec block_spec_from_json(const json& j, std::uint64_t seed) {
    try {
        BlockSpec spec;
        spec.group_sizes = j.at("group_sizes").get<std::vector<std::size_t>>();
        spec.edge_counts = j.at("edge_counts").get<std::vector<std::vector<std::size_t>>>();
        spec.directed = j.value("directed", false);
        spec.seed = seed;
        return spec;
    } catch (const json::exception& e) {
        throw data_error(std::string("malformed block spec: ") + e.what());
    }
}

inline const std::vector<std::string>& generator_names() {
    static const std::vector<std::string> names{"syn100", "syn108", "syn10000", "syn2500",
                                                "planted"};
    return names;
}

inline GeneratedGraph generate(const std::string& name, std::uint64_t seed,
                               const std::optional<fs::path>& spec_file = std::nullopt) {
    if (name == "planted") {
        if (!spec_file)
            throw usage_error("generate planted requires --spec <file.json>");
        json j;
        try {
            j = json::parse(read_file(*spec_file));
        } catch (const json::parse_error& e) {
            throw data_error(spec_file->string() + ": " + e.what());
        }
        return gen_planted(block_spec_from_json(j, seed));
    }
    if (spec_file)
        throw usage_error("--spec only applies to 'planted'");
    if (name == "syn100")
        return gen_syn100(seed);
    if (name == "syn108")
        return gen_syn108(seed);
    if (name == "syn10000")
        return gen_syn10000(seed);
    if (name == "syn2500")
        return gen_syn2500(seed);
    throw usage_error("unknown generator '" + name + "'");
}

inline std::string edge_list_text(const Graph& g) {
    std::ostringstream out;
    write_edge_list(out, g);
    return out.str();
}

inline std::string partition_text(const Graph& g, const Partition& p,
                                  std::span<const std::string> names = {}) {
    std::ostringstream out;
    write_partition(out, g, p, names);
    return out.str();
}

inline void write_generated(const GeneratedGraph& gen, const std::string& prefix) {
    write_file(prefix + ".edges", edge_list_text(gen.graph));
    write_file(prefix + ".gold", partition_text(gen.graph, gen.gold, gen.group_names));
}

// --------------------------------------------------------------------- fit

struct FitOptions {
    ModelKind model = ModelKind::bnpm;
    std::uint64_t seed = 1;
    // nmm
    std::optional<std::size_t> k;
    std::size_t restarts = 10;
    std::size_t max_iters = 500;
    double tol = 1e-8;
    // bnpm
    std::size_t burn_in = 2000;
    std::size_t samples = 200;
    std::size_t thinning = 10;
    std::optional<double> alpha;
    std::optional<double> beta;
    bool sample_hyper = false;
    InitMode init = InitMode::random;
    bool random_scan = false;
};

inline void check_unit_interval(const char* name, double v) {
    if (!(v > 0.0 && v < 1.0))
        throw usage_error(std::string("--") + name + " must lie in (0, 1)");
}

/// Validates options and turns them into an unexecuted record.
inline RunRecord plan_run(const FitOptions& o) {
    RunRecord r;
    r.model = o.model;
    r.seed = o.seed;
    if (o.model == ModelKind::nmm) {
        if (!o.k)
            throw usage_error("nmm needs the number of groups: pass --k <int>");
        if (*o.k < 1)
            throw usage_error("--k must be at least 1");
        r.nmm_groups = *o.k;
        r.nmm.n_restarts = o.restarts;
        r.nmm.max_iters = o.max_iters;
        r.nmm.tol = o.tol;
        r.nmm.seed = o.seed;
        if (o.restarts < 1)
            throw usage_error("--restarts must be at least 1");
        return r;
    }
    if (o.k)
        throw usage_error("bnpm infers the number of groups; --k applies to nmm only");
    const double a = o.alpha.value_or(0.5);
    const double b = o.beta.value_or(0.5);
    check_unit_interval("alpha", a);
    check_unit_interval("beta", b);
    auto& c = r.bnpm;
    c.burn_in = o.burn_in;
    c.n_samples = o.samples;
    c.thinning = o.thinning;
    c.seed = o.seed;
    c.init = o.init;
    c.random_scan = o.random_scan;
    if (o.sample_hyper) {
        c.hyper_mode = SampledHyper{};
        c.initial_alpha = a;
        c.initial_beta = b;
    } else {
        c.hyper_mode = FixedHyper{a, b};
    }
    if (o.samples < 1)
        throw usage_error("--samples must be at least 1");
    if (o.thinning < 1)
        throw usage_error("--thinning must be at least 1");
    return r;
}

/// Runs the model described by `plan` on `graph` and fills in the result
/// fields.  Config and seed are taken verbatim from the plan.
inline RunRecord execute(const Graph& graph, RunRecord plan, std::ostream* log = nullptr) {
    const auto start = std::chrono::steady_clock::now();
    plan.graph = GraphFingerprint::of(graph);
    plan.version = tool_version;
    if (plan.model == ModelKind::nmm) {
        NmmConfig c = plan.nmm;
        c.seed = plan.seed;
        auto fit = fit_nmm(graph, plan.nmm_groups, c);
        const auto& best = fit.diagnostics.runs.at(fit.diagnostics.best_restart);
        plan.partition = fit.partition;
        plan.trace_summary = {{"best_restart", fit.diagnostics.best_restart},
                              {"expected_ll", fit.state.expected_ll},
                              {"iterations", best.iterations},
                              {"converged", best.converged},
                              {"degenerate_events", fit.diagnostics.degenerate_events}};
        if (log && fit.diagnostics.degenerate_events)
            *log << "warning: " << fit.diagnostics.degenerate_events
                 << " restart(s) hit a degenerate node\n";
    } else {
        SamplerConfig c = plan.bnpm;
        c.seed = plan.seed;
        auto fit = fit_bnpm(graph, c);
        const auto& d = fit.diagnostics;
        const auto& map = fit.trace.map();
        plan.partition = fit.partition;
        plan.trace_summary = {{"sweeps", d.sweeps},
                              {"map_sweep", map.sweep},
                              {"map_score", map.score},
                              {"map_alpha", map.alpha},
                              {"map_beta", map.beta},
                              {"final_score", d.score_trace.back()},
                              {"final_k", d.groups_trace.back()},
                              {"max_k", d.max_groups_seen},
                              {"stationarity_gap", d.stationarity_gap},
                              {"stationary", d.stationary},
                              {"slice_exhausted", d.slice_exhausted}};
        if (log) {
            if (!d.stationary)
                *log << "warning: score trace not stationary (gap " << d.stationarity_gap
                     << ")\n";
            if (d.max_groups_warned)
                *log << "warning: group count exceeded " << c.max_groups_warn << '\n';
            if (d.slice_exhausted)
                *log << "warning: slice sampler hit its shrink cap " << d.slice_exhausted
                     << " time(s)\n";
        }
    }
    plan.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return plan;
}

/// NMI against a gold partition, dropping nodes whose gold group token is in
/// `ignore`.
inline json score_against(const LabeledPartition& gold, const Partition& pred,
                          const std::set<std::string>& ignore = {}) {
    std::vector<bool> keep(gold.partition.size(), true);
    std::size_t dropped = 0;
    for (std::size_t i = 0; i < keep.size(); ++i)
        if (ignore.count(gold.group_names[gold.partition.assignment[i]])) {
            keep[i] = false;
            ++dropped;
        }
    auto [g, p] = restrict_to(gold.partition, pred, keep);
    auto j = score_json(nmi(g, p), g.n_groups, p.n_groups);
    j["scored_nodes"] = g.size();
    j["ignored_nodes"] = dropped;
    return j;
}

/// Gold token for Syn-108 keystones; nodes carrying it are left out of
/// scoring unless explicitly included.
inline constexpr const char* keystone_group = "keystone";

inline std::set<std::string> ignore_set(const std::vector<std::string>& extra,
                                        bool include_keystones) {
    std::set<std::string> s(extra.begin(), extra.end());
    if (!include_keystones)
        s.insert(keystone_group);
    return s;
}

struct FitPaths {
    fs::path edges;
    std::optional<fs::path> gold;
    std::set<std::string> ignore_groups;
    bool directed = false;
    std::string out; // prefix; defaults to the edges file stem
};

inline std::string default_prefix(const fs::path& edges) {
    return (edges.parent_path() / edges.stem()).string();
}

inline RunRecord cmd_fit(const FitOptions& o, const FitPaths& paths, std::ostream& log) {
    RunRecord plan = plan_run(o);
    const Graph g = read_graph(paths.edges, paths.directed);
    for (const auto& w : validate(g).warnings())
        log << "warning: " << w << '\n';
    std::optional<LabeledPartition> gold;
    if (paths.gold)
        gold = read_partition(*paths.gold, g);

    plan.source = paths.edges.string();
    RunRecord r = execute(g, std::move(plan), &log);
    if (gold)
        r.gold_score = score_against(*gold, r.partition, paths.ignore_groups);

    const std::string prefix = paths.out.empty() ? default_prefix(paths.edges) : paths.out;
    write_file(prefix + ".part", partition_text(g, r.partition));
    write_file(prefix + ".run.json", to_json(r).dump(2) + "\n");
    log << to_string(r.model) << ": K = " << r.partition.n_groups;
    if (r.gold_score)
        log << ", NMI = " << (*r.gold_score)["nmi"].get<double>();
    log << " (" << std::fixed << std::setprecision(2) << r.wall_seconds << " s)\n"
        << std::defaultfloat;
    return r;
}

// -------------------------------------------------------------------- eval

inline json cmd_eval(const fs::path& gold_path, const fs::path& pred_path,
                     const fs::path& edges_path, bool directed,
                     const std::set<std::string>& ignore = {}) {
    const Graph g = read_graph(edges_path, directed);
    const auto gold = read_partition(gold_path, g);
    const auto pred = read_partition(pred_path, g);
    return score_against(gold, pred.partition, ignore);
}

// ------------------------------------------------------------------ replay

struct ReplayVerdict {
    bool identical = false;
    std::size_t differing_nodes = 0;
    RunRecord replayed;

    json to_json() const {
        return {{"verdict", identical ? "identical" : "divergent"},
                {"differing_nodes", differing_nodes},
                {"k", replayed.partition.n_groups}};
    }
};

inline ReplayVerdict replay(const RunRecord& record, const Graph& g) {
    const auto fp = GraphFingerprint::of(g);
    if (fp.hash != record.graph.hash || fp.n_nodes != record.graph.n_nodes ||
        fp.n_edges != record.graph.n_edges || fp.directed != record.graph.directed)
        throw data_error("input does not match the record (hash " + hex64(fp.hash) + " vs " +
                         hex64(record.graph.hash) + ", N " + std::to_string(fp.n_nodes) +
                         " vs " + std::to_string(record.graph.n_nodes) + ", M " +
                         std::to_string(fp.n_edges) + " vs " +
                         std::to_string(record.graph.n_edges) + "); refusing to replay");
    ReplayVerdict v;
    v.replayed = execute(g, record);
    const auto& a = v.replayed.partition.assignment;
    const auto& b = record.partition.assignment;
    if (a.size() != b.size()) {
        v.differing_nodes = std::max(a.size(), b.size());
    } else {
        for (std::size_t i = 0; i < a.size(); ++i)
            v.differing_nodes += a[i] != b[i];
    }
    v.identical = v.differing_nodes == 0 && v.replayed.partition.n_groups == record.partition.n_groups;
    return v;
}

inline ReplayVerdict cmd_replay(const fs::path& record_path, const fs::path& edges_path) {
    json j;
    try {
        j = json::parse(read_file(record_path));
    } catch (const json::parse_error& e) {
        throw data_error(record_path.string() + ": " + e.what());
    }
    const RunRecord record = run_record_from_json(j);
    const Graph g = read_graph(edges_path, record.graph.directed);
    return replay(record, g);
}

// ------------------------------------------------------------------- bench

struct BenchNetwork {
    std::string name;
    Graph graph;
    LabeledPartition gold;
    std::set<std::string> ignore;
    std::string error; // non-empty when the network could not be loaded
};

struct BenchOptions {
    std::string suite = "small";
    std::size_t seeds = 10;
    std::uint64_t seed_base = 1;
    fs::path out_dir = "bench-out";
    fs::path data_dir;
    std::vector<ModelKind> models{ModelKind::bnpm, ModelKind::nmm};
    std::size_t jobs = 1;
    FitOptions bnpm; // burn-in, samples, thinning, hyperparameters
    std::size_t nmm_restarts = 10;
    bool include_keystones = false;
};

inline constexpr std::uint64_t bench_generator_seed = 1;

inline BenchNetwork bundled_network(const std::string& name, const fs::path& data_dir) {
    BenchNetwork net;
    net.name = name;
    try {
        const fs::path edges = data_dir / (name + ".edges");
        const fs::path gold = data_dir / (name + ".gold");
        if (!fs::exists(edges) || !fs::exists(gold))
            throw data_error("dataset files " + edges.string() + " / " + gold.string() +
                             " not found");
        net.graph = read_graph(edges);
        net.gold = read_partition(gold, net.graph);
    } catch (const std::exception& e) {
        net.error = e.what();
    }
    return net;
}

inline BenchNetwork generated_network(const std::string& name, bool include_keystones) {
    BenchNetwork net;
    net.name = name;
    auto gen = generate(name, bench_generator_seed);
    net.graph = std::move(gen.graph);
    net.gold = {std::move(gen.gold), std::move(gen.group_names)};
    if (!include_keystones)
        net.ignore = {keystone_group};
    return net;
}

inline std::vector<BenchNetwork> bench_networks(const std::string& suite, const fs::path& data_dir,
                                                bool include_keystones = false) {
    std::vector<BenchNetwork> nets;
    const bool small = suite == "small" || suite == "all";
    const bool synthetic = suite == "synthetic" || suite == "all";
    if (!small && !synthetic)
        throw usage_error("unknown suite '" + suite + "' (small, synthetic, all)");
    if (small) {
        nets.push_back(bundled_network("karate", data_dir));
        nets.push_back(bundled_network("dolphin", data_dir));
    }
    if (synthetic) {
        nets.push_back(generated_network("syn100", include_keystones));
        nets.push_back(generated_network("syn108", include_keystones));
    }
    if (suite == "all")
        nets.push_back(bundled_network("adjnoun", data_dir));
    return nets;
}

struct BenchRow {
    std::string network;
    ModelKind model{};
    std::uint64_t seed = 0;
    std::string status = "ok";
    std::size_t n_nodes = 0;
    std::size_t n_edges = 0;
    std::size_t k_gold = 0;
    std::size_t k = 0;
    double nmi = std::nan("");
    double seconds = 0.0;
    std::string error;
};

struct BenchSummary {
    std::string network;
    ModelKind model{};
    std::size_t runs = 0;
    std::size_t ok = 0;
    std::size_t k_gold = 0;
    double median_nmi = std::nan("");
    std::optional<std::size_t> modal_k;
};

struct BenchResult {
    fs::path run_dir;
    std::vector<BenchRow> rows;
    std::vector<BenchSummary> summary;
};

/// First run-NNN directory under `out` that does not exist yet.
inline fs::path next_run_dir(const fs::path& out) {
    fs::create_directories(out);
    for (unsigned n = 1;; ++n) {
        std::ostringstream name;
        name << "run-" << std::setw(3) << std::setfill('0') << n;
        fs::path p = out / name.str();
        if (fs::create_directory(p))
            return p;
    }
}

inline std::vector<BenchSummary> summarize(const std::vector<BenchRow>& rows) {
    std::vector<BenchSummary> out;
    std::map<std::pair<std::string, int>, std::size_t> slot;
    std::vector<std::vector<double>> nmis;
    std::vector<std::map<std::size_t, std::size_t>> ks;
    for (const auto& r : rows) {
        auto key = std::make_pair(r.network, static_cast<int>(r.model));
        auto [it, inserted] = slot.emplace(key, out.size());
        if (inserted) {
            out.push_back({r.network, r.model, 0, 0, r.k_gold, std::nan(""), std::nullopt});
            nmis.emplace_back();
            ks.emplace_back();
        }
        auto& s = out[it->second];
        ++s.runs;
        if (r.status != "ok")
            continue;
        ++s.ok;
        nmis[it->second].push_back(r.nmi);
        ++ks[it->second][r.k];
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto& v = nmis[i];
        if (!v.empty()) {
            std::sort(v.begin(), v.end());
            const std::size_t m = v.size();
            out[i].median_nmi = m % 2 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
        }
        std::size_t best = 0;
        for (auto [k, c] : ks[i]) // ascending k: ties go to the smaller K
            if (c > best) {
                best = c;
                out[i].modal_k = k;
            }
    }
    return out;
}

inline std::string fmt_double(double v) {
    if (std::isnan(v))
        return "NA";
    std::ostringstream s;
    s << std::setprecision(6) << v;
    return s.str();
}

inline std::string tsv_field(std::string s) {
    std::replace(s.begin(), s.end(), '\t', ' ');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

inline std::string rows_tsv(const std::vector<BenchRow>& rows) {
    std::ostringstream t;
    t << "network\tmodel\tseed\tstatus\tn_nodes\tn_edges\tk_gold\tk\tnmi\tseconds\terror\n";
    for (const auto& r : rows)
        t << r.network << '\t' << to_string(r.model) << '\t' << r.seed << '\t' << r.status << '\t'
          << r.n_nodes << '\t' << r.n_edges << '\t' << r.k_gold << '\t'
          << (r.status == "ok" ? std::to_string(r.k) : "NA") << '\t' << fmt_double(r.nmi) << '\t'
          << fmt_double(r.seconds) << '\t' << tsv_field(r.error) << '\n';
    return t.str();
}

inline std::string summary_tsv(const std::vector<BenchSummary>& summary) {
    std::ostringstream t;
    t << "network\tmodel\truns\tok\tk_gold\tmedian_nmi\tmodal_k\n";
    for (const auto& s : summary)
        t << s.network << '\t' << to_string(s.model) << '\t' << s.runs << '\t' << s.ok << '\t'
          << s.k_gold << '\t' << fmt_double(s.median_nmi) << '\t'
          << (s.modal_k ? std::to_string(*s.modal_k) : "NA") << '\n';
    return t.str();
}

inline json nullable(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

inline json bench_json(const BenchOptions& o, const BenchResult& res) {
    json rows = json::array();
    for (const auto& r : res.rows)
        rows.push_back({{"network", r.network},
                        {"model", to_string(r.model)},
                        {"seed", r.seed},
                        {"status", r.status},
                        {"n_nodes", r.n_nodes},
                        {"n_edges", r.n_edges},
                        {"k_gold", r.k_gold},
                        {"k", r.status == "ok" ? json(r.k) : json(nullptr)},
                        {"nmi", nullable(r.nmi)},
                        {"seconds", r.seconds},
                        {"error", r.error}});
    json summary = json::array();
    for (const auto& s : res.summary)
        summary.push_back({{"network", s.network},
                           {"model", to_string(s.model)},
                           {"runs", s.runs},
                           {"ok", s.ok},
                           {"k_gold", s.k_gold},
                           {"median_nmi", nullable(s.median_nmi)},
                           {"modal_k", s.modal_k ? json(*s.modal_k) : json(nullptr)}});
    return {{"schema", "netstruct.bench/1"},
            {"tool_version", tool_version},
            {"suite", o.suite},
            {"seed_base", o.seed_base},
            {"seeds", o.seeds},
            {"generator_seed", bench_generator_seed},
            {"rows", rows},
            {"summary", summary}};
}

/// Runs every (network, model, seed) cell.  Cells run concurrently when
/// `jobs` > 1; each writes its own record file, and the tables are written by
/// the calling thread once all cells finish.
inline BenchResult cmd_bench(const BenchOptions& o, std::ostream& log) {
    if (o.seeds < 1)
        throw usage_error("--seeds must be at least 1");
    auto nets = bench_networks(o.suite, o.data_dir, o.include_keystones);

    BenchResult res;
    res.run_dir = next_run_dir(o.out_dir);
    const fs::path cell_dir = res.run_dir / "records";
    fs::create_directory(cell_dir);

    struct Cell {
        std::size_t net;
        ModelKind model;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (std::size_t n = 0; n < nets.size(); ++n)
        for (auto m : o.models)
            for (std::size_t s = 0; s < o.seeds; ++s)
                cells.push_back({n, m, o.seed_base + s});
    res.rows.resize(cells.size());

    std::mutex log_mutex;
    auto run_cell = [&](std::size_t idx) {
        const Cell& c = cells[idx];
        const BenchNetwork& net = nets[c.net];
        BenchRow& row = res.rows[idx];
        row.network = net.name;
        row.model = c.model;
        row.seed = c.seed;
        if (!net.error.empty()) {
            row.status = "error";
            row.error = net.error;
            return;
        }
        row.n_nodes = net.graph.n_nodes();
        row.n_edges = net.graph.n_edges();
        std::size_t k_gold = 0;
        {
            std::set<std::uint32_t> seen;
            for (std::size_t i = 0; i < net.gold.partition.size(); ++i) {
                const auto g = net.gold.partition.assignment[i];
                if (!net.ignore.count(net.gold.group_names[g]))
                    seen.insert(g);
            }
            k_gold = seen.size();
        }
        row.k_gold = k_gold;
        try {
            FitOptions fo = o.bnpm;
            fo.model = c.model;
            fo.seed = c.seed;
            fo.k.reset();
            if (c.model == ModelKind::nmm) {
                fo.k = k_gold;
                fo.restarts = o.nmm_restarts;
            }
            RunRecord r = execute(net.graph, plan_run(fo));
            r.source = net.name;
            auto score = score_against(net.gold, r.partition, net.ignore);
            r.gold_score = score;
            row.k = r.partition.n_groups;
            row.nmi = score["nmi"].get<double>();
            row.seconds = r.wall_seconds;
            write_file(cell_dir / (net.name + "-" + to_string(c.model) + "-" +
                                   std::to_string(c.seed) + ".run.json"),
                       to_json(r).dump(2) + "\n");
        } catch (const std::exception& e) {
            row.status = "error";
            row.error = e.what();
        }
        std::lock_guard lock(log_mutex);
        log << net.name << ' ' << to_string(c.model) << " seed " << c.seed << ": "
            << (row.status == "ok" ? "K=" + std::to_string(row.k) + " NMI=" + fmt_double(row.nmi)
                                   : "error: " + row.error)
            << '\n';
    };

    const std::size_t jobs = std::max<std::size_t>(1, std::min(o.jobs, cells.size()));
    if (jobs == 1) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            run_cell(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < jobs; ++t)
            pool.emplace_back([&] {
                for (std::size_t i; (i = next.fetch_add(1)) < cells.size();)
                    run_cell(i);
            });
        for (auto& t : pool)
            t.join();
    }

    res.summary = summarize(res.rows);
    write_file(res.run_dir / "results.tsv", rows_tsv(res.rows));
    write_file(res.run_dir / "summary.tsv", summary_tsv(res.summary));
    write_file(res.run_dir / "results.json", bench_json(o, res).dump(2) + "\n");
    return res;
}

} // namespace netstruct::app

#endif // NETSTRUCT_APP_HPP
