// netstruct: generate benchmarks, fit NMM/BNPM, evaluate, bench, replay.

#include <iostream>
#include <set>
#include <string>

#include <CLI11.hpp>

#include <netstruct/app.hpp>

#ifndef NETSTRUCT_DATA_DIR
#define NETSTRUCT_DATA_DIR "data"
#endif

namespace app = netstruct::app;
using netstruct::ModelKind;

namespace {

ModelKind model_arg(const std::string& s) {
    if (s == "nmm")
        return ModelKind::nmm;
    if (s == "bnpm")
        return ModelKind::bnpm;
    throw app::usage_error("model must be 'nmm' or 'bnpm', got '" + s + "'");
}

netstruct::InitMode init_arg(const std::string& s) {
    if (s == "random")
        return netstruct::InitMode::random;
    if (s == "crp")
        return netstruct::InitMode::crp;
    throw app::usage_error("--init must be 'random' or 'crp'");
}

void add_sampler_flags(CLI::App* cmd, app::FitOptions& o, std::string& init,
                       std::optional<double>& alpha, std::optional<double>& beta) {
    cmd->add_option("--burn-in", o.burn_in, "BNPM burn-in sweeps")->capture_default_str();
    cmd->add_option("--samples", o.samples, "BNPM recorded samples")->capture_default_str();
    cmd->add_option("--thinning", o.thinning, "BNPM sweeps between samples")->capture_default_str();
    cmd->add_option("--alpha", alpha, "CRP concentration in (0,1) (default 0.5)");
    cmd->add_option("--beta", beta, "Dirichlet parameter in (0,1) (default 0.5)");
    cmd->add_flag("--sample-hyper", o.sample_hyper,
                  "slice-sample alpha and beta each sweep; --alpha/--beta become starting values");
    cmd->add_option("--init", init, "initial partition: random or crp")->capture_default_str();
    cmd->add_flag("--random-scan", o.random_scan, "visit nodes in random order each sweep");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Network structure exploration with NMM and BNPM"};
    cli.require_subcommand(1);
    cli.set_version_flag("--version", netstruct::tool_version);

    // generate
    std::string gen_name, gen_spec, gen_out;
    std::uint64_t gen_seed = 1;
    auto* gen = cli.add_subcommand("generate", "write a synthetic benchmark (.edges + .gold)");
    gen->add_option("name", gen_name, "syn100 | syn108 | syn10000 | syn2500 | planted")->required();
    gen->add_option("--spec", gen_spec, "JSON block spec (planted only)");
    gen->add_option("--seed", gen_seed, "generator seed")->capture_default_str();
    gen->add_option("-o,--out", gen_out, "output prefix")->required();

    // fit
    app::FitOptions fit_opts;
    app::FitPaths fit_paths;
    std::string fit_model, fit_edges, fit_gold, fit_init = "random";
    std::optional<std::size_t> fit_k;
    std::optional<double> fit_alpha, fit_beta;
    std::vector<std::string> fit_ignore;
    auto* fit = cli.add_subcommand("fit", "fit a model; writes <out>.part and <out>.run.json");
    fit->add_option("model", fit_model, "nmm | bnpm")->required();
    fit->add_option("edges", fit_edges, "edge list file")->required();
    fit->add_option("--seed", fit_opts.seed, "random seed")->capture_default_str();
    fit->add_option("--k", fit_k, "number of groups (nmm only)");
    fit->add_option("--restarts", fit_opts.restarts, "NMM EM restarts")->capture_default_str();
    fit->add_option("--max-iters", fit_opts.max_iters, "NMM EM iteration cap")->capture_default_str();
    fit->add_option("--tol", fit_opts.tol, "NMM convergence tolerance")->capture_default_str();
    add_sampler_flags(fit, fit_opts, fit_init, fit_alpha, fit_beta);
    fit->add_option("--gold", fit_gold, "gold partition; adds NMI to the record");
    fit->add_option("--ignore-group", fit_ignore, "gold group token left out of scoring");
    bool fit_keystones = false;
    fit->add_flag("--include-keystones", fit_keystones, "score 'keystone' gold nodes as a group");
    fit->add_flag("--directed", fit_paths.directed, "treat links as directed");
    fit->add_option("-o,--out", fit_paths.out, "output prefix (default: edges path minus extension)");

    // eval
    std::string ev_gold, ev_pred, ev_edges;
    std::vector<std::string> ev_ignore;
    bool ev_directed = false;
    auto* ev = cli.add_subcommand("eval", "score a partition against gold; JSON to stdout");
    ev->add_option("gold", ev_gold, "gold partition file")->required();
    ev->add_option("pred", ev_pred, "predicted partition file")->required();
    ev->add_option("edges", ev_edges, "edge list the partitions refer to")->required();
    ev->add_option("--ignore-group", ev_ignore, "gold group token left out of scoring");
    bool ev_keystones = false;
    ev->add_flag("--include-keystones", ev_keystones, "score 'keystone' gold nodes as a group");
    ev->add_flag("--directed", ev_directed, "treat links as directed");

    // bench
    app::BenchOptions bench_opts;
    bench_opts.data_dir = NETSTRUCT_DATA_DIR;
    std::string bench_out = "bench-out", bench_data, bench_models = "bnpm,nmm", bench_init = "random";
    std::optional<double> bench_alpha, bench_beta;
    auto* bench = cli.add_subcommand("bench", "run the model x network x seed grid");
    bench->add_option("--suite", bench_opts.suite, "small | synthetic | all")->capture_default_str();
    bench->add_option("--seeds", bench_opts.seeds, "seeds per cell")->capture_default_str();
    bench->add_option("--seed-base", bench_opts.seed_base, "first seed")->capture_default_str();
    bench->add_option("--models", bench_models, "comma-separated models")->capture_default_str();
    bench->add_option("--jobs", bench_opts.jobs, "cells run in parallel")->capture_default_str();
    bench->add_option("--restarts", bench_opts.nmm_restarts, "NMM EM restarts")->capture_default_str();
    bench->add_option("--data-dir", bench_data, "directory with bundled datasets");
    bench->add_option("-o,--out", bench_out, "output directory")->capture_default_str();
    add_sampler_flags(bench, bench_opts.bnpm, bench_init, bench_alpha, bench_beta);
    bench->add_flag("--include-keystones", bench_opts.include_keystones,
                    "score syn108 keystones as a fifth gold group");

    // replay
    std::string rp_record, rp_edges;
    auto* rp = cli.add_subcommand("replay", "refit from a run record and compare partitions");
    rp->add_option("record", rp_record, "<out>.run.json")->required();
    rp->add_option("edges", rp_edges, "edge list the record was made from")->required();

    try {
        cli.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return cli.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return cli.exit(e);
    } catch (const CLI::ParseError& e) {
        cli.exit(e);
        return app::usage;
    }

    try {
        if (*gen) {
            std::optional<std::filesystem::path> spec;
            if (!gen_spec.empty())
                spec = gen_spec;
            auto g = app::generate(gen_name, gen_seed, spec);
            app::write_generated(g, gen_out);
            std::cerr << gen_name << ": " << g.graph.n_nodes() << " nodes, " << g.graph.n_edges()
                      << " edges, " << g.gold.n_groups << " groups -> " << gen_out
                      << ".edges, " << gen_out << ".gold\n";
        } else if (*fit) {
            fit_opts.model = model_arg(fit_model);
            fit_opts.k = fit_k;
            fit_opts.alpha = fit_alpha;
            fit_opts.beta = fit_beta;
            fit_opts.init = init_arg(fit_init);
            fit_paths.edges = fit_edges;
            if (!fit_gold.empty())
                fit_paths.gold = fit_gold;
            fit_paths.ignore_groups = app::ignore_set(fit_ignore, fit_keystones);
            app::cmd_fit(fit_opts, fit_paths, std::cerr);
        } else if (*ev) {
            auto j = app::cmd_eval(ev_gold, ev_pred, ev_edges, ev_directed,
                                   app::ignore_set(ev_ignore, ev_keystones));
            std::cout << j.dump(2) << '\n';
        } else if (*bench) {
            bench_opts.out_dir = bench_out;
            if (!bench_data.empty())
                bench_opts.data_dir = bench_data;
            bench_opts.models.clear();
            std::stringstream ms(bench_models);
            for (std::string m; std::getline(ms, m, ',');)
                bench_opts.models.push_back(model_arg(m));
            bench_opts.bnpm.alpha = bench_alpha;
            bench_opts.bnpm.beta = bench_beta;
            bench_opts.bnpm.init = init_arg(bench_init);
            auto res = app::cmd_bench(bench_opts, std::cerr);
            std::cout << app::summary_tsv(res.summary);
            std::cerr << "results in " << res.run_dir.string() << '\n';
        } else if (*rp) {
            auto v = app::cmd_replay(rp_record, rp_edges);
            std::cout << v.to_json().dump(2) << '\n';
            return v.identical ? app::ok : app::model;
        }
    } catch (const app::usage_error& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return app::usage;
    } catch (const netstruct::model_error& e) {
        std::cerr << "model failure: " << e.what() << '\n';
        return app::model;
    } catch (const netstruct::data_error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return app::data;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return app::data;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return app::model;
    }
    return app::ok;
}
