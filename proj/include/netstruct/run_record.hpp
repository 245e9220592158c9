#ifndef NETSTRUCT_RUN_RECORD_HPP
#define NETSTRUCT_RUN_RECORD_HPP

// JSON run records: everything needed to replay a fit bit-for-bit.
// Schema "netstruct.run/1" is documented in README.md.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bnpm.hpp"
#include "error.hpp"
#include "graph.hpp"
#include "metrics.hpp"
#include "nmm.hpp"

namespace netstruct {

inline constexpr const char* tool_version = "0.1.0";
inline constexpr const char* run_schema = "netstruct.run/1";

enum class ModelKind { nmm, bnpm };

inline const char* to_string(ModelKind m) { return m == ModelKind::nmm ? "nmm" : "bnpm"; }

inline ModelKind parse_model(const std::string& s) {
    if (s == "nmm")
        return ModelKind::nmm;
    if (s == "bnpm")
        return ModelKind::bnpm;
    throw data_error("unknown model '" + s + "'");
}

struct GraphFingerprint {
    std::size_t n_nodes = 0;
    std::size_t n_edges = 0;
    bool directed = false;
    std::uint64_t hash = 0;

    static GraphFingerprint of(const Graph& g) {
        return {g.n_nodes(), g.n_edges(), g.directed(), content_hash(g)};
    }
    friend bool operator==(const GraphFingerprint&, const GraphFingerprint&) = default;
};

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline std::uint64_t parse_hex64(const std::string& s) {
    std::size_t used = 0;
    auto v = std::stoull(s, &used, 16);
    if (used != s.size())
        throw data_error("bad hash '" + s + "'");
    return v;
}

struct RunRecord {
    ModelKind model = ModelKind::bnpm;
    SamplerConfig bnpm;     // meaningful when model == bnpm
    NmmConfig nmm;          // meaningful when model == nmm
    std::size_t nmm_groups = 0;
    std::uint64_t seed = 0;
    GraphFingerprint graph;
    std::string source;
    double wall_seconds = 0.0;
    Partition partition;
    nlohmann::json trace_summary = nlohmann::json::object();
    std::optional<nlohmann::json> gold_score;
    std::string version = tool_version;
};

inline nlohmann::json score_json(const NmiScore& s, std::size_t k_gold, std::size_t k_pred) {
    return {{"nmi", s.value},   {"mi", s.mi},         {"h_gold", s.h_gold},
            {"h_pred", s.h_pred}, {"k_gold", k_gold}, {"k_pred", k_pred}};
}

inline nlohmann::json to_json(const RunRecord& r) {
    using nlohmann::json;
    json config;
    if (r.model == ModelKind::bnpm) {
        const auto& c = r.bnpm;
        config = {{"burn_in", c.burn_in},
                  {"samples", c.n_samples},
                  {"thinning", c.thinning},
                  {"init", c.init == InitMode::crp ? "crp" : "random"},
                  {"random_scan", c.random_scan},
                  {"max_groups_warn", c.max_groups_warn}};
        if (auto f = std::get_if<FixedHyper>(&c.hyper_mode))
            config["hyper"] = {{"mode", "fixed"}, {"alpha", f->alpha}, {"beta", f->beta}};
        else
            config["hyper"] = {{"mode", "sample"},
                               {"alpha", c.initial_alpha},
                               {"beta", c.initial_beta}};
    } else {
        config = {{"k", r.nmm_groups},
                  {"restarts", r.nmm.n_restarts},
                  {"max_iters", r.nmm.max_iters},
                  {"tol", r.nmm.tol}};
    }
    json j = {{"schema", run_schema},
              {"tool_version", r.version},
              {"model", to_string(r.model)},
              {"seed", r.seed},
              {"config", config},
              {"graph",
               {{"n_nodes", r.graph.n_nodes},
                {"n_edges", r.graph.n_edges},
                {"directed", r.graph.directed},
                {"hash", hex64(r.graph.hash)},
                {"source", r.source}}},
              {"wall_seconds", r.wall_seconds},
              {"result", {{"k", r.partition.n_groups}, {"partition", r.partition.assignment}}},
              {"trace_summary", r.trace_summary}};
    if (r.gold_score)
        j["gold"] = *r.gold_score;
    return j;
}

inline RunRecord run_record_from_json(const nlohmann::json& j) {
    try {
        if (j.at("schema").get<std::string>() != run_schema)
            throw data_error("unsupported run record schema '" + j.at("schema").get<std::string>() +
                             "'");
        RunRecord r;
        r.version = j.at("tool_version").get<std::string>();
        r.model = parse_model(j.at("model").get<std::string>());
        r.seed = j.at("seed").get<std::uint64_t>();
        const auto& c = j.at("config");
        if (r.model == ModelKind::bnpm) {
            auto& b = r.bnpm;
            b.burn_in = c.at("burn_in").get<std::size_t>();
            b.n_samples = c.at("samples").get<std::size_t>();
            b.thinning = c.at("thinning").get<std::size_t>();
            b.init = c.at("init").get<std::string>() == "crp" ? InitMode::crp : InitMode::random;
            b.random_scan = c.at("random_scan").get<bool>();
            b.max_groups_warn = c.at("max_groups_warn").get<std::size_t>();
            const auto& h = c.at("hyper");
            const double a = h.at("alpha").get<double>();
            const double be = h.at("beta").get<double>();
            if (h.at("mode").get<std::string>() == "fixed") {
                b.hyper_mode = FixedHyper{a, be};
            } else {
                b.hyper_mode = SampledHyper{};
                b.initial_alpha = a;
                b.initial_beta = be;
            }
            b.seed = r.seed;
        } else {
            r.nmm_groups = c.at("k").get<std::size_t>();
            r.nmm.n_restarts = c.at("restarts").get<std::size_t>();
            r.nmm.max_iters = c.at("max_iters").get<std::size_t>();
            r.nmm.tol = c.at("tol").get<double>();
            r.nmm.seed = r.seed;
        }
        const auto& g = j.at("graph");
        r.graph.n_nodes = g.at("n_nodes").get<std::size_t>();
        r.graph.n_edges = g.at("n_edges").get<std::size_t>();
        r.graph.directed = g.at("directed").get<bool>();
        r.graph.hash = parse_hex64(g.at("hash").get<std::string>());
        r.source = g.value("source", "");
        r.wall_seconds = j.value("wall_seconds", 0.0);
        const auto& res = j.at("result");
        r.partition.assignment = res.at("partition").get<std::vector<std::uint32_t>>();
        r.partition.n_groups = res.at("k").get<std::uint32_t>();
        r.trace_summary = j.value("trace_summary", nlohmann::json::object());
        if (j.contains("gold"))
            r.gold_score = j.at("gold");
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("malformed run record: ") + e.what());
    }
}

} // namespace netstruct

#endif // NETSTRUCT_RUN_RECORD_HPP
