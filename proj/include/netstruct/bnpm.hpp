#ifndef NETSTRUCT_BNPM_HPP
#define NETSTRUCT_BNPM_HPP

// Bayesian nonparametric mixture model: a Chinese Restaurant Process prior
// over partitions, Dirichlet(beta) link-target distributions per group, and
// Gamma(1,1) hyperpriors on alpha and beta.  pi and theta are integrated out;
// the sampler moves one node assignment at a time.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "error.hpp"
#include "graph.hpp"
#include "rng.hpp"
#include "slice_sampler.hpp"

namespace netstruct {

/// log of the CRP probability of a partition with the given group sizes:
/// K log alpha + sum_k log (n_k - 1)! - sum_{i<N} log(i + alpha).
inline double crp_log_prob(std::span<const std::size_t> group_sizes, double alpha) {
    std::size_t n = 0;
    double lp = 0.0;
    for (auto s : group_sizes) {
        if (s == 0)
            continue;
        lp += std::log(alpha) + std::lgamma(static_cast<double>(s));
        n += s;
    }
    return lp + std::lgamma(alpha) - std::lgamma(static_cast<double>(n) + alpha);
}

inline double crp_log_prob(const Partition& z, double alpha) {
    auto sizes = z.group_sizes();
    return crp_log_prob(sizes, alpha);
}

/// Sufficient statistics of a partition under the collapsed model:
/// group sizes n_k, out-link totals m_k, and per-target counts m_k^j.
///
/// Groups are kept dense: emptying group k moves the last group into slot k.
/// Per-target counts are stored by column (target j -> [(group, count)]) so a
/// node's conditional only touches groups that already link to its targets.
class GibbsState {
public:
    static constexpr std::uint32_t unassigned = ~std::uint32_t{0};
    static constexpr std::uint32_t new_group = ~std::uint32_t{0};

    GibbsState() = default;

    GibbsState(const Graph& graph, const Partition& z, double alpha, double beta)
        : z_(graph.n_nodes(), unassigned), pos_(graph.n_nodes(), 0),
          columns_(graph.n_nodes()), alpha_(alpha), beta_(beta), n_nodes_(graph.n_nodes()) {
        if (z.size() != graph.n_nodes())
            throw data_error("partition size does not match graph");
        if (!(alpha > 0.0) || !(beta > 0.0))
            throw model_error("alpha and beta must be positive");
        sizes_.reserve(z.n_groups);
        for (std::uint32_t k = 0; k < z.n_groups; ++k)
            open_group();
        for (node_t i = 0; i < graph.n_nodes(); ++i) {
            if (z.assignment[i] >= z.n_groups)
                throw data_error("partition label out of range");
            add(graph, i, z.assignment[i]);
        }
        if (std::any_of(sizes_.begin(), sizes_.end(), [](std::size_t s) { return s == 0; }))
            throw data_error("partition has an empty group");
    }

    std::size_t n_nodes() const noexcept { return n_nodes_; }
    std::size_t n_groups() const noexcept { return sizes_.size(); }
    std::uint32_t group_of(node_t i) const noexcept { return z_[i]; }
    const std::vector<std::uint32_t>& assignments() const noexcept { return z_; }
    std::size_t group_size(std::uint32_t k) const noexcept { return sizes_[k]; }
    const std::vector<std::size_t>& group_sizes() const noexcept { return sizes_; }
    std::size_t group_out_links(std::uint32_t k) const noexcept { return out_links_[k]; }
    const std::vector<node_t>& members(std::uint32_t k) const noexcept { return members_[k]; }

    /// m_k^j: links from members of group k to node j.
    std::size_t target_count(std::uint32_t k, node_t j) const noexcept {
        for (auto [g, c] : columns_[j])
            if (g == k)
                return c;
        return 0;
    }

    /// Nonzero (group, count) entries for target j.
    std::span<const std::pair<std::uint32_t, std::uint32_t>> column(node_t j) const noexcept {
        return columns_[j];
    }

    double alpha() const noexcept { return alpha_; }
    double beta() const noexcept { return beta_; }
    void set_alpha(double a) { alpha_ = a; }
    void set_beta(double b) { beta_ = b; }

    /// Takes node i out of the statistics; an emptied group is deleted.
    void remove_node(const Graph& graph, node_t i) {
        const std::uint32_t k = z_[i];
        if (k == unassigned)
            throw model_error("node " + std::to_string(i) + " is not assigned");
        --sizes_[k];
        out_links_[k] -= graph.out_degree(i);
        for (node_t j : graph.out(i)) {
            auto& col = columns_[j];
            auto it = std::find_if(col.begin(), col.end(), [k](auto& e) { return e.first == k; });
            if (--it->second == 0) {
                *it = col.back();
                col.pop_back();
            }
        }
        auto& mem = members_[k];
        const auto p = pos_[i];
        mem[p] = mem.back();
        pos_[mem[p]] = p;
        mem.pop_back();
        z_[i] = unassigned;
        if (sizes_[k] == 0)
            delete_group(graph, k);
    }

    /// Puts a removed node into group k, or into a fresh group when k is new_group.
    /// Returns the group index used.
    std::uint32_t assign_node(const Graph& graph, node_t i, std::uint32_t k) {
        if (z_[i] != unassigned)
            throw model_error("node " + std::to_string(i) + " is already assigned");
        if (k == new_group)
            k = open_group();
        else if (k >= sizes_.size())
            throw model_error("group index out of range");
        add(graph, i, k);
        return k;
    }

    Partition partition() const {
        Partition p;
        p.assignment = z_;
        p.n_groups = static_cast<std::uint32_t>(sizes_.size());
        return p;
    }

    /// Rebuilds every statistic from (graph, z); used by consistency checks.
    GibbsState recomputed(const Graph& graph) const {
        return GibbsState(graph, partition(), alpha_, beta_);
    }

    /// Statistic-level equality (group labels must match too).
    bool same_statistics(const GibbsState& o) const {
        if (z_ != o.z_ || sizes_ != o.sizes_ || out_links_ != o.out_links_)
            return false;
        for (std::size_t j = 0; j < columns_.size(); ++j) {
            auto a = columns_[j];
            auto b = o.columns_[j];
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            if (a != b)
                return false;
        }
        return true;
    }

private:
    std::uint32_t open_group() {
        sizes_.push_back(0);
        out_links_.push_back(0);
        members_.emplace_back();
        return static_cast<std::uint32_t>(sizes_.size() - 1);
    }

    void add(const Graph& graph, node_t i, std::uint32_t k) {
        z_[i] = k;
        ++sizes_[k];
        out_links_[k] += graph.out_degree(i);
        for (node_t j : graph.out(i)) {
            auto& col = columns_[j];
            auto it = std::find_if(col.begin(), col.end(), [k](auto& e) { return e.first == k; });
            if (it == col.end())
                col.emplace_back(k, 1);
            else
                ++it->second;
        }
        pos_[i] = static_cast<std::uint32_t>(members_[k].size());
        members_[k].push_back(i);
    }

    void delete_group(const Graph& graph, std::uint32_t k) {
        const auto last = static_cast<std::uint32_t>(sizes_.size() - 1);
        if (k != last) {
            for (node_t u : members_[last]) {
                z_[u] = k;
                for (node_t j : graph.out(u))
                    for (auto& e : columns_[j])
                        if (e.first == last)
                            e.first = k;
            }
            sizes_[k] = sizes_[last];
            out_links_[k] = out_links_[last];
            members_[k] = std::move(members_[last]);
        }
        sizes_.pop_back();
        out_links_.pop_back();
        members_.pop_back();
    }

    std::vector<std::uint32_t> z_;
    std::vector<std::uint32_t> pos_;
    std::vector<std::size_t> sizes_;
    std::vector<std::size_t> out_links_;
    std::vector<std::vector<node_t>> members_;
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> columns_;
    double alpha_ = 0.5;
    double beta_ = 0.5;
    std::size_t n_nodes_ = 0;
};

/// log p(A | z, beta): product over groups of Dirichlet-multinomial link sequences.
inline double log_link_likelihood(const GibbsState& s, double beta) {
    const double nb = static_cast<double>(s.n_nodes()) * beta;
    const double lg_beta = std::lgamma(beta);
    const double lg_nb = std::lgamma(nb);
    double lp = 0.0;
    for (std::uint32_t k = 0; k < s.n_groups(); ++k)
        lp += lg_nb - std::lgamma(nb + static_cast<double>(s.group_out_links(k)));
    for (node_t j = 0; j < s.n_nodes(); ++j)
        for (auto [g, c] : s.column(j))
            lp += std::lgamma(beta + c) - lg_beta;
    return lp;
}

/// log p(A, z, K | alpha, beta) = log p(A | z, beta) + log CRP(z | alpha).
inline double joint_log_score(const GibbsState& s) {
    return log_link_likelihood(s, s.beta()) + crp_log_prob(s.group_sizes(), s.alpha());
}

/// Scratch buffers reused across conditional evaluations.
class ConditionalWorkspace {
public:
    /// log(1 + c / beta) for c = 0..max_count, cached per beta.
    double log1p_ratio(std::uint32_t c, double beta) {
        if (beta != cached_beta_) {
            table_.clear();
            cached_beta_ = beta;
        }
        while (table_.size() <= c)
            table_.push_back(std::log1p(static_cast<double>(table_.size()) / beta));
        return table_[c];
    }

    std::vector<double> log_weights;

private:
    std::vector<double> table_;
    double cached_beta_ = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

// sum_{l=0}^{d-1} log(base + l)
inline double log_rising(double base, std::size_t d) {
    if (d <= 8) {
        double s = 0.0;
        for (std::size_t l = 0; l < d; ++l)
            s += std::log(base + static_cast<double>(l));
        return s;
    }
    return std::lgamma(base + static_cast<double>(d)) - std::lgamma(base);
}

} // namespace detail

/// Unnormalized log weights for placing removed node i into each existing
/// group (entries 0..K-1) or a new group (entry K):
///   sum_l log(m_k^{j_l} + beta) - log(m_k + N beta + l - 1)  +  log F(n_k, alpha)
/// with F = n_k for existing groups and alpha for the new one.  The factor
/// 1/(N + alpha) is shared by every candidate and omitted.
inline void gibbs_conditional(const GibbsState& s, const Graph& graph, node_t i,
                              ConditionalWorkspace& ws) {
    const std::size_t k_count = s.n_groups();
    const std::size_t d = graph.out_degree(i);
    const double beta = s.beta();
    const double nb = static_cast<double>(s.n_nodes()) * beta;
    const double base_num = static_cast<double>(d) * std::log(beta);

    auto& lw = ws.log_weights;
    lw.resize(k_count + 1);
    for (std::uint32_t k = 0; k < k_count; ++k)
        lw[k] = std::log(static_cast<double>(s.group_size(k))) + base_num -
                detail::log_rising(static_cast<double>(s.group_out_links(k)) + nb, d);
    lw[k_count] = std::log(s.alpha()) + base_num - detail::log_rising(nb, d);

    for (node_t j : graph.out(i))
        for (auto [g, c] : s.column(j))
            lw[g] += ws.log1p_ratio(c, beta);
}

inline std::vector<double> gibbs_conditional(const GibbsState& s, const Graph& graph, node_t i) {
    ConditionalWorkspace ws;
    gibbs_conditional(s, graph, i, ws);
    return ws.log_weights;
}

/// Draws an index with probability proportional to exp(log_weights).
inline std::size_t sample_log_weights(std::span<double> log_weights, rng& gen) {
    const double top = *std::max_element(log_weights.begin(), log_weights.end());
    double total = 0.0;
    for (auto& w : log_weights) {
        w = std::exp(w - top);
        total += w;
    }
    const double u = gen.uniform() * total;
    double acc = 0.0;
    for (std::size_t k = 0; k < log_weights.size(); ++k) {
        acc += log_weights[k];
        if (u < acc)
            return k;
    }
    return log_weights.size() - 1;
}

/// Resamples node i from its full conditional.
inline void gibbs_update(GibbsState& s, const Graph& graph, node_t i, rng& gen,
                         ConditionalWorkspace& ws) {
    s.remove_node(graph, i);
    gibbs_conditional(s, graph, i, ws);
    const std::size_t pick = sample_log_weights(ws.log_weights, gen);
    s.assign_node(graph, i, pick == s.n_groups() ? GibbsState::new_group
                                                 : static_cast<std::uint32_t>(pick));
}

/// One pass over every node, ascending index order unless `random_scan`.
inline void gibbs_sweep(GibbsState& s, const Graph& graph, rng& gen, ConditionalWorkspace& ws,
                        bool random_scan = false) {
    const auto n = static_cast<node_t>(graph.n_nodes());
    if (!random_scan) {
        for (node_t i = 0; i < n; ++i)
            gibbs_update(s, graph, i, gen, ws);
        return;
    }
    for (node_t step = 0; step < n; ++step)
        gibbs_update(s, graph, static_cast<node_t>(gen.below(n)), gen, ws);
}

inline void gibbs_sweep(GibbsState& s, const Graph& graph, rng& gen) {
    ConditionalWorkspace ws;
    gibbs_sweep(s, graph, gen, ws);
}

struct FixedHyper {
    double alpha;
    double beta;
};
struct SampledHyper {};
using HyperMode = std::variant<SampledHyper, FixedHyper>;

struct HyperUpdate {
    double alpha;
    double beta;
    std::size_t exhausted = 0; // slice updates that hit the shrink cap
};

/// Slice-samples alpha | z and beta | A, z under Gamma(1,1) priors on (0, 1).
/// Fixed mode returns the fixed values.
inline HyperUpdate sample_hyperparameters(const GibbsState& s, const HyperMode& mode, rng& gen,
                                          const SliceSettings& settings = {}) {
    if (auto f = std::get_if<FixedHyper>(&mode))
        return {f->alpha, f->beta, 0};

    HyperUpdate out{s.alpha(), s.beta(), 0};
    const auto& sizes = s.group_sizes();
    auto log_alpha_post = [&](double a) { return -a + crp_log_prob(sizes, a); };
    auto ra = slice_sample(s.alpha(), log_alpha_post, gen, settings);
    out.alpha = ra.value;
    out.exhausted += ra.exhausted;

    // Histogram of nonzero target counts: sum_{k,j} lgamma(beta + c) collapses
    // to sum_c hist[c] lgamma(beta + c).
    std::vector<std::size_t> hist;
    std::size_t nonzero = 0;
    for (node_t j = 0; j < s.n_nodes(); ++j)
        for (auto [g, c] : s.column(j)) {
            if (hist.size() <= c)
                hist.resize(c + 1, 0);
            ++hist[c];
            ++nonzero;
        }
    std::vector<std::size_t> link_totals(s.n_groups());
    for (std::uint32_t k = 0; k < s.n_groups(); ++k)
        link_totals[k] = s.group_out_links(k);
    const double n = static_cast<double>(s.n_nodes());
    auto log_beta_post = [&](double b) {
        const double nb = n * b;
        const double lg_nb = std::lgamma(nb);
        double lp = -b - static_cast<double>(nonzero) * std::lgamma(b);
        for (auto m : link_totals)
            lp += lg_nb - std::lgamma(nb + static_cast<double>(m));
        for (std::size_t c = 1; c < hist.size(); ++c)
            if (hist[c])
                lp += static_cast<double>(hist[c]) * std::lgamma(b + static_cast<double>(c));
        return lp;
    };
    auto rb = slice_sample(s.beta(), log_beta_post, gen, settings);
    out.beta = rb.value;
    out.exhausted += rb.exhausted;
    return out;
}

/// Starting partition: uniform random labels in [0, N) (then compacted), or
/// one sequential CRP draw with the initial alpha.
enum class InitMode { random, crp };

struct SamplerConfig {
    std::size_t burn_in = 2000;
    std::size_t n_samples = 200;
    std::size_t thinning = 10;
    std::uint64_t seed = 0;
    HyperMode hyper_mode = FixedHyper{0.5, 0.5};
    double initial_alpha = 0.5;
    double initial_beta = 0.5;
    std::size_t max_groups_warn = 1000;
    bool random_scan = false;
    InitMode init = InitMode::random;

    void check() const {
        if (n_samples < 1)
            throw model_error("n_samples must be at least 1");
        if (thinning < 1)
            throw model_error("thinning must be at least 1");
    }
};

struct PosteriorSample {
    std::size_t sweep;
    Partition partition;
    double alpha;
    double beta;
    double score;
};

struct PosteriorTrace {
    std::vector<PosteriorSample> samples;
    std::size_t map_index = 0;

    const PosteriorSample& map() const { return samples.at(map_index); }
};

struct BnpmDiagnostics {
    std::vector<double> score_trace;       // joint score after every sweep
    std::vector<std::size_t> groups_trace; // K after every sweep
    std::vector<double> alpha_trace;
    std::vector<double> beta_trace;
    std::size_t sweeps = 0;
    std::size_t slice_exhausted = 0;
    std::size_t max_groups_seen = 0;
    bool max_groups_warned = false;
    /// |mean(Q4) - mean(Q3)| / |mean(Q3)| of the score trace; stationary when < 0.005.
    double stationarity_gap = 0.0;
    bool stationary = false;
    double seconds = 0.0;
};

struct BnpmFit {
    PosteriorTrace trace;
    Partition partition;
    std::size_t n_groups = 0;
    BnpmDiagnostics diagnostics;
};

/// Sequential CRP draw: node i joins group k w.p. n_k / (i + alpha), a new
/// group w.p. alpha / (i + alpha).
inline Partition crp_draw(std::size_t n_nodes, double alpha, rng& gen) {
    Partition p;
    p.assignment.resize(n_nodes);
    std::vector<double> w;
    std::vector<std::size_t> sizes;
    for (std::size_t i = 0; i < n_nodes; ++i) {
        const double u = gen.uniform() * (static_cast<double>(i) + alpha);
        double acc = 0.0;
        std::size_t k = 0;
        for (; k < sizes.size(); ++k) {
            acc += static_cast<double>(sizes[k]);
            if (u < acc)
                break;
        }
        if (k == sizes.size())
            sizes.push_back(0);
        ++sizes[k];
        p.assignment[i] = static_cast<std::uint32_t>(k);
    }
    p.n_groups = static_cast<std::uint32_t>(sizes.size());
    return p;
}

/// Each node gets a label drawn uniformly from [0, N); labels are compacted.
inline Partition random_draw(std::size_t n_nodes, rng& gen) {
    std::vector<std::uint32_t> labels(n_nodes);
    for (auto& l : labels)
        l = static_cast<std::uint32_t>(gen.below(n_nodes));
    return Partition::compact(labels);
}

namespace detail {

inline std::pair<double, bool> stationarity(const std::vector<double>& trace) {
    const std::size_t n = trace.size();
    if (n < 8)
        return {0.0, true};
    const std::size_t q = n / 4;
    auto mean = [&](std::size_t b, std::size_t e) {
        return std::accumulate(trace.begin() + b, trace.begin() + e, 0.0) /
               static_cast<double>(e - b);
    };
    const double q3 = mean(n - 2 * q, n - q);
    const double q4 = mean(n - q, n);
    const double gap = q3 != 0.0 ? std::abs(q4 - q3) / std::abs(q3) : std::abs(q4 - q3);
    return {gap, gap < 0.005};
}

} // namespace detail

/// Runs one chain: initialization, burn-in, then n_samples recorded states
/// every `thinning` sweeps.  The reported partition is the recorded sample
/// with the highest joint score (earliest on ties).
inline BnpmFit fit_bnpm(const Graph& graph, const SamplerConfig& config) {
    config.check();
    if (graph.n_nodes() == 0)
        throw data_error("graph has no nodes");
    const auto start = std::chrono::steady_clock::now();
    rng gen(config.seed);

    double alpha = config.initial_alpha;
    double beta = config.initial_beta;
    if (auto f = std::get_if<FixedHyper>(&config.hyper_mode)) {
        alpha = f->alpha;
        beta = f->beta;
    }
    GibbsState state(graph,
                     config.init == InitMode::crp ? crp_draw(graph.n_nodes(), alpha, gen)
                                                  : random_draw(graph.n_nodes(), gen),
                     alpha, beta);
    ConditionalWorkspace ws;

    BnpmFit fit;
    auto& diag = fit.diagnostics;
    const std::size_t total = config.burn_in + config.n_samples * config.thinning;
    diag.score_trace.reserve(total);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t sweep = 1; sweep <= total; ++sweep) {
        gibbs_sweep(state, graph, gen, ws, config.random_scan);
        auto h = sample_hyperparameters(state, config.hyper_mode, gen);
        state.set_alpha(h.alpha);
        state.set_beta(h.beta);
        diag.slice_exhausted += h.exhausted;

        const double score = joint_log_score(state);
        diag.score_trace.push_back(score);
        diag.groups_trace.push_back(state.n_groups());
        diag.alpha_trace.push_back(state.alpha());
        diag.beta_trace.push_back(state.beta());
        diag.max_groups_seen = std::max(diag.max_groups_seen, state.n_groups());
        if (state.n_groups() > config.max_groups_warn)
            diag.max_groups_warned = true;

        if (sweep > config.burn_in && (sweep - config.burn_in) % config.thinning == 0) {
            fit.trace.samples.push_back({sweep, Partition::compact(state.assignments()),
                                         state.alpha(), state.beta(), score});
            if (score > best) {
                best = score;
                fit.trace.map_index = fit.trace.samples.size() - 1;
            }
        }
    }
    diag.sweeps = total;
    std::tie(diag.stationarity_gap, diag.stationary) = detail::stationarity(diag.score_trace);
    diag.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    fit.partition = fit.trace.map().partition;
    fit.n_groups = fit.partition.n_groups;
    return fit;
}

} // namespace netstruct

#endif // NETSTRUCT_BNPM_HPP
