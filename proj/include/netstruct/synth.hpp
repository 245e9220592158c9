#ifndef NETSTRUCT_SYNTH_HPP
#define NETSTRUCT_SYNTH_HPP

// Planted-block benchmark generators.
//
// Every generator is a pure function of its arguments and seed.  Edges are
// placed uniformly at random without replacement inside each block pair, so
// per-block counts are exact.

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "error.hpp"
#include "graph.hpp"
#include "rng.hpp"

namespace netstruct {

struct BlockSpec {
    std::vector<std::size_t> group_sizes;
    /// edge_counts[a][b]: edges between block a and block b.  Undirected specs
    /// must be symmetric and each unordered pair is read once (a <= b).
    std::vector<std::vector<std::size_t>> edge_counts;
    bool directed = false;
    std::uint64_t seed = 0;
};

struct GeneratedGraph {
    Graph graph;
    Partition gold;
    std::vector<std::string> group_names;
};

namespace detail {

// k distinct integers from [0, n), in draw order (Floyd's algorithm).
inline std::vector<std::uint64_t> sample_distinct(std::uint64_t n, std::uint64_t k, rng& gen) {
    std::unordered_set<std::uint64_t> chosen;
    chosen.reserve(k * 2);
    std::vector<std::uint64_t> out;
    out.reserve(k);
    for (std::uint64_t j = n - k; j < n; ++j) {
        const std::uint64_t t = gen.below(j + 1);
        const std::uint64_t pick = chosen.count(t) ? j : t;
        chosen.insert(pick);
        out.push_back(pick);
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::uint64_t block_capacity(std::size_t na, std::size_t nb, bool same, bool directed) {
    if (!same)
        return static_cast<std::uint64_t>(na) * nb;
    const auto n = static_cast<std::uint64_t>(na);
    return directed ? n * (n - 1) : n * (n - 1) / 2;
}

// Decodes the r-th pair of the block pair (a, b); nodes are local offsets.
inline std::pair<std::uint64_t, std::uint64_t> decode_pair(std::uint64_t r, std::size_t na,
                                                           std::size_t nb, bool same,
                                                           bool directed) {
    if (!same)
        return {r / nb, r % nb};
    if (directed) {
        // row u skips the diagonal
        const std::uint64_t u = r / (na - 1);
        std::uint64_t v = r % (na - 1);
        if (v >= u)
            ++v;
        return {u, v};
    }
    // upper triangle, row-major: row u holds na-1-u pairs
    std::uint64_t u = 0;
    std::uint64_t row = na - 1;
    while (r >= row) {
        r -= row;
        ++u;
        --row;
    }
    return {u, u + 1 + r};
}

} // namespace detail

/// Checks a block spec and throws data_error naming the first offending pair.
inline void check_block_spec(const BlockSpec& spec) {
    const std::size_t k = spec.group_sizes.size();
    if (k == 0)
        throw data_error("block spec has no groups");
    if (spec.edge_counts.size() != k)
        throw data_error("edge_counts must be a " + std::to_string(k) + "x" + std::to_string(k) +
                         " matrix");
    for (std::size_t a = 0; a < k; ++a) {
        if (spec.edge_counts[a].size() != k)
            throw data_error("edge_counts row " + std::to_string(a) + " has wrong length");
        for (std::size_t b = 0; b < k; ++b) {
            if (!spec.directed && spec.edge_counts[a][b] != spec.edge_counts[b][a])
                throw data_error("edge_counts not symmetric at blocks (" + std::to_string(a) +
                                 ", " + std::to_string(b) + ")");
            if (!spec.directed && b < a)
                continue;
            const auto cap = detail::block_capacity(spec.group_sizes[a], spec.group_sizes[b],
                                                    a == b, spec.directed);
            if (spec.edge_counts[a][b] > cap)
                throw data_error("blocks (" + std::to_string(a) + ", " + std::to_string(b) +
                                 "): requested " + std::to_string(spec.edge_counts[a][b]) +
                                 " edges but only " + std::to_string(cap) + " node pairs exist");
        }
    }
}

/// Places exactly edge_counts[a][b] distinct edges in every block pair.
/// Nodes are numbered block by block; gold labels are the block indices.
inline GeneratedGraph gen_planted(const BlockSpec& spec) {
    check_block_spec(spec);
    const std::size_t k = spec.group_sizes.size();
    std::vector<std::size_t> first(k + 1, 0);
    for (std::size_t a = 0; a < k; ++a)
        first[a + 1] = first[a] + spec.group_sizes[a];

    rng gen(spec.seed);
    std::vector<link_t> links;
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = spec.directed ? 0 : a; b < k; ++b) {
            const std::size_t count = spec.edge_counts[a][b];
            if (count == 0)
                continue;
            const std::size_t na = spec.group_sizes[a];
            const std::size_t nb = spec.group_sizes[b];
            const auto cap = detail::block_capacity(na, nb, a == b, spec.directed);
            for (auto r : detail::sample_distinct(cap, count, gen)) {
                auto [u, v] = detail::decode_pair(r, na, nb, a == b, spec.directed);
                links.emplace_back(static_cast<node_t>(first[a] + u),
                                   static_cast<node_t>(first[b] + v));
            }
        }

    GeneratedGraph out;
    out.graph = Graph::from_links(first[k], spec.directed, links);
    std::vector<std::uint32_t> labels(first[k]);
    for (std::size_t a = 0; a < k; ++a)
        std::fill(labels.begin() + first[a], labels.begin() + first[a + 1],
                  static_cast<std::uint32_t>(a));
    out.gold = Partition::compact(labels);
    for (std::size_t a = 0; a < k; ++a)
        out.group_names.push_back("g" + std::to_string(a));
    return out;
}

namespace detail {

// Splits `total` over `targets` as evenly as possible; the remainder goes to
// distinct targets chosen uniformly at random.
inline std::vector<std::size_t> split_quota(std::size_t total, std::size_t targets, rng& gen) {
    std::vector<std::size_t> share(targets, total / targets);
    for (auto idx : sample_distinct(targets, total % targets, gen))
        ++share[idx];
    return share;
}

} // namespace detail

/// Mixed community/bipartite benchmark with 100-node groups.
///
/// Community groups: 2,400 internal edges each and 600 edges from the group
/// to all other groups.  Bipartite pairs: 4,800 edges between the two halves,
/// no internal edges, and 1,200 edges from the pair to groups of other pairs.
/// Quotas are split evenly over the eligible (source, target) group pairs.
inline BlockSpec syn_mixture_spec(std::size_t n_community, std::size_t n_pairs,
                                  std::uint64_t seed) {
    constexpr std::size_t group_size = 100;
    constexpr std::size_t within = 2400;
    constexpr std::size_t community_out = 600;
    constexpr std::size_t pair_between = 4800;
    constexpr std::size_t pair_out = 1200;

    const std::size_t k = n_community + 2 * n_pairs;
    BlockSpec spec;
    spec.group_sizes.assign(k, group_size);
    spec.edge_counts.assign(k, std::vector<std::size_t>(k, 0));
    spec.directed = false;
    spec.seed = mix_seed(seed);
    rng quota(seed);

    auto add = [&](std::size_t a, std::size_t b, std::size_t c) {
        spec.edge_counts[a][b] += c;
        if (a != b)
            spec.edge_counts[b][a] += c;
    };
    for (std::size_t g = 0; g < n_community; ++g) {
        add(g, g, within);
        std::vector<std::size_t> others;
        for (std::size_t h = 0; h < k; ++h)
            if (h != g)
                others.push_back(h);
        if (others.empty())
            continue;
        auto share = detail::split_quota(community_out, others.size(), quota);
        for (std::size_t t = 0; t < others.size(); ++t)
            add(g, others[t], share[t]);
    }
    for (std::size_t p = 0; p < n_pairs; ++p) {
        const std::size_t a = n_community + 2 * p;
        const std::size_t b = a + 1;
        add(a, b, pair_between);
        std::vector<std::pair<std::size_t, std::size_t>> cells;
        for (std::size_t src : {a, b})
            for (std::size_t h = n_community; h < k; ++h)
                if (h != a && h != b)
                    cells.emplace_back(src, h);
        if (cells.empty())
            continue;
        auto share = detail::split_quota(pair_out, cells.size(), quota);
        for (std::size_t t = 0; t < cells.size(); ++t)
            add(cells[t].first, cells[t].second, share[t]);
    }
    return spec;
}

/// 10,000 nodes, 300,000 edges, 100 groups: 40 community groups and 30
/// bipartite pairs.
inline GeneratedGraph gen_syn10000(std::uint64_t seed) {
    return gen_planted(syn_mixture_spec(40, 30, seed));
}

/// Reduced variant with the same per-group edge budgets: 11 community groups
/// and 7 bipartite pairs (2,500 nodes, 75,000 edges, 25 groups).
inline GeneratedGraph gen_syn2500(std::uint64_t seed) {
    return gen_planted(syn_mixture_spec(11, 7, seed));
}

/// 100 nodes in five groups of 20: three communities (90 internal edges
/// each), one bipartite pair (120 edges between halves, none inside), and
/// 12 edges spread over the remaining nine group pairs.  402 edges in total.
inline BlockSpec syn100_spec(std::uint64_t seed) {
    BlockSpec spec;
    spec.group_sizes.assign(5, 20);
    spec.edge_counts.assign(5, std::vector<std::size_t>(5, 0));
    spec.directed = false;
    spec.seed = mix_seed(seed);
    for (std::size_t g = 0; g < 3; ++g)
        spec.edge_counts[g][g] = 90;
    spec.edge_counts[3][4] = spec.edge_counts[4][3] = 120;

    std::vector<std::pair<std::size_t, std::size_t>> rest;
    for (std::size_t a = 0; a < 5; ++a)
        for (std::size_t b = a + 1; b < 5; ++b)
            if (!(a == 3 && b == 4))
                rest.emplace_back(a, b);
    rng quota(seed);
    auto share = detail::split_quota(12, rest.size(), quota);
    for (std::size_t t = 0; t < rest.size(); ++t) {
        auto [a, b] = rest[t];
        spec.edge_counts[a][b] = spec.edge_counts[b][a] = share[t];
    }
    return spec;
}

inline GeneratedGraph gen_syn100(std::uint64_t seed) { return gen_planted(syn100_spec(seed)); }

/// Keystone benchmark, directed, 108 nodes.  Nodes 0-99 form groups A-D of
/// 25 and carry 1,000 uniformly placed links among themselves (mean
/// out-degree 10).  Every member of a group also links to its four keystones:
/// A -> 100..103, B -> 102..105, C -> 104..107, D -> 106, 107, 100, 101.
/// Keystones (100-107) have no out-links and gold group "keystone".
inline GeneratedGraph gen_syn108(std::uint64_t seed) {
    constexpr std::size_t members = 100;
    constexpr std::size_t keystones = 8;
    constexpr std::size_t random_links = 1000;
    rng gen(seed);

    std::vector<link_t> links;
    for (auto r : detail::sample_distinct(members * (members - 1), random_links, gen)) {
        auto [u, v] = detail::decode_pair(r, members, members, true, true);
        links.emplace_back(static_cast<node_t>(u), static_cast<node_t>(v));
    }
    for (node_t i = 0; i < members; ++i) {
        const std::size_t group = i / 25;
        for (std::size_t s = 0; s < 4; ++s)
            links.emplace_back(i, static_cast<node_t>(members + (2 * group + s) % keystones));
    }

    GeneratedGraph out;
    out.graph = Graph::from_links(members + keystones, true, links);
    std::vector<std::uint32_t> labels(members + keystones);
    for (std::size_t i = 0; i < labels.size(); ++i)
        labels[i] = static_cast<std::uint32_t>(i < members ? i / 25 : 4);
    out.gold = Partition::compact(labels);
    out.group_names = {"A", "B", "C", "D", "keystone"};
    return out;
}

} // namespace netstruct

#endif // NETSTRUCT_SYNTH_HPP
