#ifndef NETSTRUCT_GRAPH_HPP
#define NETSTRUCT_GRAPH_HPP

// Graph data model and the two on-disk text formats.
//
// Edge list: one link per line, "<source> <target>", tokens separated by
// spaces or tabs.  Lines whose first non-blank character is '#' or '%' are
// comments; blank lines are skipped.  A comment of the exact form
// "#@node <token>" declares a node without links so isolated nodes survive a
// write/read cycle, and a "#@directed" line marks the file as directed.  Node tokens are arbitrary strings; dense indices follow
// first appearance.
//
// Partition: one "<node> <group>" pair per line, same comment rules.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "error.hpp"

namespace netstruct {

using node_t = std::uint32_t;
using link_t = std::pair<node_t, node_t>;

/// Immutable simple graph in compressed out-adjacency form.
///
/// Undirected graphs store both directions of every edge, so out(i) is the
/// neighbour set N(i).  A self-loop (i, i) is stored once.
class Graph {
public:
    Graph() = default;

    /// Builds from a link list.  For undirected graphs each edge may be given
    /// in either orientation (or both); duplicates collapse.
    static Graph from_links(std::size_t n_nodes, bool directed, std::span<const link_t> links,
                            std::vector<std::string> labels = {}) {
        std::vector<std::vector<node_t>> adj(n_nodes);
        for (auto [s, t] : links) {
            if (s >= n_nodes || t >= n_nodes)
                throw data_error("link (" + std::to_string(s) + ", " + std::to_string(t) +
                                 ") outside node range");
            adj[s].push_back(t);
            if (!directed && s != t)
                adj[t].push_back(s);
        }
        return from_out_lists(std::move(adj), directed, std::move(labels));
    }

    /// Builds from raw per-node target lists without symmetrizing.  Duplicates
    /// collapse; an undirected graph built this way can be asymmetric, which
    /// validate() reports.
    static Graph from_out_lists(std::vector<std::vector<node_t>> adj, bool directed,
                                std::vector<std::string> labels = {}) {
        Graph g;
        g.directed_ = directed;
        const std::size_t n = adj.size();
        g.offsets_.assign(n + 1, 0);
        std::size_t self = 0;
        std::size_t stored = 0;
        for (std::size_t i = 0; i < n; ++i) {
            auto& row = adj[i];
            std::sort(row.begin(), row.end());
            const std::size_t before = row.size();
            row.erase(std::unique(row.begin(), row.end()), row.end());
            g.duplicates_ += before - row.size();
            for (node_t t : row) {
                if (t >= n)
                    throw data_error("target " + std::to_string(t) + " outside node range");
                if (t == i)
                    ++self;
            }
            stored += row.size();
            g.offsets_[i + 1] = stored;
        }
        g.targets_.reserve(stored);
        for (auto& row : adj)
            g.targets_.insert(g.targets_.end(), row.begin(), row.end());
        g.self_loops_ = self;
        g.n_edges_ = directed ? stored : (stored + self) / 2;
        if (!directed)
            g.duplicates_ /= 2;

        if (labels.empty()) {
            labels.reserve(n);
            for (std::size_t i = 0; i < n; ++i)
                labels.push_back(std::to_string(i));
        } else if (labels.size() != n) {
            throw data_error("label count does not match node count");
        }
        g.labels_ = std::move(labels);
        g.index_.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (!g.index_.emplace(g.labels_[i], static_cast<node_t>(i)).second)
                throw data_error("duplicate node label '" + g.labels_[i] + "'");
        }
        return g;
    }

    std::size_t n_nodes() const noexcept { return labels_.size(); }
    /// M: stored links when directed, unordered pairs when undirected.
    std::size_t n_edges() const noexcept { return n_edges_; }
    bool directed() const noexcept { return directed_; }
    /// Total number of stored out-links, i.e. the length of directed_links().
    std::size_t n_links() const noexcept { return targets_.size(); }

    /// Sorted, distinct out-link targets of node i.
    std::span<const node_t> out(node_t i) const noexcept {
        return {targets_.data() + offsets_[i], targets_.data() + offsets_[i + 1]};
    }
    std::size_t out_degree(node_t i) const noexcept { return offsets_[i + 1] - offsets_[i]; }

    bool has_link(node_t i, node_t j) const noexcept {
        auto row = out(i);
        return std::binary_search(row.begin(), row.end(), j);
    }

    const std::vector<std::string>& labels() const noexcept { return labels_; }
    const std::string& label(node_t i) const { return labels_[i]; }

    /// Dense index of a node token, or -1 when unknown.
    std::int64_t find(std::string_view label) const {
        auto it = index_.find(std::string(label));
        return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
    }

    std::size_t self_loops() const noexcept { return self_loops_; }
    /// Input links dropped because they repeated an existing link.
    std::size_t duplicates_dropped() const noexcept { return duplicates_; }

    friend bool operator==(const Graph& a, const Graph& b) {
        return a.directed_ == b.directed_ && a.labels_ == b.labels_ && a.offsets_ == b.offsets_ &&
               a.targets_ == b.targets_;
    }

private:
    bool directed_ = false;
    std::size_t n_edges_ = 0;
    std::size_t self_loops_ = 0;
    std::size_t duplicates_ = 0;
    std::vector<std::size_t> offsets_{0};
    std::vector<node_t> targets_;
    std::vector<std::string> labels_;
    std::unordered_map<std::string, node_t> index_;
};

/// Group assignment z with compact labels 0..K-1.
struct Partition {
    std::vector<std::uint32_t> assignment;
    std::uint32_t n_groups = 0;

    std::size_t size() const noexcept { return assignment.size(); }

    /// Relabels arbitrary integer labels to 0..K-1 in order of first appearance.
    template <typename Label>
    static Partition compact(std::span<const Label> labels) {
        Partition p;
        p.assignment.reserve(labels.size());
        std::unordered_map<Label, std::uint32_t> remap;
        for (const Label& l : labels) {
            auto [it, inserted] = remap.emplace(l, static_cast<std::uint32_t>(remap.size()));
            p.assignment.push_back(it->second);
        }
        p.n_groups = static_cast<std::uint32_t>(remap.size());
        return p;
    }

    template <typename Label>
    static Partition compact(const std::vector<Label>& labels) {
        return compact(std::span<const Label>(labels));
    }

    std::vector<std::size_t> group_sizes() const {
        std::vector<std::size_t> sizes(n_groups, 0);
        for (auto g : assignment)
            ++sizes[g];
        return sizes;
    }

    /// Every label in range and every group used.
    bool valid() const {
        std::vector<bool> used(n_groups, false);
        for (auto g : assignment) {
            if (g >= n_groups)
                return false;
            used[g] = true;
        }
        return std::all_of(used.begin(), used.end(), [](bool b) { return b; });
    }

    friend bool operator==(const Partition&, const Partition&) = default;
};

/// A partition read from disk, keeping the original group tokens.
struct LabeledPartition {
    Partition partition;
    std::vector<std::string> group_names; // indexed by compact group id
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n\v\f";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos)
        return {};
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t'))
            ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t')
            ++j;
        if (j > i)
            out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

// Calls fn(line_number, trimmed_line) for every line; strips a UTF-8 BOM.
template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
        ++no;
        std::string_view v(line);
        if (no == 1 && v.starts_with("\xEF\xBB\xBF"))
            v.remove_prefix(3);
        fn(no, trim(v));
    }
}

inline constexpr std::string_view node_directive = "#@node";
inline constexpr std::string_view directed_directive = "#@directed";

} // namespace detail

/// Parses an edge list.  Node indices follow first appearance.
inline Graph load_edge_list(std::istream& in, bool directed) {
    std::vector<std::string> labels;
    std::unordered_map<std::string, node_t> index;
    std::vector<link_t> links;
    auto intern = [&](std::string_view tok) {
        auto [it, inserted] = index.emplace(std::string(tok), static_cast<node_t>(labels.size()));
        if (inserted)
            labels.emplace_back(tok);
        return it->second;
    };

    detail::for_each_line(in, [&](std::size_t no, std::string_view line) {
        if (line.empty())
            return;
        if (line.front() == '#' || line.front() == '%') {
            auto toks = detail::split_ws(line);
            if (toks.size() == 2 && toks[0] == detail::node_directive)
                intern(toks[1]);
            return;
        }
        auto toks = detail::split_ws(line);
        if (toks.size() != 2)
            throw parse_error(no, "expected two node tokens, found " + std::to_string(toks.size()));
        node_t s = intern(toks[0]);
        node_t t = intern(toks[1]);
        links.emplace_back(s, t);
    });
    if (labels.empty())
        throw data_error("edge list contains no nodes");
    const std::size_t n = labels.size();
    return Graph::from_links(n, directed, links, std::move(labels));
}

inline Graph parse_edge_list(std::string_view text, bool directed) {
    std::istringstream in{std::string(text)};
    return load_edge_list(in, directed);
}

/// True when the text carries a "#@directed" line.
inline bool declares_directed(std::string_view text) {
    std::istringstream in{std::string(text)};
    bool found = false;
    detail::for_each_line(in, [&](std::size_t, std::string_view line) {
        if (line == detail::directed_directive)
            found = true;
    });
    return found;
}

/// Reads a partition that must cover every node of `graph` exactly once.
inline LabeledPartition load_partition(std::istream& in, const Graph& graph) {
    constexpr std::uint32_t unset = ~std::uint32_t{0};
    std::vector<std::uint32_t> raw(graph.n_nodes(), unset);
    std::unordered_map<std::string, std::uint32_t> group_ids;
    std::vector<std::string> group_tokens;

    detail::for_each_line(in, [&](std::size_t no, std::string_view line) {
        if (line.empty() || line.front() == '#' || line.front() == '%')
            return;
        auto toks = detail::split_ws(line);
        if (toks.size() != 2)
            throw parse_error(no, "expected \"node group\", found " + std::to_string(toks.size()) +
                                      " tokens");
        auto idx = graph.find(toks[0]);
        if (idx < 0)
            throw data_error("line " + std::to_string(no) + ": unknown node '" +
                             std::string(toks[0]) + "'");
        if (raw[idx] != unset)
            throw data_error("line " + std::to_string(no) + ": node '" + std::string(toks[0]) +
                             "' listed twice");
        auto [it, inserted] =
            group_ids.emplace(std::string(toks[1]), static_cast<std::uint32_t>(group_tokens.size()));
        if (inserted)
            group_tokens.emplace_back(toks[1]);
        raw[idx] = it->second;
    });

    for (std::size_t i = 0; i < raw.size(); ++i)
        if (raw[i] == unset)
            throw data_error("node '" + graph.label(static_cast<node_t>(i)) +
                             "' missing from partition");

    // Compact in node order so group ids do not depend on file line order.
    LabeledPartition out;
    out.partition = Partition::compact(raw);
    out.group_names.resize(out.partition.n_groups);
    for (std::size_t i = 0; i < raw.size(); ++i)
        out.group_names[out.partition.assignment[i]] = group_tokens[raw[i]];
    return out;
}

inline LabeledPartition parse_partition(std::string_view text, const Graph& graph) {
    std::istringstream in{std::string(text)};
    return load_partition(in, graph);
}

/// Writes `graph` in edge-list format.  Undirected edges are written once as
/// (i, j) with i <= j in index order; isolated nodes get a "#@node" line and
/// directed graphs a leading "#@directed" line.
inline void write_edge_list(std::ostream& out, const Graph& graph) {
    if (graph.directed())
        out << detail::directed_directive << '\n';
    std::vector<bool> linked(graph.n_nodes(), false);
    for (node_t i = 0; i < graph.n_nodes(); ++i)
        for (node_t j : graph.out(i))
            linked[i] = linked[j] = true;
    for (node_t i = 0; i < graph.n_nodes(); ++i)
        if (!linked[i])
            out << detail::node_directive << ' ' << graph.label(i) << '\n';
    for (node_t i = 0; i < graph.n_nodes(); ++i)
        for (node_t j : graph.out(i))
            if (graph.directed() || i <= j)
                out << graph.label(i) << ' ' << graph.label(j) << '\n';
}

/// Writes one "<node> <group>" line per node in index order.  Group tokens
/// come from `names` when given, else the compact group index.
inline void write_partition(std::ostream& out, const Graph& graph, const Partition& p,
                            std::span<const std::string> names = {}) {
    for (node_t i = 0; i < graph.n_nodes(); ++i) {
        out << graph.label(i) << ' ';
        if (names.empty())
            out << p.assignment[i];
        else
            out << names[p.assignment[i]];
        out << '\n';
    }
}

/// Every link as a (source, target) pair in source order.  Undirected edges
/// appear once per endpoint; self-loops once.
inline std::vector<link_t> directed_links(const Graph& graph) {
    std::vector<link_t> links;
    links.reserve(graph.n_links());
    for (node_t i = 0; i < graph.n_nodes(); ++i)
        for (node_t j : graph.out(i))
            links.emplace_back(i, j);
    return links;
}

struct GraphDiagnostics {
    std::vector<node_t> isolated;
    std::size_t self_loops = 0;
    std::size_t duplicates_dropped = 0;
    std::vector<link_t> asymmetric; // (i, j) stored without (j, i) in an undirected graph

    std::vector<std::string> warnings() const {
        std::vector<std::string> w;
        if (!isolated.empty()) {
            std::string s = "isolated node(s):";
            for (auto i : isolated)
                s += ' ' + std::to_string(i);
            w.push_back(std::move(s));
        }
        if (self_loops)
            w.push_back(std::to_string(self_loops) + " self-loop(s)");
        if (duplicates_dropped)
            w.push_back(std::to_string(duplicates_dropped) + " duplicate link(s) dropped");
        if (!asymmetric.empty())
            w.push_back(std::to_string(asymmetric.size()) + " asymmetric link(s) in undirected graph");
        return w;
    }
};

inline GraphDiagnostics validate(const Graph& graph) {
    GraphDiagnostics d;
    d.self_loops = graph.self_loops();
    d.duplicates_dropped = graph.duplicates_dropped();
    std::vector<std::size_t> in_deg(graph.n_nodes(), 0);
    for (node_t i = 0; i < graph.n_nodes(); ++i)
        for (node_t j : graph.out(i)) {
            ++in_deg[j];
            if (!graph.directed() && !graph.has_link(j, i))
                d.asymmetric.emplace_back(i, j);
        }
    for (node_t i = 0; i < graph.n_nodes(); ++i)
        if (graph.out_degree(i) == 0 && in_deg[i] == 0)
            d.isolated.push_back(i);
    return d;
}

/// 64-bit FNV-1a over directedness, node tokens, and links in index order.
/// Independent of comments, whitespace, and line order of equivalent files
/// that yield the same index map.
inline std::uint64_t content_hash(const Graph& graph) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](const void* data, std::size_t n) {
        auto p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= p[i];
            h *= 0x100000001b3ULL;
        }
    };
    auto feed_u64 = [&](std::uint64_t v) {
        unsigned char b[8];
        for (int i = 0; i < 8; ++i)
            b[i] = static_cast<unsigned char>(v >> (8 * i));
        feed(b, 8);
    };
    feed_u64(graph.directed() ? 1 : 0);
    feed_u64(graph.n_nodes());
    for (const auto& l : graph.labels()) {
        feed_u64(l.size());
        feed(l.data(), l.size());
    }
    for (node_t i = 0; i < graph.n_nodes(); ++i) {
        feed_u64(graph.out_degree(i));
        for (node_t j : graph.out(i))
            feed_u64(j);
    }
    return h;
}

} // namespace netstruct

#endif // NETSTRUCT_GRAPH_HPP
