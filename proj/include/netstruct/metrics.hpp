#ifndef NETSTRUCT_METRICS_HPP
#define NETSTRUCT_METRICS_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "error.hpp"
#include "graph.hpp"

namespace netstruct {

/// K_gold x K_pred contingency counts.
using ContingencyTable = std::vector<std::vector<std::size_t>>;

inline ContingencyTable confusion(const Partition& gold, const Partition& pred) {
    if (gold.size() != pred.size())
        throw data_error("partitions cover different node sets (" + std::to_string(gold.size()) +
                         " vs " + std::to_string(pred.size()) + " nodes)");
    ContingencyTable t(gold.n_groups, std::vector<std::size_t>(pred.n_groups, 0));
    for (std::size_t i = 0; i < gold.size(); ++i)
        ++t[gold.assignment[i]][pred.assignment[i]];
    return t;
}

inline std::size_t group_count(const Partition& p) { return p.n_groups; }

struct NmiScore {
    double value = 0.0;
    double mi = 0.0;
    double h_gold = 0.0;
    double h_pred = 0.0;
};

/// Normalized mutual information 2 I(G;G') / (H(G) + H(G')), natural logs.
/// Two single-group partitions score 1.
inline NmiScore nmi(const Partition& gold, const Partition& pred) {
    const auto table = confusion(gold, pred);
    const double n = static_cast<double>(gold.size());
    NmiScore s;
    if (gold.size() == 0)
        return s;

    std::vector<std::size_t> row(gold.n_groups, 0), col(pred.n_groups, 0);
    for (std::size_t a = 0; a < table.size(); ++a)
        for (std::size_t b = 0; b < table[a].size(); ++b) {
            row[a] += table[a][b];
            col[b] += table[a][b];
        }

    // n_ab/n * log(n * n_ab / (n_a n_b)) keeps the integer counts together.
    auto entropy = [n](const std::vector<std::size_t>& c) {
        double h = 0.0;
        for (auto x : c)
            if (x)
                h -= static_cast<double>(x) / n * std::log(static_cast<double>(x) / n);
        return h;
    };
    s.h_gold = entropy(row);
    s.h_pred = entropy(col);
    for (std::size_t a = 0; a < table.size(); ++a)
        for (std::size_t b = 0; b < table[a].size(); ++b) {
            const auto c = table[a][b];
            if (!c)
                continue;
            const double num = n * static_cast<double>(c);
            const double den = static_cast<double>(row[a]) * static_cast<double>(col[b]);
            s.mi += static_cast<double>(c) / n * std::log(num / den);
        }
    if (s.mi < 0.0)
        s.mi = 0.0;

    const double denom = s.h_gold + s.h_pred;
    if (denom > 0.0)
        s.value = std::min(1.0, std::max(0.0, 2.0 * s.mi / denom));
    else
        s.value = 1.0;
    return s;
}

/// Drops the nodes whose `mask` entry is false from both partitions, then
/// re-compacts.  Used to score against gold sets with unlabeled members.
inline std::pair<Partition, Partition> restrict_to(const Partition& gold, const Partition& pred,
                                                   const std::vector<bool>& mask) {
    if (gold.size() != pred.size() || gold.size() != mask.size())
        throw data_error("partitions cover different node sets");
    std::vector<std::uint32_t> g, p;
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) {
            g.push_back(gold.assignment[i]);
            p.push_back(pred.assignment[i]);
        }
    return {Partition::compact(g), Partition::compact(p)};
}

} // namespace netstruct

#endif // NETSTRUCT_METRICS_HPP
