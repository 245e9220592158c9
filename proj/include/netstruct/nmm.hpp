#ifndef NETSTRUCT_NMM_HPP
#define NETSTRUCT_NMM_HPP

// Newman-Leicht mixture model with a fixed number of groups, fit by EM.
//
// Each node falls into group k with probability pi_k; each of its out-links
// independently picks target j with probability theta_kj.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "graph.hpp"
#include "rng.hpp"

namespace netstruct {

/// Row-major dense matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }
    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept {
        return {data_.data() + r * cols_, cols_};
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

struct NmmState {
    std::size_t n_groups = 0;
    std::vector<double> pi;  // K
    Matrix theta;            // K x N
    Matrix responsibilities; // N x K
    double expected_ll = 0.0;
};

struct NmmConfig {
    std::size_t max_iters = 500;
    double tol = 1e-8;
    std::size_t n_restarts = 10;
    std::uint64_t seed = 0;
};

struct NmmRunTrace {
    std::size_t restart = 0;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<double> expected_ll; // one entry per M-step
    std::optional<std::size_t> degenerate_node;
};

struct NmmDiagnostics {
    std::vector<NmmRunTrace> runs;
    std::size_t best_restart = 0;
    std::size_t degenerate_events = 0;
};

struct NmmFit {
    NmmState state;
    Partition partition;
    NmmDiagnostics diagnostics;
};

/// Rows drawn independently from the flat Dirichlet on the K-simplex.
inline Matrix init_responsibilities(std::size_t n_nodes, std::size_t n_groups, rng& gen) {
    if (n_groups < 1)
        throw model_error("number of groups must be at least 1");
    Matrix q(n_nodes, n_groups);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        auto r = q.row(i);
        double sum = 0.0;
        for (auto& x : r) {
            x = gen.exponential();
            sum += x;
        }
        for (auto& x : r)
            x /= sum;
    }
    return q;
}

/// q_ik proportional to pi_k prod_j theta_kj^A_ij, evaluated in log space.
inline Matrix e_step(const Graph& graph, std::span<const double> pi, const Matrix& theta) {
    const std::size_t n = graph.n_nodes();
    const std::size_t k_count = pi.size();
    Matrix log_theta(theta.rows(), theta.cols());
    for (std::size_t k = 0; k < k_count; ++k)
        for (std::size_t j = 0; j < n; ++j)
            log_theta(k, j) = std::log(theta(k, j));

    Matrix q(n, k_count);
    std::vector<double> lw(k_count);
    for (node_t i = 0; i < n; ++i) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < k_count; ++k) {
            double w = std::log(pi[k]);
            for (node_t j : graph.out(i))
                w += log_theta(k, j);
            lw[k] = w;
            best = std::max(best, w);
        }
        if (!(best > -std::numeric_limits<double>::infinity()))
            throw degenerate_node_error(i);
        double sum = 0.0;
        for (std::size_t k = 0; k < k_count; ++k) {
            lw[k] = std::exp(lw[k] - best);
            sum += lw[k];
        }
        for (std::size_t k = 0; k < k_count; ++k)
            q(i, k) = lw[k] / sum;
    }
    return q;
}

inline Matrix e_step(const Graph& graph, const NmmState& state) {
    return e_step(graph, state.pi, state.theta);
}

/// Closed-form re-estimation of pi and theta from responsibilities.  A group
/// whose members carry no link mass gets the uniform theta row.
inline std::pair<std::vector<double>, Matrix> m_step(const Graph& graph, const Matrix& q) {
    const std::size_t n = graph.n_nodes();
    const std::size_t k_count = q.cols();
    std::vector<double> pi(k_count, 0.0);
    Matrix theta(k_count, n, 0.0);
    for (node_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < k_count; ++k) {
            const double qik = q(i, k);
            pi[k] += qik;
            for (node_t j : graph.out(i))
                theta(k, j) += qik;
        }
    }
    for (auto& p : pi)
        p /= static_cast<double>(n);
    for (std::size_t k = 0; k < k_count; ++k) {
        auto row = theta.row(k);
        double mass = 0.0;
        for (double x : row)
            mass += x;
        if (mass > 0.0) {
            for (auto& x : row)
                x /= mass;
        } else {
            std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(n));
        }
    }
    return {std::move(pi), std::move(theta)};
}

/// sum_ik q_ik [ln pi_k + sum_j A_ij ln theta_kj], with 0 ln 0 = 0.
///
/// After an M-step theta_kj >= q_ik / (total links) for every link (i, j) and
/// pi_k >= q_ik / N, so an entry that underflowed to zero is read at that
/// bound instead of as -inf; the term it feeds is then of order q_ik ln q_ik, i.e. zero.
inline double expected_log_likelihood(const Graph& graph, std::span<const double> pi,
                                      const Matrix& theta, const Matrix& q) {
    const double log_links = std::log(std::max<double>(1.0, static_cast<double>(graph.n_links())));
    const double log_n = std::log(static_cast<double>(graph.n_nodes()));
    double total = 0.0;
    for (node_t i = 0; i < graph.n_nodes(); ++i) {
        for (std::size_t k = 0; k < pi.size(); ++k) {
            const double qik = q(i, k);
            if (qik == 0.0)
                continue;
            const double floor = std::log(qik) - log_links;
            double term = pi[k] > 0.0 ? std::log(pi[k]) : std::log(qik) - log_n;
            for (node_t j : graph.out(i))
                term += theta(k, j) > 0.0 ? std::log(theta(k, j)) : floor;
            total += qik * term;
        }
    }
    return total;
}

inline double expected_log_likelihood(const Graph& graph, const NmmState& state) {
    return expected_log_likelihood(graph, state.pi, state.theta, state.responsibilities);
}

/// Marginal log-likelihood sum_i ln sum_k pi_k prod_j theta_kj^A_ij.
inline double observed_log_likelihood(const Graph& graph, std::span<const double> pi,
                                      const Matrix& theta) {
    double total = 0.0;
    std::vector<double> lw(pi.size());
    for (node_t i = 0; i < graph.n_nodes(); ++i) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < pi.size(); ++k) {
            double w = std::log(pi[k]);
            for (node_t j : graph.out(i))
                w += std::log(theta(k, j));
            lw[k] = w;
            best = std::max(best, w);
        }
        if (!(best > -std::numeric_limits<double>::infinity()))
            return best;
        double s = 0.0;
        for (double w : lw)
            s += std::exp(w - best);
        total += best + std::log(s);
    }
    return total;
}

/// Row-wise argmax (lowest index on ties), then compacted.
inline Partition hard_partition(const Matrix& q) {
    std::vector<std::uint32_t> labels(q.rows());
    for (std::size_t i = 0; i < q.rows(); ++i) {
        auto r = q.row(i);
        labels[i] = static_cast<std::uint32_t>(std::max_element(r.begin(), r.end()) - r.begin());
    }
    return Partition::compact(labels);
}

/// One EM run from the given responsibilities.  Throws degenerate_node_error.
inline NmmState run_em(const Graph& graph, Matrix q, const NmmConfig& config,
                       NmmRunTrace* trace = nullptr) {
    NmmState s;
    s.n_groups = q.cols();
    auto [pi, theta] = m_step(graph, q);
    s.pi = std::move(pi);
    s.theta = std::move(theta);
    s.responsibilities = std::move(q);
    s.expected_ll = expected_log_likelihood(graph, s);
    if (trace)
        trace->expected_ll.push_back(s.expected_ll);

    for (std::size_t it = 1; it <= config.max_iters; ++it) {
        Matrix next_q;
        try {
            next_q = e_step(graph, s);
        } catch (const degenerate_node_error& e) {
            if (trace)
                trace->degenerate_node = e.node();
            throw;
        }
        auto [next_pi, next_theta] = m_step(graph, next_q);
        const double previous = s.expected_ll;
        s.pi = std::move(next_pi);
        s.theta = std::move(next_theta);
        s.responsibilities = std::move(next_q);
        s.expected_ll = expected_log_likelihood(graph, s);
        if (trace) {
            trace->expected_ll.push_back(s.expected_ll);
            trace->iterations = it;
        }
        if (std::abs(s.expected_ll - previous) < config.tol) {
            if (trace)
                trace->converged = true;
            break;
        }
    }
    return s;
}

/// Best-of-restarts EM.  Restart r draws its initial responsibilities from
/// rng::derive(seed, r).
inline NmmFit fit_nmm(const Graph& graph, std::size_t n_groups, const NmmConfig& config) {
    if (n_groups < 1)
        throw model_error("number of groups must be at least 1");
    const std::size_t restarts = std::max<std::size_t>(1, config.n_restarts);

    NmmFit fit;
    std::optional<NmmState> best;
    std::optional<degenerate_node_error> last_error;
    for (std::size_t r = 0; r < restarts; ++r) {
        rng gen = rng::derive(config.seed, r);
        NmmRunTrace trace;
        trace.restart = r;
        try {
            NmmState s = run_em(graph, init_responsibilities(graph.n_nodes(), n_groups, gen),
                                config, &trace);
            if (!best || s.expected_ll > best->expected_ll) {
                best = std::move(s);
                fit.diagnostics.best_restart = r;
            }
        } catch (const degenerate_node_error& e) {
            ++fit.diagnostics.degenerate_events;
            last_error = e;
        }
        fit.diagnostics.runs.push_back(std::move(trace));
    }
    if (!best)
        throw *last_error;
    fit.partition = hard_partition(best->responsibilities);
    fit.state = std::move(*best);
    return fit;
}

} // namespace netstruct

#endif // NETSTRUCT_NMM_HPP
