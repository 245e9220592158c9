#ifndef NETSTRUCT_ERROR_HPP
#define NETSTRUCT_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace netstruct {

/// Bad input data: unparsable files, unknown nodes, infeasible generator specs.
class data_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed line in an edge-list or partition file.
class parse_error : public data_error {
public:
    parse_error(std::size_t line, const std::string& what)
        : data_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A fit could not produce a usable state.
class model_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Every group assigns zero probability to one node's link pattern (q_ik = 0 for all k).
class degenerate_node_error : public model_error {
public:
    explicit degenerate_node_error(std::size_t node)
        : model_error("degenerate node " + std::to_string(node) +
                      ": every group assigns it zero probability"),
          node_(node) {}

    std::size_t node() const noexcept { return node_; }

private:
    std::size_t node_;
};

} // namespace netstruct

#endif // NETSTRUCT_ERROR_HPP
