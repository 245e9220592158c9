#include <gtest/gtest.h>

#include <sstream>

#include <netstruct/graph.hpp>

#include "checks.hpp"

using namespace netstruct;

namespace {

std::string written(const Graph& g) {
    std::ostringstream out;
    write_edge_list(out, g);
    return out.str();
}

} // namespace

TEST(EdgeList, ParsesUndirectedTriangle) {
    auto g = parse_edge_list("a b\nb c\nc a\n", false);
    EXPECT_EQ(g.n_nodes(), 3u);
    EXPECT_EQ(g.n_edges(), 3u);
    EXPECT_EQ(g.n_links(), 6u);
    EXPECT_EQ(g.label(0), "a");
    EXPECT_EQ(g.find("c"), 2);
    EXPECT_EQ(g.find("zz"), -1);
    for (node_t i = 0; i < 3; ++i)
        EXPECT_EQ(g.out_degree(i), 2u);
}

TEST(EdgeList, CommentsBlankLinesTabsAndCrlf) {
    auto g = parse_edge_list("\xEF\xBB\xBF# header\n% other\n\n1\t2\r\n  2 3  \n", false);
    EXPECT_EQ(g.n_nodes(), 3u);
    EXPECT_EQ(g.n_edges(), 2u);
    EXPECT_EQ(g.label(0), "1");
}

TEST(EdgeList, MalformedLineReportsLineNumber) {
    try {
        parse_edge_list("1 2\n# c\n3 4 5\n", false);
        FAIL() << "expected parse_error";
    } catch (const parse_error& e) {
        EXPECT_EQ(e.line(), 3u);
    }
    EXPECT_THROW(parse_edge_list("1\n", false), parse_error);
}

TEST(EdgeList, EmptyInputIsAnError) {
    EXPECT_THROW(parse_edge_list("", false), data_error);
    EXPECT_THROW(parse_edge_list("# only comments\n", true), data_error);
}

TEST(EdgeList, DuplicatesCollapseAndAreCounted) {
    auto g = parse_edge_list("1 2\n2 1\n1 2\n", false);
    EXPECT_EQ(g.n_edges(), 1u);
    EXPECT_EQ(g.duplicates_dropped(), 2u);
    auto d = parse_edge_list("1 2\n1 2\n2 1\n", true);
    EXPECT_EQ(d.n_edges(), 2u);
    EXPECT_EQ(d.duplicates_dropped(), 1u);
}

TEST(EdgeList, SelfLoopStoredOnce) {
    auto g = parse_edge_list("1 1\n1 2\n", false);
    EXPECT_EQ(g.n_edges(), 2u);
    EXPECT_EQ(g.self_loops(), 1u);
    EXPECT_TRUE(g.has_link(0, 0));
    // directed_links holds 2M - self-loops entries
    EXPECT_EQ(directed_links(g).size(), 2 * g.n_edges() - g.self_loops());
}

TEST(EdgeList, DirectedKeepsOrientation) {
    auto g = parse_edge_list("1 2\n2 3\n", true);
    EXPECT_TRUE(g.has_link(0, 1));
    EXPECT_FALSE(g.has_link(1, 0));
    EXPECT_EQ(directed_links(g).size(), 2u);
}

TEST(EdgeList, IsolatedNodeSurvivesRoundTrip) {
    auto g = parse_edge_list("#@node 9\n1 2\n", false);
    EXPECT_EQ(g.n_nodes(), 3u);
    auto diag = validate(g);
    ASSERT_EQ(diag.isolated.size(), 1u);
    EXPECT_EQ(g.label(diag.isolated[0]), "9");
    auto again = parse_edge_list(written(g), false);
    EXPECT_EQ(again.n_nodes(), 3u);
    EXPECT_EQ(content_hash(again), content_hash(g));
}

TEST(EdgeList, DirectedDirective) {
    auto g = parse_edge_list("1 2\n", true);
    const auto text = written(g);
    EXPECT_EQ(text, "#@directed\n1 2\n");
    EXPECT_TRUE(declares_directed(text));
    EXPECT_FALSE(declares_directed("1 2\n# @directed\n"));
}

TEST(EdgeList, RoundTripRandomGraphs) {
    rng gen(3);
    for (int r = 0; r < 200; ++r) {
        const bool directed = r % 2 == 0;
        auto g = checks::random_graph(gen, 1 + gen.below(30), gen.uniform() * 0.3, directed,
                                      r % 3 == 0);
        auto text = written(g);
        auto back = parse_edge_list(text, directed);
        ASSERT_EQ(back.n_nodes(), g.n_nodes());
        EXPECT_EQ(back.n_edges(), g.n_edges());
        // reparsing reindexes by first appearance, so compare link sets by label
        for (node_t i = 0; i < g.n_nodes(); ++i)
            for (node_t j : g.out(i))
                EXPECT_TRUE(back.has_link(back.find(g.label(i)), back.find(g.label(j))));
    }
}

TEST(EdgeList, UndirectedGraphsAreSymmetric) {
    rng gen(8);
    for (int r = 0; r < 100; ++r) {
        auto g = checks::random_graph(gen, 2 + gen.below(20), 0.3, false, true);
        EXPECT_TRUE(validate(g).asymmetric.empty());
        for (node_t i = 0; i < g.n_nodes(); ++i)
            for (node_t j : g.out(i))
                EXPECT_TRUE(g.has_link(j, i));
    }
}

TEST(Graph, ValidateReportsAsymmetry) {
    auto g = Graph::from_out_lists({{1}, {}}, false);
    auto d = validate(g);
    ASSERT_EQ(d.asymmetric.size(), 1u);
    EXPECT_FALSE(d.warnings().empty());
}

TEST(Graph, LinkOutsideRangeThrows) {
    std::vector<link_t> links{{0, 5}};
    EXPECT_THROW(Graph::from_links(2, true, links), data_error);
}

TEST(Graph, ContentHashTracksContent) {
    auto a = parse_edge_list("1 2\n2 3\n", false);
    auto b = parse_edge_list("# comment\n1   2\n3 2\n", false);
    auto c = parse_edge_list("1 2\n2 3\n", true);
    auto d = parse_edge_list("1 2\n1 3\n", false);
    EXPECT_EQ(content_hash(a), content_hash(b));
    EXPECT_NE(content_hash(a), content_hash(c));
    EXPECT_NE(content_hash(a), content_hash(d));
}

TEST(PartitionFile, LoadsAndCompactsInNodeOrder) {
    auto g = parse_edge_list("a b\nb c\nc d\n", false);
    auto p = parse_partition("d x\nc x\nb y\na y\n", g);
    EXPECT_EQ(p.partition.assignment, (std::vector<std::uint32_t>{0, 0, 1, 1}));
    EXPECT_EQ(p.partition.n_groups, 2u);
    EXPECT_EQ(p.group_names, (std::vector<std::string>{"y", "x"}));
}

TEST(PartitionFile, Errors) {
    auto g = parse_edge_list("a b\n", false);
    EXPECT_THROW(parse_partition("a 1\nb 1\nc 2\n", g), data_error);  // unknown node
    EXPECT_THROW(parse_partition("a 1\na 2\nb 1\n", g), data_error);  // listed twice
    EXPECT_THROW(parse_partition("a 1\n", g), data_error);            // missing node
    EXPECT_THROW(parse_partition("a 1 2\nb 1\n", g), parse_error);
}

TEST(PartitionFile, WriteReadRoundTrip) {
    auto g = parse_edge_list("a b\nb c\n", false);
    Partition p = Partition::compact(std::vector<std::uint32_t>{0, 1, 0});
    std::ostringstream out;
    write_partition(out, g, p);
    EXPECT_EQ(out.str(), "a 0\nb 1\nc 0\n");
    EXPECT_EQ(parse_partition(out.str(), g).partition, p);
}

TEST(Partition, CompactByFirstAppearance) {
    auto p = Partition::compact(std::vector<std::uint32_t>{7, 3, 7, 9});
    EXPECT_EQ(p.assignment, (std::vector<std::uint32_t>{0, 1, 0, 2}));
    EXPECT_EQ(p.n_groups, 3u);
    EXPECT_TRUE(p.valid());
    EXPECT_EQ(p.group_sizes(), (std::vector<std::size_t>{2, 1, 1}));
}
