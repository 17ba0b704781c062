#include "memepred/errors.hpp"
#include "memepred/graph.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <sstream>

using namespace memepred;

namespace {

Network parse(const std::string& text) {
    std::istringstream in(text);
    return load_network(in);
}

Network star() { return parse("c l1\nc l2\nc l3\nc l4\n"); }

std::vector<NodeId> ids(const Network& net, std::initializer_list<const char*> labels) {
    std::vector<NodeId> out;
    for (auto l : labels) out.push_back(net.id_of(l));
    return out;
}

} // namespace

TEST(LoadNetwork, DeduplicatesReciprocalPairs) {
    const auto net = parse("a b\nb a\nb c\n");
    EXPECT_EQ(net.node_count(), 3u);
    EXPECT_EQ(net.edge_count(), 2u);
    EXPECT_EQ(net.label(0), "a");
    EXPECT_EQ(net.label(2), "c");
    EXPECT_TRUE(net.has_edge(net.id_of("a"), net.id_of("b")));
    EXPECT_TRUE(net.has_edge(net.id_of("b"), net.id_of("a")));
}

TEST(LoadNetwork, EmptyStream) {
    const auto net = parse("");
    EXPECT_EQ(net.node_count(), 0u);
    EXPECT_EQ(net.edge_count(), 0u);
}

TEST(LoadNetwork, CommentsAndBlankLinesSkipped) {
    const auto net = parse("# header\n\na b\n# trailing\n");
    EXPECT_EQ(net.node_count(), 2u);
}

TEST(LoadNetwork, SelfLoopRejectedWithLine) {
    try {
        parse("a a\n");
        FAIL() << "self-loop accepted";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 1u);
    }
}

TEST(LoadNetwork, MalformedLineReportsLine) {
    try {
        parse("a b\nb c d\n");
        FAIL() << "three tokens accepted";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    EXPECT_THROW(parse("a\n"), ParseError);
}

TEST(LoadNetwork, EdgeListRoundTrip) {
    const auto net = parse("x y\ny z\nz x\nw x\n");
    std::ostringstream out;
    write_edge_list(net, out);
    const auto again = parse(out.str());
    ASSERT_EQ(again.node_count(), net.node_count());
    ASSERT_EQ(again.edge_count(), net.edge_count());
    for (NodeId u = 0; u < net.node_count(); ++u) {
        for (NodeId v : net.neighbors(u)) {
            EXPECT_TRUE(again.has_edge(again.id_of(net.label(u)), again.id_of(net.label(v))));
        }
    }
}

TEST(Network, AdjacencyIsSymmetricAndSorted) {
    std::mt19937_64 gen(7);
    const auto g = oracle::random_graph(40, 0.2, gen);
    const auto net = oracle::to_network(g);
    for (NodeId u = 0; u < net.node_count(); ++u) {
        auto nb = net.neighbors(u);
        EXPECT_TRUE(std::is_sorted(nb.begin(), nb.end()));
        EXPECT_TRUE(std::adjacent_find(nb.begin(), nb.end()) == nb.end());
        for (NodeId v : nb) {
            EXPECT_NE(u, v);
            EXPECT_TRUE(net.has_edge(v, u));
        }
    }
}

TEST(Network, BuilderRejectsSelfLoop) {
    Network::Builder b;
    const auto a = b.intern("a");
    EXPECT_THROW(b.add_edge(a, a), DomainError);
}

TEST(ShortestPath, PathGraph) {
    const auto net = parse("a b\nb c\n");
    const auto [a, b, c] = std::tuple{net.id_of("a"), net.id_of("b"), net.id_of("c")};
    EXPECT_EQ(shortest_path_length(net, a, c), Distance::hops(2));
    EXPECT_EQ(shortest_path_length(net, a, a), Distance::hops(0));
    EXPECT_EQ(shortest_path_length(net, b, c).value(), 1u);
}

TEST(ShortestPath, AcrossComponentsUnreachable) {
    const auto net = parse("a b\nc d\n");
    const auto d = shortest_path_length(net, net.id_of("a"), net.id_of("d"));
    EXPECT_FALSE(d.reachable());
    EXPECT_EQ(d, Distance::unreachable());
    EXPECT_THROW(d.value(), DomainError);
}

TEST(ShortestPath, InvalidIdThrows) {
    const auto net = parse("a b\n");
    EXPECT_THROW(shortest_path_length(net, 0, 7), DomainError);
}

TEST(ShortestPath, MatchesFloydWarshallOnRandomGraphs) {
    std::mt19937_64 gen(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + static_cast<int>(gen() % 49);
        const double p = 0.02 + 0.2 * static_cast<double>(gen() % 100) / 100.0;
        const auto g = oracle::random_graph(n, p, gen);
        const auto net = oracle::to_network(g);
        const auto fw = oracle::floyd_warshall(g);
        for (int u = 0; u < n; ++u) {
            for (int v = 0; v < n; ++v) {
                const auto d = shortest_path_length(net, static_cast<NodeId>(u), static_cast<NodeId>(v));
                if (fw[u][v] >= oracle::kInf) {
                    ASSERT_FALSE(d.reachable()) << "trial " << trial;
                } else {
                    ASSERT_EQ(d, Distance::hops(static_cast<std::uint32_t>(fw[u][v]))) << "trial " << trial;
                }
            }
        }
    }
}

TEST(Surface, StarExamples) {
    const auto net = star();
    const auto center = ids(net, {"c"});
    EXPECT_EQ(surface(net, center, 1), ids(net, {"l1", "l2", "l3", "l4"}));
    const auto leaf = ids(net, {"l1"});
    EXPECT_EQ(surface(net, leaf, 1), ids(net, {"c"}));
    EXPECT_EQ(surface_size(net, leaf, 2), 4u);
    auto expected = ids(net, {"c", "l2", "l3", "l4"});
    std::sort(expected.begin(), expected.end());
    EXPECT_EQ(surface(net, leaf, 2), expected);
}

TEST(Surface, AllNodesHaveEmptySurface) {
    const auto net = star();
    std::vector<NodeId> all(net.node_count());
    std::iota(all.begin(), all.end(), NodeId{0});
    EXPECT_TRUE(surface(net, all, 1).empty());
}

TEST(Surface, RejectsBadOrderAndIds) {
    const auto net = star();
    const std::vector<NodeId> seeds{0};
    EXPECT_THROW(surface(net, seeds, 0), DomainError);
    const std::vector<NodeId> bad{99};
    EXPECT_THROW(surface(net, bad, 1), DomainError);
}

TEST(Surface, MatchesSetExpansionAndIsMonotone) {
    std::mt19937_64 gen(99);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(gen() % 50);
        const auto g = oracle::random_graph(n, 0.08, gen);
        const auto net = oracle::to_network(g);
        std::set<int> seeds;
        const int k_seeds = 1 + static_cast<int>(gen() % std::min(n, 6));
        while (static_cast<int>(seeds.size()) < k_seeds) seeds.insert(static_cast<int>(gen() % n));
        const std::vector<NodeId> seed_ids(seeds.begin(), seeds.end());

        std::vector<NodeId> previous;
        for (int k = 1; k <= 4; ++k) {
            const auto got = surface(net, seed_ids, k);
            const auto want = oracle::surface(g, seeds, k);
            ASSERT_EQ(got, std::vector<NodeId>(want.begin(), want.end())) << "trial " << trial << " k " << k;
            ASSERT_TRUE(std::includes(got.begin(), got.end(), previous.begin(), previous.end()));
            previous = got;
        }

        // surface(U,1) plus U equals U plus its neighbors.
        std::set<NodeId> closed(seed_ids.begin(), seed_ids.end());
        for (NodeId s : seed_ids) closed.insert(net.neighbors(s).begin(), net.neighbors(s).end());
        auto s1 = surface(net, seed_ids, 1);
        std::set<NodeId> got(s1.begin(), s1.end());
        got.insert(seed_ids.begin(), seed_ids.end());
        EXPECT_EQ(got, closed);
    }
}

TEST(PageRank, TwoNodes) {
    const auto pr = pagerank(parse("a b\n"));
    EXPECT_NEAR(pr[0], 0.5, 1e-12);
    EXPECT_NEAR(pr[1], 0.5, 1e-12);
}

TEST(PageRank, PathMatchesDenseOracle) {
    oracle::EdgeGraph g{3, {{0, 1}, {1, 2}}};
    const auto want = oracle::pagerank(g, 0.85, 500);
    const auto got = pagerank(oracle::to_network(g));
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(got[i], want[i], 1e-8);
}

TEST(PageRank, RandomGraphsMatchDenseOracle) {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 1 + static_cast<int>(gen() % 50);
        const auto g = oracle::random_graph(n, 0.1, gen);
        const auto want = oracle::pagerank(g, 0.85, 1000);
        const auto got = pagerank(oracle::to_network(g));
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            ASSERT_NEAR(got[i], want[i], 1e-8) << "trial " << trial;
            ASSERT_GE(got[i], 0.0);
            sum += got[i];
        }
        EXPECT_NEAR(sum, 1.0, 1e-10);
    }
}

TEST(PageRank, VertexTransitiveGraphsAreUniform) {
    oracle::EdgeGraph cycle{12, {}};
    for (int i = 0; i < 12; ++i) cycle.edges.emplace_back(i, (i + 1) % 12);
    oracle::EdgeGraph complete{7, {}};
    for (int i = 0; i < 7; ++i)
        for (int j = i + 1; j < 7; ++j) complete.edges.emplace_back(i, j);
    for (const auto& g : {cycle, complete}) {
        const auto pr = pagerank(oracle::to_network(g));
        for (double s : pr) EXPECT_NEAR(s, 1.0 / g.n, 1e-10);
    }
}

TEST(PageRank, ParallelMatchesSerial) {
    std::mt19937_64 gen(11);
    const auto net = oracle::to_network(oracle::random_graph(300, 0.03, gen));
    const auto a = pagerank(net);
    const auto b = pagerank_serial(net);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-14);
}

TEST(PageRank, NonConvergenceCarriesResidual) {
    std::mt19937_64 gen(3);
    const auto net = oracle::to_network(oracle::random_graph(30, 0.2, gen));
    PageRankOptions opts;
    opts.max_iter = 1;
    opts.tol = 1e-15;
    try {
        pagerank(net, opts);
        FAIL() << "expected non-convergence";
    } catch (const ConvergenceError& e) {
        EXPECT_GT(e.residual(), 0.0);
    }
}

TEST(PageRank, RejectsBadOptions) {
    const auto net = parse("a b\n");
    EXPECT_THROW(pagerank(net, {1.0, 1e-10, 200}), DomainError);
    EXPECT_THROW(pagerank(net, {0.85, 0.0, 200}), DomainError);
}
