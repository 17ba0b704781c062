#include "memepred/errors.hpp"
#include "memepred/features.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace memepred;

namespace {

Network parse_net(const std::string& text) {
    std::istringstream in(text);
    return load_network(in);
}

CommunityAssignment parse_ca(const std::string& text, const Network& net) {
    std::istringstream in(text);
    return load_assignments(in, net, 1);
}

EarlyWindow window_of(const Network& net, const std::vector<std::string>& users,
                      std::vector<std::int64_t> times = {}) {
    Meme m{"h", {}};
    for (std::size_t i = 0; i < users.size(); ++i) {
        m.events.push_back({times.empty() ? static_cast<std::int64_t>(i) : times[i], users[i], EventKind::plain, {}});
    }
    return early_window(m, users.size(), net);
}

EarlyWindow timed_window(std::vector<std::int64_t> times) {
    EarlyWindow w;
    w.n = times.size();
    w.timestamps = std::move(times);
    return w;
}

struct RandomCase {
    oracle::EdgeGraph graph;
    Network net;
    CommunityAssignment ca;
    EarlyWindow window;
};

// Random graph, random (possibly overlapping, partial) communities and a
// random window of n events with RT/mention interactions.
RandomCase random_case(std::mt19937_64& gen, int nodes, std::size_t n) {
    RandomCase rc;
    rc.graph = oracle::random_graph(nodes, 0.08, gen);
    rc.net = oracle::to_network(rc.graph);
    std::vector<std::vector<std::string>> raw(static_cast<std::size_t>(nodes));
    const int communities = 1 + static_cast<int>(gen() % 5);
    for (int v = 0; v < nodes; ++v) {
        const int k = static_cast<int>(gen() % 3);
        for (int j = 0; j < k; ++j) raw[v].push_back("c" + std::to_string(gen() % communities));
    }
    rc.ca = CommunityAssignment::from_memberships(static_cast<std::size_t>(nodes), raw, 1);
    Meme m{"h", {}};
    std::int64_t t = static_cast<std::int64_t>(gen() % 100000);
    for (std::size_t i = 0; i < n; ++i) {
        t += static_cast<std::int64_t>(gen() % 5000);
        const int user = static_cast<int>(gen() % nodes);
        AdoptionEvent ev{t, "v" + std::to_string(user), EventKind::plain, {}};
        const auto r = gen() % 4;
        if (r >= 2 && nodes > 1) {
            ev.kind = r == 2 ? EventKind::retweet : EventKind::mention;
            ev.target = "v" + std::to_string((user + 1 + static_cast<int>(gen() % (nodes - 1))) % nodes);
        }
        m.events.push_back(ev);
    }
    rc.window = early_window(m, n, rc.net);
    return rc;
}

} // namespace

TEST(BasicFeatures, StarCenterAdopter) {
    const auto net = parse_net("c l1\nc l2\nc l3\nc l4\n");
    const auto f = basic_features(window_of(net, {"c"}), net);
    EXPECT_EQ(f.adopters, 1u);
    EXPECT_EQ(f.surface1, 4u);
    EXPECT_EQ(f.surface2, 4u);
}

TEST(BasicFeatures, RepeatAuthorsCountOnce) {
    const auto net = parse_net("u1 u2\nu2 u3\n");
    EXPECT_EQ(basic_features(window_of(net, {"u1", "u1", "u2"}), net).adopters, 2u);
}

TEST(BasicFeatures, WholeGraphAdopted) {
    const auto net = parse_net("a b\nb c\n");
    const auto f = basic_features(window_of(net, {"a", "b", "c"}), net);
    EXPECT_EQ(f.surface1, 0u);
    EXPECT_EQ(f.surface2, 0u);
}

TEST(BasicFeatures, MatchSurfaceOracleAndAddingEdgesNeverShrinksF2) {
    std::mt19937_64 gen(21);
    for (int trial = 0; trial < 100; ++trial) {
        auto rc = random_case(gen, 30, 8);
        const auto f = basic_features(rc.window, rc.net);
        std::set<int> seeds;
        for (auto a : rc.window.adopters) seeds.insert(static_cast<int>(a));
        EXPECT_EQ(f.surface1, oracle::surface(rc.graph, seeds, 1).size());
        EXPECT_EQ(f.surface2, oracle::surface(rc.graph, seeds, 2).size());
        EXPECT_GE(f.surface2, f.surface1);

        auto denser = rc.graph;
        const int u = static_cast<int>(gen() % 30);
        const int v = (u + 1 + static_cast<int>(gen() % 29)) % 30;
        denser.edges.emplace_back(std::min(u, v), std::max(u, v));
        const auto net2 = oracle::to_network(denser);
        EXPECT_GE(basic_features(rc.window, net2).surface1, f.surface1);
    }
}

TEST(DistanceFeatures, PathSequence) {
    const auto net = parse_net("a b\nb c\n");
    const auto f = distance_features(window_of(net, {"a", "b", "c"}), net);
    EXPECT_DOUBLE_EQ(*f.mean_step, 1.0);
    EXPECT_DOUBLE_EQ(*f.cv_step, 0.0);
    EXPECT_EQ(f.diameter, 2u);
}

TEST(DistanceFeatures, RepeatedAuthor) {
    const auto net = parse_net("a b\n");
    const auto f = distance_features(window_of(net, {"a", "a", "a"}), net);
    EXPECT_DOUBLE_EQ(*f.mean_step, 0.0);
    EXPECT_EQ(f.diameter, 0u);
    EXPECT_FALSE(f.cv_step.has_value()); // zero mean
}

TEST(DistanceFeatures, UnreachablePolicies) {
    // a-b-c and d-e; largest finite adopter distance is 2 (a..c), so c* = 3.
    const auto net = parse_net("a b\nb c\nd e\n");
    const auto w = window_of(net, {"a", "c", "d", "e"});
    const auto constant = distance_features(w, net, {UnreachablePolicy::constant});
    EXPECT_DOUBLE_EQ(*constant.mean_step, (2.0 + 3.0 + 1.0) / 3.0);
    EXPECT_EQ(constant.diameter, 3u);

    const auto excluded = distance_features(w, net, {UnreachablePolicy::exclude});
    EXPECT_DOUBLE_EQ(*excluded.mean_step, 1.5);
    EXPECT_EQ(excluded.diameter, 2u);
}

TEST(DistanceFeatures, AllStepsUnreachableUnderExcludeIsMissing) {
    const auto net = parse_net("a b\nc d\n");
    const auto f = distance_features(window_of(net, {"a", "c"}), net, {UnreachablePolicy::exclude});
    EXPECT_FALSE(f.mean_step.has_value());
    EXPECT_FALSE(f.cv_step.has_value());
}

TEST(DistanceFeatures, CvUsesNMinusTwoDenominator) {
    // Steps 1, 2, 3 on a path: mean 2, sum of squares 2, n-2 = 2.
    const auto net = parse_net("a b\nb c\nc d\nd e\ne f\nf g\n");
    const auto f = distance_features(window_of(net, {"a", "b", "d", "g"}), net);
    EXPECT_DOUBLE_EQ(*f.mean_step, 2.0);
    EXPECT_DOUBLE_EQ(*f.cv_step, std::sqrt(2.0 / 2.0) / 2.0);
}

TEST(DistanceFeatures, MatchFloydWarshallOracle) {
    std::mt19937_64 gen(77);
    for (int trial = 0; trial < 200; ++trial) {
        const int nodes = 2 + static_cast<int>(gen() % 49);
        auto rc = random_case(gen, nodes, 10);
        const auto fw = oracle::floyd_warshall(rc.graph);
        const auto& w = rc.window;

        int max_finite = 0;
        bool unreachable = false;
        for (auto a : w.adopters)
            for (auto b : w.adopters) {
                if (fw[a][b] >= oracle::kInf) unreachable = true;
                else max_finite = std::max(max_finite, fw[a][b]);
            }
        const int cstar = max_finite + 1;
        double sum = 0.0;
        int count = 0;
        for (std::size_t i = 0; i + 1 < w.n; ++i) {
            const int d = fw[w.authors[i]][w.authors[i + 1]];
            sum += d >= oracle::kInf ? cstar : d;
            ++count;
        }
        const auto f = distance_features(w, rc.net);
        ASSERT_NEAR(*f.mean_step, sum / count, 1e-12) << "trial " << trial;
        ASSERT_EQ(f.diameter, static_cast<std::uint32_t>(unreachable ? cstar : max_finite)) << "trial " << trial;
        if (f.mean_step) EXPECT_GE(static_cast<double>(f.diameter), *f.mean_step);
    }
}

TEST(CommunityFeatures, SingleCommunity) {
    const auto net = parse_net("a b\nb c\n");
    const auto ca = parse_ca("a\tx\nb\tx\nc\tx\n", net);
    const auto f = community_features(window_of(net, {"a", "b", "c", "a"}), ca);
    EXPECT_EQ(f.infected, 1u);
    EXPECT_EQ(f.usage_entropy, 0.0);
    EXPECT_EQ(f.adopter_entropy, 0.0);
}

TEST(CommunityFeatures, EvenSplitIsLn2) {
    const auto net = parse_net("a b\nb c\nc d\n");
    const auto ca = parse_ca("a\tx\nb\tx\nc\ty\nd\ty\n", net);
    const auto f = community_features(window_of(net, {"a", "c", "b", "d"}), ca);
    EXPECT_EQ(f.infected, 2u);
    EXPECT_NEAR(f.usage_entropy, std::log(2.0), 1e-12);
    EXPECT_NEAR(f.adopter_entropy, std::log(2.0), 1e-12);
}

TEST(CommunityFeatures, InteractionFractions) {
    const auto net = parse_net("a b\nb c\nc d\n");
    const auto ca = parse_ca("a\tx\nb\tx\nc\tx\nd\tx\n", net);
    Meme m{"h",
           {{0, "a", EventKind::plain, {}},
            {1, "b", EventKind::retweet, "a"},
            {2, "c", EventKind::retweet, "b"},
            {3, "d", EventKind::retweet, "a"}}};
    const auto f = community_features(early_window(m, 4, net), ca);
    EXPECT_EQ(f.intra_rt_frac, 1.0);
    EXPECT_FALSE(f.intra_at_frac.has_value());
}

TEST(CommunityFeatures, OverlapSplitsWeight) {
    // b sits in x and y: tallies x = 1 + 1/2, y = 1/2 over tweets by a, b.
    const auto net = parse_net("a b\nb c\n");
    const auto ca = parse_ca("a\tx\nb\tx\nb\ty\nc\ty\n", net);
    const auto f = community_features(window_of(net, {"a", "b"}), ca);
    const double p = 0.75;
    EXPECT_EQ(f.infected, 2u);
    EXPECT_NEAR(f.usage_entropy, -(p * std::log(p) + (1 - p) * std::log(1 - p)), 1e-12);
}

TEST(CommunityFeatures, UnassignedUsersLeftOutOfEntropy) {
    const auto net = parse_net("a b\nb c\n");
    const auto ca = parse_ca("a\tx\nb\ty\n", net);
    const auto f = community_features(window_of(net, {"a", "b", "c", "c"}), ca);
    EXPECT_NEAR(f.usage_entropy, std::log(2.0), 1e-12);
}

TEST(CommunityFeatures, EntropyBoundsOnRandomWindows) {
    std::mt19937_64 gen(1234);
    for (int trial = 0; trial < 1000; ++trial) {
        auto rc = random_case(gen, 40, 25);
        const auto f = community_features(rc.window, rc.ca);
        const double bound = f.infected >= 1 ? std::log(static_cast<double>(f.infected)) : 0.0;
        ASSERT_GE(f.usage_entropy, 0.0);
        ASSERT_GE(f.adopter_entropy, 0.0);
        ASSERT_LE(f.usage_entropy, bound + 1e-12);
        ASSERT_LE(f.adopter_entropy, bound + 1e-12);
        if (f.intra_rt_frac) {
            ASSERT_GE(*f.intra_rt_frac, 0.0);
            ASSERT_LE(*f.intra_rt_frac, 1.0);
        }
    }
}

TEST(GrowthFeatures, EvenSpacing) {
    const auto f = growth_features(timed_window({0, 10, 20, 30}));
    EXPECT_DOUBLE_EQ(*f.mean_step_time, 10.0);
    EXPECT_DOUBLE_EQ(*f.cv_step_time, 0.0);
}

TEST(GrowthFeatures, SimultaneousTweets) {
    const auto f = growth_features(timed_window({0, 0, 0}));
    EXPECT_DOUBLE_EQ(*f.mean_step_time, 0.0);
    EXPECT_FALSE(f.cv_step_time.has_value());
}

TEST(GrowthFeatures, MeanTimesNMinusOneIsExactSpan) {
    std::mt19937_64 gen(55);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + gen() % 99;
        std::vector<std::int64_t> times(n);
        std::int64_t t = static_cast<std::int64_t>(gen() % 2000000000);
        for (auto& x : times) {
            x = t;
            t += static_cast<std::int64_t>(gen() % 100000);
        }
        const auto f = growth_features(timed_window(times));
        ASSERT_EQ(std::llround(*f.mean_step_time * static_cast<double>(n - 1)), times.back() - times.front());
        ASSERT_GE(*f.mean_step_time, 0.0);
    }
}

TEST(ExtractAll, ComposesSubOperationsAndIsDeterministic) {
    std::mt19937_64 gen(8);
    for (int trial = 0; trial < 50; ++trial) {
        auto rc = random_case(gen, 40, 25);
        const auto fv = extract_all(rc.window, rc.net, rc.ca);
        EXPECT_EQ(fv.basic.adopters, basic_features(rc.window, rc.net).adopters);
        EXPECT_EQ(fv.distance.diameter, distance_features(rc.window, rc.net).diameter);
        EXPECT_EQ(fv.community.usage_entropy, community_features(rc.window, rc.ca).usage_entropy);
        EXPECT_EQ(fv.growth.cv_step_time, growth_features(rc.window).cv_step_time);
        EXPECT_EQ(fv, extract_all(rc.window, rc.net, rc.ca));

        const auto a = fv.to_array();
        EXPECT_GE(a[0], 1.0);
        EXPECT_GE(a[2], a[1]);
    }
}

TEST(ExtractAll, MissingBecomesNan) {
    FeatureVector fv;
    const auto a = fv.to_array();
    EXPECT_TRUE(std::isnan(a[3]));
    EXPECT_TRUE(std::isnan(a[9]));
    EXPECT_TRUE(std::isnan(a[12]));
    EXPECT_FALSE(std::isnan(a[5]));
}

TEST(ExtractBatch, ParallelMatchesSerial) {
    std::mt19937_64 gen(13);
    auto base = random_case(gen, 120, 25);
    std::vector<EarlyWindow> windows;
    for (int i = 0; i < 200; ++i) {
        Meme m{"m" + std::to_string(i), {}};
        for (int j = 0; j < 25; ++j) {
            m.events.push_back({j * 7, "v" + std::to_string(gen() % 120), EventKind::plain, {}});
        }
        windows.push_back(early_window(m, 25, base.net));
    }
    const auto a = extract_batch(windows, base.net, base.ca);
    const auto b = extract_batch_serial(windows, base.net, base.ca);
    EXPECT_EQ(a, b);
}
