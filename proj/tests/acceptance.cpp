// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "memepred/errors.hpp"
#include "memepred/pipeline.hpp"
#include "memepred/rng.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

using namespace memepred;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) detail = what;
        pass = pass && ok;
    }
};

int failures = 0;

void report(int id, const Outcome& o, const std::string& summary) {
    std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << "  " << summary;
    if (!o.pass) std::cout << "  [" << o.detail << "]";
    std::cout << std::endl;
    failures += !o.pass;
}

// 1. Graph kernels against brute-force oracles.
void graph_oracles() {
    const auto t0 = Clock::now();
    Outcome o;
    std::mt19937_64 gen(101);
    double worst_pr = 0.0;
    for (int trial = 0; trial < 100 && o.pass; ++trial) {
        const int n = 2 + static_cast<int>(gen() % 49);
        const double p = 0.02 + 0.2 * static_cast<double>(gen() % 100) / 100.0;
        const auto g = oracle::random_graph(n, p, gen);
        const auto net = oracle::to_network(g);
        const auto fw = oracle::floyd_warshall(g);

        // Diameter over all pairs, unreachable pairs skipped.
        int fw_diameter = 0, diameter = 0;
        for (int u = 0; u < n; ++u) {
            for (int v = 0; v < n; ++v) {
                const auto d = shortest_path_length(net, static_cast<NodeId>(u), static_cast<NodeId>(v));
                if (fw[u][v] >= oracle::kInf) {
                    o.require(!d.reachable(), "reachability mismatch");
                } else {
                    o.require(d.reachable() && d.value() == static_cast<std::uint32_t>(fw[u][v]), "hop mismatch");
                    fw_diameter = std::max(fw_diameter, fw[u][v]);
                    if (d.reachable()) diameter = std::max(diameter, static_cast<int>(d.value()));
                }
            }
        }
        o.require(diameter == fw_diameter, "diameter mismatch");

        std::set<int> seeds;
        std::vector<NodeId> seed_ids;
        const int k_seeds = 1 + static_cast<int>(gen() % 3);
        for (int i = 0; i < k_seeds; ++i) {
            const int s = static_cast<int>(gen() % n);
            if (seeds.insert(s).second) seed_ids.push_back(static_cast<NodeId>(s));
        }
        for (int k = 1; k <= 2; ++k) {
            const auto expect = oracle::surface(g, seeds, k);
            const auto got = surface(net, seed_ids, k);
            o.require(std::vector<int>(expect.begin(), expect.end()) == std::vector<int>(got.begin(), got.end()),
                      "surface mismatch");
        }

        const auto pr_oracle = oracle::pagerank(g, 0.85, 2000);
        const auto pr = pagerank(net, PageRankOptions{0.85, 1e-13, 1000});
        for (int v = 0; v < n; ++v) worst_pr = std::max(worst_pr, std::abs(pr[v] - pr_oracle[v]));
    }
    o.require(worst_pr <= 1e-8, "pagerank deviation " + std::to_string(worst_pr));
    const double elapsed = seconds_since(t0);
    o.require(elapsed < 10.0, "took " + std::to_string(elapsed) + " s");
    std::ostringstream s;
    s << "100 graphs, max PageRank deviation " << worst_pr << ", " << elapsed << " s";
    report(1, o, s.str());
}

// 2. Feature formulas on random windows.
void feature_formulas() {
    Outcome o;
    std::mt19937_64 gen(202);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + gen() % 99;
        EarlyWindow w;
        w.n = n;
        std::int64_t t = static_cast<std::int64_t>(gen() % 2000000000);
        for (std::size_t i = 0; i < n; ++i) {
            w.timestamps.push_back(t);
            t += static_cast<std::int64_t>(gen() % 100000);
        }
        const auto g = growth_features(w);
        o.require(g.mean_step_time &&
                      std::llround(*g.mean_step_time * static_cast<double>(n - 1)) ==
                          w.timestamps.back() - w.timestamps.front(),
                  "f12 span mismatch");
    }

    for (int trial = 0; trial < 1000; ++trial) {
        const int nodes = 40;
        const auto graph = oracle::random_graph(nodes, 0.08, gen);
        const auto net = oracle::to_network(graph);
        std::vector<std::vector<std::string>> raw(nodes);
        const int communities = 1 + static_cast<int>(gen() % 5);
        for (int v = 0; v < nodes; ++v) {
            const int k = static_cast<int>(gen() % 3);
            for (int j = 0; j < k; ++j) raw[v].push_back("c" + std::to_string(gen() % communities));
        }
        const auto ca = CommunityAssignment::from_memberships(nodes, raw, 1);
        Meme m{"h", {}};
        for (int i = 0; i < 25; ++i) m.events.push_back({i, "v" + std::to_string(gen() % nodes), EventKind::plain, {}});
        const auto f = community_features(early_window(m, 25, net), ca);
        const double bound = f.infected >= 1 ? std::log(static_cast<double>(f.infected)) : 0.0;
        o.require(f.usage_entropy >= 0.0 && f.adopter_entropy >= 0.0, "negative entropy");
        o.require(f.usage_entropy <= bound + 1e-12 && f.adopter_entropy <= bound + 1e-12, "entropy above ln(f7)");
    }

    std::istringstream edges("a b\nc d\n");
    const auto net = load_network(edges);
    std::istringstream comm("a\tx\nb\tx\nc\ty\nd\ty\n");
    const auto ca = load_assignments(comm, net, 1);
    Meme m{"h", {{0, "a", EventKind::plain, {}}, {1, "c", EventKind::plain, {}},
                 {2, "b", EventKind::plain, {}}, {3, "d", EventKind::plain, {}}}};
    const double f8 = community_features(early_window(m, 4, net), ca).usage_entropy;
    o.require(std::abs(f8 - std::log(2.0)) <= 1e-12, "even split gave " + std::to_string(f8));
    report(2, o, "f12 span exact on 1000 windows, entropy within [0, ln f7] on 1000 windows, ln 2 split");
}

// 3. Popularity classes.
void binning() {
    Outcome o;
    o.require(bin(1) == 1, "bin(1)");
    o.require(bin(31) == 2, "bin(31)");
    o.require(bin(32) == 3, "bin(32)");
    std::uint64_t p = 1;
    for (int k = 0; k <= 5; ++k, p *= 10) o.require(bin(p, 100) == k + 1, "bin(10^" + std::to_string(k) + ")");
    report(3, o, "bin(1)=1, bin(31)=2, bin(32)=3, bin(10^k)=k+1 for k=0..5");
}

// 4. Baseline sanity.
void baselines() {
    Outcome o;
    std::mt19937_64 gen(404);

    // B2: skewed labels, cross-validated majority guess.
    std::vector<int> labels;
    for (int i = 0; i < 500; ++i) {
        const auto r = gen() % 10;
        labels.push_back(r < 5 ? 2 : r < 8 ? 1 : r < 9 ? 3 : 4);
    }
    const FoldClassifier majority = [&](std::span<const std::size_t> train, std::span<const std::size_t> test,
                                        std::uint64_t) {
        std::vector<int> y;
        for (auto r : train) y.push_back(labels[r]);
        return std::vector<int>(test.size(), MajorityGuess(y).predict());
    };
    const auto cv = cross_validate(labels, majority, 10, 4);
    int nonzero = 0;
    for (const auto& m : cv.report.metrics) nonzero += m.f1 > 0.0;
    o.require(nonzero == 1, "B2 nonzero F1 on " + std::to_string(nonzero) + " classes");

    // B4: final popularity is exactly 100 times the popularity at tau.
    const std::int64_t tau = 7 * 86400;
    std::vector<std::size_t> early, final_pop;
    for (int i = 0; i < 60; ++i) {
        const std::size_t k = 1 + gen() % 40;
        Meme m{"m" + std::to_string(i), {}};
        for (std::size_t j = 0; j < k; ++j) m.events.push_back({static_cast<std::int64_t>(j * 60), "u", EventKind::plain, {}});
        for (std::size_t j = 0; j < 99 * k; ++j) {
            m.events.push_back({tau + 3600 + static_cast<std::int64_t>(j), "u", EventKind::plain, {}});
        }
        early.push_back(early_popularity(m, tau));
        final_pop.push_back(m.tweet_count());
    }
    ClassBinning wide;
    wide.cap = 10;
    const auto ln = LogPopularityRegressor::fit(ln_design(early), final_pop, wide);
    const double alpha = ln.model().coefficients(0), beta = ln.model().intercept;
    o.require(std::abs(alpha - 1.0) <= 1e-6 && std::abs(beta - 2.0) <= 1e-6,
              "B4 alpha " + std::to_string(alpha) + " beta " + std::to_string(beta));

    // B3: log10 popularity is an affine function of mean adopter PageRank.
    const auto g = oracle::random_graph(400, 0.02, gen);
    const auto net = oracle::to_network(g);
    const auto pr = pagerank(net);
    const auto followers = degree_follower_counts(net);
    std::vector<InfluenceFeatures> rows;
    std::vector<double> means;
    for (int i = 0; i < 600; ++i) {
        std::vector<NodeId> adopters;
        const auto size = 3 + gen() % 20;
        for (std::size_t j = 0; j < size; ++j) adopters.push_back(static_cast<NodeId>(gen() % 400));
        rows.push_back(influence_features(adopters, pr, followers));
        means.push_back(rows.back().pagerank.mean);
    }
    const auto [lo, hi] = std::minmax_element(means.begin(), means.end());
    std::vector<std::size_t> popularity;
    std::vector<int> classes;
    for (double m : means) {
        const double log_pop = 0.1 + 3.4 * (m - *lo) / (*hi - *lo);
        popularity.push_back(static_cast<std::size_t>(std::llround(std::pow(10.0, log_pop))));
        classes.push_back(bin(popularity.back()));
    }
    const auto X = influence_design(rows);
    const FoldClassifier b3 = [&](std::span<const std::size_t> train, std::span<const std::size_t> test,
                                  std::uint64_t) {
        Eigen::MatrixXd Xt(train.size(), X.cols());
        std::vector<std::size_t> yt;
        for (std::size_t i = 0; i < train.size(); ++i) {
            Xt.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(train[i]));
            yt.push_back(popularity[train[i]]);
        }
        const auto model = LogPopularityRegressor::fit(Xt, yt, ClassBinning{});
        std::vector<int> out;
        for (auto r : test) {
            const Eigen::VectorXd x = X.row(static_cast<Eigen::Index>(r)).transpose();
            out.push_back(model.predict_class(std::span<const double>(x.data(), static_cast<std::size_t>(x.size()))));
        }
        return out;
    };
    const double accuracy = cross_validate(classes, b3, 10, 4).report.accuracy();
    o.require(accuracy >= 0.95, "B3 accuracy " + std::to_string(accuracy));

    std::ostringstream s;
    s << "B2 nonzero classes " << nonzero << ", B4 alpha " << alpha << " beta " << beta << ", B3 accuracy "
      << accuracy;
    report(4, o, s.str());
}

// 5. Forest sanity.
void forest() {
    Outcome o;
    std::mt19937_64 gen(505);
    std::uniform_real_distribution<double> u(1.0, 2.0);
    std::normal_distribution<double> nd;

    FeatureMatrix X(400, 5);
    std::vector<int> y;
    for (std::size_t r = 0; r < 400; ++r) {
        const int c = r % 2 ? 2 : 1;
        y.push_back(c);
        X.at(r, 0) = c == 2 ? u(gen) : -u(gen);
        for (std::size_t k = 1; k < 5; ++k) X.at(r, k) = nd(gen);
    }
    ForestConfig cfg;
    cfg.n_trees = 100;
    cfg.features_per_tree = 5;
    const FoldClassifier rf = [&](std::span<const std::size_t> train, std::span<const std::size_t> test,
                                  std::uint64_t seed) {
        const auto Xt = X.subset_rows(train);
        std::vector<int> yt;
        for (auto r : train) yt.push_back(y[r]);
        return RandomForest::train(Xt, yt, cfg, seed).predict(X.subset_rows(test));
    };
    const auto cv = cross_validate(y, rf, 10, 5);
    o.require(cv.report.f1_of(1) == 1.0 && cv.report.f1_of(2) == 1.0, "separable data not perfectly classified");

    FeatureMatrix N(500, 6);
    std::vector<int> yn;
    for (std::size_t r = 0; r < 500; ++r) {
        for (std::size_t c = 0; c < 6; ++c) N.at(r, c) = nd(gen);
        const double s = N.at(r, 0) + 0.5 * N.at(r, 1) + 0.5 * nd(gen);
        yn.push_back(s < -0.5 ? 1 : s < 0.5 ? 2 : 3);
    }
    ForestConfig ncfg;
    ncfg.n_trees = 100;
    const auto a = RandomForest::train(N, yn, ncfg, 77);
    o.require(a.to_json() == RandomForest::train(N, yn, ncfg, 77).to_json(), "same seed, different model bytes");

    const auto before = a.predict(N);
    FeatureMatrix M = N;
    for (std::size_t r = 0; r < 500; ++r) {
        M.at(r, 0) = std::exp(N.at(r, 0)) * 3.0 + 1.0;
        M.at(r, 3) = std::pow(N.at(r, 3), 3.0) - 7.0;
    }
    o.require(RandomForest::train(M, yn, ncfg, 77).predict(M) == before, "monotone rescaling changed predictions");
    report(5, o, "10-fold pooled F1 1.0 on separable data, byte-identical retrain, rescaling invariant on 500 rows");
}

struct SeedResult {
    int top_class = 0;
    double pn = 0.0, basic = 0.0, community = 0.0, best_baseline = 0.0;
    std::string best_baseline_name;
    bool holds = false;
};

SeedResult run_seed(std::uint64_t seed, bool detected) {
    PlantedPartitionSpec net_spec;
    net_spec.seed = derive_seed(seed, "network");
    const auto synthetic = generate_network(net_spec);
    CascadeSpec cascade_spec;
    cascade_spec.seed = derive_seed(seed, "cascades");
    const auto memes = generate_cascades(synthetic.network, synthetic.truth, cascade_spec);

    RunConfig cfg;
    cfg.seed = seed;
    const auto ca = detected ? detect_label_propagation(synthetic.network, derive_seed(seed, "communities"),
                                                        cfg.lp_max_sweeps, cfg.min_community_size, cfg.lp_tie_break)
                             : synthetic.truth;
    const auto corpus = build_corpus(synthetic.network, ca, memes, cfg);
    const auto results =
        evaluate_models(corpus, cfg, {"Pn", "Pn-basic", "Pn-community", "B1", "B2", "B3", "B4", "B5"});

    const auto& labels = corpus.labels(cfg.basis);
    SeedResult r;
    r.top_class = *std::max_element(labels.begin(), labels.end());
    r.best_baseline = -1.0;
    for (const auto& m : results) {
        const double f1 = m.cv.report.f1_of(r.top_class);
        if (m.name == "Pn") r.pn = f1;
        else if (m.name == "Pn-basic") r.basic = f1;
        else if (m.name == "Pn-community") r.community = f1;
        else if (f1 > r.best_baseline) {
            r.best_baseline = f1;
            r.best_baseline_name = m.name;
        }
    }
    r.holds = r.pn > r.best_baseline && r.community > r.basic;
    return r;
}

void comparative(int id, bool detected) {
    const auto t0 = Clock::now();
    Outcome o;
    int holds = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto r = run_seed(seed, detected);
        holds += r.holds;
        std::fprintf(stderr, "  seed %2llu class %d  Pn %.3f  best baseline %s %.3f  community %.3f  basic %.3f  %s\n",
                     static_cast<unsigned long long>(seed), r.top_class, r.pn, r.best_baseline_name.c_str(),
                     r.best_baseline, r.community, r.basic, r.holds ? "holds" : "fails");
    }
    const double elapsed = seconds_since(t0);
    o.require(holds >= 8, "ordering held in " + std::to_string(holds) + "/10 seeds");
    o.require(elapsed < 300.0, "took " + std::to_string(elapsed) + " s");
    std::ostringstream s;
    s << (detected ? "label-propagation" : "ground-truth") << " communities: ordering held in " << holds
      << "/10 seeds, " << static_cast<int>(elapsed) << " s";
    report(id, o, s.str());
}

} // namespace

int main() {
    set_warnings_enabled(false);
    graph_oracles();
    feature_formulas();
    binning();
    baselines();
    forest();
    comparative(6, false);
    comparative(7, true);
    return failures == 0 ? 0 : 1;
}
