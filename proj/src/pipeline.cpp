#include "memepred/pipeline.hpp"
#include "memepred/errors.hpp"
#include "memepred/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace memepred {

void RunConfig::validate() const {
    if (n < 2) throw DomainError("window size n must be >= 2");
    if (tau_days < 1) throw DomainError("tau_days must be >= 1");
    if (class_cap < 1) throw DomainError("class cap must be >= 1");
    if (folds < 2) throw DomainError("folds must be >= 2");
    if (min_community_size < 1) throw DomainError("min community size must be >= 1");
    if (!std::is_sorted(bin_edges.begin(), bin_edges.end())) throw DomainError("bin edges must be ascending");
    if (history_begin && history_end && *history_begin >= *history_end) throw DomainError("empty history range");
}

ClassBinning RunConfig::binning() const {
    ClassBinning b;
    b.cap = class_cap;
    b.upper_edges = bin_edges;
    b.first_class = bin_first_class;
    return b;
}

FeatureSubset full_features() { return {"full", {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12}}; }
FeatureSubset basic_subset() { return {"basic", {0, 1, 2}}; }
FeatureSubset distance_subset() { return {"distance", {3, 4, 5}}; }
FeatureSubset community_subset() { return {"community", {6, 7, 8, 9, 10}}; }
FeatureSubset timing_subset() { return {"timing", {11, 12}}; }

FeatureSubset subset_by_name(const std::string& name) {
    for (auto s : {full_features(), basic_subset(), distance_subset(), community_subset(), timing_subset()}) {
        if (s.name == name) return s;
    }
    throw DomainError("unknown feature subset '" + name + "'");
}

FeatureMatrix Corpus::matrix(const FeatureSubset& subset) const {
    FeatureMatrix X(features.size(), subset.columns.size());
    for (std::size_t r = 0; r < features.size(); ++r) {
        const auto row = features[r].to_array();
        for (std::size_t j = 0; j < subset.columns.size(); ++j) X.at(r, j) = row.at(subset.columns[j]);
    }
    return X;
}

Corpus build_corpus(const Network& net, const CommunityAssignment& ca, const std::vector<Meme>& memes,
                    const RunConfig& cfg) {
    cfg.validate();
    Corpus corpus;
    corpus.net = with_event_users(net, memes);
    if (ca.node_count() > corpus.net.node_count()) throw DomainError("community assignment has more nodes than network");
    corpus.ca = ca.node_count() == corpus.net.node_count() ? ca : ca.padded(corpus.net.node_count());

    std::unordered_map<std::string, std::size_t> history;
    std::vector<Meme> observed;
    if (cfg.history_begin || cfg.history_end) {
        const TimeRange range{cfg.history_begin.value_or(INT64_MIN), cfg.history_end.value_or(INT64_MAX)};
        history = count_events_in(memes, range);
        observed = drop_events_before(memes, range.end);
    } else {
        observed = memes;
    }
    const TimeRange inclusion{cfg.inclusion_begin.value_or(INT64_MIN), cfg.inclusion_end.value_or(INT64_MAX)};
    auto fresh = filter_new_memes(observed, history, cfg.x_max, inclusion);
    corpus.filtered_out = observed.size() - fresh.size();

    const auto binning = cfg.binning();
    for (auto& m : fresh) {
        if (m.tweet_count() < cfg.n) {
            ++corpus.too_short;
            continue;
        }
        corpus.windows.push_back(early_window(m, cfg.n, corpus.net));
        corpus.label_tweets.push_back(binning.bin(m.tweet_count()));
        corpus.label_adopters.push_back(binning.bin(m.adopter_count()));
        corpus.memes.push_back(std::move(m));
    }
    corpus.features = extract_batch(corpus.windows, corpus.net, corpus.ca, FeatureConfig{cfg.unreachable});
    return corpus;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw std::runtime_error("number formatting failed");
    return std::string(buf, ptr);
}

void write_feature_csv(const Corpus& corpus, std::ostream& out) {
    out << "meme_id,n";
    for (auto name : kFeatureNames) out << ',' << name;
    out << ",label_T,label_A\n";
    for (std::size_t i = 0; i < corpus.features.size(); ++i) {
        out << corpus.memes[i].id << ',' << corpus.windows[i].n;
        for (double v : corpus.features[i].to_array()) {
            out << ',';
            if (!is_missing(v)) out << format_double(v);
        }
        out << ',' << corpus.label_tweets[i] << ',' << corpus.label_adopters[i] << '\n';
    }
}

std::vector<std::string> all_model_names() {
    return {"Pn", "Pn-basic", "Pn-distance", "Pn-community", "Pn-timing", "B1", "B2", "B3", "B4", "B5"};
}

std::vector<int> corpus_folds(const Corpus& corpus, const RunConfig& cfg) {
    return stratified_folds(corpus.labels(cfg.basis), cfg.folds, derive_seed(cfg.seed, "folds"));
}

namespace {

std::vector<int> pick(std::span<const int> labels, std::span<const std::size_t> rows) {
    std::vector<int> out;
    out.reserve(rows.size());
    for (auto r : rows) out.push_back(labels[r]);
    return out;
}

Eigen::MatrixXd pick_rows(const Eigen::MatrixXd& X, std::span<const std::size_t> rows) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), X.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(rows[i]));
    return out;
}

FoldClassifier forest_classifier(const FeatureMatrix& X, std::span<const int> labels, const ForestConfig& forest,
                                 const std::string& name) {
    return [&X, labels, forest, name](std::span<const std::size_t> train, std::span<const std::size_t> test,
                                      std::uint64_t fold_seed) {
        const auto train_X = X.subset_rows(train);
        const auto train_y = pick(labels, train);
        const auto rf = RandomForest::train(train_X, train_y, forest, derive_seed(fold_seed, name));
        std::vector<int> out;
        out.reserve(test.size());
        for (auto r : test) out.push_back(rf.predict(X.row(r)));
        return out;
    };
}

FoldClassifier regression_classifier(Eigen::MatrixXd X, std::vector<std::size_t> popularity, ClassBinning binning,
                                     std::vector<std::uint8_t> trainable) {
    return [X = std::move(X), popularity = std::move(popularity), binning = std::move(binning),
            trainable = std::move(trainable)](std::span<const std::size_t> train, std::span<const std::size_t> test,
                                              std::uint64_t) {
        std::vector<std::size_t> rows;
        for (auto r : train) {
            if (trainable[r]) rows.push_back(r);
        }
        std::vector<std::size_t> targets;
        for (auto r : rows) targets.push_back(popularity[r]);
        const auto model = LogPopularityRegressor::fit(pick_rows(X, rows), targets, binning);
        std::vector<int> out;
        out.reserve(test.size());
        std::vector<double> x(static_cast<std::size_t>(X.cols()));
        for (auto r : test) {
            for (Eigen::Index j = 0; j < X.cols(); ++j) x[static_cast<std::size_t>(j)] = X(static_cast<Eigen::Index>(r), j);
            out.push_back(model.predict_class(x));
        }
        return out;
    };
}

} // namespace

std::vector<ModelResult> evaluate_models(const Corpus& corpus, const RunConfig& cfg,
                                         const std::vector<std::string>& models) {
    const auto& labels = corpus.labels(cfg.basis);
    if (labels.empty()) throw DomainError("no memes with at least n events to evaluate");
    const auto folds = corpus_folds(corpus, cfg);
    const auto binning = cfg.binning();

    std::vector<std::size_t> popularity;
    for (const auto& m : corpus.memes) {
        popularity.push_back(cfg.basis == PopularityBasis::tweets ? m.tweet_count() : m.adopter_count());
    }
    const std::vector<std::uint8_t> all_trainable(labels.size(), 1);

    std::vector<ModelResult> results;
    for (const auto& name : models) {
        FoldClassifier classifier;
        FeatureMatrix X; // owned here; forest classifier keeps a reference

        if (name.rfind("Pn", 0) == 0) {
            const auto subset = name == "Pn" ? full_features() : subset_by_name(name.substr(3));
            X = corpus.matrix(subset);
            classifier = forest_classifier(X, labels, cfg.forest, name);
        } else if (name == "B1") {
            classifier = [&labels](std::span<const std::size_t> train, std::span<const std::size_t> test,
                                   std::uint64_t fold_seed) {
                const auto train_y = pick(labels, train);
                RandomGuess guess(RandomGuess::priors_of(train_y), fold_seed);
                return guess.draw(test.size());
            };
        } else if (name == "B2") {
            classifier = [&labels](std::span<const std::size_t> train, std::span<const std::size_t> test,
                                   std::uint64_t) {
                const auto train_y = pick(labels, train);
                return std::vector<int>(test.size(), MajorityGuess(train_y).predict());
            };
        } else if (name == "B3") {
            const auto pr = pagerank(corpus.net);
            auto followers = degree_follower_counts(corpus.net);
            if (!cfg.followers_path.empty()) {
                std::ifstream in(cfg.followers_path);
                if (!in) throw std::runtime_error("cannot open follower file '" + cfg.followers_path + "'");
                apply_follower_file(in, corpus.net, followers);
            }
            std::vector<InfluenceFeatures> rows;
            for (const auto& w : corpus.windows) rows.push_back(influence_features(w.adopters, pr, followers));
            classifier = regression_classifier(influence_design(rows), popularity, binning, all_trainable);
        } else if (name == "B4") {
            std::vector<std::size_t> early;
            for (const auto& m : corpus.memes) early.push_back(early_popularity(m, std::int64_t{cfg.tau_days} * 86400));
            std::vector<std::size_t> excluded;
            auto X4 = ln_design(early, &excluded);
            auto trainable = all_trainable;
            for (auto i : excluded) trainable[i] = 0;
            classifier = regression_classifier(std::move(X4), popularity, binning, std::move(trainable));
        } else if (name == "B5") {
            std::vector<std::vector<std::size_t>> daily;
            for (const auto& m : corpus.memes) daily.push_back(daily_counts(m, cfg.tau_days));
            classifier = regression_classifier(ml_design(daily), popularity, binning, all_trainable);
        } else {
            throw DomainError("unknown model '" + name + "'");
        }
        results.push_back({name, cross_validate(labels, classifier, folds)});
    }
    return results;
}

namespace {

std::vector<int> union_classes(const std::vector<ModelResult>& results) {
    std::vector<int> classes;
    for (const auto& r : results) classes.insert(classes.end(), r.cv.report.classes.begin(), r.cv.report.classes.end());
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    return classes;
}

} // namespace

void write_comparison_csv(const std::vector<ModelResult>& results, std::ostream& out) {
    out << "class";
    for (const auto& r : results) out << ',' << r.name;
    out << '\n';
    for (int c : union_classes(results)) {
        out << c;
        for (const auto& r : results) out << ',' << format_double(r.cv.report.f1_of(c));
        out << '\n';
    }
}

void print_comparison_table(const std::vector<ModelResult>& results, std::ostream& out) {
    const auto flags = out.flags();
    out << std::left << std::setw(8) << "class";
    for (const auto& r : results) out << std::right << std::setw(14) << r.name;
    out << '\n';
    for (int c : union_classes(results)) {
        out << std::left << std::setw(8) << c;
        for (const auto& r : results) {
            out << std::right << std::setw(14) << std::fixed << std::setprecision(3) << r.cv.report.f1_of(c);
        }
        out << '\n';
    }
    out.flags(flags);
}

RandomForest train_corpus_model(const Corpus& corpus, const RunConfig& cfg, const FeatureSubset& subset) {
    const auto X = corpus.matrix(subset);
    auto rf = RandomForest::train(X, corpus.labels(cfg.basis), cfg.forest, derive_seed(cfg.seed, "model"));
    rf.metadata["n"] = std::to_string(cfg.n);
    rf.metadata["basis"] = cfg.basis == PopularityBasis::tweets ? "tweets" : "adopters";
    rf.metadata["subset"] = subset.name;
    rf.metadata["unreachable"] = cfg.unreachable == UnreachablePolicy::constant ? "constant" : "exclude";
    std::ostringstream cols;
    for (std::size_t i = 0; i < subset.columns.size(); ++i) cols << (i ? "," : "") << kFeatureNames[subset.columns[i]];
    rf.metadata["features"] = cols.str();
    return rf;
}

} // namespace memepred
