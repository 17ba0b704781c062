#include "memepred/forest.hpp"
#include "memepred/errors.hpp"
#include "memepred/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <exception>
#include <fstream>
#include <sstream>

namespace memepred {

FeatureMatrix FeatureMatrix::subset_rows(std::span<const std::size_t> rows) const {
    FeatureMatrix out(rows.size(), cols_);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto src = row(rows[i]);
        std::copy(src.begin(), src.end(), out.values_.begin() + static_cast<std::ptrdiff_t>(i * cols_));
    }
    return out;
}

FeatureMatrix FeatureMatrix::subset_cols(std::span<const std::size_t> cols) const {
    FeatureMatrix out(rows_, cols.size());
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t j = 0; j < cols.size(); ++j) out.at(r, j) = at(r, cols[j]);
    }
    return out;
}

const TreeNode& DecisionTree::leaf_for(std::span<const double> x) const {
    std::size_t at = 0;
    while (!nodes[at].is_leaf()) {
        const auto& node = nodes[at];
        const double v = x[static_cast<std::size_t>(node.feature)];
        const bool go_left = is_missing(v) ? node.missing_left : v <= node.threshold;
        at = static_cast<std::size_t>(go_left ? node.left : node.right);
    }
    return nodes[at];
}

std::size_t DecisionTree::vote(std::span<const double> x) const {
    const auto& hist = leaf_for(x).histogram;
    return static_cast<std::size_t>(std::max_element(hist.begin(), hist.end()) - hist.begin());
}

namespace {

class TreeBuilder {
public:
    TreeBuilder(const FeatureMatrix& X, const std::vector<std::uint16_t>& slots, std::size_t class_count,
                const ForestConfig& cfg, std::size_t features_per_tree, std::uint64_t seed)
        : X_(X), slots_(slots), k_(class_count), cfg_(cfg), per_tree_(features_per_tree), rng_(seed) {}

    DecisionTree build() {
        DecisionTree tree;
        const std::size_t n = X_.rows();

        // Feature subset first, then bootstrap, so both depend only on the seed.
        all_features_.resize(X_.cols());
        for (std::uint32_t j = 0; j < X_.cols(); ++j) all_features_[j] = j;
        tree.feature_subset = sample_features();
        std::sort(tree.feature_subset.begin(), tree.feature_subset.end());

        idx_.resize(n);
        for (std::size_t i = 0; i < n; ++i) idx_[i] = cfg_.bootstrap ? rng_.below(n) : i;

        struct Pending {
            std::size_t node, begin, end, depth;
        };
        std::vector<Pending> stack;
        tree.nodes.emplace_back();
        stack.push_back({0, 0, n, 0});
        while (!stack.empty()) {
            const Pending p = stack.back();
            stack.pop_back();

            std::vector<std::uint32_t> hist(k_, 0);
            for (std::size_t i = p.begin; i < p.end; ++i) ++hist[slots_[idx_[i]]];
            const std::size_t size = p.end - p.begin;
            const bool pure = std::count_if(hist.begin(), hist.end(), [](auto c) { return c > 0; }) <= 1;
            const bool depth_capped = cfg_.max_depth > 0 && p.depth >= cfg_.max_depth;

            Split split;
            if (!pure && !depth_capped && size >= 2 * cfg_.min_leaf) {
                const auto candidates = cfg_.per_split_sampling ? sample_features() : tree.feature_subset;
                split = best_split(p.begin, p.end, candidates);
            }
            if (!split.valid) {
                tree.nodes[p.node].histogram = std::move(hist);
                continue;
            }

            const auto mid = std::stable_partition(
                idx_.begin() + static_cast<std::ptrdiff_t>(p.begin), idx_.begin() + static_cast<std::ptrdiff_t>(p.end),
                [&](std::size_t r) {
                    const double v = X_.at(r, split.feature);
                    return is_missing(v) ? split.missing_left : v <= split.threshold;
                });
            const auto cut = static_cast<std::size_t>(mid - idx_.begin());

            const auto left = static_cast<std::int32_t>(tree.nodes.size());
            tree.nodes.emplace_back();
            tree.nodes.emplace_back();
            auto& node = tree.nodes[p.node];
            node.feature = static_cast<std::int32_t>(split.feature);
            node.threshold = split.threshold;
            node.missing_left = split.missing_left;
            node.left = left;
            node.right = left + 1;
            // Right pushed first so the left subtree is built first.
            stack.push_back({static_cast<std::size_t>(left + 1), cut, p.end, p.depth + 1});
            stack.push_back({static_cast<std::size_t>(left), p.begin, cut, p.depth + 1});
        }
        return tree;
    }

private:
    struct Split {
        bool valid = false;
        std::size_t feature = 0;
        double threshold = 0.0;
        bool missing_left = true;
        double score = -1.0;
    };

    std::vector<std::uint32_t> sample_features() {
        std::vector<std::uint32_t> pool = all_features_;
        for (std::size_t i = 0; i < per_tree_; ++i) {
            std::swap(pool[i], pool[i + rng_.below(pool.size() - i)]);
        }
        pool.resize(per_tree_);
        return pool;
    }

    // Sum of squared counts over a side, divided by its size.
    static double purity(const std::vector<std::uint32_t>& base, const std::vector<std::uint32_t>* extra) {
        double sq = 0.0, total = 0.0;
        for (std::size_t c = 0; c < base.size(); ++c) {
            const double v = base[c] + (extra ? (*extra)[c] : 0u);
            sq += v * v;
            total += v;
        }
        return total > 0.0 ? sq / total : 0.0;
    }

    Split best_split(std::size_t begin, std::size_t end, const std::vector<std::uint32_t>& features) {
        Split best;
        std::vector<std::uint32_t> missing(k_), nonmissing(k_), left(k_), right(k_);
        for (std::uint32_t f : features) {
            pairs_.clear();
            std::fill(missing.begin(), missing.end(), 0);
            std::fill(nonmissing.begin(), nonmissing.end(), 0);
            std::size_t missing_count = 0;
            for (std::size_t i = begin; i < end; ++i) {
                const auto r = idx_[i];
                const double v = X_.at(r, f);
                if (is_missing(v)) {
                    ++missing[slots_[r]];
                    ++missing_count;
                } else {
                    pairs_.emplace_back(v, slots_[r]);
                    ++nonmissing[slots_[r]];
                }
            }
            const std::size_t m = pairs_.size();
            if (m < 2) continue;
            std::sort(pairs_.begin(), pairs_.end());
            if (pairs_.front().first == pairs_.back().first) continue;

            std::fill(left.begin(), left.end(), 0);
            for (std::size_t i = 0; i + 1 < m; ++i) {
                ++left[pairs_[i].second];
                const double a = pairs_[i].first;
                const double b = pairs_[i + 1].first;
                if (a == b) continue;
                const std::size_t left_n = i + 1;
                const std::size_t right_n = m - left_n;
                const bool missing_left = left_n >= right_n;
                const std::size_t left_total = left_n + (missing_left ? missing_count : 0);
                const std::size_t right_total = right_n + (missing_left ? 0 : missing_count);
                if (left_total < cfg_.min_leaf || right_total < cfg_.min_leaf) continue;

                for (std::size_t c = 0; c < k_; ++c) right[c] = nonmissing[c] - left[c];
                const double score = missing_left ? purity(left, &missing) + purity(right, nullptr)
                                                  : purity(left, nullptr) + purity(right, &missing);
                if (score > best.score) {
                    double threshold = a + (b - a) / 2.0;
                    if (!(threshold < b)) threshold = a;
                    best = Split{true, f, threshold, missing_left, score};
                }
            }
        }
        return best;
    }

    const FeatureMatrix& X_;
    const std::vector<std::uint16_t>& slots_;
    std::size_t k_;
    const ForestConfig& cfg_;
    std::size_t per_tree_;
    Rng rng_;
    std::vector<std::uint32_t> all_features_;
    std::vector<std::size_t> idx_;
    std::vector<std::pair<double, std::uint16_t>> pairs_;
};

} // namespace

RandomForest RandomForest::train_impl(const FeatureMatrix& X, std::span<const int> y, const ForestConfig& config,
                                      std::uint64_t seed, bool parallel) {
    if (X.rows() != y.size()) throw DomainError("label count differs from matrix rows");
    if (X.cols() == 0) throw DomainError("feature matrix has no columns");
    if (config.n_trees == 0) throw DomainError("forest needs at least one tree");
    if (config.features_per_tree == 0) throw DomainError("features_per_tree must be >= 1");
    if (config.min_leaf == 0) throw DomainError("min_leaf must be >= 1");

    RandomForest rf;
    rf.config_ = config;
    rf.seed_ = seed;
    rf.feature_count_ = X.cols();
    rf.classes_.assign(y.begin(), y.end());
    std::sort(rf.classes_.begin(), rf.classes_.end());
    rf.classes_.erase(std::unique(rf.classes_.begin(), rf.classes_.end()), rf.classes_.end());
    if (rf.classes_.size() < 2) {
        throw DomainError("random forest needs at least two classes; use the majority-guess baseline instead");
    }

    std::vector<std::uint16_t> slots(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        slots[i] = static_cast<std::uint16_t>(std::lower_bound(rf.classes_.begin(), rf.classes_.end(), y[i]) -
                                              rf.classes_.begin());
    }
    const std::size_t per_tree = std::min(config.features_per_tree, X.cols());

    rf.trees_.resize(config.n_trees);
    const auto n_trees = static_cast<std::int64_t>(config.n_trees);
    auto grow = [&](std::int64_t t) {
        TreeBuilder builder(X, slots, rf.classes_.size(), config, per_tree,
                            derive_seed(seed, static_cast<std::uint64_t>(t)));
        rf.trees_[static_cast<std::size_t>(t)] = builder.build();
    };
    if (parallel) {
        std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
        for (std::int64_t t = 0; t < n_trees; ++t) {
            try {
                grow(t);
            } catch (...) {
#pragma omp critical(memepred_forest_failure)
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);
    } else {
        for (std::int64_t t = 0; t < n_trees; ++t) grow(t);
    }
    return rf;
}

RandomForest RandomForest::train(const FeatureMatrix& X, std::span<const int> y, const ForestConfig& config,
                                 std::uint64_t seed) {
    return train_impl(X, y, config, seed, true);
}

RandomForest RandomForest::train_serial(const FeatureMatrix& X, std::span<const int> y, const ForestConfig& config,
                                        std::uint64_t seed) {
    return train_impl(X, y, config, seed, false);
}

std::vector<std::size_t> RandomForest::votes(std::span<const double> x) const {
    if (x.size() != feature_count_) {
        throw DomainError("feature vector has " + std::to_string(x.size()) + " values, model expects " +
                          std::to_string(feature_count_));
    }
    std::vector<std::size_t> counts(classes_.size(), 0);
    for (const auto& tree : trees_) ++counts[tree.vote(x)];
    return counts;
}

int RandomForest::predict(std::span<const double> x) const {
    const auto counts = votes(x);
    return classes_[static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin())];
}

std::vector<int> RandomForest::predict(const FeatureMatrix& X) const {
    std::vector<int> out(X.rows());
    for (std::size_t r = 0; r < X.rows(); ++r) out[r] = predict(X.row(r));
    return out;
}

namespace {

constexpr const char* kFormat = "memepred-random-forest";
constexpr int kVersion = 1;

} // namespace

std::string RandomForest::to_json() const {
    using nlohmann::json;
    json j;
    j["format"] = kFormat;
    j["version"] = kVersion;
    j["config"] = {{"n_trees", config_.n_trees},
                   {"features_per_tree", config_.features_per_tree},
                   {"per_split_sampling", config_.per_split_sampling},
                   {"bootstrap", config_.bootstrap},
                   {"max_depth", config_.max_depth},
                   {"min_leaf", config_.min_leaf}};
    j["seed"] = seed_;
    j["feature_count"] = feature_count_;
    j["classes"] = classes_;
    j["metadata"] = metadata;
    json trees = json::array();
    for (const auto& tree : trees_) {
        json nodes = json::array();
        for (const auto& node : tree.nodes) {
            if (node.is_leaf()) {
                nodes.push_back({{"leaf", node.histogram}});
            } else {
                nodes.push_back({{"feature", node.feature},
                                 {"threshold", node.threshold},
                                 {"missing", node.missing_left ? "left" : "right"},
                                 {"left", node.left},
                                 {"right", node.right}});
            }
        }
        trees.push_back({{"features", tree.feature_subset}, {"nodes", std::move(nodes)}});
    }
    j["trees"] = std::move(trees);
    return j.dump();
}

RandomForest RandomForest::from_json(const std::string& text) {
    using nlohmann::json;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw DomainError(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != kFormat) throw DomainError("not a random forest model");
        if (j.at("version").get<int>() != kVersion) throw DomainError("unsupported model version");
        RandomForest rf;
        const auto& c = j.at("config");
        rf.config_.n_trees = c.at("n_trees").get<std::size_t>();
        rf.config_.features_per_tree = c.at("features_per_tree").get<std::size_t>();
        rf.config_.per_split_sampling = c.at("per_split_sampling").get<bool>();
        rf.config_.bootstrap = c.at("bootstrap").get<bool>();
        rf.config_.max_depth = c.at("max_depth").get<std::size_t>();
        rf.config_.min_leaf = c.at("min_leaf").get<std::size_t>();
        rf.seed_ = j.at("seed").get<std::uint64_t>();
        rf.feature_count_ = j.at("feature_count").get<std::size_t>();
        rf.classes_ = j.at("classes").get<std::vector<int>>();
        rf.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
        for (const auto& t : j.at("trees")) {
            DecisionTree tree;
            tree.feature_subset = t.at("features").get<std::vector<std::uint32_t>>();
            for (const auto& n : t.at("nodes")) {
                TreeNode node;
                if (n.contains("leaf")) {
                    node.histogram = n.at("leaf").get<std::vector<std::uint32_t>>();
                    if (node.histogram.size() != rf.classes_.size()) throw DomainError("leaf histogram size mismatch");
                } else {
                    node.feature = n.at("feature").get<std::int32_t>();
                    node.threshold = n.at("threshold").get<double>();
                    node.missing_left = n.at("missing").get<std::string>() == "left";
                    node.left = n.at("left").get<std::int32_t>();
                    node.right = n.at("right").get<std::int32_t>();
                }
                tree.nodes.push_back(std::move(node));
            }
            const auto count = static_cast<std::int32_t>(tree.nodes.size());
            for (const auto& node : tree.nodes) {
                if (node.is_leaf()) continue;
                if (node.feature >= static_cast<std::int32_t>(rf.feature_count_) || node.left <= 0 ||
                    node.right <= 0 || node.left >= count || node.right >= count) {
                    throw DomainError("malformed tree node");
                }
            }
            if (tree.nodes.empty()) throw DomainError("empty tree");
            rf.trees_.push_back(std::move(tree));
        }
        return rf;
    } catch (const json::exception& e) {
        throw DomainError(std::string("malformed model file: ") + e.what());
    }
}

void RandomForest::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model '" + path + "'");
    out << to_json() << '\n';
}

RandomForest RandomForest::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return from_json(buffer.str());
}

} // namespace memepred
