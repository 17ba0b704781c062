#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace memepred {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return std::isnan(v); }

// Dense row-major matrix; NaN marks a missing value.
class FeatureMatrix {
public:
    FeatureMatrix() = default;
    FeatureMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& at(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
    double at(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
    std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols_, cols_}; }

    // Rows picked in the given order.
    FeatureMatrix subset_rows(std::span<const std::size_t> rows) const;
    // Columns picked in the given order.
    FeatureMatrix subset_cols(std::span<const std::size_t> cols) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

struct ForestConfig {
    std::size_t n_trees = 300;
    // Clamped to the feature count at training time.
    std::size_t features_per_tree = 5;
    // Draw the feature subset at every split instead of once per tree.
    bool per_split_sampling = false;
    bool bootstrap = true;
    std::size_t max_depth = 0; // 0 = unlimited
    std::size_t min_leaf = 1;
};

struct TreeNode {
    std::int32_t feature = -1; // -1 marks a leaf
    double threshold = 0.0;    // value <= threshold goes left
    bool missing_left = true;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::vector<std::uint32_t> histogram; // leaves only, indexed by class slot

    bool is_leaf() const noexcept { return feature < 0; }
};

class DecisionTree {
public:
    std::vector<TreeNode> nodes;             // nodes[0] is the root
    std::vector<std::uint32_t> feature_subset;

    const TreeNode& leaf_for(std::span<const double> x) const;
    // Class slot with the largest leaf count, smaller slot on ties.
    std::size_t vote(std::span<const double> x) const;
};

class RandomForest {
public:
    // Trees are independent given per-tree seeds derived from seed, so the
    // OpenMP build and train_serial produce identical forests.
    static RandomForest train(const FeatureMatrix& X, std::span<const int> y, const ForestConfig& config,
                              std::uint64_t seed);
    static RandomForest train_serial(const FeatureMatrix& X, std::span<const int> y, const ForestConfig& config,
                                     std::uint64_t seed);

    // Plurality of per-tree votes; smaller class id on ties. Missing values
    // follow each node's missing branch.
    int predict(std::span<const double> x) const;
    std::vector<int> predict(const FeatureMatrix& X) const;
    // Vote count per class (same order as classes()); sums to tree count.
    std::vector<std::size_t> votes(std::span<const double> x) const;

    const std::vector<int>& classes() const noexcept { return classes_; }
    const std::vector<DecisionTree>& trees() const noexcept { return trees_; }
    const ForestConfig& config() const noexcept { return config_; }
    std::uint64_t seed() const noexcept { return seed_; }
    std::size_t feature_count() const noexcept { return feature_count_; }

    // Free-form descriptive entries stored with the model.
    std::map<std::string, std::string> metadata;

    std::string to_json() const;
    static RandomForest from_json(const std::string& text);
    void save(const std::string& path) const;
    static RandomForest load(const std::string& path);

private:
    static RandomForest train_impl(const FeatureMatrix& X, std::span<const int> y, const ForestConfig& config,
                                   std::uint64_t seed, bool parallel);

    ForestConfig config_;
    std::uint64_t seed_ = 0;
    std::size_t feature_count_ = 0;
    std::vector<int> classes_;
    std::vector<DecisionTree> trees_;
};

} // namespace memepred
