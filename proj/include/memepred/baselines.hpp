#pragma once

#include "memepred/cascade.hpp"
#include "memepred/eval.hpp"
#include "memepred/graph.hpp"
#include "memepred/rng.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

namespace memepred {

// B1: draws classes i.i.d. from fixed priors.
class RandomGuess {
public:
    // Priors must be non-negative and sum to 1 within 1e-9.
    RandomGuess(std::map<int, double> priors, std::uint64_t seed);

    int draw();
    std::vector<int> draw(std::size_t count);

    // Empirical class frequencies of labels.
    static std::map<int, double> priors_of(std::span<const int> labels);

private:
    std::vector<int> classes_;
    std::vector<double> cumulative_;
    Rng rng_;
};

// B2: the modal training class, smaller id on ties.
class MajorityGuess {
public:
    explicit MajorityGuess(std::span<const int> training_labels);
    int predict() const noexcept { return label_; }

private:
    int label_ = 0;
};

struct LinearModel {
    Eigen::VectorXd coefficients;
    double intercept = 0.0;
    bool ridge_used = false;

    double predict(std::span<const double> x) const;
    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
};

// Least squares with intercept via the centered normal equations. When the
// Gram matrix is singular a small ridge term is added. Requires
// rows > cols and finite entries; throws DomainError otherwise.
LinearModel fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

struct SummaryStats {
    double max = 0.0;
    double mean = 0.0;
    double median = 0.0;
    double cv = 0.0; // sample std / mean; 0 for a single value or zero mean
};

SummaryStats summarize(std::vector<double> values);

// PageRank and log10(1 + followers) statistics over a window's adopters.
struct InfluenceFeatures {
    SummaryStats pagerank;
    SummaryStats followers;

    std::array<double, 8> to_array() const;
};

InfluenceFeatures influence_features(std::span<const NodeId> adopters, std::span<const double> pagerank,
                                     std::span<const double> follower_counts);

// Per-node follower counts: network degree unless overridden by a
// "user<TAB>follower_count" file (unknown users are ignored).
std::vector<double> degree_follower_counts(const Network& net);
void apply_follower_file(std::istream& in, const Network& net, std::vector<double>& counts);

// Events within tau seconds of the meme's first event.
std::size_t early_popularity(const Meme& meme, std::int64_t tau_seconds);
// Events per day since the first event, days 1..tau_days.
std::vector<std::size_t> daily_counts(const Meme& meme, int tau_days);

// Regression on log10 popularity, emitting classes.
class LogPopularityRegressor {
public:
    LogPopularityRegressor() = default;
    LogPopularityRegressor(LinearModel model, ClassBinning binning)
        : model_(std::move(model)), binning_(std::move(binning)) {}

    // Rows of X against final popularity (each >= 1).
    static LogPopularityRegressor fit(const Eigen::MatrixXd& X, std::span<const std::size_t> popularity,
                                      ClassBinning binning);

    double predict_log10(std::span<const double> x) const { return model_.predict(x); }
    int predict_class(std::span<const double> x) const { return binning_.bin_log10(predict_log10(x)); }
    const LinearModel& model() const noexcept { return model_; }

private:
    LinearModel model_;
    ClassBinning binning_;
};

// B3 design matrix: one row of 8 influence features per window.
Eigen::MatrixXd influence_design(std::span<const InfluenceFeatures> rows);

// B4 design matrix: log10 |T^tau|, one row per meme. Zero early popularity
// is clamped to 1 in the row and its index appended to excluded so callers
// can keep it out of training.
Eigen::MatrixXd ln_design(std::span<const std::size_t> early, std::vector<std::size_t>* excluded = nullptr);

// B5 design matrix: log10(1 + count) for each of the tau days.
Eigen::MatrixXd ml_design(std::span<const std::vector<std::size_t>> daily);

} // namespace memepred
