#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace memepred {

enum class PopularityBasis { tweets, adopters };

// Order-of-magnitude class ceil(log10(p) + 0.5), capped.
//
// With explicit upper_edges the class of p is first_class + i for the first
// i with p <= upper_edges[i] (values beyond the last edge take the last
// class + 1); the cap still applies.
struct ClassBinning {
    int cap = 4;
    std::vector<double> upper_edges;
    int first_class = 0;

    int bin(std::uint64_t popularity) const;
    // Same rule on a real-valued log10 popularity (regression outputs);
    // results below the lowest class clamp to it.
    int bin_log10(double log_popularity) const;
};

// ceil(log10(popularity) + 0.5) capped at cap; exact integer arithmetic.
// Throws DomainError for popularity < 1.
int bin(std::uint64_t popularity, int cap = 4);

struct ClassMetrics {
    int label = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0; // actual count
    std::size_t predicted = 0;
};

struct ClassReport {
    std::vector<int> classes;                         // ascending union of labels
    std::vector<ClassMetrics> metrics;                // one per class
    std::vector<std::vector<std::size_t>> confusion;  // [actual][predicted]
    bool degenerate = false;
    std::vector<std::string> notes;

    const ClassMetrics* find(int label) const;
    double f1_of(int label) const; // 0 when the class is absent
    double accuracy() const;
};

// One-vs-rest precision, recall and F1 per class; F1 is 0 when
// precision + recall is 0, and an unpredicted class has precision 0.
ClassReport f1_report(std::span<const int> predicted, std::span<const int> actual);

void write_report_csv(const ClassReport& report, std::ostream& out);
void write_confusion_csv(const ClassReport& report, std::ostream& out);

// Stratified fold assignment: each class is shuffled and dealt round-robin
// with the fold cursor carried across classes, so fold sizes differ by at
// most one.
std::vector<int> stratified_folds(std::span<const int> labels, int folds, std::uint64_t seed);

// Order-sensitive hash of a fold assignment, for logging.
std::uint64_t fold_hash(std::span<const int> fold_of);

// Trains on train rows, predicts test rows; fold_seed is distinct per fold.
using FoldClassifier = std::function<std::vector<int>(std::span<const std::size_t> train,
                                                      std::span<const std::size_t> test,
                                                      std::uint64_t fold_seed)>;

struct CrossValidation {
    ClassReport report;
    std::vector<int> predictions; // pooled out-of-fold, aligned with labels
    std::vector<int> fold_of;
    std::uint64_t hash = 0;
};

// Pooled out-of-fold predictions over stratified folds. A fold whose
// classifier throws falls back to the training-fold majority class and
// flags the report degenerate.
CrossValidation cross_validate(std::span<const int> labels, const FoldClassifier& classifier, int folds,
                               std::uint64_t seed);
CrossValidation cross_validate(std::span<const int> labels, const FoldClassifier& classifier,
                               std::span<const int> fold_of);

} // namespace memepred
