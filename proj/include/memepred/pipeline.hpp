#pragma once

#include "memepred/baselines.hpp"
#include "memepred/cascade.hpp"
#include "memepred/community.hpp"
#include "memepred/eval.hpp"
#include "memepred/features.hpp"
#include "memepred/forest.hpp"
#include "memepred/graph.hpp"
#include "memepred/simgen.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace memepred {

struct RunConfig {
    std::size_t n = 25;
    PopularityBasis basis = PopularityBasis::tweets;
    std::size_t x_max = 20;
    int tau_days = 7;
    int class_cap = 4;
    std::vector<double> bin_edges; // empty = formula binning
    int bin_first_class = 0;
    std::uint64_t seed = 42;
    UnreachablePolicy unreachable = UnreachablePolicy::constant;
    std::size_t min_community_size = 3;
    int folds = 10;
    ForestConfig forest;
    int lp_max_sweeps = 100;
    TieBreak lp_tie_break = TieBreak::random;
    // Optional "user<TAB>follower_count" overrides for the influence baseline.
    std::string followers_path;

    // Events in [history_begin, history_end) count toward the new-meme
    // filter and are not part of the observed cascades.
    std::optional<std::int64_t> history_begin;
    std::optional<std::int64_t> history_end;
    std::optional<std::int64_t> inclusion_begin;
    std::optional<std::int64_t> inclusion_end;

    // Throws DomainError when a field is out of range.
    void validate() const;
    ClassBinning binning() const;
};

// Named column subsets of f1..f13.
struct FeatureSubset {
    std::string name;
    std::vector<std::size_t> columns;
};
FeatureSubset full_features();
FeatureSubset basic_subset();
FeatureSubset distance_subset();
FeatureSubset community_subset();
FeatureSubset timing_subset();
// Resolves "full", "basic", "distance", "community" or "timing".
FeatureSubset subset_by_name(const std::string& name);

// Memes that survive the new-meme filter and have at least n events,
// resolved and featurized.
struct Corpus {
    Network net;
    CommunityAssignment ca;
    std::vector<Meme> memes;          // aligned with windows
    std::vector<EarlyWindow> windows;
    std::vector<FeatureVector> features;
    std::vector<int> label_tweets;
    std::vector<int> label_adopters;
    std::size_t filtered_out = 0;     // rejected by the new-meme filter
    std::size_t too_short = 0;        // fewer than n events

    const std::vector<int>& labels(PopularityBasis basis) const {
        return basis == PopularityBasis::tweets ? label_tweets : label_adopters;
    }
    FeatureMatrix matrix(const FeatureSubset& subset) const;
};

// Extends net with unseen event users; ca is padded to the extended size.
Corpus build_corpus(const Network& net, const CommunityAssignment& ca, const std::vector<Meme>& memes,
                    const RunConfig& cfg);

void write_feature_csv(const Corpus& corpus, std::ostream& out);

struct ModelResult {
    std::string name;
    CrossValidation cv;
};

// Model names: "Pn" (all features), "Pn-basic", "Pn-distance",
// "Pn-community", "Pn-timing", "B1".."B5".
std::vector<std::string> all_model_names();

// Cross-validates each named model on the same stratified folds.
std::vector<ModelResult> evaluate_models(const Corpus& corpus, const RunConfig& cfg,
                                         const std::vector<std::string>& models);

// Fold assignment shared by every model in evaluate_models.
std::vector<int> corpus_folds(const Corpus& corpus, const RunConfig& cfg);

void write_comparison_csv(const std::vector<ModelResult>& results, std::ostream& out);
void print_comparison_table(const std::vector<ModelResult>& results, std::ostream& out);

// Forest on the given subset over the whole corpus, with the metadata the
// predict command needs.
RandomForest train_corpus_model(const Corpus& corpus, const RunConfig& cfg, const FeatureSubset& subset);

// Shortest round-trip decimal form.
std::string format_double(double v);

} // namespace memepred
