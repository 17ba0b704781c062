#pragma once

#include "memepred/cascade.hpp"
#include "memepred/community.hpp"
#include "memepred/graph.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace memepred {

inline constexpr std::size_t kFeatureCount = 13;
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "f1", "f2", "f3", "f4", "f5", "f6", "f7", "f8", "f9", "f10", "f11", "f12", "f13"};

// How an unreachable pair of adopters enters the distance features.
enum class UnreachablePolicy {
    // Substitute (largest finite pairwise adopter distance in the window) + 1.
    constant,
    // Drop unreachable steps and pairs.
    exclude,
};

struct FeatureConfig {
    UnreachablePolicy unreachable = UnreachablePolicy::constant;
};

struct BasicFeatures {
    std::size_t adopters = 0;  // f1
    std::size_t surface1 = 0;  // f2
    std::size_t surface2 = 0;  // f3

    friend bool operator==(const BasicFeatures&, const BasicFeatures&) = default;
};

struct DistanceFeatures {
    std::optional<double> mean_step;       // f4
    std::optional<double> cv_step;         // f5
    std::uint32_t diameter = 0;            // f6

    friend bool operator==(const DistanceFeatures&, const DistanceFeatures&) = default;
};

struct CommunityFeatures {
    std::size_t infected = 0;             // f7
    double usage_entropy = 0.0;           // f8, nats
    double adopter_entropy = 0.0;         // f9, nats
    std::optional<double> intra_rt_frac;  // f10
    std::optional<double> intra_at_frac;  // f11

    friend bool operator==(const CommunityFeatures&, const CommunityFeatures&) = default;
};

struct GrowthFeatures {
    std::optional<double> mean_step_time; // f12, seconds
    std::optional<double> cv_step_time;   // f13

    friend bool operator==(const GrowthFeatures&, const GrowthFeatures&) = default;
};

struct FeatureVector {
    BasicFeatures basic;
    DistanceFeatures distance;
    CommunityFeatures community;
    GrowthFeatures growth;

    // f1..f13 in order; missing values become NaN.
    std::array<double, kFeatureCount> to_array() const;
    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

// Per-thread buffers for the graph traversals behind the features.
class FeatureWorkspace {
public:
    void prepare(std::size_t node_count);

    std::vector<std::int32_t> dist;
    std::vector<NodeId> queue;
    std::vector<std::int32_t> adopter_slot;
};

// Hop distances between the window's distinct adopters, row-major k x k,
// -1 for unreachable pairs.
std::vector<std::int32_t> adopter_distances(const EarlyWindow& w, const Network& net, FeatureWorkspace& ws);

BasicFeatures basic_features(const EarlyWindow& w, const Network& net, FeatureWorkspace& ws);
BasicFeatures basic_features(const EarlyWindow& w, const Network& net);

DistanceFeatures distance_features(const EarlyWindow& w, const Network& net, const FeatureConfig& cfg,
                                   FeatureWorkspace& ws);
DistanceFeatures distance_features(const EarlyWindow& w, const Network& net, const FeatureConfig& cfg = {});

CommunityFeatures community_features(const EarlyWindow& w, const CommunityAssignment& ca);

GrowthFeatures growth_features(const EarlyWindow& w);

// Coefficient of variation with the (count - 1) denominator over the given
// samples; nullopt for fewer than two samples or a zero mean.
std::optional<double> coefficient_of_variation(std::span<const double> samples, double mean);

FeatureVector extract_all(const EarlyWindow& w, const Network& net, const CommunityAssignment& ca,
                          const FeatureConfig& cfg, FeatureWorkspace& ws);
FeatureVector extract_all(const EarlyWindow& w, const Network& net, const CommunityAssignment& ca,
                          const FeatureConfig& cfg = {});

// OpenMP across windows; output order matches input.
std::vector<FeatureVector> extract_batch(std::span<const EarlyWindow> windows, const Network& net,
                                         const CommunityAssignment& ca, const FeatureConfig& cfg = {});
// Single-threaded reference for extract_batch.
std::vector<FeatureVector> extract_batch_serial(std::span<const EarlyWindow> windows, const Network& net,
                                                const CommunityAssignment& ca, const FeatureConfig& cfg = {});

} // namespace memepred
