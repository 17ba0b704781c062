#pragma once

#include "memepred/cascade.hpp"
#include "memepred/community.hpp"
#include "memepred/graph.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace memepred {

struct PlantedPartitionSpec {
    std::size_t communities = 4;
    std::size_t community_size = 300;
    double p_in = 0.1;
    double p_out = 0.01;
    std::uint64_t seed = 1;

    void validate() const;
};

struct SyntheticNetwork {
    Network network;
    CommunityAssignment truth;
};

// Node labels "u<i>", community names "c<k>"; node i belongs to community
// i / community_size.
SyntheticNetwork generate_network(const PlantedPartitionSpec& spec);

/**
 * Exposure-driven cascade simulation.
 *
 * Per meme, seed adopters tweet at the meme's start time. Then, while
 * active adopters remain and the meme has fewer than max_events events, a
 * uniformly chosen active adopter exposes one neighbor: with probability
 * trap_bias a same-community neighbor, otherwise any neighbor. A neighbor
 * that has not adopted yet adopts with probability
 * min(1, adopt_prob + reinforcement * prior_exposures), emitting one event:
 * a retweet of the exposer with retweet_prob, else a plain tweet that
 * mentions the exposer with mention_prob. An already-adopted neighbor
 * tweets again with repeat_prob. Each adopter has exposure_budget attempts
 * before going inactive. Consecutive events are separated by exponential
 * gaps with mean mean_inter_event_gap.
 *
 * Virality is heterogeneous: per meme, adopt_prob is drawn log-uniformly
 * from [adopt_prob_min, adopt_prob_max] and trap_bias is interpolated from
 * trap_bias_max (least contagious) down to trap_bias_min (most contagious),
 * plus uniform jitter of +/- trap_bias_jitter.
 */
struct CascadeSpec {
    std::size_t meme_count = 2000;
    std::size_t seed_adopters = 1;
    double trap_bias_min = 0.0;
    double trap_bias_max = 1.0;
    double trap_bias_jitter = 0.0;
    // Straddles the critical point (exposure_budget * p = 1) so final sizes
    // span several orders of magnitude.
    double adopt_prob_min = 0.15;
    double adopt_prob_max = 0.27;
    double reinforcement = 0.0;
    double retweet_prob = 0.5;
    double mention_prob = 0.2;
    double repeat_prob = 0.0;
    std::size_t exposure_budget = 5;
    double mean_inter_event_gap = 6 * 3600.0; // seconds
    std::size_t max_events = 1000;
    // Meme start times are uniform in [start_time, start_time + start_spread).
    std::int64_t start_time = 0;
    std::int64_t start_spread = 0;
    std::uint64_t seed = 1;

    void validate() const;
};

// Memes are named "m<index>"; each is simulated from its own derived seed,
// so the OpenMP path and generate_cascades_serial agree exactly.
std::vector<Meme> generate_cascades(const Network& net, const CommunityAssignment& ca, const CascadeSpec& spec);
std::vector<Meme> generate_cascades_serial(const Network& net, const CommunityAssignment& ca,
                                           const CascadeSpec& spec);

} // namespace memepred
