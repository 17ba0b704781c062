#include "memepred/features.hpp"
#include "memepred/errors.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

namespace memepred {

std::array<double, kFeatureCount> FeatureVector::to_array() const {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    auto opt = [](const std::optional<double>& v) { return v ? *v : nan; };
    return {static_cast<double>(basic.adopters),
            static_cast<double>(basic.surface1),
            static_cast<double>(basic.surface2),
            opt(distance.mean_step),
            opt(distance.cv_step),
            static_cast<double>(distance.diameter),
            static_cast<double>(community.infected),
            community.usage_entropy,
            community.adopter_entropy,
            opt(community.intra_rt_frac),
            opt(community.intra_at_frac),
            opt(growth.mean_step_time),
            opt(growth.cv_step_time)};
}

void FeatureWorkspace::prepare(std::size_t node_count) {
    if (dist.size() != node_count) {
        dist.assign(node_count, -1);
        adopter_slot.assign(node_count, -1);
    }
    queue.clear();
}

std::vector<std::int32_t> adopter_distances(const EarlyWindow& w, const Network& net, FeatureWorkspace& ws) {
    ws.prepare(net.node_count());
    const std::size_t k = w.adopters.size();
    std::vector<std::int32_t> out(k * k, -1);
    for (std::size_t i = 0; i < k; ++i) {
        net.check_node(w.adopters[i]);
        ws.adopter_slot[w.adopters[i]] = static_cast<std::int32_t>(i);
    }

    for (std::size_t i = 0; i < k; ++i) {
        const NodeId source = w.adopters[i];
        ws.queue.clear();
        ws.queue.push_back(source);
        ws.dist[source] = 0;
        out[i * k + i] = 0;
        std::size_t found = 1;
        for (std::size_t head = 0; head < ws.queue.size() && found < k; ++head) {
            const NodeId u = ws.queue[head];
            const std::int32_t du = ws.dist[u];
            for (NodeId v : net.neighbors(u)) {
                if (ws.dist[v] >= 0) continue;
                ws.dist[v] = du + 1;
                ws.queue.push_back(v);
                if (const auto slot = ws.adopter_slot[v]; slot >= 0) {
                    out[i * k + static_cast<std::size_t>(slot)] = du + 1;
                    ++found;
                }
            }
        }
        for (NodeId v : ws.queue) ws.dist[v] = -1;
    }
    for (NodeId a : w.adopters) ws.adopter_slot[a] = -1;
    ws.queue.clear();
    return out;
}

BasicFeatures basic_features(const EarlyWindow& w, const Network& net, FeatureWorkspace& ws) {
    ws.prepare(net.node_count());
    BasicFeatures out;
    out.adopters = w.adopters.size();

    // Two-level multi-source BFS from the adopters.
    for (NodeId a : w.adopters) {
        net.check_node(a);
        if (ws.dist[a] < 0) {
            ws.dist[a] = 0;
            ws.queue.push_back(a);
        }
    }
    const std::size_t seeds_end = ws.queue.size();
    for (std::size_t head = 0; head < ws.queue.size(); ++head) {
        const NodeId u = ws.queue[head];
        const std::int32_t du = ws.dist[u];
        if (du >= 2) continue;
        for (NodeId v : net.neighbors(u)) {
            if (ws.dist[v] >= 0) continue;
            ws.dist[v] = du + 1;
            ws.queue.push_back(v);
            if (du == 0) ++out.surface1;
        }
    }
    out.surface2 = ws.queue.size() - seeds_end;
    for (NodeId v : ws.queue) ws.dist[v] = -1;
    ws.queue.clear();
    return out;
}

BasicFeatures basic_features(const EarlyWindow& w, const Network& net) {
    FeatureWorkspace ws;
    return basic_features(w, net, ws);
}

std::optional<double> coefficient_of_variation(std::span<const double> samples, double mean) {
    if (samples.size() < 2 || mean == 0.0) return std::nullopt;
    double ss = 0.0;
    for (double x : samples) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(samples.size() - 1)) / mean;
}

DistanceFeatures distance_features(const EarlyWindow& w, const Network& net, const FeatureConfig& cfg,
                                   FeatureWorkspace& ws) {
    const std::size_t k = w.adopters.size();
    const auto pairs = adopter_distances(w, net, ws);

    std::int32_t max_finite = 0;
    bool any_unreachable = false;
    for (auto d : pairs) {
        if (d < 0) any_unreachable = true;
        else max_finite = std::max(max_finite, d);
    }
    const bool substitute = cfg.unreachable == UnreachablePolicy::constant;
    const std::int32_t fallback = max_finite + 1;

    DistanceFeatures out;
    out.diameter = static_cast<std::uint32_t>(substitute && any_unreachable ? fallback : max_finite);

    // Slot lookup for each author; adopters are few so a linear scan is fine.
    auto slot_of = [&](NodeId v) {
        return static_cast<std::size_t>(std::find(w.adopters.begin(), w.adopters.end(), v) - w.adopters.begin());
    };
    std::vector<double> steps;
    steps.reserve(w.n);
    for (std::size_t i = 0; i + 1 < w.n; ++i) {
        const auto d = pairs[slot_of(w.authors[i]) * k + slot_of(w.authors[i + 1])];
        if (d >= 0) steps.push_back(d);
        else if (substitute) steps.push_back(fallback);
    }
    if (steps.empty()) {
        out.mean_step = std::nullopt;
        out.cv_step = std::nullopt;
        return out;
    }
    double sum = 0.0;
    for (double s : steps) sum += s;
    const double mean = sum / static_cast<double>(steps.size());
    out.mean_step = mean;
    out.cv_step = coefficient_of_variation(steps, mean);
    return out;
}

DistanceFeatures distance_features(const EarlyWindow& w, const Network& net, const FeatureConfig& cfg) {
    FeatureWorkspace ws;
    return distance_features(w, net, cfg, ws);
}

namespace {

// -sum p ln p over tallies normalized by their total; 0 when empty.
double entropy(std::vector<std::pair<CommunityId, double>>& tallies) {
    if (tallies.empty()) return 0.0;
    std::sort(tallies.begin(), tallies.end(), [](auto& a, auto& b) { return a.first < b.first; });
    std::vector<double> merged;
    double total = 0.0;
    for (std::size_t i = 0; i < tallies.size();) {
        double t = 0.0;
        const auto c = tallies[i].first;
        for (; i < tallies.size() && tallies[i].first == c; ++i) t += tallies[i].second;
        merged.push_back(t);
        total += t;
    }
    double h = 0.0;
    for (double t : merged) {
        if (t <= 0.0) continue;
        const double p = t / total;
        h -= p * std::log(p);
    }
    return h;
}

void add_tally(std::vector<std::pair<CommunityId, double>>& tallies, const CommunityAssignment& ca, NodeId v) {
    const auto comms = ca.communities_of(v);
    if (comms.empty()) return; // no-community bucket, left out of the entropy
    const double weight = 1.0 / static_cast<double>(comms.size());
    for (CommunityId c : comms) tallies.emplace_back(c, weight);
}

std::optional<double> fraction(const InteractionSplit& s) {
    if (s.total() == 0) return std::nullopt;
    return static_cast<double>(s.intra) / static_cast<double>(s.total());
}

} // namespace

CommunityFeatures community_features(const EarlyWindow& w, const CommunityAssignment& ca) {
    if (w.n == 0) throw DomainError("empty window");
    CommunityFeatures out;
    out.infected = infected_communities(w, ca).size();

    std::vector<std::pair<CommunityId, double>> tallies;
    for (std::size_t i = 0; i < w.n; ++i) add_tally(tallies, ca, w.authors[i]);
    out.usage_entropy = entropy(tallies);

    tallies.clear();
    for (NodeId a : w.adopters) add_tally(tallies, ca, a);
    out.adopter_entropy = entropy(tallies);

    out.intra_rt_frac = fraction(interaction_split(w, ca, EventKind::retweet));
    out.intra_at_frac = fraction(interaction_split(w, ca, EventKind::mention));
    return out;
}

GrowthFeatures growth_features(const EarlyWindow& w) {
    GrowthFeatures out;
    if (w.n < 2) return out;
    const double span = static_cast<double>(w.timestamps[w.n - 1] - w.timestamps[0]);
    const double mean = span / static_cast<double>(w.n - 1);
    out.mean_step_time = mean;
    std::vector<double> gaps;
    gaps.reserve(w.n - 1);
    for (std::size_t i = 0; i + 1 < w.n; ++i) {
        gaps.push_back(static_cast<double>(w.timestamps[i + 1] - w.timestamps[i]));
    }
    out.cv_step_time = coefficient_of_variation(gaps, mean);
    return out;
}

FeatureVector extract_all(const EarlyWindow& w, const Network& net, const CommunityAssignment& ca,
                          const FeatureConfig& cfg, FeatureWorkspace& ws) {
    FeatureVector fv;
    fv.basic = basic_features(w, net, ws);
    fv.distance = distance_features(w, net, cfg, ws);
    fv.community = community_features(w, ca);
    fv.growth = growth_features(w);
    return fv;
}

FeatureVector extract_all(const EarlyWindow& w, const Network& net, const CommunityAssignment& ca,
                          const FeatureConfig& cfg) {
    FeatureWorkspace ws;
    return extract_all(w, net, ca, cfg, ws);
}

std::vector<FeatureVector> extract_batch_serial(std::span<const EarlyWindow> windows, const Network& net,
                                                const CommunityAssignment& ca, const FeatureConfig& cfg) {
    std::vector<FeatureVector> out;
    out.reserve(windows.size());
    FeatureWorkspace ws;
    for (const auto& w : windows) out.push_back(extract_all(w, net, ca, cfg, ws));
    return out;
}

std::vector<FeatureVector> extract_batch(std::span<const EarlyWindow> windows, const Network& net,
                                         const CommunityAssignment& ca, const FeatureConfig& cfg) {
    std::vector<FeatureVector> out(windows.size());
    const auto count = static_cast<std::int64_t>(windows.size());
    std::exception_ptr failure;
#pragma omp parallel
    {
        FeatureWorkspace ws;
#pragma omp for schedule(dynamic, 8)
        for (std::int64_t i = 0; i < count; ++i) {
            const auto idx = static_cast<std::size_t>(i);
            try {
                out[idx] = extract_all(windows[idx], net, ca, cfg, ws);
            } catch (...) {
#pragma omp critical(memepred_feature_failure)
                if (!failure) failure = std::current_exception();
            }
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

} // namespace memepred
