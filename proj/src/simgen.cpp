#include "memepred/simgen.hpp"
#include "memepred/errors.hpp"
#include "memepred/rng.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

namespace memepred {

namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

} // namespace

void PlantedPartitionSpec::validate() const {
    if (communities == 0 || community_size == 0) throw DomainError("planted partition needs nodes");
    if (!is_probability(p_in) || !is_probability(p_out)) throw DomainError("edge probabilities must lie in [0, 1]");
    if (p_out > p_in) throw DomainError("p_out must not exceed p_in");
}

SyntheticNetwork generate_network(const PlantedPartitionSpec& spec) {
    spec.validate();
    const std::size_t n = spec.communities * spec.community_size;
    Rng rng(derive_seed(spec.seed, "planted-partition"));

    Network::Builder builder;
    for (std::size_t i = 0; i < n; ++i) builder.intern("u" + std::to_string(i));
    for (std::size_t i = 0; i < n; ++i) {
        const auto ci = i / spec.community_size;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double p = ci == j / spec.community_size ? spec.p_in : spec.p_out;
            if (rng.bernoulli(p)) builder.add_edge(static_cast<NodeId>(i), static_cast<NodeId>(j));
        }
    }
    SyntheticNetwork out;
    out.network = std::move(builder).build();

    std::vector<std::vector<std::string>> raw(n);
    for (std::size_t i = 0; i < n; ++i) raw[i].push_back("c" + std::to_string(i / spec.community_size));
    out.truth = CommunityAssignment::from_memberships(n, raw, 1);
    return out;
}

void CascadeSpec::validate() const {
    for (double p : {trap_bias_min, trap_bias_max, adopt_prob_min, adopt_prob_max, reinforcement, retweet_prob,
                     mention_prob, repeat_prob}) {
        if (!is_probability(p)) throw DomainError("cascade probabilities must lie in [0, 1]");
    }
    if (trap_bias_min > trap_bias_max) throw DomainError("trap_bias_min exceeds trap_bias_max");
    if (adopt_prob_min > adopt_prob_max) throw DomainError("adopt_prob_min exceeds adopt_prob_max");
    if (trap_bias_jitter < 0.0 || trap_bias_jitter > 1.0) throw DomainError("trap_bias_jitter must lie in [0, 1]");
    if (max_events < 1) throw DomainError("max_events must be >= 1");
    if (seed_adopters < 1) throw DomainError("seed_adopters must be >= 1");
    if (exposure_budget < 1) throw DomainError("exposure_budget must be >= 1");
    if (!(mean_inter_event_gap > 0.0)) throw DomainError("mean_inter_event_gap must be positive");
    if (start_spread < 0) throw DomainError("start_spread must be non-negative");
}

namespace {

Meme simulate_meme(const Network& net, const CommunityAssignment& ca, const CascadeSpec& spec, std::size_t index) {
    Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(index)));
    const std::size_t n = net.node_count();

    // Contagiousness quantile drives both adoption and trapping.
    const double q = rng.uniform();
    double adopt_prob = spec.adopt_prob_min;
    if (spec.adopt_prob_max > spec.adopt_prob_min) {
        if (spec.adopt_prob_min > 0.0) {
            adopt_prob = std::exp(std::log(spec.adopt_prob_min) +
                                  q * (std::log(spec.adopt_prob_max) - std::log(spec.adopt_prob_min)));
        } else {
            adopt_prob = q * spec.adopt_prob_max;
        }
    }
    double trap = spec.trap_bias_max - q * (spec.trap_bias_max - spec.trap_bias_min);
    if (spec.trap_bias_jitter > 0.0) trap += spec.trap_bias_jitter * (2.0 * rng.uniform() - 1.0);
    trap = std::clamp(trap, 0.0, 1.0);

    std::int64_t clock = spec.start_time;
    if (spec.start_spread > 0) clock += static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(spec.start_spread)));
    double elapsed = 0.0;

    Meme meme;
    meme.id = "m" + std::to_string(index);

    std::vector<std::uint8_t> adopted(n, 0);
    std::vector<std::uint32_t> exposures(n, 0);
    std::vector<std::uint32_t> budget(n, 0);
    std::vector<NodeId> active;

    const std::size_t seeds = std::min(spec.seed_adopters, n);
    while (active.size() < seeds) {
        const auto v = static_cast<NodeId>(rng.below(n));
        if (adopted[v]) continue;
        adopted[v] = 1;
        budget[v] = static_cast<std::uint32_t>(spec.exposure_budget);
        active.push_back(v);
        meme.events.push_back({clock, net.label(v), EventKind::plain, {}});
    }

    std::vector<NodeId> local;
    auto emit = [&](NodeId author, NodeId exposer) {
        elapsed += rng.exponential(spec.mean_inter_event_gap);
        AdoptionEvent ev{clock + static_cast<std::int64_t>(std::llround(elapsed)), net.label(author),
                         EventKind::plain, {}};
        if (rng.bernoulli(spec.retweet_prob)) {
            ev.kind = EventKind::retweet;
            ev.target = net.label(exposer);
        } else if (rng.bernoulli(spec.mention_prob)) {
            ev.kind = EventKind::mention;
            ev.target = net.label(exposer);
        }
        meme.events.push_back(std::move(ev));
    };

    while (!active.empty() && meme.events.size() < spec.max_events) {
        const auto slot = static_cast<std::size_t>(rng.below(active.size()));
        const NodeId u = active[slot];
        if (--budget[u] == 0) {
            active[slot] = active.back();
            active.pop_back();
        }
        const auto nb = net.neighbors(u);
        if (nb.empty()) continue;

        NodeId v = nb[rng.below(nb.size())];
        if (rng.bernoulli(trap)) {
            local.clear();
            for (NodeId w : nb) {
                if (ca.share_community(u, w)) local.push_back(w);
            }
            if (!local.empty()) v = local[rng.below(local.size())];
        }

        if (!adopted[v]) {
            const double p = std::min(1.0, adopt_prob + spec.reinforcement * exposures[v]);
            ++exposures[v];
            if (rng.bernoulli(p)) {
                adopted[v] = 1;
                budget[v] = static_cast<std::uint32_t>(spec.exposure_budget);
                active.push_back(v);
                emit(v, u);
            }
        } else if (spec.repeat_prob > 0.0 && rng.bernoulli(spec.repeat_prob)) {
            emit(v, u);
        }
    }
    return meme;
}

} // namespace

std::vector<Meme> generate_cascades_serial(const Network& net, const CommunityAssignment& ca,
                                           const CascadeSpec& spec) {
    spec.validate();
    if (net.node_count() == 0) throw DomainError("cannot simulate on an empty network");
    std::vector<Meme> memes;
    memes.reserve(spec.meme_count);
    for (std::size_t i = 0; i < spec.meme_count; ++i) memes.push_back(simulate_meme(net, ca, spec, i));
    return memes;
}

std::vector<Meme> generate_cascades(const Network& net, const CommunityAssignment& ca, const CascadeSpec& spec) {
    spec.validate();
    if (net.node_count() == 0) throw DomainError("cannot simulate on an empty network");
    std::vector<Meme> memes(spec.meme_count);
    const auto count = static_cast<std::int64_t>(spec.meme_count);
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t i = 0; i < count; ++i) {
        try {
            memes[static_cast<std::size_t>(i)] = simulate_meme(net, ca, spec, static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(memepred_sim_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return memes;
}

} // namespace memepred
