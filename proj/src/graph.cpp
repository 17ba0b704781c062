#include "memepred/graph.hpp"
#include "memepred/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace memepred {

std::uint32_t Distance::value() const {
    if (!reachable()) throw DomainError("distance is unreachable");
    return value_;
}

Network::Builder::Builder(const Network& base) : labels_(base.labels_), index_(base.index_) {
    for (NodeId u = 0; u < base.node_count(); ++u) {
        for (NodeId v : base.neighbors(u)) {
            if (u < v) edges_.emplace_back(u, v);
        }
    }
}

NodeId Network::Builder::intern(std::string_view label) {
    auto it = index_.find(std::string(label));
    if (it != index_.end()) return it->second;
    const auto id = static_cast<NodeId>(labels_.size());
    labels_.emplace_back(label);
    index_.emplace(labels_.back(), id);
    return id;
}

std::optional<NodeId> Network::Builder::find(std::string_view label) const {
    auto it = index_.find(std::string(label));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

void Network::Builder::add_edge(NodeId u, NodeId v) {
    if (u == v) throw DomainError("self-loop on node " + std::to_string(u));
    if (u >= labels_.size() || v >= labels_.size()) throw DomainError("edge endpoint out of range");
    edges_.emplace_back(std::min(u, v), std::max(u, v));
}

Network Network::Builder::build() && {
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());

    Network net;
    const std::size_t n = labels_.size();
    std::vector<std::size_t> degree(n, 0);
    for (auto [u, v] : edges_) {
        ++degree[u];
        ++degree[v];
    }
    net.offsets_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) net.offsets_[i + 1] = net.offsets_[i] + degree[i];
    net.targets_.resize(net.offsets_[n]);
    std::vector<std::size_t> cursor(net.offsets_.begin(), net.offsets_.end() - 1);
    for (auto [u, v] : edges_) {
        net.targets_[cursor[u]++] = v;
        net.targets_[cursor[v]++] = u;
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::sort(net.targets_.begin() + static_cast<std::ptrdiff_t>(net.offsets_[i]),
                  net.targets_.begin() + static_cast<std::ptrdiff_t>(net.offsets_[i + 1]));
    }
    net.labels_ = std::move(labels_);
    net.index_ = std::move(index_);
    edges_.clear();
    return net;
}

bool Network::has_edge(NodeId u, NodeId v) const {
    check_node(u);
    check_node(v);
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
}

std::optional<NodeId> Network::find(std::string_view label) const {
    auto it = index_.find(std::string(label));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

NodeId Network::id_of(std::string_view label) const {
    if (auto id = find(label)) return *id;
    throw DomainError("unknown node label '" + std::string(label) + "'");
}

void Network::check_node(NodeId v) const {
    if (v >= node_count()) {
        throw DomainError("node id " + std::to_string(v) + " out of range [0, " +
                          std::to_string(node_count()) + ")");
    }
}

Network load_network(std::istream& in) {
    Network::Builder builder;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;

        std::istringstream fields(line);
        std::string a, b, extra;
        if (!(fields >> a >> b) || (fields >> extra)) {
            throw ParseError(line_no, "expected two node labels");
        }
        if (a == b) throw ParseError(line_no, "self-loop on '" + a + "'");
        const NodeId u = builder.intern(a);
        const NodeId v = builder.intern(b);
        builder.add_edge(u, v);
    }
    return std::move(builder).build();
}

Network load_network_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open edge list '" + path + "'");
    return load_network(in);
}

void write_edge_list(const Network& net, std::ostream& out) {
    for (NodeId u = 0; u < net.node_count(); ++u) {
        for (NodeId v : net.neighbors(u)) {
            if (u < v) out << net.label(u) << '\t' << net.label(v) << '\n';
        }
    }
}

void BfsScratch::reset(std::size_t n) {
    if (dist_.size() != n) {
        dist_.assign(n, -1);
        touched_.clear();
        return;
    }
    for (NodeId v : touched_) dist_[v] = -1;
    touched_.clear();
}

void BfsScratch::run(const Network& net, NodeId source) {
    run_bounded(net, source, UINT32_MAX);
}

void BfsScratch::run_bounded(const Network& net, NodeId source, std::uint32_t max_depth) {
    net.check_node(source);
    reset(net.node_count());
    queue_.clear();
    dist_[source] = 0;
    touched_.push_back(source);
    queue_.push_back(source);
    for (std::size_t head = 0; head < queue_.size(); ++head) {
        const NodeId u = queue_[head];
        const auto du = static_cast<std::uint32_t>(dist_[u]);
        if (du >= max_depth) continue;
        for (NodeId w : net.neighbors(u)) {
            if (dist_[w] >= 0) continue;
            dist_[w] = static_cast<std::int32_t>(du + 1);
            touched_.push_back(w);
            queue_.push_back(w);
        }
    }
}

Distance shortest_path_length(const Network& net, NodeId u, NodeId v) {
    net.check_node(u);
    net.check_node(v);
    if (u == v) return Distance::hops(0);
    BfsScratch bfs;
    bfs.run(net, u);
    const auto d = bfs.hops(v);
    return d < 0 ? Distance::unreachable() : Distance::hops(static_cast<std::uint32_t>(d));
}

namespace {

// Multi-source BFS to depth k; returns the hop map (-1 = beyond k).
std::vector<std::int32_t> multi_source_hops(const Network& net, std::span<const NodeId> seeds, int k) {
    if (k < 1) throw DomainError("surface order must be >= 1");
    std::vector<std::int32_t> dist(net.node_count(), -1);
    std::vector<NodeId> frontier;
    for (NodeId s : seeds) {
        net.check_node(s);
        if (dist[s] < 0) {
            dist[s] = 0;
            frontier.push_back(s);
        }
    }
    std::vector<NodeId> next;
    for (int depth = 1; depth <= k && !frontier.empty(); ++depth) {
        next.clear();
        for (NodeId u : frontier) {
            for (NodeId w : net.neighbors(u)) {
                if (dist[w] < 0) {
                    dist[w] = depth;
                    next.push_back(w);
                }
            }
        }
        frontier.swap(next);
    }
    return dist;
}

} // namespace

std::vector<NodeId> surface(const Network& net, std::span<const NodeId> seeds, int k) {
    const auto dist = multi_source_hops(net, seeds, k);
    std::vector<NodeId> out;
    for (NodeId v = 0; v < net.node_count(); ++v) {
        if (dist[v] > 0) out.push_back(v);
    }
    return out;
}

std::size_t surface_size(const Network& net, std::span<const NodeId> seeds, int k) {
    const auto dist = multi_source_hops(net, seeds, k);
    return static_cast<std::size_t>(std::count_if(dist.begin(), dist.end(), [](auto d) { return d > 0; }));
}

namespace {

void check_pagerank_options(const PageRankOptions& opts) {
    if (!(opts.damping > 0.0 && opts.damping < 1.0)) throw DomainError("damping must lie in (0, 1)");
    if (!(opts.tol > 0.0)) throw DomainError("tolerance must be positive");
    if (opts.max_iter < 1) throw DomainError("max_iter must be >= 1");
}

} // namespace

std::vector<double> pagerank_serial(const Network& net, const PageRankOptions& opts) {
    check_pagerank_options(opts);
    const std::size_t n = net.node_count();
    if (n == 0) return {};
    const double inv_n = 1.0 / static_cast<double>(n);
    std::vector<double> rank(n, inv_n), next(n), share(n);
    double residual = 0.0;
    for (int iter = 0; iter < opts.max_iter; ++iter) {
        double dangling = 0.0;
        for (NodeId v = 0; v < n; ++v) {
            const auto deg = net.degree(v);
            if (deg == 0) {
                dangling += rank[v];
                share[v] = 0.0;
            } else {
                share[v] = rank[v] / static_cast<double>(deg);
            }
        }
        const double base = (1.0 - opts.damping) * inv_n + opts.damping * dangling * inv_n;
        residual = 0.0;
        for (NodeId v = 0; v < n; ++v) {
            double sum = 0.0;
            for (NodeId u : net.neighbors(v)) sum += share[u];
            next[v] = base + opts.damping * sum;
            residual += std::abs(next[v] - rank[v]);
        }
        rank.swap(next);
        if (residual < opts.tol) return rank;
    }
    throw ConvergenceError("pagerank did not converge within " + std::to_string(opts.max_iter) +
                               " iterations",
                           residual);
}

std::vector<double> pagerank(const Network& net, const PageRankOptions& opts) {
    check_pagerank_options(opts);
    const auto n = static_cast<std::int64_t>(net.node_count());
    if (n == 0) return {};
    const double inv_n = 1.0 / static_cast<double>(n);
    std::vector<double> rank(static_cast<std::size_t>(n), inv_n), next(rank.size()), share(rank.size());
    double residual = 0.0;
    for (int iter = 0; iter < opts.max_iter; ++iter) {
        double dangling = 0.0;
#pragma omp parallel for reduction(+ : dangling) schedule(static)
        for (std::int64_t v = 0; v < n; ++v) {
            const auto id = static_cast<NodeId>(v);
            const auto deg = net.degree(id);
            if (deg == 0) {
                dangling += rank[id];
                share[id] = 0.0;
            } else {
                share[id] = rank[id] / static_cast<double>(deg);
            }
        }
        const double base = (1.0 - opts.damping) * inv_n + opts.damping * dangling * inv_n;
        residual = 0.0;
#pragma omp parallel for reduction(+ : residual) schedule(dynamic, 256)
        for (std::int64_t v = 0; v < n; ++v) {
            const auto id = static_cast<NodeId>(v);
            double sum = 0.0;
            for (NodeId u : net.neighbors(id)) sum += share[u];
            next[id] = base + opts.damping * sum;
            residual += std::abs(next[id] - rank[id]);
        }
        rank.swap(next);
        if (residual < opts.tol) return rank;
    }
    throw ConvergenceError("pagerank did not converge within " + std::to_string(opts.max_iter) +
                               " iterations",
                           residual);
}

} // namespace memepred
