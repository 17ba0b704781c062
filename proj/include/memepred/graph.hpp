#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace memepred {

using NodeId = std::uint32_t;

// Hop count between two nodes, or Unreachable.
class Distance {
public:
    static Distance hops(std::uint32_t value) { return Distance(value); }
    static Distance unreachable() { return Distance(kUnreachable); }

    bool reachable() const noexcept { return value_ != kUnreachable; }
    // Throws DomainError when unreachable.
    std::uint32_t value() const;

    friend bool operator==(Distance, Distance) = default;

private:
    static constexpr std::uint32_t kUnreachable = UINT32_MAX;
    explicit Distance(std::uint32_t v) : value_(v) {}
    std::uint32_t value_;
};

/**
 * Immutable undirected simple graph in compressed adjacency form.
 *
 * Nodes are dense ids [0, node_count()); every id carries exactly one
 * external label. Neighbor lists are sorted ascending.
 */
class Network {
public:
    class Builder {
    public:
        Builder() = default;
        // Starts from an existing network (labels and edges).
        explicit Builder(const Network& base);

        // Returns the id for label, creating an isolated node on first sight.
        NodeId intern(std::string_view label);
        std::optional<NodeId> find(std::string_view label) const;

        // Duplicate edges are ignored; self-loops throw DomainError.
        void add_edge(NodeId u, NodeId v);

        std::size_t node_count() const noexcept { return labels_.size(); }

        Network build() &&;

    private:
        std::vector<std::string> labels_;
        std::unordered_map<std::string, NodeId> index_;
        std::vector<std::pair<NodeId, NodeId>> edges_;
    };

    Network() = default;

    std::size_t node_count() const noexcept { return labels_.size(); }
    std::size_t edge_count() const noexcept { return targets_.size() / 2; }

    std::span<const NodeId> neighbors(NodeId v) const {
        return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
    }
    std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }
    bool has_edge(NodeId u, NodeId v) const;

    const std::string& label(NodeId v) const { return labels_.at(v); }
    std::optional<NodeId> find(std::string_view label) const;
    // Throws DomainError for unknown labels.
    NodeId id_of(std::string_view label) const;

    // Throws DomainError unless v < node_count().
    void check_node(NodeId v) const;

private:
    std::vector<std::size_t> offsets_{0};
    std::vector<NodeId> targets_;
    std::vector<std::string> labels_;
    std::unordered_map<std::string, NodeId> index_;
};

// Edge list: two whitespace-separated labels per line, '#' comments.
// Node ids follow first-seen order. Throws ParseError on malformed lines
// and self-loops.
Network load_network(std::istream& in);
Network load_network_file(const std::string& path);
void write_edge_list(const Network& net, std::ostream& out);

// Reusable BFS buffers; one instance per thread.
class BfsScratch {
public:
    // Fills hops() for every node reachable from source (others stay -1).
    void run(const Network& net, NodeId source);
    // As run(), but stops expanding beyond max_depth hops.
    void run_bounded(const Network& net, NodeId source, std::uint32_t max_depth);

    std::int32_t hops(NodeId v) const { return dist_[v]; }

private:
    void reset(std::size_t n);

    std::vector<std::int32_t> dist_;
    std::vector<NodeId> touched_;
    std::vector<NodeId> queue_;
};

Distance shortest_path_length(const Network& net, NodeId u, NodeId v);

// Nodes within k hops of seeds, excluding the seeds themselves, ascending.
std::vector<NodeId> surface(const Network& net, std::span<const NodeId> seeds, int k);
std::size_t surface_size(const Network& net, std::span<const NodeId> seeds, int k);

struct PageRankOptions {
    double damping = 0.85;
    double tol = 1e-10;
    int max_iter = 200;
};

// Power iteration with uniform teleport; degree-0 nodes spread their mass
// uniformly. Throws ConvergenceError when the L1 change stays above tol.
std::vector<double> pagerank(const Network& net, const PageRankOptions& opts = {});
// Single-threaded reference for the OpenMP kernel above.
std::vector<double> pagerank_serial(const Network& net, const PageRankOptions& opts = {});

} // namespace memepred
