#pragma once

#include "memepred/graph.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace memepred {

using CommunityId = std::uint32_t;

/**
 * Node to community membership after the minimum-size filter.
 *
 * Retained communities get dense ids in order of first appearance; the
 * external name of each is kept for output. Memberships may overlap. Nodes
 * outside every retained community have an empty membership list.
 */
class CommunityAssignment {
public:
    CommunityAssignment() = default;

    // raw[v] lists the (external) community names of node v; communities
    // with fewer than min_size distinct members are dropped.
    static CommunityAssignment from_memberships(std::size_t node_count,
                                                const std::vector<std::vector<std::string>>& raw,
                                                std::size_t min_size);

    // Same memberships over node_count >= node_count() nodes; the extra
    // nodes are unassigned.
    CommunityAssignment padded(std::size_t node_count) const;

    std::size_t node_count() const noexcept { return offsets_.size() - 1; }
    std::size_t community_count() const noexcept { return names_.size(); }

    std::span<const CommunityId> communities_of(NodeId v) const {
        return {members_.data() + offsets_[v], members_.data() + offsets_[v + 1]};
    }
    bool assigned(NodeId v) const { return offsets_[v + 1] > offsets_[v]; }
    bool share_community(NodeId a, NodeId b) const;

    std::size_t community_size(CommunityId c) const { return sizes_.at(c); }
    const std::string& name(CommunityId c) const { return names_.at(c); }

    // Fraction of nodes with at least one retained community.
    double coverage() const;
    bool is_disjoint() const;

private:
    std::vector<std::size_t> offsets_{0};
    std::vector<CommunityId> members_; // sorted per node
    std::vector<std::size_t> sizes_;
    std::vector<std::string> names_;
};

// Lines "node_label<TAB>community_id"; repeated nodes mean overlap.
// Unknown labels throw ParseError; an empty filtered result only warns.
CommunityAssignment load_assignments(std::istream& in, const Network& net, std::size_t min_size = 3);
CommunityAssignment load_assignments_file(const std::string& path, const Network& net,
                                          std::size_t min_size = 3);
void write_assignments(const CommunityAssignment& ca, const Network& net, std::ostream& out);

enum class TieBreak {
    random, // seeded uniform choice among the most frequent labels
    lowest, // smallest label id
};

// Asynchronous label propagation. Each sweep visits nodes in a seeded random
// order; a node keeps its label when it is among the most frequent neighbor
// labels, otherwise takes one of them according to tie_break. Stops when a
// sweep changes nothing or after max_sweeps. Deterministic given the seed.
CommunityAssignment detect_label_propagation(const Network& net, std::uint64_t seed,
                                             int max_sweeps = 100, std::size_t min_size = 3,
                                             TieBreak tie_break = TieBreak::random);

} // namespace memepred
