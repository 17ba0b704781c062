#include "memepred/community.hpp"
#include "memepred/errors.hpp"
#include "memepred/rng.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <unordered_map>

namespace memepred {

CommunityAssignment CommunityAssignment::from_memberships(std::size_t node_count,
                                                          const std::vector<std::vector<std::string>>& raw,
                                                          std::size_t min_size) {
    if (min_size < 1) throw DomainError("min_size must be >= 1");
    if (raw.size() != node_count) throw DomainError("membership table size differs from node count");

    // Distinct members per raw community name, in first-seen order.
    std::unordered_map<std::string, std::size_t> raw_index;
    std::vector<std::string> raw_names;
    std::vector<std::vector<NodeId>> raw_members;
    for (NodeId v = 0; v < node_count; ++v) {
        for (const auto& name : raw[v]) {
            auto [it, inserted] = raw_index.emplace(name, raw_names.size());
            if (inserted) {
                raw_names.push_back(name);
                raw_members.emplace_back();
            }
            auto& members = raw_members[it->second];
            if (members.empty() || members.back() != v) members.push_back(v);
        }
    }

    CommunityAssignment ca;
    std::vector<std::vector<CommunityId>> per_node(node_count);
    for (std::size_t r = 0; r < raw_names.size(); ++r) {
        if (raw_members[r].size() < min_size) continue;
        const auto id = static_cast<CommunityId>(ca.names_.size());
        ca.names_.push_back(raw_names[r]);
        ca.sizes_.push_back(raw_members[r].size());
        for (NodeId v : raw_members[r]) per_node[v].push_back(id);
    }
    ca.offsets_.assign(node_count + 1, 0);
    for (std::size_t v = 0; v < node_count; ++v) {
        auto& list = per_node[v];
        std::sort(list.begin(), list.end());
        ca.offsets_[v + 1] = ca.offsets_[v] + list.size();
        ca.members_.insert(ca.members_.end(), list.begin(), list.end());
    }
    return ca;
}

CommunityAssignment CommunityAssignment::padded(std::size_t node_count) const {
    if (node_count < this->node_count()) throw DomainError("cannot shrink a community assignment");
    CommunityAssignment out = *this;
    out.offsets_.resize(node_count + 1, out.offsets_.back());
    return out;
}

bool CommunityAssignment::share_community(NodeId a, NodeId b) const {
    auto ca = communities_of(a);
    auto cb = communities_of(b);
    // Both lists sorted; linear merge.
    auto i = ca.begin();
    auto j = cb.begin();
    while (i != ca.end() && j != cb.end()) {
        if (*i == *j) return true;
        if (*i < *j) ++i;
        else ++j;
    }
    return false;
}

double CommunityAssignment::coverage() const {
    const std::size_t n = node_count();
    if (n == 0) return 0.0;
    std::size_t covered = 0;
    for (NodeId v = 0; v < n; ++v) covered += assigned(v) ? 1 : 0;
    return static_cast<double>(covered) / static_cast<double>(n);
}

bool CommunityAssignment::is_disjoint() const {
    for (NodeId v = 0; v < node_count(); ++v) {
        if (offsets_[v + 1] - offsets_[v] > 1) return false;
    }
    return true;
}

CommunityAssignment load_assignments(std::istream& in, const Network& net, std::size_t min_size) {
    std::vector<std::vector<std::string>> raw(net.node_count());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 == line.size() ||
            line.find('\t', tab + 1) != std::string::npos) {
            throw ParseError(line_no, "expected node_label<TAB>community_id");
        }
        const auto label = std::string_view(line).substr(0, tab);
        const auto node = net.find(label);
        if (!node) throw ParseError(line_no, "unknown node label '" + std::string(label) + "'");
        raw[*node].push_back(line.substr(tab + 1));
    }
    auto ca = CommunityAssignment::from_memberships(net.node_count(), raw, min_size);
    if (ca.community_count() == 0) {
        warn("no community with at least " + std::to_string(min_size) + " members remains");
    }
    return ca;
}

CommunityAssignment load_assignments_file(const std::string& path, const Network& net, std::size_t min_size) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open community file '" + path + "'");
    return load_assignments(in, net, min_size);
}

void write_assignments(const CommunityAssignment& ca, const Network& net, std::ostream& out) {
    for (NodeId v = 0; v < ca.node_count(); ++v) {
        for (CommunityId c : ca.communities_of(v)) out << net.label(v) << '\t' << ca.name(c) << '\n';
    }
}

CommunityAssignment detect_label_propagation(const Network& net, std::uint64_t seed, int max_sweeps,
                                             std::size_t min_size, TieBreak tie_break) {
    const std::size_t n = net.node_count();
    std::vector<NodeId> label(n);
    std::iota(label.begin(), label.end(), NodeId{0});

    std::vector<NodeId> order(label);
    Rng rng(derive_seed(seed, "label-propagation"));
    std::vector<std::uint32_t> count(n, 0);
    std::vector<NodeId> seen;
    std::vector<NodeId> best_labels;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        for (std::size_t i = n; i > 1; --i) {
            std::swap(order[i - 1], order[rng.below(i)]);
        }
        bool changed = false;
        for (NodeId v : order) {
            auto nb = net.neighbors(v);
            if (nb.empty()) continue;
            seen.clear();
            std::uint32_t best = 0;
            for (NodeId u : nb) {
                if (count[label[u]]++ == 0) seen.push_back(label[u]);
                best = std::max(best, count[label[u]]);
            }
            NodeId chosen = label[v];
            if (count[label[v]] != best) {
                best_labels.clear();
                for (NodeId l : seen) {
                    if (count[l] == best) best_labels.push_back(l);
                }
                if (tie_break == TieBreak::lowest) {
                    chosen = *std::min_element(best_labels.begin(), best_labels.end());
                } else {
                    // seen follows neighbor order, which is fixed, so the draw is reproducible.
                    chosen = best_labels[rng.below(best_labels.size())];
                }
            }
            for (NodeId l : seen) count[l] = 0;
            if (chosen != label[v]) {
                label[v] = chosen;
                changed = true;
            }
        }
        if (!changed) break;
    }

    std::vector<std::vector<std::string>> raw(n);
    for (NodeId v = 0; v < n; ++v) raw[v].push_back("lp" + std::to_string(label[v]));
    return CommunityAssignment::from_memberships(n, raw, min_size);
}

} // namespace memepred
