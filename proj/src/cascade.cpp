#include "memepred/cascade.hpp"
#include "memepred/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <unordered_set>

namespace memepred {

const char* kind_token(EventKind kind) {
    switch (kind) {
    case EventKind::plain: return "T";
    case EventKind::retweet: return "RT";
    case EventKind::mention: return "AT";
    }
    return "?";
}

std::vector<std::string> Meme::adopters() const {
    std::vector<std::string> out;
    std::unordered_set<std::string_view> seen;
    for (const auto& e : events) {
        if (seen.insert(e.user).second) out.push_back(e.user);
    }
    return out;
}

std::size_t Meme::adopter_count() const {
    std::unordered_set<std::string_view> seen;
    for (const auto& e : events) seen.insert(e.user);
    return seen.size();
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        const auto tab = line.find('\t', start);
        if (tab == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

} // namespace

std::vector<Meme> parse_events(std::istream& in) {
    std::vector<Meme> memes;
    std::unordered_map<std::string, std::size_t> index;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;

        const auto fields = split_tabs(line);
        if (fields.size() < 4 || fields.size() > 5) {
            throw ParseError(line_no, "expected meme_id, timestamp, user, kind and optional target");
        }
        if (fields[0].empty()) throw ParseError(line_no, "empty meme id");
        if (fields[2].empty()) throw ParseError(line_no, "empty user");

        AdoptionEvent ev;
        const auto ts = fields[1];
        auto [ptr, ec] = std::from_chars(ts.data(), ts.data() + ts.size(), ev.timestamp);
        if (ec != std::errc() || ptr != ts.data() + ts.size()) {
            throw ParseError(line_no, "bad timestamp '" + std::string(ts) + "'");
        }
        ev.user = std::string(fields[2]);

        const auto kind = fields[3];
        if (kind == "T") ev.kind = EventKind::plain;
        else if (kind == "RT") ev.kind = EventKind::retweet;
        else if (kind == "AT") ev.kind = EventKind::mention;
        else throw ParseError(line_no, "unknown event kind '" + std::string(kind) + "'");

        const std::string_view target = fields.size() == 5 ? fields[4] : std::string_view{};
        if (ev.kind == EventKind::plain) {
            if (!target.empty()) throw ParseError(line_no, "plain tweet carries a target");
        } else {
            if (target.empty()) throw ParseError(line_no, std::string(kind) + " event without target");
            if (target == fields[2]) throw ParseError(line_no, "interaction target equals user");
            ev.target = std::string(target);
        }

        auto [it, inserted] = index.emplace(std::string(fields[0]), memes.size());
        if (inserted) memes.push_back(Meme{std::string(fields[0]), {}});
        memes[it->second].events.push_back(std::move(ev));
    }
    for (auto& m : memes) {
        std::stable_sort(m.events.begin(), m.events.end(),
                         [](const AdoptionEvent& a, const AdoptionEvent& b) { return a.timestamp < b.timestamp; });
    }
    return memes;
}

std::vector<Meme> parse_events_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open event file '" + path + "'");
    return parse_events(in);
}

void write_events(const std::vector<Meme>& memes, std::ostream& out) {
    for (const auto& m : memes) {
        for (const auto& e : m.events) {
            out << m.id << '\t' << e.timestamp << '\t' << e.user << '\t' << kind_token(e.kind) << '\t'
                << e.target << '\n';
        }
    }
}

EarlyWindow early_window(const Meme& meme, std::size_t n, const Network& net) {
    if (n == 0) throw DomainError("window length must be >= 1");
    if (meme.events.size() < n) {
        throw InsufficientEvents("meme '" + meme.id + "' has " + std::to_string(meme.events.size()) +
                                 " events, window needs " + std::to_string(n));
    }
    EarlyWindow w;
    w.meme_id = meme.id;
    w.n = n;
    w.authors.reserve(n);
    w.timestamps.reserve(n);
    w.kinds.reserve(n);
    w.targets.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& e = meme.events[i];
        const NodeId author = net.id_of(e.user);
        w.authors.push_back(author);
        w.timestamps.push_back(e.timestamp);
        w.kinds.push_back(e.kind);
        w.targets.push_back(e.kind == EventKind::plain ? std::nullopt : std::optional(net.id_of(e.target)));
        if (std::find(w.adopters.begin(), w.adopters.end(), author) == w.adopters.end()) {
            w.adopters.push_back(author);
        }
    }
    return w;
}

Network with_event_users(const Network& net, const std::vector<Meme>& memes) {
    bool missing = false;
    for (const auto& m : memes) {
        for (const auto& e : m.events) {
            if (!net.find(e.user) || (!e.target.empty() && !net.find(e.target))) {
                missing = true;
                break;
            }
        }
        if (missing) break;
    }
    if (!missing) return net;
    Network::Builder builder(net);
    for (const auto& m : memes) {
        for (const auto& e : m.events) {
            builder.intern(e.user);
            if (!e.target.empty()) builder.intern(e.target);
        }
    }
    return std::move(builder).build();
}

std::unordered_map<std::string, std::size_t> count_events_in(const std::vector<Meme>& memes,
                                                             const TimeRange& range) {
    std::unordered_map<std::string, std::size_t> counts;
    for (const auto& m : memes) {
        const auto c = static_cast<std::size_t>(std::count_if(
            m.events.begin(), m.events.end(), [&](const AdoptionEvent& e) { return range.contains(e.timestamp); }));
        if (c > 0) counts[m.id] = c;
    }
    return counts;
}

std::vector<Meme> drop_events_before(const std::vector<Meme>& memes, std::int64_t t) {
    std::vector<Meme> out;
    for (const auto& m : memes) {
        Meme kept{m.id, {}};
        for (const auto& e : m.events) {
            if (e.timestamp >= t) kept.events.push_back(e);
        }
        if (!kept.events.empty()) out.push_back(std::move(kept));
    }
    return out;
}

std::vector<Meme> filter_new_memes(const std::vector<Meme>& memes,
                                   const std::unordered_map<std::string, std::size_t>& history,
                                   std::size_t x_max, const TimeRange& inclusion) {
    std::vector<Meme> out;
    for (const auto& m : memes) {
        if (m.events.empty()) continue;
        const auto it = history.find(m.id);
        const std::size_t prior = it == history.end() ? 0 : it->second;
        if (prior < x_max && inclusion.contains(m.first_timestamp())) out.push_back(m);
    }
    return out;
}

InteractionSplit interaction_split(const EarlyWindow& w, const CommunityAssignment& ca, EventKind kind) {
    InteractionSplit split;
    if (kind == EventKind::plain) return split;
    for (std::size_t i = 0; i < w.n; ++i) {
        if (w.kinds[i] != kind || !w.targets[i]) continue;
        if (ca.share_community(w.authors[i], *w.targets[i])) ++split.intra;
        else ++split.inter;
    }
    return split;
}

std::vector<CommunityId> infected_communities(const EarlyWindow& w, const CommunityAssignment& ca) {
    std::vector<CommunityId> out;
    for (NodeId a : w.adopters) {
        for (CommunityId c : ca.communities_of(a)) out.push_back(c);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace memepred
