#pragma once

#include "memepred/community.hpp"
#include "memepred/graph.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace memepred {

enum class EventKind : std::uint8_t { plain, retweet, mention };

// File tokens: T, RT, AT.
const char* kind_token(EventKind kind);

struct AdoptionEvent {
    std::int64_t timestamp = 0; // seconds
    std::string user;
    EventKind kind = EventKind::plain;
    std::string target; // empty for plain events
};

// All tweets of one hashtag, sorted by timestamp (input order on ties).
struct Meme {
    std::string id;
    std::vector<AdoptionEvent> events;

    std::size_t tweet_count() const noexcept { return events.size(); }
    // Distinct users in order of first appearance.
    std::vector<std::string> adopters() const;
    std::size_t adopter_count() const;
    std::int64_t first_timestamp() const { return events.front().timestamp; }
};

// First n events of a meme resolved against a network.
struct EarlyWindow {
    std::string meme_id;
    std::size_t n = 0;
    std::vector<NodeId> authors;              // one per event
    std::vector<std::int64_t> timestamps;     // one per event
    std::vector<EventKind> kinds;             // one per event
    std::vector<std::optional<NodeId>> targets;
    std::vector<NodeId> adopters;             // distinct authors, first-appearance order
};

// Lines "meme_id<TAB>timestamp<TAB>user<TAB>kind<TAB>[target]". Memes are
// returned in order of first appearance in the file. Throws ParseError.
std::vector<Meme> parse_events(std::istream& in);
std::vector<Meme> parse_events_file(const std::string& path);
// Writes memes back in the same format, one meme after another.
void write_events(const std::vector<Meme>& memes, std::ostream& out);

// Throws InsufficientEvents when the meme has fewer than n events and
// DomainError when a user or target label is unknown to net.
EarlyWindow early_window(const Meme& meme, std::size_t n, const Network& net);

// Copy of net plus an isolated node for every user or target in memes that
// net does not know.
Network with_event_users(const Network& net, const std::vector<Meme>& memes);

struct TimeRange {
    std::int64_t begin = INT64_MIN; // inclusive
    std::int64_t end = INT64_MAX;   // exclusive
    bool contains(std::int64_t t) const { return t >= begin && t < end; }
};

// Per-meme number of events inside range.
std::unordered_map<std::string, std::size_t> count_events_in(const std::vector<Meme>& memes,
                                                             const TimeRange& range);
// Drops events before t (memes left empty are dropped).
std::vector<Meme> drop_events_before(const std::vector<Meme>& memes, std::int64_t t);

// Keeps memes whose prior count is below x_max (absent counts as 0) and
// whose first event lies inside the inclusion range.
std::vector<Meme> filter_new_memes(const std::vector<Meme>& memes,
                                   const std::unordered_map<std::string, std::size_t>& history,
                                   std::size_t x_max, const TimeRange& inclusion = {});

struct InteractionSplit {
    std::size_t intra = 0;
    std::size_t inter = 0;
    std::size_t total() const { return intra + inter; }
};

// Retweets or mentions in the window; intra iff both endpoints share a
// retained community (unassigned endpoints count as inter).
InteractionSplit interaction_split(const EarlyWindow& w, const CommunityAssignment& ca, EventKind kind);

// Communities with at least one event in the window, ascending.
std::vector<CommunityId> infected_communities(const EarlyWindow& w, const CommunityAssignment& ca);

} // namespace memepred
