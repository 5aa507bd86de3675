#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "carecoord/domain.hpp"

namespace carecoord {

enum class AlertSeverity { notify_user, notify_caregiver };

std::string to_string(AlertSeverity s);

struct Alert {
    std::string user_id;
    int day = 0;
    double predicted = 0.0;
    double observed = 0.0;
    double deviation = 0.0;
    AlertSeverity severity = AlertSeverity::notify_user;
    std::string source; // detector that fired: "gru", "rolling", "threshold"
};

enum class ProposalKind { meal, reminder, note };

std::string to_string(ProposalKind k);

struct Proposal {
    std::string id;
    std::string producer; // agent id
    ProposalKind kind = ProposalKind::meal;
    std::string subject;  // meal_id for meals, modality name for reminders
    double glycemic_index = 0.0;
    std::optional<Modality> modality;
    double preference_fit = 0.0; // [0, 1]
    double nudge_value = 0.0;    // [0, 1]
    std::vector<Violation> hard_violations; // computed upstream, P0 input
};

struct OutcomeInfo {
    std::string slot;
    std::string action;
    std::string outcome;
    int reward = 0;
};

struct DecisionRef {
    std::uint64_t decision_id = 0;
    std::string chosen_subject;
};

// Veto markers posted on the board: hyperglycemia guard, unusable modality.
struct GuardInfo {
    std::string guard;
    std::optional<Modality> modality;
    double level = 0.0;
};

using Payload =
    std::variant<PhysiologicalSample, Proposal, OutcomeInfo, Alert, DecisionRef, GuardInfo>;

std::string payload_kind(const Payload& p);
ojson payload_to_json(const Payload& p);

struct Event {
    std::uint64_t tick = 0;
    std::string topic;    // dotted path, e.g. "sensor.glucose"
    std::string producer; // agent id
    Payload payload;
};

enum class EntryTier { P0_medical, P1_preference, P2_nudge };
enum class EntryKind { observation, proposal, veto, alert };

std::string to_string(EntryTier t);
std::string to_string(EntryKind k);

struct BlackboardEntry {
    std::uint64_t entry_id = 0;
    EntryTier tier = EntryTier::P2_nudge;
    EntryKind kind = EntryKind::observation;
    Payload body;
    std::uint64_t valid_from = 0;
    std::uint64_t valid_to = 0; // inclusive
    std::string producer;
};

// Event bus and blackboard in one store: the per-topic event log is the
// delivery view, the entry list is the shared-knowledge view. Single
// writer per tick; the whole store is value-semantic so independent
// runs can live on separate threads.
class Blackboard {
public:
    using Callback = std::function<void(const Event&)>;

    // Subscribes to every topic starting with `pattern`. Delivery order
    // is registration order.
    void subscribe(const std::string& pattern, const std::string& subscriber, Callback cb);

    // Appends to the per-topic log and synchronously delivers to all
    // matching subscriptions. Returns the delivery count. Throws
    // std::invalid_argument if the event's tick precedes the last tick
    // already published on the same topic.
    std::size_t publish(const Event& event);

    std::uint64_t post_entry(EntryTier tier, EntryKind kind, Payload body,
                             std::uint64_t valid_from, std::uint64_t valid_to,
                             const std::string& producer);

    std::vector<const BlackboardEntry*> query_entries(std::optional<EntryTier> tier,
                                                      std::optional<EntryKind> kind,
                                                      std::uint64_t at_tick) const;

    // First active veto entry carrying GuardInfo with this guard name.
    const BlackboardEntry* active_guard(const std::string& guard_name,
                                        std::uint64_t at_tick) const;

    const std::vector<Event>& topic_log(const std::string& topic) const;
    const std::vector<Event>& all_events() const { return events_; }
    const std::vector<BlackboardEntry>& entries() const { return entries_; }

    void export_jsonl(std::ostream& os) const;

private:
    struct Subscription {
        std::string pattern;
        std::string subscriber;
        Callback callback;
    };

    std::vector<Subscription> subscriptions_;
    std::vector<Event> events_;
    std::map<std::string, std::vector<Event>> per_topic_;
    std::vector<BlackboardEntry> entries_;
    std::uint64_t next_entry_id_ = 0;
};

ojson event_to_json(const Event& e);
ojson entry_to_json(const BlackboardEntry& e);

} // namespace carecoord
