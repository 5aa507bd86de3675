#include "carecoord/bus.hpp"

#include <ostream>
#include <stdexcept>

namespace carecoord {

std::string to_string(AlertSeverity s) {
    return s == AlertSeverity::notify_caregiver ? "notify_caregiver" : "notify_user";
}

std::string to_string(ProposalKind k) {
    switch (k) {
    case ProposalKind::meal: return "meal";
    case ProposalKind::reminder: return "reminder";
    case ProposalKind::note: return "note";
    }
    return "note";
}

std::string to_string(EntryTier t) {
    switch (t) {
    case EntryTier::P0_medical: return "P0_medical";
    case EntryTier::P1_preference: return "P1_preference";
    case EntryTier::P2_nudge: return "P2_nudge";
    }
    return "P2_nudge";
}

std::string to_string(EntryKind k) {
    switch (k) {
    case EntryKind::observation: return "observation";
    case EntryKind::proposal: return "proposal";
    case EntryKind::veto: return "veto";
    case EntryKind::alert: return "alert";
    }
    return "observation";
}

std::string payload_kind(const Payload& p) {
    struct Visitor {
        std::string operator()(const PhysiologicalSample&) const { return "sample"; }
        std::string operator()(const Proposal&) const { return "proposal"; }
        std::string operator()(const OutcomeInfo&) const { return "outcome"; }
        std::string operator()(const Alert&) const { return "alert"; }
        std::string operator()(const DecisionRef&) const { return "decision"; }
        std::string operator()(const GuardInfo&) const { return "guard"; }
    };
    return std::visit(Visitor{}, p);
}

namespace {

ojson sample_to_json(const PhysiologicalSample& s) {
    ojson j;
    j["t"] = s.t;
    j["glucose"] = s.glucose;
    j["heart_rate"] = s.heart_rate;
    j["hydration"] = s.hydration;
    j["steps"] = s.steps;
    return j;
}

ojson proposal_to_json(const Proposal& p) {
    ojson j;
    j["id"] = p.id;
    j["producer"] = p.producer;
    j["kind"] = to_string(p.kind);
    j["subject"] = p.subject;
    j["glycemic_index"] = p.glycemic_index;
    if (p.modality) j["modality"] = to_string(*p.modality);
    j["preference_fit"] = p.preference_fit;
    j["nudge_value"] = p.nudge_value;
    ojson viols = ojson::array();
    for (const auto& v : p.hard_violations) viols.push_back(v.rule_name());
    j["hard_violations"] = viols;
    return j;
}

ojson outcome_to_json(const OutcomeInfo& o) {
    ojson j;
    j["slot"] = o.slot;
    j["action"] = o.action;
    j["outcome"] = o.outcome;
    j["reward"] = o.reward;
    return j;
}

ojson alert_to_json(const Alert& a) {
    ojson j;
    j["user_id"] = a.user_id;
    j["day"] = a.day;
    j["predicted"] = a.predicted;
    j["observed"] = a.observed;
    j["deviation"] = a.deviation;
    j["severity"] = to_string(a.severity);
    j["source"] = a.source;
    return j;
}

ojson decision_to_json(const DecisionRef& d) {
    ojson j;
    j["decision_id"] = d.decision_id;
    j["chosen_subject"] = d.chosen_subject;
    return j;
}

ojson guard_to_json(const GuardInfo& g) {
    ojson j;
    j["guard"] = g.guard;
    if (g.modality) j["modality"] = to_string(*g.modality);
    j["level"] = g.level;
    return j;
}

} // namespace

ojson payload_to_json(const Payload& p) {
    struct Visitor {
        ojson operator()(const PhysiologicalSample& s) const { return sample_to_json(s); }
        ojson operator()(const Proposal& v) const { return proposal_to_json(v); }
        ojson operator()(const OutcomeInfo& v) const { return outcome_to_json(v); }
        ojson operator()(const Alert& v) const { return alert_to_json(v); }
        ojson operator()(const DecisionRef& v) const { return decision_to_json(v); }
        ojson operator()(const GuardInfo& v) const { return guard_to_json(v); }
    };
    return std::visit(Visitor{}, p);
}

void Blackboard::subscribe(const std::string& pattern, const std::string& subscriber,
                           Callback cb) {
    subscriptions_.push_back(Subscription{pattern, subscriber, std::move(cb)});
}

std::size_t Blackboard::publish(const Event& event) {
    auto& log = per_topic_[event.topic];
    if (!log.empty() && event.tick < log.back().tick) {
        throw std::invalid_argument("publish: tick " + std::to_string(event.tick) +
                                    " precedes topic '" + event.topic + "' head " +
                                    std::to_string(log.back().tick));
    }
    log.push_back(event);
    events_.push_back(event);
    std::size_t delivered = 0;
    for (const auto& sub : subscriptions_) {
        if (event.topic.compare(0, sub.pattern.size(), sub.pattern) == 0) {
            sub.callback(event);
            ++delivered;
        }
    }
    return delivered;
}

std::uint64_t Blackboard::post_entry(EntryTier tier, EntryKind kind, Payload body,
                                     std::uint64_t valid_from, std::uint64_t valid_to,
                                     const std::string& producer) {
    if (valid_to < valid_from) {
        throw std::invalid_argument("post_entry: valid_to precedes valid_from");
    }
    BlackboardEntry e;
    e.entry_id = next_entry_id_++;
    e.tier = tier;
    e.kind = kind;
    e.body = std::move(body);
    e.valid_from = valid_from;
    e.valid_to = valid_to;
    e.producer = producer;
    entries_.push_back(std::move(e));
    return entries_.back().entry_id;
}

std::vector<const BlackboardEntry*> Blackboard::query_entries(std::optional<EntryTier> tier,
                                                              std::optional<EntryKind> kind,
                                                              std::uint64_t at_tick) const {
    std::vector<const BlackboardEntry*> out;
    for (const auto& e : entries_) {
        if (at_tick < e.valid_from || at_tick > e.valid_to) continue;
        if (tier && e.tier != *tier) continue;
        if (kind && e.kind != *kind) continue;
        out.push_back(&e);
    }
    return out; // entries_ is id-ordered already
}

const BlackboardEntry* Blackboard::active_guard(const std::string& guard_name,
                                                std::uint64_t at_tick) const {
    for (const auto& e : entries_) {
        if (e.kind != EntryKind::veto) continue;
        if (at_tick < e.valid_from || at_tick > e.valid_to) continue;
        const auto* g = std::get_if<GuardInfo>(&e.body);
        if (g && g->guard == guard_name) return &e;
    }
    return nullptr;
}

const std::vector<Event>& Blackboard::topic_log(const std::string& topic) const {
    static const std::vector<Event> empty;
    auto it = per_topic_.find(topic);
    return it == per_topic_.end() ? empty : it->second;
}

ojson event_to_json(const Event& e) {
    ojson j;
    j["record"] = "event";
    j["tick"] = e.tick;
    j["topic"] = e.topic;
    j["producer"] = e.producer;
    j["payload_kind"] = payload_kind(e.payload);
    j["payload"] = payload_to_json(e.payload);
    return j;
}

ojson entry_to_json(const BlackboardEntry& e) {
    ojson j;
    j["record"] = "entry";
    j["entry_id"] = e.entry_id;
    j["tier"] = to_string(e.tier);
    j["kind"] = to_string(e.kind);
    j["valid_from"] = e.valid_from;
    j["valid_to"] = e.valid_to;
    j["producer"] = e.producer;
    j["body_kind"] = payload_kind(e.body);
    j["body"] = payload_to_json(e.body);
    return j;
}

void Blackboard::export_jsonl(std::ostream& os) const {
    for (const auto& e : events_) os << event_to_json(e).dump() << '\n';
    for (const auto& e : entries_) os << entry_to_json(e).dump() << '\n';
}

} // namespace carecoord
