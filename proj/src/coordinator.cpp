#include "carecoord/coordinator.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <stdexcept>

namespace carecoord {

namespace {

std::string fmt4(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

P0Rule hard_constraint_rule() {
    return P0Rule{"hard_constraint_violation",
                  [](const Proposal& p, const Blackboard&, std::uint64_t)
                      -> std::optional<std::vector<std::uint64_t>> {
                      if (p.hard_violations.empty()) return std::nullopt;
                      return std::vector<std::uint64_t>{};
                  }};
}

P0Rule gi_guard_rule(double gi_max) {
    return P0Rule{"gi_guard",
                  [gi_max](const Proposal& p, const Blackboard& board, std::uint64_t tick)
                      -> std::optional<std::vector<std::uint64_t>> {
                      if (p.kind != ProposalKind::meal) return std::nullopt;
                      if (p.glycemic_index <= gi_max) return std::nullopt;
                      const auto* guard =
                          board.active_guard(Coordinator::kHyperglycemiaGuard, tick);
                      if (!guard) return std::nullopt;
                      return std::vector<std::uint64_t>{guard->entry_id};
                  }};
}

P0Rule modality_rule() {
    return P0Rule{"modality_unusable",
                  [](const Proposal& p, const Blackboard& board, std::uint64_t tick)
                      -> std::optional<std::vector<std::uint64_t>> {
                      if (!p.modality) return std::nullopt;
                      for (const auto& e : board.entries()) {
                          if (e.kind != EntryKind::veto) continue;
                          if (tick < e.valid_from || tick > e.valid_to) continue;
                          const auto* g = std::get_if<GuardInfo>(&e.body);
                          if (g && g->guard == Coordinator::kModalityGuard && g->modality &&
                              *g->modality == *p.modality) {
                              return std::vector<std::uint64_t>{e.entry_id};
                          }
                      }
                      return std::nullopt;
                  }};
}

} // namespace

Coordinator::Coordinator(ArbitrationWeights weights, double gi_max)
    : weights_(weights), gi_max_(gi_max) {
    rules_.push_back(hard_constraint_rule());
    rules_.push_back(gi_guard_rule(gi_max_));
    rules_.push_back(modality_rule());
}

void Coordinator::register_p0_rule(P0Rule rule) { rules_.push_back(std::move(rule)); }

Decision Coordinator::arbitrate(const std::vector<Proposal>& proposals,
                                const Blackboard& board, std::uint64_t tick) {
    if (proposals.empty()) {
        throw std::invalid_argument("arbitrate: empty proposal set");
    }

    Decision d;
    d.decision_id = next_decision_id_++;
    d.tick = tick;

    std::vector<const Proposal*> survivors;
    for (const auto& p : proposals) {
        bool vetoed = false;
        for (const auto& rule : rules_) {
            auto hit = rule.check(p, board, tick);
            if (hit) {
                d.vetoes.push_back(VetoRecord{p.id, p.subject, rule.name, std::move(*hit)});
                vetoed = true;
                break;
            }
        }
        if (!vetoed) survivors.push_back(&p);
    }

    std::set<std::string> rules_seen;
    std::set<std::uint64_t> triggers;
    std::vector<std::string> rule_order;
    for (const auto& v : d.vetoes) {
        if (rules_seen.insert(v.rule).second) rule_order.push_back(v.rule);
        triggers.insert(v.triggering_entries.begin(), v.triggering_entries.end());
    }

    std::string veto_text;
    for (const auto& v : d.vetoes) {
        if (!veto_text.empty()) veto_text += ", ";
        veto_text += v.subject + " (" + v.rule;
        if (!v.triggering_entries.empty()) {
            veto_text += v.triggering_entries.size() == 1 ? ": entry" : ": entries";
            for (std::size_t i = 0; i < v.triggering_entries.size(); ++i) {
                veto_text += (i ? "," : " ") + std::to_string(v.triggering_entries[i]);
            }
        }
        veto_text += ")";
    }

    if (survivors.empty()) {
        d.kind = DecisionKind::all_vetoed;
        std::set<std::string> masked;
        for (const auto& v : d.vetoes) masked.insert(v.subject);
        d.masked_subjects.assign(masked.begin(), masked.end());
        std::string mask_text;
        for (const auto& s : d.masked_subjects) {
            if (!mask_text.empty()) mask_text += ", ";
            mask_text += s;
        }
        d.explanation.agent = "coordinator";
        d.explanation.text = "All " + std::to_string(proposals.size()) +
                             " proposal(s) vetoed: " + veto_text +
                             ". Re-proposal requested excluding [" + mask_text + "].";
    } else {
        const Proposal* best = survivors.front();
        double best_score =
            weights_.w_pref * best->preference_fit + weights_.w_nudge * best->nudge_value;
        for (std::size_t i = 1; i < survivors.size(); ++i) {
            const Proposal* cand = survivors[i];
            double score = weights_.w_pref * cand->preference_fit +
                           weights_.w_nudge * cand->nudge_value;
            if (score > best_score ||
                (score == best_score &&
                 std::tie(cand->producer, cand->id) < std::tie(best->producer, best->id))) {
                best = cand;
                best_score = score;
            }
        }
        d.kind = DecisionKind::accepted;
        d.chosen = *best;
        d.chosen_score = best_score;
        rule_order.push_back("score_rank");
        d.explanation.agent = best->producer;
        d.explanation.text = "Chose '" + best->subject + "' from " + best->producer +
                             ": score " + fmt4(best_score) + " = " + fmt4(weights_.w_pref) +
                             "*fit(" + fmt4(best->preference_fit) + ") + " +
                             fmt4(weights_.w_nudge) + "*nudge(" + fmt4(best->nudge_value) +
                             ").";
        if (!veto_text.empty()) {
            d.explanation.text += " Vetoed: " + veto_text + ".";
        } else {
            d.explanation.text += " Accepted: no higher-priority constraint applied.";
        }
    }

    d.explanation.decision_id = d.decision_id;
    d.explanation.triggering_entries.assign(triggers.begin(), triggers.end());
    d.explanation.rules_applied = std::move(rule_order);

    decisions_.push_back(d);
    return d;
}

std::optional<std::uint64_t> Coordinator::observe_glucose(const PhysiologicalSample& sample,
                                                          Blackboard& board,
                                                          std::uint64_t tick) {
    if (sample.glucose <= kGlucoseVetoThreshold) return std::nullopt;
    if (const auto* active = board.active_guard(kHyperglycemiaGuard, tick)) {
        return active->entry_id; // guard already up, do not stack
    }
    GuardInfo g;
    g.guard = kHyperglycemiaGuard;
    g.level = sample.glucose;
    return board.post_entry(EntryTier::P0_medical, EntryKind::veto, g, tick,
                            tick + kGuardDurationTicks, "coordinator");
}

ojson explanation_to_json(const ExplanationRecord& r) {
    ojson j;
    j["decision_id"] = r.decision_id;
    j["agent"] = r.agent;
    j["triggering_entries"] = r.triggering_entries;
    j["rules_applied"] = r.rules_applied;
    j["text"] = r.text;
    return j;
}

ojson decision_to_json(const Decision& d) {
    ojson j;
    j["decision_id"] = d.decision_id;
    j["tick"] = d.tick;
    j["kind"] = d.kind == DecisionKind::accepted ? "accepted" : "all_vetoed";
    if (d.chosen) {
        j["chosen"] = d.chosen->id;
        j["chosen_subject"] = d.chosen->subject;
        j["score"] = d.chosen_score;
    }
    ojson vetoes = ojson::array();
    for (const auto& v : d.vetoes) {
        ojson vj;
        vj["proposal_id"] = v.proposal_id;
        vj["subject"] = v.subject;
        vj["rule"] = v.rule;
        vj["triggering_entries"] = v.triggering_entries;
        vetoes.push_back(vj);
    }
    j["vetoes"] = vetoes;
    j["masked_subjects"] = d.masked_subjects;
    j["explanation"] = explanation_to_json(d.explanation);
    return j;
}

std::vector<ValidationError> validate_explanation(const ojson& j) {
    std::vector<ValidationError> errs;
    if (!j.is_object()) {
        errs.push_back({"explanation", "not an object"});
        return errs;
    }
    static const std::set<std::string> known = {"decision_id", "agent", "triggering_entries",
                                               "rules_applied", "text"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!known.count(it.key())) {
            errs.push_back({"explanation." + it.key(), "unknown field"});
        }
    }
    if (!j.contains("decision_id") || !j["decision_id"].is_number_unsigned()) {
        errs.push_back({"explanation.decision_id", "missing or not an unsigned integer"});
    }
    if (!j.contains("agent") || !j["agent"].is_string() ||
        j["agent"].get<std::string>().empty()) {
        errs.push_back({"explanation.agent", "missing or empty"});
    }
    if (!j.contains("triggering_entries") || !j["triggering_entries"].is_array()) {
        errs.push_back({"explanation.triggering_entries", "missing or not an array"});
    } else {
        for (std::size_t i = 0; i < j["triggering_entries"].size(); ++i) {
            if (!j["triggering_entries"][i].is_number_unsigned()) {
                errs.push_back({"explanation.triggering_entries[" + std::to_string(i) + "]",
                                "not an unsigned integer"});
            }
        }
    }
    if (!j.contains("rules_applied") || !j["rules_applied"].is_array()) {
        errs.push_back({"explanation.rules_applied", "missing or not an array"});
    } else {
        for (std::size_t i = 0; i < j["rules_applied"].size(); ++i) {
            const auto& r = j["rules_applied"][i];
            if (!r.is_string() || r.get<std::string>().empty()) {
                errs.push_back({"explanation.rules_applied[" + std::to_string(i) + "]",
                                "not a nonempty string"});
            }
        }
    }
    if (!j.contains("text") || !j["text"].is_string() ||
        j["text"].get<std::string>().empty()) {
        errs.push_back({"explanation.text", "missing or empty"});
    }
    return errs;
}

std::vector<ValidationError> validate_explanation(const ojson& j, const Blackboard& board) {
    auto errs = validate_explanation(j);
    if (!j.is_object() || !j.contains("triggering_entries") ||
        !j["triggering_entries"].is_array()) {
        return errs;
    }
    std::set<std::uint64_t> ids;
    for (const auto& e : board.entries()) ids.insert(e.entry_id);
    for (std::size_t i = 0; i < j["triggering_entries"].size(); ++i) {
        const auto& t = j["triggering_entries"][i];
        if (t.is_number_unsigned() && !ids.count(t.get<std::uint64_t>())) {
            errs.push_back({"explanation.triggering_entries[" + std::to_string(i) + "]",
                            "entry not on board"});
        }
    }
    return errs;
}

} // namespace carecoord
