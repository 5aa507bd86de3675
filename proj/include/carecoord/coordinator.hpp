#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "carecoord/bus.hpp"
#include "carecoord/domain.hpp"

namespace carecoord {

struct ArbitrationWeights {
    double w_pref = 0.7;
    double w_nudge = 0.3;
};

// A named medical-tier predicate. Returns nullopt to pass the proposal
// through, or the list of board entries that triggered the veto (empty
// when the veto is intrinsic to the proposal, e.g. a hard-cap hit).
struct P0Rule {
    std::string name;
    std::function<std::optional<std::vector<std::uint64_t>>(
        const Proposal&, const Blackboard&, std::uint64_t tick)>
        check;
};

struct VetoRecord {
    std::string proposal_id;
    std::string subject;
    std::string rule;
    std::vector<std::uint64_t> triggering_entries;
};

struct ExplanationRecord {
    std::uint64_t decision_id = 0;
    std::string agent; // producer of the chosen proposal, or "coordinator"
    std::vector<std::uint64_t> triggering_entries;
    std::vector<std::string> rules_applied;
    std::string text;
};

enum class DecisionKind { accepted, all_vetoed };

struct Decision {
    std::uint64_t decision_id = 0;
    std::uint64_t tick = 0;
    DecisionKind kind = DecisionKind::accepted;
    std::optional<Proposal> chosen;
    double chosen_score = 0.0;
    std::vector<VetoRecord> vetoes;
    // Subjects the re-proposal round must exclude; sorted, deduplicated.
    std::vector<std::string> masked_subjects;
    ExplanationRecord explanation;
};

// Conflict resolution in two stages: medical-tier predicates veto, the
// survivors are scored w_pref * preference_fit + w_nudge * nudge_value.
// Ties break on (producer, proposal id) so the outcome never depends on
// input order or weight scale.
class Coordinator {
public:
    explicit Coordinator(ArbitrationWeights weights = {}, double gi_max = 55.0);

    void register_p0_rule(P0Rule rule);

    // Throws std::invalid_argument on an empty proposal set.
    Decision arbitrate(const std::vector<Proposal>& proposals, const Blackboard& board,
                       std::uint64_t tick);

    // Posts a 120-tick hyperglycemia veto when glucose exceeds
    // 180 mg/dL. Idempotent: while a guard is active, further high
    // samples return the existing entry instead of stacking a new one.
    std::optional<std::uint64_t> observe_glucose(const PhysiologicalSample& sample,
                                                 Blackboard& board, std::uint64_t tick);

    const std::vector<Decision>& decisions() const { return decisions_; }
    const ArbitrationWeights& weights() const { return weights_; }
    double gi_max() const { return gi_max_; }

    static constexpr double kGlucoseVetoThreshold = 180.0; // mg/dL
    static constexpr std::uint64_t kGuardDurationTicks = 120;
    static constexpr const char* kHyperglycemiaGuard = "hyperglycemia_risk";
    static constexpr const char* kModalityGuard = "modality_unusable";

private:
    ArbitrationWeights weights_;
    double gi_max_;
    std::vector<P0Rule> rules_;
    std::vector<Decision> decisions_;
    std::uint64_t next_decision_id_ = 0;
};

ojson explanation_to_json(const ExplanationRecord& r);
ojson decision_to_json(const Decision& d);

// Structural check of a serialized explanation: all required fields
// present and well-typed, no extras. Returns every defect found.
std::vector<ValidationError> validate_explanation(const ojson& j);

// Additionally requires each triggering entry to exist on the board.
std::vector<ValidationError> validate_explanation(const ojson& j, const Blackboard& board);

} // namespace carecoord
