#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "carecoord/catalog.hpp"
#include "carecoord/coordinator.hpp"
#include "carecoord/domain.hpp"
#include "carecoord/rng.hpp"

namespace carecoord {

enum class AdherenceBucket { low, mid, high };

std::string to_string(AdherenceBucket b);

// Trailing 7-day adherence rate to bucket: [0,0.4) low, [0.4,0.7) mid,
// [0.7,1] high.
AdherenceBucket adherence_bucket(double rate);

struct PlannerState {
    Phenotype phenotype = Phenotype::none;
    MealSlot slot = MealSlot::breakfast;
    AdherenceBucket adherence = AdherenceBucket::mid;

    std::string key() const;
    auto operator<=>(const PlannerState&) const = default;
};

// Slots in the order they occur within a day; dinner is the terminal
// step of the episode.
inline constexpr std::array<MealSlot, 4> kSlotOrder = {
    MealSlot::breakfast, MealSlot::lunch, MealSlot::snack, MealSlot::dinner};

// Fraction of the daily guideline each slot should cover.
double slot_share(MealSlot slot);

class QTable {
public:
    QTable(double alpha = 0.1, double gamma = 0.9, double epsilon = 0.1,
           double q_init = 0.0);

    double get(const PlannerState& s, const std::string& meal_id) const; // missing => q_init
    void set(const PlannerState& s, const std::string& meal_id, double v);

    double alpha() const { return alpha_; }
    double gamma() const { return gamma_; }
    double epsilon() const { return epsilon_; }
    double q_init() const { return q_init_; }
    void set_epsilon(double e);

    std::size_t size() const { return values_.size(); }

    ojson to_json() const;
    static QTable from_json(const ojson& j);

private:
    std::map<std::pair<std::string, std::string>, double> values_;
    double alpha_;
    double gamma_;
    double epsilon_;
    double q_init_;
};

// Epsilon-greedy pick over the admissible meals; greedy ties break on
// the lowest meal id. Throws std::invalid_argument on an empty mask.
std::string select_meal(const PlannerState& s, const QTable& q,
                        const std::set<std::string>& mask, Rng& rng);

// Cuisine-tag match against the profile's stated preferences, in [0,1].
// 0.5 when the profile lists none (neutral), 0 when nothing matches.
double preference_fit(const UserProfile& profile, const MealCatalogEntry& meal);

// Capped deviation score, shared between the planner reward and the
// daily adequacy metric: max(0, 1 - |amount - target|/target). A
// nonpositive target scores 1 only for a nonpositive amount.
double capped_adequacy(double amount, double target);

// Nutrition score minus penalties, clamped to [-1, 1]. The adequacy
// component compares each guideline nutrient against this slot's share
// of the daily target; penalties are 0.2 per sensory mismatch and 0.5
// per soft-cap excess given intake so far.
double reward(const MealCatalogEntry& meal, MealSlot slot, const UserProfile& profile,
              const GuidelineTarget& guideline, const NutrientMap& intake_so_far);

// One-step temporal-difference update. The max runs over the admissible
// actions of the next state; pass nullopt for a terminal step.
void update(QTable& q, const PlannerState& s, const std::string& a, double r,
            const std::optional<PlannerState>& s_next,
            const std::set<std::string>& admissible_next);

// Meals clearing the profile's hard constraints at the current intake.
// While a glucose guard entry is active, everything above the
// coordinator's glycemic ceiling is dropped as well.
std::set<std::string> admissible_meals(const UserProfile& profile, const Catalog& catalog,
                                       const NutrientMap& intake,
                                       const Coordinator& coordinator,
                                       const Blackboard& board, std::uint64_t tick);

// Proposal carrying the meal's arbitration inputs; hard violations are
// attached so coordinator vetoes can name the broken rule.
Proposal make_meal_proposal(const UserProfile& profile, const MealCatalogEntry& entry,
                            const NutrientMap& intake, std::string id,
                            std::string producer);

struct SlotResult {
    MealSlot slot = MealSlot::breakfast;
    std::string meal_id; // empty when skipped
    bool skipped = false;
    std::string skip_reason;
    std::vector<std::uint64_t> decision_ids;
    double reward_value = 0.0;
};

struct MealPlan {
    int day = 0;
    std::vector<SlotResult> slots; // kSlotOrder order
};

ojson plan_to_json(const MealPlan& plan);

struct PlannerConfig {
    double alpha = 0.1;
    double gamma = 0.9;
    double epsilon = 0.1;
    double epsilon_decay = 0.995; // applied per day
    double epsilon_floor = 0.01;
    // Value assumed for a state/action pair before its first update. An
    // optimistic setting (above the best attainable reward) makes the
    // greedy pick sweep untried meals in any state it reaches, which
    // matters because the adherence bucket a user settles into is only
    // reached after the epsilon schedule has largely decayed.
    double q_init = 0.0;
    // One table for the whole cohort instead of one per user. The state
    // key carries the phenotype, so pooling trades personalization for
    // far more visits per state. Requires a serial run; a table is never
    // shared across threads.
    bool shared_table = false;
};

// Per-user planning agent. plan_slot drives a single slot (mask, pick,
// arbitrate with one re-proposal retry, learn); plan_day runs the four
// slots back to back for offline planning. The Q update for a slot is
// deferred until the next slot's admissible set is known, so the two
// entry points share one learning path.
class MealPlanner {
public:
    MealPlanner(PlannerConfig cfg, Phenotype phenotype);
    // Learns into an externally owned table (cohort-level pooling).
    MealPlanner(PlannerConfig cfg, Phenotype phenotype, QTable* shared);

    SlotResult plan_slot(const UserProfile& profile, const Catalog& catalog,
                         const GuidelineTarget& guideline, Coordinator& coordinator,
                         Blackboard& board, Rng& rng, MealSlot slot,
                         const NutrientMap& intake_so_far, double adherence7,
                         std::uint64_t tick, int day);

    // Completes the pending update as terminal and decays epsilon.
    void finish_day();

    MealPlan plan_day(const UserProfile& profile, const Catalog& catalog,
                      const GuidelineTarget& guideline, Coordinator& coordinator,
                      Blackboard& board, Rng& rng, double adherence7, int day,
                      std::uint64_t base_tick);

    QTable& table() { return shared_ ? *shared_ : q_; }
    const QTable& table() const { return shared_ ? *shared_ : q_; }

private:
    struct Pending {
        PlannerState state;
        std::string action;
        double reward_value = 0.0;
    };

    PlannerConfig cfg_;
    Phenotype phenotype_;
    QTable q_;
    QTable* shared_ = nullptr;
    std::optional<Pending> pending_;
    std::uint64_t proposal_seq_ = 0;
};

} // namespace carecoord
