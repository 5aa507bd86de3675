#include "carecoord/planner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace carecoord {

std::string to_string(AdherenceBucket b) {
    switch (b) {
    case AdherenceBucket::low: return "low";
    case AdherenceBucket::mid: return "mid";
    case AdherenceBucket::high: return "high";
    }
    return "mid";
}

AdherenceBucket adherence_bucket(double rate) {
    if (rate < 0.4) return AdherenceBucket::low;
    if (rate < 0.7) return AdherenceBucket::mid;
    return AdherenceBucket::high;
}

std::string PlannerState::key() const {
    return to_string(phenotype) + "|" + to_string(slot) + "|" + to_string(adherence);
}

double slot_share(MealSlot slot) {
    switch (slot) {
    case MealSlot::breakfast: return 0.25;
    case MealSlot::lunch: return 0.35;
    case MealSlot::dinner: return 0.30;
    case MealSlot::snack: return 0.10;
    }
    return 0.25;
}

QTable::QTable(double alpha, double gamma, double epsilon, double q_init)
    : alpha_(alpha), gamma_(gamma), epsilon_(epsilon), q_init_(q_init) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha outside (0,1]");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma outside [0,1)");
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
        throw std::invalid_argument("epsilon outside [0,1]");
    }
}

double QTable::get(const PlannerState& s, const std::string& meal_id) const {
    auto it = values_.find({s.key(), meal_id});
    return it == values_.end() ? q_init_ : it->second;
}

void QTable::set(const PlannerState& s, const std::string& meal_id, double v) {
    values_[{s.key(), meal_id}] = v;
}

void QTable::set_epsilon(double e) {
    if (!(e >= 0.0 && e <= 1.0)) throw std::invalid_argument("epsilon outside [0,1]");
    epsilon_ = e;
}

ojson QTable::to_json() const {
    ojson j;
    j["alpha"] = alpha_;
    j["gamma"] = gamma_;
    j["epsilon"] = epsilon_;
    j["q_init"] = q_init_;
    ojson vals = ojson::array();
    for (const auto& [key, v] : values_) {
        ojson row;
        row["state"] = key.first;
        row["meal_id"] = key.second;
        row["q"] = v;
        vals.push_back(row);
    }
    j["values"] = vals;
    return j;
}

QTable QTable::from_json(const ojson& j) {
    QTable q(j.at("alpha").get<double>(), j.at("gamma").get<double>(),
             j.at("epsilon").get<double>(), j.value("q_init", 0.0));
    for (const auto& row : j.at("values")) {
        q.values_[{row.at("state").get<std::string>(),
                   row.at("meal_id").get<std::string>()}] = row.at("q").get<double>();
    }
    return q;
}

std::string select_meal(const PlannerState& s, const QTable& q,
                        const std::set<std::string>& mask, Rng& rng) {
    if (mask.empty()) throw std::invalid_argument("select_meal: empty mask");
    if (rng.uniform() < q.epsilon()) {
        auto it = mask.begin();
        std::advance(it, static_cast<long>(rng.uniform_below(mask.size())));
        return *it;
    }
    auto it = mask.begin();
    std::string best = *it;
    double best_v = q.get(s, best);
    for (++it; it != mask.end(); ++it) {
        double v = q.get(s, *it);
        if (v > best_v) { // strict: equal values keep the lowest meal id
            best = *it;
            best_v = v;
        }
    }
    return best;
}

double preference_fit(const UserProfile& profile, const MealCatalogEntry& meal) {
    if (profile.preferences.empty()) return 0.5;
    double best = 0.0;
    for (const auto& tag : meal.cuisine_tags) {
        auto it = profile.preferences.find(tag);
        if (it != profile.preferences.end()) best = std::max(best, it->second);
    }
    return std::clamp(best, 0.0, 1.0);
}

double capped_adequacy(double amount, double target) {
    if (target <= 0.0) return amount <= 0.0 ? 1.0 : 0.0;
    return std::max(0.0, 1.0 - std::abs(amount - target) / target);
}

double reward(const MealCatalogEntry& meal, MealSlot slot, const UserProfile& profile,
              const GuidelineTarget& guideline, const NutrientMap& intake_so_far) {
    double share = slot_share(slot);
    double adequacy = 0.0;
    std::size_t k = 0;
    for (const auto& [nutrient, target] : guideline.per_day) {
        double amount = 0.0;
        if (auto it = meal.nutrition.find(nutrient); it != meal.nutrition.end()) {
            amount = it->second;
        }
        adequacy += capped_adequacy(amount, share * target);
        ++k;
    }
    if (k > 0) adequacy /= static_cast<double>(k);

    double mismatch = profile.texture_aversions.count(meal.texture) ? 1.0 : 0.0;
    double excess = static_cast<double>(soft_cap_excess_count(profile, meal, intake_so_far));
    return std::clamp(adequacy - 0.2 * mismatch - 0.5 * excess, -1.0, 1.0);
}

void update(QTable& q, const PlannerState& s, const std::string& a, double r,
            const std::optional<PlannerState>& s_next,
            const std::set<std::string>& admissible_next) {
    double max_next = 0.0;
    if (s_next && !admissible_next.empty()) {
        bool first = true;
        for (const auto& id : admissible_next) {
            double v = q.get(*s_next, id);
            if (first || v > max_next) {
                max_next = v;
                first = false;
            }
        }
    }
    double old = q.get(s, a);
    q.set(s, a, old + q.alpha() * (r + q.gamma() * max_next - old));
}

ojson plan_to_json(const MealPlan& plan) {
    ojson j;
    j["day"] = plan.day;
    ojson slots = ojson::array();
    for (const auto& s : plan.slots) {
        ojson sj;
        sj["slot"] = to_string(s.slot);
        if (s.skipped) {
            sj["meal_id"] = nullptr;
            sj["skipped"] = true;
            sj["skip_reason"] = s.skip_reason;
        } else {
            sj["meal_id"] = s.meal_id;
            sj["skipped"] = false;
        }
        sj["decision_ids"] = s.decision_ids;
        sj["reward"] = s.reward_value;
        slots.push_back(sj);
    }
    j["slots"] = slots;
    return j;
}

std::set<std::string> admissible_meals(const UserProfile& profile, const Catalog& catalog,
                                       const NutrientMap& intake,
                                       const Coordinator& coordinator,
                                       const Blackboard& board, std::uint64_t tick) {
    bool guard_up = board.active_guard(Coordinator::kHyperglycemiaGuard, tick) != nullptr;
    std::set<std::string> mask;
    for (const auto& meal : catalog.entries()) {
        if (!check_hard_constraints(profile, meal, intake).empty()) continue;
        if (guard_up && meal.glycemic_index > coordinator.gi_max()) continue;
        mask.insert(meal.meal_id);
    }
    return mask;
}

Proposal make_meal_proposal(const UserProfile& profile, const MealCatalogEntry& entry,
                            const NutrientMap& intake, std::string id,
                            std::string producer) {
    Proposal p;
    p.id = std::move(id);
    p.producer = std::move(producer);
    p.kind = ProposalKind::meal;
    p.subject = entry.meal_id;
    p.glycemic_index = entry.glycemic_index;
    p.preference_fit = preference_fit(profile, entry);
    p.nudge_value = 0.0;
    p.hard_violations = check_hard_constraints(profile, entry, intake);
    return p;
}

MealPlanner::MealPlanner(PlannerConfig cfg, Phenotype phenotype)
    : cfg_(cfg), phenotype_(phenotype), q_(cfg.alpha, cfg.gamma, cfg.epsilon, cfg.q_init) {}

MealPlanner::MealPlanner(PlannerConfig cfg, Phenotype phenotype, QTable* shared)
    : MealPlanner(cfg, phenotype) {
    shared_ = shared;
}

SlotResult MealPlanner::plan_slot(const UserProfile& profile, const Catalog& catalog,
                                  const GuidelineTarget& guideline,
                                  Coordinator& coordinator, Blackboard& board, Rng& rng,
                                  MealSlot slot, const NutrientMap& intake_so_far,
                                  double adherence7, std::uint64_t tick, int day) {
    PlannerState state{phenotype_, slot, adherence_bucket(adherence7)};
    auto mask = admissible_meals(profile, catalog, intake_so_far, coordinator, board, tick);

    if (pending_) {
        update(table(), pending_->state, pending_->action, pending_->reward_value, state, mask);
        pending_.reset();
    }

    SlotResult result;
    result.slot = slot;

    if (mask.empty()) {
        result.skipped = true;
        result.skip_reason = "no_admissible_meal";
        return result;
    }

    auto propose = [&](const std::string& meal_id) {
        std::string id = "plan-" + std::to_string(day) + "-" + to_string(slot) + "-" +
                         std::to_string(proposal_seq_++);
        return make_meal_proposal(profile, catalog.at(meal_id), intake_so_far,
                                  std::move(id), "meal_planner");
    };

    std::string choice = select_meal(state, table(), mask, rng);
    Decision dec = coordinator.arbitrate({propose(choice)}, board, tick);
    result.decision_ids.push_back(dec.decision_id);

    if (dec.kind == DecisionKind::all_vetoed) {
        // One retry with the tightened mask; a gi_guard veto also drops
        // every meal over the index ceiling.
        std::set<std::string> tightened = mask;
        for (const auto& sub : dec.masked_subjects) tightened.erase(sub);
        for (const auto& v : dec.vetoes) {
            if (v.rule != "gi_guard") continue;
            for (auto it = tightened.begin(); it != tightened.end();) {
                if (catalog.at(*it).glycemic_index > coordinator.gi_max()) {
                    it = tightened.erase(it);
                } else {
                    ++it;
                }
            }
            break;
        }
        if (tightened.empty()) {
            result.skipped = true;
            result.skip_reason = "vetoed";
            return result;
        }
        choice = select_meal(state, table(), tightened, rng);
        dec = coordinator.arbitrate({propose(choice)}, board, tick);
        result.decision_ids.push_back(dec.decision_id);
        if (dec.kind == DecisionKind::all_vetoed) {
            result.skipped = true;
            result.skip_reason = "vetoed";
            return result;
        }
    }

    const auto& entry = catalog.at(choice);
    double r = reward(entry, slot, profile, guideline, intake_so_far);
    pending_ = Pending{state, choice, r};
    result.meal_id = choice;
    result.reward_value = r;
    return result;
}

void MealPlanner::finish_day() {
    if (pending_) {
        update(table(), pending_->state, pending_->action, pending_->reward_value, std::nullopt,
               {});
        pending_.reset();
    }
    table().set_epsilon(std::max(cfg_.epsilon_floor, table().epsilon() * cfg_.epsilon_decay));
}

MealPlan MealPlanner::plan_day(const UserProfile& profile, const Catalog& catalog,
                               const GuidelineTarget& guideline, Coordinator& coordinator,
                               Blackboard& board, Rng& rng, double adherence7, int day,
                               std::uint64_t base_tick) {
    if (catalog.entries().empty()) throw std::invalid_argument("plan_day: empty catalog");
    MealPlan plan;
    plan.day = day;
    NutrientMap intake;
    std::uint64_t tick = base_tick;
    for (MealSlot slot : kSlotOrder) {
        SlotResult res = plan_slot(profile, catalog, guideline, coordinator, board, rng,
                                   slot, intake, adherence7, tick, day);
        if (!res.skipped) add_nutrition(intake, catalog.at(res.meal_id).nutrition);
        plan.slots.push_back(std::move(res));
        ++tick;
    }
    finish_day();
    return plan;
}

} // namespace carecoord
