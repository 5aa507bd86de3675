#include "carecoord/reminder.hpp"

#include <algorithm>
#include <stdexcept>

namespace carecoord {

std::string to_string(TimeBucket t) {
    switch (t) {
    case TimeBucket::morning: return "morning";
    case TimeBucket::midday: return "midday";
    case TimeBucket::evening: return "evening";
    case TimeBucket::night: return "night";
    }
    return "night";
}

std::string to_string(Engagement e) {
    switch (e) {
    case Engagement::low: return "low";
    case Engagement::mid: return "mid";
    case Engagement::high: return "high";
    }
    return "mid";
}

std::string to_string(LastResponse r) {
    switch (r) {
    case LastResponse::complied: return "complied";
    case LastResponse::ignored: return "ignored";
    case LastResponse::postponed: return "postponed";
    case LastResponse::none: return "none";
    }
    return "none";
}

std::string to_string(ReminderOutcome o) {
    switch (o) {
    case ReminderOutcome::complied: return "complied";
    case ReminderOutcome::ignored: return "ignored";
    case ReminderOutcome::postponed: return "postponed";
    }
    return "ignored";
}

std::string to_string(SlotKind k) {
    switch (k) {
    case SlotKind::meal: return "meal";
    case SlotKind::hydration: return "hydration";
    case SlotKind::medication: return "medication";
    case SlotKind::activity: return "activity";
    }
    return "meal";
}

TimeBucket time_bucket(int minute) {
    if (minute >= 360 && minute < 720) return TimeBucket::morning;
    if (minute >= 720 && minute < 1020) return TimeBucket::midday;
    if (minute >= 1020 && minute < 1320) return TimeBucket::evening;
    return TimeBucket::night;
}

Engagement engagement_bucket(double rate) {
    if (rate < 1.0 / 3.0) return Engagement::low;
    if (rate < 2.0 / 3.0) return Engagement::mid;
    return Engagement::high;
}

std::string ReminderContext::key() const {
    return to_string(time) + "|" + to_string(engagement) + "|" + to_string(last_response);
}

std::string to_string(const ReminderAction& a) {
    return a.is_delay ? "delay_15min" : "send_" + to_string(a.modality);
}

int reward_of(ReminderOutcome o) {
    switch (o) {
    case ReminderOutcome::complied: return 1;
    case ReminderOutcome::ignored: return -1;
    case ReminderOutcome::postponed: return 0;
    }
    return 0;
}

ActionValueTable::ActionValueTable(double epsilon) : epsilon_(epsilon) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
        throw std::invalid_argument("epsilon outside [0,1]");
    }
}

double ActionValueTable::mean(const ReminderContext& ctx, int action) const {
    auto it = cells_.find({ctx.key(), action});
    return it == cells_.end() ? 0.0 : it->second.mean;
}

std::uint64_t ActionValueTable::count(const ReminderContext& ctx, int action) const {
    auto it = cells_.find({ctx.key(), action});
    return it == cells_.end() ? 0 : it->second.count;
}

void ActionValueTable::observe(const ReminderContext& ctx, int action, int reward) {
    Cell& c = cells_[{ctx.key(), action}];
    c.count += 1;
    c.mean += (static_cast<double>(reward) - c.mean) / static_cast<double>(c.count);
}

ojson ActionValueTable::to_json() const {
    ojson j;
    j["epsilon"] = epsilon_;
    ojson rows = ojson::array();
    for (const auto& [key, cell] : cells_) {
        ojson row;
        row["context"] = key.first;
        row["action"] = key.second;
        row["mean"] = cell.mean;
        row["count"] = cell.count;
        rows.push_back(row);
    }
    j["cells"] = rows;
    return j;
}

ReminderAction choose_action(const ReminderContext& ctx, const ActionValueTable& table,
                             const std::set<Modality>& p0_masked,
                             const std::set<Modality>& low_tolerance, Rng& rng) {
    static constexpr Modality kModalities[] = {Modality::audio, Modality::visual,
                                               Modality::haptic};
    std::vector<ReminderAction> admissible;
    for (Modality m : kModalities) {
        if (!p0_masked.count(m)) admissible.push_back(ReminderAction::send(m));
    }
    admissible.push_back(ReminderAction::delay());

    if (rng.uniform() < table.epsilon()) {
        return admissible[rng.uniform_below(admissible.size())];
    }

    // Greedy pass skips low-tolerance modalities; delay keeps them from
    // ever emptying the candidate list.
    ReminderAction best = ReminderAction::delay();
    double best_mean = 0.0;
    bool first = true;
    for (const auto& a : admissible) {
        if (!a.is_delay && low_tolerance.count(a.modality)) continue;
        double m = table.mean(ctx, a.index());
        if (first || m > best_mean) { // strict: ties keep the earliest action
            best = a;
            best_mean = m;
            first = false;
        }
    }
    return best;
}

ReminderAction greedy_unconstrained(const ReminderContext& ctx,
                                    const ActionValueTable& table) {
    ReminderAction best = ReminderAction::send(Modality::audio);
    double best_mean = table.mean(ctx, best.index());
    for (const auto& a : {ReminderAction::send(Modality::visual),
                          ReminderAction::send(Modality::haptic), ReminderAction::delay()}) {
        double m = table.mean(ctx, a.index());
        if (m > best_mean) { // strict: ties keep the earliest action
            best = a;
            best_mean = m;
        }
    }
    return best;
}

std::set<Modality> masked_modalities(const UserProfile& profile) {
    std::set<Modality> masked;
    if (profile.disabilities.count(Disability::sensory_visual)) {
        masked.insert(Modality::visual);
    }
    if (profile.disabilities.count(Disability::sensory_auditory)) {
        masked.insert(Modality::audio);
    }
    return masked;
}

std::set<Modality> low_tolerance_modalities(const UserProfile& profile, double cutoff) {
    std::set<Modality> low;
    for (Modality m : {Modality::audio, Modality::visual, Modality::haptic}) {
        if (profile.tolerance(m) < cutoff) low.insert(m);
    }
    return low;
}

int meal_slot_minute(MealSlot slot) {
    switch (slot) {
    case MealSlot::breakfast: return 480;
    case MealSlot::lunch: return 750;
    case MealSlot::snack: return 960;
    case MealSlot::dinner: return 1140;
    }
    return 480;
}

ReminderScheduler::ReminderScheduler(ReminderConfig cfg, std::set<Modality> p0_masked,
                                     std::set<Modality> low_tolerance)
    : cfg_(cfg), p0_masked_(std::move(p0_masked)),
      low_tolerance_(std::move(low_tolerance)), table_(cfg.epsilon) {}

void ReminderScheduler::start_day(const UserProfile& profile, int day) {
    if (day > 0 || !window_.empty() || day_total_ > 0) {
        window_.emplace_back(day_complied_, day_total_);
        while (window_.size() > 7) window_.pop_front();
    }
    day_total_ = 0;
    day_complied_ = 0;

    queue_.clear();
    for (MealSlot slot : {MealSlot::breakfast, MealSlot::lunch, MealSlot::snack,
                          MealSlot::dinner}) {
        queue_.push_back(PendingSlot{"meal." + to_string(slot), SlotKind::meal, slot,
                                     meal_slot_minute(slot), 0});
    }
    for (int m = cfg_.hydration_start; m <= cfg_.hydration_last; m += cfg_.hydration_interval) {
        queue_.push_back(PendingSlot{"hydration." + std::to_string(m), SlotKind::hydration,
                                     std::nullopt, m, 0});
    }
    for (int m : profile.medication_slots) {
        queue_.push_back(PendingSlot{"medication." + std::to_string(m),
                                     SlotKind::medication, std::nullopt, m, 0});
    }
    queue_.push_back(PendingSlot{"activity", SlotKind::activity, std::nullopt,
                                 cfg_.activity_minute, 0});
}

double ReminderScheduler::trailing_response_rate() const {
    int complied = day_complied_;
    int total = day_total_;
    for (const auto& [c, t] : window_) {
        complied += c;
        total += t;
    }
    if (total == 0) return 0.5;
    return static_cast<double>(complied) / static_cast<double>(total);
}

ReminderContext ReminderScheduler::context_at(int minute) const {
    return ReminderContext{time_bucket(minute),
                           engagement_bucket(trailing_response_rate()), last_response_};
}

void ReminderScheduler::settle(const ReminderContext& ctx, const ReminderAction& action,
                               ReminderOutcome outcome) {
    table_.observe(ctx, action.index(), reward_of(outcome));
    switch (outcome) {
    case ReminderOutcome::complied: last_response_ = LastResponse::complied; break;
    case ReminderOutcome::ignored: last_response_ = LastResponse::ignored; break;
    case ReminderOutcome::postponed: last_response_ = LastResponse::postponed; break;
    }
}

std::vector<ReminderFire> ReminderScheduler::schedule_tick(int minute, Rng& rng) {
    std::vector<ReminderFire> fires;
    for (auto it = queue_.begin(); it != queue_.end();) {
        if (it->due_minute != minute) {
            ++it;
            continue;
        }
        ReminderContext ctx = context_at(minute);
        ReminderAction action;
        if (cfg_.static_policy) {
            // Fixed baseline: first accessible modality, delay only when
            // every send is masked.
            action = ReminderAction::delay();
            for (Modality m : {Modality::audio, Modality::visual, Modality::haptic}) {
                if (!p0_masked_.count(m)) {
                    action = ReminderAction::send(m);
                    break;
                }
            }
        } else {
            action = choose_action(ctx, table_, p0_masked_, low_tolerance_, rng);
        }
        ReminderFire fire;
        fire.slot_id = it->slot_id;
        fire.kind = it->kind;
        fire.meal_slot = it->meal_slot;
        fire.minute = minute;
        fire.ctx = ctx;
        fire.action = action;
        if (action.is_delay) {
            it->delays += 1;
            fire.resolved = true;
            if (it->delays >= cfg_.max_delays) {
                // Second delay abandons the slot as ignored.
                settle(ctx, action, ReminderOutcome::ignored);
                fire.outcome = ReminderOutcome::ignored;
                day_total_ += 1;
                it = queue_.erase(it);
            } else {
                settle(ctx, action, ReminderOutcome::postponed);
                fire.outcome = ReminderOutcome::postponed;
                it->due_minute += cfg_.delay_minutes;
                ++it;
            }
        } else {
            it = queue_.erase(it); // caller reports the outcome via complete()
        }
        fires.push_back(std::move(fire));
    }
    return fires;
}

void ReminderScheduler::complete(const ReminderFire& fire, ReminderOutcome outcome) {
    settle(fire.ctx, fire.action, outcome);
    day_total_ += 1;
    if (outcome == ReminderOutcome::complied) day_complied_ += 1;
}

} // namespace carecoord
