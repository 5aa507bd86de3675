#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "carecoord/domain.hpp"
#include "carecoord/rng.hpp"

namespace carecoord {

enum class TimeBucket { morning, midday, evening, night };
enum class Engagement { low, mid, high };
enum class LastResponse { complied, ignored, postponed, none };
enum class ReminderOutcome { complied, ignored, postponed };

std::string to_string(TimeBucket t);
std::string to_string(Engagement e);
std::string to_string(LastResponse r);
std::string to_string(ReminderOutcome o);

TimeBucket time_bucket(int minute);
// Trailing response rate to tercile: [0,1/3) low, [1/3,2/3) mid, else high.
Engagement engagement_bucket(double rate);

struct ReminderContext {
    TimeBucket time = TimeBucket::morning;
    Engagement engagement = Engagement::mid;
    LastResponse last_response = LastResponse::none;

    std::string key() const;
    auto operator<=>(const ReminderContext&) const = default;
};

// Actions in fixed tie-break order: send audio, send visual, send
// haptic, delay 15 minutes.
struct ReminderAction {
    bool is_delay = false;
    Modality modality = Modality::audio; // meaningful when !is_delay

    static ReminderAction send(Modality m) { return {false, m}; }
    static ReminderAction delay() { return {true, Modality::audio}; }
    int index() const { return is_delay ? 3 : static_cast<int>(modality); }
    auto operator<=>(const ReminderAction&) const = default;
};

std::string to_string(const ReminderAction& a);

int reward_of(ReminderOutcome o); // complied +1, ignored -1, postponed 0

class ActionValueTable {
public:
    explicit ActionValueTable(double epsilon = 0.1);

    double mean(const ReminderContext& ctx, int action) const; // unseen => 0
    std::uint64_t count(const ReminderContext& ctx, int action) const;
    void observe(const ReminderContext& ctx, int action, int reward);

    double epsilon() const { return epsilon_; }

    ojson to_json() const;

private:
    struct Cell {
        double mean = 0.0;
        std::uint64_t count = 0;
    };
    std::map<std::pair<std::string, int>, Cell> cells_;
    double epsilon_;
};

// Epsilon-greedy over the admissible actions. p0_masked modalities are
// never returned; low_tolerance modalities are excluded from the greedy
// argmax but stay reachable through exploration. Greedy ties take the
// fixed action order.
ReminderAction choose_action(const ReminderContext& ctx, const ActionValueTable& table,
                             const std::set<Modality>& p0_masked,
                             const std::set<Modality>& low_tolerance, Rng& rng);

// What the table alone would pick, masks ignored. A send whose modality
// is masked marks a near miss for the satisfaction metric.
ReminderAction greedy_unconstrained(const ReminderContext& ctx,
                                    const ActionValueTable& table);

// Channels a profile can never receive: visual impairment masks visual,
// auditory masks audio. These are medical-tier exclusions.
std::set<Modality> masked_modalities(const UserProfile& profile);

// Channels kept out of the greedy argmax (still explorable).
std::set<Modality> low_tolerance_modalities(const UserProfile& profile,
                                            double cutoff = 0.3);

enum class SlotKind { meal, hydration, medication, activity };

std::string to_string(SlotKind k);

int meal_slot_minute(MealSlot slot); // breakfast 480, lunch 750, snack 960, dinner 1140

struct ReminderFire {
    std::string slot_id;
    SlotKind kind = SlotKind::meal;
    std::optional<MealSlot> meal_slot;
    int minute = 0;
    ReminderContext ctx;
    ReminderAction action;
    // True when the scheduler already settled the slot (a delay, or the
    // automatic ignore after the second delay); the caller only reports
    // outcomes for unresolved send fires.
    bool resolved = false;
    std::optional<ReminderOutcome> outcome;
};

struct ReminderConfig {
    double epsilon = 0.1;
    int hydration_start = 540;
    int hydration_interval = 180;
    int hydration_last = 1260;
    int activity_minute = 1020;
    int delay_minutes = 15;
    int max_delays = 2;
    // Fixed-modality baseline: first unmasked send every time, no learning.
    bool static_policy = false;
};

// Per-user scheduler: owns the bandit table, the day's due queue, and
// the trailing engagement window. One instance per simulated user.
class ReminderScheduler {
public:
    ReminderScheduler(ReminderConfig cfg, std::set<Modality> p0_masked,
                      std::set<Modality> low_tolerance);

    // Rolls the trailing window forward and rebuilds the queue from the
    // profile's slots.
    void start_day(const UserProfile& profile, int day);

    // Processes every slot due at this minute. Send fires come back
    // unresolved; the caller decides the outcome and calls complete.
    std::vector<ReminderFire> schedule_tick(int minute, Rng& rng);

    void complete(const ReminderFire& fire, ReminderOutcome outcome);

    ReminderContext context_at(int minute) const;
    double trailing_response_rate() const; // 0.5 until data exists
    int day_total() const { return day_total_; }
    int day_complied() const { return day_complied_; }

    ActionValueTable& table() { return table_; }
    const ActionValueTable& table() const { return table_; }
    const std::set<Modality>& p0_masked() const { return p0_masked_; }

private:
    struct PendingSlot {
        std::string slot_id;
        SlotKind kind;
        std::optional<MealSlot> meal_slot;
        int due_minute;
        int delays = 0;
    };

    void settle(const ReminderContext& ctx, const ReminderAction& action,
                ReminderOutcome outcome);

    ReminderConfig cfg_;
    std::set<Modality> p0_masked_;
    std::set<Modality> low_tolerance_;
    ActionValueTable table_;
    std::vector<PendingSlot> queue_;
    LastResponse last_response_ = LastResponse::none;
    std::deque<std::pair<int, int>> window_; // per-day (complied, total), newest last
    int day_total_ = 0;
    int day_complied_ = 0;
};

} // namespace carecoord
