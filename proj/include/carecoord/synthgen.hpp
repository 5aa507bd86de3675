#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "carecoord/domain.hpp"
#include "carecoord/reminder.hpp"
#include "carecoord/rng.hpp"

namespace carecoord {

struct CohortSpec {
    int n_users = 500;
    int days = 56;
    std::map<Phenotype, double> phenotype_mix;    // over the three condition phenotypes
    std::map<std::string, double> disability_mix; // "none" plus disability names
    std::map<Neuro, double> neuro_mix;
    std::uint64_t seed = 0;

    static CohortSpec defaults();
    ojson to_json() const;
    static CohortSpec from_json(const ojson& j);
};

void validate(const CohortSpec& spec); // throws std::invalid_argument

struct BehaviorModel {
    double base_compliance = 0.0; // logit offset
    std::map<Modality, double> modality_affinity;
    double fatigue_rate = 0.0;    // per reminder already fired today
    double disruption_rate = 0.0; // per-day probability, [0,1]
    std::map<std::string, double> meal_acceptance_bias; // cuisine -> logit offset
};

ojson behavior_to_json(const BehaviorModel& b);
BehaviorModel behavior_from_json(const ojson& j);

struct CohortMember {
    UserProfile profile;
    BehaviorModel behavior;
};

// Deterministic under spec.seed; each user draws from an independent
// stream keyed by user id, so cohort size never shifts existing users.
std::vector<CohortMember> generate_cohort(const CohortSpec& spec);

ojson cohort_to_json(const CohortSpec& spec, const std::vector<CohortMember>& members);
std::pair<CohortSpec, std::vector<CohortMember>> cohort_from_json(const ojson& j);

struct ResponderDayState {
    TimeBucket bucket = TimeBucket::morning;
    int reminders_so_far_today = 0;
    bool disrupted = false;
};

// Closed-form compliance probability the simulated user follows; the
// Monte-Carlo honesty tests check empirical frequencies against this.
double comply_probability(const UserProfile& profile, const BehaviorModel& behavior,
                          Modality modality, const ResponderDayState& day,
                          double meal_bias = 0.0);

// complied w.p. comply_probability; otherwise postponed w.p. 0.3, else
// ignored.
ReminderOutcome respond_to_reminder(const UserProfile& profile,
                                    const BehaviorModel& behavior, Modality modality,
                                    const ResponderDayState& day, Rng& rng,
                                    double meal_bias = 0.0);

struct MealEaten {
    int minute = 0;
    double glycemic_index = 0.0;
    double carbs_g = 0.0;
};

struct SensorConfig {
    int start_minute = 360;
    int end_minute = 1380;
    int interval = 30;
    double bump_scale = 1.0;            // mg/dL per (gi/100 * g carbs)
    double hydration_ml_per_event = 300.0;
    double hydration_target_ml = 2000.0;
    double noise_scale = 1.0;           // 0 silences all sensor noise
};

struct SensorDayInputs {
    Phenotype phenotype = Phenotype::none;
    std::vector<MealEaten> meals;
    std::vector<int> hydration_minutes; // complied hydration events
    bool disrupted = false;
};

double glucose_baseline(Phenotype p);
double glucose_sigma(Phenotype p);

// Post-meal rise: linear up to the peak 30 minutes in, linear decay to
// zero at 120 minutes. Zero outside [0, 120].
double glucose_bump(double glycemic_index, double carbs_g, int minutes_since,
                    double scale);

// Incremental sampler for one day. Calls must advance t by cfg.interval
// starting at cfg.start_minute; each call consumes a fixed number of
// draws, so a day sampled minute by minute matches sample_sensors on
// the same stream. Bumps from meals later than t are zero, so passing
// only the meals eaten so far is equivalent to passing the full day.
class SensorDay {
public:
    SensorDay(Phenotype phenotype, const SensorConfig& cfg, bool disrupted);

    PhysiologicalSample sample(int t, const std::vector<MealEaten>& meals,
                               int hydration_events, Rng& rng);

private:
    Phenotype phenotype_;
    SensorConfig cfg_;
    bool disrupted_;
    double steps_total_ = 0.0;
};

std::vector<PhysiologicalSample> sample_sensors(const SensorDayInputs& inputs,
                                                const SensorConfig& cfg, Rng& rng);

// Behavioral fault injection: affected users ignore every meal
// reminder inside [start_day, start_day + n_days).
struct AnomalySpec {
    std::string kind = "skip_meals";
    int start_day = 0;
    int n_days = 0;
    std::set<std::string> user_ids;

    bool applies(const std::string& user_id, int day) const {
        return n_days > 0 && user_ids.count(user_id) && day >= start_day &&
               day < start_day + n_days;
    }
};

ojson anomaly_to_json(const AnomalySpec& a);
AnomalySpec anomaly_from_json(const ojson& j);

} // namespace carecoord
