#include "carecoord/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace carecoord {

namespace {

const std::vector<std::string> kCuisines = {"western",     "mediterranean", "south_asian",
                                            "east_asian",  "latin",         "middle_eastern"};
const std::vector<std::string> kAllergens = {"peanut", "shellfish", "dairy", "gluten"};

template <typename K>
K categorical(const std::map<K, double>& mix, Rng& rng) {
    const double u = rng.uniform();
    double cum = 0.0;
    K last{};
    for (const auto& [key, p] : mix) {
        cum += p;
        last = key;
        if (u < cum) return key;
    }
    return last;
}

void validate_mix(const std::map<std::string, double>& named, const std::string& which) {
    double sum = 0.0;
    for (const auto& [key, p] : named) {
        if (p < 0.0) {
            throw std::invalid_argument(which + ": negative probability for '" + key + "'");
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument(which + ": probabilities sum to " +
                                    std::to_string(sum) + ", expected 1");
    }
}

std::string user_id_for(int index) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "u%04d", index + 1);
    return buf;
}

} // namespace

CohortSpec CohortSpec::defaults() {
    CohortSpec s;
    s.phenotype_mix = {{Phenotype::diabetes, 1.0 / 3.0},
                       {Phenotype::hypertension, 1.0 / 3.0},
                       {Phenotype::mixed_cardiometabolic, 1.0 / 3.0}};
    s.disability_mix = {{"none", 0.35},
                        {"physical", 0.20},
                        {"sensory_visual", 0.15},
                        {"sensory_auditory", 0.15},
                        {"cognitive", 0.15}};
    s.neuro_mix = {{Neuro::asd, 0.2}, {Neuro::adhd, 0.2}, {Neuro::none, 0.6}};
    return s;
}

void validate(const CohortSpec& spec) {
    if (spec.n_users < 1) throw std::invalid_argument("cohort: n_users < 1");
    if (spec.days < 1) throw std::invalid_argument("cohort: days < 1");

    std::map<std::string, double> ph;
    for (const auto& [k, p] : spec.phenotype_mix) {
        if (k == Phenotype::none) {
            throw std::invalid_argument("cohort: phenotype_mix must cover conditions only");
        }
        ph[to_string(k)] = p;
    }
    validate_mix(ph, "phenotype_mix");

    static const std::set<std::string> disability_keys = {
        "none", "physical", "sensory_visual", "sensory_auditory", "cognitive"};
    for (const auto& [k, p] : spec.disability_mix) {
        (void)p;
        if (!disability_keys.count(k)) {
            throw std::invalid_argument("cohort: unknown disability stratum '" + k + "'");
        }
    }
    validate_mix(spec.disability_mix, "disability_mix");

    std::map<std::string, double> nm;
    for (const auto& [k, p] : spec.neuro_mix) nm[to_string(k)] = p;
    validate_mix(nm, "neuro_mix");
}

ojson CohortSpec::to_json() const {
    ojson j;
    j["n_users"] = n_users;
    j["days"] = days;
    ojson ph = ojson::object();
    for (const auto& [k, p] : phenotype_mix) ph[to_string(k)] = p;
    j["phenotype_mix"] = ph;
    j["disability_mix"] = disability_mix;
    ojson nm = ojson::object();
    for (const auto& [k, p] : neuro_mix) nm[to_string(k)] = p;
    j["neuro_mix"] = nm;
    j["seed"] = seed;
    return j;
}

CohortSpec CohortSpec::from_json(const ojson& j) {
    CohortSpec s;
    s.n_users = j.at("n_users").get<int>();
    s.days = j.at("days").get<int>();
    s.phenotype_mix.clear();
    for (auto it = j.at("phenotype_mix").begin(); it != j.at("phenotype_mix").end(); ++it) {
        auto ph = phenotype_from_string(it.key());
        if (!ph) throw std::invalid_argument("cohort: unknown phenotype '" + it.key() + "'");
        s.phenotype_mix[*ph] = it.value().get<double>();
    }
    for (auto it = j.at("disability_mix").begin(); it != j.at("disability_mix").end();
         ++it) {
        s.disability_mix[it.key()] = it.value().get<double>();
    }
    for (auto it = j.at("neuro_mix").begin(); it != j.at("neuro_mix").end(); ++it) {
        auto n = neuro_from_string(it.key());
        if (!n) throw std::invalid_argument("cohort: unknown neuro tag '" + it.key() + "'");
        s.neuro_mix[*n] = it.value().get<double>();
    }
    s.seed = j.at("seed").get<std::uint64_t>();
    return s;
}

ojson behavior_to_json(const BehaviorModel& b) {
    ojson j;
    j["base_compliance"] = b.base_compliance;
    ojson aff = ojson::object();
    for (const auto& [m, v] : b.modality_affinity) aff[to_string(m)] = v;
    j["modality_affinity"] = aff;
    j["fatigue_rate"] = b.fatigue_rate;
    j["disruption_rate"] = b.disruption_rate;
    j["meal_acceptance_bias"] = b.meal_acceptance_bias;
    return j;
}

BehaviorModel behavior_from_json(const ojson& j) {
    BehaviorModel b;
    b.base_compliance = j.at("base_compliance").get<double>();
    for (auto it = j.at("modality_affinity").begin(); it != j.at("modality_affinity").end();
         ++it) {
        auto m = modality_from_string(it.key());
        if (!m) throw std::invalid_argument("behavior: unknown modality '" + it.key() + "'");
        b.modality_affinity[*m] = it.value().get<double>();
    }
    b.fatigue_rate = j.at("fatigue_rate").get<double>();
    b.disruption_rate = j.at("disruption_rate").get<double>();
    for (auto it = j.at("meal_acceptance_bias").begin();
         it != j.at("meal_acceptance_bias").end(); ++it) {
        b.meal_acceptance_bias[it.key()] = it.value().get<double>();
    }
    return b;
}

std::vector<CohortMember> generate_cohort(const CohortSpec& spec) {
    validate(spec);
    std::vector<CohortMember> members;
    members.reserve(static_cast<std::size_t>(spec.n_users));

    for (int i = 0; i < spec.n_users; ++i) {
        const std::string uid = user_id_for(i);
        Rng rng = make_stream(spec.seed, "cohort", uid);

        UserProfile p;
        p.user_id = uid;
        p.age = 18 + static_cast<int>(rng.uniform_below(68));
        p.gender = static_cast<Gender>(rng.uniform_below(3));
        const std::string& cuisine = kCuisines[rng.uniform_below(kCuisines.size())];
        p.cultural_diet = {cuisine};
        p.phenotype = categorical(spec.phenotype_mix, rng);
        const std::string stratum = categorical(spec.disability_mix, rng);
        if (stratum == "physical") p.disabilities.insert(Disability::physical);
        if (stratum == "sensory_visual") p.disabilities.insert(Disability::sensory_visual);
        if (stratum == "sensory_auditory") {
            p.disabilities.insert(Disability::sensory_auditory);
        }
        if (stratum == "cognitive") p.disabilities.insert(Disability::cognitive);
        p.neuro = categorical(spec.neuro_mix, rng);

        for (Modality m : {Modality::audio, Modality::visual, Modality::haptic}) {
            p.sensory_tolerance[m] = 0.5 + 0.5 * rng.uniform();
        }
        if (p.disabilities.count(Disability::sensory_auditory)) {
            p.sensory_tolerance[Modality::audio] = 0.3 * rng.uniform();
        }
        if (p.disabilities.count(Disability::sensory_visual)) {
            p.sensory_tolerance[Modality::visual] = 0.3 * rng.uniform();
        }

        if (p.neuro == Neuro::asd) {
            if (rng.uniform() < 0.7) p.texture_aversions.insert(Texture::crunchy);
            if (rng.uniform() < 0.3) p.texture_aversions.insert(Texture::mixed);
        }

        if (rng.uniform() < 0.15) {
            p.allergens.insert(kAllergens[rng.uniform_below(kAllergens.size())]);
        }

        const bool diabetic = p.phenotype == Phenotype::diabetes ||
                              p.phenotype == Phenotype::mixed_cardiometabolic;
        const bool hypertensive = p.phenotype == Phenotype::hypertension ||
                                  p.phenotype == Phenotype::mixed_cardiometabolic;
        if (diabetic) {
            p.hard_constraints.push_back(
                NutrientCap{Nutrient::sugar_g, 25.0, 50.0, CapSeverity::hard});
            p.medication_slots = {500, 1150};
        } else {
            p.hard_constraints.push_back(
                NutrientCap{Nutrient::sugar_g, std::nullopt, 60.0, CapSeverity::soft});
        }
        if (hypertensive) {
            p.hard_constraints.push_back(
                NutrientCap{Nutrient::sodium_mg, 800.0, 1500.0, CapSeverity::hard});
            if (p.medication_slots.empty()) p.medication_slots = {510};
        } else {
            p.hard_constraints.push_back(
                NutrientCap{Nutrient::sodium_mg, std::nullopt, 2300.0, CapSeverity::soft});
        }

        p.preferences[cuisine] = 0.7 + 0.3 * rng.uniform();
        std::string second = kCuisines[rng.uniform_below(kCuisines.size())];
        if (second != cuisine) p.preferences[second] = 0.4 + 0.4 * rng.uniform();

        BehaviorModel b;
        b.base_compliance = 0.5 + 0.5 * rng.normal();
        // Best usable modality pulls strongly; the rest mildly repel.
        Modality preferred = Modality::audio;
        double best_tol = -1.0;
        for (Modality m : {Modality::audio, Modality::visual, Modality::haptic}) {
            const bool masked =
                (m == Modality::audio &&
                 p.disabilities.count(Disability::sensory_auditory)) ||
                (m == Modality::visual && p.disabilities.count(Disability::sensory_visual));
            if (masked) continue;
            if (p.tolerance(m) > best_tol) {
                best_tol = p.tolerance(m);
                preferred = m;
            }
        }
        for (Modality m : {Modality::audio, Modality::visual, Modality::haptic}) {
            b.modality_affinity[m] =
                m == preferred ? 1.3 : -0.5 + 0.2 * rng.normal();
        }
        b.fatigue_rate = 0.02 + 0.04 * rng.uniform();
        b.disruption_rate = 0.05 + 0.10 * rng.uniform();
        b.meal_acceptance_bias[cuisine] = 0.3;
        std::string disliked = kCuisines[rng.uniform_below(kCuisines.size())];
        if (disliked != cuisine) b.meal_acceptance_bias[disliked] = -0.4;

        members.push_back(CohortMember{std::move(p), std::move(b)});
    }
    return members;
}

ojson cohort_to_json(const CohortSpec& spec, const std::vector<CohortMember>& members) {
    ojson j;
    j["spec"] = spec.to_json();
    ojson rows = ojson::array();
    for (const auto& m : members) {
        ojson row;
        row["profile"] = profile_to_json(m.profile);
        row["behavior"] = behavior_to_json(m.behavior);
        rows.push_back(row);
    }
    j["members"] = rows;
    return j;
}

std::pair<CohortSpec, std::vector<CohortMember>> cohort_from_json(const ojson& j) {
    CohortSpec spec = CohortSpec::from_json(j.at("spec"));
    std::vector<CohortMember> members;
    for (const auto& row : j.at("members")) {
        auto parsed = validate_profile(row.at("profile"));
        if (auto* errs = std::get_if<std::vector<ValidationError>>(&parsed)) {
            throw std::invalid_argument("cohort import: invalid profile: " +
                                        (errs->empty() ? "unknown" : errs->front().field));
        }
        members.push_back(CohortMember{std::get<UserProfile>(std::move(parsed)),
                                       behavior_from_json(row.at("behavior"))});
    }
    return {spec, members};
}

double comply_probability(const UserProfile& profile, const BehaviorModel& behavior,
                          Modality modality, const ResponderDayState& day,
                          double meal_bias) {
    double logit = behavior.base_compliance + meal_bias;
    if (auto it = behavior.modality_affinity.find(modality);
        it != behavior.modality_affinity.end()) {
        logit += it->second;
    }
    logit += 1.5 * (profile.tolerance(modality) - 0.5);
    logit -= behavior.fatigue_rate * day.reminders_so_far_today;
    if (day.disrupted) logit -= 2.0;
    if (profile.neuro == Neuro::adhd &&
        (day.bucket == TimeBucket::evening || day.bucket == TimeBucket::night)) {
        logit -= 0.4;
    }
    return 1.0 / (1.0 + std::exp(-logit));
}

ReminderOutcome respond_to_reminder(const UserProfile& profile,
                                    const BehaviorModel& behavior, Modality modality,
                                    const ResponderDayState& day, Rng& rng,
                                    double meal_bias) {
    const double p = comply_probability(profile, behavior, modality, day, meal_bias);
    if (rng.uniform() < p) return ReminderOutcome::complied;
    return rng.uniform() < 0.3 ? ReminderOutcome::postponed : ReminderOutcome::ignored;
}

double glucose_baseline(Phenotype p) {
    switch (p) {
    case Phenotype::diabetes: return 140.0;
    case Phenotype::hypertension: return 100.0;
    case Phenotype::mixed_cardiometabolic: return 140.0;
    case Phenotype::none: return 95.0;
    }
    return 95.0;
}

double glucose_sigma(Phenotype p) {
    switch (p) {
    case Phenotype::diabetes: return 20.0;
    case Phenotype::hypertension: return 10.0;
    case Phenotype::mixed_cardiometabolic: return 20.0;
    case Phenotype::none: return 10.0;
    }
    return 10.0;
}

double glucose_bump(double glycemic_index, double carbs_g, int minutes_since,
                    double scale) {
    if (minutes_since < 0 || minutes_since > 120) return 0.0;
    const double amplitude = scale * (glycemic_index / 100.0) * carbs_g;
    if (minutes_since <= 30) {
        return amplitude * (static_cast<double>(minutes_since) / 30.0);
    }
    return amplitude * (1.0 - static_cast<double>(minutes_since - 30) / 90.0);
}

SensorDay::SensorDay(Phenotype phenotype, const SensorConfig& cfg, bool disrupted)
    : phenotype_(phenotype), cfg_(cfg), disrupted_(disrupted) {}

PhysiologicalSample SensorDay::sample(int t, const std::vector<MealEaten>& meals,
                                      int hydration_events, Rng& rng) {
    PhysiologicalSample s;
    s.t = t;

    double glucose = glucose_baseline(phenotype_) +
                     rng.normal() * glucose_sigma(phenotype_) * cfg_.noise_scale;
    for (const auto& meal : meals) {
        glucose += glucose_bump(meal.glycemic_index, meal.carbs_g, t - meal.minute,
                                cfg_.bump_scale);
    }
    s.glucose = std::max(glucose, 50.0);

    s.heart_rate = std::max(40.0, 72.0 + rng.normal() * 4.0 * cfg_.noise_scale);

    // Fixed draw count per sample keeps the stream aligned whether or
    // not the minute falls in the waking window.
    double step_inc = std::max(0.0, 250.0 + rng.normal() * 80.0 * cfg_.noise_scale);
    if (t >= 420 && t <= 1320) {
        steps_total_ += disrupted_ ? 0.5 * step_inc : step_inc;
    }
    s.steps = steps_total_;

    s.hydration = cfg_.hydration_ml_per_event * hydration_events;
    return s;
}

std::vector<PhysiologicalSample> sample_sensors(const SensorDayInputs& inputs,
                                                const SensorConfig& cfg, Rng& rng) {
    std::vector<PhysiologicalSample> samples;
    SensorDay day(inputs.phenotype, cfg, inputs.disrupted);
    for (int t = cfg.start_minute; t <= cfg.end_minute; t += cfg.interval) {
        int hydration_events = 0;
        for (int hm : inputs.hydration_minutes) {
            if (hm <= t) ++hydration_events;
        }
        samples.push_back(day.sample(t, inputs.meals, hydration_events, rng));
    }
    return samples;
}

ojson anomaly_to_json(const AnomalySpec& a) {
    ojson j;
    j["kind"] = a.kind;
    j["start_day"] = a.start_day;
    j["n_days"] = a.n_days;
    j["user_ids"] = a.user_ids;
    return j;
}

AnomalySpec anomaly_from_json(const ojson& j) {
    AnomalySpec a;
    a.kind = j.at("kind").get<std::string>();
    if (a.kind != "skip_meals") {
        throw std::invalid_argument("anomaly: unknown kind '" + a.kind + "'");
    }
    a.start_day = j.at("start_day").get<int>();
    a.n_days = j.at("n_days").get<int>();
    for (const auto& u : j.at("user_ids")) a.user_ids.insert(u.get<std::string>());
    return a;
}

} // namespace carecoord
