#include "carecoord/sim.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <exception>
#include <filesystem>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "carecoord/guidance.hpp"

namespace carecoord {

std::string to_string(ScenarioPreset p) {
    switch (p) {
    case ScenarioPreset::none: return "none";
    case ScenarioPreset::sensory_access: return "sensory_access";
    case ScenarioPreset::motor_cognitive: return "motor_cognitive";
    case ScenarioPreset::neurodivergent: return "neurodivergent";
    case ScenarioPreset::multi_disability: return "multi_disability";
    }
    return "none";
}

std::optional<ScenarioPreset> preset_from_string(const std::string& s) {
    if (s == "none") return ScenarioPreset::none;
    if (s == "sensory_access") return ScenarioPreset::sensory_access;
    if (s == "motor_cognitive") return ScenarioPreset::motor_cognitive;
    if (s == "neurodivergent") return ScenarioPreset::neurodivergent;
    if (s == "multi_disability") return ScenarioPreset::multi_disability;
    return std::nullopt;
}

ScenarioConfig ScenarioConfig::defaults() {
    ScenarioConfig c;
    c.cohort = CohortSpec::defaults();
    return c;
}

namespace {

ojson planner_to_json(const PlannerConfig& p) {
    return ojson{{"alpha", p.alpha},
                 {"gamma", p.gamma},
                 {"epsilon", p.epsilon},
                 {"epsilon_decay", p.epsilon_decay},
                 {"epsilon_floor", p.epsilon_floor},
                 {"q_init", p.q_init},
                 {"shared_table", p.shared_table}};
}

PlannerConfig planner_from_json(const ojson& j, PlannerConfig p) {
    p.alpha = j.value("alpha", p.alpha);
    p.gamma = j.value("gamma", p.gamma);
    p.epsilon = j.value("epsilon", p.epsilon);
    p.epsilon_decay = j.value("epsilon_decay", p.epsilon_decay);
    p.epsilon_floor = j.value("epsilon_floor", p.epsilon_floor);
    p.q_init = j.value("q_init", p.q_init);
    p.shared_table = j.value("shared_table", p.shared_table);
    return p;
}

ojson reminder_to_json(const ReminderConfig& r) {
    return ojson{{"epsilon", r.epsilon},
                 {"hydration_start", r.hydration_start},
                 {"hydration_interval", r.hydration_interval},
                 {"hydration_last", r.hydration_last},
                 {"activity_minute", r.activity_minute},
                 {"delay_minutes", r.delay_minutes},
                 {"max_delays", r.max_delays}};
}

ReminderConfig reminder_from_json(const ojson& j, ReminderConfig r) {
    r.epsilon = j.value("epsilon", r.epsilon);
    r.hydration_start = j.value("hydration_start", r.hydration_start);
    r.hydration_interval = j.value("hydration_interval", r.hydration_interval);
    r.hydration_last = j.value("hydration_last", r.hydration_last);
    r.activity_minute = j.value("activity_minute", r.activity_minute);
    r.delay_minutes = j.value("delay_minutes", r.delay_minutes);
    r.max_delays = j.value("max_delays", r.max_delays);
    return r;
}

ojson monitor_to_json(const MonitorConfig& m) {
    return ojson{{"hidden", m.hidden},
                 {"window", m.window},
                 {"lr", m.lr},
                 {"epochs", m.epochs},
                 {"tau_mult", m.tau_mult}};
}

MonitorConfig monitor_from_json(const ojson& j, MonitorConfig m) {
    m.hidden = j.value("hidden", m.hidden);
    m.window = j.value("window", m.window);
    m.lr = j.value("lr", m.lr);
    m.epochs = j.value("epochs", m.epochs);
    m.tau_mult = j.value("tau_mult", m.tau_mult);
    return m;
}

ojson sensors_to_json(const SensorConfig& s) {
    return ojson{{"start_minute", s.start_minute},
                 {"end_minute", s.end_minute},
                 {"interval", s.interval},
                 {"bump_scale", s.bump_scale},
                 {"hydration_ml_per_event", s.hydration_ml_per_event},
                 {"hydration_target_ml", s.hydration_target_ml},
                 {"noise_scale", s.noise_scale}};
}

SensorConfig sensors_from_json(const ojson& j, SensorConfig s) {
    s.start_minute = j.value("start_minute", s.start_minute);
    s.end_minute = j.value("end_minute", s.end_minute);
    s.interval = j.value("interval", s.interval);
    s.bump_scale = j.value("bump_scale", s.bump_scale);
    s.hydration_ml_per_event = j.value("hydration_ml_per_event", s.hydration_ml_per_event);
    s.hydration_target_ml = j.value("hydration_target_ml", s.hydration_target_ml);
    s.noise_scale = j.value("noise_scale", s.noise_scale);
    return s;
}

} // namespace

ojson ScenarioConfig::to_json() const {
    ojson j;
    j["seed"] = seed;
    j["preset"] = to_string(preset);
    j["out_dir"] = out_dir;
    j["variant"] = variant;
    j["cohort"] = cohort.to_json();
    j["planner"] = planner_to_json(planner);
    j["reminder"] = reminder_to_json(reminder);
    j["monitor"] = monitor_to_json(monitor);
    j["weights"] = ojson{{"w_pref", weights.w_pref}, {"w_nudge", weights.w_nudge}};
    j["gi_max"] = gi_max;
    j["sensors"] = sensors_to_json(sensors);
    j["static_reminders"] = static_reminders;
    j["random_planner"] = random_planner;
    j["threshold_monitor"] = threshold_monitor;
    j["monitor_enabled"] = monitor_enabled;
    j["train_day"] = train_day;
    j["guidance_query_prob"] = guidance_query_prob;
    j["parallel_users"] = parallel_users;
    ojson anomaly_rows = ojson::array();
    for (const auto& a : anomalies) anomaly_rows.push_back(anomaly_to_json(a));
    j["anomalies"] = anomaly_rows;
    return j;
}

ScenarioConfig ScenarioConfig::from_json(const ojson& j) {
    ScenarioConfig c = defaults();
    if (!j.contains("seed")) throw std::invalid_argument("config: missing required 'seed'");
    c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("preset")) {
        auto p = preset_from_string(j.at("preset").get<std::string>());
        if (!p) {
            throw std::invalid_argument("config: unknown preset '" +
                                        j.at("preset").get<std::string>() + "'");
        }
        c.preset = *p;
    }
    c.out_dir = j.value("out_dir", c.out_dir);
    c.variant = j.value("variant", c.variant);
    if (j.contains("cohort")) {
        // Scenario files may give a partial cohort block; overlay it on the
        // defaults before handing it to the strict parser.
        ojson merged = c.cohort.to_json();
        merged.update(j.at("cohort"));
        c.cohort = CohortSpec::from_json(merged);
    }
    if (j.contains("planner")) c.planner = planner_from_json(j.at("planner"), c.planner);
    if (j.contains("reminder")) c.reminder = reminder_from_json(j.at("reminder"), c.reminder);
    if (j.contains("monitor")) c.monitor = monitor_from_json(j.at("monitor"), c.monitor);
    if (j.contains("weights")) {
        c.weights.w_pref = j.at("weights").value("w_pref", c.weights.w_pref);
        c.weights.w_nudge = j.at("weights").value("w_nudge", c.weights.w_nudge);
    }
    c.gi_max = j.value("gi_max", c.gi_max);
    if (j.contains("sensors")) c.sensors = sensors_from_json(j.at("sensors"), c.sensors);
    c.static_reminders = j.value("static_reminders", c.static_reminders);
    c.random_planner = j.value("random_planner", c.random_planner);
    c.threshold_monitor = j.value("threshold_monitor", c.threshold_monitor);
    c.monitor_enabled = j.value("monitor_enabled", c.monitor_enabled);
    c.train_day = j.value("train_day", c.train_day);
    c.guidance_query_prob = j.value("guidance_query_prob", c.guidance_query_prob);
    c.parallel_users = j.value("parallel_users", c.parallel_users);
    if (j.contains("anomalies")) {
        c.anomalies.clear();
        for (const auto& a : j.at("anomalies")) c.anomalies.push_back(anomaly_from_json(a));
    }
    return c;
}

void validate(const ScenarioConfig& cfg) {
    validate(cfg.cohort);
    validate(cfg.monitor);
    if (!(cfg.planner.alpha > 0.0 && cfg.planner.alpha <= 1.0)) {
        throw std::invalid_argument("planner.alpha outside (0,1]");
    }
    if (!(cfg.planner.gamma >= 0.0 && cfg.planner.gamma < 1.0)) {
        throw std::invalid_argument("planner.gamma outside [0,1)");
    }
    if (!(cfg.planner.epsilon >= 0.0 && cfg.planner.epsilon <= 1.0)) {
        throw std::invalid_argument("planner.epsilon outside [0,1]");
    }
    if (!(cfg.planner.epsilon_decay > 0.0 && cfg.planner.epsilon_decay <= 1.0)) {
        throw std::invalid_argument("planner.epsilon_decay outside (0,1]");
    }
    if (!(cfg.planner.epsilon_floor >= 0.0 && cfg.planner.epsilon_floor <= 1.0)) {
        throw std::invalid_argument("planner.epsilon_floor outside [0,1]");
    }
    if (!(cfg.reminder.epsilon >= 0.0 && cfg.reminder.epsilon <= 1.0)) {
        throw std::invalid_argument("reminder.epsilon outside [0,1]");
    }
    if (cfg.reminder.delay_minutes < 1) {
        throw std::invalid_argument("reminder.delay_minutes below 1");
    }
    if (cfg.reminder.max_delays < 1) {
        throw std::invalid_argument("reminder.max_delays below 1");
    }
    if (!(cfg.gi_max > 0.0)) throw std::invalid_argument("gi_max not positive");
    if (cfg.sensors.interval < 1) throw std::invalid_argument("sensors.interval below 1");
    if (cfg.sensors.start_minute < 0 || cfg.sensors.end_minute >= 1440 ||
        cfg.sensors.start_minute > cfg.sensors.end_minute) {
        throw std::invalid_argument("sensors window outside a day");
    }
    if (!(cfg.guidance_query_prob >= 0.0 && cfg.guidance_query_prob <= 1.0)) {
        throw std::invalid_argument("guidance_query_prob outside [0,1]");
    }
    if (cfg.train_day < 1) throw std::invalid_argument("train_day below 1");
    if (cfg.parallel_users < 1) throw std::invalid_argument("parallel_users below 1");
    if (cfg.planner.shared_table && cfg.parallel_users > 1) {
        throw std::invalid_argument("planner.shared_table requires parallel_users = 1");
    }
    if (cfg.weights.w_pref < 0.0 || cfg.weights.w_nudge < 0.0) {
        throw std::invalid_argument("arbitration weights must be nonnegative");
    }
}

void apply_preset(ScenarioConfig& cfg) {
    switch (cfg.preset) {
    case ScenarioPreset::none:
        return;
    case ScenarioPreset::sensory_access:
        cfg.cohort.disability_mix = {{"sensory_visual", 0.4},
                                     {"sensory_auditory", 0.4},
                                     {"none", 0.2}};
        return;
    case ScenarioPreset::motor_cognitive:
        cfg.cohort.disability_mix = {{"physical", 0.4}, {"cognitive", 0.4}, {"none", 0.2}};
        return;
    case ScenarioPreset::neurodivergent:
        cfg.cohort.neuro_mix = {{Neuro::asd, 0.4}, {Neuro::adhd, 0.4}, {Neuro::none, 0.2}};
        return;
    case ScenarioPreset::multi_disability:
        cfg.cohort.disability_mix = {{"physical", 0.3},
                                     {"cognitive", 0.3},
                                     {"sensory_visual", 0.2},
                                     {"sensory_auditory", 0.1},
                                     {"none", 0.1}};
        if (cfg.anomalies.empty()) {
            AnomalySpec a;
            a.kind = "skip_meals";
            a.start_day = std::max(0, cfg.cohort.days - 21);
            a.n_days = 3;
            a.user_ids = {"u0001", "u0002", "u0003"};
            cfg.anomalies.push_back(a);
        }
        return;
    }
}

std::string variant_label(const ScenarioConfig& cfg) {
    if (!cfg.variant.empty()) return cfg.variant;
    std::vector<std::string> parts;
    if (cfg.static_reminders) parts.push_back("static_reminders");
    if (cfg.random_planner) parts.push_back("random_planner");
    if (cfg.threshold_monitor) parts.push_back("threshold_monitor");
    if (parts.empty()) return "adaptive";
    std::string label = parts[0];
    for (std::size_t i = 1; i < parts.size(); ++i) label += "+" + parts[i];
    return label;
}

namespace {

// Under the multi-disability preset roughly half the cohort gains a
// second, non-sensory disability (keyed per user, so cohort size does
// not shuffle who is affected).
void add_second_disabilities(std::vector<CohortMember>& members, std::uint64_t seed) {
    for (auto& m : members) {
        Rng rng = make_stream(seed, "preset_multi", m.profile.user_id);
        if (m.profile.disabilities.empty() || !rng.bernoulli(0.5)) continue;
        if (m.profile.disabilities.count(Disability::cognitive)) {
            m.profile.disabilities.insert(Disability::physical);
        } else {
            m.profile.disabilities.insert(Disability::cognitive);
        }
    }
}

double max_cuisine_bias(const BehaviorModel& behavior, const MealCatalogEntry& entry) {
    double best = 0.0;
    bool any = false;
    for (const auto& tag : entry.cuisine_tags) {
        auto it = behavior.meal_acceptance_bias.find(tag);
        if (it == behavior.meal_acceptance_bias.end()) continue;
        if (!any || it->second > best) {
            best = it->second;
            any = true;
        }
    }
    return any ? best : 0.0;
}

struct UserRunOutput {
    std::vector<SimRecord> records;
};

UserRunOutput simulate_user(const ScenarioConfig& cfg, const Catalog& catalog,
                            const GuidelineTarget& guideline, const CohortMember& member,
                            QTable* pooled_q) {
    const UserProfile& profile = member.profile;
    const BehaviorModel& behavior = member.behavior;
    const std::string& uid = profile.user_id;
    const int days = cfg.cohort.days;

    UserRunOutput out;
    auto log = [&](const char* kind, int day, int minute, ojson body) {
        SimRecord r;
        r.tick = static_cast<std::uint64_t>(day) * 1440 + static_cast<std::uint64_t>(minute);
        r.user_id = uid;
        r.day = day;
        r.minute = minute;
        r.kind = kind;
        r.body = std::move(body);
        out.records.push_back(std::move(r));
    };

    Rng rng_responder = make_stream(cfg.seed, "responder", uid);
    Rng rng_disrupt = make_stream(cfg.seed, "disrupt", uid);
    Rng rng_reminder = make_stream(cfg.seed, "reminder", uid);
    Rng rng_planner = make_stream(cfg.seed, "planner", uid);
    Rng rng_sensors = make_stream(cfg.seed, "sensors", uid);
    Rng rng_guidance = make_stream(cfg.seed, "guidance", uid);
    Rng rng_monitor = make_stream(cfg.seed, "monitor_init", uid);

    Blackboard board;
    Coordinator coordinator(cfg.weights, cfg.gi_max);
    ReminderConfig rcfg = cfg.reminder;
    rcfg.static_policy = cfg.static_reminders;
    ReminderScheduler scheduler(rcfg, masked_modalities(profile),
                                low_tolerance_modalities(profile));
    MealPlanner planner(cfg.planner, profile.phenotype, pooled_q);
    GuidanceConfig gcfg;
    gcfg.gi_max = cfg.gi_max;
    GuidanceAgent guidance(catalog, guideline, gcfg);

    std::size_t decisions_logged = 0;
    auto flush_decisions = [&](int day, int minute) {
        const auto& ds = coordinator.decisions();
        for (; decisions_logged < ds.size(); ++decisions_logged) {
            log("decision", day, minute, decision_to_json(ds[decisions_logged]));
        }
    };

    std::uint64_t random_seq = 0;
    // Uniform pick over the admissible set; arbitration still protects
    // it, with the same single-retry contract as the learning planner.
    auto plan_slot_random = [&](MealSlot slot, const NutrientMap& intake,
                                std::uint64_t tick, int day) {
        SlotResult res;
        res.slot = slot;
        auto mask = admissible_meals(profile, catalog, intake, coordinator, board, tick);
        auto pick = [&](const std::set<std::string>& m) {
            auto it = m.begin();
            std::advance(it, static_cast<long>(rng_planner.uniform_below(m.size())));
            return *it;
        };
        if (mask.empty()) {
            res.skipped = true;
            res.skip_reason = "no_admissible_meal";
            return res;
        }
        std::string choice = pick(mask);
        auto propose = [&](const std::string& id) {
            std::string pid = "rand-" + std::to_string(day) + "-" + to_string(slot) + "-" +
                              std::to_string(random_seq++);
            return make_meal_proposal(profile, catalog.at(id), intake, std::move(pid),
                                      "random_planner");
        };
        Decision dec = coordinator.arbitrate({propose(choice)}, board, tick);
        res.decision_ids.push_back(dec.decision_id);
        if (dec.kind == DecisionKind::all_vetoed) {
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
                res.skipped = true;
                res.skip_reason = "vetoed";
                return res;
            }
            choice = pick(tightened);
            dec = coordinator.arbitrate({propose(choice)}, board, tick);
            res.decision_ids.push_back(dec.decision_id);
            if (dec.kind == DecisionKind::all_vetoed) {
                res.skipped = true;
                res.skip_reason = "vetoed";
                return res;
            }
        }
        res.meal_id = choice;
        return res;
    };

    std::vector<DailyRaw> raw;
    std::vector<DayFeature> features;
    std::size_t features_emitted = 0;
    const int baseline_days = std::min(14, days);

    GruParams gru = GruParams::zeros(cfg.monitor.hidden);
    bool gru_trained = false;

    std::deque<std::pair<int, int>> adher_window; // (complied, total) per day
    std::optional<std::uint64_t> last_guard_entry;

    auto simulate_day = [&](int day) {
        const bool disrupted = rng_disrupt.bernoulli(behavior.disruption_rate);
        bool skip_meals = false;
        for (const auto& a : cfg.anomalies) {
            if (a.kind == "skip_meals" && a.applies(uid, day)) skip_meals = true;
        }

        scheduler.start_day(profile, day);
        SensorDay sensor(profile.phenotype, cfg.sensors, disrupted);

        NutrientMap intake;
        std::vector<MealEaten> meals_eaten;
        int hydration_events = 0;
        ResponderDayState day_state;
        day_state.disrupted = disrupted;
        int day_final_total = 0;
        int day_final_complied = 0;
        std::map<MealSlot, std::string> planned;
        double glucose_sum = 0.0;
        double hr_sum = 0.0;
        int n_samples = 0;
        double steps_last = 0.0;

        double adherence7 = 0.5;
        {
            int c = 0;
            int t = 0;
            for (const auto& [dc, dt] : adher_window) {
                c += dc;
                t += dt;
            }
            if (t > 0) adherence7 = static_cast<double>(c) / static_cast<double>(t);
        }

        const int guidance_minute =
            rng_guidance.uniform() < cfg.guidance_query_prob ? 600 : -1;

        for (int minute = 0; minute < 1440; ++minute) {
            const std::uint64_t tick =
                static_cast<std::uint64_t>(day) * 1440 + static_cast<std::uint64_t>(minute);

            // Plan a slot at its own minute, before the reminder fires,
            // so a complied reminder has a meal to consume.
            for (MealSlot slot : kSlotOrder) {
                if (meal_slot_minute(slot) != minute) continue;
                SlotResult res =
                    cfg.random_planner
                        ? plan_slot_random(slot, intake, tick, day)
                        : planner.plan_slot(profile, catalog, guideline, coordinator,
                                            board, rng_planner, slot, intake, adherence7,
                                            tick, day);
                planned[slot] = res.skipped ? std::string() : res.meal_id;
                flush_decisions(day, minute);
            }

            for (const ReminderFire& fire : scheduler.schedule_tick(minute, rng_reminder)) {
                ReminderAction unconstrained =
                    greedy_unconstrained(fire.ctx, scheduler.table());
                const bool near_miss = !unconstrained.is_delay &&
                                       scheduler.p0_masked().count(unconstrained.modality);

                const std::string* planned_meal = nullptr;
                if (fire.meal_slot) {
                    auto it = planned.find(*fire.meal_slot);
                    if (it != planned.end() && !it->second.empty()) {
                        planned_meal = &it->second;
                    }
                }

                ReminderOutcome outcome;
                bool final = false;
                if (fire.resolved) {
                    outcome = *fire.outcome; // a delay, settled by the scheduler
                    final = outcome == ReminderOutcome::ignored;
                    if (final) {
                        day_final_total += 1;
                    }
                } else {
                    day_state.bucket = time_bucket(minute);
                    if (fire.kind == SlotKind::meal && skip_meals) {
                        outcome = ReminderOutcome::ignored;
                    } else {
                        double bias = planned_meal ? max_cuisine_bias(
                                                         behavior, catalog.at(*planned_meal))
                                                   : 0.0;
                        outcome = respond_to_reminder(profile, behavior,
                                                      fire.action.modality, day_state,
                                                      rng_responder, bias);
                    }
                    scheduler.complete(fire, outcome);
                    day_state.reminders_so_far_today += 1;
                    final = true;
                    day_final_total += 1;
                    if (outcome == ReminderOutcome::complied) day_final_complied += 1;
                }

                ojson body;
                body["slot_id"] = fire.slot_id;
                body["slot_kind"] = to_string(fire.kind);
                if (fire.meal_slot) body["meal_slot"] = to_string(*fire.meal_slot);
                body["action"] = to_string(fire.action);
                body["outcome"] = to_string(outcome);
                body["final"] = final;
                body["near_miss"] = near_miss;
                body["context"] = fire.ctx.key();
                log("reminder", day, minute, std::move(body));

                if (fire.kind == SlotKind::meal && planned_meal && final) {
                    const MealCatalogEntry& entry = catalog.at(*planned_meal);
                    const bool consumed = outcome == ReminderOutcome::complied;
                    ojson meal_body;
                    meal_body["slot"] = to_string(*fire.meal_slot);
                    meal_body["meal_id"] = entry.meal_id;
                    meal_body["consumed"] = consumed;
                    meal_body["cuisines"] = entry.cuisine_tags;
                    meal_body["nutrition"] = nutrient_map_to_json(entry.nutrition);
                    log("meal", day, minute, std::move(meal_body));
                    if (consumed) {
                        add_nutrition(intake, entry.nutrition);
                        double carbs = 0.0;
                        if (auto it = entry.nutrition.find(Nutrient::carbs_g);
                            it != entry.nutrition.end()) {
                            carbs = it->second;
                        }
                        meals_eaten.push_back(
                            MealEaten{minute, entry.glycemic_index, carbs});
                    }
                }
                if (fire.kind == SlotKind::hydration && final &&
                    outcome == ReminderOutcome::complied) {
                    hydration_events += 1;
                }
            }

            if (minute >= cfg.sensors.start_minute && minute <= cfg.sensors.end_minute &&
                (minute - cfg.sensors.start_minute) % cfg.sensors.interval == 0) {
                PhysiologicalSample s =
                    sensor.sample(minute, meals_eaten, hydration_events, rng_sensors);
                glucose_sum += s.glucose;
                hr_sum += s.heart_rate;
                steps_last = s.steps;
                n_samples += 1;
                auto guard = coordinator.observe_glucose(s, board, tick);
                if (guard && guard != last_guard_entry) {
                    last_guard_entry = guard;
                    ojson body;
                    body["glucose"] = s.glucose;
                    body["guard_entry"] = *guard;
                    log("sample", day, minute, std::move(body));
                }
            }

            if (minute == guidance_minute) {
                const auto& entries = catalog.entries();
                const MealCatalogEntry& entry =
                    entries[rng_guidance.uniform_below(entries.size())];
                Assessment a = guidance.assess(Recognition{entry.meal_id, 1.0}, profile,
                                               intake, board, tick);
                ojson body;
                body["label"] = entry.meal_id;
                body["verdict"] = to_string(a.verdict);
                body["reasons"] = a.reasons;
                if (a.suggested_portion_frac) {
                    body["portion_frac"] = *a.suggested_portion_frac;
                }
                log("guidance", day, minute, std::move(body));
            }
        }

        if (!cfg.random_planner) planner.finish_day();

        adher_window.emplace_back(day_final_complied, day_final_total);
        while (adher_window.size() > 7) adher_window.pop_front();

        DailyRaw dr;
        dr.adherence = day_final_total == 0
                           ? 0.0
                           : static_cast<double>(day_final_complied) /
                                 static_cast<double>(day_final_total);
        dr.glucose_mean = n_samples == 0 ? 0.0 : glucose_sum / n_samples;
        dr.hr_mean = n_samples == 0 ? 0.0 : hr_sum / n_samples;
        dr.steps_total = steps_last;
        dr.hydration_total = hydration_events * cfg.sensors.hydration_ml_per_event;
        raw.push_back(dr);

        if (static_cast<int>(raw.size()) >= baseline_days) {
            features = standardize(raw, baseline_days, cfg.sensors.hydration_target_ml);
            for (; features_emitted < features.size(); ++features_emitted) {
                const DayFeature& f = features[features_emitted];
                const int fday = static_cast<int>(features_emitted);
                ojson body;
                body["adherence"] = f.adherence;
                body["glucose_z"] = f.glucose_z;
                body["hr_z"] = f.hr_z;
                body["steps_z"] = f.steps_z;
                body["hydration_frac"] = f.hydration_frac;
                log("feature", fday, 1439, std::move(body));
            }
        }

        if (cfg.monitor_enabled && !cfg.threshold_monitor && !gru_trained &&
            day == cfg.train_day - 1 &&
            static_cast<int>(features.size()) >= cfg.monitor.window) {
            std::vector<DayFeature> train_slice(
                features.begin(),
                features.begin() + std::min<std::size_t>(features.size(),
                                                         static_cast<std::size_t>(
                                                             cfg.train_day)));
            auto windows = make_windows(train_slice, cfg.monitor.window);
            if (!windows.empty()) {
                gru = gru_train(windows, cfg.monitor, rng_monitor);
                gru_trained = true;
                ojson body;
                body["event"] = "monitor_trained";
                body["windows"] = windows.size();
                body["sigma_residual"] = gru.sigma_residual.value_or(0.0);
                log("note", day, 1439, std::move(body));
            }
        }

        if (cfg.monitor_enabled && day >= cfg.train_day &&
            static_cast<int>(features.size()) == day + 1) {
            std::optional<Alert> alert;
            if (cfg.threshold_monitor) {
                alert = threshold_detect(features[day]);
                if (alert) alert->source = "threshold";
            } else if (gru_trained && day >= cfg.monitor.window - 1) {
                std::vector<DayFeature> seq(features.begin() + (day - (cfg.monitor.window - 1)),
                                            features.begin() + day);
                alert = detect(seq, features[day], gru, cfg.monitor);
            }
            if (alert) {
                alert->user_id = uid;
                alert->day = day;
                ojson body;
                body["level"] = to_string(alert->severity);
                body["source"] = alert->source;
                body["predicted"] = alert->predicted;
                body["observed"] = alert->observed;
                body["deviation"] = alert->deviation;
                log("alert", day, 1439, std::move(body));
            }
        }
    };

    for (int day = 0; day < days; ++day) {
        try {
            simulate_day(day);
        } catch (const std::exception& e) {
            throw std::runtime_error("user " + uid + ", day " + std::to_string(day) + ": " +
                                     e.what());
        }
    }

    return out;
}

} // namespace

RunResult run_scenario(const ScenarioConfig& cfg) {
    ScenarioConfig eff = cfg;
    apply_preset(eff);
    validate(eff);
    eff.cohort.seed = eff.seed;

    RunResult result;
    result.cohort = generate_cohort(eff.cohort);
    if (eff.preset == ScenarioPreset::multi_disability) {
        add_second_disabilities(result.cohort, eff.seed);
    }

    const Catalog catalog = default_catalog();
    const GuidelineTarget guideline = default_guideline();

    const std::size_t n = result.cohort.size();
    std::vector<UserRunOutput> outputs(n);
    // Cohort-level table when pooling is on; validate() has already
    // rejected pooling combined with parallel workers.
    std::optional<QTable> pooled;
    if (eff.planner.shared_table) {
        pooled.emplace(eff.planner.alpha, eff.planner.gamma, eff.planner.epsilon,
                       eff.planner.q_init);
    }
    QTable* pooled_q = pooled ? &*pooled : nullptr;
    const int workers = std::min<int>(eff.parallel_users, static_cast<int>(n) == 0
                                                              ? 1
                                                              : static_cast<int>(n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            outputs[i] = simulate_user(eff, catalog, guideline, result.cohort[i], pooled_q);
        }
    } else {
        std::vector<std::thread> threads;
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
        std::atomic<std::size_t> next{0};
        for (int w = 0; w < workers; ++w) {
            threads.emplace_back([&, w] {
                try {
                    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                        outputs[i] = simulate_user(eff, catalog, guideline,
                                                   result.cohort[i], nullptr);
                    }
                } catch (...) {
                    errors[static_cast<std::size_t>(w)] = std::current_exception();
                }
            });
        }
        for (auto& t : threads) t.join();
        for (const auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }

    // Append in user order so sequence numbers match a serial run.
    for (auto& o : outputs) {
        for (auto& r : o.records) result.log.append(std::move(r));
    }

    std::vector<UserProfile> profiles;
    profiles.reserve(n);
    for (const auto& m : result.cohort) profiles.push_back(m.profile);

    Provenance prov;
    prov.seed = eff.seed;
    prov.n_users = eff.cohort.n_users;
    prov.days = eff.cohort.days;
    prov.variant = variant_label(eff);
    result.report = build_report(result.log, profiles, guideline, prov);
    return result;
}

void write_run_files(const std::string& dir, const ScenarioConfig& cfg,
                     const RunResult& result) {
    std::filesystem::create_directories(dir);
    ScenarioConfig eff = cfg;
    apply_preset(eff);
    eff.cohort.seed = eff.seed;
    // The echoed config describes the run, not this invocation: strip
    // the output location and worker count, which never shape results.
    eff.out_dir.clear();
    eff.parallel_users = 1;

    std::ostringstream trace;
    result.log.to_jsonl(trace);
    write_file(dir + "/trace.jsonl", trace.str());
    write_file(dir + "/features.csv", result.log.features_csv());
    write_file(dir + "/report.json", report_to_json(result.report).dump(2) + "\n");
    write_file(dir + "/cohort.json", cohort_to_json(eff.cohort, result.cohort).dump(2) + "\n");
    write_file(dir + "/config.json", eff.to_json().dump(2) + "\n");
}

} // namespace carecoord
