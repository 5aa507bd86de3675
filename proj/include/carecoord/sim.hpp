#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "carecoord/catalog.hpp"
#include "carecoord/coordinator.hpp"
#include "carecoord/domain.hpp"
#include "carecoord/metrics.hpp"
#include "carecoord/monitor.hpp"
#include "carecoord/planner.hpp"
#include "carecoord/reminder.hpp"
#include "carecoord/simlog.hpp"
#include "carecoord/synthgen.hpp"

namespace carecoord {

// Presets sharpen the cohort toward one access scenario; none keeps
// the configured mixes untouched.
enum class ScenarioPreset { none, sensory_access, motor_cognitive, neurodivergent,
                            multi_disability };

std::string to_string(ScenarioPreset p);
std::optional<ScenarioPreset> preset_from_string(const std::string& s);

struct ScenarioConfig {
    CohortSpec cohort;
    PlannerConfig planner;
    ReminderConfig reminder;
    MonitorConfig monitor;
    ArbitrationWeights weights;
    double gi_max = 55.0;
    SensorConfig sensors;

    // Baseline switches; each swaps one adaptive agent for its naive
    // counterpart while the rest of the run stays identical.
    bool static_reminders = false;
    bool random_planner = false;
    bool threshold_monitor = false;

    ScenarioPreset preset = ScenarioPreset::none;
    std::uint64_t seed = 0;
    std::string out_dir;

    std::vector<AnomalySpec> anomalies;

    // Monitor timeline: train at the end of day train_day-1, detect
    // daily from train_day on. false skips training and detection.
    bool monitor_enabled = true;
    int train_day = 28;

    // Probability of one food-guidance query per user-day.
    double guidance_query_prob = 0.3;

    int parallel_users = 1;
    std::string variant; // report label; empty derives from the switches

    static ScenarioConfig defaults();
    ojson to_json() const;
    static ScenarioConfig from_json(const ojson& j);
};

void validate(const ScenarioConfig& cfg); // throws std::invalid_argument

// Rewrites cohort mixes (and, for multi_disability, anomalies) to match
// the preset; no-op for none.
void apply_preset(ScenarioConfig& cfg);

// The label compare() reports: explicit variant if set, otherwise the
// active baseline switches joined by '+', otherwise "adaptive".
std::string variant_label(const ScenarioConfig& cfg);

struct RunResult {
    std::vector<CohortMember> cohort;
    SimLog log;
    RunReport report;
};

// Full cohort-by-days tick loop: reminders, responses, meals, sensors,
// guidance queries, monitoring, coordination. Deterministic in cfg
// (cfg.seed overrides the cohort spec's seed); parallel_users > 1 only
// changes wall time, never the output.
RunResult run_scenario(const ScenarioConfig& cfg);

// Writes trace.jsonl, features.csv, report.json, cohort.json under dir.
void write_run_files(const std::string& dir, const ScenarioConfig& cfg,
                     const RunResult& result);

} // namespace carecoord
