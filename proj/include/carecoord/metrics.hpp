#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "carecoord/domain.hpp"
#include "carecoord/simlog.hpp"

namespace carecoord {

// Satisfaction is a synthetic construction, not a measured instrument:
// 5 - reproposal * (hard-veto re-proposal rate)
//   - near_miss * (masked-modality near-miss rate)
//   - pref_mismatch * (1 - preference-match rate),
// clamped to [1, 5], per user, rounded to one decimal.
struct SatisfactionWeights {
    double reproposal = 1.5;
    double near_miss = 1.0;
    double pref_mismatch = 1.0;
};

// Complied final slots over total final slots. Delay fires are
// intermediate; a slot abandoned after the delay cap counts once, as
// ignored. Throws std::invalid_argument on a log with no final slots.
double adherence_rate(const SimLog& log);

// Mean over user-days of (1/K) sum_k max(0, 1 - |consumed_k - target_k|
// / target_k) across the guideline nutrients, consumption summed from
// consumed meal records. The day universe comes from the per-day
// feature records (falling back to meal records when a log carries
// none). Throws std::invalid_argument on zero days.
double nutritional_adequacy(const SimLog& log, const GuidelineTarget& guideline);

// Mean of the per-user scores over the given profiles; both the
// per-user score and the mean are rounded to one decimal.
double satisfaction(const SimLog& log, const std::vector<UserProfile>& profiles,
                    const SatisfactionWeights& w = {});

// Schema-valid explanations over total decision records. Throws
// std::invalid_argument on a log with no decisions.
double explainability_frac(const SimLog& log);

// Count of notify_caregiver alerts.
std::uint64_t caregiver_burden(const SimLog& log);

struct Provenance {
    std::uint64_t seed = 0;
    int n_users = 0;
    int days = 0;
    std::string variant; // free-form label, e.g. "adaptive", "static_reminders"
};

// Raw tallies behind each metric. Keeping numerators lets stratum rows
// reconcile with the overall row exactly instead of via rounded means.
struct MetricTally {
    std::uint64_t users = 0;
    std::uint64_t adherence_num = 0;
    std::uint64_t adherence_den = 0;
    double adequacy_sum = 0.0;
    std::uint64_t adequacy_days = 0;
    std::uint64_t explain_valid = 0;
    std::uint64_t explain_total = 0;
    std::uint64_t caregiver_alerts = 0;
    double satisfaction_sum = 0.0; // per-user rounded scores

    double adherence() const;
    double adequacy() const;
    double explainability() const;
    double satisfaction_mean() const; // rounded to one decimal
};

struct RunReport {
    Provenance provenance;
    MetricTally overall;
    // group ("disability", "neuro", "phenotype") -> label -> tally.
    // Labels partition the cohort, so each group's tallies sum to the
    // overall row. A user with two or more disabilities lands in the
    // single "multiple" label.
    std::map<std::string, std::map<std::string, MetricTally>> strata;
};

// Stratum label helpers; partitioning is what makes reconciliation hold.
std::string disability_label(const UserProfile& profile);

RunReport build_report(const SimLog& log, const std::vector<UserProfile>& profiles,
                       const GuidelineTarget& guideline, const Provenance& provenance,
                       const SatisfactionWeights& w = {});

ojson report_to_json(const RunReport& report);
RunReport report_from_json(const ojson& j);

// Fixed-width text table: overall row first, then one block per group.
std::string render_report(const RunReport& report);

struct MetricDelta {
    std::string metric;
    double baseline = 0.0;
    double variant = 0.0;
    double delta = 0.0;
    std::optional<double> relative; // empty when the baseline is 0
};

// Per-metric deltas, baseline first. Throws std::invalid_argument when
// seed, user count, or day count differ between the runs.
std::vector<MetricDelta> compare(const RunReport& baseline, const RunReport& variant);

std::string compare_csv(const std::vector<MetricDelta>& deltas);
std::string render_compare(const RunReport& baseline, const RunReport& variant,
                           const std::vector<MetricDelta>& deltas);

} // namespace carecoord
