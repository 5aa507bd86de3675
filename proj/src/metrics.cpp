#include "carecoord/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>

#include "carecoord/coordinator.hpp"
#include "carecoord/planner.hpp"

namespace carecoord {

namespace {

double round1(double x) { return std::round(x * 10.0) / 10.0; }

// Everything the metrics need from one user's records, in one pass.
struct UserAccum {
    std::uint64_t adherence_num = 0;
    std::uint64_t adherence_den = 0;
    std::uint64_t decisions = 0;
    std::uint64_t vetoed_decisions = 0;
    std::uint64_t explain_valid = 0;
    std::uint64_t fires = 0;
    std::uint64_t near_miss = 0;
    std::uint64_t consumed = 0;
    std::uint64_t pref_matched = 0;
    std::uint64_t caregiver = 0;
    std::map<int, NutrientMap> day_intake;
    std::set<int> feature_days;
};

struct Collected {
    std::map<std::string, UserAccum> users;
    bool has_features = false;
};

// Matched when some cuisine tag carries preference weight >= 0.5. A
// profile with no stated preferences matches everything (no penalty).
bool meal_matches_preference(const UserProfile& profile, const ojson& body) {
    if (profile.preferences.empty()) return true;
    if (!body.contains("cuisines")) return false;
    for (const auto& tag : body.at("cuisines")) {
        auto it = profile.preferences.find(tag.get<std::string>());
        if (it != profile.preferences.end() && it->second >= 0.5) return true;
    }
    return false;
}

Collected collect(const SimLog& log, const std::map<std::string, const UserProfile*>* profiles) {
    Collected out;
    for (const SimRecord& r : log.records()) {
        UserAccum& u = out.users[r.user_id];
        if (r.kind == "reminder") {
            u.fires += 1;
            if (r.body.value("near_miss", false)) u.near_miss += 1;
            if (r.body.value("final", false)) {
                u.adherence_den += 1;
                if (r.body.value("outcome", std::string()) == "complied") {
                    u.adherence_num += 1;
                }
            }
        } else if (r.kind == "decision") {
            u.decisions += 1;
            if (r.body.value("kind", std::string()) == "all_vetoed") u.vetoed_decisions += 1;
            if (r.body.contains("explanation") &&
                validate_explanation(r.body.at("explanation")).empty()) {
                u.explain_valid += 1;
            }
        } else if (r.kind == "meal") {
            if (r.body.value("consumed", false)) {
                u.consumed += 1;
                if (profiles) {
                    auto it = profiles->find(r.user_id);
                    if (it != profiles->end() &&
                        meal_matches_preference(*it->second, r.body)) {
                        u.pref_matched += 1;
                    }
                }
                if (r.body.contains("nutrition")) {
                    add_nutrition(u.day_intake[r.day],
                                  nutrient_map_from_json(r.body.at("nutrition")));
                }
            }
        } else if (r.kind == "alert") {
            if (r.body.value("level", std::string()) == "notify_caregiver") {
                u.caregiver += 1;
            }
        } else if (r.kind == "feature") {
            u.feature_days.insert(r.day);
            out.has_features = true;
        }
    }
    return out;
}

double day_adequacy(const NutrientMap& intake, const GuidelineTarget& guideline) {
    if (guideline.per_day.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& [nutrient, target] : guideline.per_day) {
        double amount = 0.0;
        if (auto it = intake.find(nutrient); it != intake.end()) amount = it->second;
        sum += capped_adequacy(amount, target);
    }
    return sum / static_cast<double>(guideline.per_day.size());
}

void add_adequacy(const UserAccum& u, bool has_features, const GuidelineTarget& guideline,
                  double& sum, std::uint64_t& days) {
    static const NutrientMap kEmpty;
    if (has_features) {
        for (int day : u.feature_days) {
            auto it = u.day_intake.find(day);
            sum += day_adequacy(it == u.day_intake.end() ? kEmpty : it->second, guideline);
            days += 1;
        }
    } else {
        for (const auto& [day, intake] : u.day_intake) {
            sum += day_adequacy(intake, guideline);
            days += 1;
        }
    }
}

double user_satisfaction(const UserAccum& u, const SatisfactionWeights& w) {
    double rr = u.decisions == 0
                    ? 0.0
                    : static_cast<double>(u.vetoed_decisions) /
                          static_cast<double>(u.decisions);
    double nm = u.fires == 0
                    ? 0.0
                    : static_cast<double>(u.near_miss) / static_cast<double>(u.fires);
    double pm = u.consumed == 0
                    ? 1.0
                    : static_cast<double>(u.pref_matched) / static_cast<double>(u.consumed);
    double s = 5.0 - w.reproposal * rr - w.near_miss * nm - w.pref_mismatch * (1.0 - pm);
    return round1(std::clamp(s, 1.0, 5.0));
}

} // namespace

double MetricTally::adherence() const {
    return adherence_den == 0 ? 0.0
                              : static_cast<double>(adherence_num) /
                                    static_cast<double>(adherence_den);
}

double MetricTally::adequacy() const {
    return adequacy_days == 0 ? 0.0 : adequacy_sum / static_cast<double>(adequacy_days);
}

double MetricTally::explainability() const {
    return explain_total == 0 ? 0.0
                              : static_cast<double>(explain_valid) /
                                    static_cast<double>(explain_total);
}

double MetricTally::satisfaction_mean() const {
    return users == 0 ? 0.0 : round1(satisfaction_sum / static_cast<double>(users));
}

double adherence_rate(const SimLog& log) {
    Collected c = collect(log, nullptr);
    std::uint64_t num = 0;
    std::uint64_t den = 0;
    for (const auto& [id, u] : c.users) {
        num += u.adherence_num;
        den += u.adherence_den;
    }
    if (den == 0) throw std::invalid_argument("adherence_rate: no final reminder slots");
    return static_cast<double>(num) / static_cast<double>(den);
}

double nutritional_adequacy(const SimLog& log, const GuidelineTarget& guideline) {
    Collected c = collect(log, nullptr);
    double sum = 0.0;
    std::uint64_t days = 0;
    for (const auto& [id, u] : c.users) {
        add_adequacy(u, c.has_features, guideline, sum, days);
    }
    if (days == 0) throw std::invalid_argument("nutritional_adequacy: no completed days");
    return sum / static_cast<double>(days);
}

double satisfaction(const SimLog& log, const std::vector<UserProfile>& profiles,
                    const SatisfactionWeights& w) {
    std::map<std::string, const UserProfile*> by_id;
    for (const auto& p : profiles) by_id[p.user_id] = &p;
    Collected c = collect(log, &by_id);
    if (profiles.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& p : profiles) {
        auto it = c.users.find(p.user_id);
        sum += user_satisfaction(it == c.users.end() ? UserAccum{} : it->second, w);
    }
    return round1(sum / static_cast<double>(profiles.size()));
}

double explainability_frac(const SimLog& log) {
    Collected c = collect(log, nullptr);
    std::uint64_t valid = 0;
    std::uint64_t total = 0;
    for (const auto& [id, u] : c.users) {
        valid += u.explain_valid;
        total += u.decisions;
    }
    if (total == 0) throw std::invalid_argument("explainability_frac: no decisions");
    return static_cast<double>(valid) / static_cast<double>(total);
}

std::uint64_t caregiver_burden(const SimLog& log) {
    Collected c = collect(log, nullptr);
    std::uint64_t n = 0;
    for (const auto& [id, u] : c.users) n += u.caregiver;
    return n;
}

std::string disability_label(const UserProfile& profile) {
    if (profile.disabilities.empty()) return "none";
    if (profile.disabilities.size() > 1) return "multiple";
    return to_string(*profile.disabilities.begin());
}

RunReport build_report(const SimLog& log, const std::vector<UserProfile>& profiles,
                       const GuidelineTarget& guideline, const Provenance& provenance,
                       const SatisfactionWeights& w) {
    std::map<std::string, const UserProfile*> by_id;
    for (const auto& p : profiles) by_id[p.user_id] = &p;
    Collected c = collect(log, &by_id);

    RunReport report;
    report.provenance = provenance;

    for (const auto& p : profiles) {
        static const UserAccum kEmpty;
        auto it = c.users.find(p.user_id);
        const UserAccum& u = it == c.users.end() ? kEmpty : it->second;

        MetricTally t;
        t.users = 1;
        t.adherence_num = u.adherence_num;
        t.adherence_den = u.adherence_den;
        add_adequacy(u, c.has_features, guideline, t.adequacy_sum, t.adequacy_days);
        t.explain_valid = u.explain_valid;
        t.explain_total = u.decisions;
        t.caregiver_alerts = u.caregiver;
        t.satisfaction_sum = user_satisfaction(u, w);

        auto merge = [&t](MetricTally& into) {
            into.users += t.users;
            into.adherence_num += t.adherence_num;
            into.adherence_den += t.adherence_den;
            into.adequacy_sum += t.adequacy_sum;
            into.adequacy_days += t.adequacy_days;
            into.explain_valid += t.explain_valid;
            into.explain_total += t.explain_total;
            into.caregiver_alerts += t.caregiver_alerts;
            into.satisfaction_sum += t.satisfaction_sum;
        };
        merge(report.overall);
        merge(report.strata["disability"][disability_label(p)]);
        merge(report.strata["neuro"][to_string(p.neuro)]);
        merge(report.strata["phenotype"][to_string(p.phenotype)]);
    }
    return report;
}

namespace {

ojson tally_to_json(const MetricTally& t) {
    ojson j;
    j["users"] = t.users;
    j["adherence_num"] = t.adherence_num;
    j["adherence_den"] = t.adherence_den;
    j["adherence_rate"] = t.adherence();
    j["adequacy_sum"] = t.adequacy_sum;
    j["adequacy_days"] = t.adequacy_days;
    j["nutritional_adequacy"] = t.adequacy();
    j["explain_valid"] = t.explain_valid;
    j["explain_total"] = t.explain_total;
    j["explainability_frac"] = t.explainability();
    j["caregiver_alerts"] = t.caregiver_alerts;
    j["satisfaction_sum"] = t.satisfaction_sum;
    j["satisfaction"] = t.satisfaction_mean();
    return j;
}

MetricTally tally_from_json(const ojson& j) {
    MetricTally t;
    t.users = j.at("users").get<std::uint64_t>();
    t.adherence_num = j.at("adherence_num").get<std::uint64_t>();
    t.adherence_den = j.at("adherence_den").get<std::uint64_t>();
    t.adequacy_sum = j.at("adequacy_sum").get<double>();
    t.adequacy_days = j.at("adequacy_days").get<std::uint64_t>();
    t.explain_valid = j.at("explain_valid").get<std::uint64_t>();
    t.explain_total = j.at("explain_total").get<std::uint64_t>();
    t.caregiver_alerts = j.at("caregiver_alerts").get<std::uint64_t>();
    t.satisfaction_sum = j.at("satisfaction_sum").get<double>();
    return t;
}

} // namespace

ojson report_to_json(const RunReport& report) {
    ojson j;
    j["provenance"]["seed"] = report.provenance.seed;
    j["provenance"]["n_users"] = report.provenance.n_users;
    j["provenance"]["days"] = report.provenance.days;
    j["provenance"]["variant"] = report.provenance.variant;
    j["overall"] = tally_to_json(report.overall);
    ojson strata = ojson::object();
    for (const auto& [group, labels] : report.strata) {
        ojson g = ojson::object();
        for (const auto& [label, tally] : labels) g[label] = tally_to_json(tally);
        strata[group] = g;
    }
    j["strata"] = strata;
    return j;
}

RunReport report_from_json(const ojson& j) {
    RunReport report;
    report.provenance.seed = j.at("provenance").at("seed").get<std::uint64_t>();
    report.provenance.n_users = j.at("provenance").at("n_users").get<int>();
    report.provenance.days = j.at("provenance").at("days").get<int>();
    report.provenance.variant = j.at("provenance").at("variant").get<std::string>();
    report.overall = tally_from_json(j.at("overall"));
    for (const auto& [group, labels] : j.at("strata").items()) {
        for (const auto& [label, tally] : labels.items()) {
            report.strata[group][label] = tally_from_json(tally);
        }
    }
    return report;
}

namespace {

void append_row(std::string& out, const std::string& group, const std::string& label,
                const MetricTally& t) {
    char buf[256];
    char adherence[16] = "-";
    if (t.adherence_den > 0) {
        std::snprintf(adherence, sizeof adherence, "%.3f", t.adherence());
    }
    char adequacy[16] = "-";
    if (t.adequacy_days > 0) {
        std::snprintf(adequacy, sizeof adequacy, "%.3f", t.adequacy());
    }
    char explain[16] = "-";
    if (t.explain_total > 0) {
        std::snprintf(explain, sizeof explain, "%.3f", t.explainability());
    }
    std::snprintf(buf, sizeof buf, "%-11s %-18s %6llu %10s %9s %6.1f %9s %10llu\n",
                  group.c_str(), label.c_str(),
                  static_cast<unsigned long long>(t.users), adherence, adequacy,
                  t.satisfaction_mean(), explain,
                  static_cast<unsigned long long>(t.caregiver_alerts));
    out += buf;
}

} // namespace

std::string render_report(const RunReport& report) {
    char head[256];
    std::snprintf(head, sizeof head,
                  "run %s: seed=%llu users=%d days=%d\n\n"
                  "%-11s %-18s %6s %10s %9s %6s %9s %10s\n",
                  report.provenance.variant.c_str(),
                  static_cast<unsigned long long>(report.provenance.seed),
                  report.provenance.n_users, report.provenance.days, "group", "label",
                  "users", "adherence", "adequacy", "satisf", "explain", "caregiver");
    std::string out = head;
    append_row(out, "overall", "-", report.overall);
    for (const auto& [group, labels] : report.strata) {
        for (const auto& [label, tally] : labels) {
            append_row(out, group, label, tally);
        }
    }
    return out;
}

std::vector<MetricDelta> compare(const RunReport& baseline, const RunReport& variant) {
    if (baseline.provenance.seed != variant.provenance.seed ||
        baseline.provenance.n_users != variant.provenance.n_users ||
        baseline.provenance.days != variant.provenance.days) {
        throw std::invalid_argument(
            "compare: runs disagree on seed, user count, or day count");
    }
    std::vector<MetricDelta> deltas;
    auto push = [&deltas](const std::string& name, double a, double b) {
        MetricDelta d;
        d.metric = name;
        d.baseline = a;
        d.variant = b;
        d.delta = b - a;
        if (a != 0.0) d.relative = (b - a) / a;
        deltas.push_back(d);
    };
    push("adherence_rate", baseline.overall.adherence(), variant.overall.adherence());
    push("nutritional_adequacy", baseline.overall.adequacy(), variant.overall.adequacy());
    push("satisfaction", baseline.overall.satisfaction_mean(),
         variant.overall.satisfaction_mean());
    push("explainability_frac", baseline.overall.explainability(),
         variant.overall.explainability());
    push("caregiver_alerts", static_cast<double>(baseline.overall.caregiver_alerts),
         static_cast<double>(variant.overall.caregiver_alerts));
    return deltas;
}

std::string compare_csv(const std::vector<MetricDelta>& deltas) {
    std::string csv = "metric,baseline,variant,delta,relative_pct\n";
    for (const auto& d : deltas) {
        char buf[192];
        if (d.relative) {
            std::snprintf(buf, sizeof buf, "%s,%.6f,%.6f,%.6f,%.2f\n", d.metric.c_str(),
                          d.baseline, d.variant, d.delta, *d.relative * 100.0);
        } else {
            std::snprintf(buf, sizeof buf, "%s,%.6f,%.6f,%.6f,\n", d.metric.c_str(),
                          d.baseline, d.variant, d.delta);
        }
        csv += buf;
    }
    return csv;
}

std::string render_compare(const RunReport& baseline, const RunReport& variant,
                           const std::vector<MetricDelta>& deltas) {
    char head[256];
    std::snprintf(head, sizeof head,
                  "%s vs %s (seed=%llu users=%d days=%d)\n\n"
                  "%-22s %10s %10s %10s %10s\n",
                  variant.provenance.variant.c_str(), baseline.provenance.variant.c_str(),
                  static_cast<unsigned long long>(baseline.provenance.seed),
                  baseline.provenance.n_users, baseline.provenance.days, "metric",
                  "baseline", "variant", "delta", "rel%");
    std::string out = head;
    for (const auto& d : deltas) {
        char buf[192];
        if (d.relative) {
            std::snprintf(buf, sizeof buf, "%-22s %10.4f %10.4f %+10.4f %+10.2f\n",
                          d.metric.c_str(), d.baseline, d.variant, d.delta,
                          *d.relative * 100.0);
        } else {
            std::snprintf(buf, sizeof buf, "%-22s %10.4f %10.4f %+10.4f %10s\n",
                          d.metric.c_str(), d.baseline, d.variant, d.delta, "n/a");
        }
        out += buf;
    }
    return out;
}

} // namespace carecoord
