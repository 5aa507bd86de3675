#include "doctest.h"

#include <sstream>

#include "carecoord/metrics.hpp"
#include "carecoord/synthgen.hpp"
#include "helpers.hpp"

using namespace carecoord;

namespace {

SimRecord rec(std::uint64_t tick, const std::string& uid, int day, const std::string& kind,
              ojson body) {
    SimRecord r;
    r.tick = tick;
    r.user_id = uid;
    r.day = day;
    r.minute = static_cast<int>(tick % 1440);
    r.kind = kind;
    r.body = std::move(body);
    return r;
}

ojson valid_explanation() {
    ojson e;
    e["decision_id"] = std::uint64_t{0};
    e["agent"] = "coordinator";
    e["triggering_entries"] = std::vector<std::uint64_t>{3};
    e["rules_applied"] = std::vector<std::string>{"arbitration.weighted_score"};
    e["text"] = "Chose 'x' from meal_planner: score 0.5.";
    return e;
}

ojson reminder_body(bool final, const std::string& outcome, bool near_miss = false) {
    ojson b;
    b["final"] = final;
    b["outcome"] = outcome;
    b["near_miss"] = near_miss;
    return b;
}

ojson meal_body(bool consumed, std::vector<std::string> cuisines, ojson nutrition) {
    ojson b;
    b["consumed"] = consumed;
    b["cuisines"] = cuisines;
    b["nutrition"] = std::move(nutrition);
    return b;
}

GuidelineTarget two_nutrient_guideline() {
    GuidelineTarget g;
    g.per_day = {{Nutrient::kcal, 2000.0}, {Nutrient::protein_g, 100.0}};
    return g;
}

} // namespace

TEST_SUITE("metrics") {

TEST_CASE("adherence counts only final slot outcomes") {
    SimLog log;
    int tick = 0;
    // 20 final slots, 12 complied; delay fires are intermediate and must
    // not enter either side of the ratio.
    for (int i = 0; i < 20; ++i) {
        log.append(rec(tick++, i % 2 ? "u1" : "u2", 0, "reminder",
                       reminder_body(true, i < 12 ? "complied" : "ignored")));
    }
    for (int i = 0; i < 7; ++i) {
        log.append(rec(tick++, "u1", 0, "reminder", reminder_body(false, "postponed")));
    }
    CHECK(adherence_rate(log) == doctest::Approx(0.6));

    SimLog empty;
    empty.append(rec(0, "u1", 0, "reminder", reminder_body(false, "postponed")));
    CHECK_THROWS_AS(adherence_rate(empty), std::invalid_argument);
    CHECK_THROWS_AS(adherence_rate(SimLog{}), std::invalid_argument);
}

TEST_CASE("adequacy averages per-day nutrient closeness") {
    auto g = two_nutrient_guideline();
    SimLog log;
    // Day 0 on target, day 1 half off on both, day 2 hopeless.
    log.append(rec(0, "u1", 0, "meal",
                   meal_body(true, {}, ojson{{"kcal", 1200.0}, {"protein_g", 60.0}})));
    log.append(rec(1, "u1", 0, "meal",
                   meal_body(true, {}, ojson{{"kcal", 800.0}, {"protein_g", 40.0}})));
    log.append(rec(2, "u1", 1, "meal",
                   meal_body(true, {}, ojson{{"kcal", 1000.0}, {"protein_g", 150.0}})));
    log.append(rec(3, "u1", 2, "meal",
                   meal_body(true, {}, ojson{{"kcal", 4000.0}, {"protein_g", 0.0}})));
    // Unconsumed food never counts toward intake.
    log.append(rec(4, "u1", 1, "meal",
                   meal_body(false, {}, ojson{{"kcal", 9000.0}, {"protein_g", 900.0}})));

    // (1.0 + 0.5 + 0.0) / 3
    CHECK(nutritional_adequacy(log, g) == doctest::Approx(0.5));

    // Feature records widen the day universe; day 3 has no intake at all.
    SimLog with_features = log;
    for (int d = 0; d < 4; ++d) {
        with_features.append(rec(100 + d, "u1", d, "feature",
                                 ojson{{"adherence", 0.5},
                                       {"glucose_z", 0.0},
                                       {"hr_z", 0.0},
                                       {"steps_z", 0.0},
                                       {"hydration_frac", 0.5}}));
    }
    CHECK(nutritional_adequacy(with_features, g) == doctest::Approx(1.5 / 4.0));

    CHECK_THROWS_AS(nutritional_adequacy(SimLog{}, g), std::invalid_argument);
}

TEST_CASE("satisfaction hits its documented bounds exactly") {
    UserProfile p = testutil::plain_profile("u1");
    p.preferences = {{"western", 0.8}};

    SimLog happy;
    happy.append(rec(0, "u1", 0, "decision",
                     ojson{{"kind", "accepted"}, {"explanation", valid_explanation()}}));
    happy.append(rec(1, "u1", 0, "reminder", reminder_body(true, "complied")));
    happy.append(rec(2, "u1", 0, "meal",
                     meal_body(true, {"western"}, ojson{{"kcal", 500.0}})));
    CHECK(satisfaction(happy, {p}) == 5.0);

    SimLog grim;
    grim.append(rec(0, "u1", 0, "decision", ojson{{"kind", "all_vetoed"}}));
    grim.append(rec(1, "u1", 0, "reminder", reminder_body(false, "postponed", true)));
    grim.append(
        rec(2, "u1", 0, "meal", meal_body(true, {"latin"}, ojson{{"kcal", 500.0}})));
    // 5 - 1.5*1 - 1*1 - 1*1, inside the clamp band
    CHECK(satisfaction(grim, {p}) == doctest::Approx(1.5));

    SatisfactionWeights heavy;
    heavy.reproposal = 3.0;
    heavy.near_miss = 2.0;
    heavy.pref_mismatch = 2.0;
    CHECK(satisfaction(grim, {p}, heavy) == 1.0); // clamped from -2

    // A user absent from the log scores a clean 5.
    UserProfile ghost = testutil::plain_profile("u9");
    CHECK(satisfaction(SimLog{}, {ghost}) == 5.0);

    // Preference weight below 0.5 does not count as a match.
    UserProfile lukewarm = testutil::plain_profile("u1");
    lukewarm.preferences = {{"latin", 0.4}};
    CHECK(satisfaction(grim, {lukewarm}) == doctest::Approx(1.5));
    // No stated preferences means no mismatch penalty.
    UserProfile easy = testutil::plain_profile("u1");
    easy.preferences.clear();
    CHECK(satisfaction(grim, {easy}) == doctest::Approx(2.5));
}

TEST_CASE("per-user scores are rounded before they are averaged") {
    // u1: half its decisions re-proposed -> raw 4.25, rounds to 4.3.
    // u2: the same plus half its meals mismatched -> raw 3.75, rounds
    // to 3.8. The report keeps the rounded per-user scores, so the sum
    // is 8.1; unrounded accumulation would give 8.0.
    UserProfile p1 = testutil::plain_profile("u1");
    p1.preferences = {{"western", 0.8}};
    UserProfile p2 = testutil::plain_profile("u2");
    p2.preferences = {{"western", 0.8}};

    SimLog log;
    for (const std::string uid : {"u1", "u2"}) {
        log.append(rec(0, uid, 0, "decision", ojson{{"kind", "accepted"}}));
        log.append(rec(1, uid, 0, "decision", ojson{{"kind", "all_vetoed"}}));
    }
    log.append(rec(2, "u2", 0, "meal", meal_body(true, {"western"}, ojson{{"kcal", 1.0}})));
    log.append(rec(3, "u2", 0, "meal", meal_body(true, {"latin"}, ojson{{"kcal", 1.0}})));

    Provenance prov;
    auto report = build_report(log, {p1, p2}, two_nutrient_guideline(), prov);
    CHECK(report.overall.satisfaction_sum == doctest::Approx(8.1));
    CHECK(report.overall.satisfaction_sum != doctest::Approx(8.0));
}

TEST_CASE("explainability is the schema-valid fraction of decisions") {
    SimLog log;
    for (int i = 0; i < 4; ++i) {
        log.append(rec(i, "u1", 0, "decision",
                       ojson{{"kind", "accepted"}, {"explanation", valid_explanation()}}));
    }
    CHECK(explainability_frac(log) == 1.0);

    auto corrupt = valid_explanation();
    corrupt.erase("text");
    log.append(rec(9, "u1", 0, "decision",
                   ojson{{"kind", "accepted"}, {"explanation", corrupt}}));
    CHECK(explainability_frac(log) == doctest::Approx(4.0 / 5.0));

    SimLog none;
    none.append(rec(0, "u1", 0, "decision", ojson{{"kind", "accepted"}}));
    CHECK(explainability_frac(none) == 0.0); // decision without explanation is invalid
    CHECK_THROWS_AS(explainability_frac(SimLog{}), std::invalid_argument);
}

TEST_CASE("caregiver burden counts only the escalated tier") {
    SimLog log;
    log.append(rec(0, "u1", 0, "alert", ojson{{"level", "notify_caregiver"}}));
    log.append(rec(1, "u2", 0, "alert", ojson{{"level", "notify_caregiver"}}));
    log.append(rec(2, "u1", 0, "alert", ojson{{"level", "notify_user"}}));
    log.append(rec(3, "u1", 0, "reminder", reminder_body(true, "complied")));
    CHECK(caregiver_burden(log) == 2);
    CHECK(caregiver_burden(SimLog{}) == 0);
}

TEST_CASE("empty tallies report zero instead of dividing") {
    MetricTally t;
    CHECK(t.adherence() == 0.0);
    CHECK(t.adequacy() == 0.0);
    CHECK(t.explainability() == 0.0);
    CHECK(t.satisfaction_mean() == 0.0);
}

TEST_CASE("disability labels partition users") {
    UserProfile p = testutil::plain_profile();
    CHECK(disability_label(p) == "none");
    p.disabilities = {Disability::cognitive};
    CHECK(disability_label(p) == "cognitive");
    p.disabilities = {Disability::cognitive, Disability::physical};
    CHECK(disability_label(p) == "multiple");
}

TEST_CASE("stratum tallies reconcile with the overall row") {
    auto spec = CohortSpec::defaults();
    spec.n_users = 40;
    spec.seed = 23;
    auto cohort = generate_cohort(spec);
    std::vector<UserProfile> profiles;
    for (const auto& m : cohort) profiles.push_back(m.profile);

    SimLog log;
    std::uint64_t tick = 0;
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        const auto& uid = profiles[i].user_id;
        log.append(rec(tick++, uid, 0, "reminder",
                       reminder_body(true, i % 3 ? "complied" : "ignored")));
        log.append(rec(tick++, uid, 0, "reminder", reminder_body(true, "complied")));
        log.append(rec(tick++, uid, 0, "decision",
                       ojson{{"kind", "accepted"}, {"explanation", valid_explanation()}}));
        log.append(rec(tick++, uid, 0, "meal",
                       meal_body(true, {"western"},
                                 ojson{{"kcal", 500.0 + 10.0 * double(i)}})));
        if (i % 5 == 0) {
            log.append(rec(tick++, uid, 0, "alert", ojson{{"level", "notify_caregiver"}}));
        }
    }

    Provenance prov;
    prov.seed = 23;
    prov.n_users = 40;
    prov.days = 1;
    prov.variant = "adaptive";
    auto report = build_report(log, profiles, default_guideline(), prov);

    CHECK(report.overall.users == 40);
    CHECK(report.overall.adherence_den == 80);
    CHECK(report.overall.caregiver_alerts == 8);
    CHECK(report.overall.explainability() == 1.0);
    REQUIRE(report.strata.count("disability"));
    REQUIRE(report.strata.count("neuro"));
    REQUIRE(report.strata.count("phenotype"));

    for (const auto& [group, labels] : report.strata) {
        MetricTally sum;
        for (const auto& [label, t] : labels) {
            sum.users += t.users;
            sum.adherence_num += t.adherence_num;
            sum.adherence_den += t.adherence_den;
            sum.adequacy_sum += t.adequacy_sum;
            sum.adequacy_days += t.adequacy_days;
            sum.explain_valid += t.explain_valid;
            sum.explain_total += t.explain_total;
            sum.caregiver_alerts += t.caregiver_alerts;
            sum.satisfaction_sum += t.satisfaction_sum;
        }
        INFO("group ", group);
        CHECK(sum.users == report.overall.users);
        CHECK(sum.adherence_num == report.overall.adherence_num);
        CHECK(sum.adherence_den == report.overall.adherence_den);
        CHECK(sum.adequacy_days == report.overall.adequacy_days);
        CHECK(sum.explain_valid == report.overall.explain_valid);
        CHECK(sum.explain_total == report.overall.explain_total);
        CHECK(sum.caregiver_alerts == report.overall.caregiver_alerts);
        CHECK(sum.adequacy_sum ==
              doctest::Approx(report.overall.adequacy_sum).epsilon(1e-12));
        CHECK(sum.satisfaction_sum ==
              doctest::Approx(report.overall.satisfaction_sum).epsilon(1e-12));
    }

    auto rt = report_from_json(report_to_json(report));
    CHECK(report_to_json(rt).dump() == report_to_json(report).dump());

    auto text = render_report(report);
    CHECK(text.find("run adaptive: seed=23 users=40 days=1") != std::string::npos);
    CHECK(text.find("overall") != std::string::npos);
    CHECK(text.find("disability") != std::string::npos);
    CHECK(text.find("adherence") != std::string::npos);
}

TEST_CASE("comparisons demand matching provenance and report deltas") {
    RunReport base;
    base.provenance = Provenance{5, 10, 7, "static"};
    base.overall.adherence_num = 50;
    base.overall.adherence_den = 100;
    base.overall.adequacy_sum = 35.0;
    base.overall.adequacy_days = 70;
    base.overall.explain_valid = 9;
    base.overall.explain_total = 10;
    base.overall.caregiver_alerts = 0;
    base.overall.satisfaction_sum = 40.0;
    base.overall.users = 10;

    RunReport var = base;
    var.provenance.variant = "adaptive";
    var.overall.adherence_num = 65;
    var.overall.caregiver_alerts = 4;

    auto deltas = compare(base, var);
    REQUIRE(deltas.size() == 5);
    CHECK(deltas[0].metric == "adherence_rate");
    CHECK(deltas[0].baseline == doctest::Approx(0.5));
    CHECK(deltas[0].variant == doctest::Approx(0.65));
    CHECK(deltas[0].delta == doctest::Approx(0.15));
    REQUIRE(deltas[0].relative.has_value());
    CHECK(*deltas[0].relative == doctest::Approx(0.3));
    CHECK(deltas[1].metric == "nutritional_adequacy");
    CHECK(deltas[1].delta == doctest::Approx(0.0));
    CHECK(deltas[4].metric == "caregiver_alerts");
    CHECK_FALSE(deltas[4].relative.has_value()); // baseline zero

    auto csv = compare_csv(deltas);
    CHECK(csv.rfind("metric,baseline,variant,delta,relative_pct\n", 0) == 0);
    CHECK(csv.find("adherence_rate,0.500000,0.650000,0.150000,30.00\n") !=
          std::string::npos);
    CHECK(csv.find("caregiver_alerts,0.000000,4.000000,4.000000,\n") != std::string::npos);

    auto text = render_compare(base, var, deltas);
    CHECK(text.find("adaptive vs static") != std::string::npos);

    RunReport other_seed = var;
    other_seed.provenance.seed = 6;
    CHECK_THROWS_AS(compare(base, other_seed), std::invalid_argument);
    RunReport other_days = var;
    other_days.provenance.days = 8;
    CHECK_THROWS_AS(compare(base, other_days), std::invalid_argument);
}

TEST_CASE("log exports merge users deterministically") {
    SimLog log;
    log.append(rec(10, "u2", 0, "note", ojson{{"msg", "b"}}));
    log.append(rec(5, "u2", 0, "note", ojson{{"msg", "a"}}));
    log.append(rec(10, "u1", 0, "note", ojson{{"msg", "c"}}));
    log.append(rec(10, "u2", 0, "note", ojson{{"msg", "d"}}));

    // Per-user sequence follows append order regardless of tick.
    CHECK(log.records()[0].user_seq == 0);
    CHECK(log.records()[1].user_seq == 1);
    CHECK(log.records()[2].user_seq == 0);
    CHECK(log.records()[3].user_seq == 2);

    auto sorted = log.sorted();
    REQUIRE(sorted.size() == 4);
    CHECK(sorted[0]->body.at("msg") == "a"); // tick 5 first
    CHECK(sorted[1]->body.at("msg") == "c"); // tick 10, u1 before u2
    CHECK(sorted[2]->body.at("msg") == "b"); // tick 10, u2, seq 0
    CHECK(sorted[3]->body.at("msg") == "d"); // tick 10, u2, seq 2

    std::ostringstream os;
    log.to_jsonl(os);
    std::istringstream is(os.str());
    auto imported = SimLog::from_jsonl(is);
    CHECK(imported.size() == 4);
    std::ostringstream os2;
    imported.to_jsonl(os2);
    CHECK(os2.str() == os.str());

    // The imported counter continues past the highest seen sequence.
    imported.append(rec(99, "u2", 0, "note", ojson{{"msg", "e"}}));
    CHECK(imported.records().back().user_seq == 3);
}

TEST_CASE("the feature table exports in merge order with fixed precision") {
    SimLog log;
    log.append(rec(200, "u2", 1, "feature",
                   ojson{{"adherence", 0.75},
                         {"glucose_z", -1.5},
                         {"hr_z", 0.25},
                         {"steps_z", 2.0},
                         {"hydration_frac", 1.0}}));
    log.append(rec(100, "u1", 0, "feature",
                   ojson{{"adherence", 0.5},
                         {"glucose_z", 0.0},
                         {"hr_z", 0.0},
                         {"steps_z", 0.0},
                         {"hydration_frac", 0.25}}));
    log.append(rec(150, "u1", 0, "note", ojson{{"msg", "skip me"}}));

    CHECK(log.features_csv() ==
          "user_id,day,adherence,glucose_z,hr_z,steps_z,hydration_frac\n"
          "u1,0,0.500000,0.000000,0.000000,0.000000,0.250000\n"
          "u2,1,0.750000,-1.500000,0.250000,2.000000,1.000000\n");
}

} // TEST_SUITE
