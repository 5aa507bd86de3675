#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "carecoord/coordinator.hpp"
#include "carecoord/metrics.hpp"
#include "carecoord/sim.hpp"
#include "carecoord/simlog.hpp"

namespace {

using namespace carecoord;

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitProvenance = 4;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string default_out_dir() {
    const char* env = std::getenv("CARECOORD_OUT_DIR");
    return env && *env ? env : "runs";
}

// Flags shared by generate/simulate/compare; set only when the user
// passed them, so they override the config file.
struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    int users = 0;
    int days = 0;
    std::string preset;
    std::string variant;
    int parallel_users = 0;
    int train_day = 0;
    bool static_reminders = false;
    bool random_planner = false;
    bool threshold_monitor = false;
    bool no_monitor = false;
};

void add_common_flags(CLI::App* sub, CommonFlags& f) {
    sub->add_option("-c,--config", f.config_path, "scenario config file (JSON)");
    sub->add_option("-o,--out", f.out_dir,
                    "output directory (default: $CARECOORD_OUT_DIR or ./runs)");
    sub->add_option("--seed", f.seed, "master seed");
    sub->add_option("--users", f.users, "cohort size");
    sub->add_option("--days", f.days, "days to simulate");
    sub->add_option("--preset", f.preset,
                    "scenario preset: none, sensory_access, motor_cognitive, "
                    "neurodivergent, multi_disability");
    sub->add_option("--variant", f.variant, "report label for this run");
    sub->add_option("--parallel-users", f.parallel_users,
                    "worker threads over users (output is identical at any value)");
    sub->add_option("--train-day", f.train_day, "monitor training day");
    sub->add_flag("--static-reminders", f.static_reminders,
                  "fixed-modality reminder baseline");
    sub->add_flag("--random-planner", f.random_planner, "uniform-random meal baseline");
    sub->add_flag("--threshold-monitor", f.threshold_monitor,
                  "fixed-threshold monitor baseline");
    sub->add_flag("--no-monitor", f.no_monitor, "disable monitor training and detection");
}

ScenarioConfig build_config(const CLI::App* sub, const CommonFlags& f) {
    ScenarioConfig cfg = ScenarioConfig::defaults();
    bool have_seed = false;
    if (!f.config_path.empty()) {
        ojson j;
        try {
            j = ojson::parse(read_file(f.config_path));
        } catch (const std::exception& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
        try {
            cfg = ScenarioConfig::from_json(j);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
        have_seed = true;
    }
    if (sub->count("--seed")) {
        cfg.seed = f.seed;
        have_seed = true;
    }
    if (!have_seed) throw ConfigError("config: seed required (--seed or config file)");
    if (sub->count("--users")) cfg.cohort.n_users = f.users;
    if (sub->count("--days")) cfg.cohort.days = f.days;
    if (sub->count("--preset")) {
        auto p = preset_from_string(f.preset);
        if (!p) throw ConfigError("config: unknown preset '" + f.preset + "'");
        cfg.preset = *p;
    }
    if (sub->count("--variant")) cfg.variant = f.variant;
    if (sub->count("--parallel-users")) cfg.parallel_users = f.parallel_users;
    if (sub->count("--train-day")) cfg.train_day = f.train_day;
    if (f.static_reminders) cfg.static_reminders = true;
    if (f.random_planner) cfg.random_planner = true;
    if (f.threshold_monitor) cfg.threshold_monitor = true;
    if (f.no_monitor) cfg.monitor_enabled = false;
    if (sub->count("--out")) {
        cfg.out_dir = f.out_dir;
    } else if (cfg.out_dir.empty()) {
        cfg.out_dir = default_out_dir();
    }

    ScenarioConfig check = cfg;
    apply_preset(check);
    try {
        validate(check);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

int cmd_generate(const ScenarioConfig& cfg) {
    ScenarioConfig eff = cfg;
    apply_preset(eff);
    eff.cohort.seed = eff.seed;
    auto members = generate_cohort(eff.cohort);

    std::filesystem::create_directories(eff.out_dir);
    write_file(eff.out_dir + "/cohort.json",
               cohort_to_json(eff.cohort, members).dump(2) + "\n");

    std::map<std::string, int> by_disability;
    std::map<std::string, int> by_neuro;
    std::map<std::string, int> by_phenotype;
    for (const auto& m : members) {
        by_disability[disability_label(m.profile)] += 1;
        by_neuro[to_string(m.profile.neuro)] += 1;
        by_phenotype[to_string(m.profile.phenotype)] += 1;
    }
    std::printf("cohort: %d users, seed %llu -> %s/cohort.json\n\n",
                eff.cohort.n_users, static_cast<unsigned long long>(eff.seed),
                eff.out_dir.c_str());
    std::printf("%-11s %-18s %6s\n", "group", "label", "users");
    for (const auto& [label, n] : by_disability) {
        std::printf("%-11s %-18s %6d\n", "disability", label.c_str(), n);
    }
    for (const auto& [label, n] : by_neuro) {
        std::printf("%-11s %-18s %6d\n", "neuro", label.c_str(), n);
    }
    for (const auto& [label, n] : by_phenotype) {
        std::printf("%-11s %-18s %6d\n", "phenotype", label.c_str(), n);
    }
    return 0;
}

int cmd_simulate(const ScenarioConfig& cfg) {
    RunResult result = run_scenario(cfg);
    write_run_files(cfg.out_dir, cfg, result);
    std::fputs(render_report(result.report).c_str(), stdout);
    std::printf("\nfiles: %s/{trace.jsonl, features.csv, report.json, cohort.json, "
                "config.json}\n",
                cfg.out_dir.c_str());
    return 0;
}

int cmd_compare(const ScenarioConfig& cfg) {
    if (!cfg.static_reminders && !cfg.random_planner && !cfg.threshold_monitor) {
        throw ConfigError("compare: pick a baseline switch (--static-reminders, "
                          "--random-planner, or --threshold-monitor)");
    }
    ScenarioConfig baseline = cfg;
    baseline.variant.clear(); // labels derive from the switches

    ScenarioConfig adaptive = cfg;
    adaptive.static_reminders = false;
    adaptive.random_planner = false;
    adaptive.threshold_monitor = false;
    adaptive.variant.clear();

    RunResult base_run = run_scenario(baseline);
    RunResult adapt_run = run_scenario(adaptive);

    write_run_files(cfg.out_dir + "/" + variant_label(baseline), baseline, base_run);
    write_run_files(cfg.out_dir + "/" + variant_label(adaptive), adaptive, adapt_run);

    std::vector<MetricDelta> deltas;
    try {
        deltas = compare(base_run.report, adapt_run.report);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitProvenance;
    }
    write_file(cfg.out_dir + "/compare.csv", compare_csv(deltas));
    std::fputs(render_compare(base_run.report, adapt_run.report, deltas).c_str(), stdout);
    std::printf("\nfiles: %s/compare.csv\n", cfg.out_dir.c_str());
    return 0;
}

int cmd_explain_trace(const std::string& run_dir, std::uint64_t decision_id,
                      const std::string& user_filter) {
    std::istringstream is(read_file(run_dir + "/trace.jsonl"));
    SimLog log = SimLog::from_jsonl(is);
    int found = 0;
    for (const SimRecord* r : log.sorted()) {
        if (r->kind != "decision") continue;
        if (!user_filter.empty() && r->user_id != user_filter) continue;
        if (r->body.value("decision_id", std::uint64_t(0)) != decision_id) continue;
        found += 1;
        const ojson& e = r->body.at("explanation");
        std::printf("decision %llu (user %s, day %d, minute %d)\n",
                    static_cast<unsigned long long>(decision_id), r->user_id.c_str(),
                    r->day, r->minute);
        std::printf("  agent: %s\n", e.at("agent").get<std::string>().c_str());
        std::printf("  rules:");
        for (const auto& rule : e.at("rules_applied")) {
            std::printf(" %s", rule.get<std::string>().c_str());
        }
        std::printf("\n  entries:");
        for (const auto& entry : e.at("triggering_entries")) {
            std::printf(" %llu", static_cast<unsigned long long>(entry.get<std::uint64_t>()));
        }
        auto errs = validate_explanation(e);
        std::printf("\n  valid: %s\n", errs.empty() ? "yes" : "NO");
        for (const auto& err : errs) {
            std::printf("    defect at %s: %s\n", err.field.c_str(), err.message.c_str());
        }
        std::printf("  text: %s\n", e.at("text").get<std::string>().c_str());
    }
    if (found == 0) {
        throw std::runtime_error("no decision " + std::to_string(decision_id) + " in " +
                                 run_dir + "/trace.jsonl" +
                                 (user_filter.empty() ? "" : " for user " + user_filter));
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"assistive care coordination simulator"};
    app.require_subcommand(1);

    CommonFlags gen_flags;
    CLI::App* gen = app.add_subcommand("generate", "write a synthetic cohort file");
    add_common_flags(gen, gen_flags);

    CommonFlags sim_flags;
    CLI::App* sim = app.add_subcommand("simulate", "run a scenario and emit its report");
    add_common_flags(sim, sim_flags);

    CommonFlags cmp_flags;
    CLI::App* cmp = app.add_subcommand(
        "compare", "run a baseline and the adaptive stack on one seed, emit deltas");
    add_common_flags(cmp, cmp_flags);

    std::uint64_t decision_id = 0;
    std::string run_dir;
    std::string user_filter;
    CLI::App* exp = app.add_subcommand("explain-trace",
                                       "pretty-print one decision's explanation record");
    exp->add_option("decision_id", decision_id, "decision id to look up")->required();
    exp->add_option("-r,--run", run_dir, "run directory holding trace.jsonl");
    exp->add_option("-u,--user", user_filter, "restrict to one user id");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (gen->parsed()) return cmd_generate(build_config(gen, gen_flags));
        if (sim->parsed()) return cmd_simulate(build_config(sim, sim_flags));
        if (cmp->parsed()) return cmd_compare(build_config(cmp, cmp_flags));
        if (exp->parsed()) {
            if (run_dir.empty()) run_dir = default_out_dir();
            return cmd_explain_trace(run_dir, decision_id, user_filter);
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
    return 0;
}
