#include "carecoord/guidance.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

#include "carecoord/coordinator.hpp"

namespace carecoord {

namespace {

double amount_of(const NutrientMap& m, Nutrient n) {
    auto it = m.find(n);
    return it == m.end() ? 0.0 : it->second;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t,");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t,.");
    return s.substr(b, e - b + 1);
}

std::string fmt_portion(double f) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.2f", f);
    return buf;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty()) out += sep;
        out += p;
    }
    return out;
}

} // namespace

void StubRecognizer::add(const std::string& descriptor_id, const std::string& label,
                         double confidence) {
    table_[descriptor_id] = Recognition{label, confidence};
}

std::optional<Recognition> StubRecognizer::recognize(const std::string& descriptor_id) const {
    auto it = table_.find(descriptor_id);
    if (it == table_.end()) return std::nullopt;
    return it->second;
}

StubRecognizer StubRecognizer::from_json(const ojson& j) {
    StubRecognizer r;
    for (const auto& row : j.at("entries")) {
        r.add(row.at("descriptor_id").get<std::string>(), row.at("label").get<std::string>(),
              row.value("confidence", 1.0));
    }
    return r;
}

ojson StubRecognizer::to_json() const {
    ojson j;
    ojson entries = ojson::array();
    for (const auto& [id, rec] : table_) {
        ojson row;
        row["descriptor_id"] = id;
        row["label"] = rec.label;
        row["confidence"] = rec.confidence;
        entries.push_back(row);
    }
    j["entries"] = entries;
    return j;
}

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::approve: return "approve";
    case Verdict::limit: return "limit";
    case Verdict::deny: return "deny";
    }
    return "approve";
}

std::string to_string(Intent i) {
    switch (i) {
    case Intent::can_i_eat: return "can_i_eat";
    case Intent::how_to_cook: return "how_to_cook";
    case Intent::substitute: return "substitute";
    case Intent::nutrition_info: return "nutrition_info";
    case Intent::unknown: return "unknown";
    }
    return "unknown";
}

IntentRules IntentRules::defaults() {
    IntentRules r;
    r.groups = {
        {Intent::can_i_eat,
         {"can i eat", "can i have", "can i", "allowed", "ok to eat", "safe to eat",
          "should i eat"}},
        {Intent::how_to_cook,
         {"how to cook", "how do i cook", "how do i prepare", "prepare", "cook", "recipe"}},
        {Intent::substitute, {"instead", "swap", "substitute", "alternative", "replace"}},
        {Intent::nutrition_info,
         {"calories", "kcal", "sugar", "carb", "protein", "sodium", "fiber", "nutrition",
          "how much"}},
    };
    return r;
}

IntentRules IntentRules::from_json(const ojson& j) {
    IntentRules r;
    for (const auto& g : j.at("groups")) {
        const std::string name = g.at("intent").get<std::string>();
        Intent intent = Intent::unknown;
        if (name == "can_i_eat") intent = Intent::can_i_eat;
        else if (name == "how_to_cook") intent = Intent::how_to_cook;
        else if (name == "substitute") intent = Intent::substitute;
        else if (name == "nutrition_info") intent = Intent::nutrition_info;
        else throw std::invalid_argument("intent rules: unknown intent '" + name + "'");
        std::vector<std::string> keywords;
        for (const auto& k : g.at("keywords")) keywords.push_back(k.get<std::string>());
        r.groups.emplace_back(intent, std::move(keywords));
    }
    return r;
}

ojson IntentRules::to_json() const {
    ojson j;
    ojson groups = ojson::array();
    for (const auto& [intent, keywords] : this->groups) {
        ojson g;
        g["intent"] = to_string(intent);
        g["keywords"] = keywords;
        groups.push_back(g);
    }
    j["groups"] = groups;
    return j;
}

Intent parse_intent(const std::string& query, const IntentRules& rules) {
    const std::string q = lower(query);
    for (const auto& [intent, keywords] : rules.groups) {
        for (const auto& kw : keywords) {
            if (q.find(kw) != std::string::npos) return intent;
        }
    }
    return Intent::unknown;
}

std::vector<std::string> split_single_clause(const std::string& step) {
    // Connectors that join clauses inside one catalog prep step.
    static const std::vector<std::string> seps = {"; ", ", then ", " then "};
    std::vector<std::string> parts = {step};
    for (const auto& sep : seps) {
        std::vector<std::string> next;
        for (const auto& p : parts) {
            std::size_t pos = 0;
            while (true) {
                std::size_t hit = p.find(sep, pos);
                if (hit == std::string::npos) {
                    next.push_back(p.substr(pos));
                    break;
                }
                next.push_back(p.substr(pos, hit - pos));
                pos = hit + sep.size();
            }
        }
        parts = std::move(next);
    }
    std::vector<std::string> out;
    for (auto& p : parts) {
        std::string t = trim(p);
        if (t.rfind("and ", 0) == 0) t = t.substr(4);
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

const MealCatalogEntry* find_substitute(const Catalog& catalog,
                                        const MealCatalogEntry& meal) {
    const MealCatalogEntry* best = nullptr;
    for (const auto& cand : catalog.entries()) {
        if (cand.meal_id == meal.meal_id) continue;
        bool shared = false;
        for (const auto& tag : cand.cuisine_tags) {
            if (meal.cuisine_tags.count(tag)) {
                shared = true;
                break;
            }
        }
        if (!shared) continue;
        if (!best || cand.glycemic_index < best->glycemic_index ||
            (cand.glycemic_index == best->glycemic_index && cand.meal_id < best->meal_id)) {
            best = &cand;
        }
    }
    return best;
}

GuidanceAgent::GuidanceAgent(const Catalog& catalog, GuidelineTarget guideline,
                             GuidanceConfig cfg)
    : catalog_(catalog), guideline_(std::move(guideline)), cfg_(cfg) {}

Recognition GuidanceAgent::recognize(const Recognizer& recognizer,
                                     const std::string& descriptor_id) const {
    auto rec = recognizer.recognize(descriptor_id);
    if (!rec) throw RecognitionError("unknown food descriptor '" + descriptor_id + "'");
    return *rec;
}

namespace {

// Soft reasons at a given portion: soft caps mirrored from the excess
// count, plus any nutrient whose projected daily total overshoots the
// tolerance band.
std::vector<std::string> soft_reasons(const MealCatalogEntry& meal,
                                      const UserProfile& profile,
                                      const NutrientMap& intake,
                                      const GuidelineTarget& guideline, double frac) {
    std::vector<std::string> reasons;
    for (const auto& cap : profile.hard_constraints) {
        if (cap.severity != CapSeverity::soft) continue;
        const double amount = amount_of(meal.nutrition, cap.nutrient) * frac;
        if (cap.per_item_max && amount > *cap.per_item_max) {
            reasons.push_back("soft_cap." + to_string(cap.nutrient) + ".per_item");
            continue;
        }
        if (cap.per_day_max &&
            amount_of(intake, cap.nutrient) + amount > *cap.per_day_max) {
            reasons.push_back("soft_cap." + to_string(cap.nutrient) + ".per_day");
        }
    }
    for (const auto& [nutrient, target] : guideline.per_day) {
        const double projected = amount_of(intake, nutrient) +
                                 amount_of(meal.nutrition, nutrient) * frac;
        if (projected > (1.0 + guideline.tolerance_frac) * target) {
            reasons.push_back("daily_projection." + to_string(nutrient));
        }
    }
    return reasons;
}

} // namespace

Assessment GuidanceAgent::assess_label(const std::string& label, const UserProfile& profile,
                                       const NutrientMap& intake_so_far,
                                       const Blackboard& board, std::uint64_t tick) const {
    const MealCatalogEntry* entry = catalog_.find(label);
    if (!entry) throw std::invalid_argument("label '" + label + "' not in catalog");

    Assessment a;
    for (const auto& v : check_hard_constraints(profile, *entry, intake_so_far)) {
        a.reasons.push_back(v.rule_name());
    }
    if (entry->glycemic_index > cfg_.gi_max &&
        board.active_guard(Coordinator::kHyperglycemiaGuard, tick)) {
        a.reasons.push_back("gi_guard");
    }
    if (!a.reasons.empty()) {
        a.verdict = Verdict::deny;
        return a;
    }

    a.reasons = soft_reasons(*entry, profile, intake_so_far, guideline_, 1.0);
    if (a.reasons.empty()) {
        a.verdict = Verdict::approve;
        return a;
    }

    a.verdict = Verdict::limit;
    a.suggested_portion_frac = 0.25; // fallback when no fraction clears
    for (double frac : {0.75, 0.5, 0.25}) {
        if (soft_reasons(*entry, profile, intake_so_far, guideline_, frac).empty()) {
            a.suggested_portion_frac = frac;
            break;
        }
    }
    return a;
}

Assessment GuidanceAgent::assess(const Recognition& rec, const UserProfile& profile,
                                 const NutrientMap& intake_so_far, const Blackboard& board,
                                 std::uint64_t tick) const {
    if (rec.confidence < cfg_.confidence_cutoff) {
        Assessment a;
        a.verdict = Verdict::limit;
        a.reasons = {"low_confidence"};
        a.suggested_portion_frac = cfg_.low_confidence_portion;
        return a;
    }
    return assess_label(rec.label, profile, intake_so_far, board, tick);
}

GuidanceResponse GuidanceAgent::respond(Intent intent, const std::string& label,
                                        const UserProfile& profile,
                                        const NutrientMap& intake_so_far,
                                        const Blackboard& board, std::uint64_t tick) const {
    if (intent == Intent::unknown) {
        throw std::invalid_argument("unknown intent: please rephrase the question");
    }
    const MealCatalogEntry* entry = catalog_.find(label);
    if (!entry) throw std::invalid_argument("label '" + label + "' not in catalog");

    GuidanceResponse r;
    r.intent = intent;
    r.label = label;

    switch (intent) {
    case Intent::can_i_eat: {
        Assessment a = assess_label(label, profile, intake_so_far, board, tick);
        switch (a.verdict) {
        case Verdict::approve:
            r.text = "Yes, you can have " + entry->name + ".";
            break;
        case Verdict::limit:
            r.text = "Go easy on " + entry->name + ": try " +
                     fmt_portion(*a.suggested_portion_frac) +
                     " of a portion (reasons: " + join(a.reasons, ", ") + ").";
            break;
        case Verdict::deny:
            r.text = "Better to skip " + entry->name +
                     " (reasons: " + join(a.reasons, ", ") + ").";
            break;
        }
        r.assessment = std::move(a);
        break;
    }
    case Intent::how_to_cook: {
        if (entry->prep_steps.empty()) {
            throw std::invalid_argument("no preparation steps for '" + label + "'");
        }
        const bool single_clause = profile.disabilities.count(Disability::cognitive) > 0;
        for (const auto& step : entry->prep_steps) {
            if (single_clause) {
                for (auto& piece : split_single_clause(step)) {
                    r.steps.push_back(std::move(piece));
                }
            } else {
                r.steps.push_back(step);
            }
        }
        r.text = "Steps for " + entry->name + ":";
        break;
    }
    case Intent::substitute: {
        const MealCatalogEntry* sub = find_substitute(catalog_, *entry);
        if (sub) {
            char gi[16];
            std::snprintf(gi, sizeof gi, "%.0f", sub->glycemic_index);
            r.text = "Instead of " + entry->name + ", try " + sub->name +
                     " (glycemic index " + gi + ").";
            r.steps.push_back(sub->meal_id);
        } else {
            r.text = "No substitute with a shared cuisine found for " + entry->name + ".";
        }
        break;
    }
    case Intent::nutrition_info: {
        static const std::map<Nutrient, std::string> units = {
            {Nutrient::kcal, "kcal"},          {Nutrient::carbs_g, "g carbs"},
            {Nutrient::sugar_g, "g sugar"},    {Nutrient::protein_g, "g protein"},
            {Nutrient::fat_g, "g fat"},        {Nutrient::sodium_mg, "mg sodium"},
            {Nutrient::fiber_g, "g fiber"},
        };
        std::vector<std::string> parts;
        for (const auto& [nutrient, amount] : entry->nutrition) {
            char buf[48];
            std::snprintf(buf, sizeof buf, "%.0f %s", amount, units.at(nutrient).c_str());
            parts.push_back(buf);
        }
        r.text = entry->name + ": " + join(parts, ", ") + ".";
        break;
    }
    case Intent::unknown:
        break; // unreachable, rejected above
    }
    return r;
}

ojson assessment_to_json(const Assessment& a) {
    ojson j;
    j["verdict"] = to_string(a.verdict);
    j["reasons"] = a.reasons;
    if (a.suggested_portion_frac) j["suggested_portion_frac"] = *a.suggested_portion_frac;
    return j;
}

ojson guidance_response_to_json(const GuidanceResponse& r) {
    ojson j;
    j["intent"] = to_string(r.intent);
    j["label"] = r.label;
    j["text"] = r.text;
    j["steps"] = r.steps;
    if (r.assessment) j["assessment"] = assessment_to_json(*r.assessment);
    return j;
}

} // namespace carecoord
