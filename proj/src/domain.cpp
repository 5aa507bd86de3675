#include "carecoord/domain.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace carecoord {

namespace {

template <typename E>
std::optional<E> lookup(const std::vector<std::pair<E, const char*>>& table,
                        const std::string& s) {
    for (const auto& [v, name] : table) {
        if (s == name) {
            return v;
        }
    }
    return std::nullopt;
}

template <typename E>
std::string name_of(const std::vector<std::pair<E, const char*>>& table, E v) {
    for (const auto& [e, name] : table) {
        if (e == v) {
            return name;
        }
    }
    return "?";
}

const std::vector<std::pair<Gender, const char*>>& gender_table() {
    static const std::vector<std::pair<Gender, const char*>> t = {
        {Gender::female, "female"}, {Gender::male, "male"}, {Gender::unspecified, "unspecified"}};
    return t;
}
const std::vector<std::pair<Phenotype, const char*>>& phenotype_table() {
    static const std::vector<std::pair<Phenotype, const char*>> t = {
        {Phenotype::diabetes, "diabetes"},
        {Phenotype::hypertension, "hypertension"},
        {Phenotype::mixed_cardiometabolic, "mixed_cardiometabolic"},
        {Phenotype::none, "none"}};
    return t;
}
const std::vector<std::pair<Disability, const char*>>& disability_table() {
    static const std::vector<std::pair<Disability, const char*>> t = {
        {Disability::physical, "physical"},
        {Disability::sensory_visual, "sensory_visual"},
        {Disability::sensory_auditory, "sensory_auditory"},
        {Disability::cognitive, "cognitive"}};
    return t;
}
const std::vector<std::pair<Neuro, const char*>>& neuro_table() {
    static const std::vector<std::pair<Neuro, const char*>> t = {
        {Neuro::asd, "asd"}, {Neuro::adhd, "adhd"}, {Neuro::none, "none"}};
    return t;
}
const std::vector<std::pair<Modality, const char*>>& modality_table() {
    static const std::vector<std::pair<Modality, const char*>> t = {
        {Modality::audio, "audio"}, {Modality::visual, "visual"}, {Modality::haptic, "haptic"}};
    return t;
}
const std::vector<std::pair<Nutrient, const char*>>& nutrient_table() {
    static const std::vector<std::pair<Nutrient, const char*>> t = {
        {Nutrient::kcal, "kcal"},       {Nutrient::carbs_g, "carbs_g"},
        {Nutrient::sugar_g, "sugar_g"}, {Nutrient::protein_g, "protein_g"},
        {Nutrient::fat_g, "fat_g"},     {Nutrient::sodium_mg, "sodium_mg"},
        {Nutrient::fiber_g, "fiber_g"}};
    return t;
}
const std::vector<std::pair<Texture, const char*>>& texture_table() {
    static const std::vector<std::pair<Texture, const char*>> t = {
        {Texture::soft, "soft"}, {Texture::crunchy, "crunchy"}, {Texture::mixed, "mixed"}};
    return t;
}
const std::vector<std::pair<MealTemperature, const char*>>& temperature_table() {
    static const std::vector<std::pair<MealTemperature, const char*>> t = {
        {MealTemperature::hot, "hot"}, {MealTemperature::cold, "cold"}};
    return t;
}
const std::vector<std::pair<CapSeverity, const char*>>& severity_table() {
    static const std::vector<std::pair<CapSeverity, const char*>> t = {
        {CapSeverity::hard, "hard"}, {CapSeverity::soft, "soft"}};
    return t;
}
const std::vector<std::pair<MealSlot, const char*>>& slot_table() {
    static const std::vector<std::pair<MealSlot, const char*>> t = {
        {MealSlot::breakfast, "breakfast"},
        {MealSlot::lunch, "lunch"},
        {MealSlot::dinner, "dinner"},
        {MealSlot::snack, "snack"}};
    return t;
}

void require_known_fields(const ojson& obj, const std::set<std::string>& allowed,
                          const std::string& path, std::vector<ValidationError>& errors) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) {
            errors.push_back({path + "." + it.key(), "unknown field"});
        }
    }
}

} // namespace

const std::vector<Nutrient>& all_nutrients() {
    static const std::vector<Nutrient> v = {
        Nutrient::kcal,      Nutrient::carbs_g, Nutrient::sugar_g, Nutrient::protein_g,
        Nutrient::fat_g,     Nutrient::sodium_mg, Nutrient::fiber_g};
    return v;
}

const std::vector<Modality>& all_modalities() {
    static const std::vector<Modality> v = {Modality::audio, Modality::visual, Modality::haptic};
    return v;
}

const std::vector<MealSlot>& all_meal_slots() {
    static const std::vector<MealSlot> v = {MealSlot::breakfast, MealSlot::lunch,
                                            MealSlot::dinner, MealSlot::snack};
    return v;
}

std::string to_string(Gender v) { return name_of(gender_table(), v); }
std::string to_string(Phenotype v) { return name_of(phenotype_table(), v); }
std::string to_string(Disability v) { return name_of(disability_table(), v); }
std::string to_string(Neuro v) { return name_of(neuro_table(), v); }
std::string to_string(Modality v) { return name_of(modality_table(), v); }
std::string to_string(Nutrient v) { return name_of(nutrient_table(), v); }
std::string to_string(Texture v) { return name_of(texture_table(), v); }
std::string to_string(MealTemperature v) { return name_of(temperature_table(), v); }
std::string to_string(CapSeverity v) { return name_of(severity_table(), v); }
std::string to_string(MealSlot v) { return name_of(slot_table(), v); }

std::optional<Gender> gender_from_string(const std::string& s) { return lookup(gender_table(), s); }
std::optional<Phenotype> phenotype_from_string(const std::string& s) { return lookup(phenotype_table(), s); }
std::optional<Disability> disability_from_string(const std::string& s) { return lookup(disability_table(), s); }
std::optional<Neuro> neuro_from_string(const std::string& s) { return lookup(neuro_table(), s); }
std::optional<Modality> modality_from_string(const std::string& s) { return lookup(modality_table(), s); }
std::optional<Nutrient> nutrient_from_string(const std::string& s) { return lookup(nutrient_table(), s); }
std::optional<Texture> texture_from_string(const std::string& s) { return lookup(texture_table(), s); }
std::optional<MealTemperature> meal_temperature_from_string(const std::string& s) { return lookup(temperature_table(), s); }
std::optional<CapSeverity> cap_severity_from_string(const std::string& s) { return lookup(severity_table(), s); }
std::optional<MealSlot> meal_slot_from_string(const std::string& s) { return lookup(slot_table(), s); }

double UserProfile::tolerance(Modality m) const {
    auto it = sensory_tolerance.find(m);
    return it == sensory_tolerance.end() ? 0.7 : it->second;
}

void SimClock::advance_to(int day_idx, int minute_of_day) {
    if (day_idx < day || (day_idx == day && minute_of_day < minute)) {
        throw std::logic_error("SimClock moved backwards");
    }
    day = day_idx;
    minute = minute_of_day;
}

std::string Violation::rule_name() const {
    switch (kind) {
    case ViolationKind::per_item:
        return "hard_cap_per_item:" + (nutrient ? to_string(*nutrient) : std::string("?"));
    case ViolationKind::per_day:
        return "hard_cap_per_day:" + (nutrient ? to_string(*nutrient) : std::string("?"));
    case ViolationKind::allergen:
        return "allergen:" + detail;
    }
    return "?";
}

static double nutrient_amount(const NutrientMap& m, Nutrient n) {
    auto it = m.find(n);
    return it == m.end() ? 0.0 : it->second;
}

std::vector<Violation> check_hard_constraints(const UserProfile& profile,
                                              const MealCatalogEntry& meal,
                                              const NutrientMap& intake_so_far) {
    std::vector<Violation> out;
    for (const auto& cap : profile.hard_constraints) {
        if (cap.severity != CapSeverity::hard) {
            continue; // soft caps are the guidance agent's concern
        }
        const double amount = nutrient_amount(meal.nutrition, cap.nutrient);
        if (cap.per_item_max && amount > *cap.per_item_max) {
            std::ostringstream os;
            os << amount << " > per_item_max " << *cap.per_item_max;
            out.push_back({ViolationKind::per_item, cap.nutrient, os.str()});
        }
        if (cap.per_day_max) {
            const double projected = nutrient_amount(intake_so_far, cap.nutrient) + amount;
            if (projected > *cap.per_day_max) {
                std::ostringstream os;
                os << projected << " > per_day_max " << *cap.per_day_max;
                out.push_back({ViolationKind::per_day, cap.nutrient, os.str()});
            }
        }
    }
    for (const auto& allergen : profile.allergens) {
        if (meal.ingredients.count(allergen)) {
            out.push_back({ViolationKind::allergen, std::nullopt, allergen});
        }
    }
    return out;
}

int soft_cap_excess_count(const UserProfile& profile, const MealCatalogEntry& meal,
                          const NutrientMap& intake_so_far, double portion_frac) {
    int count = 0;
    for (const auto& cap : profile.hard_constraints) {
        if (cap.severity != CapSeverity::soft) {
            continue;
        }
        const double amount = nutrient_amount(meal.nutrition, cap.nutrient) * portion_frac;
        if (cap.per_item_max && amount > *cap.per_item_max) {
            ++count;
            continue;
        }
        if (cap.per_day_max &&
            nutrient_amount(intake_so_far, cap.nutrient) + amount > *cap.per_day_max) {
            ++count;
        }
    }
    return count;
}

void add_nutrition(NutrientMap& acc, const NutrientMap& add, double portion_frac) {
    for (const auto& [n, v] : add) {
        acc[n] += v * portion_frac;
    }
}

static std::optional<NutrientCap> parse_cap(const ojson& j, const std::string& path,
                                            std::vector<ValidationError>& errors) {
    if (!j.is_object()) {
        errors.push_back({path, "expected object"});
        return std::nullopt;
    }
    require_known_fields(j, {"nutrient", "per_item_max", "per_day_max", "severity"}, path, errors);
    NutrientCap cap;
    bool ok = true;
    if (!j.contains("nutrient") || !j["nutrient"].is_string()) {
        errors.push_back({path + ".nutrient", "missing or not a string"});
        ok = false;
    } else if (auto n = nutrient_from_string(j["nutrient"].get<std::string>())) {
        cap.nutrient = *n;
    } else {
        errors.push_back({path + ".nutrient", "unknown nutrient"});
        ok = false;
    }
    for (const char* key : {"per_item_max", "per_day_max"}) {
        if (j.contains(key)) {
            if (!j[key].is_number()) {
                errors.push_back({path + "." + key, "not a number"});
                ok = false;
            } else {
                const double v = j[key].get<double>();
                if (v < 0) {
                    errors.push_back({path + "." + key, "negative quantity"});
                    ok = false;
                } else if (std::string(key) == "per_item_max") {
                    cap.per_item_max = v;
                } else {
                    cap.per_day_max = v;
                }
            }
        }
    }
    if (!cap.per_item_max && !cap.per_day_max) {
        errors.push_back({path, "at least one of per_item_max/per_day_max required"});
        ok = false;
    }
    if (j.contains("severity")) {
        if (auto s = j["severity"].is_string()
                         ? cap_severity_from_string(j["severity"].get<std::string>())
                         : std::nullopt) {
            cap.severity = *s;
        } else {
            errors.push_back({path + ".severity", "expected \"hard\" or \"soft\""});
            ok = false;
        }
    }
    return ok ? std::optional<NutrientCap>(cap) : std::nullopt;
}

std::variant<UserProfile, std::vector<ValidationError>> validate_profile(const ojson& raw) {
    std::vector<ValidationError> errors;
    UserProfile p;
    if (!raw.is_object()) {
        errors.push_back({"", "profile must be a JSON object"});
        return errors;
    }
    require_known_fields(raw,
                         {"user_id", "age", "gender", "cultural_diet", "phenotype", "disabilities",
                          "neuro", "sensory_tolerance", "preferences", "texture_aversions",
                          "hard_constraints", "allergens", "medication_slots"},
                         "profile", errors);

    if (!raw.contains("user_id") || !raw["user_id"].is_string() ||
        raw["user_id"].get<std::string>().empty()) {
        errors.push_back({"profile.user_id", "required non-empty string"});
    } else {
        p.user_id = raw["user_id"].get<std::string>();
    }

    if (!raw.contains("age") || !raw["age"].is_number_integer()) {
        errors.push_back({"profile.age", "required integer"});
    } else if (raw["age"].get<int>() < 0) {
        errors.push_back({"profile.age", "must be >= 0"});
    } else {
        p.age = raw["age"].get<int>();
    }

    if (raw.contains("gender")) {
        auto g = raw["gender"].is_string() ? gender_from_string(raw["gender"].get<std::string>())
                                          : std::nullopt;
        if (!g) {
            errors.push_back({"profile.gender", "unknown value"});
        } else {
            p.gender = *g;
        }
    }

    if (raw.contains("cultural_diet")) {
        if (!raw["cultural_diet"].is_array()) {
            errors.push_back({"profile.cultural_diet", "expected array of tags"});
        } else {
            for (const auto& t : raw["cultural_diet"]) {
                if (t.is_string()) {
                    p.cultural_diet.insert(t.get<std::string>());
                } else {
                    errors.push_back({"profile.cultural_diet", "tags must be strings"});
                }
            }
        }
    }

    if (raw.contains("phenotype")) {
        auto ph = raw["phenotype"].is_string()
                      ? phenotype_from_string(raw["phenotype"].get<std::string>())
                      : std::nullopt;
        if (!ph) {
            errors.push_back({"profile.phenotype", "unknown value"});
        } else {
            p.phenotype = *ph;
        }
    }

    if (raw.contains("disabilities")) {
        if (!raw["disabilities"].is_array()) {
            errors.push_back({"profile.disabilities", "expected array"});
        } else {
            for (const auto& d : raw["disabilities"]) {
                auto dv = d.is_string() ? disability_from_string(d.get<std::string>()) : std::nullopt;
                if (!dv) {
                    errors.push_back({"profile.disabilities", "unknown value"});
                } else {
                    p.disabilities.insert(*dv);
                }
            }
        }
    }

    if (raw.contains("neuro")) {
        auto n = raw["neuro"].is_string() ? neuro_from_string(raw["neuro"].get<std::string>())
                                         : std::nullopt;
        if (!n) {
            errors.push_back({"profile.neuro", "unknown value"});
        } else {
            p.neuro = *n;
        }
    }

    if (raw.contains("sensory_tolerance")) {
        if (!raw["sensory_tolerance"].is_object()) {
            errors.push_back({"profile.sensory_tolerance", "expected object"});
        } else {
            for (auto it = raw["sensory_tolerance"].begin(); it != raw["sensory_tolerance"].end();
                 ++it) {
                auto m = modality_from_string(it.key());
                if (!m) {
                    errors.push_back({"profile.sensory_tolerance." + it.key(), "unknown modality"});
                    continue;
                }
                if (!it.value().is_number()) {
                    errors.push_back({"profile.sensory_tolerance." + it.key(), "not a number"});
                    continue;
                }
                const double v = it.value().get<double>();
                if (v < 0.0 || v > 1.0) {
                    errors.push_back({"profile.sensory_tolerance." + it.key(), "out of [0,1]"});
                } else {
                    p.sensory_tolerance[*m] = v;
                }
            }
        }
    }

    if (raw.contains("preferences")) {
        if (!raw["preferences"].is_object()) {
            errors.push_back({"profile.preferences", "expected object"});
        } else {
            for (auto it = raw["preferences"].begin(); it != raw["preferences"].end(); ++it) {
                if (!it.value().is_number()) {
                    errors.push_back({"profile.preferences." + it.key(), "not a number"});
                    continue;
                }
                const double v = it.value().get<double>();
                if (v < 0.0 || v > 1.0) {
                    errors.push_back({"profile.preferences." + it.key(), "out of [0,1]"});
                } else {
                    p.preferences[it.key()] = v;
                }
            }
        }
    }

    if (raw.contains("texture_aversions")) {
        if (!raw["texture_aversions"].is_array()) {
            errors.push_back({"profile.texture_aversions", "expected array"});
        } else {
            for (const auto& t : raw["texture_aversions"]) {
                auto tv = t.is_string() ? texture_from_string(t.get<std::string>()) : std::nullopt;
                if (!tv) {
                    errors.push_back({"profile.texture_aversions", "unknown texture"});
                } else {
                    p.texture_aversions.insert(*tv);
                }
            }
        }
    }

    if (raw.contains("hard_constraints")) {
        if (!raw["hard_constraints"].is_array()) {
            errors.push_back({"profile.hard_constraints", "expected array"});
        } else {
            int i = 0;
            for (const auto& c : raw["hard_constraints"]) {
                auto cap = parse_cap(c, "profile.hard_constraints[" + std::to_string(i) + "]", errors);
                if (cap) {
                    p.hard_constraints.push_back(*cap);
                }
                ++i;
            }
        }
    }

    if (raw.contains("allergens")) {
        if (!raw["allergens"].is_array()) {
            errors.push_back({"profile.allergens", "expected array"});
        } else {
            for (const auto& a : raw["allergens"]) {
                if (a.is_string()) {
                    p.allergens.insert(a.get<std::string>());
                } else {
                    errors.push_back({"profile.allergens", "allergen tags must be strings"});
                }
            }
        }
    }

    if (raw.contains("medication_slots")) {
        if (!raw["medication_slots"].is_array()) {
            errors.push_back({"profile.medication_slots", "expected array"});
        } else {
            int prev = -1;
            int i = 0;
            for (const auto& s : raw["medication_slots"]) {
                const std::string path = "profile.medication_slots[" + std::to_string(i) + "]";
                if (!s.is_number_integer()) {
                    errors.push_back({path, "expected integer minute"});
                } else {
                    const int v = s.get<int>();
                    if (v < 0 || v >= 1440) {
                        errors.push_back({path, "minute out of [0,1440)"});
                    } else if (v <= prev) {
                        errors.push_back({path, "not strictly increasing"});
                    } else {
                        p.medication_slots.push_back(v);
                        prev = v;
                    }
                }
                ++i;
            }
        }
    }

    if (!errors.empty()) {
        return errors;
    }
    return p;
}

ojson profile_to_json(const UserProfile& p) {
    ojson j;
    j["user_id"] = p.user_id;
    j["age"] = p.age;
    j["gender"] = to_string(p.gender);
    j["cultural_diet"] = ojson::array();
    for (const auto& t : p.cultural_diet) j["cultural_diet"].push_back(t);
    j["phenotype"] = to_string(p.phenotype);
    j["disabilities"] = ojson::array();
    for (const auto& d : p.disabilities) j["disabilities"].push_back(to_string(d));
    j["neuro"] = to_string(p.neuro);
    j["sensory_tolerance"] = ojson::object();
    for (const auto& [m, v] : p.sensory_tolerance) j["sensory_tolerance"][to_string(m)] = v;
    j["preferences"] = ojson::object();
    for (const auto& [k, v] : p.preferences) j["preferences"][k] = v;
    j["texture_aversions"] = ojson::array();
    for (const auto& t : p.texture_aversions) j["texture_aversions"].push_back(to_string(t));
    j["hard_constraints"] = ojson::array();
    for (const auto& c : p.hard_constraints) {
        ojson cj;
        cj["nutrient"] = to_string(c.nutrient);
        if (c.per_item_max) cj["per_item_max"] = *c.per_item_max;
        if (c.per_day_max) cj["per_day_max"] = *c.per_day_max;
        cj["severity"] = to_string(c.severity);
        j["hard_constraints"].push_back(cj);
    }
    j["allergens"] = ojson::array();
    for (const auto& a : p.allergens) j["allergens"].push_back(a);
    j["medication_slots"] = p.medication_slots;
    return j;
}

ojson nutrient_map_to_json(const NutrientMap& m) {
    ojson j = ojson::object();
    for (const auto& [n, v] : m) {
        j[to_string(n)] = v;
    }
    return j;
}

NutrientMap nutrient_map_from_json(const ojson& j) {
    if (!j.is_object()) {
        throw std::invalid_argument("nutrition: expected object");
    }
    NutrientMap m;
    for (auto it = j.begin(); it != j.end(); ++it) {
        auto n = nutrient_from_string(it.key());
        if (!n) {
            throw std::invalid_argument("nutrition: unknown nutrient " + it.key());
        }
        const double v = it.value().get<double>();
        if (v < 0) {
            throw std::invalid_argument("nutrition." + it.key() + ": negative quantity");
        }
        m[*n] = v;
    }
    return m;
}

ojson meal_to_json(const MealCatalogEntry& m) {
    ojson j;
    j["meal_id"] = m.meal_id;
    j["name"] = m.name;
    j["nutrition"] = nutrient_map_to_json(m.nutrition);
    j["glycemic_index"] = m.glycemic_index;
    j["cuisine_tags"] = ojson::array();
    for (const auto& t : m.cuisine_tags) j["cuisine_tags"].push_back(t);
    j["texture"] = to_string(m.texture);
    j["temperature"] = to_string(m.temperature);
    j["ingredients"] = ojson::array();
    for (const auto& t : m.ingredients) j["ingredients"].push_back(t);
    j["prep_steps"] = m.prep_steps;
    return j;
}

MealCatalogEntry meal_from_json(const ojson& j) {
    static const std::set<std::string> allowed = {"meal_id",      "name",       "nutrition",
                                                  "glycemic_index", "cuisine_tags", "texture",
                                                  "temperature",  "ingredients", "prep_steps"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key())) {
            throw std::invalid_argument("meal: unknown field " + it.key());
        }
    }
    MealCatalogEntry m;
    m.meal_id = j.at("meal_id").get<std::string>();
    m.name = j.at("name").get<std::string>();
    m.nutrition = nutrient_map_from_json(j.at("nutrition"));
    m.glycemic_index = j.at("glycemic_index").get<double>();
    if (m.glycemic_index < 0 || m.glycemic_index > 110) {
        throw std::invalid_argument("meal " + m.meal_id + ": glycemic_index out of [0,110]");
    }
    for (const auto& t : j.at("cuisine_tags")) m.cuisine_tags.insert(t.get<std::string>());
    if (auto tx = texture_from_string(j.at("texture").get<std::string>())) {
        m.texture = *tx;
    } else {
        throw std::invalid_argument("meal " + m.meal_id + ": unknown texture");
    }
    if (auto tp = meal_temperature_from_string(j.at("temperature").get<std::string>())) {
        m.temperature = *tp;
    } else {
        throw std::invalid_argument("meal " + m.meal_id + ": unknown temperature");
    }
    if (j.contains("ingredients")) {
        for (const auto& t : j.at("ingredients")) m.ingredients.insert(t.get<std::string>());
    }
    m.prep_steps = j.at("prep_steps").get<std::vector<std::string>>();
    if (m.prep_steps.empty()) {
        throw std::invalid_argument("meal " + m.meal_id + ": prep_steps must be non-empty");
    }
    return m;
}

ojson guideline_to_json(const GuidelineTarget& g) {
    ojson j;
    j["per_day"] = nutrient_map_to_json(g.per_day);
    j["tolerance_frac"] = g.tolerance_frac;
    return j;
}

GuidelineTarget guideline_from_json(const ojson& j) {
    GuidelineTarget g;
    g.per_day = nutrient_map_from_json(j.at("per_day"));
    for (const auto& [n, v] : g.per_day) {
        if (v <= 0) {
            throw std::invalid_argument("guideline.per_day." + to_string(n) + ": must be > 0");
        }
    }
    g.tolerance_frac = j.at("tolerance_frac").get<double>();
    if (g.tolerance_frac <= 0 || g.tolerance_frac > 1) {
        throw std::invalid_argument("guideline.tolerance_frac out of (0,1]");
    }
    return g;
}

} // namespace carecoord
