#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace carecoord {

using ojson = nlohmann::ordered_json;

enum class Gender { female, male, unspecified };
enum class Phenotype { diabetes, hypertension, mixed_cardiometabolic, none };
enum class Disability { physical, sensory_visual, sensory_auditory, cognitive };
enum class Neuro { asd, adhd, none };
enum class Modality { audio, visual, haptic };
enum class Nutrient { kcal, carbs_g, sugar_g, protein_g, fat_g, sodium_mg, fiber_g };
enum class Texture { soft, crunchy, mixed };
enum class MealTemperature { hot, cold };
enum class CapSeverity { hard, soft };
enum class MealSlot { breakfast, lunch, dinner, snack };

constexpr int kNutrientCount = 7;
constexpr int kModalityCount = 3;
constexpr int kMealSlotCount = 4;

const std::vector<Nutrient>& all_nutrients();
const std::vector<Modality>& all_modalities();
const std::vector<MealSlot>& all_meal_slots();

std::string to_string(Gender v);
std::string to_string(Phenotype v);
std::string to_string(Disability v);
std::string to_string(Neuro v);
std::string to_string(Modality v);
std::string to_string(Nutrient v);
std::string to_string(Texture v);
std::string to_string(MealTemperature v);
std::string to_string(CapSeverity v);
std::string to_string(MealSlot v);

std::optional<Gender> gender_from_string(const std::string& s);
std::optional<Phenotype> phenotype_from_string(const std::string& s);
std::optional<Disability> disability_from_string(const std::string& s);
std::optional<Neuro> neuro_from_string(const std::string& s);
std::optional<Modality> modality_from_string(const std::string& s);
std::optional<Nutrient> nutrient_from_string(const std::string& s);
std::optional<Texture> texture_from_string(const std::string& s);
std::optional<MealTemperature> meal_temperature_from_string(const std::string& s);
std::optional<CapSeverity> cap_severity_from_string(const std::string& s);
std::optional<MealSlot> meal_slot_from_string(const std::string& s);

using NutrientMap = std::map<Nutrient, double>;

struct NutrientCap {
    Nutrient nutrient = Nutrient::kcal;
    std::optional<double> per_item_max;
    std::optional<double> per_day_max;
    CapSeverity severity = CapSeverity::hard;
};

struct UserProfile {
    std::string user_id;
    int age = 0;
    Gender gender = Gender::unspecified;
    std::set<std::string> cultural_diet;
    Phenotype phenotype = Phenotype::none;
    std::set<Disability> disabilities;
    Neuro neuro = Neuro::none;
    std::map<Modality, double> sensory_tolerance; // missing key reads as 0.7
    std::map<std::string, double> preferences;    // cuisine tag -> weight in [0,1]
    std::set<Texture> texture_aversions;
    std::vector<NutrientCap> hard_constraints;    // holds both hard and soft caps
    std::set<std::string> allergens;
    std::vector<int> medication_slots;            // minutes of day, strictly increasing

    double tolerance(Modality m) const;
};

struct MealCatalogEntry {
    std::string meal_id;
    std::string name;
    NutrientMap nutrition;        // per serving
    double glycemic_index = 0.0;  // [0, 110]
    std::set<std::string> cuisine_tags;
    Texture texture = Texture::soft;
    MealTemperature temperature = MealTemperature::hot;
    std::set<std::string> ingredients; // allergen-relevant tags
    std::vector<std::string> prep_steps;
};

struct GuidelineTarget {
    NutrientMap per_day;          // targets, all > 0
    double tolerance_frac = 0.2;  // (0, 1]
};

struct PhysiologicalSample {
    int t = 0;              // simulation minute of day
    double glucose = 0.0;   // mg/dL
    double heart_rate = 0.0;
    double hydration = 0.0; // ml cumulative within day
    double steps = 0.0;     // cumulative within day
};

struct SimClock {
    int day = 0;
    int minute = 0;           // [0, 1440)
    std::uint64_t tick = 0;   // strictly increasing event counter

    void advance_to(int day_idx, int minute_of_day);
    std::uint64_t next_tick() { return tick++; }
};

enum class ViolationKind { per_item, per_day, allergen };

struct Violation {
    ViolationKind kind = ViolationKind::per_item;
    std::optional<Nutrient> nutrient; // absent for allergen hits
    std::string detail;

    std::string rule_name() const;
};

struct ValidationError {
    std::string field;
    std::string message;
};

// One Violation per breached hard cap or allergen hit; soft caps are
// ignored here. Empty result means the meal is admissible.
std::vector<Violation> check_hard_constraints(const UserProfile& profile,
                                              const MealCatalogEntry& meal,
                                              const NutrientMap& intake_so_far);

// Count of soft caps the meal would breach (per-item, or per-day given
// intake_so_far). Used by the planner reward and the guidance agent.
int soft_cap_excess_count(const UserProfile& profile,
                          const MealCatalogEntry& meal,
                          const NutrientMap& intake_so_far,
                          double portion_frac = 1.0);

std::variant<UserProfile, std::vector<ValidationError>> validate_profile(const ojson& raw);

ojson profile_to_json(const UserProfile& p);
ojson meal_to_json(const MealCatalogEntry& m);
MealCatalogEntry meal_from_json(const ojson& j); // throws std::invalid_argument
ojson guideline_to_json(const GuidelineTarget& g);
GuidelineTarget guideline_from_json(const ojson& j);
ojson nutrient_map_to_json(const NutrientMap& m);
NutrientMap nutrient_map_from_json(const ojson& j);

void add_nutrition(NutrientMap& acc, const NutrientMap& add, double portion_frac = 1.0);

} // namespace carecoord
