#pragma once

// Builders shared by the unit suites. Each returns a small, fully
// specified object so individual tests only state what they vary.

#include <string>
#include <vector>

#include "carecoord/domain.hpp"

namespace testutil {

inline carecoord::MealCatalogEntry meal(std::string id, carecoord::NutrientMap nutrition,
                                        double gi = 40.0) {
    carecoord::MealCatalogEntry m;
    m.meal_id = std::move(id);
    m.name = m.meal_id;
    m.nutrition = std::move(nutrition);
    m.glycemic_index = gi;
    m.texture = carecoord::Texture::soft;
    m.temperature = carecoord::MealTemperature::hot;
    return m;
}

inline carecoord::UserProfile plain_profile(std::string uid = "u1") {
    carecoord::UserProfile p;
    p.user_id = std::move(uid);
    p.age = 34;
    return p;
}

inline carecoord::UserProfile diabetic_profile(std::string uid = "u1") {
    auto p = plain_profile(std::move(uid));
    p.phenotype = carecoord::Phenotype::diabetes;
    carecoord::NutrientCap cap;
    cap.nutrient = carecoord::Nutrient::sugar_g;
    cap.per_item_max = 25.0;
    cap.per_day_max = 50.0;
    cap.severity = carecoord::CapSeverity::hard;
    p.hard_constraints.push_back(cap);
    p.medication_slots = {500, 1150};
    return p;
}

} // namespace testutil
