#include "carecoord/catalog.hpp"

#include <array>
#include <stdexcept>

namespace carecoord {

Catalog::Catalog(std::vector<MealCatalogEntry> entries) : entries_(std::move(entries)) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (!index_.emplace(entries_[i].meal_id, i).second) {
            throw std::invalid_argument("catalog: duplicate meal_id " + entries_[i].meal_id);
        }
    }
}

const MealCatalogEntry* Catalog::find(const std::string& meal_id) const {
    auto it = index_.find(meal_id);
    return it == index_.end() ? nullptr : &entries_[it->second];
}

const MealCatalogEntry& Catalog::at(const std::string& meal_id) const {
    const auto* e = find(meal_id);
    if (!e) {
        throw std::out_of_range("catalog: unknown meal_id " + meal_id);
    }
    return *e;
}

ojson Catalog::to_json() const {
    ojson j = ojson::array();
    for (const auto& e : entries_) {
        j.push_back(meal_to_json(e));
    }
    return j;
}

Catalog Catalog::from_json(const ojson& j) {
    if (!j.is_array()) {
        throw std::invalid_argument("catalog: expected a JSON array of meals");
    }
    std::vector<MealCatalogEntry> entries;
    entries.reserve(j.size());
    for (const auto& mj : j) {
        entries.push_back(meal_from_json(mj));
    }
    return Catalog(std::move(entries));
}

namespace {

MealCatalogEntry entry(const char* id, const char* name,
                       std::array<double, 7> macros, // kcal, carbs, sugar, protein, fat, sodium, fiber
                       double gi, std::set<std::string> cuisines, Texture tx, MealTemperature tp,
                       std::set<std::string> ingredients, std::vector<std::string> steps) {
    MealCatalogEntry m;
    m.meal_id = id;
    m.name = name;
    const auto& ns = all_nutrients();
    for (int i = 0; i < kNutrientCount; ++i) {
        m.nutrition[ns[i]] = macros[static_cast<std::size_t>(i)];
    }
    m.glycemic_index = gi;
    m.cuisine_tags = std::move(cuisines);
    m.texture = tx;
    m.temperature = tp;
    m.ingredients = std::move(ingredients);
    m.prep_steps = std::move(steps);
    return m;
}

} // namespace

Catalog default_catalog() {
    using T = Texture;
    using P = MealTemperature;
    std::vector<MealCatalogEntry> e;
    e.reserve(76);

    // Breakfast-sized (~350-520 kcal)
    e.push_back(entry("oatmeal", "Oatmeal with berries", {480, 60, 10, 16, 14, 300, 8}, 55,
                      {"western"}, T::soft, P::hot, {"oats", "dairy"},
                      {"Boil two cups of water", "Stir in the oats and simmer for five minutes",
                       "Top with berries and serve"}));
    e.push_back(entry("greek_yogurt_bowl", "Greek yogurt bowl", {420, 40, 22, 24, 16, 200, 5}, 40,
                      {"mediterranean"}, T::soft, P::cold, {"dairy"},
                      {"Spoon the yogurt into a bowl", "Add honey and walnuts then stir gently"}));
    e.push_back(entry("masala_omelette", "Masala omelette", {450, 18, 4, 26, 30, 550, 3}, 30,
                      {"south_asian"}, T::soft, P::hot, {"egg"},
                      {"Whisk the eggs with chopped onion and chili",
                       "Heat oil in a pan then pour in the eggs", "Cook until set and fold in half"}));
    e.push_back(entry("congee_chicken", "Chicken congee", {460, 65, 3, 22, 10, 600, 2}, 78,
                      {"east_asian"}, T::soft, P::hot, {},
                      {"Simmer rice in broth for forty minutes", "Shred the chicken and stir it in",
                       "Garnish with scallions"}));
    e.push_back(entry("huevos_rancheros", "Huevos rancheros", {520, 45, 6, 24, 26, 650, 7}, 46,
                      {"latin"}, T::mixed, P::hot, {"egg"},
                      {"Warm the tortillas", "Fry the eggs and place them on top",
                       "Spoon salsa over everything and serve"}));
    e.push_back(entry("shakshuka", "Shakshuka", {430, 30, 12, 22, 24, 620, 6}, 35,
                      {"middle_eastern"}, T::soft, P::hot, {"egg"},
                      {"Simmer the tomato sauce with paprika",
                       "Crack the eggs into the sauce then cover and cook until just set"}));
    e.push_back(entry("toast_scrambled_eggs", "Whole-grain toast with scrambled eggs",
                      {470, 42, 6, 24, 22, 520, 6}, 50, {"western"}, T::crunchy, P::hot,
                      {"gluten", "egg"},
                      {"Toast the bread", "Scramble the eggs over low heat and season lightly"}));
    e.push_back(entry("fruit_smoothie", "Fruit smoothie", {350, 70, 45, 8, 4, 100, 6}, 55,
                      {"western"}, T::soft, P::cold, {"dairy"},
                      {"Add fruit and yogurt to the blender", "Blend until smooth and pour"}));
    e.push_back(entry("cottage_cheese_bowl", "Cottage cheese bowl", {310, 18, 12, 28, 12, 480, 1},
                      27, {"western"}, T::soft, P::cold, {"dairy"},
                      {"Spoon cottage cheese into a bowl", "Top with sliced peach"}));
    e.push_back(entry("paratha_egg", "Paratha with fried egg", {520, 55, 4, 18, 26, 480, 5}, 58,
                      {"south_asian"}, T::mixed, P::hot, {"gluten", "egg"},
                      {"Cook the paratha on a hot griddle", "Fry the egg and slide it on top"}));

    // Lunch-sized (~550-760 kcal)
    e.push_back(entry("grilled_chicken_quinoa", "Grilled chicken with quinoa",
                      {680, 70, 8, 45, 20, 600, 9}, 45, {"mediterranean"}, T::mixed, P::hot, {},
                      {"Season the chicken and grill eight minutes per side",
                       "Simmer the quinoa until fluffy", "Slice the chicken over the quinoa"}));
    e.push_back(entry("lentil_curry_rice", "Lentil curry with rice", {720, 100, 9, 26, 18, 700, 14},
                      58, {"south_asian"}, T::soft, P::hot, {},
                      {"Simmer lentils with curry paste for twenty minutes",
                       "Steam the rice separately then serve the curry over it"}));
    e.push_back(entry("chicken_teriyaki_bowl", "Chicken teriyaki bowl",
                      {700, 90, 20, 38, 16, 900, 4}, 62, {"east_asian"}, T::mixed, P::hot, {"soy"},
                      {"Sear the chicken in a hot pan", "Add teriyaki sauce and glaze",
                       "Serve over steamed rice"}));
    e.push_back(entry("burrito_bowl", "Burrito bowl", {740, 85, 8, 34, 26, 850, 12}, 50, {"latin"},
                      T::mixed, P::hot, {"dairy"},
                      {"Layer rice and beans in a bowl", "Add grilled peppers and cheese",
                       "Finish with salsa"}));
    e.push_back(entry("falafel_wrap", "Falafel wrap", {650, 78, 7, 22, 26, 750, 10}, 52,
                      {"middle_eastern"}, T::crunchy, P::hot, {"gluten"},
                      {"Fry the falafel until golden", "Warm the flatbread then fill with falafel and salad",
                       "Drizzle with tahini"}));
    e.push_back(entry("turkey_sandwich", "Turkey sandwich", {620, 60, 9, 36, 22, 950, 6}, 55,
                      {"western"}, T::crunchy, P::cold, {"gluten"},
                      {"Spread mustard on the bread", "Layer turkey and lettuce and close the sandwich"}));
    e.push_back(entry("pasta_bolognese", "Pasta bolognese", {760, 95, 12, 30, 24, 800, 8}, 70,
                      {"italian", "western"}, T::soft, P::hot, {"gluten"},
                      {"Boil the pasta until al dente", "Simmer the meat sauce for fifteen minutes",
                       "Toss the pasta with the sauce and serve"}));
    e.push_back(entry("minestrone_soup", "Minestrone soup", {420, 55, 10, 16, 10, 700, 11}, 39,
                      {"italian", "mediterranean"}, T::soft, P::hot, {},
                      {"Saute the vegetables in olive oil", "Add broth and beans then simmer twenty minutes",
                       "Ladle into bowls"}));
    e.push_back(entry("miso_salmon_rice", "Miso salmon with rice", {690, 75, 6, 40, 22, 880, 4}, 60,
                      {"east_asian"}, T::soft, P::hot, {"fish", "soy"},
                      {"Brush the salmon with miso glaze", "Bake for twelve minutes",
                       "Serve over rice"}));
    e.push_back(entry("paneer_tikka_salad", "Paneer tikka salad", {560, 30, 10, 30, 34, 640, 6}, 38,
                      {"south_asian"}, T::mixed, P::hot, {"dairy"},
                      {"Marinate the paneer in spiced yogurt", "Grill the paneer until charred",
                       "Toss with salad greens"}));
    e.push_back(entry("fish_tacos", "Fish tacos", {640, 60, 6, 32, 28, 700, 8}, 48, {"latin"},
                      T::crunchy, P::hot, {"fish", "gluten"},
                      {"Pan-fry the fish until flaky", "Warm the tortillas and fill with fish and slaw"}));
    e.push_back(entry("chicken_shawarma_plate", "Chicken shawarma plate",
                      {700, 65, 8, 42, 28, 820, 7}, 45, {"middle_eastern"}, T::mixed, P::hot, {},
                      {"Roast the spiced chicken", "Slice thin and plate with rice and pickles"}));
    e.push_back(entry("shrimp_fried_rice", "Shrimp fried rice", {710, 88, 8, 28, 24, 1000, 3}, 65,
                      {"east_asian"}, T::mixed, P::hot, {"shellfish", "soy", "egg"},
                      {"Stir-fry the shrimp and set aside", "Fry the rice with egg and soy sauce",
                       "Return the shrimp and toss"}));
    e.push_back(entry("sushi_roll_set", "Sushi roll set", {550, 80, 10, 20, 12, 700, 4}, 55,
                      {"east_asian"}, T::soft, P::cold, {"fish", "soy"},
                      {"Spread rice over the nori", "Add fish and cucumber then roll tightly",
                       "Slice into pieces"}));
    e.push_back(entry("tabbouleh", "Tabbouleh", {330, 45, 5, 8, 12, 320, 8}, 45, {"middle_eastern"},
                      T::mixed, P::cold, {"gluten"},
                      {"Soak the bulgur until tender", "Chop parsley and tomato finely",
                       "Toss with lemon juice and olive oil"}));
    e.push_back(entry("black_bean_soup", "Black bean soup", {390, 60, 6, 20, 6, 580, 15}, 30,
                      {"latin"}, T::soft, P::hot, {},
                      {"Saute onion and garlic", "Add beans and broth then simmer twenty-five minutes",
                       "Blend half the soup and stir back in"}));
    e.push_back(entry("grilled_halloumi_salad", "Grilled halloumi salad",
                      {450, 20, 8, 22, 32, 720, 5}, 28, {"mediterranean"}, T::mixed, P::hot,
                      {"dairy"},
                      {"Grill the halloumi slices until striped", "Arrange over greens and dress"}));
    e.push_back(entry("chicken_noodle_soup", "Chicken noodle soup", {380, 40, 5, 24, 12, 850, 4},
                      48, {"western"}, T::soft, P::hot, {"gluten", "egg"},
                      {"Simmer chicken in broth", "Add noodles and cook until tender"}));
    e.push_back(entry("pho_beef", "Beef pho", {560, 70, 8, 30, 12, 1100, 3}, 57, {"east_asian"},
                      T::soft, P::hot, {"gluten"},
                      {"Heat the broth with star anise", "Pour over noodles and raw beef slices",
                       "Top with herbs"}));

    // Dinner-sized (~520-660 kcal)
    e.push_back(entry("baked_cod_vegetables", "Baked cod with vegetables",
                      {540, 40, 9, 40, 20, 500, 8}, 35, {"western"}, T::soft, P::hot, {"fish"},
                      {"Season the cod", "Roast with vegetables for eighteen minutes"}));
    e.push_back(entry("chana_masala", "Chana masala", {580, 80, 11, 22, 16, 650, 13}, 42,
                      {"south_asian"}, T::soft, P::hot, {},
                      {"Fry the spices in oil", "Add chickpeas and tomato then simmer fifteen minutes",
                       "Finish with lemon"}));
    e.push_back(entry("stir_fry_tofu", "Stir-fried tofu with vegetables",
                      {560, 55, 12, 28, 24, 780, 7}, 44, {"east_asian"}, T::crunchy, P::hot, {"soy"},
                      {"Press and cube the tofu", "Stir-fry with vegetables over high heat",
                       "Add sauce and toss to coat"}));
    e.push_back(entry("chicken_fajitas", "Chicken fajitas", {610, 55, 9, 38, 24, 720, 8}, 46,
                      {"latin"}, T::mixed, P::hot, {},
                      {"Sear the chicken strips", "Add peppers and onions then cook until soft",
                       "Serve with warm tortillas"}));
    e.push_back(entry("grilled_lamb_couscous", "Grilled lamb with couscous",
                      {650, 60, 6, 38, 28, 600, 6}, 53, {"middle_eastern"}, T::mixed, P::hot,
                      {"gluten"},
                      {"Grill the lamb to medium", "Steam the couscous and fluff with a fork"}));
    e.push_back(entry("mediterranean_salmon", "Mediterranean salmon", {590, 35, 7, 40, 30, 480, 7},
                      32, {"mediterranean"}, T::soft, P::hot, {"fish"},
                      {"Rub the salmon with herbs", "Bake with olives and tomatoes for fifteen minutes"}));
    e.push_back(entry("veggie_stir_noodles", "Vegetable stir-fried noodles",
                      {600, 85, 10, 18, 18, 900, 6}, 64, {"east_asian"}, T::soft, P::hot,
                      {"gluten", "soy"},
                      {"Boil the noodles briefly", "Stir-fry with vegetables and sauce"}));
    e.push_back(entry("beef_stew_potatoes", "Beef stew with potatoes", {640, 55, 8, 36, 28, 700, 7},
                      60, {"western"}, T::soft, P::hot, {},
                      {"Brown the beef in batches", "Add potatoes and stock then simmer one hour"}));
    e.push_back(entry("dal_tadka_roti", "Dal tadka with roti", {570, 75, 6, 24, 16, 600, 12}, 48,
                      {"south_asian"}, T::soft, P::hot, {"gluten"},
                      {"Boil the dal until soft", "Temper spices in ghee and pour over",
                       "Serve with fresh roti"}));
    e.push_back(entry("quinoa_stuffed_peppers", "Quinoa-stuffed peppers",
                      {520, 65, 12, 18, 18, 450, 10}, 40, {"mediterranean"}, T::mixed, P::hot, {},
                      {"Cook the quinoa", "Fill the peppers and bake for twenty-five minutes"}));
    e.push_back(entry("white_rice_curry", "White rice with vegetable curry",
                      {650, 110, 8, 14, 14, 550, 4}, 73, {"south_asian"}, T::soft, P::hot, {},
                      {"Steam the rice", "Simmer the curry and spoon it over"}));
    e.push_back(entry("steamed_lentils", "Steamed lentils", {260, 40, 2, 16, 2, 15, 10}, 29,
                      {"south_asian", "mediterranean"}, T::soft, P::hot, {},
                      {"Rinse the lentils and pick out any debris",
                       "Simmer in salted water for twenty minutes then drain well",
                       "Season with olive oil and serve warm"}));

    // Snack-sized (~150-240 kcal)
    e.push_back(entry("apple_peanut_butter", "Apple with peanut butter", {210, 25, 17, 6, 10, 80, 4},
                      40, {"western"}, T::crunchy, P::cold, {"peanut"},
                      {"Slice the apple", "Spread peanut butter on each slice"}));
    e.push_back(entry("hummus_carrots", "Hummus with carrot sticks", {180, 20, 6, 6, 8, 260, 6}, 15,
                      {"middle_eastern"}, T::crunchy, P::cold, {},
                      {"Peel the carrots and cut into sticks", "Serve with hummus"}));
    e.push_back(entry("mixed_nuts", "Mixed nuts", {220, 8, 2, 7, 19, 90, 3}, 22, {"western"},
                      T::crunchy, P::cold, {"peanut"}, {"Portion a small handful into a cup"}));
    e.push_back(entry("rice_cakes_avocado", "Rice cakes with avocado", {190, 24, 1, 4, 9, 150, 4},
                      78, {"western"}, T::crunchy, P::cold, {},
                      {"Mash the avocado", "Spread over the rice cakes and add a pinch of salt"}));
    e.push_back(entry("edamame_cup", "Edamame cup", {160, 12, 3, 14, 6, 220, 5}, 18, {"east_asian"},
                      T::soft, P::hot, {"soy"}, {"Steam the edamame for five minutes", "Salt lightly"}));
    e.push_back(entry("fruit_chaat", "Fruit chaat", {170, 40, 28, 3, 1, 60, 5}, 55, {"south_asian"},
                      T::mixed, P::cold, {},
                      {"Dice the fruit", "Toss with chaat masala and lime juice"}));
    e.push_back(entry("yogurt_berries", "Yogurt with berries", {180, 22, 14, 10, 5, 85, 3}, 35,
                      {"mediterranean"}, T::soft, P::cold, {"dairy"},
                      {"Spoon yogurt into a glass", "Layer with berries"}));
    e.push_back(entry("corn_tortilla_chips", "Corn tortilla chips with salsa",
                      {240, 30, 1, 3, 12, 320, 3}, 63, {"latin"}, T::crunchy, P::cold, {},
                      {"Pour chips into a bowl", "Serve with salsa"}));
    e.push_back(entry("dates_walnuts", "Dates with walnuts", {230, 38, 30, 4, 9, 5, 4}, 50,
                      {"middle_eastern"}, T::mixed, P::cold, {},
                      {"Slit the dates", "Tuck a walnut half into each"}));
    e.push_back(entry("granola_bar", "Granola bar", {210, 32, 18, 5, 7, 140, 3}, 65, {"western"},
                      T::crunchy, P::cold, {"gluten", "peanut"}, {"Unwrap and serve"}));

    // Convenience items (cap and guard pressure)
    e.push_back(entry("candy_bar", "Candy bar", {280, 44, 40, 3, 12, 50, 1}, 70, {"western"},
                      T::mixed, P::cold, {"dairy", "peanut"}, {"Unwrap and serve"}));
    e.push_back(entry("soda_cola", "Cola", {150, 39, 39, 0, 0, 15, 0}, 63, {"western"}, T::soft,
                      P::cold, {}, {"Pour over ice"}));
    e.push_back(entry("instant_ramen", "Instant ramen", {450, 62, 4, 10, 18, 1800, 3}, 73,
                      {"east_asian"}, T::soft, P::hot, {"gluten", "soy"},
                      {"Boil water", "Add noodles and seasoning then cook three minutes"}));
    e.push_back(entry("frozen_pizza_slice", "Frozen pizza slice", {380, 42, 6, 15, 17, 820, 3}, 60,
                      {"italian", "western"}, T::mixed, P::hot, {"gluten", "dairy"},
                      {"Bake at 220C for twelve minutes", "Slice and serve"}));
    e.push_back(entry("donut_glazed", "Glazed donut", {310, 38, 21, 4, 16, 260, 1}, 76, {"western"},
                      T::soft, P::cold, {"gluten", "egg", "dairy"}, {"Plate and serve"}));
    e.push_back(entry("potato_fries", "Potato fries", {365, 48, 1, 4, 17, 400, 4}, 75, {"western"},
                      T::crunchy, P::hot, {},
                      {"Cut potatoes into batons", "Fry until golden and salt immediately"}));
    e.push_back(entry("sweetened_cereal", "Sweetened cereal with milk", {390, 85, 35, 6, 4, 350, 2},
                      77, {"western"}, T::crunchy, P::cold, {"gluten", "dairy"},
                      {"Pour cereal into a bowl", "Add cold milk"}));
    e.push_back(entry("white_bread_jam", "White bread with jam", {320, 62, 24, 7, 4, 380, 2}, 71,
                      {"western"}, T::soft, P::cold, {"gluten"},
                      {"Toast the bread lightly", "Spread jam evenly"}));
    e.push_back(entry("veggie_omelette_wrap", "Veggie omelette wrap", {480, 35, 5, 28, 24, 560, 5},
                      40, {"western"}, T::soft, P::hot, {"egg", "gluten"},
                      {"Cook a thin omelette", "Roll it in a wrap with spinach"}));

    // Sides, drinks and desserts. None of these covers a main slot on its
    // own; they exist so that an unplanned pick has real nutritional cost.
    e.push_back(entry("garden_side_salad", "Garden side salad", {35, 7, 3, 1.5, 0.3, 55, 2.5}, 15,
                      {}, T::crunchy, P::cold, {},
                      {"Toss the greens with sliced cucumber and tomato", "Dress lightly"}));
    e.push_back(entry("black_coffee", "Black coffee", {5, 0, 0, 0.3, 0, 5, 0}, 0, {}, T::soft,
                      P::hot, {}, {"Brew the coffee", "Serve without milk or sugar"}));
    e.push_back(entry("herbal_tea", "Herbal tea", {2, 0.5, 0, 0, 0, 2, 0}, 0, {}, T::soft, P::hot,
                      {}, {"Steep the tea bag in hot water for three minutes"}));
    e.push_back(entry("boiled_egg", "Boiled egg", {78, 0.6, 0.6, 6, 5, 62, 0}, 0, {}, T::soft,
                      P::hot, {"egg"}, {"Boil the egg for eight minutes", "Peel and serve"}));
    e.push_back(entry("cucumber_sticks", "Cucumber sticks", {16, 4, 2, 0.7, 0.1, 2, 0.5}, 15, {},
                      T::crunchy, P::cold, {}, {"Cut the cucumber into sticks"}));
    e.push_back(entry("plain_rice_cup", "Plain rice cup", {205, 45, 0.1, 4, 0.4, 2, 0.6}, 73,
                      {"east_asian"}, T::soft, P::hot, {},
                      {"Rinse the rice", "Steam until tender"}));
    e.push_back(entry("buttered_toast", "Buttered toast", {160, 17, 2, 3, 9, 230, 1}, 70,
                      {"western"}, T::crunchy, P::hot, {"gluten", "dairy"},
                      {"Toast the bread", "Spread butter while warm"}));
    e.push_back(entry("fruit_jelly_cup", "Fruit jelly cup", {90, 22, 18, 0.1, 0, 35, 0.2}, 62, {},
                      T::soft, P::cold, {}, {"Chill the jelly cup", "Serve with a spoon"}));
    e.push_back(entry("vanilla_ice_cream_cup", "Vanilla ice cream cup",
                      {270, 31, 28, 4.6, 14, 105, 0.9}, 62, {"western"}, T::soft, P::cold,
                      {"dairy"}, {"Scoop the ice cream into a cup"}));
    e.push_back(entry("cola_can", "Cola", {140, 39, 39, 0, 0, 45, 0}, 63, {}, T::soft, P::cold, {},
                      {"Chill the can", "Pour over ice"}));
    e.push_back(entry("potato_chips_small", "Potato chips, small bag", {152, 15, 0.2, 2, 10, 168, 1.4},
                      56, {}, T::crunchy, P::cold, {},
                      {"Open the bag", "Serve in a bowl"}));
    e.push_back(entry("pickled_vegetables", "Pickled vegetables", {30, 6, 3, 1, 0.2, 780, 1.5}, 20,
                      {"east_asian"}, T::crunchy, P::cold, {},
                      {"Drain the pickles", "Arrange on a small plate"}));
    e.push_back(entry("plain_yogurt_small", "Plain yogurt, small", {90, 7, 7, 5, 4.5, 65, 0}, 35,
                      {}, T::soft, P::cold, {"dairy"}, {"Spoon the yogurt into a bowl"}));
    e.push_back(entry("saltine_crackers", "Saltine crackers", {130, 22, 0.5, 3, 3.5, 230, 1}, 74,
                      {"western"}, T::crunchy, P::cold, {"gluten"},
                      {"Arrange the crackers on a plate"}));
    e.push_back(entry("protein_shake", "Protein shake", {180, 9, 3, 30, 3, 150, 1}, 30, {},
                      T::soft, P::cold, {"dairy"},
                      {"Blend the powder with cold milk", "Shake well and serve"}));
    e.push_back(entry("miso_soup_cup", "Miso soup cup", {40, 5, 1.5, 3, 1, 860, 1}, 30,
                      {"east_asian"}, T::soft, P::hot, {"soy"},
                      {"Dissolve the miso paste in hot water", "Add the tofu cubes and wakame"}));

    return Catalog(std::move(e));
}

GuidelineTarget default_guideline() {
    GuidelineTarget g;
    g.per_day[Nutrient::kcal] = 2000;
    g.per_day[Nutrient::carbs_g] = 250;
    g.per_day[Nutrient::sugar_g] = 50;
    g.per_day[Nutrient::protein_g] = 75;
    g.per_day[Nutrient::fat_g] = 70;
    g.per_day[Nutrient::sodium_mg] = 2000;
    g.per_day[Nutrient::fiber_g] = 28;
    g.tolerance_frac = 0.2;
    return g;
}

} // namespace carecoord
