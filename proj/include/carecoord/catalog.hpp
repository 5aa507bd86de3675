#pragma once

#include <map>
#include <string>
#include <vector>

#include "carecoord/domain.hpp"

namespace carecoord {

// Meal catalog with id lookup. Entries are immutable after construction.
class Catalog {
public:
    Catalog() = default;
    explicit Catalog(std::vector<MealCatalogEntry> entries);

    const MealCatalogEntry* find(const std::string& meal_id) const;
    const MealCatalogEntry& at(const std::string& meal_id) const; // throws on miss
    const std::vector<MealCatalogEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    ojson to_json() const;
    static Catalog from_json(const ojson& j);

private:
    std::vector<MealCatalogEntry> entries_;
    std::map<std::string, std::size_t> index_;
};

// Built-in 76-item catalog used when no catalog file is given.
Catalog default_catalog();

// Daily targets used when no guideline file is given.
GuidelineTarget default_guideline();

} // namespace carecoord
