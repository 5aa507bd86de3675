#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "carecoord/bus.hpp"
#include "carecoord/catalog.hpp"
#include "carecoord/domain.hpp"

namespace carecoord {

struct Recognition {
    std::string label;       // catalog meal_id or raw food tag
    double confidence = 1.0; // [0, 1]
};

struct RecognitionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Boundary for the vision stand-in: a label plus a confidence. The
// bundled implementation is a fixture table; anything honoring the
// contract can slot in.
class Recognizer {
public:
    virtual ~Recognizer() = default;
    virtual std::optional<Recognition> recognize(const std::string& descriptor_id) const = 0;
};

class StubRecognizer : public Recognizer {
public:
    void add(const std::string& descriptor_id, const std::string& label,
             double confidence = 1.0);
    std::optional<Recognition> recognize(const std::string& descriptor_id) const override;

    static StubRecognizer from_json(const ojson& j);
    ojson to_json() const;

private:
    std::map<std::string, Recognition> table_;
};

enum class Verdict { approve, limit, deny };
std::string to_string(Verdict v);

struct Assessment {
    Verdict verdict = Verdict::approve;
    std::vector<std::string> reasons;
    std::optional<double> suggested_portion_frac; // set iff verdict == limit
};

enum class Intent { can_i_eat, how_to_cook, substitute, nutrition_info, unknown };
std::string to_string(Intent i);

// Keyword groups checked in declaration order; the first hit wins.
struct IntentRules {
    std::vector<std::pair<Intent, std::vector<std::string>>> groups;

    static IntentRules defaults();
    static IntentRules from_json(const ojson& j);
    ojson to_json() const;
};

Intent parse_intent(const std::string& query, const IntentRules& rules = IntentRules::defaults());

// Splits a prep step into single-clause instructions (used when the
// profile carries a cognitive-support flag).
std::vector<std::string> split_single_clause(const std::string& step);

// Lowest-glycemic-index catalog entry sharing at least one cuisine tag
// with the given meal; ties take the lowest meal id. Null when nothing
// shares a tag.
const MealCatalogEntry* find_substitute(const Catalog& catalog, const MealCatalogEntry& meal);

struct GuidanceResponse {
    Intent intent = Intent::unknown;
    std::string label;
    std::string text;
    std::vector<std::string> steps;
    std::optional<Assessment> assessment;
};

struct GuidanceConfig {
    double gi_max = 55.0;
    double confidence_cutoff = 0.5;
    // Portion suggested when low confidence alone forces a limit.
    double low_confidence_portion = 0.5;
};

// Food assessment and query answering. Pure given its inputs; the
// blackboard is consulted read-only for active medical vetoes.
class GuidanceAgent {
public:
    GuidanceAgent(const Catalog& catalog, GuidelineTarget guideline, GuidanceConfig cfg = {});

    // Throws RecognitionError for an unknown descriptor.
    Recognition recognize(const Recognizer& recognizer, const std::string& descriptor_id) const;

    // Deny on any hard violation or applicable medical veto; limit on a
    // soft breach or a projected daily total beyond tolerance, with the
    // largest portion fraction in {0.75, 0.5, 0.25} that clears every
    // soft reason; approve otherwise. Low confidence forces a limit.
    Assessment assess(const Recognition& rec, const UserProfile& profile,
                      const NutrientMap& intake_so_far, const Blackboard& board,
                      std::uint64_t tick) const;

    // Throws std::invalid_argument for unknown intent or unresolvable label.
    GuidanceResponse respond(Intent intent, const std::string& label,
                             const UserProfile& profile, const NutrientMap& intake_so_far,
                             const Blackboard& board, std::uint64_t tick) const;

    const GuidanceConfig& config() const { return cfg_; }

private:
    Assessment assess_label(const std::string& label, const UserProfile& profile,
                            const NutrientMap& intake_so_far, const Blackboard& board,
                            std::uint64_t tick) const;

    const Catalog& catalog_;
    GuidelineTarget guideline_;
    GuidanceConfig cfg_;
};

ojson assessment_to_json(const Assessment& a);
ojson guidance_response_to_json(const GuidanceResponse& r);

} // namespace carecoord
