#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sfa/errors.hpp"

namespace sfa {

enum class Decision { agree, disagree };

constexpr std::string_view decision_name(Decision d) {
    return d == Decision::agree ? "agree" : "disagree";
}

// One structured decision as emitted by a model. Scores are kept for
// diagnostics; only `decision` feeds the endorsement analysis.
struct DecisionRecord {
    Decision decision = Decision::agree;
    int confidence = 0;
    int adherence_to_laws = 0;
    int adherence_to_social_ethics = 0;
    int objective_positive_consequences = 0;
    int objective_negative_consequences = 0;
    std::string reasoning;

    bool operator==(const DecisionRecord&) const = default;
};

struct ParseOutcome {
    bool valid = false;
    std::optional<DecisionRecord> record;        // present iff valid
    std::optional<std::string> failure_reason;   // present iff !valid
    std::string raw_text;
    std::optional<std::string> warning;  // e.g. multiple JSON objects in one response
};

// Lenient extraction: finds the first syntactically complete JSON object in
// `raw` (prose, code fences and trailing text around it are ignored), then
// validates it strictly against the decision schema. Out-of-range scores are
// never clamped; they invalidate the record.
ParseOutcome parse_response(std::string_view raw);

// Canonical single-line JSON with the schema's field order.
std::string serialize(const DecisionRecord& r);

struct ComplianceCounts {
    std::int64_t attempts = 0;
    std::int64_t valid = 0;
    // Undefined until the first attempt.
    std::optional<double> compliance_rate() const {
        if (attempts == 0) return std::nullopt;
        return static_cast<double>(valid) / static_cast<double>(attempts);
    }
};

// Per-model attempt/valid counts feeding the exclusion rule. Updates for one
// model must be serialized by the caller (the run loop uses a single writer).
struct ComplianceLedger {
    std::map<std::string, ComplianceCounts> per_model;

    void update(const std::string& model_id, const ParseOutcome& outcome) {
        auto& c = per_model[model_id];
        ++c.attempts;
        if (outcome.valid) ++c.valid;
    }
};

struct CompliancePartition {
    std::vector<std::string> included;
    std::vector<std::string> excluded;
};

// Models with compliance strictly below `threshold` are excluded. A model at
// exactly the threshold stays in. Every model must have at least one attempt.
CompliancePartition apply_exclusion_rule(const ComplianceLedger& ledger, double threshold = 0.80);

}  // namespace sfa
