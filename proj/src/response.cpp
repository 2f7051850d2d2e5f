#include "sfa/response.hpp"

#include <algorithm>
#include <cctype>

#include "json.hpp"

namespace sfa {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Scans from `start` (which must index a '{') for the matching close brace,
// honoring JSON string literals and escapes. Returns one past the close brace
// or npos if the object never completes.
std::size_t find_object_end(std::string_view raw, std::size_t start) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < raw.size(); ++i) {
        char c = raw[i];
        if (in_string) {
            if (escaped)
                escaped = false;
            else if (c == '\\')
                escaped = true;
            else if (c == '"')
                in_string = false;
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == '{') {
            ++depth;
        } else if (c == '}') {
            --depth;
            if (depth == 0) return i + 1;
        }
    }
    return std::string_view::npos;
}

// First balanced-and-parseable JSON object at or after `from`. Balanced spans
// that fail to parse (e.g. "{broken}") are skipped and the scan continues.
std::optional<std::pair<json, std::size_t>> extract_object(std::string_view raw, std::size_t from) {
    std::size_t pos = from;
    while ((pos = raw.find('{', pos)) != std::string_view::npos) {
        std::size_t end = find_object_end(raw, pos);
        if (end == std::string_view::npos) return std::nullopt;  // truncated: nothing completes
        json parsed = json::parse(raw.substr(pos, end - pos), nullptr, false);
        if (!parsed.is_discarded()) return std::make_pair(std::move(parsed), end);
        pos = end;
    }
    return std::nullopt;
}

std::string lowercase_trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    std::string out(s.substr(b, e - b + 1));
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

ParseOutcome invalid(std::string_view raw, std::string reason) {
    ParseOutcome o;
    o.valid = false;
    o.failure_reason = std::move(reason);
    o.raw_text = std::string(raw);
    return o;
}

constexpr const char* kScoreFields[] = {
    "confidence", "adherence_to_laws", "adherence_to_social_ethics",
    "objective_positive_consequences", "objective_negative_consequences"};

}  // namespace

ParseOutcome parse_response(std::string_view raw) {
    auto found = extract_object(raw, 0);
    if (!found) return invalid(raw, "no JSON object found");
    const json& obj = found->first;

    std::optional<std::string> warning;
    if (extract_object(raw, found->second))
        warning = "multiple JSON objects in response; first object used";

    if (!obj.is_object()) return invalid(raw, "no JSON object found");

    if (!obj.contains("decision")) return invalid(raw, "schema field missing: decision");
    if (!obj.at("decision").is_string()) return invalid(raw, "wrong type for field: decision");

    DecisionRecord rec;
    std::string token = lowercase_trim(obj.at("decision").get<std::string>());
    if (token == "agree")
        rec.decision = Decision::agree;
    else if (token == "disagree")
        rec.decision = Decision::disagree;
    else
        return invalid(raw, "unrecognized decision token: '" + token + "'");

    for (const char* field : kScoreFields) {
        if (!obj.contains(field))
            return invalid(raw, std::string("schema field missing: ") + field);
        const json& v = obj.at(field);
        if (!v.is_number())
            return invalid(raw, std::string("wrong type for field: ") + field);
        double d = v.get<double>();
        if (d != static_cast<double>(static_cast<long long>(d)))
            return invalid(raw, std::string("score not an integer: ") + field);
        if (d < 0.0 || d > 100.0)
            return invalid(raw, std::string("score out of range: ") + field);
    }
    rec.confidence = obj.at("confidence").get<int>();
    rec.adherence_to_laws = obj.at("adherence_to_laws").get<int>();
    rec.adherence_to_social_ethics = obj.at("adherence_to_social_ethics").get<int>();
    rec.objective_positive_consequences = obj.at("objective_positive_consequences").get<int>();
    rec.objective_negative_consequences = obj.at("objective_negative_consequences").get<int>();

    if (!obj.contains("reasoning")) return invalid(raw, "schema field missing: reasoning");
    if (!obj.at("reasoning").is_string()) return invalid(raw, "wrong type for field: reasoning");
    rec.reasoning = obj.at("reasoning").get<std::string>();

    ParseOutcome o;
    o.valid = true;
    o.record = std::move(rec);
    o.raw_text = std::string(raw);
    o.warning = std::move(warning);
    return o;
}

std::string serialize(const DecisionRecord& r) {
    ordered_json j;
    j["decision"] = std::string(decision_name(r.decision));
    j["confidence"] = r.confidence;
    j["adherence_to_laws"] = r.adherence_to_laws;
    j["adherence_to_social_ethics"] = r.adherence_to_social_ethics;
    j["objective_positive_consequences"] = r.objective_positive_consequences;
    j["objective_negative_consequences"] = r.objective_negative_consequences;
    j["reasoning"] = r.reasoning;
    return j.dump();
}

CompliancePartition apply_exclusion_rule(const ComplianceLedger& ledger, double threshold) {
    CompliancePartition part;
    for (const auto& [model, counts] : ledger.per_model) {
        auto rate = counts.compliance_rate();
        if (!rate)
            throw ValidationError("model '" + model + "' has no attempts; compliance not yet measured");
        if (*rate < threshold)
            part.excluded.push_back(model);
        else
            part.included.push_back(model);
    }
    return part;
}

}  // namespace sfa
