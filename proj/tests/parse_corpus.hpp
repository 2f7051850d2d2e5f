#pragma once

// Golden corpus for the response parser: realistic well-formed outputs, the
// fence/prose wrappers models actually produce, and the malformed shapes that
// must be treated as missing data. Expected reasons are prefixes of the
// parser's failure_reason.

#include <string>
#include <vector>

namespace corpus {

struct Case {
    const char* name;
    const char* raw;
    bool valid;
    const char* reason_prefix;  // nullptr for valid cases
};

inline const char* kCanonical =
    R"({"decision": "agree", "confidence": 80, "adherence_to_laws": 20, "adherence_to_social_ethics": 35, "objective_positive_consequences": 70, "objective_negative_consequences": 45, "reasoning": "The surgery outweighs the property harm."})";

inline const std::vector<Case>& cases() {
    static const std::vector<Case> all = {
        // --- well-formed -----------------------------------------------------
        {"canonical", kCanonical, true, nullptr},
        {"disagree",
         R"({"decision": "disagree", "confidence": 55, "adherence_to_laws": 90, "adherence_to_social_ethics": 80, "objective_positive_consequences": 30, "objective_negative_consequences": 75, "reasoning": "Theft cannot be squared with the law."})",
         true, nullptr},
        {"uppercase decision",
         R"({"decision": "AGREE", "confidence": 80, "adherence_to_laws": 20, "adherence_to_social_ethics": 35, "objective_positive_consequences": 70, "objective_negative_consequences": 45, "reasoning": "r"})",
         true, nullptr},
        {"padded decision",
         R"({"decision": "  Disagree ", "confidence": 55, "adherence_to_laws": 90, "adherence_to_social_ethics": 80, "objective_positive_consequences": 30, "objective_negative_consequences": 75, "reasoning": "r"})",
         true, nullptr},
        {"integral floats",
         R"({"decision": "agree", "confidence": 80.0, "adherence_to_laws": 20.0, "adherence_to_social_ethics": 35, "objective_positive_consequences": 70, "objective_negative_consequences": 45, "reasoning": "r"})",
         true, nullptr},
        {"extra fields tolerated",
         R"({"decision": "agree", "confidence": 80, "adherence_to_laws": 20, "adherence_to_social_ethics": 35, "objective_positive_consequences": 70, "objective_negative_consequences": 45, "reasoning": "r", "model_note": "extra"})",
         true, nullptr},
        {"boundary scores",
         R"({"decision": "agree", "confidence": 0, "adherence_to_laws": 100, "adherence_to_social_ethics": 0, "objective_positive_consequences": 100, "objective_negative_consequences": 0, "reasoning": ""})",
         true, nullptr},
        {"braces inside reasoning",
         R"({"decision": "agree", "confidence": 80, "adherence_to_laws": 20, "adherence_to_social_ethics": 35, "objective_positive_consequences": 70, "objective_negative_consequences": 45, "reasoning": "weighing {duty} vs {outcome}"})",
         true, nullptr},
        {"escaped quotes in reasoning",
         R"({"decision": "agree", "confidence": 80, "adherence_to_laws": 20, "adherence_to_social_ethics": 35, "objective_positive_consequences": 70, "objective_negative_consequences": 45, "reasoning": "the \"right\" thing"})",
         true, nullptr},
        {"unicode reasoning",
         R"({"decision": "agree", "confidence": 80, "adherence_to_laws": 20, "adherence_to_social_ethics": 35, "objective_positive_consequences": 70, "objective_negative_consequences": 45, "reasoning": "weighs la vida — heavily"})",
         true, nullptr},
        {"object inside array wrapper",
         R"([{"decision": "agree", "confidence": 80, "adherence_to_laws": 20, "adherence_to_social_ethics": 35, "objective_positive_consequences": 70, "objective_negative_consequences": 45, "reasoning": "r"}])",
         true, nullptr},
        {"multiline pretty-printed",
         "{\n  \"decision\": \"agree\",\n  \"confidence\": 80,\n  \"adherence_to_laws\": 20,\n"
         "  \"adherence_to_social_ethics\": 35,\n  \"objective_positive_consequences\": 70,\n"
         "  \"objective_negative_consequences\": 45,\n  \"reasoning\": \"r\"\n}",
         true, nullptr},

        // --- wrapped variants (must parse identically to `canonical`) --------
        {"plain fences", nullptr, true, nullptr},        // assembled in tests
        {"json fences", nullptr, true, nullptr},         // assembled in tests
        {"prose preamble", nullptr, true, nullptr},      // assembled in tests
        {"prose postamble", nullptr, true, nullptr},     // assembled in tests
        {"preamble and fences", nullptr, true, nullptr}, // assembled in tests

        // --- invalid: no object ----------------------------------------------
        {"empty", "", false, "no JSON object found"},
        {"whitespace only", "  \n\t ", false, "no JSON object found"},
        {"prose only",
         "I need to weigh several considerations here and cannot commit to a single answer.",
         false, "no JSON object found"},
        {"truncated object",
         R"({"decision": "agree", "confidence": 80, "adherence_to_laws": 20,)", false,
         "no JSON object found"},
        {"fenced truncated object",
         "```json\n{\"decision\": \"agree\", \"confidence\": 80,\n", false,
         "no JSON object found"},
        {"unterminated string swallows the close brace",
         R"({"decision": "agree", "reasoning": "never ends})", false, "no JSON object found"},
        {"balanced braces but not JSON", "{decision: agree}", false, "no JSON object found"},

        // --- invalid: schema violations ---------------------------------------
        {"missing decision",
         R"({"confidence": 80, "adherence_to_laws": 20, "adherence_to_social_ethics": 35, "objective_positive_consequences": 70, "objective_negative_consequences": 45, "reasoning": "r"})",
         false, "schema field missing: decision"},
        {"missing confidence",
         R"({"decision": "agree", "adherence_to_laws": 20, "adherence_to_social_ethics": 35, "objective_positive_consequences": 70, "objective_negative_consequences": 45, "reasoning": "r"})",
         false, "schema field missing: confidence"},
        {"missing reasoning",
         R"({"decision": "agree", "confidence": 80, "adherence_to_laws": 20, "adherence_to_social_ethics": 35, "objective_positive_consequences": 70, "objective_negative_consequences": 45})",
         false, "schema field missing: reasoning"},
        {"decision is a number",
         R"({"decision": 1, "confidence": 80, "adherence_to_laws": 20, "adherence_to_social_ethics": 35, "objective_positive_consequences": 70, "objective_negative_consequences": 45, "reasoning": "r"})",
         false, "wrong type for field: decision"},
        {"score is a string",
         R"({"decision": "agree", "confidence": "80", "adherence_to_laws": 20, "adherence_to_social_ethics": 35, "objective_positive_consequences": 70, "objective_negative_consequences": 45, "reasoning": "r"})",
         false, "wrong type for field: confidence"},
        {"reasoning is a number",
         R"({"decision": "agree", "confidence": 80, "adherence_to_laws": 20, "adherence_to_social_ethics": 35, "objective_positive_consequences": 70, "objective_negative_consequences": 45, "reasoning": 7})",
         false, "wrong type for field: reasoning"},
        {"confidence above range",
         R"({"decision": "agree", "confidence": 150, "adherence_to_laws": 20, "adherence_to_social_ethics": 35, "objective_positive_consequences": 70, "objective_negative_consequences": 45, "reasoning": "r"})",
         false, "score out of range: confidence"},
        {"negative score",
         R"({"decision": "agree", "confidence": 80, "adherence_to_laws": -5, "adherence_to_social_ethics": 35, "objective_positive_consequences": 70, "objective_negative_consequences": 45, "reasoning": "r"})",
         false, "score out of range: adherence_to_laws"},
        {"boundary overshoot",
         R"({"decision": "agree", "confidence": 101, "adherence_to_laws": 20, "adherence_to_social_ethics": 35, "objective_positive_consequences": 70, "objective_negative_consequences": 45, "reasoning": "r"})",
         false, "score out of range: confidence"},
        {"fractional score",
         R"({"decision": "agree", "confidence": 75.5, "adherence_to_laws": 20, "adherence_to_social_ethics": 35, "objective_positive_consequences": 70, "objective_negative_consequences": 45, "reasoning": "r"})",
         false, "score not an integer: confidence"},
        {"decision token unknown",
         R"({"decision": "abstain", "confidence": 80, "adherence_to_laws": 20, "adherence_to_social_ethics": 35, "objective_positive_consequences": 70, "objective_negative_consequences": 45, "reasoning": "r"})",
         false, "unrecognized decision token"},
        {"decision token gibberish",
         R"({"decision": "strongly agree", "confidence": 80, "adherence_to_laws": 20, "adherence_to_social_ethics": 35, "objective_positive_consequences": 70, "objective_negative_consequences": 45, "reasoning": "r"})",
         false, "unrecognized decision token"},
        {"first object pins the parse",
         R"({"decision": "maybe"} {"decision": "agree", "confidence": 80, "adherence_to_laws": 20, "adherence_to_social_ethics": 35, "objective_positive_consequences": 70, "objective_negative_consequences": 45, "reasoning": "r"})",
         false, "unrecognized decision token"},
    };
    return all;
}

inline std::string wrapped(const char* name) {
    std::string body = kCanonical;
    std::string n = name;
    if (n == "plain fences") return "```\n" + body + "\n```";
    if (n == "json fences") return "```json\n" + body + "\n```\n";
    if (n == "prose preamble") return "Sure, here is my assessment:\n" + body;
    if (n == "prose postamble") return body + "\nLet me know if you need more detail.";
    if (n == "preamble and fences")
        return "Here is the requested JSONL object:\n```json\n" + body + "\n```";
    return body;
}

}  // namespace corpus
