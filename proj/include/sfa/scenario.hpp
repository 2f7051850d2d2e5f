#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sfa/frames.hpp"

namespace sfa {

enum class Domain { medical, financial, business, education, science, war, law };

inline constexpr std::array<Domain, 7> kAllDomains{
    Domain::medical, Domain::financial, Domain::business, Domain::education,
    Domain::science, Domain::war, Domain::law};

std::string_view domain_name(Domain d);
Domain domain_from_name(std::string_view name);

// One dilemma. `action` is the full action phrase including its purpose
// clause ("rob the store to pay for the surgery"); `action_core` is the same
// phrase with the purpose clause elided ("rob the store"), used by the
// conditional frames. An empty action_core falls back to `action`.
struct Scenario {
    std::string id;
    Domain domain = Domain::medical;
    std::string scenario_text;
    std::string subject;
    std::string action;
    std::string goal;
    std::string action_core;
    // Connectives for the conditional frames; overridable per record.
    std::string connective_f2 = "even if it means they must";
    std::string connective_f3 = "if it means they must";
    // Hand-tuned proposal text per frame. When present it replaces the
    // templated rendering but must still match the frame's polarity skeleton.
    std::array<std::optional<std::string>, 4> proposal_override{};

    const std::string& effective_action_core() const {
        return action_core.empty() ? action : action_core;
    }
};

// Throws ValidationError naming the scenario id if a required phrase is
// missing, contains a newline, or an override violates its polarity skeleton.
void validate_scenario(const Scenario& s);

// Instantiates the frame pattern (or the stored override) for one scenario.
std::string render_proposal(const Scenario& s, Frame f);

// A fully rendered prompt, ready to send.
struct PromptInstance {
    std::string scenario_id;
    Frame frame = Frame::F0;
    std::string scenario_block;
    std::string proposal_block;
    std::string full_text;
};

PromptInstance render_prompt(const Scenario& s, Frame f);

// The fixed prompt skeleton around the scenario/proposal blocks.
std::string_view prompt_schema_header();

// Scenario suite file: UTF-8, `key: value` lines, records separated by blank
// lines, '#' starts a comment line. Keys: id, domain, scenario_text, subject,
// action, goal and optional action_core, connective_f2, connective_f3,
// proposal_f0..proposal_f3.
std::vector<Scenario> load_scenario_suite(std::istream& in, std::string_view source_name = "<stream>");
std::vector<Scenario> load_scenario_suite(const std::filesystem::path& file);

// The bundled 14-scenario suite (2 per domain) and its source text.
const std::vector<Scenario>& default_scenario_suite();
std::string_view default_scenario_suite_text();

}  // namespace sfa
