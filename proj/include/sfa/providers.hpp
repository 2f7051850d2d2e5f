#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "sfa/frames.hpp"
#include "sfa/scenario.hpp"

namespace sfa {

enum class Origin { us_commercial, cn_commercial, oss };
enum class Tier { tiny, small, medium, large };
enum class ReasoningMode { none, enabled, provider_default };

std::string_view origin_name(Origin o);  // "US_commercial" / "CN_commercial" / "OSS"
Origin origin_from_name(std::string_view name);
std::string_view tier_name(Tier t);
Tier tier_from_name(std::string_view name);
std::string_view reasoning_mode_name(ReasoningMode m);
ReasoningMode reasoning_mode_from_name(std::string_view name);

// Behavior of a synthetic model on one (scenario, frame) cell: probability of
// emitting a well-formed response, and the raw agree-probability when it does.
struct CellShape {
    double p_agree = 0.5;
    double compliance = 1.0;
};

// Deterministic synthetic model. Output bytes are a pure function of
// (seed, scenario, frame, draw_index).
struct MockModelConfig {
    std::uint64_t seed = 0;
    // Per-frame default shape, applied to every scenario not listed in cells.
    std::optional<std::array<CellShape, 4>> fallback;
    std::map<std::pair<std::string, Frame>, CellShape> cells;

    const CellShape* find(const std::string& scenario_id, Frame f) const;
};

struct ModelSpec {
    std::string model_id;
    Origin origin = Origin::oss;
    Tier tier = Tier::tiny;
    std::string endpoint;  // http(s) URL, or a mock: tag resolved into `mock`
    std::string auth_env;  // env var holding the API key; empty = no auth header
    bool supports_temperature = true;
    ReasoningMode reasoning_mode = ReasoningMode::provider_default;
    std::optional<std::string> family;
    std::optional<MockModelConfig> mock;
    int max_output_tokens = 1024;
};

struct SamplingPolicy {
    int n_samples = 30;
    std::optional<double> temperature = 0.7;  // nullopt: provider default
    int max_retries = 3;
    std::chrono::milliseconds timeout{60000};
    int concurrency_limit = 4;
    std::chrono::milliseconds backoff_base{250};
};

void validate(const SamplingPolicy& p);

// One stateless single-turn completion. Implementations must not carry any
// state between calls that could leak into request content.
class Provider {
public:
    virtual ~Provider() = default;
    virtual std::string sample(const ModelSpec& spec, const PromptInstance& prompt,
                               const SamplingPolicy& policy, int draw_index) = 0;
};

std::string mock_generate(const MockModelConfig& config, const std::string& scenario_id, Frame f,
                          int draw_index);

class MockProvider : public Provider {
public:
    std::string sample(const ModelSpec& spec, const PromptInstance& prompt,
                       const SamplingPolicy& policy, int draw_index) override;
};

// Chat-completion client: single user message, no system message, temperature
// only when the model supports it. Retries transport errors with exponential
// backoff; auth/config problems are run-fatal.
class HttpProvider : public Provider {
public:
    std::string sample(const ModelSpec& spec, const PromptInstance& prompt,
                       const SamplingPolicy& policy, int draw_index) override;
};

// Dispatches to the model's mock or its HTTP endpoint.
std::string sample_decision(Provider& provider, const ModelSpec& spec,
                            const PromptInstance& prompt, const SamplingPolicy& policy,
                            int attempt_index);

std::unique_ptr<Provider> make_provider(const ModelSpec& spec);

// Request body exposed for request-shape tests (statelessness, temperature
// handling).
nlohmann::json build_chat_request(const ModelSpec& spec, const PromptInstance& prompt,
                                  const SamplingPolicy& policy);

// Synthetic model with endorsement probabilities (p, p, p, p + svi_target) in
// LPN space, p = (1 - svi_target) / 2, converted to raw agree-probabilities by
// inverting the polarity mapping per frame.
MockModelConfig build_negation_fragile_mock(double svi_target, std::uint64_t seed);

// Synthetic model hitting the given LPN-space endorsement rate per frame.
MockModelConfig mock_from_lpn_rates(const std::array<double, 4>& lpn_rates, double compliance,
                                    std::uint64_t seed);

// Parses "mock:..." endpoint tags:
//   mock:fragile?svi=0.65[&compliance=0.9][&seed=7]
//   mock:uniform?p=0.5[&compliance=0.9][&seed=7]
//   mock:lpn?f0=0.2&f1=0.8&f2=0.4&f3=0.9[&compliance=0.9][&seed=7]
MockModelConfig mock_config_from_tag(std::string_view tag);

// Provider registry file: JSON array of model entries. Secrets are only ever
// named (env var), never stored.
std::vector<ModelSpec> load_provider_registry(std::istream& in, std::string_view source_name);
std::vector<ModelSpec> load_provider_registry(const std::filesystem::path& file);

nlohmann::json model_spec_to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(const nlohmann::json& j, std::string_view context);

}  // namespace sfa
