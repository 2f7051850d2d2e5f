#pragma once

// Published per-model audit results used as numeric regression fixtures for
// the statistics suite and the report aggregation.

#include <string>
#include <vector>

namespace fixtures {

struct FixtureModel {
    const char* id;
    const char* origin;  // US_commercial / CN_commercial / OSS
    const char* tier;
    double svi;
    const char* family;          // nullptr when not part of a reasoning pair
    const char* reasoning_mode;  // none / enabled / provider_default
};

inline const std::vector<FixtureModel>& models() {
    static const std::vector<FixtureModel> table = {
        {"gpt-5-mini", "US_commercial", "SMALL", 0.34, nullptr, "provider_default"},
        {"gpt-5.1", "US_commercial", "LARGE", 0.20, nullptr, "provider_default"},
        {"gpt-5.2", "US_commercial", "LARGE", 0.41, nullptr, "provider_default"},
        {"claude-haiku-4-5", "US_commercial", "MEDIUM", 0.71, nullptr, "provider_default"},
        {"claude-sonnet-4-5", "US_commercial", "LARGE", 0.44, nullptr, "provider_default"},
        {"gemini-3-flash", "US_commercial", "MEDIUM", 0.00, nullptr, "provider_default"},
        {"grok-4-1-non-reasoning", "US_commercial", "TINY", 0.48, "grok-4-1", "none"},
        {"grok-4-1-reasoning", "US_commercial", "TINY", 0.23, "grok-4-1", "enabled"},
        {"deepseek-v3p2", "CN_commercial", "SMALL", 0.24, nullptr, "provider_default"},
        {"glm-4p6", "CN_commercial", "MEDIUM", 0.43, nullptr, "provider_default"},
        {"glm-4p7", "CN_commercial", "MEDIUM", 0.13, nullptr, "provider_default"},
        {"kimi-k2-instruct", "CN_commercial", "MEDIUM", 0.39, "kimi-k2", "none"},
        {"kimi-k2-thinking", "CN_commercial", "MEDIUM", 0.32, "kimi-k2", "enabled"},
        {"qwen3-vl-235b", "CN_commercial", "LARGE", 0.50, nullptr, "provider_default"},
        {"minimax-m2", "CN_commercial", "MEDIUM", 0.43, nullptr, "provider_default"},
        {"llama3.2:1b", "OSS", "TINY", 0.89, nullptr, "provider_default"},
        {"llama3.2:3b", "OSS", "TINY", 0.71, nullptr, "provider_default"},
        {"gemma3:4b", "OSS", "TINY", 0.85, nullptr, "provider_default"},
        {"gemma3n:e4b", "OSS", "TINY", 0.64, nullptr, "provider_default"},
        {"granite3.3:2b", "OSS", "TINY", 0.71, nullptr, "provider_default"},
        {"granite4:3b", "OSS", "TINY", 0.64, nullptr, "provider_default"},
        {"phi4-mini:3.8b", "OSS", "TINY", 0.86, nullptr, "provider_default"},
        {"olmo-3:7b-instruct", "OSS", "TINY", 1.00, nullptr, "provider_default"},
    };
    return table;
}

inline std::vector<double> svis_for(const std::string& origin) {
    std::vector<double> out;
    for (const auto& m : models())
        if (origin == m.origin) out.push_back(m.svi);
    return out;
}

// Pooled endorsement rates per frame for the open-weight group, used by the
// framing-signature checks.
inline const std::vector<double>& oss_frame_rates() {
    static const std::vector<double> rates = {0.287, 0.804, 0.456, 0.967};
    return rates;
}

inline const std::vector<double>& cn_frame_rates() {
    static const std::vector<double> rates = {0.306, 0.268, 0.344, 0.491};
    return rates;
}

}  // namespace fixtures
