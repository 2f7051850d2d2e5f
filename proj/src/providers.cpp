#ifdef SFA_HTTPS_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include "httplib.h"

#include "sfa/providers.hpp"

#include <cstdlib>
#include <fstream>
#include <thread>

#include "sfa/response.hpp"
#include "sfa/rng.hpp"

namespace sfa {

using nlohmann::json;

std::string_view origin_name(Origin o) {
    switch (o) {
        case Origin::us_commercial: return "US_commercial";
        case Origin::cn_commercial: return "CN_commercial";
        case Origin::oss: return "OSS";
    }
    return "?";
}

Origin origin_from_name(std::string_view name) {
    for (Origin o : {Origin::us_commercial, Origin::cn_commercial, Origin::oss})
        if (origin_name(o) == name) return o;
    throw ConfigError("unknown origin: '" + std::string(name) + "'");
}

std::string_view tier_name(Tier t) {
    switch (t) {
        case Tier::tiny: return "TINY";
        case Tier::small: return "SMALL";
        case Tier::medium: return "MEDIUM";
        case Tier::large: return "LARGE";
    }
    return "?";
}

Tier tier_from_name(std::string_view name) {
    for (Tier t : {Tier::tiny, Tier::small, Tier::medium, Tier::large})
        if (tier_name(t) == name) return t;
    throw ConfigError("unknown tier: '" + std::string(name) + "'");
}

std::string_view reasoning_mode_name(ReasoningMode m) {
    switch (m) {
        case ReasoningMode::none: return "none";
        case ReasoningMode::enabled: return "enabled";
        case ReasoningMode::provider_default: return "provider_default";
    }
    return "?";
}

ReasoningMode reasoning_mode_from_name(std::string_view name) {
    for (ReasoningMode m :
         {ReasoningMode::none, ReasoningMode::enabled, ReasoningMode::provider_default})
        if (reasoning_mode_name(m) == name) return m;
    throw ConfigError("unknown reasoning mode: '" + std::string(name) + "'");
}

void validate(const SamplingPolicy& p) {
    if (p.n_samples < 1) throw ConfigError("sampling policy: n_samples must be >= 1");
    if (p.temperature && (*p.temperature < 0.0 || *p.temperature > 2.0))
        throw ConfigError("sampling policy: temperature must be in [0, 2]");
    if (p.max_retries < 0) throw ConfigError("sampling policy: max_retries must be >= 0");
    if (p.concurrency_limit < 1) throw ConfigError("sampling policy: concurrency_limit must be >= 1");
}

const CellShape* MockModelConfig::find(const std::string& scenario_id, Frame f) const {
    if (auto it = cells.find({scenario_id, f}); it != cells.end()) return &it->second;
    if (fallback) return &(*fallback)[frame_index(f)];
    return nullptr;
}

namespace {

void check_probability(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0))
        throw ConfigError(std::string(what) + " must be in [0, 1], got " + std::to_string(p));
}

// Fixed malformed-output pool. Every entry must fail schema validation so a
// mock's valid-parse rate equals its configured compliance exactly.
std::string malformed_output(Pcg32& rng) {
    switch (rng.bounded(5)) {
        case 0:
            return "I'm sorry, but I can't reduce this dilemma to a single JSON object. "
                   "There are strong considerations on both sides.";
        case 1:
            return "```json\n{\"decision\": \"agree\", \"confidence\": 80, "
                   "\"adherence_to_laws\": 55,";
        case 2:
            return "{\"decision\": \"agree\", \"confidence\": 250, \"adherence_to_laws\": 40, "
                   "\"adherence_to_social_ethics\": 50, \"objective_positive_consequences\": 60, "
                   "\"objective_negative_consequences\": 30, \"reasoning\": \"Scores drifted out of range.\"}";
        case 3:
            return "{\"decision\": \"abstain\", \"confidence\": 70, \"adherence_to_laws\": 40, "
                   "\"adherence_to_social_ethics\": 50, \"objective_positive_consequences\": 60, "
                   "\"objective_negative_consequences\": 30, \"reasoning\": \"Unable to commit either way.\"}";
        default:
            return "{\"confidence\": 80, \"reasoning\": \"Forgot the decision field entirely.\"}";
    }
}

}  // namespace

std::string mock_generate(const MockModelConfig& config, const std::string& scenario_id, Frame f,
                          int draw_index) {
    const CellShape* shape = config.find(scenario_id, f);
    if (!shape)
        throw ConfigError("mock config does not cover (scenario '" + scenario_id + "', frame " +
                          std::string(frame_name(f)) + ")");

    std::string key = scenario_id;
    key += '|';
    key += frame_name(f);
    key += '|';
    key += std::to_string(draw_index);
    Pcg32 rng(config.seed, fnv1a64(key));

    if (!rng.bernoulli(shape->compliance)) return malformed_output(rng);

    DecisionRecord rec;
    rec.decision = rng.bernoulli(shape->p_agree) ? Decision::agree : Decision::disagree;
    rec.confidence = 55 + static_cast<int>(rng.bounded(41));
    rec.adherence_to_laws = static_cast<int>(rng.bounded(101));
    rec.adherence_to_social_ethics = static_cast<int>(rng.bounded(101));
    rec.objective_positive_consequences = static_cast<int>(rng.bounded(101));
    rec.objective_negative_consequences = static_cast<int>(rng.bounded(101));
    rec.reasoning = "Weighed the stated obligations against the likely consequences before deciding.";
    return serialize(rec);
}

std::string MockProvider::sample(const ModelSpec& spec, const PromptInstance& prompt,
                                 const SamplingPolicy&, int draw_index) {
    if (!spec.mock)
        throw ConfigError("model '" + spec.model_id + "' has no mock configuration");
    return mock_generate(*spec.mock, prompt.scenario_id, prompt.frame, draw_index);
}

MockModelConfig mock_from_lpn_rates(const std::array<double, 4>& lpn_rates, double compliance,
                                    std::uint64_t seed) {
    check_probability(compliance, "compliance");
    MockModelConfig config;
    config.seed = seed;
    std::array<CellShape, 4> shapes{};
    for (Frame f : kAllFrames) {
        double target = lpn_rates[frame_index(f)];
        check_probability(target, "LPN endorsement rate");
        // Invert the polarity normalization: under negative frames an
        // endorsement is expressed as disagreement.
        double p_agree = polarity(f) == Polarity::positive ? target : 1.0 - target;
        shapes[frame_index(f)] = CellShape{p_agree, compliance};
    }
    config.fallback = shapes;
    return config;
}

MockModelConfig build_negation_fragile_mock(double svi_target, std::uint64_t seed) {
    check_probability(svi_target, "svi_target");
    double p = (1.0 - svi_target) / 2.0;
    auto clip = [](double v) { return std::min(1.0, std::max(0.0, v)); };
    return mock_from_lpn_rates({clip(p), clip(p), clip(p), clip(p + svi_target)}, 1.0, seed);
}

namespace {

std::map<std::string, std::string> parse_query(std::string_view query, std::string_view tag) {
    std::map<std::string, std::string> out;
    std::size_t pos = 0;
    while (pos < query.size()) {
        auto amp = query.find('&', pos);
        if (amp == std::string_view::npos) amp = query.size();
        auto pair = query.substr(pos, amp - pos);
        auto eq = pair.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("malformed mock tag '" + std::string(tag) + "'");
        out.emplace(std::string(pair.substr(0, eq)), std::string(pair.substr(eq + 1)));
        pos = amp + 1;
    }
    return out;
}

double to_double(const std::map<std::string, std::string>& kv, const std::string& key,
                 std::optional<double> fallback, std::string_view tag) {
    auto it = kv.find(key);
    if (it == kv.end()) {
        if (fallback) return *fallback;
        throw ConfigError("mock tag '" + std::string(tag) + "' is missing parameter '" + key + "'");
    }
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw ConfigError("mock tag '" + std::string(tag) + "': parameter '" + key +
                          "' is not a number");
    }
}

}  // namespace

MockModelConfig mock_config_from_tag(std::string_view tag) {
    constexpr std::string_view prefix = "mock:";
    if (tag.substr(0, prefix.size()) != prefix)
        throw ConfigError("not a mock endpoint tag: '" + std::string(tag) + "'");
    auto rest = tag.substr(prefix.size());
    auto qmark = rest.find('?');
    std::string kind(rest.substr(0, qmark));
    auto kv = qmark == std::string_view::npos
                  ? std::map<std::string, std::string>{}
                  : parse_query(rest.substr(qmark + 1), tag);

    auto seed = static_cast<std::uint64_t>(to_double(kv, "seed", 0.0, tag));
    double compliance = to_double(kv, "compliance", 1.0, tag);
    check_probability(compliance, "compliance");

    if (kind == "fragile") {
        auto config = build_negation_fragile_mock(to_double(kv, "svi", std::nullopt, tag), seed);
        for (auto& shape : *config.fallback) shape.compliance = compliance;
        return config;
    }
    if (kind == "uniform") {
        double p = to_double(kv, "p", 0.5, tag);
        check_probability(p, "p");
        MockModelConfig config;
        config.seed = seed;
        config.fallback = std::array<CellShape, 4>{CellShape{p, compliance}, CellShape{p, compliance},
                                                   CellShape{p, compliance}, CellShape{p, compliance}};
        return config;
    }
    if (kind == "lpn") {
        std::array<double, 4> rates{};
        for (Frame f : kAllFrames) {
            std::string key(frame_name(f));
            for (auto& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            rates[frame_index(f)] = to_double(kv, key, std::nullopt, tag);
        }
        auto config = mock_from_lpn_rates(rates, compliance, seed);
        return config;
    }
    throw ConfigError("unknown mock kind '" + kind + "' in tag '" + std::string(tag) + "'");
}

// ---------------------------------------------------------------------------
// HTTP provider
// ---------------------------------------------------------------------------

json build_chat_request(const ModelSpec& spec, const PromptInstance& prompt,
                        const SamplingPolicy& policy) {
    json body;
    body["model"] = spec.model_id;
    body["messages"] = json::array({json{{"role", "user"}, {"content", prompt.full_text}}});
    body["max_tokens"] = spec.max_output_tokens;
    if (spec.supports_temperature && policy.temperature) body["temperature"] = *policy.temperature;
    return body;
}

namespace {

struct ParsedUrl {
    std::string base;  // scheme://host[:port]
    std::string path;
};

ParsedUrl parse_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw ConfigError("endpoint is not a URL: '" + url + "'");
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/v1/chat/completions"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

bool retryable_status(int status) { return status == 429 || status >= 500; }

}  // namespace

std::string HttpProvider::sample(const ModelSpec& spec, const PromptInstance& prompt,
                                 const SamplingPolicy& policy, int) {
    auto url = parse_url(spec.endpoint);
#ifndef SFA_HTTPS_SUPPORT
    if (url.base.rfind("https://", 0) == 0)
        throw RunFatalError("built without TLS support; cannot reach " + url.base);
#endif

    httplib::Headers headers;
    if (!spec.auth_env.empty()) {
        const char* key = std::getenv(spec.auth_env.c_str());
        if (key == nullptr || *key == '\0')
            throw RunFatalError("auth env var '" + spec.auth_env + "' is not set for model '" +
                                spec.model_id + "'");
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    std::string body = build_chat_request(spec, prompt, policy).dump();
    std::string last_error;
    for (int attempt = 0; attempt <= policy.max_retries; ++attempt) {
        if (attempt > 0)
            std::this_thread::sleep_for(policy.backoff_base * (1 << (attempt - 1)));

        httplib::Client client(url.base);
        auto timeout_s = std::chrono::duration_cast<std::chrono::seconds>(policy.timeout);
        client.set_connection_timeout(timeout_s.count() ? timeout_s : std::chrono::seconds(1));
        client.set_read_timeout(timeout_s.count() ? timeout_s : std::chrono::seconds(1));

        auto res = client.Post(url.path, headers, body, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 401 || res->status == 403)
            throw RunFatalError("endpoint rejected credentials for model '" + spec.model_id +
                                "' (HTTP " + std::to_string(res->status) + ")");
        if (retryable_status(res->status)) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200)
            throw RunFatalError("endpoint returned HTTP " + std::to_string(res->status) +
                                " for model '" + spec.model_id + "'");

        json envelope = json::parse(res->body, nullptr, false);
        if (envelope.is_discarded() || !envelope.contains("choices") ||
            !envelope["choices"].is_array() || envelope["choices"].empty() ||
            !envelope["choices"][0].contains("message") ||
            !envelope["choices"][0]["message"].contains("content") ||
            !envelope["choices"][0]["message"]["content"].is_string())
            throw SampleFailedError("response envelope missing choices[0].message.content");
        return envelope["choices"][0]["message"]["content"].get<std::string>();
    }
    throw SampleFailedError("sample failed after " + std::to_string(policy.max_retries) +
                            " retries: " + last_error);
}

std::string sample_decision(Provider& provider, const ModelSpec& spec,
                            const PromptInstance& prompt, const SamplingPolicy& policy,
                            int attempt_index) {
    return provider.sample(spec, prompt, policy, attempt_index);
}

std::unique_ptr<Provider> make_provider(const ModelSpec& spec) {
    if (spec.mock) return std::make_unique<MockProvider>();
    return std::make_unique<HttpProvider>();
}

// ---------------------------------------------------------------------------
// Registry / serialization
// ---------------------------------------------------------------------------

namespace {

json mock_to_json(const MockModelConfig& m) {
    json j;
    j["seed"] = m.seed;
    if (m.fallback) {
        json arr = json::array();
        for (const auto& s : *m.fallback)
            arr.push_back(json{{"p_agree", s.p_agree}, {"compliance", s.compliance}});
        j["fallback"] = arr;
    }
    if (!m.cells.empty()) {
        json arr = json::array();
        for (const auto& [key, s] : m.cells)
            arr.push_back(json{{"scenario", key.first},
                               {"frame", std::string(frame_name(key.second))},
                               {"p_agree", s.p_agree},
                               {"compliance", s.compliance}});
        j["cells"] = arr;
    }
    return j;
}

MockModelConfig mock_from_json(const json& j) {
    MockModelConfig m;
    m.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("fallback")) {
        std::array<CellShape, 4> shapes{};
        const auto& arr = j.at("fallback");
        for (std::size_t i = 0; i < 4; ++i)
            shapes[i] = CellShape{arr.at(i).at("p_agree").get<double>(),
                                  arr.at(i).at("compliance").get<double>()};
        m.fallback = shapes;
    }
    if (j.contains("cells")) {
        for (const auto& c : j.at("cells"))
            m.cells[{c.at("scenario").get<std::string>(),
                     frame_from_name(c.at("frame").get<std::string>())}] =
                CellShape{c.at("p_agree").get<double>(), c.at("compliance").get<double>()};
    }
    return m;
}

}  // namespace

json model_spec_to_json(const ModelSpec& spec) {
    json j;
    j["model_id"] = spec.model_id;
    j["origin"] = std::string(origin_name(spec.origin));
    j["tier"] = std::string(tier_name(spec.tier));
    j["endpoint"] = spec.endpoint;
    if (!spec.auth_env.empty()) j["auth_env"] = spec.auth_env;
    j["supports_temperature"] = spec.supports_temperature;
    j["reasoning_mode"] = std::string(reasoning_mode_name(spec.reasoning_mode));
    if (spec.family) j["family"] = *spec.family;
    if (spec.mock) j["mock"] = mock_to_json(*spec.mock);
    j["max_output_tokens"] = spec.max_output_tokens;
    return j;
}

ModelSpec model_spec_from_json(const json& j, std::string_view context) {
    auto where = [&](const std::string& what) { return std::string(context) + ": " + what; };
    ModelSpec spec;
    try {
        spec.model_id = j.at("model_id").get<std::string>();
        spec.origin = origin_from_name(j.at("origin").get<std::string>());
        spec.tier = tier_from_name(j.at("tier").get<std::string>());
        spec.endpoint = j.at("endpoint").get<std::string>();
        spec.auth_env = j.value("auth_env", std::string{});
        spec.supports_temperature = j.value("supports_temperature", true);
        spec.reasoning_mode =
            reasoning_mode_from_name(j.value("reasoning_mode", std::string("provider_default")));
        if (j.contains("family")) spec.family = j.at("family").get<std::string>();
        spec.max_output_tokens = j.value("max_output_tokens", 1024);
        if (j.contains("mock"))
            spec.mock = mock_from_json(j.at("mock"));
        else if (spec.endpoint.rfind("mock:", 0) == 0)
            spec.mock = mock_config_from_tag(spec.endpoint);
    } catch (const json::exception& e) {
        throw ConfigError(where(std::string("malformed model entry: ") + e.what()));
    }
    if (spec.model_id.empty()) throw ConfigError(where("model_id must be non-empty"));
    return spec;
}

std::vector<ModelSpec> load_provider_registry(std::istream& in, std::string_view source_name) {
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded())
        throw ConfigError(std::string(source_name) + ": provider registry is not valid JSON");
    if (!doc.is_array())
        throw ConfigError(std::string(source_name) + ": provider registry must be a JSON array");
    std::vector<ModelSpec> specs;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        auto context = std::string(source_name) + " entry " + std::to_string(i);
        specs.push_back(model_spec_from_json(doc[i], context));
    }
    for (std::size_t i = 0; i < specs.size(); ++i)
        for (std::size_t j = i + 1; j < specs.size(); ++j)
            if (specs[i].model_id == specs[j].model_id)
                throw ConfigError(std::string(source_name) + ": duplicate model_id '" +
                                  specs[i].model_id + "'");
    return specs;
}

std::vector<ModelSpec> load_provider_registry(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open provider registry: " + file.string());
    return load_provider_registry(in, file.string());
}

}  // namespace sfa
