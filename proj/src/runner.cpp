#include "sfa/runner.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <future>
#include <set>

#include "sfa/rng.hpp"

namespace sfa {

using nlohmann::json;

std::string_view ablation_name(Ablation a) {
    return a == Ablation::temperature_zero ? "temperature_zero" : "none";
}

Ablation ablation_from_name(std::string_view name) {
    if (name == "none") return Ablation::none;
    if (name == "temperature_zero") return Ablation::temperature_zero;
    throw ConfigError("unknown ablation: '" + std::string(name) + "'");
}

std::uint64_t plan_cardinality(std::uint64_t models, std::uint64_t scenarios,
                               std::uint64_t frames, std::uint64_t samples) {
    return models * scenarios * frames * samples;
}

std::uint64_t plan_cardinality(const RunPlan& plan) {
    return plan_cardinality(plan.models.size(), plan.scenarios.size(), kAllFrames.size(),
                            static_cast<std::uint64_t>(plan.policy.n_samples));
}

// ---------------------------------------------------------------------------
// Plan serialization / digest
// ---------------------------------------------------------------------------

namespace {

json scenario_to_json(const Scenario& s) {
    json j;
    j["id"] = s.id;
    j["domain"] = std::string(domain_name(s.domain));
    j["scenario_text"] = s.scenario_text;
    j["subject"] = s.subject;
    j["action"] = s.action;
    j["goal"] = s.goal;
    if (!s.action_core.empty()) j["action_core"] = s.action_core;
    j["connective_f2"] = s.connective_f2;
    j["connective_f3"] = s.connective_f3;
    for (Frame f : kAllFrames)
        if (s.proposal_override[frame_index(f)]) {
            std::string key = "proposal_";
            key += frame_name(f);
            j[key] = *s.proposal_override[frame_index(f)];
        }
    return j;
}

Scenario scenario_from_json(const json& j) {
    Scenario s;
    s.id = j.at("id").get<std::string>();
    s.domain = domain_from_name(j.at("domain").get<std::string>());
    s.scenario_text = j.at("scenario_text").get<std::string>();
    s.subject = j.at("subject").get<std::string>();
    s.action = j.at("action").get<std::string>();
    s.goal = j.at("goal").get<std::string>();
    s.action_core = j.value("action_core", std::string{});
    s.connective_f2 = j.value("connective_f2", s.connective_f2);
    s.connective_f3 = j.value("connective_f3", s.connective_f3);
    for (Frame f : kAllFrames) {
        std::string key = "proposal_";
        key += frame_name(f);
        if (j.contains(key)) s.proposal_override[frame_index(f)] = j.at(key).get<std::string>();
    }
    validate_scenario(s);
    return s;
}

json policy_to_json(const SamplingPolicy& p) {
    json j;
    j["n_samples"] = p.n_samples;
    if (p.temperature)
        j["temperature"] = *p.temperature;
    else
        j["temperature"] = nullptr;
    j["max_retries"] = p.max_retries;
    j["timeout_ms"] = p.timeout.count();
    j["concurrency_limit"] = p.concurrency_limit;
    j["backoff_base_ms"] = p.backoff_base.count();
    return j;
}

SamplingPolicy policy_from_json(const json& j) {
    SamplingPolicy p;
    p.n_samples = j.at("n_samples").get<int>();
    if (j.contains("temperature") && !j.at("temperature").is_null())
        p.temperature = j.at("temperature").get<double>();
    else
        p.temperature = std::nullopt;
    p.max_retries = j.value("max_retries", p.max_retries);
    p.timeout = std::chrono::milliseconds(j.value("timeout_ms", p.timeout.count()));
    p.concurrency_limit = j.value("concurrency_limit", p.concurrency_limit);
    p.backoff_base = std::chrono::milliseconds(j.value("backoff_base_ms", p.backoff_base.count()));
    validate(p);
    return p;
}

}  // namespace

json plan_to_json(const RunPlan& plan) {
    json j;
    j["run_id"] = plan.run_id;
    j["seed"] = plan.seed;
    j["ablation"] = std::string(ablation_name(plan.ablation));
    j["policy"] = policy_to_json(plan.policy);
    j["models"] = json::array();
    for (const auto& m : plan.models) j["models"].push_back(model_spec_to_json(m));
    j["scenarios"] = json::array();
    for (const auto& s : plan.scenarios) j["scenarios"].push_back(scenario_to_json(s));
    return j;
}

RunPlan plan_from_json(const json& j, std::string_view context) {
    RunPlan plan;
    try {
        plan.run_id = j.at("run_id").get<std::string>();
        plan.seed = j.at("seed").get<std::uint64_t>();
        plan.ablation = ablation_from_name(j.value("ablation", std::string("none")));
        plan.policy = policy_from_json(j.at("policy"));
        for (const auto& m : j.at("models"))
            plan.models.push_back(model_spec_from_json(m, context));
        for (const auto& s : j.at("scenarios")) plan.scenarios.push_back(scenario_from_json(s));
    } catch (const json::exception& e) {
        throw ConfigError(std::string(context) + ": malformed plan: " + e.what());
    }
    if (plan.run_id.empty()) throw ConfigError(std::string(context) + ": run_id must be non-empty");
    return plan;
}

std::string plan_digest(const RunPlan& plan) {
    json j = plan_to_json(plan);
    return "fnv1a64:" + fnv1a64_hex(j.dump());
}

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

json record_to_json(const RunRecord& r) {
    json j;
    j["run_id"] = r.run_id;
    j["model_id"] = r.model_id;
    j["scenario_id"] = r.scenario_id;
    j["frame"] = std::string(frame_name(r.frame));
    j["draw_index"] = r.draw_index;
    j["timestamp"] = r.timestamp;
    if (r.temperature_used)
        j["temperature_used"] = *r.temperature_used;
    else
        j["temperature_used"] = "provider_default";
    j["prompt_hash"] = r.prompt_hash;
    j["raw_response"] = r.raw_response;
    json parse;
    parse["status"] = r.parse.valid ? "valid" : "invalid";
    if (r.parse.failure_reason) parse["failure_reason"] = *r.parse.failure_reason;
    if (r.parse.record) {
        const auto& rec = *r.parse.record;
        parse["record"] = json{{"decision", std::string(decision_name(rec.decision))},
                               {"confidence", rec.confidence},
                               {"adherence_to_laws", rec.adherence_to_laws},
                               {"adherence_to_social_ethics", rec.adherence_to_social_ethics},
                               {"objective_positive_consequences", rec.objective_positive_consequences},
                               {"objective_negative_consequences", rec.objective_negative_consequences},
                               {"reasoning", rec.reasoning}};
    }
    if (r.parse.warning) parse["warning"] = *r.parse.warning;
    j["parse"] = parse;
    if (r.lpn_action) j["lpn_action"] = *r.lpn_action;
    return j;
}

RunRecord record_from_json(const json& j) {
    RunRecord r;
    r.run_id = j.at("run_id").get<std::string>();
    r.model_id = j.at("model_id").get<std::string>();
    r.scenario_id = j.at("scenario_id").get<std::string>();
    r.frame = frame_from_name(j.at("frame").get<std::string>());
    r.draw_index = j.at("draw_index").get<int>();
    r.timestamp = j.at("timestamp").get<std::string>();
    if (j.at("temperature_used").is_number())
        r.temperature_used = j.at("temperature_used").get<double>();
    r.prompt_hash = j.at("prompt_hash").get<std::string>();
    r.raw_response = j.at("raw_response").get<std::string>();
    const json& parse = j.at("parse");
    r.parse.valid = parse.at("status").get<std::string>() == "valid";
    r.parse.raw_text = r.raw_response;
    if (parse.contains("failure_reason"))
        r.parse.failure_reason = parse.at("failure_reason").get<std::string>();
    if (parse.contains("warning")) r.parse.warning = parse.at("warning").get<std::string>();
    if (parse.contains("record")) {
        const json& rec = parse.at("record");
        DecisionRecord d;
        std::string token = rec.at("decision").get<std::string>();
        d.decision = token == "agree" ? Decision::agree : Decision::disagree;
        d.confidence = rec.at("confidence").get<int>();
        d.adherence_to_laws = rec.at("adherence_to_laws").get<int>();
        d.adherence_to_social_ethics = rec.at("adherence_to_social_ethics").get<int>();
        d.objective_positive_consequences = rec.at("objective_positive_consequences").get<int>();
        d.objective_negative_consequences = rec.at("objective_negative_consequences").get<int>();
        d.reasoning = rec.at("reasoning").get<std::string>();
        r.parse.record = std::move(d);
    }
    if (j.contains("lpn_action")) r.lpn_action = j.at("lpn_action").get<int>();
    return r;
}

// ---------------------------------------------------------------------------
// Sinks
// ---------------------------------------------------------------------------

JsonlSink::JsonlSink(const std::filesystem::path& file) : path_(file) {
    out_ = std::make_unique<std::ofstream>(file, std::ios::app);
    if (!*out_) throw ConfigError("cannot open run log for append: " + file.string());
}

void JsonlSink::append(const RunRecord& r) {
    *out_ << record_to_json(r).dump() << '\n';
    out_->flush();
    if (!*out_) throw RunFatalError("write to run log failed: " + path_.string());
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

ProviderSet::ProviderSet(const std::vector<ModelSpec>& specs) {
    for (const auto& spec : specs) providers_[spec.model_id] = make_provider(spec);
}

Provider& ProviderSet::for_model(const ModelSpec& spec) {
    auto it = providers_.find(spec.model_id);
    if (it == providers_.end())
        throw ConfigError("no provider for model '" + spec.model_id + "'");
    return *it->second;
}

std::vector<TupleKey> plan_tuples(const RunPlan& plan) {
    std::vector<TupleKey> tuples;
    tuples.reserve(plan_cardinality(plan));
    for (int d = 0; d < plan.policy.n_samples; ++d)
        for (const auto& s : plan.scenarios)
            for (Frame f : kAllFrames)
                for (const auto& m : plan.models)
                    tuples.push_back(TupleKey{m.model_id, s.id, f, d});
    return tuples;
}

namespace {

std::string utc_timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%FT%TZ", &tm);
    return buf;
}

struct SampleResult {
    std::string raw;
    bool failed = false;
    std::string failure;
};

}  // namespace

RunSummary execute_tuples(const RunPlan& plan, const std::vector<TupleKey>& tuples,
                          ProviderFactory providers, RecordSink& sink) {
    validate(plan.policy);
    std::map<std::string, const ModelSpec*> models;
    for (const auto& m : plan.models) models[m.model_id] = &m;
    std::map<std::string, const Scenario*> scenarios;
    for (const auto& s : plan.scenarios) scenarios[s.id] = &s;

    // Prompts are frame-deterministic; render each (scenario, frame) once.
    std::map<std::pair<std::string, Frame>, PromptInstance> prompts;
    for (const auto& [id, s] : scenarios)
        for (Frame f : kAllFrames) prompts[{id, f}] = render_prompt(*s, f);

    RunSummary summary;
    std::size_t window = static_cast<std::size_t>(std::max(1, plan.policy.concurrency_limit));

    for (std::size_t start = 0; start < tuples.size(); start += window) {
        std::size_t end = std::min(tuples.size(), start + window);

        // Sample the window concurrently, then persist strictly in plan order
        // so the log bytes do not depend on scheduling.
        std::vector<std::future<SampleResult>> batch;
        batch.reserve(end - start);
        for (std::size_t i = start; i < end; ++i) {
            const TupleKey& key = tuples[i];
            const ModelSpec* spec = models.at(key.model_id);
            const PromptInstance& prompt = prompts.at({key.scenario_id, key.frame});
            Provider& provider = providers(*spec);
            batch.push_back(std::async(
                window == 1 ? std::launch::deferred : std::launch::async,
                [&provider, spec, &prompt, &plan, &key]() -> SampleResult {
                    try {
                        return {sample_decision(provider, *spec, prompt, plan.policy,
                                                key.draw_index),
                                false,
                                {}};
                    } catch (const SampleFailedError& e) {
                        return {{}, true, e.what()};
                    }
                }));
        }

        for (std::size_t i = start; i < end; ++i) {
            const TupleKey& key = tuples[i];
            const ModelSpec* spec = models.at(key.model_id);
            const PromptInstance& prompt = prompts.at({key.scenario_id, key.frame});
            SampleResult sample = batch[i - start].get();

            RunRecord rec;
            rec.run_id = plan.run_id;
            rec.model_id = key.model_id;
            rec.scenario_id = key.scenario_id;
            rec.frame = key.frame;
            rec.draw_index = key.draw_index;
            rec.timestamp = utc_timestamp();
            rec.temperature_used =
                spec->supports_temperature ? plan.policy.temperature : std::nullopt;
            rec.prompt_hash = "fnv1a64:" + fnv1a64_hex(prompt.full_text);
            if (sample.failed) {
                rec.raw_response.clear();
                rec.parse.valid = false;
                rec.parse.failure_reason = "sample failed: " + sample.failure;
            } else {
                rec.raw_response = sample.raw;
                rec.parse = parse_response(sample.raw);
            }
            if (rec.parse.valid)
                rec.lpn_action = lpn(key.frame, rec.parse.record->decision);

            sink.append(rec);

            auto& counts = summary.per_model[key.model_id];
            ++counts.attempts;
            if (rec.parse.valid)
                ++counts.valid;
            else
                ++counts.invalid;
            if (sample.failed) ++counts.sample_failures;
            ++summary.total_records;
        }
    }
    return summary;
}

RunSummary execute(const RunPlan& plan, ProviderFactory providers, RecordSink& sink) {
    return execute_tuples(plan, plan_tuples(plan), std::move(providers), sink);
}

RunSummary execute(const RunPlan& plan, RecordSink& sink) {
    auto set = std::make_shared<ProviderSet>(plan.models);
    return execute(plan, [set](const ModelSpec& m) -> Provider& { return set->for_model(m); },
                   sink);
}

// ---------------------------------------------------------------------------
// Log reading / resume
// ---------------------------------------------------------------------------

std::vector<RunRecord> read_run_log(const std::filesystem::path& file,
                                    std::vector<std::string>* warnings) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open run log: " + file.string());
    std::vector<RunRecord> records;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            if (warnings)
                warnings->push_back(file.string() + ":" + std::to_string(line_no) +
                                    ": corrupt record ignored");
            continue;
        }
        try {
            records.push_back(record_from_json(j));
        } catch (const std::exception& e) {
            if (warnings)
                warnings->push_back(file.string() + ":" + std::to_string(line_no) +
                                    ": corrupt record ignored (" + e.what() + ")");
        }
    }
    return records;
}

std::vector<TupleKey> resume_remainder(const RunPlan& plan, const std::filesystem::path& log_file,
                                       std::vector<std::string>* warnings) {
    std::set<TupleKey> present;
    for (const auto& rec : read_run_log(log_file, warnings)) {
        if (rec.run_id != plan.run_id) {
            if (warnings)
                warnings->push_back("record with foreign run_id '" + rec.run_id + "' ignored");
            continue;
        }
        TupleKey key{rec.model_id, rec.scenario_id, rec.frame, rec.draw_index};
        if (!present.insert(key).second && warnings)
            warnings->push_back("duplicate record for (" + rec.model_id + ", " + rec.scenario_id +
                                ", " + std::string(frame_name(rec.frame)) + ", " +
                                std::to_string(rec.draw_index) + ")");
    }
    std::vector<TupleKey> remainder;
    for (const auto& key : plan_tuples(plan))
        if (!present.count(key)) remainder.push_back(key);
    return remainder;
}

AblationPlanResult temperature_ablation_plan(const RunPlan& base) {
    AblationPlanResult result;
    result.plan = base;
    result.plan.run_id = base.run_id + "-t0";
    result.plan.ablation = Ablation::temperature_zero;
    result.plan.policy.temperature = 0.0;
    result.plan.models.clear();
    for (const auto& m : base.models) {
        if (m.supports_temperature)
            result.plan.models.push_back(m);
        else
            result.dropped_models.push_back(m.model_id);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Snapshot
// ---------------------------------------------------------------------------

void write_plan_snapshot(const RunPlan& plan, const std::filesystem::path& file) {
    json j = plan_to_json(plan);
    j["digest"] = plan_digest(plan);
    std::ofstream out(file);
    if (!out) throw ConfigError("cannot write plan snapshot: " + file.string());
    out << j.dump(2) << '\n';
}

RunPlan load_plan_snapshot(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open plan snapshot: " + file.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("plan snapshot is not valid JSON: " + file.string());
    if (!j.contains("digest"))
        throw ConfigError("plan snapshot has no digest: " + file.string());
    std::string stored = j.at("digest").get<std::string>();
    RunPlan plan = plan_from_json(j, file.string());
    if (plan_digest(plan) != stored)
        throw ConfigError("plan digest mismatch in " + file.string() +
                          "; refusing to resume a run under a different protocol");
    return plan;
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

LogAggregate aggregate_log(const std::vector<RunRecord>& records, double compliance_threshold,
                           double min_valid_fraction) {
    LogAggregate agg;
    for (const auto& rec : records) agg.ledger.update(rec.model_id, rec.parse);

    auto partition = apply_exclusion_rule(agg.ledger, compliance_threshold);
    std::set<std::string> included(partition.included.begin(), partition.included.end());
    agg.excluded_models = partition.excluded;

    std::map<std::pair<std::string, std::string>, CellObservations> cells;
    for (const auto& rec : records) {
        if (!included.count(rec.model_id)) continue;
        auto& obs = cells[{rec.model_id, rec.scenario_id}];
        obs.model = rec.model_id;
        obs.scenario = rec.scenario_id;
        auto& draws = obs.decisions_by_draw[frame_index(rec.frame)];
        if (static_cast<int>(draws.size()) <= rec.draw_index)
            draws.resize(static_cast<std::size_t>(rec.draw_index) + 1);
        if (rec.parse.valid) draws[static_cast<std::size_t>(rec.draw_index)] = rec.parse.record->decision;
    }

    for (auto& [key, obs] : cells) {
        auto outcome = score_cell(obs, min_valid_fraction);
        if (std::holds_alternative<CellStats>(outcome))
            agg.cells.push_back(std::get<CellStats>(std::move(outcome)));
        else
            agg.excluded_cells.push_back(std::get<CellExclusion>(std::move(outcome)));
    }
    return agg;
}

}  // namespace sfa
