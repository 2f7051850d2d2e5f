#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "sfa/lpn.hpp"
#include "sfa/providers.hpp"
#include "sfa/response.hpp"
#include "sfa/scenario.hpp"

namespace sfa {

enum class Ablation { none, temperature_zero };

std::string_view ablation_name(Ablation a);
Ablation ablation_from_name(std::string_view name);

// The crossed design: every model x scenario x frame cell sampled n times.
struct RunPlan {
    std::string run_id;
    std::vector<ModelSpec> models;
    std::vector<Scenario> scenarios;
    SamplingPolicy policy;
    Ablation ablation = Ablation::none;
    std::uint64_t seed = 0;
};

std::uint64_t plan_cardinality(const RunPlan& plan);
std::uint64_t plan_cardinality(std::uint64_t models, std::uint64_t scenarios,
                               std::uint64_t frames, std::uint64_t samples);

// Content fingerprint of everything that affects sampling. Two runs may only
// be mixed (resumed into one log) when their digests match.
std::string plan_digest(const RunPlan& plan);

struct RunRecord {
    std::string run_id;
    std::string model_id;
    std::string scenario_id;
    Frame frame = Frame::F0;
    int draw_index = 0;
    std::string timestamp;                  // ISO 8601 UTC
    std::optional<double> temperature_used; // nullopt: provider default
    std::string prompt_hash;
    std::string raw_response;
    ParseOutcome parse;
    std::optional<int> lpn_action;  // present iff parse.valid
};

nlohmann::json record_to_json(const RunRecord& r);
RunRecord record_from_json(const nlohmann::json& j);

// Single-writer destination for run records. Appends must be durable before
// the run advances past them.
class RecordSink {
public:
    virtual ~RecordSink() = default;
    virtual void append(const RunRecord& r) = 0;
};

// One JSON object per line in {run_id}.jsonl; append-only, flushed per record.
class JsonlSink : public RecordSink {
public:
    explicit JsonlSink(const std::filesystem::path& file);
    void append(const RunRecord& r) override;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::unique_ptr<std::ofstream> out_;
};

struct ModelRunCounts {
    std::int64_t attempts = 0;
    std::int64_t valid = 0;
    std::int64_t invalid = 0;
    std::int64_t sample_failures = 0;  // transport errors recorded as invalid attempts
};

struct RunSummary {
    std::map<std::string, ModelRunCounts> per_model;
    std::int64_t total_records = 0;
};

using ProviderFactory = std::function<Provider&(const ModelSpec&)>;

// Owns one provider instance per model; the default factory for execute().
class ProviderSet {
public:
    explicit ProviderSet(const std::vector<ModelSpec>& specs);
    Provider& for_model(const ModelSpec& spec);

private:
    std::map<std::string, std::unique_ptr<Provider>> providers_;
};

struct TupleKey {
    std::string model_id;
    std::string scenario_id;
    Frame frame = Frame::F0;
    int draw_index = 0;

    auto operator<=>(const TupleKey&) const = default;
};

// Plan order: draws outermost, models innermost, so consecutive requests
// round-robin across endpoints.
std::vector<TupleKey> plan_tuples(const RunPlan& plan);

// Samples every tuple exactly once and appends each outcome before moving on.
// Individual sample failures are recorded and skipped; RunFatalError aborts
// (the log stays valid for resume).
RunSummary execute(const RunPlan& plan, ProviderFactory providers, RecordSink& sink);
RunSummary execute(const RunPlan& plan, RecordSink& sink);

// Tuples of the plan that are absent from the log. Corrupt log lines are
// skipped with a warning and their tuples re-queued.
std::vector<TupleKey> resume_remainder(const RunPlan& plan, const std::filesystem::path& log_file,
                                       std::vector<std::string>* warnings = nullptr);

RunSummary execute_tuples(const RunPlan& plan, const std::vector<TupleKey>& tuples,
                          ProviderFactory providers, RecordSink& sink);

struct AblationPlanResult {
    RunPlan plan;
    std::vector<std::string> dropped_models;  // models without temperature support
};

// Clone of the base plan at temperature 0 with a distinct run id. Models that
// cannot take a temperature are dropped with a notice.
AblationPlanResult temperature_ablation_plan(const RunPlan& base);

std::vector<RunRecord> read_run_log(const std::filesystem::path& file,
                                    std::vector<std::string>* warnings = nullptr);

// Plan snapshot sidecar ({run_id}.plan.json): the fully resolved plan plus its
// digest, written at run start and required for resume.
void write_plan_snapshot(const RunPlan& plan, const std::filesystem::path& file);
RunPlan load_plan_snapshot(const std::filesystem::path& file);

nlohmann::json plan_to_json(const RunPlan& plan);
RunPlan plan_from_json(const nlohmann::json& j, std::string_view context);

// Aggregates a sealed run log into per-cell observations, a compliance
// ledger, and scored cells. Cells of excluded models are not scored.
struct LogAggregate {
    ComplianceLedger ledger;
    std::vector<CellStats> cells;
    std::vector<CellExclusion> excluded_cells;
    std::vector<std::string> excluded_models;
};

LogAggregate aggregate_log(const std::vector<RunRecord>& records,
                           double compliance_threshold = 0.80,
                           double min_valid_fraction = 0.5);

}  // namespace sfa
