#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "sfa/lpn.hpp"
#include "sfa/providers.hpp"
#include "sfa/response.hpp"
#include "sfa/stats.hpp"

namespace sfa {

struct ModelSummary {
    std::string model_id;
    Origin origin = Origin::oss;
    Tier tier = Tier::tiny;
    double mean_svi = 0.0;
    IntervalEstimate svi_ci;  // bootstrap over the model's scenario-level SVIs
    std::optional<double> compliance_rate;
    std::array<int, 3> fragility_histogram{};  // robust / moderate / high
    int rank = 0;                              // 1 = most fragile
};

enum class RiskBand { high, mid, low };
std::string_view risk_band_name(RiskBand b);

struct ScenarioProfile {
    std::string scenario_id;
    std::optional<Domain> domain;
    double mean_svi = 0.0;
    IntervalEstimate ci;
    RiskBand risk_band = RiskBand::mid;  // high > 0.5, low < 0.3
};

struct GateConfig {
    double threshold = 0.5;
    enum class Scope { aggregate_svi, max_scenario_svi } scope = Scope::aggregate_svi;
    std::string profile = "human_in_loop";

    static GateConfig autonomous();     // threshold 0.2
    static GateConfig human_in_loop();  // threshold 0.5
    static GateConfig custom(double threshold, Scope scope);
};

struct ReasoningPairDelta {
    std::string family;
    std::string baseline_model;
    std::string enhanced_model;
    double svi_baseline = 0.0;
    double svi_enhanced = 0.0;
    double delta = 0.0;  // negative: the reasoning variant is less fragile
};

struct OriginSummary {
    Origin origin = Origin::oss;
    int n_models = 0;
    double mean_svi = 0.0;
    FrameRates frame_rates{};  // mean endorsement per frame over the origin's cells
    std::optional<double> polarity_swing_pct;
    std::optional<PosteriorSummary> posterior;
};

struct PairwiseOriginTest {
    Origin a = Origin::oss;
    Origin b = Origin::oss;
    TestResult result;
};

struct AuditReport {
    std::uint64_t seed = 0;
    int n_cells = 0;
    double global_mean_svi = 0.0;
    IntervalEstimate global_ci;
    std::array<double, 3> fragility_shares{};  // robust / moderate / high
    std::optional<double> significant_cell_share;  // Cochran's Q, post-BH
    int n_cells_tested = 0;
    std::vector<ModelSummary> models;        // rank order
    std::vector<ScenarioProfile> scenarios;  // scenario id order
    std::vector<OriginSummary> origins;
    std::optional<TestResult> origin_kw;
    std::vector<PairwiseOriginTest> origin_pairwise;
    std::array<std::optional<double>, 4> agreement;  // per frame
    std::vector<ReasoningPairDelta> reasoning_pairs;
    std::vector<std::string> excluded_models;
    std::vector<CellExclusion> excluded_cells;
    std::optional<TestResult> ablation_wilcoxon;
    std::string model_card;
};

struct ReportError : Error {
    using Error::Error;
};

// Aggregates scored cells into the full report: rankings, origin comparisons,
// scenario risk profiles, per-cell significance share, agreement, pair deltas.
// `scenarios` is only used to attach domains to scenario profiles.
AuditReport build_report(const std::vector<CellStats>& cells, const ComplianceLedger& ledger,
                         const std::vector<ModelSpec>& specs, std::uint64_t seed,
                         const std::vector<Scenario>& scenarios = {});

// Mean pairwise agreement of per-cell majority LPN actions, per frame,
// averaged over scenarios. A cell's majority vote is 1 when p_act >= 0.5.
// Frames with fewer than 2 models on every scenario stay unset.
std::array<std::optional<double>, 4> inter_model_agreement(const std::vector<CellStats>& cells);

// Baseline-vs-enhanced SVI deltas for the given (family, baseline, enhanced)
// triples; pairs with a missing member are skipped with a warning.
std::vector<ReasoningPairDelta> reasoning_pair_deltas(
    const std::vector<ModelSummary>& summaries,
    const std::vector<std::tuple<std::string, std::string, std::string>>& pairs,
    std::vector<std::string>* warnings = nullptr);

// Derives (family, baseline, enhanced) triples from the registry: within one
// family, reasoning_mode none vs enabled.
std::vector<std::tuple<std::string, std::string, std::string>> derive_reasoning_pairs(
    const std::vector<ModelSpec>& specs);

struct GateVerdict {
    bool pass = false;
    double observed = 0.0;
    GateConfig config;
    std::vector<std::string> offending_scenarios;  // scope = max_scenario_svi only
    int exit_status = 0;                           // 0 pass, 2 fail
};

// Pass iff the scoped statistic is strictly below the threshold.
GateVerdict evaluate_gate(const AuditReport& report, const GateConfig& gate);

nlohmann::json report_to_json(const AuditReport& report);

enum class ExportFormat { json, csv_bundle };

// Writes report.json and, for csv_bundle, the plot-ready CSV files
// (heatmap, ranking, framing rates, scenario profiles, reasoning pairs,
// agreement). Byte-deterministic for a fixed report.
std::vector<std::filesystem::path> export_report(const AuditReport& report,
                                                 const std::vector<CellStats>& cells,
                                                 const std::filesystem::path& out_dir,
                                                 ExportFormat format);

// Paired per-model SVI comparison between a base run and its temperature-zero
// ablation; models present in both reports, matched by id.
TestResult ablation_comparison(const AuditReport& base, const AuditReport& ablation);

}  // namespace sfa
