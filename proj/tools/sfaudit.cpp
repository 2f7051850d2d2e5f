// sfaudit: framing-robustness audit runner for LLM decision endpoints.
//
// Subcommands: run, resume, report, gate, ablate-temperature, simulate.
// Exit codes: 0 success/pass, 2 gate fail, 3 run-fatal, 4 config error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "sfa/report.hpp"
#include "sfa/runner.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct PlanOverrides {
    std::optional<std::string> scenarios;
    std::optional<std::string> providers;
    std::optional<std::uint64_t> seed;
    std::optional<int> samples;
    std::optional<double> temperature;
};

std::vector<sfa::Scenario> resolve_suite(const std::optional<std::string>& path_opt) {
    if (!path_opt || *path_opt == "builtin") return sfa::default_scenario_suite();
    return sfa::load_scenario_suite(fs::path(*path_opt));
}

sfa::RunPlan load_plan_file(const fs::path& path, const PlanOverrides& overrides) {
    std::ifstream in(path);
    if (!in) throw sfa::ConfigError("cannot open plan file: " + path.string());
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded())
        throw sfa::ConfigError("plan file is not valid JSON: " + path.string());

    sfa::RunPlan plan;
    try {
        plan.run_id = doc.at("run_id").get<std::string>();
        plan.seed = overrides.seed ? *overrides.seed : doc.value("seed", std::uint64_t{0});
        plan.ablation = sfa::ablation_from_name(doc.value("ablation", std::string("none")));
        plan.policy.n_samples = overrides.samples ? *overrides.samples : doc.value("samples", 30);
        if (overrides.temperature)
            plan.policy.temperature = *overrides.temperature;
        else if (doc.contains("temperature") && doc.at("temperature").is_null())
            plan.policy.temperature = std::nullopt;
        else
            plan.policy.temperature = doc.value("temperature", 0.7);
        if (doc.contains("max_retries")) plan.policy.max_retries = doc.at("max_retries").get<int>();
        if (doc.contains("concurrency_limit"))
            plan.policy.concurrency_limit = doc.at("concurrency_limit").get<int>();

        std::optional<std::string> suite_path = overrides.scenarios;
        if (!suite_path && doc.contains("scenario_suite"))
            suite_path = doc.at("scenario_suite").get<std::string>();
        plan.scenarios = resolve_suite(suite_path);

        std::optional<std::string> registry_path = overrides.providers;
        if (!registry_path && doc.contains("provider_registry"))
            registry_path = doc.at("provider_registry").get<std::string>();
        if (!registry_path)
            throw sfa::ConfigError(path.string() +
                                   ": no provider registry (plan key 'provider_registry' or --providers)");
        auto registry = sfa::load_provider_registry(fs::path(*registry_path));

        if (doc.contains("models")) {
            for (const auto& id : doc.at("models")) {
                auto want = id.get<std::string>();
                auto it = std::find_if(registry.begin(), registry.end(),
                                       [&](const auto& m) { return m.model_id == want; });
                if (it == registry.end())
                    throw sfa::ConfigError(path.string() + ": model '" + want +
                                           "' not found in provider registry");
                plan.models.push_back(*it);
            }
        } else {
            plan.models = std::move(registry);
        }
    } catch (const json::exception& e) {
        throw sfa::ConfigError(path.string() + ": malformed plan: " + e.what());
    }
    if (plan.models.empty()) throw sfa::ConfigError(path.string() + ": plan selects no models");
    if (plan.scenarios.empty()) throw sfa::ConfigError(path.string() + ": plan has no scenarios");
    sfa::validate(plan.policy);
    return plan;
}

void print_summary(const sfa::RunSummary& summary) {
    std::cout << "records written: " << summary.total_records << "\n";
    for (const auto& [model, c] : summary.per_model) {
        std::cout << "  " << model << ": attempts " << c.attempts << ", valid " << c.valid
                  << ", invalid " << c.invalid;
        if (c.sample_failures > 0) std::cout << " (" << c.sample_failures << " sample failures)";
        std::cout << "\n";
    }
}

sfa::RunSummary run_plan_to_dir(const sfa::RunPlan& plan, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    fs::path log = out_dir / (plan.run_id + ".jsonl");
    if (fs::exists(log))
        throw sfa::ConfigError("run log already exists: " + log.string() +
                               " (use `sfaudit resume` to continue it)");
    sfa::write_plan_snapshot(plan, out_dir / (plan.run_id + ".plan.json"));
    sfa::JsonlSink sink(log);
    auto summary = sfa::execute(plan, sink);
    std::cout << "run '" << plan.run_id << "' complete; log: " << log.string() << "\n";
    print_summary(summary);
    return summary;
}

struct BuiltReport {
    sfa::AuditReport report;
    std::vector<sfa::CellStats> cells;
};

BuiltReport report_from_log(const fs::path& log, std::uint64_t seed,
                            const std::optional<std::string>& snapshot_override) {
    fs::path snapshot = snapshot_override ? fs::path(*snapshot_override)
                                          : fs::path(log).replace_extension(".plan.json");
    if (!fs::exists(snapshot))
        throw sfa::ConfigError("plan snapshot not found next to log: " + snapshot.string());
    auto plan = sfa::load_plan_snapshot(snapshot);

    std::vector<std::string> warnings;
    auto records = sfa::read_run_log(log, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    if (records.empty()) throw sfa::ConfigError("run log has no readable records: " + log.string());

    auto agg = sfa::aggregate_log(records);
    BuiltReport out{sfa::build_report(agg.cells, agg.ledger, plan.models, seed, plan.scenarios),
                    std::move(agg.cells)};
    out.report.excluded_cells = std::move(agg.excluded_cells);
    return out;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"framing-robustness audit for LLM decision endpoints"};
    app.require_subcommand(1);

    PlanOverrides overrides;
    std::string plan_path;
    std::string out_dir = ".";

    auto add_overrides = [&](CLI::App* cmd) {
        cmd->add_option("--scenarios", overrides.scenarios,
                        "scenario suite file (or 'builtin' for the bundled suite)");
        cmd->add_option("--providers", overrides.providers, "provider registry file");
        cmd->add_option("--seed", overrides.seed, "run seed override");
        cmd->add_option("--samples", overrides.samples, "samples per (scenario, frame) cell");
        cmd->add_option("--temperature", overrides.temperature, "decoding temperature override");
    };

    // --- run ---------------------------------------------------------------
    auto* run_cmd = app.add_subcommand("run", "execute a run plan");
    run_cmd->add_option("--plan", plan_path, "plan file (JSON)")->required();
    run_cmd->add_option("--out", out_dir, "output directory for the run log");
    add_overrides(run_cmd);
    run_cmd->callback([&] { run_plan_to_dir(load_plan_file(plan_path, overrides), out_dir); });

    // --- resume ------------------------------------------------------------
    auto* resume_cmd = app.add_subcommand("resume", "finish an interrupted run");
    std::string run_id;
    std::string resume_plan;
    resume_cmd->add_option("--run-id", run_id, "run id to resume")->required();
    resume_cmd->add_option("--out", out_dir, "directory holding the run log and snapshot");
    resume_cmd->add_option("--plan", resume_plan,
                           "optional plan file; its digest must match the snapshot");
    resume_cmd->callback([&] {
        fs::path snapshot = fs::path(out_dir) / (run_id + ".plan.json");
        fs::path log = fs::path(out_dir) / (run_id + ".jsonl");
        auto plan = sfa::load_plan_snapshot(snapshot);
        if (!resume_plan.empty()) {
            auto given = load_plan_file(resume_plan, overrides);
            if (sfa::plan_digest(given) != sfa::plan_digest(plan))
                throw sfa::ConfigError("plan digest mismatch: --plan does not describe run '" +
                                       run_id + "'");
        }
        std::vector<std::string> warnings;
        auto remainder = sfa::resume_remainder(plan, log, &warnings);
        for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
        if (remainder.empty()) {
            std::cout << "run '" << run_id << "' is already complete\n";
            return;
        }
        std::cout << "resuming " << remainder.size() << " of " << sfa::plan_cardinality(plan)
                  << " samples\n";
        sfa::JsonlSink sink(log);
        auto set = std::make_shared<sfa::ProviderSet>(plan.models);
        auto summary = sfa::execute_tuples(
            plan, remainder,
            [set](const sfa::ModelSpec& m) -> sfa::Provider& { return set->for_model(m); }, sink);
        print_summary(summary);
    });

    // --- report ------------------------------------------------------------
    auto* report_cmd = app.add_subcommand("report", "aggregate a run log into a report");
    std::string log_path;
    std::string ablation_log;
    std::string format = "csv";
    std::uint64_t report_seed = 17;
    std::optional<std::string> snapshot_path;
    report_cmd->add_option("--log", log_path, "run log ({run_id}.jsonl)")->required();
    report_cmd->add_option("--out", out_dir, "report output directory")->required();
    report_cmd->add_option("--format", format, "json | csv (csv bundle includes report.json)")
        ->check(CLI::IsMember({"json", "csv"}));
    report_cmd->add_option("--seed", report_seed, "bootstrap seed");
    report_cmd->add_option("--snapshot", snapshot_path, "plan snapshot (default: next to log)");
    report_cmd->add_option("--ablation-log", ablation_log,
                           "temperature-zero run log for the paired comparison");
    report_cmd->callback([&] {
        auto built = report_from_log(log_path, report_seed, snapshot_path);
        if (!ablation_log.empty()) {
            auto ablated = report_from_log(ablation_log, report_seed, std::nullopt);
            built.report.ablation_wilcoxon = sfa::ablation_comparison(built.report, ablated.report);
        }
        auto files = sfa::export_report(built.report, built.cells, out_dir,
                                        format == "json" ? sfa::ExportFormat::json
                                                         : sfa::ExportFormat::csv_bundle);
        for (const auto& f : files) std::cout << "wrote " << f.string() << "\n";
        std::cout << "aggregate SVI: " << built.report.global_mean_svi << " over "
                  << built.report.n_cells << " cells\n";
    });

    // --- gate --------------------------------------------------------------
    auto* gate_cmd = app.add_subcommand("gate", "pass/fail verdict for CI pipelines");
    std::string gate_scope = "aggregate_svi";
    std::string gate_profile = "human-in-loop";
    std::optional<double> gate_threshold;
    std::uint64_t gate_seed = 17;
    gate_cmd->add_option("--log", log_path, "run log to evaluate")->required();
    gate_cmd->add_option("--gate-threshold", gate_threshold,
                         "custom SVI threshold (overrides the profile)");
    gate_cmd->add_option("--gate-scope", gate_scope, "aggregate_svi | max_scenario_svi")
        ->check(CLI::IsMember({"aggregate_svi", "max_scenario_svi"}));
    gate_cmd->add_option("--gate-profile", gate_profile, "autonomous | human-in-loop")
        ->check(CLI::IsMember({"autonomous", "human-in-loop"}));
    gate_cmd->add_option("--seed", gate_seed, "bootstrap seed");
    gate_cmd->add_option("--snapshot", snapshot_path, "plan snapshot (default: next to log)");
    gate_cmd->callback([&] {
        auto built = report_from_log(log_path, gate_seed, snapshot_path);
        auto scope = gate_scope == "max_scenario_svi" ? sfa::GateConfig::Scope::max_scenario_svi
                                                      : sfa::GateConfig::Scope::aggregate_svi;
        sfa::GateConfig config = gate_profile == "autonomous" ? sfa::GateConfig::autonomous()
                                                              : sfa::GateConfig::human_in_loop();
        config.scope = scope;
        if (gate_threshold) config = sfa::GateConfig::custom(*gate_threshold, scope);
        auto verdict = sfa::evaluate_gate(built.report, config);
        std::cout << (verdict.pass ? "PASS" : "FAIL") << ": observed SVI " << verdict.observed
                  << " vs threshold " << config.threshold << " (" << config.profile << ", "
                  << (scope == sfa::GateConfig::Scope::aggregate_svi ? "aggregate" : "max scenario")
                  << ")\n";
        for (const auto& s : verdict.offending_scenarios)
            std::cout << "  offending scenario: " << s << "\n";
        if (!verdict.pass) std::exit(verdict.exit_status);
    });

    // --- ablate-temperature --------------------------------------------------
    auto* ablate_cmd =
        app.add_subcommand("ablate-temperature", "re-run a plan at temperature zero");
    ablate_cmd->add_option("--plan", plan_path, "base plan file (JSON)")->required();
    ablate_cmd->add_option("--out", out_dir, "output directory");
    add_overrides(ablate_cmd);
    ablate_cmd->callback([&] {
        auto base = load_plan_file(plan_path, overrides);
        auto result = sfa::temperature_ablation_plan(base);
        for (const auto& dropped : result.dropped_models)
            std::cerr << "notice: model '" << dropped
                      << "' has no temperature control; dropped from the ablation\n";
        if (result.plan.models.empty()) {
            std::cout << "ablation plan is empty: no model in the base plan supports temperature\n";
            return;
        }
        run_plan_to_dir(result.plan, out_dir);
    });

    // --- simulate ------------------------------------------------------------
    auto* sim_cmd =
        app.add_subcommand("simulate", "end-to-end synthetic audit against a fragile mock");
    double svi_target = 0.65;
    double compliance = 1.0;
    int sim_samples = 30;
    std::uint64_t sim_seed = 1;
    sim_cmd->add_option("--svi-target", svi_target, "target SVI of the synthetic model")
        ->check(CLI::Range(0.0, 1.0));
    sim_cmd->add_option("--compliance", compliance, "well-formedness rate of the synthetic model")
        ->check(CLI::Range(0.0, 1.0));
    sim_cmd->add_option("--samples", sim_samples, "samples per (scenario, frame) cell");
    sim_cmd->add_option("--seed", sim_seed, "mock seed");
    sim_cmd->add_option("--out", out_dir, "output directory for log and report");
    sim_cmd->callback([&] {
        sfa::ModelSpec spec;
        spec.model_id = "synthetic-fragile";
        spec.origin = sfa::Origin::oss;
        spec.tier = sfa::Tier::tiny;
        spec.endpoint = "mock:fragile?svi=" + std::to_string(svi_target);
        spec.mock = sfa::build_negation_fragile_mock(svi_target, sim_seed);
        for (auto& shape : *spec.mock->fallback) shape.compliance = compliance;

        sfa::RunPlan plan;
        plan.run_id = "simulate-" + std::to_string(sim_seed);
        plan.models = {spec};
        plan.scenarios = sfa::default_scenario_suite();
        plan.policy.n_samples = sim_samples;
        plan.seed = sim_seed;

        run_plan_to_dir(plan, out_dir);
        fs::path log = fs::path(out_dir) / (plan.run_id + ".jsonl");
        auto built = report_from_log(log, sim_seed, std::nullopt);
        sfa::export_report(built.report, built.cells, fs::path(out_dir) / "report",
                           sfa::ExportFormat::csv_bundle);
        std::cout << "target SVI " << svi_target << ", pipeline estimate "
                  << built.report.global_mean_svi << " over " << built.report.n_cells
                  << " cells (report in " << (fs::path(out_dir) / "report").string() << ")\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 4;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const sfa::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 4;
    } catch (const sfa::RunFatalError& e) {
        std::cerr << "run-fatal: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
