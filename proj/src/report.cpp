#include "sfa/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include "sfa/rng.hpp"

namespace sfa {

using nlohmann::json;

std::string_view risk_band_name(RiskBand b) {
    switch (b) {
        case RiskBand::high: return "high";
        case RiskBand::mid: return "mid";
        case RiskBand::low: return "low";
    }
    return "?";
}

GateConfig GateConfig::autonomous() { return {0.2, Scope::aggregate_svi, "autonomous"}; }
GateConfig GateConfig::human_in_loop() { return {0.5, Scope::aggregate_svi, "human_in_loop"}; }
GateConfig GateConfig::custom(double threshold, Scope scope) {
    if (!(threshold >= 0.0 && threshold <= 1.0))
        throw ConfigError("gate threshold must be in [0, 1]");
    return {threshold, scope, "custom"};
}

namespace {

constexpr std::array<Origin, 3> kOriginOrder{Origin::us_commercial, Origin::cn_commercial,
                                             Origin::oss};

RiskBand band_for(double svi) {
    if (svi > 0.5) return RiskBand::high;
    if (svi < 0.3) return RiskBand::low;
    return RiskBand::mid;
}

std::string format2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string format_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

IntervalEstimate ci_over(const std::vector<double>& values, std::uint64_t seed,
                         std::string_view tag) {
    return bootstrap_ci(values, [](std::span<const double> d) { return mean_of(d); }, 5000, 0.95,
                        seed ^ fnv1a64(tag));
}

}  // namespace

std::array<std::optional<double>, 4> inter_model_agreement(const std::vector<CellStats>& cells) {
    // scenario -> model -> per-frame majority vote
    std::map<std::string, std::vector<const CellStats*>> by_scenario;
    for (const auto& c : cells) by_scenario[c.scenario].push_back(&c);

    std::array<double, 4> sums{};
    std::array<int, 4> counts{};
    for (const auto& [scenario, group] : by_scenario) {
        if (group.size() < 2) continue;
        for (Frame f : kAllFrames) {
            auto fi = frame_index(f);
            double agree = 0.0;
            int pairs = 0;
            for (std::size_t i = 0; i < group.size(); ++i) {
                int vote_i = group[i]->p_act[fi] >= 0.5 ? 1 : 0;
                for (std::size_t j = i + 1; j < group.size(); ++j) {
                    int vote_j = group[j]->p_act[fi] >= 0.5 ? 1 : 0;
                    agree += vote_i == vote_j ? 1.0 : 0.0;
                    ++pairs;
                }
            }
            sums[fi] += agree / pairs;
            ++counts[fi];
        }
    }
    std::array<std::optional<double>, 4> out{};
    for (std::size_t i = 0; i < 4; ++i)
        if (counts[i] > 0) out[i] = sums[i] / counts[i];
    return out;
}

std::vector<std::tuple<std::string, std::string, std::string>> derive_reasoning_pairs(
    const std::vector<ModelSpec>& specs) {
    std::map<std::string, std::pair<std::string, std::string>> by_family;  // baseline, enhanced
    for (const auto& spec : specs) {
        if (!spec.family) continue;
        auto& entry = by_family[*spec.family];
        if (spec.reasoning_mode == ReasoningMode::none) entry.first = spec.model_id;
        if (spec.reasoning_mode == ReasoningMode::enabled) entry.second = spec.model_id;
    }
    std::vector<std::tuple<std::string, std::string, std::string>> pairs;
    for (const auto& [family, entry] : by_family)
        if (!entry.first.empty() && !entry.second.empty())
            pairs.emplace_back(family, entry.first, entry.second);
    return pairs;
}

std::vector<ReasoningPairDelta> reasoning_pair_deltas(
    const std::vector<ModelSummary>& summaries,
    const std::vector<std::tuple<std::string, std::string, std::string>>& pairs,
    std::vector<std::string>* warnings) {
    std::map<std::string, const ModelSummary*> by_id;
    for (const auto& s : summaries) by_id[s.model_id] = &s;

    std::vector<ReasoningPairDelta> deltas;
    for (const auto& [family, baseline, enhanced] : pairs) {
        auto b = by_id.find(baseline);
        auto e = by_id.find(enhanced);
        if (b == by_id.end() || e == by_id.end()) {
            if (warnings)
                warnings->push_back("reasoning pair '" + family +
                                    "' skipped: member not summarized");
            continue;
        }
        ReasoningPairDelta d;
        d.family = family;
        d.baseline_model = baseline;
        d.enhanced_model = enhanced;
        d.svi_baseline = b->second->mean_svi;
        d.svi_enhanced = e->second->mean_svi;
        d.delta = d.svi_enhanced - d.svi_baseline;
        deltas.push_back(std::move(d));
    }
    return deltas;
}

AuditReport build_report(const std::vector<CellStats>& cells, const ComplianceLedger& ledger,
                         const std::vector<ModelSpec>& specs, std::uint64_t seed,
                         const std::vector<Scenario>& scenarios) {
    if (cells.empty()) throw ReportError("no complete cells; nothing to report");

    AuditReport report;
    report.seed = seed;
    report.n_cells = static_cast<int>(cells.size());

    std::map<std::string, const ModelSpec*> spec_by_id;
    for (const auto& s : specs) spec_by_id[s.model_id] = &s;
    std::map<std::string, Domain> domain_by_scenario;
    for (const auto& s : scenarios) domain_by_scenario[s.id] = s.domain;

    // Global mean over model-scenario cells, not over models.
    std::vector<double> cell_svis;
    cell_svis.reserve(cells.size());
    std::array<int, 3> bin_counts{};
    for (const auto& c : cells) {
        cell_svis.push_back(c.svi);
        ++bin_counts[static_cast<std::size_t>(c.fragility)];
    }
    report.global_mean_svi = mean_of(cell_svis);
    report.global_ci = ci_over(cell_svis, seed, "global");
    for (std::size_t i = 0; i < 3; ++i)
        report.fragility_shares[i] = static_cast<double>(bin_counts[i]) / cells.size();

    // Per-model summaries.
    std::map<std::string, std::vector<const CellStats*>> by_model;
    for (const auto& c : cells) by_model[c.model].push_back(&c);
    for (const auto& [model_id, group] : by_model) {
        ModelSummary s;
        s.model_id = model_id;
        if (auto it = spec_by_id.find(model_id); it != spec_by_id.end()) {
            s.origin = it->second->origin;
            s.tier = it->second->tier;
        }
        std::vector<double> svis;
        for (const auto* c : group) {
            svis.push_back(c->svi);
            ++s.fragility_histogram[static_cast<std::size_t>(c->fragility)];
        }
        s.mean_svi = mean_of(svis);
        s.svi_ci = ci_over(svis, seed, "model:" + model_id);
        if (auto it = ledger.per_model.find(model_id); it != ledger.per_model.end())
            s.compliance_rate = it->second.compliance_rate();
        report.models.push_back(std::move(s));
    }
    std::sort(report.models.begin(), report.models.end(), [](const auto& a, const auto& b) {
        if (a.mean_svi != b.mean_svi) return a.mean_svi > b.mean_svi;
        return a.model_id < b.model_id;
    });
    for (std::size_t i = 0; i < report.models.size(); ++i)
        report.models[i].rank = static_cast<int>(i) + 1;

    // Per-scenario profiles.
    std::map<std::string, std::vector<const CellStats*>> by_scenario;
    for (const auto& c : cells) by_scenario[c.scenario].push_back(&c);
    for (const auto& [scenario_id, group] : by_scenario) {
        ScenarioProfile p;
        p.scenario_id = scenario_id;
        if (auto it = domain_by_scenario.find(scenario_id); it != domain_by_scenario.end())
            p.domain = it->second;
        std::vector<double> svis;
        for (const auto* c : group) svis.push_back(c->svi);
        p.mean_svi = mean_of(svis);
        p.ci = ci_over(svis, seed, "scenario:" + scenario_id);
        p.risk_band = band_for(p.mean_svi);
        report.scenarios.push_back(std::move(p));
    }

    // Origin grouping over model-level SVIs and cell-level frame rates.
    std::map<Origin, std::vector<double>> origin_model_svis;
    std::map<Origin, std::array<double, 4>> origin_rate_sums;
    std::map<Origin, int> origin_cell_counts;
    for (const auto& m : report.models) origin_model_svis[m.origin].push_back(m.mean_svi);
    for (const auto& c : cells) {
        auto it = spec_by_id.find(c.model);
        if (it == spec_by_id.end()) continue;
        auto& sums = origin_rate_sums[it->second->origin];
        for (std::size_t i = 0; i < 4; ++i) sums[i] += c.p_act[i];
        ++origin_cell_counts[it->second->origin];
    }

    std::map<std::string, std::vector<double>> posterior_groups;
    for (const auto& [origin, svis] : origin_model_svis)
        if (svis.size() >= 2) posterior_groups[std::string(origin_name(origin))] = svis;
    std::map<std::string, PosteriorSummary> posteriors;
    if (posterior_groups.size() >= 1) posteriors = bayesian_group_compare(posterior_groups);

    for (Origin origin : kOriginOrder) {
        auto it = origin_model_svis.find(origin);
        if (it == origin_model_svis.end()) continue;
        OriginSummary s;
        s.origin = origin;
        s.n_models = static_cast<int>(it->second.size());
        s.mean_svi = mean_of(it->second);
        if (auto rc = origin_cell_counts.find(origin); rc != origin_cell_counts.end()) {
            for (std::size_t i = 0; i < 4; ++i)
                s.frame_rates[i] = origin_rate_sums[origin][i] / rc->second;
            if (s.frame_rates[frame_index(Frame::F0)] > 0.0)
                s.polarity_swing_pct = polarity_swing_pct(s.frame_rates[frame_index(Frame::F0)],
                                                          s.frame_rates[frame_index(Frame::F3)]);
        }
        if (auto p = posteriors.find(std::string(origin_name(origin))); p != posteriors.end())
            s.posterior = p->second;
        report.origins.push_back(std::move(s));
    }

    if (origin_model_svis.size() >= 2) {
        std::vector<std::vector<double>> groups;
        for (Origin origin : kOriginOrder)
            if (auto it = origin_model_svis.find(origin); it != origin_model_svis.end())
                groups.push_back(it->second);
        report.origin_kw = kruskal_wallis(groups);

        std::vector<std::pair<Origin, Origin>> pairs;
        for (std::size_t i = 0; i < kOriginOrder.size(); ++i)
            for (std::size_t j = i + 1; j < kOriginOrder.size(); ++j)
                if (origin_model_svis.count(kOriginOrder[i]) &&
                    origin_model_svis.count(kOriginOrder[j]))
                    pairs.emplace_back(kOriginOrder[i], kOriginOrder[j]);
        for (const auto& [a, b] : pairs) {
            PairwiseOriginTest t;
            t.a = a;
            t.b = b;
            t.result = mann_whitney(origin_model_svis[a], origin_model_svis[b],
                                    static_cast<int>(pairs.size()));
            report.origin_pairwise.push_back(std::move(t));
        }
    }

    // Per-cell framing effect: Cochran's Q over draw-index-paired actions,
    // BH-corrected across all testable cells.
    std::vector<double> cell_ps;
    for (const auto& c : cells) {
        std::size_t max_draws = 0;
        for (const auto& frame_actions : c.actions_by_draw)
            max_draws = std::max(max_draws, frame_actions.size());
        std::vector<std::vector<int>> rows;
        for (std::size_t d = 0; d < max_draws; ++d) {
            std::vector<int> row;
            bool complete = true;
            for (const auto& frame_actions : c.actions_by_draw) {
                if (d >= frame_actions.size() || !frame_actions[d]) {
                    complete = false;
                    break;
                }
                row.push_back(*frame_actions[d]);
            }
            if (complete) rows.push_back(std::move(row));
        }
        if (rows.size() < 2) continue;
        cell_ps.push_back(cochran_q(BinaryBlockMatrix::from_rows(rows)).p_value);
    }
    report.n_cells_tested = static_cast<int>(cell_ps.size());
    if (!cell_ps.empty()) {
        auto rejected = bh_fdr(cell_ps, 0.05);
        report.significant_cell_share =
            static_cast<double>(rejected.size()) / static_cast<double>(cell_ps.size());
    }

    report.agreement = inter_model_agreement(cells);
    report.reasoning_pairs = reasoning_pair_deltas(report.models, derive_reasoning_pairs(specs));

    for (const auto& [model_id, counts] : ledger.per_model) {
        auto rate = counts.compliance_rate();
        if (rate && *rate < 0.80 && !by_model.count(model_id))
            report.excluded_models.push_back(model_id);
    }

    // Model-card snippet: SVI values rendered at 2 decimals.
    {
        std::string card;
        card += "Syntactic robustness summary (4-frame polarity suite)\n";
        card += "  aggregate SVI: " + format2(report.global_mean_svi) + " (95% CI [" +
                format2(report.global_ci.lo) + ", " + format2(report.global_ci.hi) +
                "], bootstrap percentile)\n";
        card += "  fragility mix: " + format2(report.fragility_shares[2] * 100) + "% high / " +
                format2(report.fragility_shares[1] * 100) + "% moderate / " +
                format2(report.fragility_shares[0] * 100) + "% robust (n=" +
                std::to_string(report.n_cells) + " cells)\n";
        const auto* worst = &report.scenarios.front();
        for (const auto& s : report.scenarios)
            if (s.mean_svi > worst->mean_svi) worst = &s;
        card += "  highest-risk scenario: " + worst->scenario_id + " (SVI " +
                format2(worst->mean_svi) + ")\n";
        card += "  most fragile model: " + report.models.front().model_id + " (SVI " +
                format2(report.models.front().mean_svi) + ")\n";
        card += "  evaluation: 4 frames, per-frame n as logged, single-turn prompts, no system message\n";
        report.model_card = std::move(card);
    }
    return report;
}

GateVerdict evaluate_gate(const AuditReport& report, const GateConfig& gate) {
    GateVerdict verdict;
    verdict.config = gate;
    if (gate.scope == GateConfig::Scope::aggregate_svi) {
        verdict.observed = report.global_mean_svi;
    } else {
        double worst = 0.0;
        for (const auto& s : report.scenarios) {
            worst = std::max(worst, s.mean_svi);
            if (s.mean_svi >= gate.threshold) verdict.offending_scenarios.push_back(s.scenario_id);
        }
        verdict.observed = worst;
    }
    verdict.pass = verdict.observed < gate.threshold;
    verdict.exit_status = verdict.pass ? 0 : 2;
    return verdict;
}

// ---------------------------------------------------------------------------
// JSON / CSV export
// ---------------------------------------------------------------------------

namespace {

json interval_to_json(const IntervalEstimate& e) {
    return json{{"point", e.point},
                {"lo", e.lo},
                {"hi", e.hi},
                {"level", e.level},
                {"method", e.method == IntervalEstimate::Method::posterior ? "posterior"
                                                                           : "bootstrap_percentile"}};
}

json test_to_json(const TestResult& t) {
    json j{{"statistic", t.statistic}, {"p_value", t.p_value}};
    if (t.df) j["df"] = *t.df;
    if (t.p_adjusted) j["p_adjusted"] = *t.p_adjusted;
    if (t.effect_size) j["effect_size"] = *t.effect_size;
    if (t.effect_name) j["effect_name"] = *t.effect_name;
    return j;
}

json posterior_to_json(const PosteriorSummary& p) {
    json j{{"group", p.group},
           {"mu_post", p.mu_post},
           {"sd_post", p.sd_post},
           {"ci95", interval_to_json(p.ci95)}};
    json pg = json::object();
    for (const auto& [other, prob] : p.prob_greater) pg[other] = prob;
    j["prob_greater"] = pg;
    return j;
}

}  // namespace

json report_to_json(const AuditReport& report) {
    json j;
    j["seed"] = report.seed;
    j["n_cells"] = report.n_cells;
    j["global"] = json{{"mean_svi", report.global_mean_svi},
                       {"ci", interval_to_json(report.global_ci)},
                       {"fragility_shares",
                        json{{"robust", report.fragility_shares[0]},
                             {"moderate", report.fragility_shares[1]},
                             {"high", report.fragility_shares[2]}}}};
    if (report.significant_cell_share)
        j["global"]["significant_cell_share"] = *report.significant_cell_share;
    j["global"]["n_cells_tested"] = report.n_cells_tested;

    j["models"] = json::array();
    for (const auto& m : report.models) {
        json e{{"model_id", m.model_id},
               {"origin", std::string(origin_name(m.origin))},
               {"tier", std::string(tier_name(m.tier))},
               {"rank", m.rank},
               {"mean_svi", m.mean_svi},
               {"svi_ci", interval_to_json(m.svi_ci)},
               {"fragility_histogram",
                json{{"robust", m.fragility_histogram[0]},
                     {"moderate", m.fragility_histogram[1]},
                     {"high", m.fragility_histogram[2]}}}};
        if (m.compliance_rate) e["compliance_rate"] = *m.compliance_rate;
        j["models"].push_back(std::move(e));
    }

    j["scenarios"] = json::array();
    for (const auto& s : report.scenarios) {
        json e{{"scenario_id", s.scenario_id},
               {"mean_svi", s.mean_svi},
               {"ci", interval_to_json(s.ci)},
               {"risk_band", std::string(risk_band_name(s.risk_band))}};
        if (s.domain) e["domain"] = std::string(domain_name(*s.domain));
        j["scenarios"].push_back(std::move(e));
    }

    j["origins"] = json::array();
    for (const auto& o : report.origins) {
        json e{{"origin", std::string(origin_name(o.origin))},
               {"n_models", o.n_models},
               {"mean_svi", o.mean_svi}};
        json rates;
        for (Frame f : kAllFrames)
            rates[std::string(frame_name(f))] = o.frame_rates[frame_index(f)];
        e["frame_rates"] = rates;
        if (o.polarity_swing_pct) e["polarity_swing_pct"] = *o.polarity_swing_pct;
        if (o.posterior) e["posterior"] = posterior_to_json(*o.posterior);
        j["origins"].push_back(std::move(e));
    }

    if (report.origin_kw) j["origin_tests"]["kruskal_wallis"] = test_to_json(*report.origin_kw);
    if (!report.origin_pairwise.empty()) {
        j["origin_tests"]["pairwise"] = json::array();
        for (const auto& t : report.origin_pairwise)
            j["origin_tests"]["pairwise"].push_back(json{{"a", std::string(origin_name(t.a))},
                                                         {"b", std::string(origin_name(t.b))},
                                                         {"result", test_to_json(t.result)}});
    }

    json agreement = json::object();
    for (Frame f : kAllFrames)
        if (report.agreement[frame_index(f)])
            agreement[std::string(frame_name(f))] = *report.agreement[frame_index(f)];
    j["inter_model_agreement"] = agreement;
    j["inter_model_agreement_note"] =
        "mean pairwise agreement of per-cell majority LPN actions; one operationalization "
        "among several possible agreement statistics";

    j["reasoning_pairs"] = json::array();
    for (const auto& p : report.reasoning_pairs)
        j["reasoning_pairs"].push_back(json{{"family", p.family},
                                            {"baseline_model", p.baseline_model},
                                            {"enhanced_model", p.enhanced_model},
                                            {"svi_baseline", p.svi_baseline},
                                            {"svi_enhanced", p.svi_enhanced},
                                            {"delta", p.delta}});

    j["excluded_models"] = report.excluded_models;
    j["excluded_cells"] = json::array();
    for (const auto& c : report.excluded_cells)
        j["excluded_cells"].push_back(
            json{{"model", c.model}, {"scenario", c.scenario}, {"reason", c.reason}});
    if (report.ablation_wilcoxon)
        j["temperature_ablation"]["wilcoxon"] = test_to_json(*report.ablation_wilcoxon);
    j["model_card"] = report.model_card;
    return j;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write export file: " + path.string());
    out << content;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

std::vector<std::filesystem::path> export_report(const AuditReport& report,
                                                 const std::vector<CellStats>& cells,
                                                 const std::filesystem::path& out_dir,
                                                 ExportFormat format) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> written;

    auto emit = [&](const char* name, const std::string& content) {
        auto path = out_dir / name;
        write_file(path, content);
        written.push_back(path);
    };

    emit("report.json", report_to_json(report).dump(2) + "\n");
    if (format == ExportFormat::json) return written;

    // Heatmap: rows are models grouped by origin, columns are scenarios.
    {
        std::vector<const ModelSummary*> order;
        for (const auto& m : report.models) order.push_back(&m);
        std::stable_sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
            return static_cast<int>(a->origin) < static_cast<int>(b->origin);
        });
        std::map<std::pair<std::string, std::string>, double> cell_svi;
        for (const auto& c : cells) cell_svi[{c.model, c.scenario}] = c.svi;

        std::string csv = "model,origin";
        for (const auto& s : report.scenarios) csv += "," + csv_escape(s.scenario_id);
        csv += "\n";
        for (const auto* m : order) {
            csv += csv_escape(m->model_id) + "," + std::string(origin_name(m->origin));
            for (const auto& s : report.scenarios) {
                csv += ",";
                if (auto it = cell_svi.find({m->model_id, s.scenario_id}); it != cell_svi.end())
                    csv += format_full(it->second);
            }
            csv += "\n";
        }
        emit("heatmap.csv", csv);
    }

    // Ranking (lollipop source).
    {
        std::string csv = "rank,model_id,origin,tier,mean_svi,ci_lo,ci_hi,compliance_rate\n";
        for (const auto& m : report.models) {
            csv += std::to_string(m.rank) + "," + csv_escape(m.model_id) + "," +
                   std::string(origin_name(m.origin)) + "," + std::string(tier_name(m.tier)) +
                   "," + format_full(m.mean_svi) + "," + format_full(m.svi_ci.lo) + "," +
                   format_full(m.svi_ci.hi) + ",";
            if (m.compliance_rate) csv += format_full(*m.compliance_rate);
            csv += "\n";
        }
        emit("ranking.csv", csv);
    }

    // Framing endorsement rates: frame rows, origin columns.
    {
        std::string csv = "frame";
        for (const auto& o : report.origins) csv += "," + std::string(origin_name(o.origin));
        csv += "\n";
        for (Frame f : kAllFrames) {
            csv += frame_name(f);
            for (const auto& o : report.origins)
                csv += "," + format_full(o.frame_rates[frame_index(f)]);
            csv += "\n";
        }
        emit("framing_rates.csv", csv);
    }

    // Scenario profiles with CIs.
    {
        std::string csv = "scenario_id,domain,mean_svi,ci_lo,ci_hi,risk_band\n";
        for (const auto& s : report.scenarios) {
            csv += csv_escape(s.scenario_id) + ",";
            if (s.domain) csv += domain_name(*s.domain);
            csv += "," + format_full(s.mean_svi) + "," + format_full(s.ci.lo) + "," +
                   format_full(s.ci.hi) + "," + std::string(risk_band_name(s.risk_band)) + "\n";
        }
        emit("scenario_profiles.csv", csv);
    }

    // Reasoning pairs.
    {
        std::string csv = "family,baseline_model,enhanced_model,svi_baseline,svi_enhanced,delta\n";
        for (const auto& p : report.reasoning_pairs)
            csv += csv_escape(p.family) + "," + csv_escape(p.baseline_model) + "," +
                   csv_escape(p.enhanced_model) + "," + format_full(p.svi_baseline) + "," +
                   format_full(p.svi_enhanced) + "," + format_full(p.delta) + "\n";
        emit("reasoning_pairs.csv", csv);
    }

    // Inter-model agreement by frame.
    {
        std::string csv = "frame,mean_pairwise_agreement\n";
        for (Frame f : kAllFrames) {
            csv += frame_name(f);
            csv += ",";
            if (report.agreement[frame_index(f)])
                csv += format_full(*report.agreement[frame_index(f)]);
            csv += "\n";
        }
        emit("agreement.csv", csv);
    }
    return written;
}

TestResult ablation_comparison(const AuditReport& base, const AuditReport& ablation) {
    std::map<std::string, double> base_svis;
    for (const auto& m : base.models) base_svis[m.model_id] = m.mean_svi;
    std::vector<double> paired_base, paired_ablation;
    for (const auto& m : ablation.models) {
        if (auto it = base_svis.find(m.model_id); it != base_svis.end()) {
            paired_base.push_back(it->second);
            paired_ablation.push_back(m.mean_svi);
        }
    }
    if (paired_base.empty())
        throw ValidationError("no models shared between base and ablation reports");
    return wilcoxon_signed_rank(paired_base, paired_ablation);
}

}  // namespace sfa
