#include "sfa/lpn.hpp"

#include <algorithm>

namespace sfa {

std::string_view fragility_name(FragilityBand b) {
    switch (b) {
        case FragilityBand::robust: return "robust";
        case FragilityBand::moderate: return "moderate";
        case FragilityBand::high: return "high";
    }
    return "?";
}

FrameRates endorsement_rates(const std::vector<std::pair<Frame, Decision>>& cell) {
    std::array<int, 4> counts{};
    std::array<int, 4> endorsements{};
    for (const auto& [frame, decision] : cell) {
        ++counts[frame_index(frame)];
        endorsements[frame_index(frame)] += lpn(frame, decision);
    }
    FrameRates rates{};
    for (Frame f : kAllFrames) {
        auto i = frame_index(f);
        if (counts[i] == 0)
            throw IncompleteCellError("frame " + std::string(frame_name(f)) +
                                      " has no valid decisions; cell cannot be scored");
        rates[i] = static_cast<double>(endorsements[i]) / counts[i];
    }
    return rates;
}

double svi(const FrameRates& rates) {
    auto [lo, hi] = std::minmax_element(rates.begin(), rates.end());
    return *hi - *lo;
}

double polarity_swing_pct(double p_f0, double p_f3) {
    if (p_f0 <= 0.0)
        throw ValidationError("polarity swing undefined: endorsement rate under F0 is zero");
    return (p_f3 - p_f0) / p_f0 * 100.0;
}

std::variant<CellStats, CellExclusion> score_cell(const CellObservations& obs,
                                                  double min_valid_fraction) {
    CellStats stats;
    stats.model = obs.model;
    stats.scenario = obs.scenario;

    for (Frame f : kAllFrames) {
        auto i = frame_index(f);
        const auto& draws = obs.decisions_by_draw[i];
        int attempts = static_cast<int>(draws.size());
        int valid = 0;
        int endorsements = 0;
        auto& actions = stats.actions_by_draw[i];
        actions.reserve(draws.size());
        for (const auto& d : draws) {
            if (d) {
                ++valid;
                int a = lpn(f, *d);
                endorsements += a;
                actions.push_back(static_cast<std::uint8_t>(a));
            } else {
                actions.push_back(std::nullopt);
            }
        }
        if (attempts == 0 || valid == 0)
            return CellExclusion{obs.model, obs.scenario,
                                 "frame " + std::string(frame_name(f)) + " has no valid samples"};
        if (static_cast<double>(valid) < min_valid_fraction * attempts)
            return CellExclusion{obs.model, obs.scenario,
                                 "frame " + std::string(frame_name(f)) + " retains " +
                                     std::to_string(valid) + "/" + std::to_string(attempts) +
                                     " valid samples (< required fraction)"};
        stats.n_per_frame[i] = valid;
        stats.p_act[i] = static_cast<double>(endorsements) / valid;
    }
    stats.svi = svi(stats.p_act);
    stats.fragility = classify_fragility(stats.svi);
    return stats;
}

double model_svi(const std::vector<CellStats>& cells) {
    if (cells.empty()) throw ValidationError("model SVI undefined: no complete cells");
    double sum = 0.0;
    for (const auto& c : cells) sum += c.svi;
    return sum / static_cast<double>(cells.size());
}

}  // namespace sfa
