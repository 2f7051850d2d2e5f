#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sfa/frames.hpp"
#include "sfa/response.hpp"

namespace sfa {

// Logical polarity normalization: maps (frame, decision) to a binary action
// endorsement, so agreeing with "should X" and disagreeing with "should not X"
// land on the same side.
constexpr int lpn(Frame f, Decision d) {
    bool endorses = (polarity(f) == Polarity::positive) == (d == Decision::agree);
    return endorses ? 1 : 0;
}

enum class FragilityBand { robust, moderate, high };

std::string_view fragility_name(FragilityBand b);

// Bins fixed a priori: robust < 0.2, moderate [0.2, 0.5), high >= 0.5.
constexpr FragilityBand classify_fragility(double svi_value) {
    if (svi_value >= 0.5) return FragilityBand::high;
    if (svi_value >= 0.2) return FragilityBand::moderate;
    return FragilityBand::robust;
}

using FrameRates = std::array<double, 4>;  // indexed by frame_index()

// Mean LPN endorsement per frame. Invalid samples have already been dropped
// by the caller; a frame with zero valid decisions makes the cell unscorable.
FrameRates endorsement_rates(const std::vector<std::pair<Frame, Decision>>& cell);

// Worst-case spread across frames.
double svi(const FrameRates& rates);

// Relative endorsement change from the plain positive frame to the negated
// conditional frame, in percent. Undefined at p_f0 = 0.
double polarity_swing_pct(double p_f0, double p_f3);

// Scored (model, scenario) cell. `actions_by_draw` keeps the per-draw LPN
// actions (nullopt where the parse failed) so matched-block tests can pair
// frames by draw index downstream.
struct CellStats {
    std::string model;
    std::string scenario;
    std::array<int, 4> n_per_frame{};  // valid samples per frame
    FrameRates p_act{};
    double svi = 0.0;
    FragilityBand fragility = FragilityBand::robust;
    std::array<std::vector<std::optional<std::uint8_t>>, 4> actions_by_draw{};
};

struct CellExclusion {
    std::string model;
    std::string scenario;
    std::string reason;
};

// Raw per-frame observations for one cell, ordered by draw index.
struct CellObservations {
    std::string model;
    std::string scenario;
    std::array<std::vector<std::optional<Decision>>, 4> decisions_by_draw{};
};

// A cell scores only when every frame retains at least `min_valid_fraction`
// of its attempted samples; otherwise the cell is excluded with a reason.
std::variant<CellStats, CellExclusion> score_cell(const CellObservations& obs,
                                                  double min_valid_fraction = 0.5);

// Unweighted mean of per-scenario SVI values for one model.
double model_svi(const std::vector<CellStats>& cells);

}  // namespace sfa
