#pragma once

// 30-minute window grid construction, action density and the Gold /
// Scale sampling protocols.

#include <algorithm>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "realicu/events.hpp"
#include "realicu/jsonl.hpp"
#include "realicu/rng.hpp"

namespace realicu {

inline constexpr std::int64_t kWindowMinutes = 30;
inline constexpr std::int64_t kDefaultMinStayMinutes = 240;  // stays under 4h discarded

struct TrajectoryWindow {
    std::string stay_id;
    std::int64_t window_index = 0;
    std::int64_t start_min = 0;
    std::int64_t end_min = 0;  // exclusive
    std::vector<ClinicalEvent> current_events;   // start_min <= time < end_min
    std::int64_t history_event_count = 0;        // all events with time < end_min
};

struct WindowGrid {
    std::string stay_id;
    std::int64_t t0 = 0;
    std::int64_t window_count = 0;
    std::vector<TrajectoryWindow> windows;
    // Pre-ICU events (time < t0); part of the visible history but of no window.
    std::vector<ClinicalEvent> pre_grid_events;

    const TrajectoryWindow& window(std::int64_t index) const {
        if (index < 0 || index >= window_count)
            throw std::out_of_range("window index " + std::to_string(index) +
                                    " outside grid of " + std::to_string(window_count));
        return windows[static_cast<std::size_t>(index)];
    }
};

class StayRejected : public std::runtime_error {
public:
    StayRejected(std::string stay_id, const std::string& reason)
        : std::runtime_error("stay " + stay_id + " rejected: " + reason),
          stay_id_(std::move(stay_id)) {}
    const std::string& stay_id() const { return stay_id_; }

private:
    std::string stay_id_;
};

// Half-open 30-minute windows from admission (t0) through the last
// in-scope event. A boundary event at a window's end belongs to the
// next window.
inline WindowGrid build_grid(const std::vector<ClinicalEvent>& events,
                             const PatientContext& context, std::int64_t t0 = 0,
                             std::int64_t min_stay_minutes = kDefaultMinStayMinutes) {
    WindowGrid grid;
    grid.stay_id = context.stay_id;
    grid.t0 = t0;

    std::int64_t last_time = INT64_MIN;
    for (const auto& e : events) {
        if (e.time >= t0) last_time = std::max(last_time, e.time);
    }
    if (last_time == INT64_MIN)
        throw StayRejected(context.stay_id, "no events at or after the grid origin");
    if (last_time - t0 < min_stay_minutes)
        throw StayRejected(context.stay_id,
                           "stay spans " + std::to_string(last_time - t0) +
                               " min, below the " + std::to_string(min_stay_minutes) +
                               " min floor");

    grid.window_count = (last_time - t0) / kWindowMinutes + 1;
    grid.windows.resize(static_cast<std::size_t>(grid.window_count));
    for (std::int64_t i = 0; i < grid.window_count; ++i) {
        auto& w = grid.windows[static_cast<std::size_t>(i)];
        w.stay_id = context.stay_id;
        w.window_index = i;
        w.start_min = t0 + kWindowMinutes * i;
        w.end_min = w.start_min + kWindowMinutes;
    }

    std::int64_t running = 0;
    for (const auto& e : events) {
        if (e.time < t0) {
            grid.pre_grid_events.push_back(e);
            ++running;
            continue;
        }
        const std::int64_t idx = (e.time - t0) / kWindowMinutes;
        grid.windows[static_cast<std::size_t>(idx)].current_events.push_back(e);
        ++running;
    }
    running = static_cast<std::int64_t>(grid.pre_grid_events.size());
    for (auto& w : grid.windows) {
        running += static_cast<std::int64_t>(w.current_events.size());
        w.history_event_count = running;
    }
    return grid;
}

// Fraction of the window's events that are action events; 0 for an
// empty window.
inline double action_density(const TrajectoryWindow& window,
                             const std::set<std::string>& action_codes = default_action_codes()) {
    if (window.current_events.empty()) return 0.0;
    std::size_t actions = 0;
    for (const auto& e : window.current_events) {
        if (action_codes.count(e.code)) ++actions;
    }
    return static_cast<double>(actions) / static_cast<double>(window.current_events.size());
}

enum class SamplingMode { gold, scale, all };

inline std::string to_string(SamplingMode m) {
    switch (m) {
        case SamplingMode::gold: return "gold";
        case SamplingMode::scale: return "scale";
        default: return "all";
    }
}

inline SamplingMode sampling_mode_from_string(const std::string& s) {
    if (s == "gold") return SamplingMode::gold;
    if (s == "scale") return SamplingMode::scale;
    if (s == "all") return SamplingMode::all;
    throw std::invalid_argument("unknown sampling mode: " + s);
}

struct SamplingPlan {
    SamplingMode mode = SamplingMode::scale;
    std::int64_t stride_windows = 4;      // 2-hour stride on the 30-min grid
    double density_threshold = 0.5;
    double high_density_share = 0.8;
    std::int64_t target_per_stay = 10;
    std::uint64_t seed = 0;
    std::set<std::string> action_codes = default_action_codes();

    void validate() const {
        if (density_threshold < 0.0 || density_threshold > 1.0)
            throw std::invalid_argument("density_threshold outside [0,1]");
        if (high_density_share < 0.0 || high_density_share > 1.0)
            throw std::invalid_argument("high_density_share outside [0,1]");
        if (stride_windows < 1) throw std::invalid_argument("stride_windows < 1");
        if (target_per_stay < 0) throw std::invalid_argument("target_per_stay < 0");
    }
};

// Selects evaluation windows. Gold draws target_per_stay indices,
// high_density_share of them from the rho >= threshold pool (seeded,
// without replacement), falling back to the other pool when one runs
// dry. Scale takes every stride-th index; all takes everything.
// Output is sorted ascending and a pure function of (grid, plan).
inline std::vector<std::int64_t> sample_windows(const WindowGrid& grid,
                                                const SamplingPlan& plan) {
    plan.validate();
    std::vector<std::int64_t> out;
    switch (plan.mode) {
        case SamplingMode::all:
            for (std::int64_t i = 0; i < grid.window_count; ++i) out.push_back(i);
            return out;
        case SamplingMode::scale:
            for (std::int64_t i = 0; i < grid.window_count; i += plan.stride_windows)
                out.push_back(i);
            return out;
        case SamplingMode::gold:
            break;
    }

    std::vector<std::int64_t> high, low;
    for (const auto& w : grid.windows) {
        (action_density(w, plan.action_codes) >= plan.density_threshold ? high : low)
            .push_back(w.window_index);
    }

    Rng rng(mix_seed(plan.seed, grid.stay_id));
    rng.shuffle(high);
    rng.shuffle(low);

    const std::int64_t target =
        std::min<std::int64_t>(plan.target_per_stay, grid.window_count);
    std::int64_t want_high = static_cast<std::int64_t>(
        std::llround(plan.high_density_share * static_cast<double>(target)));
    want_high = std::min<std::int64_t>(want_high, static_cast<std::int64_t>(high.size()));
    std::int64_t want_low = std::min<std::int64_t>(
        target - want_high, static_cast<std::int64_t>(low.size()));
    // top up from the high pool if the low pool ran dry
    want_high = std::min<std::int64_t>(target - want_low,
                                       static_cast<std::int64_t>(high.size()));

    out.assign(high.begin(), high.begin() + want_high);
    out.insert(out.end(), low.begin(), low.begin() + want_low);
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Window dataset file: one record per window.

inline json window_record(const TrajectoryWindow& w,
                          const std::set<std::string>& action_codes = default_action_codes()) {
    std::vector<std::string> ids;
    ids.reserve(w.current_events.size());
    for (const auto& e : w.current_events) ids.push_back(e.event_id);
    return json{{"stay_id", w.stay_id},     {"window_index", w.window_index},
                {"start_min", w.start_min}, {"end_min", w.end_min},
                {"event_ids", ids},         {"rho", action_density(w, action_codes)}};
}

inline void write_window_dataset(const std::string& path, const WindowGrid& grid,
                                 const std::vector<std::int64_t>& selected,
                                 const std::set<std::string>& action_codes = default_action_codes(),
                                 bool append = false) {
    std::ofstream out(path, append ? (std::ios::binary | std::ios::app) : std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    for (std::int64_t idx : selected)
        out << window_record(grid.window(idx), action_codes).dump() << "\n";
}

}  // namespace realicu
