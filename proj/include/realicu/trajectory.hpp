#pragma once

// Trajectory stream parsing and rendering. A trajectory file is
// line-delimited JSON: one context record first, then one record per
// event. Parsing sorts, deduplicates and assigns missing event ids
// deterministically.

#include <cstdio>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "realicu/events.hpp"
#include "realicu/jsonl.hpp"

namespace realicu {

struct Trajectory {
    PatientContext context;
    std::vector<ClinicalEvent> events;  // sorted by (time, event_id)
};

inline Trajectory parse_trajectory(std::istream& in, const std::string& source = "<stream>",
                                   const CodeRegistry& registry = CodeRegistry::defaults()) {
    Trajectory traj;
    bool have_context = false;
    std::size_t event_ordinal = 0;
    std::vector<ClinicalEvent> events;

    for_each_jsonl(in, source, [&](const json& rec, std::size_t line) {
        const std::string kind =
            require_field(rec, "kind", source, line).get<std::string>();
        if (kind == "context") {
            if (have_context) throw ParseError(source, line, "duplicate context record");
            if (event_ordinal > 0)
                throw ParseError(source, line, "context record must precede events");
            try {
                traj.context = rec.get<PatientContext>();
            } catch (const json::exception& e) {
                throw ParseError(source, line, e.what());
            }
            have_context = true;
        } else if (kind == "event") {
            if (!have_context)
                throw ParseError(source, line, "event record before context record");
            ++event_ordinal;
            ClinicalEvent ev;
            try {
                json filled = rec;
                if (!filled.contains("event_id") || filled["event_id"].is_null())
                    filled["event_id"] =
                        traj.context.stay_id + ":e" + std::to_string(event_ordinal);
                ev = filled.get<ClinicalEvent>();
            } catch (const json::exception& e) {
                throw ParseError(source, line, e.what());
            }
            if (ev.stay_id != traj.context.stay_id)
                throw ParseError(source, line,
                                 "mixed stay_ids in one stream: '" + ev.stay_id +
                                     "' vs '" + traj.context.stay_id + "'");
            if (!registry.contains(ev.code))
                throw ParseError(source, line, "unregistered event code '" + ev.code + "'");
            events.push_back(std::move(ev));
        } else {
            throw ParseError(source, line, "unknown record kind '" + kind + "'");
        }
    });
    if (!have_context) throw ParseError(source, 1, "trajectory has no context record");

    std::sort(events.begin(), events.end(), event_order_lt);

    // event_id uniqueness within the stay
    std::unordered_set<std::string> ids;
    for (const auto& e : events) {
        if (!ids.insert(e.event_id).second)
            throw ParseError(source, 0, "duplicate event_id '" + e.event_id + "'");
    }

    // Full duplicates (all fields equal ignoring event_id) eliminated,
    // first occurrence in sort order kept.
    std::unordered_set<std::string> seen;
    traj.events.reserve(events.size());
    for (auto& e : events) {
        if (seen.insert(e.dedup_key()).second) traj.events.push_back(std::move(e));
    }
    return traj;
}

inline Trajectory parse_trajectory_file(const std::string& path,
                                        const CodeRegistry& registry = CodeRegistry::defaults()) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return parse_trajectory(in, path, registry);
}

inline void serialize_trajectory(std::ostream& out, const Trajectory& traj) {
    out << json(traj.context).dump() << "\n";
    for (const auto& e : traj.events) {
        json j = e;
        j["kind"] = "event";
        out << j.dump() << "\n";
    }
}

inline void write_trajectory_file(const std::string& path, const Trajectory& traj) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    serialize_trajectory(out, traj);
}

// Removes outcome-revealing events and everything from the earliest
// such marker onward. No marker present -> identity.
inline std::vector<ClinicalEvent> truncate_for_inference(
    const std::vector<ClinicalEvent>& events,
    const std::set<std::string>& outcome_codes = default_outcome_codes()) {
    std::int64_t cutoff = INT64_MAX;
    bool found = false;
    for (const auto& e : events) {
        if (outcome_codes.count(e.code)) {
            cutoff = std::min(cutoff, e.time);
            found = true;
        }
    }
    if (!found) return events;
    std::vector<ClinicalEvent> out;
    for (const auto& e : events) {
        if (e.time < cutoff) out.push_back(e);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Rendering

enum class Detail { full, compact };

// Fixed two-decimal value formatting keeps prompt text deterministic.
inline std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::string format_hours(double h) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.1f", h);
    return buf;
}

// One line per event: `[<event_id>] <time> <code> <name> <payload>`.
// Compact drops the event_id and free text.
inline std::string render_event_line(const ClinicalEvent& e, Detail detail) {
    std::string line;
    if (detail == Detail::full) {
        line += "[";
        line += e.event_id;
        line += "] ";
    }
    line += std::to_string(e.time);
    line += "min ";
    line += e.code;
    line += " ";
    line += e.name;
    if (e.value) {
        line += " = ";
        line += format_value(*e.value);
        if (e.unit && !e.unit->empty()) {
            line += " ";
            line += *e.unit;
        }
    }
    if (detail == Detail::full && e.text && !e.text->empty()) {
        line += " :: ";
        line += *e.text;
    }
    return line;
}

inline std::string render_events(const std::vector<ClinicalEvent>& events, Detail detail) {
    std::string out;
    for (const auto& e : events) {
        out += render_event_line(e, detail);
        out += "\n";
    }
    return out;
}

// Model-facing patient background. Excludes the outcome and the
// grouping metadata by construction.
inline std::string render_patient_metadata(const PatientContext& c) {
    std::string out = "stay " + c.stay_id + "\n";
    for (const auto& [k, v] : c.demographics) out += k + ": " + v + "\n";
    if (!c.pre_icu_history.empty()) out += "pre-ICU history: " + c.pre_icu_history + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// Labels file IO: one WindowLabels object per line.

inline std::vector<WindowLabels> read_labels_file(const std::string& path) {
    std::vector<WindowLabels> out;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    for_each_jsonl(in, path, [&](const json& rec, std::size_t line) {
        try {
            out.push_back(rec.get<WindowLabels>());
        } catch (const json::exception& e) {
            throw ParseError(path, line, e.what());
        }
    });
    return out;
}

inline void write_labels_file(const std::string& path, const std::vector<WindowLabels>& labels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    for (const auto& l : labels) out << json(l).dump() << "\n";
}

}  // namespace realicu
