#pragma once

// Canonical typed representation of patient event streams, labels and
// predictions. All types are immutable values after construction and
// safe to share across workers.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace realicu {

using json = nlohmann::json;

// Sentinel evidence token for claims grounded in trend statistics
// rather than a specific event.
inline constexpr const char* kVitalTrendToken = "vital_trend";

// ---------------------------------------------------------------------------
// Event codes

namespace codes {
inline constexpr const char* kVitals = "VITALS";
inline constexpr const char* kLabTest = "LAB_TEST";
inline constexpr const char* kDrugStart = "DRUG_START";
inline constexpr const char* kDrugStop = "DRUG_STOP";
inline constexpr const char* kDrugPrescription = "DRUG_PRESCRIPTION";
inline constexpr const char* kBodyInput = "BODY_INPUT";
inline constexpr const char* kBodyOutput = "BODY_OUTPUT";
inline constexpr const char* kTransfer = "TRANSFER";
inline constexpr const char* kProcedure = "PROCEDURE";
inline constexpr const char* kDiagnosis = "DIAGNOSIS";
inline constexpr const char* kNote = "NOTE";
inline constexpr const char* kDischarge = "DISCHARGE";
inline constexpr const char* kDischargeSummary = "DISCHARGE_SUMMARY";
inline constexpr const char* kDeath = "DEATH";
}  // namespace codes

// Extensible registry of known event class tokens. Unknown codes can be
// registered by callers; parsing accepts registered codes only.
class CodeRegistry {
public:
    CodeRegistry() {
        for (const char* c :
             {codes::kVitals, codes::kLabTest, codes::kDrugStart, codes::kDrugStop,
              codes::kDrugPrescription, codes::kBodyInput, codes::kBodyOutput,
              codes::kTransfer, codes::kProcedure, codes::kDiagnosis, codes::kNote,
              codes::kDischarge, codes::kDischargeSummary, codes::kDeath}) {
            codes_.insert(c);
        }
    }

    void add(const std::string& code) { codes_.insert(code); }
    bool contains(const std::string& code) const { return codes_.count(code) > 0; }

    static const CodeRegistry& defaults() {
        static const CodeRegistry reg;
        return reg;
    }

private:
    std::set<std::string> codes_;
};

// Event classes that count as clinical actions when computing action
// density and when stripping the current window before prediction.
inline const std::set<std::string>& default_action_codes() {
    static const std::set<std::string> s{codes::kDrugStart,  codes::kDrugStop,
                                         codes::kDrugPrescription, codes::kBodyInput,
                                         codes::kTransfer,   codes::kProcedure};
    return s;
}

// Event classes that reveal the stay outcome; visible history is
// truncated before the earliest of these at inference time.
inline const std::set<std::string>& default_outcome_codes() {
    static const std::set<std::string> s{codes::kDischarge, codes::kDischargeSummary,
                                         codes::kDeath};
    return s;
}

// ---------------------------------------------------------------------------
// ClinicalEvent

struct ClinicalEvent {
    std::string event_id;
    std::string stay_id;
    std::int64_t time = 0;  // minutes from ICU admission; negative = pre-ICU
    std::string code;
    std::string name;
    std::optional<double> value;
    std::optional<std::string> unit;  // present whenever value is; "" = dimensionless
    std::optional<std::string> text;

    // Identity used for full-duplicate elimination: every field except
    // the event_id.
    std::string dedup_key() const {
        std::string k = stay_id;
        k += '\x1f';
        k += std::to_string(time);
        k += '\x1f';
        k += code;
        k += '\x1f';
        k += name;
        k += '\x1f';
        if (value) k += json(*value).dump();
        k += '\x1f';
        if (unit) k += *unit;
        k += '\x1f';
        if (text) k += *text;
        return k;
    }
};

inline bool event_order_lt(const ClinicalEvent& a, const ClinicalEvent& b) {
    if (a.time != b.time) return a.time < b.time;
    return a.event_id < b.event_id;
}

inline void to_json(json& j, const ClinicalEvent& e) {
    j = json{{"event_id", e.event_id}, {"stay_id", e.stay_id}, {"time", e.time},
             {"code", e.code},         {"name", e.name}};
    if (e.value) j["value"] = *e.value;
    if (e.unit) j["unit"] = *e.unit;
    if (e.text) j["text"] = *e.text;
}

inline void from_json(const json& j, ClinicalEvent& e) {
    j.at("event_id").get_to(e.event_id);
    j.at("stay_id").get_to(e.stay_id);
    j.at("time").get_to(e.time);
    j.at("code").get_to(e.code);
    j.at("name").get_to(e.name);
    if (j.contains("value") && !j["value"].is_null()) e.value = j["value"].get<double>();
    if (j.contains("unit") && !j["unit"].is_null()) e.unit = j["unit"].get<std::string>();
    if (j.contains("text") && !j["text"].is_null()) e.text = j["text"].get<std::string>();
    // value present implies unit-or-dimensionless is explicit
    if (e.value && !e.unit) e.unit = std::string{};
}

// ---------------------------------------------------------------------------
// PatientContext

enum class Outcome { survived, died, unknown };

inline std::string to_string(Outcome o) {
    switch (o) {
        case Outcome::survived: return "survived";
        case Outcome::died: return "died";
        default: return "unknown";
    }
}

inline Outcome outcome_from_string(const std::string& s) {
    if (s == "survived") return Outcome::survived;
    if (s == "died") return Outcome::died;
    if (s == "unknown") return Outcome::unknown;
    throw std::invalid_argument("unknown outcome: " + s);
}

struct PatientContext {
    std::string stay_id;
    std::map<std::string, std::string> demographics;
    std::string pre_icu_history;
    std::optional<Outcome> outcome;  // never rendered to any model-facing text
    std::map<std::string, std::string> group_keys;  // pure metadata for breakdowns
};

inline void to_json(json& j, const PatientContext& c) {
    j = json{{"kind", "context"},
             {"stay_id", c.stay_id},
             {"demographics", c.demographics},
             {"pre_icu_history", c.pre_icu_history},
             {"group_keys", c.group_keys}};
    if (c.outcome) j["outcome"] = to_string(*c.outcome);
}

inline void from_json(const json& j, PatientContext& c) {
    j.at("stay_id").get_to(c.stay_id);
    if (j.contains("demographics")) j["demographics"].get_to(c.demographics);
    if (j.contains("pre_icu_history")) j["pre_icu_history"].get_to(c.pre_icu_history);
    if (j.contains("group_keys")) j["group_keys"].get_to(c.group_keys);
    if (j.contains("outcome") && !j["outcome"].is_null())
        c.outcome = outcome_from_string(j["outcome"].get<std::string>());
}

// ---------------------------------------------------------------------------
// Evidence and labels

struct EvidenceRef {
    // Each entry is an event_id or the literal `vital_trend` token.
    std::vector<std::string> refs;

    bool empty() const { return refs.empty(); }
    bool operator==(const EvidenceRef&) const = default;
};

inline void to_json(json& j, const EvidenceRef& e) { j = e.refs; }
inline void from_json(const json& j, EvidenceRef& e) { j.get_to(e.refs); }

// One free-text label entry (a problem, action or red flag) plus the
// events backing it.
struct LabeledText {
    std::string text;
    EvidenceRef evidence;

    bool operator==(const LabeledText&) const = default;
};

inline void to_json(json& j, const LabeledText& t) {
    j = json{{"text", t.text}, {"evidence", t.evidence}};
}
inline void from_json(const json& j, LabeledText& t) {
    j.at("text").get_to(t.text);
    if (j.contains("evidence")) j["evidence"].get_to(t.evidence);
}

// Drops exact-duplicate strings, keeping first occurrence.
inline std::vector<LabeledText> dedup_texts(std::vector<LabeledText> items) {
    std::set<std::string> seen;
    std::vector<LabeledText> out;
    out.reserve(items.size());
    for (auto& it : items) {
        if (seen.insert(it.text).second) out.push_back(std::move(it));
    }
    return out;
}

enum class Status { improving, stable, deteriorating };

inline std::string to_string(Status s) {
    switch (s) {
        case Status::improving: return "improving";
        case Status::stable: return "stable";
        default: return "deteriorating";
    }
}

inline std::optional<Status> status_from_string(const std::string& s) {
    if (s == "improving") return Status::improving;
    if (s == "stable") return Status::stable;
    if (s == "deteriorating") return Status::deteriorating;
    return std::nullopt;
}

enum class Provenance { gold, oracle, scripted };

inline std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::gold: return "gold";
        case Provenance::oracle: return "oracle";
        default: return "scripted";
    }
}

inline Provenance provenance_from_string(const std::string& s) {
    if (s == "gold") return Provenance::gold;
    if (s == "oracle") return Provenance::oracle;
    if (s == "scripted") return Provenance::scripted;
    throw std::invalid_argument("unknown provenance: " + s);
}

struct WindowLabels {
    std::string stay_id;
    std::int64_t window_index = 0;
    // Absent status = window unlabeled for the status task (e.g. the
    // hindsight labeler returned insufficient_data).
    std::optional<Status> status;
    EvidenceRef status_evidence;
    std::vector<LabeledText> problems;
    std::vector<LabeledText> actions;
    std::vector<LabeledText> red_flags;
    Provenance provenance = Provenance::scripted;
};

inline void to_json(json& j, const WindowLabels& w) {
    j = json{{"stay_id", w.stay_id},
             {"window_index", w.window_index},
             {"status_evidence", w.status_evidence},
             {"problems", w.problems},
             {"actions", w.actions},
             {"red_flags", w.red_flags},
             {"provenance", to_string(w.provenance)}};
    if (w.status) j["status"] = to_string(*w.status);
}

inline void from_json(const json& j, WindowLabels& w) {
    j.at("stay_id").get_to(w.stay_id);
    j.at("window_index").get_to(w.window_index);
    if (j.contains("status") && !j["status"].is_null())
        w.status = status_from_string(j["status"].get<std::string>());
    if (j.contains("status_evidence")) j["status_evidence"].get_to(w.status_evidence);
    if (j.contains("problems")) w.problems = dedup_texts(j["problems"].get<std::vector<LabeledText>>());
    if (j.contains("actions")) w.actions = dedup_texts(j["actions"].get<std::vector<LabeledText>>());
    if (j.contains("red_flags")) w.red_flags = dedup_texts(j["red_flags"].get<std::vector<LabeledText>>());
    if (j.contains("provenance"))
        w.provenance = provenance_from_string(j["provenance"].get<std::string>());
}

// ---------------------------------------------------------------------------
// Action reviews (hindsight verdicts on recorded actions)

enum class Verdict { best_practice, acceptable, potentially_harmful, insufficient_data };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::best_practice: return "best_practice";
        case Verdict::acceptable: return "acceptable";
        case Verdict::potentially_harmful: return "potentially_harmful";
        default: return "insufficient_data";
    }
}

inline std::optional<Verdict> verdict_from_string(const std::string& s) {
    if (s == "best_practice") return Verdict::best_practice;
    if (s == "acceptable") return Verdict::acceptable;
    if (s == "potentially_harmful") return Verdict::potentially_harmful;
    if (s == "insufficient_data") return Verdict::insufficient_data;
    return std::nullopt;
}

struct ActionReview {
    std::string event_id;
    Verdict verdict = Verdict::insufficient_data;
    std::string rationale;
};

inline void to_json(json& j, const ActionReview& r) {
    j = json{{"event_id", r.event_id}, {"verdict", to_string(r.verdict)},
             {"rationale", r.rationale}};
}

inline void from_json(const json& j, ActionReview& r) {
    j.at("event_id").get_to(r.event_id);
    auto v = verdict_from_string(j.at("verdict").get<std::string>());
    if (!v) throw std::invalid_argument("unknown verdict");
    r.verdict = *v;
    if (j.contains("rationale")) j["rationale"].get_to(r.rationale);
}

// ---------------------------------------------------------------------------
// Predictions and token accounting

struct TokenUsage {
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;
    std::int64_t calls = 0;

    TokenUsage& operator+=(const TokenUsage& o) {
        input_tokens += o.input_tokens;
        output_tokens += o.output_tokens;
        calls += o.calls;
        return *this;
    }
    friend TokenUsage operator+(TokenUsage a, const TokenUsage& b) { return a += b; }
    bool operator==(const TokenUsage&) const = default;
};

inline void to_json(json& j, const TokenUsage& u) {
    j = json{{"input_tokens", u.input_tokens}, {"output_tokens", u.output_tokens},
             {"calls", u.calls}};
}

inline void from_json(const json& j, TokenUsage& u) {
    j.at("input_tokens").get_to(u.input_tokens);
    j.at("output_tokens").get_to(u.output_tokens);
    j.at("calls").get_to(u.calls);
}

// Predicted status has a fourth class the hindsight labels never carry;
// it counts as wrong for every gold class under the default scoring.
enum class PredStatus { improving, stable, deteriorating, insufficient_data };

inline std::string to_string(PredStatus s) {
    switch (s) {
        case PredStatus::improving: return "improving";
        case PredStatus::stable: return "stable";
        case PredStatus::deteriorating: return "deteriorating";
        default: return "insufficient_data";
    }
}

inline PredStatus pred_status_from_string(const std::string& s) {
    if (s == "improving") return PredStatus::improving;
    if (s == "stable") return PredStatus::stable;
    if (s == "deteriorating") return PredStatus::deteriorating;
    return PredStatus::insufficient_data;
}

inline bool status_matches(PredStatus p, Status g) {
    switch (p) {
        case PredStatus::improving: return g == Status::improving;
        case PredStatus::stable: return g == Status::stable;
        case PredStatus::deteriorating: return g == Status::deteriorating;
        default: return false;
    }
}

struct TaskPrediction {
    std::string stay_id;
    std::int64_t window_index = 0;
    PredStatus status = PredStatus::insufficient_data;
    EvidenceRef status_evidence;
    std::vector<LabeledText> problems_ranked;  // rank 1 first, length <= k
    std::vector<LabeledText> actions_ranked;
    // Populated only when red-flag prediction is enabled; excluded from
    // default scoring.
    std::vector<LabeledText> red_flags_ranked;
    TokenUsage usage;
    bool degraded = false;  // some task output was unparseable
};

inline void to_json(json& j, const TaskPrediction& p) {
    j = json{{"stay_id", p.stay_id},
             {"window_index", p.window_index},
             {"status", to_string(p.status)},
             {"status_evidence", p.status_evidence},
             {"problems_ranked", p.problems_ranked},
             {"actions_ranked", p.actions_ranked},
             {"red_flags_ranked", p.red_flags_ranked},
             {"usage", p.usage},
             {"degraded", p.degraded}};
}

inline void from_json(const json& j, TaskPrediction& p) {
    j.at("stay_id").get_to(p.stay_id);
    j.at("window_index").get_to(p.window_index);
    p.status = pred_status_from_string(j.at("status").get<std::string>());
    if (j.contains("status_evidence")) j["status_evidence"].get_to(p.status_evidence);
    if (j.contains("problems_ranked")) j["problems_ranked"].get_to(p.problems_ranked);
    if (j.contains("actions_ranked")) j["actions_ranked"].get_to(p.actions_ranked);
    if (j.contains("red_flags_ranked")) j["red_flags_ranked"].get_to(p.red_flags_ranked);
    if (j.contains("usage")) j["usage"].get_to(p.usage);
    if (j.contains("degraded")) j["degraded"].get_to(p.degraded);
}

}  // namespace realicu
