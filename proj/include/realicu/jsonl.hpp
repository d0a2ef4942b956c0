#pragma once

// Line-delimited JSON helpers. Every record file in this project
// (trajectories, labels, window datasets, replays, predictions) is
// one JSON object per line; parse errors carry the line number.

#include <fstream>
#include <functional>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace realicu {

using json = nlohmann::json;

class ParseError : public std::runtime_error {
public:
    ParseError(std::string source, std::size_t line, const std::string& what)
        : std::runtime_error(source + ":" + std::to_string(line) + ": " + what),
          source_(std::move(source)),
          line_(line) {}

    const std::string& source() const { return source_; }
    std::size_t line() const { return line_; }

private:
    std::string source_;
    std::size_t line_;
};

// Calls fn(record, line_number) for every non-blank line.
inline void for_each_jsonl(std::istream& in, const std::string& source,
                           const std::function<void(const json&, std::size_t)>& fn) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(source, lineno, e.what());
        }
        if (!rec.is_object()) throw ParseError(source, lineno, "record is not a JSON object");
        fn(rec, lineno);
    }
}

inline std::vector<json> read_jsonl_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<json> out;
    for_each_jsonl(in, path, [&](const json& rec, std::size_t) { out.push_back(rec); });
    return out;
}

inline void write_jsonl_file(const std::string& path, const std::vector<json>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    for (const auto& rec : records) out << rec.dump() << "\n";
}

// Field accessors with record-level errors instead of nlohmann's
// type_error noise.
inline const json& require_field(const json& rec, const char* key,
                                 const std::string& source, std::size_t line) {
    auto it = rec.find(key);
    if (it == rec.end()) throw ParseError(source, line, std::string("missing field '") + key + "'");
    return *it;
}

}  // namespace realicu
