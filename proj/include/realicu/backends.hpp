#pragma once

// Chat-completion and text-embedding backend interfaces plus the
// deterministic scripted implementations used for desk-scale runs.
// Remote HTTP clients live in realicu/remote.hpp.

#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "realicu/events.hpp"
#include "realicu/jsonl.hpp"
#include "realicu/rng.hpp"

namespace realicu {

struct ChatRequest {
    std::string system_prompt;
    std::string user_prompt;
    std::string schema_hint;  // expected structured-output shape, e.g. "status"
    std::int64_t max_output_tokens = 4096;
};

struct ChatResponse {
    std::string text;
    TokenUsage usage;   // usage.calls == 1
    bool truncated = false;
};

inline std::int64_t count_whitespace_tokens(const std::string& s) {
    std::int64_t n = 0;
    bool in_token = false;
    for (unsigned char c : s) {
        if (std::isspace(c)) {
            in_token = false;
        } else if (!in_token) {
            in_token = true;
            ++n;
        }
    }
    return n;
}

// Stable digest of the request content; the replay-file key.
inline std::uint64_t request_digest(const ChatRequest& req) {
    std::uint64_t h = fnv1a64(req.system_prompt);
    h = h * 0x100000001b3ULL ^ fnv1a64(req.user_prompt);
    h = h * 0x100000001b3ULL ^ fnv1a64(req.schema_hint);
    return h;
}

inline std::string digest_hex(std::uint64_t d) {
    static const char* hex = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = hex[d & 0xf];
        d >>= 4;
    }
    return out;
}

class BackendError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual ChatResponse chat(const ChatRequest& request) = 0;
    virtual std::string identity() const = 0;
};

// ---------------------------------------------------------------------------
// Embedding vectors

struct EmbeddingVector {
    std::vector<double> values;

    std::int64_t dim() const { return static_cast<std::int64_t>(values.size()); }

    double norm() const {
        double s = 0.0;
        for (double v : values) s += v * v;
        return std::sqrt(s);
    }

    EmbeddingVector& normalize() {
        const double n = norm();
        if (n > 0.0) {
            for (double& v : values) v /= n;
        }
        return *this;
    }
};

class EmbedBackend {
public:
    virtual ~EmbedBackend() = default;
    virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) = 0;
    virtual std::int64_t dim() const = 0;
    virtual std::string identity() const = 0;
};

inline double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.values.size() != b.values.size())
        throw std::invalid_argument("embedding dimension mismatch");
    double dot = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) dot += a.values[i] * b.values[i];
    const double na = a.norm(), nb = b.norm();
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (na * nb);
}

// ---------------------------------------------------------------------------
// Scripted chat backend
//
// Pure function of the request content. Lookup order: exact request
// digest (replay table), then a per-schema default, then the
// configured fallback reply. Token usage is whitespace-token counted.

class ScriptedChatBackend : public ChatBackend {
public:
    ChatResponse chat(const ChatRequest& request) override {
        std::string reply = fallback_;
        if (auto it = replies_.find(digest_hex(request_digest(request))); it != replies_.end()) {
            reply = it->second;
        } else if (auto st = schema_replies_.find(request.schema_hint);
                   st != schema_replies_.end()) {
            reply = st->second;
        }
        ChatResponse resp;
        resp.text = reply;
        resp.usage.input_tokens = count_whitespace_tokens(request.system_prompt) +
                                  count_whitespace_tokens(request.user_prompt);
        resp.usage.output_tokens = count_whitespace_tokens(resp.text);
        resp.usage.calls = 1;
        if (resp.usage.output_tokens > request.max_output_tokens) {
            resp.text = truncate_tokens(resp.text, request.max_output_tokens);
            resp.usage.output_tokens = request.max_output_tokens;
            resp.truncated = true;
        }
        return resp;
    }

    std::string identity() const override { return "scripted-chat"; }

    void add_reply(const ChatRequest& request, std::string reply) {
        replies_[digest_hex(request_digest(request))] = std::move(reply);
    }
    void add_reply_digest(const std::string& hex, std::string reply) {
        replies_[hex] = std::move(reply);
    }
    void set_schema_reply(const std::string& schema_hint, std::string reply) {
        schema_replies_[schema_hint] = std::move(reply);
    }
    void set_fallback(std::string reply) { fallback_ = std::move(reply); }

    // Replay file: {"digest": hex, "reply": text} or {"schema": name,
    // "reply": text}, one per line.
    void load_replay_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open " + path);
        for_each_jsonl(in, path, [&](const json& rec, std::size_t line) {
            const std::string reply =
                require_field(rec, "reply", path, line).get<std::string>();
            if (rec.contains("digest")) {
                replies_[rec["digest"].get<std::string>()] = reply;
            } else if (rec.contains("schema")) {
                schema_replies_[rec["schema"].get<std::string>()] = reply;
            } else {
                throw ParseError(path, line, "replay record needs 'digest' or 'schema'");
            }
        });
    }

    void save_replay_file(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open " + path + " for writing");
        for (const auto& [digest, reply] : replies_)
            out << json{{"digest", digest}, {"reply", reply}}.dump() << "\n";
        for (const auto& [schema, reply] : schema_replies_)
            out << json{{"schema", schema}, {"reply", reply}}.dump() << "\n";
    }

private:
    static std::string truncate_tokens(const std::string& s, std::int64_t max_tokens) {
        std::int64_t n = 0;
        bool in_token = false;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (std::isspace(static_cast<unsigned char>(s[i]))) {
                in_token = false;
            } else if (!in_token) {
                in_token = true;
                if (++n > max_tokens) return s.substr(0, i);
            }
        }
        return s;
    }

    std::map<std::string, std::string> replies_;
    std::map<std::string, std::string> schema_replies_;
    std::string fallback_;
};

// ---------------------------------------------------------------------------
// Hashed bag-of-words embedder
//
// Tokens lowercased and hashed into dim buckets; bucket counts are
// L2-normalized. Deterministic and fast enough to embed every window
// of a cohort.

class HashedBowEmbedder : public EmbedBackend {
public:
    explicit HashedBowEmbedder(std::int64_t dim = 256) : dim_(dim) {
        if (dim < 1) throw std::invalid_argument("embedding dim < 1");
    }

    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override {
        if (texts.empty()) throw std::invalid_argument("embed() needs a non-empty list");
        std::vector<EmbeddingVector> out;
        out.reserve(texts.size());
        for (const auto& t : texts) out.push_back(embed_one(t));
        return out;
    }

    std::int64_t dim() const override { return dim_; }
    std::string identity() const override {
        return "hashed-bow-" + std::to_string(dim_);
    }

    static std::size_t bucket_of(const std::string& lowered_token, std::int64_t dim) {
        return static_cast<std::size_t>(fnv1a64(lowered_token) %
                                        static_cast<std::uint64_t>(dim));
    }

private:
    EmbeddingVector embed_one(const std::string& text) const {
        EmbeddingVector v;
        v.values.assign(static_cast<std::size_t>(dim_), 0.0);
        std::string token;
        bool any = false;
        auto flush = [&] {
            if (!token.empty()) {
                v.values[bucket_of(token, dim_)] += 1.0;
                token.clear();
                any = true;
            }
        };
        for (unsigned char c : text) {
            if (std::isalnum(c)) {
                token += static_cast<char>(std::tolower(c));
            } else {
                flush();
            }
        }
        flush();
        if (!any) v.values[0] = 1.0;  // tokenless text still yields a unit vector
        v.normalize();
        return v;
    }

    std::int64_t dim_;
};

// ---------------------------------------------------------------------------
// Usage accounting. Merge is associative and commutative; sessions are
// per-worker and merged at aggregation.

class UsageSession {
public:
    void record(const TokenUsage& u) { total_ += u; }
    void merge(const UsageSession& o) { total_ += o.total_; }
    const TokenUsage& total() const { return total_; }

private:
    TokenUsage total_;
};

inline TokenUsage count_usage(const UsageSession& session) { return session.total(); }

}  // namespace realicu
