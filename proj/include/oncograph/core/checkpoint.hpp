#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "oncograph/core/error.hpp"
#include "oncograph/core/tensor.hpp"

namespace oncograph {

inline constexpr const char* kCheckpointFormat = "oncograph-checkpoint";
inline constexpr int kCheckpointVersion = 1;

/// Versioned JSON container shared by GNN and baseline models.
///
/// `kind` tags the model family ("gnn", "decision_tree", ...). Tensors are
/// stored as shape plus values; doubles are written with round-trip precision.
struct Checkpoint {
    std::string kind;
    std::uint64_t vocab_hash = 0;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    std::vector<std::pair<std::string, Tensor>> tensors;
    nlohmann::ordered_json payload = nlohmann::ordered_json::object();

    const Tensor& tensor(const std::string& name) const {
        for (const auto& [n, t] : tensors)
            if (n == name) return t;
        throw DataError("checkpoint has no tensor '" + name + "'");
    }
};

inline void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
    nlohmann::ordered_json j;
    j["format"] = kCheckpointFormat;
    j["version"] = kCheckpointVersion;
    j["kind"] = ckpt.kind;
    j["vocab_hash"] = std::to_string(ckpt.vocab_hash);
    j["config"] = ckpt.config;
    nlohmann::ordered_json tensors = nlohmann::ordered_json::array();
    for (const auto& [name, t] : ckpt.tensors) {
        nlohmann::ordered_json e;
        e["name"] = name;
        e["shape"] = t.shape();
        e["values"] = std::vector<double>(t.values().begin(), t.values().end());
        tensors.push_back(std::move(e));
    }
    j["tensors"] = std::move(tensors);
    j["payload"] = ckpt.payload;
    out << j.dump() << '\n';
}

/// Parses a container; when expected_vocab_hash is given, a different hash is a DataError.
inline Checkpoint read_checkpoint(std::istream& in, std::optional<std::uint64_t> expected_vocab_hash = std::nullopt) {
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed checkpoint: ") + e.what());
    }
    if (j.value("format", std::string()) != kCheckpointFormat) throw DataError("not an oncograph checkpoint");
    if (j.value("version", 0) != kCheckpointVersion) {
        throw DataError("unsupported checkpoint version " + std::to_string(j.value("version", 0)));
    }
    Checkpoint c;
    c.kind = j.at("kind").get<std::string>();
    c.vocab_hash = std::stoull(j.at("vocab_hash").get<std::string>());
    if (expected_vocab_hash && *expected_vocab_hash != c.vocab_hash) {
        throw DataError("checkpoint vocabulary hash does not match the current vocabulary");
    }
    c.config = j.at("config");
    for (const auto& e : j.at("tensors")) {
        c.tensors.emplace_back(e.at("name").get<std::string>(),
                               Tensor(e.at("shape").get<Shape>(), e.at("values").get<std::vector<double>>()));
    }
    c.payload = j.at("payload");
    return c;
}

inline void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write checkpoint '" + path + "'");
    write_checkpoint(out, ckpt);
}

inline Checkpoint load_checkpoint(const std::string& path,
                                  std::optional<std::uint64_t> expected_vocab_hash = std::nullopt) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open checkpoint '" + path + "'");
    return read_checkpoint(in, expected_vocab_hash);
}

} // namespace oncograph
