/**
 * @file model_io.hpp
 * @brief Model artifact persistence.
 *
 * Self-describing container: a text header (magic + version line, then
 * key-value lines, then a `payload` marker) followed by little-endian 64-bit
 * floating-point arrays for the codebooks and transition matrices.
 */

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include "sapsom/agent.hpp"
#include "sapsom/cartpole.hpp"
#include "sapsom/config.hpp"
#include "sapsom/som.hpp"
#include "sapsom/transition.hpp"

namespace sapsom {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct VersionError : FormatError {
    using FormatError::FormatError;
};

inline constexpr int kModelFormatVersion = 1;
inline constexpr const char* kModelMagic = "sapsom-model";

struct ModelArtifact {
    SomMap map;
    TransitionModel model;
    TrainingConfig training;
    EnvParams env;
    std::uint64_t seed = 0;

    ModelArtifact(SomMap m, TransitionModel t, TrainingConfig tc, EnvParams e,
                  std::uint64_t s)
        : map(std::move(m)), model(std::move(t)), training(tc), env(e), seed(s) {}
};

namespace detail {

inline void write_f64_le(std::ostream& out, const double* data, size_t count) {
    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char*>(data),
                  static_cast<std::streamsize>(count * sizeof(double)));
    } else {
        for (size_t i = 0; i < count; ++i) {
            auto bits = std::bit_cast<std::uint64_t>(data[i]);
            char buf[8];
            for (int b = 0; b < 8; ++b) buf[b] = char((bits >> (8 * b)) & 0xff);
            out.write(buf, 8);
        }
    }
}

inline void read_f64_le(std::istream& in, double* data, size_t count) {
    if constexpr (std::endian::native == std::endian::little) {
        in.read(reinterpret_cast<char*>(data),
                static_cast<std::streamsize>(count * sizeof(double)));
    } else {
        for (size_t i = 0; i < count; ++i) {
            char buf[8];
            in.read(buf, 8);
            std::uint64_t bits = 0;
            for (int b = 0; b < 8; ++b)
                bits |= std::uint64_t(static_cast<unsigned char>(buf[b])) << (8 * b);
            data[i] = std::bit_cast<double>(bits);
        }
    }
    if (!in) throw FormatError("model load: truncated payload");
}

}  // namespace detail

inline void save_model(const ModelArtifact& artifact, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("model save: cannot open " + path + " for writing");

    out << kModelMagic << ' ' << kModelFormatVersion << '\n';
    out << "rows = " << artifact.map.geometry().rows << '\n';
    out << "cols = " << artifact.map.geometry().cols << '\n';
    out << "state_dim = " << artifact.map.dim() << '\n';
    out << "action_count = " << artifact.model.action_count() << '\n';
    out << "seed = " << artifact.seed << '\n';
    for (const auto& [k, v] : training_to_key_values(artifact.training))
        out << k << " = " << v << '\n';
    for (const auto& [k, v] : env_to_key_values(artifact.env))
        out << k << " = " << v << '\n';
    out << "payload\n";

    const auto& cb = artifact.map.codebook();
    detail::write_f64_le(out, cb.data(), size_t(cb.size()));
    for (int a = 0; a < artifact.model.action_count(); ++a) {
        const auto& T = artifact.model.matrix(a);
        detail::write_f64_le(out, T.data(), size_t(T.size()));
    }
    if (!out) throw IoError("model save: write failed for " + path);
}

inline ModelArtifact load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("model load: cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw FormatError("model load: empty file");
    {
        std::istringstream head(line);
        std::string magic;
        int version = -1;
        head >> magic >> version;
        if (magic != kModelMagic)
            throw FormatError("model load: not a sapsom model file");
        if (version != kModelFormatVersion)
            throw VersionError("model load: unsupported format version " +
                               std::to_string(version));
    }

    KeyValueMap kv;
    bool payload = false;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line == "payload") {
            payload = true;
            break;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw FormatError("model load: malformed header line: " + line);
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    if (!payload) throw FormatError("model load: missing payload marker");

    detail::KvReader r(kv);
    MapGeometry geometry;
    int state_dim = 0, action_count = 0;
    std::uint64_t seed = 0;
    r.get("rows", geometry.rows);
    r.get("cols", geometry.cols);
    r.get("state_dim", state_dim);
    r.get("action_count", action_count);
    r.get("seed", seed);
    if (geometry.rows < 1 || geometry.cols < 1 || state_dim < 1 || action_count < 1)
        throw FormatError("model load: invalid dimensions in header");

    AppConfig cfg = config_from_key_values(kv);

    SomMap map(geometry, state_dim);
    detail::read_f64_le(in, map.codebook().data(), size_t(map.codebook().size()));
    TransitionModel model(action_count, geometry.units());
    for (int a = 0; a < action_count; ++a)
        detail::read_f64_le(in, model.matrix(a).data(), size_t(model.matrix(a).size()));

    return ModelArtifact(std::move(map), std::move(model), cfg.training, cfg.env, seed);
}

}  // namespace sapsom
