#pragma once

#include <optional>
#include <string>

#include "lpvss/eval.hpp"

namespace lpvss {

// Versioned, human-diffable JSON checkpoint. Doubles are emitted in
// shortest round-trip form, so load(save(model)) reproduces every parameter
// bit for bit and identical models serialize to identical bytes.
struct CheckpointMeta {
    std::uint64_t seed = 0;
    std::optional<TrainConfig> config;
};

void save_checkpoint(const NnssModel& model, const Normalizer* normalizer,
                     const CheckpointMeta& meta, const std::string& path);
void save_checkpoint(const ConstantSsModel& model, const Normalizer* normalizer,
                     const CheckpointMeta& meta, const std::string& path);

struct LoadedCheckpoint {
    ModelKind kind = ModelKind::nnss;
    NnssModel nnss;          // populated when kind == nnss
    ConstantSsModel constant;  // populated when kind == constant
    std::optional<Normalizer> normalizer;
    CheckpointMeta meta;

    std::size_t m() const { return kind == ModelKind::nnss ? nnss.m : constant.m; }
    std::size_t r() const { return kind == ModelKind::nnss ? nnss.r : constant.r; }
};

LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace lpvss
