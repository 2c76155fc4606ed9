#pragma once

#include <filesystem>

#include "vidmine/pipeline.hpp"

namespace vidmine {

/// Writes the state as line-delimited JSON records behind a version header.
/// The write is atomic: a temp file in the same directory is renamed over the
/// target, so a crash never leaves a half-written archive.
void save_state(const PipelineState& state, const std::filesystem::path& path);

/// Reads an archive written by save_state. Throws std::runtime_error with the
/// offending line number on a version mismatch, unknown record type, or
/// malformed record.
PipelineState load_state(const std::filesystem::path& path);

}  // namespace vidmine
