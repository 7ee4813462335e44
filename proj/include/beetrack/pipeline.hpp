#pragma once

#include "beetrack/core.hpp"
#include "beetrack/forest.hpp"
#include "beetrack/linear_model.hpp"
#include "beetrack/tracking.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace beetrack {

inline constexpr std::int64_t kDefaultChunkFrames = 10800;  // one hour at 3 fps

/// Contiguous half-open frame intervals covering a recording.
struct ChunkPlan {
    std::int64_t chunk_length_frames = kDefaultChunkFrames;
    std::vector<std::pair<std::int64_t, std::int64_t>> chunks;

    /// Intervals of `chunk_length_frames` starting at the first frame of
    /// `detections`; empty input gives an empty plan.
    static ChunkPlan cover(std::span<const Detection> detections, std::int64_t chunk_length_frames = kDefaultChunkFrames);
    /// One interval over everything.
    static ChunkPlan single(std::span<const Detection> detections);
};

struct PipelineConfig {
    TrackerConfig tracker;
    int workers = 1;
    /// Largest gap allowed when joining tracks across a chunk boundary;
    /// unlimited when empty.
    std::optional<std::int64_t> merge_gap_frames;
};

/// Step 1, step 2 and ID assignment on one chunk.
std::vector<Track> track_chunk(std::span<const Detection> detections, const LinearModel& step1,
                               const ForestModel& step2, const TrackerConfig& config);

/// Joins tracks across consecutive chunks by assigned ID.
///
/// For each ID, the one pair (track from chunk k, track from chunk k + 1)
/// with the smallest gap is concatenated, provided the gap fits
/// `merge_gap_frames`; the merged track's ID is recomputed. Tracks of chunk
/// k include those already extended from earlier chunks.
std::vector<Track> merge_chunks(std::vector<std::vector<Track>> per_chunk,
                                std::optional<std::int64_t> merge_gap_frames = std::nullopt);

/// Tracks each chunk of `plan` (on up to `config.workers` threads) and
/// merges the results. Output does not depend on the worker count.
std::vector<Track> run_pipeline(std::span<const Detection> detections, const LinearModel& step1,
                                const ForestModel& step2, const PipelineConfig& config, const ChunkPlan& plan);

} // namespace beetrack
