#pragma once

#include "beetrack/core.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace beetrack {

// JSON Lines formats, one object per line:
//   detections:   {"detection_id","frame","ts","cam","x","y","theta","bits":[12 floats]}
//   ground truth: {"true_id","detection_ids":[...]}
//   tracks:       {"track_id","assigned_id","detection_ids":[...],"start_frame","end_frame"}
// bits[0] is the most significant ID bit. Readers throw DataError with
// "file:line: reason" diagnostics.

std::string detection_to_json_line(const Detection& d);
Detection detection_from_json_line(const std::string& line);

std::vector<Detection> read_detections(const std::filesystem::path& path);
void write_detections(const std::filesystem::path& path, std::span<const Detection> detections);

/// Resolves detection ids against `detections`; unknown ids are errors.
std::vector<GroundTruthTrack> read_truth(const std::filesystem::path& path, std::span<const Detection> detections);
void write_truth(const std::filesystem::path& path, std::span<const GroundTruthTrack> truth);

/// Tracks are rebuilt with one tracklet per gap-free run.
std::vector<Track> read_tracks(const std::filesystem::path& path, std::span<const Detection> detections);
void write_tracks(const std::filesystem::path& path, std::span<const Track> tracks);
std::string tracks_to_jsonl(std::span<const Track> tracks);

} // namespace beetrack
