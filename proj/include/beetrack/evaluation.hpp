#pragma once

#include "beetrack/core.hpp"
#include "beetrack/features.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace beetrack {

/// Tracking quality against ground truth. Percentages are in [0, 100].
struct EvalReport {
    std::size_t n_truth_tracks = 0;
    std::size_t n_truth_detections = 0;
    std::size_t n_predicted_tracks = 0;

    double pct_incorrect_detection_ids = 0.0;
    double pct_incorrect_track_ids = 0.0;
    double pct_complete_tracks = 0.0;
    /// Complete tracks among truth tracks whose gaps all fit the gap limit.
    double pct_complete_tracks_within_gap = 0.0;
    double pct_detections_deleted = 0.0;
    double pct_tracks_with_deletion = 0.0;

    std::size_t n_complete_tracks = 0;
    std::size_t n_truth_tracks_within_gap = 0;
    std::size_t n_deletions = 0;
    std::size_t n_insertions = 0;
    std::size_t n_mismatches = 0;

    /// Predicted track duration (last - first + 1 frames) -> count.
    std::map<std::int64_t, std::size_t> track_length_histogram;
    /// Gap between consecutive truth detections (frames - 1) -> count.
    std::map<std::int64_t, std::size_t> gap_histogram;
    double mean_track_length_frames = 0.0;
    double detection_weighted_mean_track_length_frames = 0.0;
};

/// For each truth track, the index of the predicted track holding the
/// plurality of its detections (ties go to the earliest-starting track);
/// empty when none of its detections were predicted.
std::vector<std::optional<std::size_t>> match_tracks(std::span<const Track> predicted,
                                                     std::span<const GroundTruthTrack> truth);

/// Compares predicted tracks with ground truth.
///
/// A predicted track's reference truth track is, among the truth tracks
/// matched to it, the one contributing most detections. Deletions are truth
/// detections missing from their matched track; insertions are detections of
/// a matched predicted track that do not belong to its reference; a
/// mismatch is an insertion at a frame where the reference had its own
/// detection. Tracks without assigned_id get one from their detections.
/// Throws InvalidInput on empty truth.
EvalReport evaluate(std::span<const Track> predicted, std::span<const GroundTruthTrack> truth,
                    int max_gap_frames = kDefaultMaxGapFrames);

/// Histogram of gaps between consecutive detections of each truth track.
std::map<std::int64_t, std::size_t> truth_gap_histogram(std::span<const GroundTruthTrack> truth);

/// Truth tracks reinterpreted as a prediction: the "perfect tracking" row.
std::vector<Track> truth_as_tracks(std::span<const GroundTruthTrack> truth);

std::string report_to_json(const EvalReport& report);
/// Aligned text table; one column per named report.
std::string reports_to_table(std::span<const std::pair<std::string, EvalReport>> columns);

} // namespace beetrack
