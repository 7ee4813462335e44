#pragma once

#include "beetrack/core.hpp"
#include "beetrack/features.hpp"
#include "beetrack/forest.hpp"
#include "beetrack/linear_model.hpp"

#include <functional>
#include <span>
#include <vector>

namespace beetrack {

struct TrackerConfig {
    double gate_radius_px = kDefaultGateRadiusPx;
    double accept_threshold = 0.5;
    int max_gap_frames = kDefaultMaxGapFrames;

    /// Throws InvalidInput if any field is out of range.
    void validate() const;
};

/// Probability that `to` (next frame) continues the tracklet ending in `from`.
using Step1Scorer = std::function<double(const Detection& from, const Detection& to)>;
/// Probability that `candidate` continues `track`.
using Step2Scorer = std::function<double(const FragmentSummary& track, const FragmentSummary& candidate)>;

Step1Scorer make_step1_scorer(const LinearModel& model);
Step2Scorer make_step2_scorer(const ForestModel& model, int max_gap = kDefaultMaxGapFrames);

/// Frame-by-frame linking of consecutive detections into gap-free tracklets.
///
/// Each frame, every open tracklet is scored against the gated detections of
/// the next frame and the Hungarian assignment picks the links; links below
/// the accept threshold are rejected. Tracklets without an accepted link are
/// closed and unlinked detections open new tracklets. Input order does not
/// matter; duplicate detection ids throw InvalidInput. Tracklets come back
/// ordered by (first frame, first detection id) and numbered from 0.
std::vector<Tracklet> track_step1(std::span<const Detection> detections, const Step1Scorer& scorer,
                                  const TrackerConfig& config = {});
std::vector<Tracklet> track_step1(std::span<const Detection> detections, const LinearModel& model,
                                  const TrackerConfig& config = {});

/// Merges tracklets into tracks with gaps of at most `max_gap_frames`.
///
/// Sweeps tracklet start frames in order. At frame t the candidates are the
/// tracklets starting at t and the open tracks are those whose last frame f
/// satisfies 0 <= t - f - 1 <= max_gap; the assignment between them decides
/// the merges, and unmerged candidates start new tracks. `assigned_id` is
/// left unset (see assign_ids).
std::vector<Track> track_step2(std::span<const Tracklet> tracklets, const Step2Scorer& scorer,
                               const TrackerConfig& config = {});
std::vector<Track> track_step2(std::span<const Tracklet> tracklets, const ForestModel& model,
                               const TrackerConfig& config = {});

/// Links detections purely by their hard-decoded IDs.
///
/// Per decoded ID one main track is extended while gaps stay within
/// max_gap_frames. When a frame holds several detections with that ID, the
/// one nearest to the main track's last position extends it and each other
/// one becomes a single-detection track. IDs are assigned.
std::vector<Track> track_baseline(std::span<const Detection> detections, const TrackerConfig& config = {});

/// Wraps each tracklet in its own track (used to score step-1 output).
std::vector<Track> tracklets_as_tracks(std::span<const Tracklet> tracklets);

/// Sets assigned_id on every track from the bitwise median of its detections.
void assign_ids(std::vector<Track>& tracks);

/// Sorts by (first frame, first detection id) and renumbers track ids.
void canonicalize(std::vector<Track>& tracks);

} // namespace beetrack
