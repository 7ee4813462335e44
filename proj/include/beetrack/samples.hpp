#pragma once

#include "beetrack/core.hpp"
#include "beetrack/features.hpp"
#include "beetrack/linear_model.hpp"

#include <span>
#include <vector>

namespace beetrack {

/// Every pair of truth detections in consecutive frames within `radius_px`
/// of each other, labelled by whether both belong to the same truth track.
/// Features are step1_features(earlier, later).
std::vector<LabeledSample> make_step1_samples(std::span<const GroundTruthTrack> truth,
                                              double radius_px = kDefaultGateRadiusPx);

/// Fragment pairs for the merge classifier.
///
/// Positives: every truth track split once at each distinct time step
/// (prefix, suffix), plus every contiguous sub-track of 2 or 3 detections
/// split at each interior position. Negatives: for every ordered pair of
/// truth tracks (A, B) with different true IDs and every time step t, the part of A before
/// t paired with the part of B from t on. Pairs whose gap exceeds `max_gap`
/// are skipped, as are identical (prefix, suffix) pairs from different t.
std::vector<LabeledSample> make_step2_samples(std::span<const GroundTruthTrack> truth,
                                              int max_gap = kDefaultMaxGapFrames);

double positive_fraction(std::span<const LabeledSample> samples);

} // namespace beetrack
