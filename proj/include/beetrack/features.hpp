#pragma once

#include "beetrack/core.hpp"

#include <array>
#include <span>
#include <vector>

namespace beetrack {

inline constexpr double kDefaultGateRadiusPx = 200.0;
inline constexpr int kDefaultMaxGapFrames = 14;

struct Step1Features {
    double euclidean_px = 0.0;
    double angle_diff_rad = 0.0;
    double id_manhattan = 0.0;

    static constexpr std::size_t size = 3;
    std::array<double, size> as_array() const { return {euclidean_px, angle_diff_rad, id_manhattan}; }
};

struct Step2Features {
    double id_manhattan_avg = 0.0;
    double euclidean_px = 0.0;
    double forward_error_px = 0.0;
    double backward_error_px = 0.0;
    double angle_diff_rad = 0.0;
    double confidence_diff = 0.0;

    static constexpr std::size_t size = 6;
    std::array<double, size> as_array() const {
        return {id_manhattan_avg, euclidean_px, forward_error_px, backward_error_px, angle_diff_rad, confidence_diff};
    }
};

/// Requires b.frame_index == a.frame_index + 1.
Step1Features step1_features(const Detection& a, const Detection& b);

/// Detections of `frame` within `radius_px` (inclusive) of `a`.
std::vector<Detection> gate_candidates(const Detection& a, std::span<const Detection> frame,
                                       double radius_px = kDefaultGateRadiusPx);

/// Boundary state of a detection sequence: what the step-2 features need
/// from either side of a candidate merge.
struct FragmentSummary {
    Detection first;
    Detection last;
    /// Per-frame motion at each end; zero for single-detection fragments.
    double head_vx = 0.0, head_vy = 0.0;
    double tail_vx = 0.0, tail_vy = 0.0;
    BitProbs median_bits{};
    /// |b - 0.5| for the median bit closest to 0.5.
    double confidence = 0.0;
};

/// Summarizes a non-empty, strictly time-ordered detection sequence.
/// Motion vectors are displacement divided by frame distance, so fragments
/// with internal gaps still yield a per-frame velocity.
FragmentSummary summarize_fragment(std::span<const Detection> detections);

/// Median-bit confidence: distance to 0.5 of the least certain bit.
double bit_confidence(const BitProbs& median_bits);

/// Features for merging `earlier` (ending first) with `later`.
/// Throws InvalidInput unless 0 <= gap <= max_gap, where
/// gap = later.first - earlier.last - 1.
Step2Features step2_features(const FragmentSummary& earlier, const FragmentSummary& later,
                             int max_gap = kDefaultMaxGapFrames);
Step2Features step2_features(const Tracklet& earlier, const Tracklet& later,
                             int max_gap = kDefaultMaxGapFrames);

} // namespace beetrack
