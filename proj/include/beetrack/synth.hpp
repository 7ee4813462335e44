#pragma once

#include "beetrack/core.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace beetrack {

struct MotionConfig {
    /// Mean step length per frame; steps are exponentially distributed.
    double speed_mean_px = 6.0;
    /// Heading change per frame (correlated random walk).
    double turn_sd_rad = 0.4;
};

/// Synthetic hive recording.
///
/// Bit-noise defaults give a hard-decode error rate near 13% (see
/// expected_decode_error); detection defaults leave about 98% of
/// consecutive truth detections without a gap.
struct SynthConfig {
    int n_bees = 100;
    double width_px = 3000.0;
    double height_px = 2000.0;
    double fps = 3.0;
    double duration_s = 120.0;
    double detect_prob = 0.98;
    /// Per-frame probability of starting an absence interval.
    double long_gap_rate = 0.002;
    double absence_mean_frames = 20.0;
    double bit_flip_prob = 0.0055;
    double bit_noise_sd = 0.2;
    /// Fraction of all emitted detections that are spurious.
    double false_positive_rate = 0.0123;
    MotionConfig motion;
    double orientation_noise_sd = 0.05;
    double position_noise_sd = 1.0;
    /// Mean length of a bee's stay in view, in frames; 0 keeps every bee in
    /// view for the whole recording.
    double mean_visit_frames = 0.0;
    std::uint64_t seed = 0;

    std::int64_t n_frames() const;
    /// Throws InvalidInput on out-of-range fields.
    void validate() const;
};

struct SynthDataset {
    /// One track per bee that was detected at least once, in bee order.
    std::vector<GroundTruthTrack> truth;
    /// All detections, ordered by frame, then bee, with false positives last
    /// in each frame; detection ids count up from 0 in that order.
    std::vector<Detection> detections;
};

SynthDataset generate(const SynthConfig& config);

/// Independent per-bit flip with `flip_prob`, then additive Gaussian noise,
/// clipped to [0, 1].
BitProbs corrupt_bits(const BitProbs& bits, double flip_prob, double noise_sd, std::mt19937_64& rng);

/// Probability that one corrupted bit lands on the wrong side of 0.5.
double expected_bit_error(double flip_prob, double noise_sd);
/// Probability that a detection hard-decodes to the wrong 12-bit ID.
double expected_decode_error(double flip_prob, double noise_sd);

} // namespace beetrack
