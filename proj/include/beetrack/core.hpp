#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace beetrack {

inline constexpr std::size_t kNumBits = 12;
inline constexpr int kMaxId = (1 << kNumBits) - 1;

using BitProbs = std::array<double, kNumBits>;
using DetectionId = std::uint64_t;

/// One decoded marker observation.
///
/// `bits[0]` is the most significant bit of the marker ID. `frame_index` is
/// the authoritative time axis; `timestamp` is carried along as metadata.
struct Detection {
    DetectionId detection_id = 0;
    std::int64_t frame_index = 0;
    double timestamp = 0.0;
    int cam_id = 0;
    double x_px = 0.0;
    double y_px = 0.0;
    double orientation_rad = 0.0;
    BitProbs bits{};

    bool operator==(const Detection&) const = default;
};

/// Gap-free run of detections (consecutive frame indices).
struct Tracklet {
    std::uint64_t tracklet_id = 0;
    std::vector<Detection> detections;

    std::int64_t first_frame() const { return detections.front().frame_index; }
    std::int64_t last_frame() const { return detections.back().frame_index; }
};

/// Time-ordered tracklets that may be separated by gaps.
struct Track {
    std::uint64_t track_id = 0;
    std::vector<Tracklet> tracklets;
    std::optional<int> assigned_id;

    std::int64_t first_frame() const { return tracklets.front().first_frame(); }
    std::int64_t last_frame() const { return tracklets.back().last_frame(); }
    std::size_t size() const;
    /// All detections in time order.
    std::vector<Detection> detections() const;
};

struct GroundTruthTrack {
    int true_id = 0;
    std::vector<Detection> detections;
};

/// Wraps an angle into [-pi, pi).
double normalize_angle(double rad);

/// Hard decode at threshold 0.5 (inclusive), bits[0] most significant.
int binarize_bits(std::span<const double> bits);

/// Per-bit median; even counts use the mean of the two central values.
BitProbs bitwise_median(std::span<const Detection> detections);

int assign_track_id(const Track& track);
int assign_track_id(std::span<const Detection> detections);

/// Smallest absolute angle between two orientations, in [0, pi].
double angular_difference(double a, double b);

double manhattan_bits(std::span<const double> a, std::span<const double> b);

/// The 12 bits of `id`, MSB first, as exact 0/1 probabilities.
BitProbs id_to_bits(int id);

/// Throws InvalidInput if `d` violates the Detection invariants.
void validate_detection(const Detection& d);

/// Splits time-ordered detections into gap-free runs.
std::vector<Tracklet> split_into_tracklets(std::span<const Detection> detections);

} // namespace beetrack
