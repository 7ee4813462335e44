#include "beetrack/features.hpp"

#include "beetrack/errors.hpp"

#include <cmath>
#include <string>

namespace beetrack {
namespace {

double distance(double ax, double ay, double bx, double by) {
    return std::hypot(bx - ax, by - ay);
}

} // namespace

Step1Features step1_features(const Detection& a, const Detection& b) {
    if (b.frame_index != a.frame_index + 1)
        throw InvalidInput("step1_features: detections must be in consecutive frames (got " +
                           std::to_string(a.frame_index) + " and " + std::to_string(b.frame_index) + ")");
    return {
        .euclidean_px = distance(a.x_px, a.y_px, b.x_px, b.y_px),
        .angle_diff_rad = angular_difference(a.orientation_rad, b.orientation_rad),
        .id_manhattan = manhattan_bits(a.bits, b.bits),
    };
}

std::vector<Detection> gate_candidates(const Detection& a, std::span<const Detection> frame, double radius_px) {
    if (!(radius_px > 0.0)) throw InvalidInput("gate_candidates: radius must be positive");
    std::vector<Detection> out;
    for (const auto& d : frame)
        if (distance(a.x_px, a.y_px, d.x_px, d.y_px) <= radius_px) out.push_back(d);
    return out;
}

double bit_confidence(const BitProbs& median_bits) {
    double best = 0.5;
    for (double b : median_bits) best = std::min(best, std::abs(b - 0.5));
    return best;
}

FragmentSummary summarize_fragment(std::span<const Detection> detections) {
    if (detections.empty()) throw InvalidInput("summarize_fragment: empty fragment");
    FragmentSummary s;
    s.first = detections.front();
    s.last = detections.back();
    if (detections.size() >= 2) {
        const auto& a = detections[0];
        const auto& b = detections[1];
        const double dt = static_cast<double>(b.frame_index - a.frame_index);
        s.head_vx = (b.x_px - a.x_px) / dt;
        s.head_vy = (b.y_px - a.y_px) / dt;
        const auto& c = detections[detections.size() - 2];
        const auto& d = detections[detections.size() - 1];
        const double dt2 = static_cast<double>(d.frame_index - c.frame_index);
        s.tail_vx = (d.x_px - c.x_px) / dt2;
        s.tail_vy = (d.y_px - c.y_px) / dt2;
    }
    s.median_bits = bitwise_median(detections);
    s.confidence = bit_confidence(s.median_bits);
    return s;
}

Step2Features step2_features(const FragmentSummary& earlier, const FragmentSummary& later, int max_gap) {
    const std::int64_t gap = later.first.frame_index - earlier.last.frame_index - 1;
    if (gap < 0)
        throw InvalidInput("step2_features: fragments overlap or are out of order");
    if (gap > max_gap)
        throw InvalidInput("step2_features: gap of " + std::to_string(gap) + " frames exceeds maximum " +
                           std::to_string(max_gap));
    const double steps = static_cast<double>(gap + 1);
    const auto& e = earlier.last;
    const auto& l = later.first;

    const double fwd_x = e.x_px + earlier.tail_vx * steps;
    const double fwd_y = e.y_px + earlier.tail_vy * steps;
    const double bwd_x = l.x_px - later.head_vx * steps;
    const double bwd_y = l.y_px - later.head_vy * steps;

    return {
        .id_manhattan_avg = manhattan_bits(earlier.median_bits, later.median_bits),
        .euclidean_px = distance(e.x_px, e.y_px, l.x_px, l.y_px),
        .forward_error_px = distance(fwd_x, fwd_y, l.x_px, l.y_px),
        .backward_error_px = distance(bwd_x, bwd_y, e.x_px, e.y_px),
        .angle_diff_rad = angular_difference(e.orientation_rad, l.orientation_rad),
        .confidence_diff = std::abs(earlier.confidence - later.confidence),
    };
}

Step2Features step2_features(const Tracklet& earlier, const Tracklet& later, int max_gap) {
    return step2_features(summarize_fragment(earlier.detections), summarize_fragment(later.detections), max_gap);
}

} // namespace beetrack
