#include "beetrack/core.hpp"

#include "beetrack/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace beetrack {

std::size_t Track::size() const {
    std::size_t n = 0;
    for (const auto& t : tracklets) n += t.detections.size();
    return n;
}

std::vector<Detection> Track::detections() const {
    std::vector<Detection> out;
    out.reserve(size());
    for (const auto& t : tracklets) out.insert(out.end(), t.detections.begin(), t.detections.end());
    return out;
}

double normalize_angle(double rad) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    // In-range values pass through untouched so a file round trip is exact.
    if (rad >= -std::numbers::pi && rad < std::numbers::pi) return rad;
    double r = std::fmod(rad + std::numbers::pi, two_pi);
    if (r < 0.0) r += two_pi;
    // fmod + shift can round up to exactly 2*pi
    if (r >= two_pi) r = 0.0;
    return r - std::numbers::pi;
}

int binarize_bits(std::span<const double> bits) {
    if (bits.size() != kNumBits)
        throw InvalidInput("binarize_bits: expected 12 bits, got " + std::to_string(bits.size()));
    int id = 0;
    for (double b : bits) id = (id << 1) | (b >= 0.5 ? 1 : 0);
    return id;
}

BitProbs bitwise_median(std::span<const Detection> detections) {
    if (detections.empty()) throw InvalidInput("bitwise_median: empty detection list");
    BitProbs out{};
    const std::size_t n = detections.size();
    std::vector<double> column(n);
    for (std::size_t bit = 0; bit < kNumBits; ++bit) {
        for (std::size_t i = 0; i < n; ++i) column[i] = detections[i].bits[bit];
        const auto mid = column.begin() + static_cast<std::ptrdiff_t>(n / 2);
        std::nth_element(column.begin(), mid, column.end());
        double upper = *mid;
        if (n % 2 == 1) {
            out[bit] = upper;
        } else {
            double lower = *std::max_element(column.begin(), mid);
            out[bit] = 0.5 * (lower + upper);
        }
    }
    return out;
}

int assign_track_id(std::span<const Detection> detections) {
    if (detections.empty()) throw InvalidInput("assign_track_id: track has no detections");
    return binarize_bits(bitwise_median(detections));
}

int assign_track_id(const Track& track) {
    const auto all = track.detections();
    return assign_track_id(std::span<const Detection>(all));
}

double angular_difference(double a, double b) {
    return std::abs(normalize_angle(a - b));
}

double manhattan_bits(std::span<const double> a, std::span<const double> b) {
    if (a.size() != kNumBits || b.size() != kNumBits)
        throw InvalidInput("manhattan_bits: both vectors must have 12 entries");
    double sum = 0.0;
    for (std::size_t i = 0; i < kNumBits; ++i) sum += std::abs(a[i] - b[i]);
    return sum;
}

BitProbs id_to_bits(int id) {
    if (id < 0 || id > kMaxId) throw InvalidInput("id_to_bits: id out of range: " + std::to_string(id));
    BitProbs bits{};
    for (std::size_t i = 0; i < kNumBits; ++i)
        bits[i] = ((id >> (kNumBits - 1 - i)) & 1) ? 1.0 : 0.0;
    return bits;
}

void validate_detection(const Detection& d) {
    for (double b : d.bits) {
        if (!(b >= 0.0 && b <= 1.0))
            throw InvalidInput("detection " + std::to_string(d.detection_id) + ": bit probability outside [0,1]");
    }
    if (!std::isfinite(d.x_px) || !std::isfinite(d.y_px) || !std::isfinite(d.orientation_rad))
        throw InvalidInput("detection " + std::to_string(d.detection_id) + ": non-finite geometry");
    if (d.frame_index < 0)
        throw InvalidInput("detection " + std::to_string(d.detection_id) + ": negative frame index");
}

std::vector<Tracklet> split_into_tracklets(std::span<const Detection> detections) {
    std::vector<Tracklet> out;
    for (const auto& d : detections) {
        if (out.empty() || d.frame_index != out.back().last_frame() + 1) out.emplace_back();
        out.back().detections.push_back(d);
    }
    return out;
}

} // namespace beetrack
