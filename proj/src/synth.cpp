#include "beetrack/synth.hpp"

#include "beetrack/errors.hpp"
#include "beetrack/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace beetrack {

std::int64_t SynthConfig::n_frames() const {
    return static_cast<std::int64_t>(std::llround(duration_s * fps));
}

void SynthConfig::validate() const {
    auto prob = [](double p, const char* name) {
        if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput(std::string("synth config: ") + name + " must lie in [0, 1]");
    };
    if (n_bees <= 0) throw InvalidInput("synth config: n_bees must be positive");
    if (n_bees > kMaxId + 1) throw InvalidInput("synth config: more bees than distinct 12-bit IDs");
    if (!(duration_s > 0.0) || !(fps > 0.0) || n_frames() <= 0)
        throw InvalidInput("synth config: duration and fps must be positive");
    if (!(width_px > 0.0) || !(height_px > 0.0)) throw InvalidInput("synth config: comb size must be positive");
    prob(detect_prob, "detect_prob");
    prob(long_gap_rate, "long_gap_rate");
    prob(bit_flip_prob, "bit_flip_prob");
    if (!(false_positive_rate >= 0.0 && false_positive_rate < 1.0))
        throw InvalidInput("synth config: false_positive_rate must lie in [0, 1)");
    if (!(absence_mean_frames >= 1.0)) throw InvalidInput("synth config: absence_mean_frames must be >= 1");
    if (!(bit_noise_sd >= 0.0) || !(orientation_noise_sd >= 0.0) || !(position_noise_sd >= 0.0))
        throw InvalidInput("synth config: noise levels must be non-negative");
    if (!(motion.speed_mean_px >= 0.0) || !(motion.turn_sd_rad >= 0.0))
        throw InvalidInput("synth config: motion parameters must be non-negative");
    if (!(mean_visit_frames >= 0.0)) throw InvalidInput("synth config: mean_visit_frames must be non-negative");
}

BitProbs corrupt_bits(const BitProbs& bits, double flip_prob, double noise_sd, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, noise_sd > 0.0 ? noise_sd : 1.0);
    BitProbs out{};
    for (std::size_t i = 0; i < kNumBits; ++i) {
        double v = bits[i];
        if (unit(rng) < flip_prob) v = 1.0 - v;
        if (noise_sd > 0.0) v += noise(rng);
        out[i] = std::clamp(v, 0.0, 1.0);
    }
    return out;
}

double expected_bit_error(double flip_prob, double noise_sd) {
    // P(N(0, sd) pushes a clean 0/1 value across 0.5)
    const double cross = noise_sd > 0.0 ? 0.5 * std::erfc(0.5 / (noise_sd * std::numbers::sqrt2)) : 0.0;
    return flip_prob * (1.0 - cross) + (1.0 - flip_prob) * cross;
}

double expected_decode_error(double flip_prob, double noise_sd) {
    return 1.0 - std::pow(1.0 - expected_bit_error(flip_prob, noise_sd), static_cast<double>(kNumBits));
}

namespace {

struct BeeDetection {
    Detection detection;
    std::size_t bee;
};

// Visible interval [begin, end) of one bee.
std::pair<std::int64_t, std::int64_t> visit_window(const SynthConfig& cfg, std::int64_t frames, std::mt19937_64& rng) {
    if (cfg.mean_visit_frames <= 0.0) return {0, frames};
    std::exponential_distribution<double> length_dist(1.0 / cfg.mean_visit_frames);
    const auto length = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(length_dist(rng))));
    std::uniform_int_distribution<std::int64_t> start_dist(-length + 1, frames - 1);
    const auto start = start_dist(rng);
    return {std::max<std::int64_t>(0, start), std::min(frames, start + length)};
}

void reflect(double& pos, double& heading_component, double limit) {
    if (pos < 0.0) {
        pos = -pos;
        heading_component = -heading_component;
    }
    if (pos > limit) {
        pos = 2.0 * limit - pos;
        heading_component = -heading_component;
    }
    pos = std::clamp(pos, 0.0, limit);
}

std::vector<BeeDetection> simulate_bee(const SynthConfig& cfg, std::size_t bee, int true_id, std::int64_t frames) {
    std::mt19937_64 rng(mix_seed(cfg.seed, bee + 1));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> std_normal(0.0, 1.0);
    std::exponential_distribution<double> step(cfg.motion.speed_mean_px > 0.0 ? 1.0 / cfg.motion.speed_mean_px : 1.0);
    std::exponential_distribution<double> absence(1.0 / cfg.absence_mean_frames);

    const auto [visit_begin, visit_end] = visit_window(cfg, frames, rng);
    double x = unit(rng) * cfg.width_px;
    double y = unit(rng) * cfg.height_px;
    double heading = (unit(rng) * 2.0 - 1.0) * std::numbers::pi;
    const BitProbs clean = id_to_bits(true_id);

    std::vector<BeeDetection> out;
    std::int64_t absent_until = -1;
    for (std::int64_t f = 0; f < frames; ++f) {
        if (f > 0) {
            heading += cfg.motion.turn_sd_rad * std_normal(rng);
            const double len = cfg.motion.speed_mean_px > 0.0 ? step(rng) : 0.0;
            double dx = std::cos(heading), dy = std::sin(heading);
            x += len * dx;
            y += len * dy;
            reflect(x, dx, cfg.width_px);
            reflect(y, dy, cfg.height_px);
            heading = std::atan2(dy, dx);
        }
        // Draw every random quantity each frame so the stream does not
        // depend on visibility.
        const bool start_absence = unit(rng) < cfg.long_gap_rate;
        const auto absence_len = static_cast<std::int64_t>(std::ceil(absence(rng)));
        const bool detected = unit(rng) < cfg.detect_prob;
        const double ox = cfg.position_noise_sd * std_normal(rng);
        const double oy = cfg.position_noise_sd * std_normal(rng);
        const double otheta = cfg.orientation_noise_sd * std_normal(rng);
        const BitProbs bits = corrupt_bits(clean, cfg.bit_flip_prob, cfg.bit_noise_sd, rng);

        if (f < visit_begin || f >= visit_end) continue;
        if (f < absent_until) continue;
        if (start_absence) {
            absent_until = f + std::max<std::int64_t>(1, absence_len);
            continue;
        }
        if (!detected) continue;

        Detection d;
        d.frame_index = f;
        d.timestamp = static_cast<double>(f) / cfg.fps;
        d.x_px = std::clamp(x + ox, 0.0, cfg.width_px);
        d.y_px = std::clamp(y + oy, 0.0, cfg.height_px);
        d.orientation_rad = normalize_angle(heading + otheta);
        d.bits = bits;
        out.push_back({d, bee});
    }
    return out;
}

} // namespace

SynthDataset generate(const SynthConfig& cfg) {
    cfg.validate();
    const auto frames = cfg.n_frames();

    std::mt19937_64 id_rng(mix_seed(cfg.seed, 0));
    std::vector<int> ids(kMaxId + 1);
    std::iota(ids.begin(), ids.end(), 0);
    std::shuffle(ids.begin(), ids.end(), id_rng);
    ids.resize(static_cast<std::size_t>(cfg.n_bees));

    std::vector<BeeDetection> all;
    for (std::size_t bee = 0; bee < ids.size(); ++bee) {
        auto dets = simulate_bee(cfg, bee, ids[bee], frames);
        all.insert(all.end(), dets.begin(), dets.end());
    }

    const std::size_t n_true = all.size();
    const auto n_false = static_cast<std::size_t>(
        std::llround(cfg.false_positive_rate / (1.0 - cfg.false_positive_rate) * static_cast<double>(n_true)));
    const std::size_t fp_marker = ids.size();
    {
        std::mt19937_64 rng(mix_seed(cfg.seed, ids.size() + 1));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::uniform_int_distribution<std::int64_t> frame_dist(0, frames - 1);
        for (std::size_t i = 0; i < n_false; ++i) {
            Detection d;
            d.frame_index = frame_dist(rng);
            d.timestamp = static_cast<double>(d.frame_index) / cfg.fps;
            d.x_px = unit(rng) * cfg.width_px;
            d.y_px = unit(rng) * cfg.height_px;
            d.orientation_rad = normalize_angle((unit(rng) * 2.0 - 1.0) * std::numbers::pi);
            for (auto& b : d.bits) b = unit(rng);
            all.push_back({d, fp_marker});
        }
    }

    std::stable_sort(all.begin(), all.end(), [](const BeeDetection& a, const BeeDetection& b) {
        if (a.detection.frame_index != b.detection.frame_index) return a.detection.frame_index < b.detection.frame_index;
        return a.bee < b.bee;
    });

    SynthDataset out;
    out.detections.reserve(all.size());
    std::vector<GroundTruthTrack> per_bee(ids.size());
    for (std::size_t bee = 0; bee < ids.size(); ++bee) per_bee[bee].true_id = ids[bee];
    for (std::size_t i = 0; i < all.size(); ++i) {
        all[i].detection.detection_id = i;
        out.detections.push_back(all[i].detection);
        if (all[i].bee != fp_marker) per_bee[all[i].bee].detections.push_back(all[i].detection);
    }
    for (auto& t : per_bee)
        if (!t.detections.empty()) out.truth.push_back(std::move(t));
    return out;
}

} // namespace beetrack
