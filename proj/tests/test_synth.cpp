#include <doctest.h>

#include "beetrack/errors.hpp"
#include "beetrack/evaluation.hpp"
#include "beetrack/synth.hpp"
#include "oracles.hpp"

#include <numbers>
#include <set>

using namespace beetrack;

namespace {

double decode_error(const SynthDataset& data) {
    std::size_t wrong = 0, total = 0;
    for (const auto& t : data.truth)
        for (const auto& d : t.detections) {
            ++total;
            if (binarize_bits(d.bits) != t.true_id) ++wrong;
        }
    return static_cast<double>(wrong) / static_cast<double>(total);
}

} // namespace

TEST_CASE("corrupt_bits") {
    std::mt19937_64 rng(1);
    const auto bits = id_to_bits(1234);
    CHECK(corrupt_bits(bits, 0.0, 0.0, rng) == bits);
    CHECK(corrupt_bits(oracle::uniform_bits(1.0), 1.0, 0.0, rng) == oracle::uniform_bits(0.0));
    for (int i = 0; i < 1000; ++i)
        for (double v : corrupt_bits(bits, 0.1, 0.5, rng)) {
            REQUIRE(v >= 0.0);
            REQUIRE(v <= 1.0);
        }
}

TEST_CASE("expected error rates") {
    CHECK(expected_bit_error(0.0, 0.0) == 0.0);
    CHECK(expected_bit_error(0.15, 0.0) == doctest::Approx(0.15));
    CHECK(expected_decode_error(0.15, 0.0) == doctest::Approx(1.0 - std::pow(0.85, 12)));
    const double calibrated = expected_decode_error(SynthConfig{}.bit_flip_prob, SynthConfig{}.bit_noise_sd);
    CHECK(calibrated > 0.11);
    CHECK(calibrated < 0.16);
}

TEST_CASE("noiseless data decodes perfectly") {
    SynthConfig cfg;
    cfg.n_bees = 20;
    cfg.duration_s = 20;
    cfg.bit_flip_prob = 0.0;
    cfg.bit_noise_sd = 0.0;
    cfg.detect_prob = 1.0;
    cfg.long_gap_rate = 0.0;
    cfg.false_positive_rate = 0.0;
    const auto data = generate(cfg);
    CHECK(decode_error(data) == 0.0);
    CHECK(data.truth.size() == 20);
    for (const auto& t : data.truth) CHECK(t.detections.size() == static_cast<std::size_t>(cfg.n_frames()));
}

TEST_CASE("default calibration: decode error near 13%") {
    SynthConfig cfg;  // 100 bees, 2 min at 3 fps
    const auto data = generate(cfg);
    const double err = decode_error(data);
    CHECK(err > 0.11);
    CHECK(err < 0.16);
}

TEST_CASE("measured decode error converges to the analytic rate") {
    SynthConfig cfg;
    cfg.n_bees = 200;
    cfg.duration_s = 180;  // 540 frames, about 1e5 detections
    cfg.seed = 9;
    const auto data = generate(cfg);
    std::size_t n = 0;
    for (const auto& t : data.truth) n += t.detections.size();
    CHECK(n >= 100000);
    CHECK(std::abs(decode_error(data) - expected_decode_error(cfg.bit_flip_prob, cfg.bit_noise_sd)) < 0.015);
}

TEST_CASE("most consecutive detections have no gap") {
    SynthConfig cfg;
    const auto data = generate(cfg);
    const auto hist = truth_gap_histogram(data.truth);
    std::size_t total = 0;
    for (const auto& [gap, count] : hist) total += count;
    CHECK(static_cast<double>(hist.at(0)) / static_cast<double>(total) >= 0.95);
}

TEST_CASE("structure: partition, bounds, ordering, false positives") {
    SynthConfig cfg;
    cfg.n_bees = 40;
    cfg.duration_s = 60;
    cfg.width_px = 500;
    cfg.height_px = 400;
    cfg.mean_visit_frames = 50;
    cfg.false_positive_rate = 0.05;
    cfg.seed = 4;
    const auto data = generate(cfg);

    std::set<int> ids;
    std::set<DetectionId> in_truth;
    std::size_t n_true = 0;
    for (const auto& t : data.truth) {
        REQUIRE(ids.insert(t.true_id).second);
        REQUIRE(t.true_id >= 0);
        REQUIRE(t.true_id <= kMaxId);
        for (std::size_t i = 0; i < t.detections.size(); ++i) {
            REQUIRE(in_truth.insert(t.detections[i].detection_id).second);
            if (i > 0) REQUIRE(t.detections[i].frame_index > t.detections[i - 1].frame_index);
        }
        n_true += t.detections.size();
    }
    const std::size_t n_false = data.detections.size() - n_true;
    CHECK(n_false == static_cast<std::size_t>(std::llround(0.05 / 0.95 * static_cast<double>(n_true))));

    for (std::size_t i = 0; i < data.detections.size(); ++i) {
        const auto& d = data.detections[i];
        REQUIRE(d.detection_id == i);
        REQUIRE_NOTHROW(validate_detection(d));
        REQUIRE(d.x_px >= 0.0);
        REQUIRE(d.x_px <= cfg.width_px);
        REQUIRE(d.y_px >= 0.0);
        REQUIRE(d.y_px <= cfg.height_px);
        REQUIRE(d.orientation_rad >= -std::numbers::pi);
        REQUIRE(d.orientation_rad < std::numbers::pi);
        REQUIRE(d.frame_index < cfg.n_frames());
        if (i > 0) REQUIRE(d.frame_index >= data.detections[i - 1].frame_index);
    }
}

TEST_CASE("deterministic under seed") {
    SynthConfig cfg;
    cfg.n_bees = 15;
    cfg.duration_s = 30;
    cfg.seed = 77;
    const auto a = generate(cfg), b = generate(cfg);
    CHECK(a.detections == b.detections);
    cfg.seed = 78;
    CHECK(generate(cfg).detections != a.detections);
}

TEST_CASE("invalid configurations") {
    SynthConfig cfg;
    cfg.n_bees = 0;
    CHECK_THROWS_AS(generate(cfg), InvalidInput);
    cfg = {};
    cfg.duration_s = 0;
    CHECK_THROWS_AS(generate(cfg), InvalidInput);
    cfg = {};
    cfg.detect_prob = 1.5;
    CHECK_THROWS_AS(generate(cfg), InvalidInput);
    cfg = {};
    cfg.false_positive_rate = 1.0;
    CHECK_THROWS_AS(generate(cfg), InvalidInput);
    cfg = {};
    cfg.width_px = -1;
    CHECK_THROWS_AS(generate(cfg), InvalidInput);
}
