#include <doctest.h>

#include "beetrack/errors.hpp"
#include "beetrack/features.hpp"
#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace beetrack;
using oracle::detection;
using oracle::uniform_bits;

namespace {

Tracklet line(std::uint64_t first_id, std::int64_t first_frame, std::vector<std::pair<double, double>> points,
              double bit = 0.9) {
    Tracklet t;
    t.tracklet_id = first_id;
    for (std::size_t i = 0; i < points.size(); ++i)
        t.detections.push_back(detection(first_id + i, first_frame + static_cast<std::int64_t>(i), points[i].first,
                                         points[i].second, 0.0, uniform_bits(bit)));
    return t;
}

} // namespace

TEST_CASE("step1_features worked examples") {
    const auto a = detection(0, 5, 10, 20, 0.3, uniform_bits(0.7));
    auto b = a;
    b.detection_id = 1;
    b.frame_index = 6;
    const auto same = step1_features(a, b);
    CHECK(same.euclidean_px == 0.0);
    CHECK(same.angle_diff_rad == 0.0);
    CHECK(same.id_manhattan == 0.0);

    const auto p = detection(0, 0, 0, 0);
    const auto q = detection(1, 1, 3, 4);
    CHECK(std::abs(step1_features(p, q).euclidean_px - 5.0) < 1e-9);

    const auto ones = detection(0, 0, 0, 0, 0, uniform_bits(1.0));
    const auto zeros = detection(1, 1, 0, 0, 0, uniform_bits(0.0));
    CHECK(step1_features(ones, zeros).id_manhattan == 12.0);

    CHECK_THROWS_AS(step1_features(p, detection(2, 2, 0, 0)), InvalidInput);
    CHECK_THROWS_AS(step1_features(q, p), InvalidInput);
}

TEST_CASE("step1_features ranges") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0), pos(-500, 500), ang(-7, 7);
    for (int i = 0; i < 2000; ++i) {
        BitProbs ba, bb;
        for (auto& v : ba) v = u(rng);
        for (auto& v : bb) v = u(rng);
        const auto f = step1_features(detection(0, 0, pos(rng), pos(rng), ang(rng), ba),
                                      detection(1, 1, pos(rng), pos(rng), ang(rng), bb));
        REQUIRE(f.euclidean_px >= 0.0);
        REQUIRE(f.angle_diff_rad >= 0.0);
        REQUIRE(f.angle_diff_rad <= std::numbers::pi);
        REQUIRE(f.id_manhattan >= 0.0);
        REQUIRE(f.id_manhattan <= 12.0);
    }
}

TEST_CASE("gate_candidates") {
    const auto a = detection(0, 0, 0, 0);
    CHECK(gate_candidates(a, std::vector<Detection>{}, 200).empty());

    const std::vector<Detection> frame{detection(1, 1, 199.9, 0), detection(2, 1, 0, 200.1),
                                       detection(3, 1, 200.0, 0)};
    const auto kept = gate_candidates(a, frame, 200);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].detection_id == 1);
    CHECK(kept[1].detection_id == 3);  // exactly on the radius counts

    CHECK_THROWS_AS(gate_candidates(a, frame, 0.0), InvalidInput);
}

TEST_CASE("gate_candidates is a subset, monotone in radius") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> pos(-400, 400), rad(1, 400);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<Detection> frame;
        for (int i = 0; i < 20; ++i) frame.push_back(detection(i, 1, pos(rng), pos(rng)));
        const auto a = detection(100, 0, pos(rng), pos(rng));
        double r1 = rad(rng), r2 = rad(rng);
        if (r1 > r2) std::swap(r1, r2);
        const auto small = gate_candidates(a, frame, r1), large = gate_candidates(a, frame, r2);
        REQUIRE(small.size() <= large.size());
        for (const auto& d : small) {
            REQUIRE(std::find(large.begin(), large.end(), d) != large.end());
            REQUIRE(std::find(frame.begin(), frame.end(), d) != frame.end());
        }
    }
}

TEST_CASE("step2_features worked examples") {
    const auto t1 = line(0, 0, {{0, 0}, {1, 0}});
    const auto t2 = line(10, 2, {{2, 0}});
    CHECK(std::abs(step2_features(t1, t2).forward_error_px) < 1e-9);

    // Gap 2: the last motion (1,0) is applied 3 times from (1,0), landing on
    // (4,0); the candidate sits at (2,0).
    const auto t3 = line(10, 4, {{2, 0}});
    CHECK(std::abs(step2_features(t1, t3).forward_error_px - 2.0) < 1e-9);

    const auto c = step2_features(line(0, 0, {{0, 0}, {1, 0}}, 0.9), line(10, 3, {{5, 5}}, 0.9));
    CHECK(std::abs(c.confidence_diff) < 1e-9);
    CHECK(std::abs(bit_confidence(uniform_bits(0.9)) - 0.4) < 1e-9);
}

TEST_CASE("step2_features single detection fragments have no motion") {
    const auto a = line(0, 0, {{0, 0}});
    const auto b = line(1, 3, {{3, 4}});
    const auto f = step2_features(a, b);
    CHECK(std::abs(f.euclidean_px - 5.0) < 1e-9);
    CHECK(std::abs(f.forward_error_px - 5.0) < 1e-9);
    CHECK(std::abs(f.backward_error_px - 5.0) < 1e-9);
}

TEST_CASE("step2_features backward extrapolation") {
    // Later fragment moves (2,0) per frame starting at (10,0) in frame 5;
    // backwards by 3 frames gives (4,0); earlier one ends at (0,0) in frame 2.
    const auto a = line(0, 1, {{-1, 0}, {0, 0}});
    const auto b = line(10, 5, {{10, 0}, {12, 0}});
    const auto f = step2_features(a, b);
    CHECK(std::abs(f.backward_error_px - 4.0) < 1e-9);
    // Forward: (0,0) + 3 * (1,0) = (3,0) vs (10,0).
    CHECK(std::abs(f.forward_error_px - 7.0) < 1e-9);
    CHECK(std::abs(f.euclidean_px - 10.0) < 1e-9);
}

TEST_CASE("step2_features errors") {
    const auto a = line(0, 0, {{0, 0}, {1, 0}});
    CHECK_THROWS_AS(step2_features(a, line(5, 1, {{0, 0}})), InvalidInput);   // overlap
    CHECK_THROWS_AS(step2_features(a, line(5, 17, {{0, 0}})), InvalidInput);  // gap 15
    CHECK_NOTHROW(step2_features(a, line(5, 16, {{0, 0}})));                  // gap 14
    CHECK_THROWS_AS(summarize_fragment(std::span<const Detection>{}), InvalidInput);
}

TEST_CASE("forward error vanishes on the constant-velocity extrapolation") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> pos(-300, 300), vel(-20, 20);
    for (int trial = 0; trial < 500; ++trial) {
        const double x0 = pos(rng), y0 = pos(rng), vx = vel(rng), vy = vel(rng);
        const int gap = static_cast<int>(rng() % 15);
        const auto a = line(0, 0, {{x0, y0}, {x0 + vx, y0 + vy}, {x0 + 2 * vx, y0 + 2 * vy}});
        const double steps = gap + 1;
        const auto b = line(10, 3 + gap, {{x0 + (2 + steps) * vx, y0 + (2 + steps) * vy}});
        REQUIRE(std::abs(step2_features(a, b).forward_error_px) < 1e-9);
    }
}

TEST_CASE("step2 features: translation and rotation invariance") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> pos(-300, 300), u(0, 1), ang(-3, 3);
    auto random_fragment = [&](std::uint64_t id, std::int64_t frame, int n) {
        std::vector<Detection> d;
        double x = pos(rng), y = pos(rng);
        for (int i = 0; i < n; ++i) {
            BitProbs b;
            for (auto& v : b) v = u(rng);
            x += 10 * (u(rng) - 0.5);
            y += 10 * (u(rng) - 0.5);
            d.push_back(detection(id + i, frame + i, x, y, ang(rng), b));
        }
        return d;
    };
    auto transform = [](std::vector<Detection> d, double dx, double dy, double rot) {
        for (auto& e : d) {
            const double x = e.x_px, y = e.y_px;
            e.x_px = std::cos(rot) * x - std::sin(rot) * y + dx;
            e.y_px = std::sin(rot) * x + std::cos(rot) * y + dy;
            e.orientation_rad = normalize_angle(e.orientation_rad + rot);
        }
        return d;
    };
    for (int trial = 0; trial < 300; ++trial) {
        const int na = 1 + static_cast<int>(rng() % 4), nb = 1 + static_cast<int>(rng() % 4);
        const auto a = random_fragment(0, 0, na);
        const auto b = random_fragment(10, na + static_cast<std::int64_t>(rng() % 15), nb);
        const auto base = step2_features(summarize_fragment(a), summarize_fragment(b)).as_array();
        const double dx = pos(rng), dy = pos(rng), rot = ang(rng);

        const auto moved = step2_features(summarize_fragment(transform(a, dx, dy, 0)),
                                          summarize_fragment(transform(b, dx, dy, 0)))
                               .as_array();
        for (std::size_t k = 0; k < base.size(); ++k) REQUIRE(std::abs(moved[k] - base[k]) < 1e-9);

        const auto turned = step2_features(summarize_fragment(transform(a, dx, dy, rot)),
                                           summarize_fragment(transform(b, dx, dy, rot)))
                                .as_array();
        // euclidean, forward, backward, angle difference
        for (std::size_t k : {1u, 2u, 3u, 4u}) REQUIRE(std::abs(turned[k] - base[k]) < 1e-6);
    }
}

TEST_CASE("step2 feature ranges") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(0, 1), pos(-300, 300), ang(-7, 7);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<Detection> a, b;
        for (int i = 0; i < 3; ++i) {
            BitProbs ba, bb;
            for (auto& v : ba) v = u(rng);
            for (auto& v : bb) v = u(rng);
            a.push_back(detection(i, i, pos(rng), pos(rng), ang(rng), ba));
            b.push_back(detection(10 + i, 3 + i, pos(rng), pos(rng), ang(rng), bb));
        }
        const auto f = step2_features(summarize_fragment(a), summarize_fragment(b));
        REQUIRE(f.id_manhattan_avg >= 0.0);
        REQUIRE(f.id_manhattan_avg <= 12.0);
        REQUIRE(f.angle_diff_rad <= std::numbers::pi);
        REQUIRE(f.confidence_diff >= 0.0);
        REQUIRE(f.confidence_diff <= 0.5);
        for (double v : f.as_array()) REQUIRE(std::isfinite(v));
    }
}
