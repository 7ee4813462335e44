#include <doctest.h>

#include "beetrack/core.hpp"
#include "beetrack/errors.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <numbers>
#include <random>
#include <vector>

using namespace beetrack;
using oracle::detection;
using oracle::uniform_bits;

namespace {

std::vector<Detection> with_bit0(std::initializer_list<double> values) {
    std::vector<Detection> out;
    std::uint64_t id = 0;
    for (double v : values) {
        auto bits = uniform_bits(0.0);
        bits[0] = v;
        out.push_back(detection(id, static_cast<std::int64_t>(id), 0, 0, 0, bits));
        ++id;
    }
    return out;
}

} // namespace

TEST_CASE("binarize_bits") {
    CHECK(binarize_bits(uniform_bits(0.0)) == 0);
    CHECK(binarize_bits(uniform_bits(1.0)) == 4095);
    auto msb = uniform_bits(0.0);
    msb[0] = 1.0;
    CHECK(binarize_bits(msb) == 2048);
    auto lsb = uniform_bits(0.0);
    lsb[11] = 1.0;
    CHECK(binarize_bits(lsb) == 1);
    CHECK(binarize_bits(uniform_bits(0.5)) == 4095);  // 0.5 counts as set
    CHECK(binarize_bits(uniform_bits(0.4999)) == 0);

    std::vector<double> short_bits(11, 0.0);
    CHECK_THROWS_AS(binarize_bits(short_bits), InvalidInput);
}

TEST_CASE("id_to_bits inverts binarize_bits") {
    for (int id = 0; id <= kMaxId; ++id) REQUIRE(binarize_bits(id_to_bits(id)) == id);
    CHECK_THROWS_AS(id_to_bits(-1), InvalidInput);
    CHECK_THROWS_AS(id_to_bits(4096), InvalidInput);
}

TEST_CASE("bitwise_median") {
    const auto one = with_bit0({0.3});
    CHECK(bitwise_median(one) == one[0].bits);

    CHECK(bitwise_median(with_bit0({0.9, 0.8, 0.1}))[0] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(bitwise_median(with_bit0({0.2, 0.6}))[0] == doctest::Approx(0.4).epsilon(1e-12));

    CHECK_THROWS_AS(bitwise_median(std::vector<Detection>{}), InvalidInput);
}

TEST_CASE("bitwise_median is permutation invariant") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Detection> dets;
        const int n = 1 + static_cast<int>(rng() % 9);
        for (int i = 0; i < n; ++i) {
            BitProbs b;
            for (auto& v : b) v = u(rng);
            dets.push_back(detection(i, i, 0, 0, 0, b));
        }
        const auto expected = bitwise_median(dets);
        std::shuffle(dets.begin(), dets.end(), rng);
        REQUIRE(bitwise_median(dets) == expected);
    }
}

TEST_CASE("assign_track_id") {
    Track one;
    one.tracklets.push_back({0, {detection(0, 0, 0, 0, 0, uniform_bits(1.0))}});
    CHECK(assign_track_id(one) == 4095);

    CHECK(assign_track_id(with_bit0({1, 1, 0})) == 2048);

    CHECK_THROWS_AS(assign_track_id(Track{}), InvalidInput);
    CHECK_THROWS_AS(assign_track_id(std::span<const Detection>{}), InvalidInput);
}

TEST_CASE("assign_track_id: per-bit majority error of 11 noisy votes") {
    // Bit 0 is 1 and each vote flips with p = 0.15. The median of 11 votes is
    // wrong iff at least 6 flipped.
    const double p = 0.15;
    const double expected = oracle::binomial_upper_tail(11, 6, p);
    CHECK(expected == doctest::Approx(9.9e-4).epsilon(0.05));

    std::mt19937_64 rng(5);
    std::bernoulli_distribution flip(p);
    const int trials = 400000;
    int wrong = 0;
    for (int t = 0; t < trials; ++t) {
        std::vector<Detection> dets;
        for (int i = 0; i < 11; ++i) {
            auto bits = uniform_bits(0.0);
            bits[0] = flip(rng) ? 0.0 : 1.0;
            dets.push_back(detection(i, i, 0, 0, 0, bits));
        }
        if (assign_track_id(dets) != 2048) ++wrong;
    }
    const double rate = static_cast<double>(wrong) / trials;
    // Binomial standard error at this rate is about 5e-5.
    CHECK(rate == doctest::Approx(expected).epsilon(0.25));
}

TEST_CASE("assign_track_id ignores storage order") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Detection> dets;
        for (int i = 0; i < 7; ++i) {
            BitProbs b;
            for (auto& v : b) v = u(rng);
            dets.push_back(detection(i, i, 0, 0, 0, b));
        }
        const int id = assign_track_id(dets);
        std::shuffle(dets.begin(), dets.end(), rng);
        REQUIRE(assign_track_id(dets) == id);
    }
}

TEST_CASE("angular_difference") {
    constexpr double pi = std::numbers::pi;
    CHECK(angular_difference(1.234, 1.234) == 0.0);
    CHECK(angular_difference(0.0, pi) == doctest::Approx(pi).epsilon(1e-12));
    CHECK(std::abs(angular_difference(-3.0, 3.0) - (2 * pi - 6)) < 1e-9);
    CHECK(std::abs(angular_difference(-3.0, 3.0) - 0.28319) < 1e-5);
}

TEST_CASE("angular_difference properties") {
    constexpr double pi = std::numbers::pi;
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> angle(-10.0, 10.0);
    std::uniform_int_distribution<int> turns(-3, 3);
    for (int i = 0; i < 5000; ++i) {
        const double a = angle(rng), b = angle(rng);
        const double d = angular_difference(a, b);
        REQUIRE(d >= 0.0);
        REQUIRE(d <= pi);
        REQUIRE(d == doctest::Approx(angular_difference(b, a)).epsilon(1e-12));
        const double shifted = angular_difference(a + 2 * pi * turns(rng), b + 2 * pi * turns(rng));
        REQUIRE(std::abs(shifted - d) < 1e-9);
    }
}

TEST_CASE("normalize_angle maps into [-pi, pi)") {
    constexpr double pi = std::numbers::pi;
    CHECK(normalize_angle(pi) == doctest::Approx(-pi));
    CHECK(normalize_angle(-pi) == doctest::Approx(-pi));
    CHECK(normalize_angle(0.5) == doctest::Approx(0.5));
    CHECK(normalize_angle(0.5 + 4 * pi) == doctest::Approx(0.5));
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> angle(-50.0, 50.0);
    for (int i = 0; i < 5000; ++i) {
        const double r = normalize_angle(angle(rng));
        REQUIRE(r >= -pi);
        REQUIRE(r < pi);
    }
}

TEST_CASE("manhattan_bits") {
    const auto zeros = uniform_bits(0.0), ones = uniform_bits(1.0);
    CHECK(manhattan_bits(ones, ones) == 0.0);
    CHECK(manhattan_bits(ones, zeros) == 12.0);

    auto a = uniform_bits(0.5), b = uniform_bits(0.5);
    a[0] = 0.9;
    a[1] = 0.1;
    b[0] = 0.1;
    b[1] = 0.9;
    CHECK(std::abs(manhattan_bits(a, b) - 1.6) < 1e-9);

    std::vector<double> eleven(11, 0.0);
    CHECK_THROWS_AS(manhattan_bits(eleven, ones), InvalidInput);
}

TEST_CASE("manhattan_bits is a metric") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto random_bits = [&] {
        BitProbs b;
        for (auto& v : b) v = u(rng);
        return b;
    };
    for (int i = 0; i < 2000; ++i) {
        const auto a = random_bits(), b = random_bits(), c = random_bits();
        REQUIRE(manhattan_bits(a, a) == 0.0);
        REQUIRE(manhattan_bits(a, b) > 0.0);
        REQUIRE(manhattan_bits(a, b) == manhattan_bits(b, a));
        REQUIRE(manhattan_bits(a, c) <= manhattan_bits(a, b) + manhattan_bits(b, c) + 1e-12);
    }
}

TEST_CASE("validate_detection") {
    auto d = detection(1, 0, 10, 10, 0, uniform_bits(0.5));
    CHECK_NOTHROW(validate_detection(d));
    d.bits[3] = 1.5;
    CHECK_THROWS_AS(validate_detection(d), InvalidInput);
    d.bits[3] = 0.5;
    d.x_px = std::nan("");
    CHECK_THROWS_AS(validate_detection(d), InvalidInput);
    d.x_px = 0;
    d.frame_index = -1;
    CHECK_THROWS_AS(validate_detection(d), InvalidInput);
}

TEST_CASE("split_into_tracklets") {
    std::vector<Detection> dets{detection(0, 3, 0, 0), detection(1, 4, 0, 0), detection(2, 6, 0, 0),
                                detection(3, 7, 0, 0), detection(4, 8, 0, 0), detection(5, 20, 0, 0)};
    const auto pieces = split_into_tracklets(dets);
    REQUIRE(pieces.size() == 3);
    CHECK(pieces[0].detections.size() == 2);
    CHECK(pieces[1].detections.size() == 3);
    CHECK(pieces[2].detections.size() == 1);
    CHECK(pieces[1].first_frame() == 6);
    CHECK(split_into_tracklets(std::vector<Detection>{}).empty());

    Track t;
    t.tracklets = pieces;
    CHECK(t.size() == 6);
    CHECK(t.detections() == dets);
    CHECK(t.first_frame() == 3);
    CHECK(t.last_frame() == 20);
}
