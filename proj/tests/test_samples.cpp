#include <doctest.h>

#include "beetrack/samples.hpp"
#include "oracles.hpp"

#include <random>

using namespace beetrack;
using oracle::detection;

namespace {

GroundTruthTrack straight(int true_id, DetectionId first_id, std::int64_t first_frame, int n, double x, double y) {
    GroundTruthTrack t{true_id, {}};
    for (int i = 0; i < n; ++i)
        t.detections.push_back(detection(first_id + i, first_frame + i, x + 2.0 * i, y, 0.0, id_to_bits(true_id)));
    return t;
}

std::size_t count_label(const std::vector<LabeledSample>& s, bool label) {
    return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [&](const auto& x) { return x.label == label; }));
}

} // namespace

TEST_CASE("step 1 samples: gating") {
    const std::vector<GroundTruthTrack> far{straight(1, 0, 0, 2, 0, 0), straight(2, 10, 0, 2, 1000, 0)};
    const auto a = make_step1_samples(far);
    CHECK(count_label(a, true) == 2);
    CHECK(count_label(a, false) == 0);

    const std::vector<GroundTruthTrack> near{straight(1, 0, 0, 2, 0, 0), straight(2, 10, 0, 2, 50, 0)};
    const auto b = make_step1_samples(near);
    CHECK(count_label(b, true) == 2);
    CHECK(count_label(b, false) == 2);
    CHECK(positive_fraction(b) == 0.5);
}

TEST_CASE("step 1 samples match brute force on toy truth") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        const auto truth = oracle::toy_truth(rng, 10, 30);
        for (double radius : {50.0, 200.0}) {
            const auto got = make_step1_samples(truth, radius);
            REQUIRE(oracle::as_pairs(got) == oracle::step1_samples(truth, radius));
        }
    }
}

TEST_CASE("step 2 samples: single 5-detection track") {
    const std::vector<GroundTruthTrack> one{straight(1, 0, 0, 5, 0, 0)};
    const auto s = make_step2_samples(one);
    // 4 whole-track splits; sub-tracks of 2 give 4 x 1 split, of 3 give 3 x 2.
    CHECK(count_label(s, true) == 4 + 4 + 6);
    CHECK(count_label(s, false) == 0);
    CHECK(oracle::as_pairs(s) == oracle::step2_samples(one, 14));
}

TEST_CASE("step 2 samples: distant tracks give no negatives") {
    const std::vector<GroundTruthTrack> apart{straight(1, 0, 0, 3, 0, 0), straight(2, 10, 18, 3, 0, 0)};  // gap 15
    CHECK(count_label(make_step2_samples(apart), false) == 0);

    const std::vector<GroundTruthTrack> close{straight(1, 0, 0, 3, 0, 0), straight(2, 10, 17, 3, 0, 0)};  // gap 14
    const auto s = make_step2_samples(close);
    // Only (all of track 1, all of track 2) fits: one ordered pair direction.
    CHECK(count_label(s, false) == 1);
}

TEST_CASE("step 2 samples: overlapping tracks") {
    // Two bees in frames 0..3: negatives pair A's prefix before t with B's
    // suffix from t, for t = 1..3, in both directions.
    const std::vector<GroundTruthTrack> pair{straight(1, 0, 0, 4, 0, 0), straight(2, 10, 0, 4, 30, 0)};
    const auto s = make_step2_samples(pair);
    CHECK(count_label(s, false) == 6);
    CHECK(oracle::as_pairs(s) == oracle::step2_samples(pair, 14));
}

TEST_CASE("step 2 samples match brute force on toy truth") {
    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 200; ++trial) {
        const auto truth = oracle::toy_truth(rng, 10, 30);
        for (int max_gap : {0, 3, 14}) {
            const auto got = make_step2_samples(truth, max_gap);
            const auto expected = oracle::step2_samples(truth, max_gap);
            REQUIRE(got.size() == expected.size());
            REQUIRE(oracle::as_pairs(got) == expected);
            if (!got.empty()) {
                std::size_t positives = 0;
                for (const auto& e : expected) positives += e.second ? 1 : 0;
                REQUIRE(positive_fraction(got) ==
                        doctest::Approx(static_cast<double>(positives) / static_cast<double>(expected.size())));
            }
        }
    }
}

TEST_CASE("sample generators are deterministic") {
    std::mt19937_64 rng(23);
    const auto truth = oracle::toy_truth(rng, 8, 25);
    const auto a = make_step2_samples(truth), b = make_step2_samples(truth);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].features == b[i].features);
        REQUIRE(a[i].label == b[i].label);
    }
    CHECK(positive_fraction(std::vector<LabeledSample>{}) == 0.0);
}
