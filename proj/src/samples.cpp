#include "beetrack/samples.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace beetrack {
namespace {

std::vector<Detection> time_ordered(const GroundTruthTrack& t) {
    std::vector<Detection> d = t.detections;
    std::sort(d.begin(), d.end(), [](const Detection& a, const Detection& b) { return a.frame_index < b.frame_index; });
    return d;
}

LabeledSample to_sample(const Step2Features& f, bool label) {
    const auto a = f.as_array();
    return {std::vector<double>(a.begin(), a.end()), label};
}

struct TrackParts {
    std::vector<Detection> detections;
    std::vector<FragmentSummary> prefix;  // prefix[a]: first a detections (index 0 unused)
    std::vector<FragmentSummary> suffix;  // suffix[j]: detections from index j on
};

TrackParts split_summaries(const GroundTruthTrack& t) {
    TrackParts parts;
    parts.detections = time_ordered(t);
    const auto& d = parts.detections;
    const std::size_t n = d.size();
    parts.prefix.resize(n + 1);
    parts.suffix.resize(n);
    for (std::size_t a = 1; a <= n; ++a) parts.prefix[a] = summarize_fragment(std::span(d).first(a));
    for (std::size_t j = 0; j < n; ++j) parts.suffix[j] = summarize_fragment(std::span(d).subspan(j));
    return parts;
}

std::int64_t gap_between(const FragmentSummary& earlier, const FragmentSummary& later) {
    return later.first.frame_index - earlier.last.frame_index - 1;
}

} // namespace

std::vector<LabeledSample> make_step1_samples(std::span<const GroundTruthTrack> truth, double radius_px) {
    // frame -> (truth index, detection)
    std::map<std::int64_t, std::vector<std::pair<std::size_t, const Detection*>>> frames;
    for (std::size_t i = 0; i < truth.size(); ++i)
        for (const auto& d : truth[i].detections) frames[d.frame_index].push_back({i, &d});

    std::vector<LabeledSample> out;
    for (const auto& [frame, current] : frames) {
        const auto next = frames.find(frame + 1);
        if (next == frames.end()) continue;
        for (const auto& [ti, a] : current)
            for (const auto& [tj, b] : next->second) {
                if (std::hypot(b->x_px - a->x_px, b->y_px - a->y_px) > radius_px) continue;
                const auto f = step1_features(*a, *b).as_array();
                out.push_back({std::vector<double>(f.begin(), f.end()), ti == tj});
            }
    }
    return out;
}

std::vector<LabeledSample> make_step2_samples(std::span<const GroundTruthTrack> truth, int max_gap) {
    std::vector<TrackParts> parts;
    parts.reserve(truth.size());
    for (const auto& t : truth) parts.push_back(split_summaries(t));

    std::vector<LabeledSample> out;

    for (const auto& p : parts) {
        const auto& d = p.detections;
        for (std::size_t k = 1; k < d.size(); ++k) {
            if (gap_between(p.prefix[k], p.suffix[k]) > max_gap) continue;
            out.push_back(to_sample(step2_features(p.prefix[k], p.suffix[k], max_gap), true));
        }
        for (std::size_t len = 2; len <= 3; ++len)
            for (std::size_t i = 0; i + len <= d.size(); ++i)
                for (std::size_t k = 1; k < len; ++k) {
                    const auto head = summarize_fragment(std::span(d).subspan(i, k));
                    const auto tail = summarize_fragment(std::span(d).subspan(i + k, len - k));
                    if (gap_between(head, tail) > max_gap) continue;
                    out.push_back(to_sample(step2_features(head, tail, max_gap), true));
                }
    }

    for (std::size_t ia = 0; ia < parts.size(); ++ia) {
        const auto& a = parts[ia].detections;
        if (a.empty()) continue;
        for (std::size_t ib = 0; ib < parts.size(); ++ib) {
            const auto& b = parts[ib].detections;
            if (ia == ib || b.empty() || truth[ia].true_id == truth[ib].true_id) continue;
            if (a.front().frame_index >= b.back().frame_index) continue;
            if (b.front().frame_index - a.back().frame_index - 1 > max_gap) continue;

            for (std::size_t j = 0; j < b.size(); ++j) {
                // Split times t in (previous frame of B, B[j].frame] keep the
                // suffix B[j..]; the prefix of A is everything before t.
                const auto hi = b[j].frame_index;
                const auto count_below = [&](std::int64_t frame) {
                    return static_cast<std::size_t>(
                        std::lower_bound(a.begin(), a.end(), frame,
                                         [](const Detection& x, std::int64_t f) { return x.frame_index < f; }) -
                        a.begin());
                };
                const std::size_t a_min = j > 0 ? count_below(b[j - 1].frame_index + 1) : 0;
                const std::size_t a_max = count_below(hi);
                for (std::size_t len = std::max<std::size_t>(a_min, 1); len <= a_max; ++len) {
                    const auto& prefix = parts[ia].prefix[len];
                    if (gap_between(prefix, parts[ib].suffix[j]) > max_gap) continue;
                    out.push_back(to_sample(step2_features(prefix, parts[ib].suffix[j], max_gap), false));
                }
            }
        }
    }
    return out;
}

double positive_fraction(std::span<const LabeledSample> samples) {
    if (samples.empty()) return 0.0;
    std::size_t pos = 0;
    for (const auto& s : samples) pos += s.label ? 1 : 0;
    return static_cast<double>(pos) / static_cast<double>(samples.size());
}

} // namespace beetrack
