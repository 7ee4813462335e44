#include "beetrack/tracking.hpp"

#include "beetrack/assignment.hpp"
#include "beetrack/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace beetrack {

void TrackerConfig::validate() const {
    if (!(gate_radius_px > 0.0)) throw InvalidInput("tracker config: gate radius must be positive");
    if (!(accept_threshold >= 0.0 && accept_threshold <= 1.0))
        throw InvalidInput("tracker config: accept threshold must lie in [0, 1]");
    if (max_gap_frames < 0) throw InvalidInput("tracker config: max gap must be non-negative");
}

Step1Scorer make_step1_scorer(const LinearModel& model) {
    if (model.n_features() != Step1Features::size)
        throw InvalidInput("step-1 model must have 3 features, has " + std::to_string(model.n_features()));
    return [&model](const Detection& from, const Detection& to) {
        return predict_linear(model, step1_features(from, to).as_array());
    };
}

Step2Scorer make_step2_scorer(const ForestModel& model, int max_gap) {
    if (model.n_features != static_cast<int>(Step2Features::size))
        throw InvalidInput("step-2 model must have 6 features, has " + std::to_string(model.n_features));
    return [&model, max_gap](const FragmentSummary& track, const FragmentSummary& candidate) {
        return predict_forest(model, step2_features(track, candidate, max_gap).as_array());
    };
}

namespace {

bool by_frame_then_id(const Detection& a, const Detection& b) {
    return a.frame_index != b.frame_index ? a.frame_index < b.frame_index : a.detection_id < b.detection_id;
}

std::vector<Detection> sorted_unique(std::span<const Detection> detections) {
    std::vector<Detection> sorted(detections.begin(), detections.end());
    std::sort(sorted.begin(), sorted.end(), by_frame_then_id);
    std::unordered_set<DetectionId> seen;
    seen.reserve(sorted.size());
    for (const auto& d : sorted)
        if (!seen.insert(d.detection_id).second)
            throw InvalidInput("duplicate detection_id " + std::to_string(d.detection_id));
    return sorted;
}

// Uniform grid over one frame's detections with cell size equal to the
// gate radius, so a radius query only touches the 3x3 neighbourhood.
class FrameGrid {
public:
    FrameGrid(std::span<const Detection> frame, double cell) : frame_(frame), cell_(cell) {
        for (std::size_t i = 0; i < frame.size(); ++i) cells_[key(cell_of(frame[i].x_px), cell_of(frame[i].y_px))].push_back(i);
    }

    std::vector<std::size_t> within(const Detection& a) const {
        std::vector<std::size_t> out;
        const auto cx = cell_of(a.x_px), cy = cell_of(a.y_px);
        for (std::int64_t dx = -1; dx <= 1; ++dx)
            for (std::int64_t dy = -1; dy <= 1; ++dy) {
                auto it = cells_.find(key(cx + dx, cy + dy));
                if (it == cells_.end()) continue;
                for (auto i : it->second)
                    if (std::hypot(frame_[i].x_px - a.x_px, frame_[i].y_px - a.y_px) <= cell_) out.push_back(i);
            }
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    std::int64_t cell_of(double v) const { return static_cast<std::int64_t>(std::floor(v / cell_)); }
    static std::uint64_t key(std::int64_t cx, std::int64_t cy) {
        return (static_cast<std::uint64_t>(cx) << 32) ^ static_cast<std::uint64_t>(cy & 0xffffffff);
    }

    std::span<const Detection> frame_;
    double cell_;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
};

bool tracklet_order(const Tracklet& a, const Tracklet& b) {
    return a.first_frame() != b.first_frame() ? a.first_frame() < b.first_frame()
                                              : a.detections.front().detection_id < b.detections.front().detection_id;
}

} // namespace

std::vector<Tracklet> track_step1(std::span<const Detection> detections, const Step1Scorer& scorer,
                                  const TrackerConfig& config) {
    config.validate();
    const auto sorted = sorted_unique(detections);

    std::vector<Tracklet> closed;
    std::vector<Tracklet> open;
    std::size_t begin = 0;
    while (begin < sorted.size()) {
        const auto frame = sorted[begin].frame_index;
        std::size_t end = begin;
        while (end < sorted.size() && sorted[end].frame_index == frame) ++end;
        const std::span<const Detection> candidates(sorted.data() + begin, end - begin);

        std::vector<char> taken(candidates.size(), 0);
        std::vector<Tracklet> next_open;
        if (!open.empty() && open.front().last_frame() + 1 == frame) {
            const FrameGrid grid(candidates, config.gate_radius_px);
            std::vector<Edge> edges;
            for (std::size_t r = 0; r < open.size(); ++r) {
                const auto& last = open[r].detections.back();
                for (auto c : grid.within(last)) edges.push_back({r, c, scorer(last, candidates[c])});
            }
            std::vector<char> extended(open.size(), 0);
            for (const auto& [r, c] : solve_sparse_assignment(open.size(), candidates.size(), edges,
                                                              config.accept_threshold)) {
                open[r].detections.push_back(candidates[c]);
                extended[r] = 1;
                taken[c] = 1;
            }
            for (std::size_t r = 0; r < open.size(); ++r)
                (extended[r] ? next_open : closed).push_back(std::move(open[r]));
        } else {
            for (auto& t : open) closed.push_back(std::move(t));
        }
        for (std::size_t c = 0; c < candidates.size(); ++c)
            if (!taken[c]) next_open.push_back(Tracklet{0, {candidates[c]}});
        open = std::move(next_open);
        begin = end;
    }
    for (auto& t : open) closed.push_back(std::move(t));

    std::sort(closed.begin(), closed.end(), tracklet_order);
    for (std::size_t i = 0; i < closed.size(); ++i) closed[i].tracklet_id = i;
    return closed;
}

std::vector<Tracklet> track_step1(std::span<const Detection> detections, const LinearModel& model,
                                  const TrackerConfig& config) {
    return track_step1(detections, make_step1_scorer(model), config);
}

std::vector<Track> track_step2(std::span<const Tracklet> tracklets, const Step2Scorer& scorer,
                               const TrackerConfig& config) {
    config.validate();
    std::vector<Tracklet> sorted(tracklets.begin(), tracklets.end());
    for (const auto& t : sorted)
        if (t.detections.empty()) throw InvalidInput("track_step2: empty tracklet");
    std::sort(sorted.begin(), sorted.end(), tracklet_order);

    struct Building {
        Track track;
        FragmentSummary summary;
    };
    std::vector<Building> tracks;
    std::vector<std::size_t> active;  // tracks that may still become open

    std::size_t begin = 0;
    while (begin < sorted.size()) {
        const auto t = sorted[begin].first_frame();
        std::size_t end = begin;
        while (end < sorted.size() && sorted[end].first_frame() == t) ++end;

        std::erase_if(active, [&](std::size_t i) { return t - tracks[i].track.last_frame() - 1 > config.max_gap_frames; });
        std::vector<std::size_t> open;
        for (auto i : active)
            if (tracks[i].track.last_frame() < t) open.push_back(i);

        std::vector<FragmentSummary> cand_summary;
        cand_summary.reserve(end - begin);
        for (std::size_t c = begin; c < end; ++c) cand_summary.push_back(summarize_fragment(sorted[c].detections));

        std::vector<Edge> edges;
        for (std::size_t r = 0; r < open.size(); ++r)
            for (std::size_t c = 0; c < cand_summary.size(); ++c)
                edges.push_back({r, c, scorer(tracks[open[r]].summary, cand_summary[c])});

        std::vector<char> merged(cand_summary.size(), 0);
        for (const auto& [r, c] : solve_sparse_assignment(open.size(), cand_summary.size(), edges,
                                                          config.accept_threshold)) {
            auto& b = tracks[open[r]];
            b.track.tracklets.push_back(sorted[begin + c]);
            const auto all = b.track.detections();
            b.summary = summarize_fragment(all);
            merged[c] = 1;
        }
        for (std::size_t c = 0; c < cand_summary.size(); ++c) {
            if (merged[c]) continue;
            tracks.push_back({Track{0, {sorted[begin + c]}, std::nullopt}, cand_summary[c]});
            active.push_back(tracks.size() - 1);
        }
        begin = end;
    }

    std::vector<Track> out;
    out.reserve(tracks.size());
    for (auto& b : tracks) out.push_back(std::move(b.track));
    canonicalize(out);
    return out;
}

std::vector<Track> track_step2(std::span<const Tracklet> tracklets, const ForestModel& model,
                               const TrackerConfig& config) {
    return track_step2(tracklets, make_step2_scorer(model, config.max_gap_frames), config);
}

std::vector<Track> track_baseline(std::span<const Detection> detections, const TrackerConfig& config) {
    config.validate();
    const auto sorted = sorted_unique(detections);

    std::vector<std::vector<Detection>> finished;
    std::map<int, std::vector<Detection>> main_track;  // decoded id -> current chain

    std::size_t begin = 0;
    while (begin < sorted.size()) {
        const auto frame = sorted[begin].frame_index;
        std::size_t end = begin;
        while (end < sorted.size() && sorted[end].frame_index == frame) ++end;

        std::map<int, std::vector<const Detection*>> by_id;
        for (std::size_t i = begin; i < end; ++i) by_id[binarize_bits(sorted[i].bits)].push_back(&sorted[i]);

        for (auto& [id, dets] : by_id) {
            auto it = main_track.find(id);
            if (it != main_track.end() && frame - it->second.back().frame_index - 1 > config.max_gap_frames) {
                finished.push_back(std::move(it->second));
                main_track.erase(it);
                it = main_track.end();
            }
            std::size_t keep = 0;
            if (it != main_track.end() && dets.size() > 1) {
                const auto& last = it->second.back();
                double best = std::numeric_limits<double>::infinity();
                for (std::size_t k = 0; k < dets.size(); ++k) {
                    const double d = std::hypot(dets[k]->x_px - last.x_px, dets[k]->y_px - last.y_px);
                    if (d < best) {
                        best = d;
                        keep = k;
                    }
                }
            }
            for (std::size_t k = 0; k < dets.size(); ++k) {
                if (k == keep)
                    main_track[id].push_back(*dets[k]);
                else
                    finished.push_back({*dets[k]});
            }
        }
        begin = end;
    }
    for (auto& [id, chain] : main_track) finished.push_back(std::move(chain));

    std::vector<Track> out;
    out.reserve(finished.size());
    for (auto& chain : finished) {
        Track t;
        t.tracklets = split_into_tracklets(chain);
        t.assigned_id = binarize_bits(chain.front().bits);
        out.push_back(std::move(t));
    }
    canonicalize(out);
    std::uint64_t next_tracklet = 0;
    for (auto& t : out)
        for (auto& piece : t.tracklets) piece.tracklet_id = next_tracklet++;
    return out;
}

std::vector<Track> tracklets_as_tracks(std::span<const Tracklet> tracklets) {
    std::vector<Track> out;
    out.reserve(tracklets.size());
    for (const auto& t : tracklets) out.push_back(Track{0, {t}, std::nullopt});
    canonicalize(out);
    return out;
}

void assign_ids(std::vector<Track>& tracks) {
    for (auto& t : tracks) t.assigned_id = assign_track_id(t);
}

void canonicalize(std::vector<Track>& tracks) {
    std::sort(tracks.begin(), tracks.end(), [](const Track& a, const Track& b) {
        return tracklet_order(a.tracklets.front(), b.tracklets.front());
    });
    for (std::size_t i = 0; i < tracks.size(); ++i) tracks[i].track_id = i;
}

} // namespace beetrack
