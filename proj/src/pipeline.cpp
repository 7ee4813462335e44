#include "beetrack/pipeline.hpp"

#include "beetrack/errors.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <limits>
#include <map>
#include <thread>

namespace beetrack {

ChunkPlan ChunkPlan::cover(std::span<const Detection> detections, std::int64_t chunk_length_frames) {
    if (chunk_length_frames <= 0) throw InvalidInput("chunk length must be positive");
    ChunkPlan plan;
    plan.chunk_length_frames = chunk_length_frames;
    if (detections.empty()) return plan;
    const auto [lo, hi] = std::minmax_element(detections.begin(), detections.end(), [](const auto& a, const auto& b) {
        return a.frame_index < b.frame_index;
    });
    for (auto start = lo->frame_index; start <= hi->frame_index; start += chunk_length_frames)
        plan.chunks.emplace_back(start, start + chunk_length_frames);
    return plan;
}

ChunkPlan ChunkPlan::single(std::span<const Detection> detections) {
    if (detections.empty()) return {};
    const auto [lo, hi] = std::minmax_element(detections.begin(), detections.end(), [](const auto& a, const auto& b) {
        return a.frame_index < b.frame_index;
    });
    const auto length = hi->frame_index - lo->frame_index + 1;
    return {length, {{lo->frame_index, hi->frame_index + 1}}};
}

std::vector<Track> track_chunk(std::span<const Detection> detections, const LinearModel& step1,
                               const ForestModel& step2, const TrackerConfig& config) {
    const auto tracklets = track_step1(detections, step1, config);
    auto tracks = track_step2(tracklets, step2, config);
    assign_ids(tracks);
    return tracks;
}

std::vector<Track> merge_chunks(std::vector<std::vector<Track>> per_chunk, std::optional<std::int64_t> merge_gap_frames) {
    std::vector<Track> merged;
    std::vector<std::size_t> previous;  // indices into `merged` holding the last chunk's tracks

    for (auto& chunk : per_chunk) {
        for (auto& t : chunk)
            if (!t.assigned_id) t.assigned_id = assign_track_id(t);

        std::map<int, std::vector<std::size_t>> prev_by_id;
        for (auto i : previous) prev_by_id[*merged[i].assigned_id].push_back(i);

        std::vector<std::size_t> joined(chunk.size(), std::numeric_limits<std::size_t>::max());
        std::map<int, std::vector<std::size_t>> next_by_id;
        for (std::size_t j = 0; j < chunk.size(); ++j) next_by_id[*chunk[j].assigned_id].push_back(j);

        for (const auto& [id, candidates] : next_by_id) {
            auto it = prev_by_id.find(id);
            if (it == prev_by_id.end()) continue;
            std::optional<std::pair<std::size_t, std::size_t>> best;
            std::int64_t best_gap = 0;
            for (auto i : it->second)
                for (auto j : candidates) {
                    const auto gap = chunk[j].first_frame() - merged[i].last_frame() - 1;
                    if (gap < 0 || (merge_gap_frames && gap > *merge_gap_frames)) continue;
                    if (!best || gap < best_gap) {
                        best = {i, j};
                        best_gap = gap;
                    }
                }
            if (best) joined[best->second] = best->first;
        }

        std::vector<std::size_t> current;
        for (std::size_t j = 0; j < chunk.size(); ++j) {
            if (joined[j] != std::numeric_limits<std::size_t>::max()) {
                auto& target = merged[joined[j]];
                for (auto& piece : chunk[j].tracklets) target.tracklets.push_back(std::move(piece));
                target.assigned_id = assign_track_id(target);
                current.push_back(joined[j]);
            } else {
                merged.push_back(std::move(chunk[j]));
                current.push_back(merged.size() - 1);
            }
        }
        previous = std::move(current);
    }

    canonicalize(merged);
    return merged;
}

std::vector<Track> run_pipeline(std::span<const Detection> detections, const LinearModel& step1,
                                const ForestModel& step2, const PipelineConfig& config, const ChunkPlan& plan) {
    config.tracker.validate();
    if (config.workers <= 0) throw InvalidInput("worker count must be positive");
    make_step1_scorer(step1);
    make_step2_scorer(step2);

    std::vector<std::vector<Detection>> inputs(plan.chunks.size());
    for (const auto& d : detections) {
        auto it = std::upper_bound(plan.chunks.begin(), plan.chunks.end(), d.frame_index,
                                   [](std::int64_t f, const auto& c) { return f < c.first; });
        if (it == plan.chunks.begin() || d.frame_index >= std::prev(it)->second)
            throw InvalidInput("detection in frame " + std::to_string(d.frame_index) + " lies outside the chunk plan");
        inputs[static_cast<std::size_t>(std::distance(plan.chunks.begin(), it) - 1)].push_back(d);
    }

    std::vector<std::vector<Track>> results(inputs.size());
    std::vector<std::exception_ptr> errors(inputs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < inputs.size(); k = next++) {
            try {
                results[k] = track_chunk(inputs[k], step1, step2, config.tracker);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    const auto n_threads = std::min<std::size_t>(static_cast<std::size_t>(config.workers), inputs.size());
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    return merge_chunks(std::move(results), config.merge_gap_frames);
}

} // namespace beetrack
