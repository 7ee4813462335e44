#include "beetrack/evaluation.hpp"

#include "beetrack/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <iomanip>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace beetrack {
namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

std::unordered_map<DetectionId, std::size_t> index_predicted(std::span<const Track> predicted) {
    std::unordered_map<DetectionId, std::size_t> owner;
    for (std::size_t p = 0; p < predicted.size(); ++p)
        for (const auto& t : predicted[p].tracklets)
            for (const auto& d : t.detections) owner[d.detection_id] = p;
    return owner;
}

std::int64_t truth_start(const GroundTruthTrack& t) {
    return t.detections.empty() ? 0 : t.detections.front().frame_index;
}

double pct(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

} // namespace

std::vector<std::optional<std::size_t>> match_tracks(std::span<const Track> predicted,
                                                     std::span<const GroundTruthTrack> truth) {
    const auto owner = index_predicted(predicted);
    std::vector<std::optional<std::size_t>> out(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
        std::map<std::size_t, std::size_t> votes;
        for (const auto& d : truth[i].detections)
            if (auto it = owner.find(d.detection_id); it != owner.end()) ++votes[it->second];
        std::optional<std::size_t> best;
        for (const auto& [p, count] : votes) {
            if (!best) {
                best = p;
                continue;
            }
            const auto best_count = votes[*best];
            if (count > best_count ||
                (count == best_count && predicted[p].first_frame() < predicted[*best].first_frame()))
                best = p;
        }
        out[i] = best;
    }
    return out;
}

std::map<std::int64_t, std::size_t> truth_gap_histogram(std::span<const GroundTruthTrack> truth) {
    std::map<std::int64_t, std::size_t> hist;
    for (const auto& t : truth)
        for (std::size_t k = 1; k < t.detections.size(); ++k)
            ++hist[t.detections[k].frame_index - t.detections[k - 1].frame_index - 1];
    return hist;
}

std::vector<Track> truth_as_tracks(std::span<const GroundTruthTrack> truth) {
    std::vector<Track> out;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i].detections.empty()) continue;
        Track t;
        t.track_id = out.size();
        t.tracklets = split_into_tracklets(truth[i].detections);
        t.assigned_id = assign_track_id(std::span<const Detection>(truth[i].detections));
        out.push_back(std::move(t));
    }
    return out;
}

EvalReport evaluate(std::span<const Track> predicted, std::span<const GroundTruthTrack> truth, int max_gap_frames) {
    if (truth.empty()) throw InvalidInput("evaluate: ground truth is empty");

    EvalReport r;
    r.n_truth_tracks = truth.size();
    r.n_predicted_tracks = predicted.size();

    const auto det_to_pred = index_predicted(predicted);
    std::unordered_map<DetectionId, std::size_t> det_to_truth;
    for (std::size_t i = 0; i < truth.size(); ++i)
        for (const auto& d : truth[i].detections) det_to_truth[d.detection_id] = i;

    std::vector<int> pred_ids(predicted.size());
    for (std::size_t p = 0; p < predicted.size(); ++p)
        pred_ids[p] = predicted[p].assigned_id ? *predicted[p].assigned_id : assign_track_id(predicted[p]);

    const auto matches = match_tracks(predicted, truth);

    // Per predicted track: how many detections each truth track contributes.
    std::vector<std::map<std::size_t, std::size_t>> composition(predicted.size());
    for (std::size_t p = 0; p < predicted.size(); ++p)
        for (const auto& t : predicted[p].tracklets)
            for (const auto& d : t.detections)
                if (auto it = det_to_truth.find(d.detection_id); it != det_to_truth.end())
                    ++composition[p][it->second];

    auto prefer = [&](std::size_t a, std::size_t b, std::size_t count_a, std::size_t count_b) {
        if (count_a != count_b) return count_a > count_b;
        if (truth_start(truth[a]) != truth_start(truth[b])) return truth_start(truth[a]) < truth_start(truth[b]);
        return a < b;
    };

    // Reference truth track of each matched predicted track.
    std::vector<std::size_t> reference(predicted.size(), kNone);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (!matches[i]) continue;
        const auto p = *matches[i];
        const auto count = composition[p][i];
        if (reference[p] == kNone || prefer(i, reference[p], count, composition[p][reference[p]])) reference[p] = i;
    }

    // Detection-level metrics.
    std::size_t wrong_detection_ids = 0, tracks_with_deletion = 0, complete_within_gap = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const auto& t = truth[i];
        r.n_truth_detections += t.detections.size();
        std::size_t deleted = 0;
        for (const auto& d : t.detections) {
            const auto it = det_to_pred.find(d.detection_id);
            if (it == det_to_pred.end() || pred_ids[it->second] != t.true_id) ++wrong_detection_ids;
            if (it == det_to_pred.end() || !matches[i] || it->second != *matches[i]) ++deleted;
        }
        r.n_deletions += deleted;
        if (deleted > 0) ++tracks_with_deletion;

        bool within_gap = true;
        for (std::size_t k = 1; k < t.detections.size(); ++k)
            if (t.detections[k].frame_index - t.detections[k - 1].frame_index - 1 > max_gap_frames) within_gap = false;
        if (within_gap) ++r.n_truth_tracks_within_gap;

        const bool complete = matches[i] && deleted == 0 && predicted[*matches[i]].size() == t.detections.size();
        if (complete) {
            ++r.n_complete_tracks;
            if (within_gap) ++complete_within_gap;
        }
    }

    // Insertions and mismatches against each reference truth track.
    std::size_t tracks_with_truth = 0, wrong_track_ids = 0;
    for (std::size_t p = 0; p < predicted.size(); ++p) {
        if (!composition[p].empty()) {
            ++tracks_with_truth;
            std::size_t majority = kNone;
            for (const auto& [i, count] : composition[p])
                if (majority == kNone || prefer(i, majority, count, composition[p][majority])) majority = i;
            if (pred_ids[p] != truth[majority].true_id) ++wrong_track_ids;
        }
        if (reference[p] == kNone) continue;
        const auto ref = reference[p];
        std::unordered_set<std::int64_t> ref_frames;
        for (const auto& d : truth[ref].detections) ref_frames.insert(d.frame_index);
        for (const auto& t : predicted[p].tracklets)
            for (const auto& d : t.detections) {
                const auto it = det_to_truth.find(d.detection_id);
                if (it != det_to_truth.end() && it->second == ref) continue;
                ++r.n_insertions;
                if (ref_frames.contains(d.frame_index)) ++r.n_mismatches;
            }
    }

    r.pct_incorrect_detection_ids = pct(wrong_detection_ids, r.n_truth_detections);
    r.pct_incorrect_track_ids = pct(wrong_track_ids, tracks_with_truth);
    r.pct_complete_tracks = pct(r.n_complete_tracks, r.n_truth_tracks);
    r.pct_complete_tracks_within_gap = pct(complete_within_gap, r.n_truth_tracks_within_gap);
    r.pct_detections_deleted = pct(r.n_deletions, r.n_truth_detections);
    r.pct_tracks_with_deletion = pct(tracks_with_deletion, r.n_truth_tracks);

    r.gap_histogram = truth_gap_histogram(truth);
    double length_sum = 0.0, weighted_sum = 0.0, weight = 0.0;
    for (const auto& p : predicted) {
        const auto length = p.last_frame() - p.first_frame() + 1;
        ++r.track_length_histogram[length];
        length_sum += static_cast<double>(length);
        weighted_sum += static_cast<double>(length) * static_cast<double>(p.size());
        weight += static_cast<double>(p.size());
    }
    if (!predicted.empty()) r.mean_track_length_frames = length_sum / static_cast<double>(predicted.size());
    if (weight > 0.0) r.detection_weighted_mean_track_length_frames = weighted_sum / weight;
    return r;
}

std::string report_to_json(const EvalReport& r) {
    nlohmann::ordered_json doc;
    doc["n_truth_tracks"] = r.n_truth_tracks;
    doc["n_truth_detections"] = r.n_truth_detections;
    doc["n_predicted_tracks"] = r.n_predicted_tracks;
    doc["pct_incorrect_detection_ids"] = r.pct_incorrect_detection_ids;
    doc["pct_incorrect_track_ids"] = r.pct_incorrect_track_ids;
    doc["pct_complete_tracks"] = r.pct_complete_tracks;
    doc["pct_complete_tracks_within_gap"] = r.pct_complete_tracks_within_gap;
    doc["pct_detections_deleted"] = r.pct_detections_deleted;
    doc["pct_tracks_with_deletion"] = r.pct_tracks_with_deletion;
    doc["n_complete_tracks"] = r.n_complete_tracks;
    doc["n_truth_tracks_within_gap"] = r.n_truth_tracks_within_gap;
    doc["n_deletions"] = r.n_deletions;
    doc["n_insertions"] = r.n_insertions;
    doc["n_mismatches"] = r.n_mismatches;
    doc["mean_track_length_frames"] = r.mean_track_length_frames;
    doc["detection_weighted_mean_track_length_frames"] = r.detection_weighted_mean_track_length_frames;
    auto hist = [](const std::map<std::int64_t, std::size_t>& h) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (const auto& [k, v] : h) obj[std::to_string(k)] = v;
        return obj;
    };
    doc["track_length_histogram"] = hist(r.track_length_histogram);
    doc["gap_histogram"] = hist(r.gap_histogram);
    return doc.dump();
}

std::string reports_to_table(std::span<const std::pair<std::string, EvalReport>> columns) {
    auto fmt_pct = [](double v) {
        std::ostringstream ss;
        ss << std::fixed << std::setprecision(2) << v << '%';
        return ss.str();
    };
    std::vector<std::pair<std::string, std::vector<std::string>>> table = {
        {"incorrect detection IDs", {}}, {"incorrect track IDs", {}},       {"complete tracks", {}},
        {"complete (gaps <= max)", {}},  {"deletions (detections)", {}},    {"tracks with a deletion", {}},
        {"insertions", {}},              {"mismatches", {}},                {"predicted tracks", {}},
    };
    for (const auto& [name, r] : columns) {
        table[0].second.push_back(fmt_pct(r.pct_incorrect_detection_ids));
        table[1].second.push_back(fmt_pct(r.pct_incorrect_track_ids));
        table[2].second.push_back(fmt_pct(r.pct_complete_tracks));
        table[3].second.push_back(fmt_pct(r.pct_complete_tracks_within_gap));
        table[4].second.push_back(fmt_pct(r.pct_detections_deleted));
        table[5].second.push_back(fmt_pct(r.pct_tracks_with_deletion));
        table[6].second.push_back(std::to_string(r.n_insertions));
        table[7].second.push_back(std::to_string(r.n_mismatches));
        table[8].second.push_back(std::to_string(r.n_predicted_tracks));
    }

    std::size_t label_width = 0;
    for (const auto& row : table) label_width = std::max(label_width, row.first.size());
    std::vector<std::size_t> widths;
    for (std::size_t c = 0; c < columns.size(); ++c) {
        std::size_t w = columns[c].first.size();
        for (const auto& row : table) w = std::max(w, row.second[c].size());
        widths.push_back(w);
    }

    std::ostringstream out;
    out << std::left << std::setw(static_cast<int>(label_width)) << "" << std::right;
    for (std::size_t c = 0; c < columns.size(); ++c)
        out << "  " << std::setw(static_cast<int>(widths[c])) << columns[c].first;
    out << '\n';
    for (const auto& row : table) {
        out << std::left << std::setw(static_cast<int>(label_width)) << row.first << std::right;
        for (std::size_t c = 0; c < columns.size(); ++c)
            out << "  " << std::setw(static_cast<int>(widths[c])) << row.second[c];
        out << '\n';
    }
    return out.str();
}

} // namespace beetrack
