#include "beetrack/io.hpp"

#include "beetrack/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>
#include <unordered_map>

namespace beetrack {

using nlohmann::ordered_json;

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError(path.string() + ": cannot open file");
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError(path.string() + ": cannot open file for writing");
    return out;
}

// Calls `handle` for each non-blank line, rewrapping errors with position.
void for_each_line(const std::filesystem::path& path, const std::function<void(const std::string&)>& handle) {
    auto in = open_input(path);
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            handle(line);
        } catch (const std::exception& e) {
            throw DataError(path.string() + ":" + std::to_string(number) + ": " + e.what());
        }
    }
}

ordered_json parse_object(const std::string& line) {
    ordered_json j;
    try {
        j = ordered_json::parse(line);
    } catch (const ordered_json::parse_error&) {
        throw DataError("invalid JSON");
    }
    if (!j.is_object()) throw DataError("expected a JSON object");
    return j;
}

template <typename T>
T get(const ordered_json& j, const char* key) {
    if (!j.contains(key)) throw DataError(std::string("missing key '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const ordered_json::exception&) {
        throw DataError(std::string("bad value for key '") + key + "'");
    }
}

std::unordered_map<DetectionId, const Detection*> index_by_id(std::span<const Detection> detections) {
    std::unordered_map<DetectionId, const Detection*> idx;
    idx.reserve(detections.size());
    for (const auto& d : detections) idx[d.detection_id] = &d;
    return idx;
}

std::vector<Detection> resolve(const std::vector<DetectionId>& ids,
                               const std::unordered_map<DetectionId, const Detection*>& idx) {
    std::vector<Detection> out;
    out.reserve(ids.size());
    for (auto id : ids) {
        auto it = idx.find(id);
        if (it == idx.end()) throw DataError("unknown detection_id " + std::to_string(id));
        out.push_back(*it->second);
    }
    std::sort(out.begin(), out.end(), [](const Detection& a, const Detection& b) { return a.frame_index < b.frame_index; });
    for (std::size_t k = 1; k < out.size(); ++k)
        if (out[k].frame_index == out[k - 1].frame_index)
            throw DataError("two detections share frame " + std::to_string(out[k].frame_index));
    return out;
}

} // namespace

std::string detection_to_json_line(const Detection& d) {
    ordered_json j;
    j["detection_id"] = d.detection_id;
    j["frame"] = d.frame_index;
    j["ts"] = d.timestamp;
    j["cam"] = d.cam_id;
    j["x"] = d.x_px;
    j["y"] = d.y_px;
    j["theta"] = d.orientation_rad;
    j["bits"] = d.bits;
    return j.dump();
}

Detection detection_from_json_line(const std::string& line) {
    const auto j = parse_object(line);
    Detection d;
    d.detection_id = get<DetectionId>(j, "detection_id");
    d.frame_index = get<std::int64_t>(j, "frame");
    d.timestamp = get<double>(j, "ts");
    d.cam_id = get<int>(j, "cam");
    d.x_px = get<double>(j, "x");
    d.y_px = get<double>(j, "y");
    d.orientation_rad = normalize_angle(get<double>(j, "theta"));
    const auto bits = get<std::vector<double>>(j, "bits");
    if (bits.size() != kNumBits) throw DataError("bits must have 12 entries, got " + std::to_string(bits.size()));
    std::copy(bits.begin(), bits.end(), d.bits.begin());
    validate_detection(d);
    return d;
}

std::vector<Detection> read_detections(const std::filesystem::path& path) {
    std::vector<Detection> out;
    for_each_line(path, [&](const std::string& line) { out.push_back(detection_from_json_line(line)); });
    return out;
}

void write_detections(const std::filesystem::path& path, std::span<const Detection> detections) {
    auto out = open_output(path);
    for (const auto& d : detections) out << detection_to_json_line(d) << '\n';
}

std::vector<GroundTruthTrack> read_truth(const std::filesystem::path& path, std::span<const Detection> detections) {
    const auto idx = index_by_id(detections);
    std::vector<GroundTruthTrack> out;
    for_each_line(path, [&](const std::string& line) {
        const auto j = parse_object(line);
        GroundTruthTrack t;
        t.true_id = get<int>(j, "true_id");
        if (t.true_id < 0 || t.true_id > kMaxId) throw DataError("true_id outside [0, 4095]");
        t.detections = resolve(get<std::vector<DetectionId>>(j, "detection_ids"), idx);
        out.push_back(std::move(t));
    });
    return out;
}

void write_truth(const std::filesystem::path& path, std::span<const GroundTruthTrack> truth) {
    auto out = open_output(path);
    for (const auto& t : truth) {
        ordered_json j;
        j["true_id"] = t.true_id;
        std::vector<DetectionId> ids;
        for (const auto& d : t.detections) ids.push_back(d.detection_id);
        j["detection_ids"] = ids;
        out << j.dump() << '\n';
    }
}

std::vector<Track> read_tracks(const std::filesystem::path& path, std::span<const Detection> detections) {
    const auto idx = index_by_id(detections);
    std::vector<Track> out;
    for_each_line(path, [&](const std::string& line) {
        const auto j = parse_object(line);
        Track t;
        t.track_id = get<std::uint64_t>(j, "track_id");
        if (j.contains("assigned_id") && !j["assigned_id"].is_null()) t.assigned_id = get<int>(j, "assigned_id");
        const auto dets = resolve(get<std::vector<DetectionId>>(j, "detection_ids"), idx);
        if (dets.empty()) throw DataError("track without detections");
        t.tracklets = split_into_tracklets(dets);
        out.push_back(std::move(t));
    });
    return out;
}

std::string tracks_to_jsonl(std::span<const Track> tracks) {
    std::ostringstream out;
    for (const auto& t : tracks) {
        ordered_json j;
        j["track_id"] = t.track_id;
        j["assigned_id"] = t.assigned_id ? ordered_json(*t.assigned_id) : ordered_json(nullptr);
        std::vector<DetectionId> ids;
        for (const auto& piece : t.tracklets)
            for (const auto& d : piece.detections) ids.push_back(d.detection_id);
        j["detection_ids"] = ids;
        j["start_frame"] = t.first_frame();
        j["end_frame"] = t.last_frame();
        out << j.dump() << '\n';
    }
    return out.str();
}

void write_tracks(const std::filesystem::path& path, std::span<const Track> tracks) {
    auto out = open_output(path);
    out << tracks_to_jsonl(tracks);
}

} // namespace beetrack
