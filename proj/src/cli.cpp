#include "beetrack/cli.hpp"

#include "beetrack/errors.hpp"
#include "beetrack/evaluation.hpp"
#include "beetrack/io.hpp"
#include "beetrack/model_io.hpp"
#include "beetrack/pipeline.hpp"
#include "beetrack/samples.hpp"
#include "beetrack/synth.hpp"
#include "beetrack/tracking.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace beetrack {
namespace {

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
    if (out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(out_path, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError(out_path + ": cannot open file for writing");
    f << text;
}

struct TrackerFlags {
    TrackerConfig config;
    void add(CLI::App* app) {
        app->add_option("--gate-radius", config.gate_radius_px, "Step-1 gating radius in pixels")->capture_default_str();
        app->add_option("--threshold", config.accept_threshold, "Minimum probability of an accepted link")
            ->capture_default_str();
        app->add_option("--max-gap", config.max_gap_frames, "Largest gap (frames) bridged inside a track")
            ->capture_default_str();
    }
};

std::string histogram_json(const std::map<std::int64_t, std::size_t>& hist) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (const auto& [k, v] : hist) obj[std::to_string(k)] = v;
    return obj.dump();
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Two-step tracking of marked animals from noisy ID detections", "beetrack"};
    app.require_subcommand(1);

    // synth
    SynthConfig synth;
    std::string synth_detections, synth_truth;
    auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic detection set with ground truth");
    synth_cmd->add_option("--out-detections", synth_detections, "Detections JSONL output")->required();
    synth_cmd->add_option("--out-truth", synth_truth, "Ground-truth JSONL output")->required();
    synth_cmd->add_option("--bees", synth.n_bees)->capture_default_str();
    synth_cmd->add_option("--width", synth.width_px)->capture_default_str();
    synth_cmd->add_option("--height", synth.height_px)->capture_default_str();
    synth_cmd->add_option("--fps", synth.fps)->capture_default_str();
    synth_cmd->add_option("--duration", synth.duration_s, "Seconds")->capture_default_str();
    synth_cmd->add_option("--detect-prob", synth.detect_prob)->capture_default_str();
    synth_cmd->add_option("--long-gap-rate", synth.long_gap_rate)->capture_default_str();
    synth_cmd->add_option("--absence-mean", synth.absence_mean_frames)->capture_default_str();
    synth_cmd->add_option("--bit-flip-prob", synth.bit_flip_prob)->capture_default_str();
    synth_cmd->add_option("--bit-noise-sd", synth.bit_noise_sd)->capture_default_str();
    synth_cmd->add_option("--false-positive-rate", synth.false_positive_rate)->capture_default_str();
    synth_cmd->add_option("--speed-mean", synth.motion.speed_mean_px)->capture_default_str();
    synth_cmd->add_option("--turn-sd", synth.motion.turn_sd_rad)->capture_default_str();
    synth_cmd->add_option("--orientation-noise-sd", synth.orientation_noise_sd)->capture_default_str();
    synth_cmd->add_option("--position-noise-sd", synth.position_noise_sd)->capture_default_str();
    synth_cmd->add_option("--mean-visit", synth.mean_visit_frames, "Mean frames a bee stays in view (0: always)")
        ->capture_default_str();
    synth_cmd->add_option("--seed", synth.seed)->capture_default_str();

    // train-step1
    std::string t1_detections, t1_truth, t1_out;
    double t1_radius = kDefaultGateRadiusPx;
    LinearTrainConfig t1_config;
    auto* t1_cmd = app.add_subcommand("train-step1", "Train the detection-linking model from ground truth");
    t1_cmd->add_option("--detections", t1_detections)->required();
    t1_cmd->add_option("--truth", t1_truth)->required();
    t1_cmd->add_option("--out", t1_out, "Model file")->required();
    t1_cmd->add_option("--gate-radius", t1_radius)->capture_default_str();
    t1_cmd->add_option("--l2", t1_config.l2)->capture_default_str();
    t1_cmd->add_option("--epochs", t1_config.epochs)->capture_default_str();
    t1_cmd->add_option("--lr", t1_config.lr)->capture_default_str();
    t1_cmd->add_flag("--balance-classes", t1_config.balance_classes);
    t1_cmd->add_option("--seed", t1_config.seed)->capture_default_str();

    // train-step2
    std::string t2_detections, t2_truth, t2_out;
    int t2_max_gap = kDefaultMaxGapFrames;
    int t2_max_depth = 0;
    ForestTrainConfig t2_config;
    auto* t2_cmd = app.add_subcommand("train-step2", "Train the tracklet-merging model from ground truth");
    t2_cmd->add_option("--detections", t2_detections)->required();
    t2_cmd->add_option("--truth", t2_truth)->required();
    t2_cmd->add_option("--out", t2_out, "Model file")->required();
    t2_cmd->add_option("--max-gap", t2_max_gap)->capture_default_str();
    t2_cmd->add_option("--trees", t2_config.n_trees)->capture_default_str();
    t2_cmd->add_option("--max-depth", t2_max_depth, "0 for unlimited")->capture_default_str();
    t2_cmd->add_option("--min-leaf", t2_config.min_leaf)->capture_default_str();
    t2_cmd->add_flag("--balance-classes", t2_config.balance_classes);
    t2_cmd->add_option("--seed", t2_config.seed)->capture_default_str();

    // track
    std::string tr_detections, tr_step1, tr_step2, tr_out;
    std::int64_t tr_chunk = 0;
    std::int64_t tr_merge_gap = -1;
    PipelineConfig tr_config;
    TrackerFlags tr_flags;
    std::uint64_t tr_seed = 0;
    auto* tr_cmd = app.add_subcommand("track", "Run both tracking steps and write tracks");
    tr_cmd->add_option("--detections", tr_detections)->required();
    tr_cmd->add_option("--step1-model", tr_step1)->required();
    tr_cmd->add_option("--step2-model", tr_step2)->required();
    tr_cmd->add_option("--out", tr_out, "Tracks JSONL output (stdout if omitted)");
    tr_cmd->add_option("--workers", tr_config.workers)->capture_default_str();
    tr_cmd->add_option("--chunk-frames", tr_chunk, "Frames per chunk; 0 tracks everything in one chunk")
        ->capture_default_str();
    tr_cmd->add_option("--merge-gap", tr_merge_gap, "Largest gap joined across chunks; -1 for unlimited")
        ->capture_default_str();
    tr_cmd->add_option("--seed", tr_seed, "Accepted for interface symmetry; tracking is deterministic");
    tr_flags.add(tr_cmd);

    // baseline
    std::string bl_detections, bl_out;
    TrackerFlags bl_flags;
    auto* bl_cmd = app.add_subcommand("baseline", "Link detections by decoded ID only");
    bl_cmd->add_option("--detections", bl_detections)->required();
    bl_cmd->add_option("--out", bl_out, "Tracks JSONL output (stdout if omitted)");
    bl_cmd->add_option("--max-gap", bl_flags.config.max_gap_frames)->capture_default_str();

    // eval
    std::string ev_detections, ev_truth, ev_out;
    std::vector<std::string> ev_tracks;
    bool ev_json = false;
    int ev_max_gap = kDefaultMaxGapFrames;
    auto* ev_cmd = app.add_subcommand("eval", "Compare tracks with ground truth");
    ev_cmd->add_option("--detections", ev_detections)->required();
    ev_cmd->add_option("--truth", ev_truth)->required();
    ev_cmd->add_option("--tracks", ev_tracks, "One or more tracks files (one table column each)")->required();
    ev_cmd->add_option("--out", ev_out);
    ev_cmd->add_flag("--json", ev_json, "Emit JSON Lines, one report per tracks file");
    ev_cmd->add_option("--max-gap", ev_max_gap)->capture_default_str();

    // stats
    std::string st_detections, st_truth, st_tracks, st_out;
    auto* st_cmd = app.add_subcommand("stats", "Gap and track-length histograms");
    st_cmd->add_option("--detections", st_detections)->required();
    st_cmd->add_option("--truth", st_truth, "Ground truth: reports its gap histogram");
    st_cmd->add_option("--tracks", st_tracks, "Tracks: reports their length histogram");
    st_cmd->add_option("--out", st_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*synth_cmd) {
            synth.validate();
            const auto data = generate(synth);
            write_detections(synth_detections, data.detections);
            write_truth(synth_truth, data.truth);
        } else if (*t1_cmd) {
            const auto dets = read_detections(t1_detections);
            const auto truth = read_truth(t1_truth, dets);
            const auto samples = make_step1_samples(truth, t1_radius);
            save_model(t1_out, train_linear(samples, t1_config));
            err << "step-1 samples: " << samples.size() << " (" << 100.0 * positive_fraction(samples)
                << "% positive)\n";
        } else if (*t2_cmd) {
            const auto dets = read_detections(t2_detections);
            const auto truth = read_truth(t2_truth, dets);
            const auto samples = make_step2_samples(truth, t2_max_gap);
            if (t2_max_depth > 0) t2_config.max_depth = t2_max_depth;
            save_model(t2_out, train_forest(samples, t2_config));
            err << "step-2 samples: " << samples.size() << " (" << 100.0 * positive_fraction(samples)
                << "% positive)\n";
        } else if (*tr_cmd) {
            const auto dets = read_detections(tr_detections);
            const auto step1 = load_linear_model(tr_step1);
            const auto step2 = load_forest_model(tr_step2);
            tr_config.tracker = tr_flags.config;
            if (tr_merge_gap >= 0) tr_config.merge_gap_frames = tr_merge_gap;
            const auto plan = tr_chunk > 0 ? ChunkPlan::cover(dets, tr_chunk) : ChunkPlan::single(dets);
            const auto tracks = run_pipeline(dets, step1, step2, tr_config, plan);
            emit(tracks_to_jsonl(tracks), tr_out, out);
        } else if (*bl_cmd) {
            const auto dets = read_detections(bl_detections);
            const auto tracks = track_baseline(dets, bl_flags.config);
            emit(tracks_to_jsonl(tracks), bl_out, out);
        } else if (*ev_cmd) {
            const auto dets = read_detections(ev_detections);
            const auto truth = read_truth(ev_truth, dets);
            std::vector<std::pair<std::string, EvalReport>> columns;
            for (const auto& path : ev_tracks) {
                const auto tracks = read_tracks(path, dets);
                columns.emplace_back(std::filesystem::path(path).stem().string(), evaluate(tracks, truth, ev_max_gap));
            }
            std::string text;
            if (ev_json) {
                for (const auto& [name, report] : columns) text += report_to_json(report) + "\n";
            } else {
                text = reports_to_table(columns);
            }
            emit(text, ev_out, out);
        } else if (*st_cmd) {
            if (st_truth.empty() && st_tracks.empty()) throw CLI::RequiredError("--truth or --tracks");
            const auto dets = read_detections(st_detections);
            nlohmann::ordered_json doc;
            if (!st_truth.empty()) {
                const auto truth = read_truth(st_truth, dets);
                doc["gap_histogram"] = nlohmann::ordered_json::parse(histogram_json(truth_gap_histogram(truth)));
            }
            if (!st_tracks.empty()) {
                const auto tracks = read_tracks(st_tracks, dets);
                std::map<std::int64_t, std::size_t> lengths;
                for (const auto& t : tracks) ++lengths[t.last_frame() - t.first_frame() + 1];
                doc["track_length_histogram"] = nlohmann::ordered_json::parse(histogram_json(lengths));
            }
            emit(doc.dump() + "\n", st_out, out);
        }
    } catch (const CLI::Error& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const ModelLoadError& e) {
        err << "model error: " << e.what() << '\n';
        return kExitData;
    } catch (const InvalidInput& e) {
        err << "invalid input: " << e.what() << '\n';
        return kExitData;
    } catch (const TrainingError& e) {
        err << "training error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitOk;
}

} // namespace beetrack
