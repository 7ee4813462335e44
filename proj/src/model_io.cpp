#include "beetrack/model_io.hpp"

#include "beetrack/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace beetrack {

using nlohmann::json;

namespace {

json parse_document(const std::string& text, const char* expected_kind) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ModelLoadError(std::string("malformed model file: ") + e.what());
    }
    if (!doc.is_object()) throw ModelLoadError("malformed model file: top level is not an object");
    if (!doc.contains("format_version") || !doc["format_version"].is_number_integer())
        throw ModelLoadError("malformed model file: missing format_version");
    const auto version = doc["format_version"].get<int>();
    if (version != kModelFormatVersion)
        throw ModelLoadError("unsupported model format_version " + std::to_string(version) + " (expected " +
                             std::to_string(kModelFormatVersion) + ")");
    if (!doc.contains("kind") || !doc["kind"].is_string())
        throw ModelLoadError("malformed model file: missing kind");
    if (doc["kind"].get<std::string>() != expected_kind)
        throw ModelLoadError("model kind is '" + doc["kind"].get<std::string>() + "', expected '" + expected_kind + "'");
    return doc;
}

template <typename T>
T field(const json& obj, const char* key) {
    if (!obj.contains(key)) throw ModelLoadError(std::string("malformed model file: missing field '") + key + "'");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ModelLoadError(std::string("malformed model file: field '") + key + "': " + e.what());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelLoadError("cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write model file " + path.string());
    out << text << '\n';
}

} // namespace

std::string linear_model_to_json(const LinearModel& model) {
    json doc = {
        {"format_version", kModelFormatVersion},
        {"kind", "linear"},
        {"weights", model.weights},
        {"bias", model.bias},
        {"feature_means", model.feature_means},
        {"feature_stds", model.feature_stds},
    };
    return doc.dump();
}

LinearModel linear_model_from_json(const std::string& text) {
    const json doc = parse_document(text, "linear");
    LinearModel m;
    m.weights = field<std::vector<double>>(doc, "weights");
    m.bias = field<double>(doc, "bias");
    m.feature_means = field<std::vector<double>>(doc, "feature_means");
    m.feature_stds = field<std::vector<double>>(doc, "feature_stds");
    if (m.feature_means.size() != m.weights.size() || m.feature_stds.size() != m.weights.size())
        throw ModelLoadError("malformed linear model: weights, means and stds differ in length");
    for (double s : m.feature_stds)
        if (!(s > 0.0)) throw ModelLoadError("malformed linear model: non-positive feature std");
    return m;
}

std::string forest_model_to_json(const ForestModel& model) {
    json trees = json::array();
    for (const auto& tree : model.trees) {
        std::vector<int> feature, left, right;
        std::vector<double> threshold, value;
        for (const auto& n : tree.nodes) {
            feature.push_back(n.feature);
            threshold.push_back(n.threshold);
            left.push_back(n.left);
            right.push_back(n.right);
            value.push_back(n.value);
        }
        trees.push_back({{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right},
                         {"value", value}});
    }
    json doc = {
        {"format_version", kModelFormatVersion},
        {"kind", "forest"},
        {"n_features", model.n_features},
        {"n_trees", model.trees.size()},
        {"seed", model.seed},
        {"trees", trees},
    };
    return doc.dump();
}

ForestModel forest_model_from_json(const std::string& text) {
    const json doc = parse_document(text, "forest");
    ForestModel m;
    m.n_features = field<int>(doc, "n_features");
    m.seed = field<std::uint64_t>(doc, "seed");
    const auto n_trees = field<std::size_t>(doc, "n_trees");
    if (m.n_features <= 0) throw ModelLoadError("malformed forest model: n_features must be positive");
    const auto& trees = doc.contains("trees") ? doc["trees"] : json();
    if (!trees.is_array() || trees.size() != n_trees || n_trees == 0)
        throw ModelLoadError("malformed forest model: tree list missing or inconsistent with n_trees");

    for (const auto& t : trees) {
        const auto feature = field<std::vector<int>>(t, "feature");
        const auto threshold = field<std::vector<double>>(t, "threshold");
        const auto left = field<std::vector<std::int32_t>>(t, "left");
        const auto right = field<std::vector<std::int32_t>>(t, "right");
        const auto value = field<std::vector<double>>(t, "value");
        const std::size_t n = feature.size();
        if (n == 0 || threshold.size() != n || left.size() != n || right.size() != n || value.size() != n)
            throw ModelLoadError("malformed forest model: node arrays differ in length");
        DecisionTree tree;
        tree.nodes.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            auto& node = tree.nodes[i];
            node = {feature[i], threshold[i], left[i], right[i], value[i]};
            if (node.is_leaf()) {
                if (!(node.value >= 0.0 && node.value <= 1.0))
                    throw ModelLoadError("malformed forest model: leaf value outside [0,1]");
                continue;
            }
            const auto in_range = [&](std::int32_t c) {
                return c > static_cast<std::int32_t>(i) && static_cast<std::size_t>(c) < n;
            };
            if (node.feature >= m.n_features || !in_range(node.left) || !in_range(node.right))
                throw ModelLoadError("malformed forest model: invalid node at index " + std::to_string(i));
        }
        m.trees.push_back(std::move(tree));
    }
    return m;
}

void save_model(const std::filesystem::path& path, const LinearModel& model) {
    write_file(path, linear_model_to_json(model));
}

void save_model(const std::filesystem::path& path, const ForestModel& model) {
    write_file(path, forest_model_to_json(model));
}

LinearModel load_linear_model(const std::filesystem::path& path) {
    try {
        return linear_model_from_json(read_file(path));
    } catch (const ModelLoadError& e) {
        throw ModelLoadError(path.string() + ": " + e.what());
    }
}

ForestModel load_forest_model(const std::filesystem::path& path) {
    try {
        return forest_model_from_json(read_file(path));
    } catch (const ModelLoadError& e) {
        throw ModelLoadError(path.string() + ": " + e.what());
    }
}

} // namespace beetrack
