#include "vidmine/state_io.hpp"

#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace vidmine {

namespace {

constexpr int kFormatVersion = 1;

json box_to_json(const BoundingBox& b) { return json::array({b.cx, b.cy, b.w, b.h}); }

BoundingBox box_from_json(const json& j) {
    BoundingBox b;
    b.cx = j.at(0).get<double>();
    b.cy = j.at(1).get<double>();
    b.w = j.at(2).get<double>();
    b.h = j.at(3).get<double>();
    return b;
}

json model_to_json(const LinearModel& m) {
    return json{{"bias", m.bias}, {"weights", m.weights}};
}

LinearModel model_from_json(const json& j) {
    LinearModel m;
    m.bias = j.at("bias").get<double>();
    m.weights = j.at("weights").get<std::vector<double>>();
    return m;
}

}  // namespace

void save_state(const PipelineState& state, const fs::path& path) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());

        json header{{"format", "vidmine-state"},
                    {"version", kFormatVersion},
                    {"iteration", state.iteration},
                    {"rng_seed", state.rng_seed},
                    {"feature_dim", state.feature_dim}};
        out << header.dump() << '\n';

        for (const auto& [c, insts] : state.positives) {
            for (const MinedInstance& inst : insts) {
                json j{{"type", "positive"},
                       {"class_id", c},
                       {"video_id", inst.video_id},
                       {"frame_id", inst.frame_id},
                       {"box", box_to_json(inst.box)},
                       {"iter", inst.source_iteration},
                       {"seed_score", inst.seed_score},
                       {"feature", inst.feature.values}};
                out << j.dump() << '\n';
            }
        }
        for (const NegativeExample& neg : state.negatives) {
            json j{{"type", "negative"},
                   {"background", neg.from_background},
                   {"class_id", neg.class_id},
                   {"feature", neg.feature.values}};
            out << j.dump() << '\n';
        }
        for (const auto& [c, det] : state.detectors) {
            json models = json::array();
            for (const LinearModel& m : det.models) models.push_back(model_to_json(m));
            json j{{"type", "detector"},
                   {"class_id", c},
                   {"variant",
                    det.variant == DetectorVariant::ExemplarEnsemble ? "exemplar" : "single"},
                   {"nms_threshold", det.nms_threshold},
                   {"models", models}};
            out << j.dump() << '\n';
        }
        for (const auto& [c, reg] : state.regressors) {
            json heads = json::array();
            for (const LinearModel& head : reg.heads) heads.push_back(model_to_json(head));
            json j{{"type", "regressor"}, {"class_id", c}, {"heads", heads}};
            out << j.dump() << '\n';
        }
        // Consumed frames grouped per video to keep the archive short.
        std::map<std::string, std::vector<int>> by_video;
        for (const auto& [video_id, frame_id] : state.consumed)
            by_video[video_id].push_back(frame_id);
        for (const auto& [video_id, frames] : by_video) {
            json j{{"type", "consumed"}, {"video_id", video_id}, {"frames", frames}};
            out << j.dump() << '\n';
        }
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

PipelineState load_state(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());

    auto fail = [&path](int line_no, const std::string& what) -> std::runtime_error {
        return std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + what);
    };

    PipelineState state;
    std::string line;
    int line_no = 0;
    if (!std::getline(in, line)) throw fail(1, "empty state file");
    ++line_no;
    try {
        json header = json::parse(line);
        if (header.at("format").get<std::string>() != "vidmine-state")
            throw fail(line_no, "not a state archive");
        int version = header.at("version").get<int>();
        if (version != kFormatVersion)
            throw fail(line_no, "unsupported state version " + std::to_string(version));
        state.iteration = header.at("iteration").get<int>();
        state.rng_seed = header.at("rng_seed").get<std::uint64_t>();
        state.feature_dim = header.at("feature_dim").get<int>();
    } catch (const json::exception& e) {
        throw fail(line_no, std::string("corrupt header: ") + e.what());
    }

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw fail(line_no, std::string("corrupt record: ") + e.what());
        }
        try {
            std::string type = j.at("type").get<std::string>();
            if (type == "positive") {
                MinedInstance inst;
                int c = j.at("class_id").get<int>();
                inst.video_id = j.at("video_id").get<std::string>();
                inst.frame_id = j.at("frame_id").get<int>();
                inst.box = box_from_json(j.at("box"));
                inst.source_iteration = j.at("iter").get<int>();
                inst.seed_score = j.at("seed_score").get<double>();
                inst.feature.values = j.at("feature").get<std::vector<double>>();
                state.positives[c].push_back(std::move(inst));
            } else if (type == "negative") {
                NegativeExample neg;
                neg.from_background = j.at("background").get<bool>();
                neg.class_id = j.at("class_id").get<int>();
                neg.feature.values = j.at("feature").get<std::vector<double>>();
                state.negatives.push_back(std::move(neg));
            } else if (type == "detector") {
                DetectorModel det;
                det.class_id = j.at("class_id").get<int>();
                std::string variant = j.at("variant").get<std::string>();
                if (variant == "exemplar")
                    det.variant = DetectorVariant::ExemplarEnsemble;
                else if (variant == "single")
                    det.variant = DetectorVariant::SingleSvm;
                else
                    throw fail(line_no, "unknown detector variant '" + variant + "'");
                det.nms_threshold = j.at("nms_threshold").get<double>();
                for (const json& m : j.at("models")) det.models.push_back(model_from_json(m));
                if (det.models.empty()) throw fail(line_no, "detector without models");
                state.detectors[det.class_id] = std::move(det);
            } else if (type == "regressor") {
                BBoxRegressor reg;
                const json& heads = j.at("heads");
                if (heads.size() != reg.heads.size())
                    throw fail(line_no, "regressor needs exactly 4 heads");
                for (std::size_t h = 0; h < reg.heads.size(); ++h)
                    reg.heads[h] = model_from_json(heads.at(h));
                state.regressors[j.at("class_id").get<int>()] = std::move(reg);
            } else if (type == "consumed") {
                std::string video_id = j.at("video_id").get<std::string>();
                for (const json& f : j.at("frames"))
                    state.consumed.insert({video_id, f.get<int>()});
            } else {
                throw fail(line_no, "unknown record type '" + type + "'");
            }
        } catch (const json::exception& e) {
            throw fail(line_no, std::string("corrupt record: ") + e.what());
        }
    }
    return state;
}

}  // namespace vidmine
