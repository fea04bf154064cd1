#include "lpvss/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

namespace lpvss {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

json layer_to_json(const DenseLayer& l) {
    return json{{"in", l.in_width()},
                {"out", l.out_width()},
                {"activation", activation_name(l.activation)},
                {"weight", l.weight.raw()},
                {"bias", l.bias}};
}

DenseLayer layer_from_json(const json& j) {
    DenseLayer l;
    const std::size_t in = j.at("in").get<std::size_t>();
    const std::size_t out = j.at("out").get<std::size_t>();
    l.weight = Mat(out, in, j.at("weight").get<std::vector<double>>());
    l.bias = j.at("bias").get<Vec>();
    if (l.bias.size() != out) throw ShapeMismatch("checkpoint: bias length mismatch");
    l.activation = activation_from_name(j.at("activation").get<std::string>());
    l.weight.require_finite("checkpoint weight");
    for (double v : l.bias)
        if (!std::isfinite(v)) throw DataError("checkpoint: non-finite bias");
    return l;
}

json layers_to_json(const std::vector<DenseLayer>& layers) {
    json arr = json::array();
    for (const auto& l : layers) arr.push_back(layer_to_json(l));
    return arr;
}

std::vector<DenseLayer> layers_from_json(const json& arr) {
    std::vector<DenseLayer> layers;
    for (const auto& j : arr) layers.push_back(layer_from_json(j));
    return layers;
}

json mat_to_json(const Mat& m) {
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.raw()}};
}

Mat mat_from_json(const json& j) {
    Mat m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
          j.at("data").get<std::vector<double>>());
    m.require_finite("checkpoint matrix");
    return m;
}

json normalizer_to_json(const Normalizer& nz) {
    return json{{"mean", nz.mean},
                {"std", nz.stddev},
                {"m", nz.m},
                {"r", nz.r},
                {"constant_channels", nz.constant_channels}};
}

Normalizer normalizer_from_json(const json& j) {
    Normalizer nz;
    nz.mean = j.at("mean").get<std::vector<double>>();
    nz.stddev = j.at("std").get<std::vector<double>>();
    nz.m = j.at("m").get<std::size_t>();
    nz.r = j.at("r").get<std::size_t>();
    nz.constant_channels = j.at("constant_channels").get<std::vector<std::size_t>>();
    if (nz.mean.size() != nz.m + nz.r || nz.stddev.size() != nz.m + nz.r)
        throw ShapeMismatch("checkpoint: normalizer channel mismatch");
    return nz;
}

json config_to_json(const TrainConfig& c) {
    return json{{"L", c.window_length},
                {"stride", c.stride},
                {"batch", c.batch_size},
                {"lr", c.learning_rate},
                {"epochs", c.epochs},
                {"lambda", c.lambda},
                {"seed", c.seed},
                {"gamma", c.gamma},
                {"patience", c.patience},
                {"order", c.order_n},
                {"loss_norm", c.loss_norm == LossNorm::printed ? "printed" : "natural"}};
}

TrainConfig config_from_json(const json& j) {
    TrainConfig c;
    c.window_length = j.at("L").get<std::size_t>();
    c.stride = j.at("stride").get<std::size_t>();
    c.batch_size = j.at("batch").get<std::size_t>();
    c.learning_rate = j.at("lr").get<double>();
    c.epochs = j.at("epochs").get<std::size_t>();
    c.lambda = j.at("lambda").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.gamma = j.at("gamma").get<double>();
    c.patience = j.at("patience").get<std::size_t>();
    c.order_n = j.at("order").get<std::size_t>();
    c.loss_norm =
        j.at("loss_norm").get<std::string>() == "natural" ? LossNorm::natural : LossNorm::printed;
    return c;
}

void write_json(const json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << j.dump(1) << '\n';
}

json common_header(ModelKind kind, const Normalizer* normalizer, const CheckpointMeta& meta) {
    json j;
    j["format_version"] = kFormatVersion;
    j["kind"] = kind == ModelKind::nnss ? "nnss" : "constant";
    j["seed"] = meta.seed;
    j["normalizer"] = normalizer ? normalizer_to_json(*normalizer) : json(nullptr);
    j["config"] = meta.config ? config_to_json(*meta.config) : json(nullptr);
    return j;
}

}  // namespace

void save_checkpoint(const NnssModel& model, const Normalizer* normalizer,
                     const CheckpointMeta& meta, const std::string& path) {
    model.validate();
    json j = common_header(ModelKind::nnss, normalizer, meta);
    j["n"] = model.n;
    j["m"] = model.m;
    j["r"] = model.r;
    j["gamma"] = model.gamma;
    j["eps_tilde"] = model.eps_tilde;
    j["train_eps"] = model.train_eps;
    j["encoder"] = layers_to_json(model.encoder.layers);
    j["generator"] = layers_to_json(model.generator.layers);
    write_json(j, path);
}

void save_checkpoint(const ConstantSsModel& model, const Normalizer* normalizer,
                     const CheckpointMeta& meta, const std::string& path) {
    model.validate();
    json j = common_header(ModelKind::constant, normalizer, meta);
    j["n"] = model.n;
    j["m"] = model.m;
    j["r"] = model.r;
    j["gamma"] = model.factors.gamma;
    j["eps_tilde"] = model.factors.eps_tilde;
    j["train_eps"] = model.train_eps;
    j["encoder"] = layers_to_json(model.encoder.layers);
    j["W"] = mat_to_json(model.factors.W);
    j["V"] = mat_to_json(model.factors.V);
    j["B"] = mat_to_json(model.B);
    j["C"] = mat_to_json(model.C);
    write_json(j, path);
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw DataError("'" + path + "' is not valid JSON: " + e.what());
    }

    try {
        if (j.at("format_version").get<int>() != kFormatVersion)
            throw DataError("checkpoint format version not supported");

        LoadedCheckpoint loaded;
        loaded.meta.seed = j.at("seed").get<std::uint64_t>();
        if (!j.at("config").is_null()) loaded.meta.config = config_from_json(j.at("config"));
        if (!j.at("normalizer").is_null())
            loaded.normalizer = normalizer_from_json(j.at("normalizer"));

        const std::string kind = j.at("kind").get<std::string>();
        const auto n = j.at("n").get<std::size_t>();
        const auto m = j.at("m").get<std::size_t>();
        const auto r = j.at("r").get<std::size_t>();

        if (kind == "nnss") {
            loaded.kind = ModelKind::nnss;
            NnssModel& model = loaded.nnss;
            model.n = n;
            model.m = m;
            model.r = r;
            model.gamma = j.at("gamma").get<double>();
            model.eps_tilde = j.at("eps_tilde").get<double>();
            model.train_eps = j.at("train_eps").get<bool>();
            model.encoder.layers = layers_from_json(j.at("encoder"));
            model.generator.layers = layers_from_json(j.at("generator"));
            model.generator.n = n;
            model.generator.m = m;
            model.generator.r = r;
            model.validate();
        } else if (kind == "constant") {
            loaded.kind = ModelKind::constant;
            ConstantSsModel& model = loaded.constant;
            model.n = n;
            model.m = m;
            model.r = r;
            model.train_eps = j.at("train_eps").get<bool>();
            model.encoder.layers = layers_from_json(j.at("encoder"));
            model.factors.W = mat_from_json(j.at("W"));
            model.factors.V = mat_from_json(j.at("V"));
            model.factors.eps_tilde = j.at("eps_tilde").get<double>();
            model.factors.gamma = j.at("gamma").get<double>();
            model.B = mat_from_json(j.at("B"));
            model.C = mat_from_json(j.at("C"));
            model.validate();
        } else {
            throw DataError("checkpoint kind '" + kind + "' not recognized");
        }
        return loaded;
    } catch (const json::exception& e) {
        throw DataError("'" + path + "': malformed checkpoint: " + e.what());
    }
}

}  // namespace lpvss
