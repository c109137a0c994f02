#include "edtr/dirichlet.hpp"
#include "edtr/error.hpp"

namespace edtr {

using nlohmann::json;

json head_to_json(const HeadParameters& params) {
    json layers = json::array();
    for (const auto& l : params.layers) {
        json rows = json::array();
        for (std::size_t r = 0; r < l.out; ++r) rows.push_back(std::vector<double>(l.row(r).begin(), l.row(r).end()));
        layers.push_back({{"w", std::move(rows)}, {"b", l.bias}});
    }
    return {
        {"version", kHeadFormatVersion},
        {"k", params.k},
        {"n", params.n},
        {"activation", params.activation == Activation::Relu ? "relu" : "tanh"},
        {"layers", std::move(layers)},
    };
}

HeadParameters head_from_json(const json& j) {
    try {
        if (!j.contains("version")) throw Error(Errc::IncompatibleParameters, "head file lacks a version field");
        if (j.at("version").get<int>() != kHeadFormatVersion) {
            throw Error(Errc::IncompatibleParameters, "unsupported head format version");
        }
        const auto act = j.value("activation", std::string("relu"));
        if (act != "relu" && act != "tanh") throw Error(Errc::IncompatibleParameters, "unknown activation " + act);
        auto p = HeadParameters::zeros(j.at("k").get<std::size_t>(), j.at("n").get<std::size_t>(),
                                       act == "relu" ? Activation::Relu : Activation::Tanh);
        const auto& layers = j.at("layers");
        if (layers.size() != p.layers.size()) throw Error(Errc::IncompatibleParameters, "head must have 3 layers");
        for (std::size_t l = 0; l < p.layers.size(); ++l) {
            auto& layer = p.layers[l];
            const auto& rows = layers[l].at("w");
            if (rows.size() != layer.out) throw Error(Errc::IncompatibleParameters, "layer row count mismatch");
            for (std::size_t r = 0; r < layer.out; ++r) {
                const auto row = rows[r].get<std::vector<double>>();
                if (row.size() != layer.in) throw Error(Errc::IncompatibleParameters, "layer column count mismatch");
                std::copy(row.begin(), row.end(), layer.row(r).begin());
            }
            layer.bias = layers[l].at("b").get<std::vector<double>>();
        }
        p.validate();
        return p;
    } catch (const json::exception& e) {
        throw Error(Errc::IncompatibleParameters, std::string("malformed head file: ") + e.what());
    }
}

}  // namespace edtr
