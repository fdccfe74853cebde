#pragma once

#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "icregion/channel.hpp"
#include "icregion/region.hpp"

namespace icregion {

using ojson = nlohmann::ordered_json;

// --------------------------------------------------------------------------
// Channel files. Gains are stored user-major as [re, im] pairs; indices are
// 0-based in files and 1-based only in human-readable reports.
// --------------------------------------------------------------------------

inline ojson to_json(const GaussianIC& ic) {
    ojson j;
    j["type"] = "gaussian";
    j["k"] = ic.k;
    j["powers"] = ic.powers;
    ojson gains = ojson::array();
    for (int i = 0; i < ic.k; ++i) {
        ojson row = ojson::array();
        for (int r = 0; r < ic.k; ++r)
            row.push_back({ic.gains[i][r].real(), ic.gains[i][r].imag()});
        gains.push_back(std::move(row));
    }
    j["gains"] = std::move(gains);
    return j;
}

inline ojson to_json(const Dmic& ch) {
    ojson j;
    j["type"] = "dmic";
    j["k"] = ch.k;
    j["input_sizes"] = ch.input_sizes;
    j["output_sizes"] = ch.output_sizes;
    j["transitions"] = ch.transitions;
    return j;
}

inline ojson to_json(const ProductDistribution& dist) {
    ojson j;
    j["q_weights"] = dist.q_weights;
    j["pmfs"] = dist.pmfs;
    return j;
}

template <typename Json>
GaussianIC gaussian_from_json(const Json& j) {
    GaussianIC ic;
    ic.k = j.at("k").template get<int>();
    ic.powers = j.at("powers").template get<std::vector<double>>();
    const auto& gains = j.at("gains");
    if (static_cast<int>(gains.size()) != ic.k)
        throw ValidationError("gains must have k rows");
    ic.gains.assign(ic.k, std::vector<cplx>(ic.k));
    for (int i = 0; i < ic.k; ++i) {
        if (static_cast<int>(gains[i].size()) != ic.k)
            throw ValidationError("gains row " + std::to_string(i) + " must have k entries");
        for (int r = 0; r < ic.k; ++r) {
            const auto& pair = gains[i][r];
            if (pair.size() != 2)
                throw ValidationError("gains entries must be [re, im] pairs");
            ic.gains[i][r] = cplx(pair[0].template get<double>(), pair[1].template get<double>());
        }
    }
    ensure_valid(ic);
    return ic;
}

template <typename Json>
Dmic dmic_from_json(const Json& j) {
    Dmic ch;
    ch.k = j.at("k").template get<int>();
    ch.input_sizes = j.at("input_sizes").template get<std::vector<int>>();
    ch.output_sizes = j.at("output_sizes").template get<std::vector<int>>();
    ch.transitions =
        j.at("transitions").template get<std::vector<std::vector<std::vector<double>>>>();
    ensure_valid(ch);
    return ch;
}

template <typename Json>
ProductDistribution distribution_from_json(const Json& j) {
    ProductDistribution dist;
    dist.q_weights = j.at("q_weights").template get<std::vector<double>>();
    dist.pmfs = j.at("pmfs").template get<std::vector<std::vector<std::vector<double>>>>();
    return dist;
}

using Channel = std::variant<GaussianIC, Dmic>;

template <typename Json>
Channel channel_from_json(const Json& j) {
    const std::string type = j.at("type").template get<std::string>();
    if (type == "gaussian") return gaussian_from_json(j);
    if (type == "dmic") return dmic_from_json(j);
    throw ValidationError("unknown channel type \"" + type + "\"");
}

inline Channel load_channel(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    ojson j;
    in >> j;
    return channel_from_json(j);
}

inline ProductDistribution load_distribution(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    ojson j;
    in >> j;
    return distribution_from_json(j);
}

inline void save_json(const ojson& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << j.dump(2) << "\n";
}

// --------------------------------------------------------------------------
// Polytope dumps: half-spaces with their originating inequalities, plus the
// enumerated vertex list.
// --------------------------------------------------------------------------

inline ojson to_json(const RatePolytope& p, bool include_vertices = true) {
    ojson j;
    j["dim"] = p.dim;
    j["kind"] = p.kind;
    ojson hs = ojson::array();
    for (const auto& h : p.halfspaces) {
        ojson e;
        e["users"] = h.users;
        e["bound"] = h.bound;
        ojson sources = ojson::array();
        for (const auto& s : h.sources) sources.push_back({{"label", s.label}, {"bound", s.bound}});
        e["sources"] = std::move(sources);
        hs.push_back(std::move(e));
    }
    j["halfspaces"] = std::move(hs);
    if (include_vertices) {
        ojson vs = ojson::array();
        for (const auto& v : vertices(p)) vs.push_back(v.rates);
        j["vertices"] = std::move(vs);
    }
    return j;
}

inline ojson to_json(const GeneratedInstance& gi) {
    ojson j = to_json(gi.ic);
    if (gi.powers_rescaled) {
        j["meta"] = {{"powers_rescaled", true}, {"power_scale", gi.power_scale}};
    }
    return j;
}

}  // namespace icregion
