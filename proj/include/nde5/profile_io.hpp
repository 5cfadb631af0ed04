#pragma once

// Profile serialization: CSV with header `z,g,g1,g2,g3,g4` at 16 significant
// digits plus a JSON sidecar carrying kind, params and provenance.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "nde5/models.hpp"

namespace nde5 {

inline std::string format_g16(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16g", x);
    return buf;
}

inline void write_profile_csv(const Profile& prof, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << "z,g,g1,g2,g3,g4\n";
    for (std::size_t i = 0; i < prof.mesh.size(); ++i) {
        const Jet5& j = prof.jets[i];
        os << format_g16(prof.mesh[i]) << ',' << format_g16(j.d0) << ',' << format_g16(j.d1) << ','
           << format_g16(j.d2) << ',' << format_g16(j.d3) << ',' << format_g16(j.d4) << '\n';
    }
}

inline nlohmann::json profile_sidecar(const Profile& prof) {
    nlohmann::json meta;
    meta["kind"] = to_string(prof.kind);
    meta["family"] = to_string(prof.family);
    meta["params"] = {{"alpha", prof.params.alpha}, {"beta", prof.params.beta}, {"c0", prof.params.c0}};
    nlohmann::json prov;
    for (const auto& [k, v] : prof.provenance) prov[k] = v;
    meta["provenance"] = prov;
    meta["points"] = prof.mesh.size();
    return meta;
}

inline void write_profile(const Profile& prof, const std::string& csv_path) {
    write_profile_csv(prof, csv_path);
    std::ofstream os(csv_path + ".json");
    if (!os) throw std::runtime_error("cannot open " + csv_path + ".json");
    os << profile_sidecar(prof).dump(2) << '\n';
}

inline Profile read_profile_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    Profile prof;
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("empty profile file " + path);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        double v[6];
        char comma;
        for (int i = 0; i < 6; ++i) {
            if (!(ss >> v[i])) throw std::runtime_error("bad row in " + path);
            if (i < 5) ss >> comma;
        }
        prof.mesh.push_back(v[0]);
        prof.jets.push_back(Jet5{v[1], v[2], v[3], v[4], v[5]});
    }
    prof.provenance["loaded_from_csv"] = 1.0;

    std::ifstream js(path + ".json");
    if (js) {
        nlohmann::json meta = nlohmann::json::parse(js, nullptr, false);
        if (!meta.is_discarded()) {
            if (meta.contains("kind")) prof.kind = nde_kind_from_string(meta["kind"].get<std::string>());
            if (meta.contains("params") && meta["params"].contains("alpha"))
                prof.params = SimilarityParams(meta["params"]["alpha"].get<double>(),
                                               meta["params"].value("c0", 1.0));
            if (meta.contains("family")) {
                const std::string f = meta["family"].get<std::string>();
                if (f == "shock") prof.family = Family::Shock;
                else if (f == "rarefaction") prof.family = Family::Rarefaction;
                else if (f == "blowup") prof.family = Family::Blowup;
                else if (f == "global") prof.family = Family::Global;
                else if (f == "phase-plane") prof.family = Family::PhasePlane;
                else if (f == "compacton") prof.family = Family::Compacton;
            }
        }
    }
    return prof;
}

} // namespace nde5
