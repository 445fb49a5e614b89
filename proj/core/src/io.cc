// Copyright 2026 The qdouble Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qdouble/io.h"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace qdouble {

using nlohmann::json;

ConfigError::ConfigError(std::string path, const std::string &message)
    : std::invalid_argument(path + ": " + message), path_(std::move(path)) {
}

std::string read_text_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

namespace {

std::string index_path(const std::string &path, std::size_t i) {
    return path + "[" + std::to_string(i) + "]";
}

std::string key_path(const std::string &path, const char *key) {
    return path + "." + key;
}

const json &require(const json &j, const std::string &path, const char *key) {
    if (!j.is_object()) {
        throw ConfigError(path, "expected an object");
    }
    auto it = j.find(key);
    if (it == j.end()) {
        throw ConfigError(key_path(path, key), "missing field");
    }
    return *it;
}

long long require_integer(const json &j, const std::string &path) {
    if (!j.is_number_integer()) {
        throw ConfigError(path, "expected an integer");
    }
    return j.get<long long>();
}

FiniteGroup group_from_file(const std::filesystem::path &file, const std::string &path) {
    std::string text;
    try {
        text = read_text_file(file);
    } catch (const std::exception &ex) {
        throw ConfigError(path, ex.what());
    }
    try {
        return parse_group(text);
    } catch (const GroupError &ex) {
        throw ConfigError(path, file.string() + ": " + ex.what());
    }
}

}  // namespace

FiniteGroup group_from_json(const json &j, const std::string &path, const std::filesystem::path &base_dir) {
    auto resolve = [&](const std::string &name) {
        std::filesystem::path p(name);
        return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    };
    if (j.is_string()) {
        const std::string name = j.get<std::string>();
        try {
            return builtin_group(name);
        } catch (const std::invalid_argument &builtin_error) {
            auto file = resolve(name);
            if (std::filesystem::exists(file)) {
                return group_from_file(file, path);
            }
            throw ConfigError(path, builtin_error.what());
        }
    }
    if (!j.is_object()) {
        throw ConfigError(path, "expected a group name or object");
    }
    if (j.contains("file")) {
        const json &f = j.at("file");
        if (!f.is_string()) {
            throw ConfigError(key_path(path, "file"), "expected a string");
        }
        return group_from_file(resolve(f.get<std::string>()), key_path(path, "file"));
    }
    const json &name = require(j, path, "builtin");
    if (!name.is_string()) {
        throw ConfigError(key_path(path, "builtin"), "expected a string");
    }
    std::optional<std::size_t> parameter;
    if (j.contains("parameter")) {
        long long p = require_integer(j.at("parameter"), key_path(path, "parameter"));
        if (p < 1) {
            throw ConfigError(key_path(path, "parameter"), "must be at least 1");
        }
        parameter = static_cast<std::size_t>(p);
    }
    try {
        return builtin_group(name.get<std::string>(), parameter);
    } catch (const std::invalid_argument &ex) {
        throw ConfigError(key_path(path, "builtin"), ex.what());
    }
}

std::uint32_t id_from_json(const json &j, const std::string &path, std::size_t limit, const char *what) {
    long long v = require_integer(j, path);
    if (v < 0 || static_cast<unsigned long long>(v) >= limit) {
        throw ConfigError(path, std::string(what) + " " + std::to_string(v) + " out of range [0, " +
                                    std::to_string(limit) + ")");
    }
    return static_cast<std::uint32_t>(v);
}

std::vector<std::uint32_t> id_list_from_json(const json &j, const std::string &path, std::size_t limit,
                                             const char *what) {
    if (!j.is_array()) {
        throw ConfigError(path, "expected an array");
    }
    std::vector<std::uint32_t> ids;
    for (std::size_t i = 0; i < j.size(); i++) {
        ids.push_back(id_from_json(j[i], index_path(path, i), limit, what));
    }
    return ids;
}

Lattice lattice_from_json(const json &j, const std::string &path) {
    if (!j.is_object()) {
        throw ConfigError(path, "expected an object");
    }
    if (j.contains("type")) {
        const json &type = j.at("type");
        if (type != "torus") {
            throw ConfigError(key_path(path, "type"), "unknown lattice type (expected \"torus\")");
        }
        long long lx = require_integer(require(j, path, "lx"), key_path(path, "lx"));
        long long ly = require_integer(require(j, path, "ly"), key_path(path, "ly"));
        if (lx < 2 || lx > 4096) {
            throw ConfigError(key_path(path, "lx"), "must be in [2, 4096]");
        }
        if (ly < 2 || ly > 4096) {
            throw ConfigError(key_path(path, "ly"), "must be in [2, 4096]");
        }
        return torus(static_cast<std::size_t>(lx), static_cast<std::size_t>(ly));
    }
    long long n = require_integer(require(j, path, "vertices"), key_path(path, "vertices"));
    if (n < 1) {
        throw ConfigError(key_path(path, "vertices"), "must be positive");
    }
    const json &edges_json = require(j, path, "edges");
    const std::string edges_path = key_path(path, "edges");
    if (!edges_json.is_array()) {
        throw ConfigError(edges_path, "expected an array");
    }
    std::vector<Edge> edges;
    for (std::size_t e = 0; e < edges_json.size(); e++) {
        const json &pair = edges_json[e];
        std::string p = index_path(edges_path, e);
        if (!pair.is_array() || pair.size() != 2) {
            throw ConfigError(p, "expected [tail, head]");
        }
        edges.push_back({id_from_json(pair[0], index_path(p, 0), static_cast<std::size_t>(n), "vertex"),
                         id_from_json(pair[1], index_path(p, 1), static_cast<std::size_t>(n), "vertex")});
    }
    const json &faces_json = require(j, path, "faces");
    const std::string faces_path = key_path(path, "faces");
    if (!faces_json.is_array()) {
        throw ConfigError(faces_path, "expected an array");
    }
    std::vector<std::vector<Step>> faces;
    for (std::size_t f = 0; f < faces_json.size(); f++) {
        std::string fp = index_path(faces_path, f);
        if (!faces_json[f].is_array()) {
            throw ConfigError(fp, "expected an array of [edge, sign]");
        }
        std::vector<Step> boundary;
        for (std::size_t k = 0; k < faces_json[f].size(); k++) {
            const json &step = faces_json[f][k];
            std::string sp = index_path(fp, k);
            if (!step.is_array() || step.size() != 2) {
                throw ConfigError(sp, "expected [edge, sign]");
            }
            EdgeId e = id_from_json(step[0], index_path(sp, 0), edges.size(), "edge");
            long long s = require_integer(step[1], index_path(sp, 1));
            if (s != 1 && s != -1) {
                throw ConfigError(index_path(sp, 1), "sign must be +1 or -1");
            }
            boundary.push_back({e, static_cast<int>(s)});
        }
        faces.push_back(std::move(boundary));
    }
    try {
        Lattice lattice(static_cast<std::size_t>(n), std::move(edges), std::move(faces));
        require_closed_surface(lattice);
        return lattice;
    } catch (const LatticeError &ex) {
        throw ConfigError(path, ex.what());
    }
}

Element element_from_json(const FiniteGroup &group, const json &j, const std::string &path) {
    if (j.is_string()) {
        auto found = group.find_label(j.get<std::string>());
        if (!found) {
            throw ConfigError(path, "no element labelled \"" + j.get<std::string>() + "\" in " + group.name());
        }
        return *found;
    }
    return static_cast<Element>(id_from_json(j, path, group.order(), "element"));
}

StringSpec string_spec_from_json(const Lattice &lattice, const json &j, const std::string &path) {
    StringSpec spec;
    const json &base = require(j, path, "base");
    const std::string base_path = key_path(path, "base");
    if (!base.is_array()) {
        throw ConfigError(base_path, "expected an array of [edge, sign]");
    }
    for (std::size_t k = 0; k < base.size(); k++) {
        std::string sp = index_path(base_path, k);
        if (!base[k].is_array() || base[k].size() != 2) {
            throw ConfigError(sp, "expected [edge, sign]");
        }
        EdgeId e = id_from_json(base[k][0], index_path(sp, 0), lattice.edge_count(), "edge");
        long long s = require_integer(base[k][1], index_path(sp, 1));
        if (s != 1 && s != -1) {
            throw ConfigError(index_path(sp, 1), "sign must be +1 or -1");
        }
        spec.base.push_back({e, static_cast<int>(s)});
    }
    if (j.contains("teeth")) {
        const json &teeth = j.at("teeth");
        const std::string teeth_path = key_path(path, "teeth");
        if (!teeth.is_array()) {
            throw ConfigError(teeth_path, "expected an array of [edge, attach_index, \"out\"|\"in\"]");
        }
        for (std::size_t k = 0; k < teeth.size(); k++) {
            std::string tp = index_path(teeth_path, k);
            if (!teeth[k].is_array() || teeth[k].size() != 3) {
                throw ConfigError(tp, "expected [edge, attach_index, \"out\"|\"in\"]");
            }
            EdgeId e = id_from_json(teeth[k][0], index_path(tp, 0), lattice.edge_count(), "edge");
            long long attach = require_integer(teeth[k][1], index_path(tp, 1));
            if (attach < 0) {
                throw ConfigError(index_path(tp, 1), "attach index must be non-negative");
            }
            const json &o = teeth[k][2];
            if (o != "out" && o != "in") {
                throw ConfigError(index_path(tp, 2), "orientation must be \"out\" or \"in\"");
            }
            spec.teeth.push_back({e, static_cast<std::size_t>(attach),
                                  o == "out" ? ToothOrientation::Outgoing : ToothOrientation::Incoming});
        }
    }
    if (j.contains("closed")) {
        if (!j.at("closed").is_boolean()) {
            throw ConfigError(key_path(path, "closed"), "expected a boolean");
        }
        spec.closed = j.at("closed").get<bool>();
    }
    try {
        validate_string_spec(lattice, spec);
    } catch (const LatticeError &ex) {
        throw ConfigError(path, ex.what());
    }
    return spec;
}

json string_spec_to_json(const StringSpec &spec) {
    json base = json::array();
    for (const Step &s : spec.base) {
        base.push_back({s.edge, s.sign});
    }
    json teeth = json::array();
    for (const Tooth &t : spec.teeth) {
        teeth.push_back({t.edge, t.attach_index, t.orientation == ToothOrientation::Outgoing ? "out" : "in"});
    }
    return {{"base", base}, {"teeth", teeth}, {"closed", spec.closed}};
}

void write_state_jsonl(const SparseState &state, std::ostream &out) {
    for (std::size_t i = 0; i < state.size(); i++) {
        DoubledConfig c = state.config(i);
        json line;
        line["ket"] = c.ket;
        line["bra"] = c.bra;
        line["re"] = state.amplitude(i).real();
        line["im"] = state.amplitude(i).imag();
        out << line.dump() << "\n";
    }
}

SparseState read_state_jsonl(const ModelPtr &model, std::istream &in) {
    SparseState state(model);
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        number++;
        if (line.empty()) {
            continue;
        }
        const std::string path = "line " + std::to_string(number);
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error &ex) {
            throw ConfigError(path, ex.what());
        }
        DoubledConfig c;
        for (const char *layer : {"ket", "bra"}) {
            auto ids = id_list_from_json(require(j, path, layer), key_path(path, layer), model->group().order(),
                                         "element");
            if (ids.size() != model->edge_count()) {
                throw ConfigError(key_path(path, layer), "expected " + std::to_string(model->edge_count()) +
                                                             " elements");
            }
            (std::string(layer) == "ket" ? c.ket : c.bra).assign(ids.begin(), ids.end());
        }
        const json &re = require(j, path, "re");
        const json &im = require(j, path, "im");
        if (!re.is_number() || !im.is_number()) {
            throw ConfigError(path, "amplitude parts must be numbers");
        }
        state.add(c, Amplitude(re.get<double>(), im.get<double>()));
    }
    return state;
}

}  // namespace qdouble
