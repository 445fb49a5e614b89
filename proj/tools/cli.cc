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

#include "cli.h"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>

namespace qdouble::cli {

using nlohmann::json;

const std::vector<CatalogEntry> &list_experiments() {
    static const std::vector<CatalogEntry> catalog = {
        {"prepare-verify", "prepare the ground state by local channels and certify every projector family",
         {"group", "lattice"}},
        {"braid-abelian", "Z2 braiding with U = (O_X + O_Z)/sqrt(2) and ancilla detection of the flux pair",
         {"lattice", "geometry.OZ.path", "geometry.OX.dual_path", "geometry.WX.around", "geometry.shaded_face"}},
        {"braid-nonabelian", "closed comb C around an open comb L; <B_f> in both orders against the census",
         {"group", "lattice", "g", "h", "geometry.loop", "geometry.open", "geometry.face", "expect.bf_rho1"}},
        {"restricted", "overlap with |I> and doubled stabilizers stay positive along an operation sequence",
         {"group", "lattice", "steps"}},
        {"elongation-check", "pin the elongation convention and check E^-1 A_L(g) E = A_L'(g)",
         {"group", "lattice", "geometry.L", "geometry.L_prime", "samples"}},
        {"un-check", "dense U_n recursion against (X_1 + Z_1...Z_n)/sqrt(2)", {"max_n"}},
        {"purification-check", "dense purification of the vertex channel plus channel trace and idempotence laws",
         {"group", "lattice", "degrees"}},
    };
    return catalog;
}

void print_catalog(std::ostream &out, bool as_json) {
    if (as_json) {
        json j = json::array();
        for (const auto &e : list_experiments()) {
            j.push_back({{"name", e.name}, {"description", e.description}, {"fields", e.fields}});
        }
        out << j.dump(2) << "\n";
        return;
    }
    for (const auto &e : list_experiments()) {
        out << std::left << std::setw(20) << e.name << e.description << "\n";
        out << std::setw(20) << "" << "fields:";
        for (const auto &f : e.fields) {
            out << " " << f;
        }
        out << "\n";
    }
}

namespace {

const std::set<std::string> kTopLevelKeys = {"experiment", "description", "group",   "lattice", "seed",
                                             "samples",    "tolerances",  "output",  "geometry", "g",
                                             "h",          "expect",      "steps",   "max_n",    "degrees",
                                             "allow_large"};

std::string valid_names() {
    std::string names;
    for (const auto &e : list_experiments()) {
        names += (names.empty() ? "" : ", ") + e.name;
    }
    return names;
}

const json *optional_field(const json &j, const char *key) {
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

double positive_number(const json &j, const std::string &path) {
    if (!j.is_number() || !(j.get<double>() > 0)) {
        throw ConfigError(path, "expected a positive number");
    }
    return j.get<double>();
}

std::size_t positive_integer(const json &j, const std::string &path) {
    if (!j.is_number_integer() || j.get<long long>() < 1) {
        throw ConfigError(path, "expected a positive integer");
    }
    return static_cast<std::size_t>(j.get<long long>());
}

Lattice default_lattice(const std::string &experiment, const FiniteGroup *group) {
    if (experiment == "braid-abelian" || experiment == "elongation-check") {
        return torus(3, 3);
    }
    if (experiment == "restricted" && group != nullptr && group->order() == 2) {
        return torus(3, 3);
    }
    return torus(2, 2);
}

StringSpec loop_from_json(const Lattice &lattice, const json &j, const std::string &path) {
    if (j.is_object() && j.contains("around")) {
        auto faces = id_list_from_json(j.at("around"), path + ".around", lattice.face_count(), "face");
        const json *start = optional_field(j, "start");
        if (start == nullptr) {
            throw ConfigError(path + ".start", "missing field");
        }
        VertexId v = id_from_json(*start, path + ".start", lattice.vertex_count(), "vertex");
        try {
            return closed_comb_around(lattice, faces, v);
        } catch (const LatticeError &ex) {
            throw ConfigError(path, ex.what());
        }
    }
    return string_spec_from_json(lattice, j, path);
}

void parse_abelian(ExperimentConfig &config, const json *geometry) {
    const Model &model = *config.model;
    const Lattice &L = model.lattice();
    bool have_default = false;
    try {
        config.abelian = default_abelian_geometry(L);
        have_default = true;
    } catch (const std::invalid_argument &) {
    }
    if (geometry == nullptr) {
        if (!have_default) {
            throw ConfigError("$.geometry", "required for this lattice (no default placement)");
        }
        return;
    }
    auto block = [&](const char *key, const char *field) -> const json * {
        const json *b = optional_field(*geometry, key);
        if (b == nullptr) {
            if (!have_default) {
                throw ConfigError(std::string("$.geometry.") + key, "missing field");
            }
            return nullptr;
        }
        const json *f = b->is_object() ? optional_field(*b, field) : nullptr;
        if (f == nullptr) {
            throw ConfigError(std::string("$.geometry.") + key + "." + field, "missing field");
        }
        return f;
    };
    if (const json *p = block("OZ", "path")) {
        config.abelian.oz_path = id_list_from_json(*p, "$.geometry.OZ.path", L.vertex_count(), "vertex");
    }
    if (const json *p = block("OX", "dual_path")) {
        config.abelian.ox_dual_path = id_list_from_json(*p, "$.geometry.OX.dual_path", L.face_count(), "face");
    }
    if (const json *p = block("WX", "around")) {
        if (p->is_array()) {
            config.abelian.wx_around = id_list_from_json(*p, "$.geometry.WX.around", L.vertex_count(), "vertex");
        } else {
            config.abelian.wx_around = {id_from_json(*p, "$.geometry.WX.around", L.vertex_count(), "vertex")};
        }
    }
    if (const json *p = optional_field(*geometry, "shaded_face")) {
        config.abelian.shaded_face = id_from_json(*p, "$.geometry.shaded_face", L.face_count(), "face");
    } else if (!have_default) {
        throw ConfigError("$.geometry.shaded_face", "missing field");
    }
}

void parse_nonabelian(ExperimentConfig &config, const json &j, const json *geometry) {
    const Model &model = *config.model;
    const Lattice &L = model.lattice();
    if (L.torus_shape()) {
        config.nonabelian = default_nonabelian_geometry(L);
    } else if (geometry == nullptr) {
        throw ConfigError("$.geometry", "required for explicit lattices");
    }
    if (geometry != nullptr) {
        if (const json *p = optional_field(*geometry, "loop")) {
            config.nonabelian.loop = loop_from_json(L, *p, "$.geometry.loop");
        } else if (!L.torus_shape()) {
            throw ConfigError("$.geometry.loop", "missing field");
        }
        if (const json *p = optional_field(*geometry, "open")) {
            config.nonabelian.open = string_spec_from_json(L, *p, "$.geometry.open");
        } else if (!L.torus_shape()) {
            throw ConfigError("$.geometry.open", "missing field");
        }
        if (const json *p = optional_field(*geometry, "face")) {
            config.nonabelian.face = id_from_json(*p, "$.geometry.face", L.face_count(), "face");
        } else if (!L.torus_shape()) {
            throw ConfigError("$.geometry.face", "missing field");
        }
    }
    for (const char *key : {"g", "h"}) {
        const json *p = optional_field(j, key);
        if (p == nullptr) {
            throw ConfigError(std::string("$.") + key, "missing field");
        }
        (std::string(key) == "g" ? config.g : config.h) = element_from_json(model.group(), *p, std::string("$.") + key);
    }
    if (const json *expect = optional_field(j, "expect")) {
        if (const json *b = expect->is_object() ? optional_field(*expect, "bf_rho1") : nullptr) {
            if (!b->is_number()) {
                throw ConfigError("$.expect.bf_rho1", "expected a number");
            }
            config.expected_bf_rho1 = b->get<double>();
        } else {
            throw ConfigError("$.expect.bf_rho1", "missing field");
        }
    }
    double support = std::pow(static_cast<double>(model.group().order()), static_cast<double>(L.vertex_count()) - 1);
    const json *large = optional_field(j, "allow_large");
    if (support > 5e4 && !(large != nullptr && large->is_boolean() && large->get<bool>())) {
        throw ConfigError("$.lattice", "ground state would hold " + std::to_string(static_cast<long long>(support)) +
                                           " configurations; set \"allow_large\": true to run it");
    }
}

std::vector<RestrictedStep> parse_steps(const Model &model, const json &j) {
    const std::string path = "$.steps";
    if (!j.is_array()) {
        throw ConfigError(path, "expected an array");
    }
    const Lattice &L = model.lattice();
    std::vector<RestrictedStep> steps;
    for (std::size_t i = 0; i < j.size(); i++) {
        const std::string p = path + "[" + std::to_string(i) + "]";
        const json &s = j[i];
        const json *op = s.is_object() ? optional_field(s, "op") : nullptr;
        if (op == nullptr || !op->is_string()) {
            throw ConfigError(p + ".op", "expected one of prepare, channel, gauge, comb, pauli");
        }
        const std::string name = op->get<std::string>();
        RestrictedStep step;
        auto need = [&](const char *key) -> const json & {
            const json *f = optional_field(s, key);
            if (f == nullptr) {
                throw ConfigError(p + "." + key, "missing field");
            }
            return *f;
        };
        if (name == "prepare") {
            step.kind = RestrictedStep::Kind::Prepare;
        } else if (name == "channel") {
            step.kind = RestrictedStep::Kind::Channel;
            step.vertex = id_from_json(need("vertex"), p + ".vertex", L.vertex_count(), "vertex");
        } else if (name == "gauge") {
            step.kind = RestrictedStep::Kind::Gauge;
            step.vertex = id_from_json(need("vertex"), p + ".vertex", L.vertex_count(), "vertex");
            step.g = element_from_json(model.group(), need("g"), p + ".g");
        } else if (name == "comb") {
            step.kind = RestrictedStep::Kind::Comb;
            step.string = string_spec_from_json(L, need("string"), p + ".string");
            step.g = element_from_json(model.group(), need("g"), p + ".g");
        } else if (name == "pauli") {
            if (model.group().order() != 2) {
                throw ConfigError(p + ".op", "pauli steps need the group Z2");
            }
            step.kind = RestrictedStep::Kind::Pauli;
            if (const json *x = optional_field(s, "x")) {
                step.x_edges = id_list_from_json(*x, p + ".x", L.edge_count(), "edge");
            }
            if (const json *z = optional_field(s, "z")) {
                step.z_edges = id_list_from_json(*z, p + ".z", L.edge_count(), "edge");
            }
        } else {
            throw ConfigError(p + ".op", "unknown step \"" + name + "\" (expected prepare, channel, gauge, comb, pauli)");
        }
        steps.push_back(std::move(step));
    }
    return steps;
}

}  // namespace

ExperimentConfig parse_config(const json &j, const std::filesystem::path &base_dir) {
    if (!j.is_object()) {
        throw ConfigError("$", "expected an object");
    }
    for (const auto &[key, value] : j.items()) {
        if (!kTopLevelKeys.count(key)) {
            throw ConfigError("$." + key, "unknown field");
        }
    }
    ExperimentConfig config;
    const json *name = optional_field(j, "experiment");
    if (name == nullptr || !name->is_string()) {
        throw ConfigError("$.experiment", "expected one of: " + valid_names());
    }
    config.experiment = name->get<std::string>();
    bool known = false;
    for (const auto &e : list_experiments()) {
        known = known || e.name == config.experiment;
    }
    if (!known) {
        throw ConfigError("$.experiment", "unknown experiment \"" + config.experiment + "\"; valid: " + valid_names());
    }

    if (const json *s = optional_field(j, "seed")) {
        if (!s->is_number_unsigned() && !(s->is_number_integer() && s->get<std::int64_t>() >= 0)) {
            throw ConfigError("$.seed", "expected a non-negative integer");
        }
        config.options.seed = s->get<std::uint64_t>();
    }
    if (const json *s = optional_field(j, "samples")) {
        config.options.samples = positive_integer(*s, "$.samples");
    }
    if (const json *t = optional_field(j, "tolerances")) {
        if (!t->is_object()) {
            throw ConfigError("$.tolerances", "expected an object");
        }
        for (const auto &[key, value] : t->items()) {
            if (key == "value") {
                config.options.tolerance = positive_number(value, "$.tolerances.value");
            } else if (key == "strict") {
                config.options.strict_tolerance = positive_number(value, "$.tolerances.strict");
            } else {
                throw ConfigError("$.tolerances." + key, "unknown field (expected value, strict)");
            }
        }
    }
    if (const json *o = optional_field(j, "output")) {
        if (!o->is_string()) {
            throw ConfigError("$.output", "expected a string");
        }
        config.output = o->get<std::string>();
    }

    if (config.experiment == "un-check") {
        if (const json *n = optional_field(j, "max_n")) {
            config.max_n = positive_integer(*n, "$.max_n");
            if (config.max_n > 10) {
                throw ConfigError("$.max_n", "must be at most 10");
            }
        }
        return config;
    }

    const json *group_json = optional_field(j, "group");
    std::optional<FiniteGroup> group;
    if (group_json != nullptr) {
        group = group_from_json(*group_json, "$.group", base_dir);
    } else if (config.experiment == "braid-abelian") {
        group = cyclic_group(2);
    } else {
        throw ConfigError("$.group", "missing field");
    }
    Lattice lattice = optional_field(j, "lattice") != nullptr
                          ? lattice_from_json(j.at("lattice"), "$.lattice")
                          : default_lattice(config.experiment, &*group);
    config.model = make_model(std::move(*group), std::move(lattice));
    const json *geometry = optional_field(j, "geometry");
    if (geometry != nullptr && !geometry->is_object()) {
        throw ConfigError("$.geometry", "expected an object");
    }

    if (config.experiment == "braid-abelian") {
        if (config.model->group().order() != 2) {
            throw ConfigError("$.group", "braid-abelian needs the group Z2");
        }
        parse_abelian(config, geometry);
    } else if (config.experiment == "braid-nonabelian") {
        parse_nonabelian(config, j, geometry);
    } else if (config.experiment == "restricted") {
        const json *steps = optional_field(j, "steps");
        config.steps = steps != nullptr ? parse_steps(*config.model, *steps) : default_restricted_steps(*config.model);
    } else if (config.experiment == "elongation-check") {
        const Lattice &L = config.model->lattice();
        const json *Lj = geometry != nullptr ? optional_field(*geometry, "L") : nullptr;
        const json *Lpj = geometry != nullptr ? optional_field(*geometry, "L_prime") : nullptr;
        if (Lj == nullptr || Lpj == nullptr) {
            try {
                config.elongation = default_elongation_geometry(L);
            } catch (const std::invalid_argument &ex) {
                throw ConfigError("$.geometry", ex.what());
            }
        }
        if (Lj != nullptr) {
            config.elongation.L = string_spec_from_json(L, *Lj, "$.geometry.L");
        }
        if (Lpj != nullptr) {
            config.elongation.L_prime = string_spec_from_json(L, *Lpj, "$.geometry.L_prime");
        }
    } else if (config.experiment == "purification-check") {
        if (const json *d = optional_field(j, "degrees")) {
            if (!d->is_array() || d->empty()) {
                throw ConfigError("$.degrees", "expected a non-empty array");
            }
            for (std::size_t i = 0; i < d->size(); i++) {
                config.degrees.push_back(positive_integer((*d)[i], "$.degrees[" + std::to_string(i) + "]"));
            }
        } else {
            config.degrees = {config.model->group().order() == 2 ? std::size_t{4} : std::size_t{2}};
        }
        for (std::size_t i = 0; i < config.degrees.size(); i++) {
            double dim = std::pow(static_cast<double>(config.model->group().order()),
                                  static_cast<double>(config.degrees[i]) + 1.0);
            if (dim > static_cast<double>(DenseDensity::kMaxDimension)) {
                throw ConfigError("$.degrees[" + std::to_string(i) + "]",
                                  "dense dimension |G|^(degree+1) exceeds " +
                                      std::to_string(DenseDensity::kMaxDimension));
            }
        }
    }
    return config;
}

ExperimentReport run_experiment(const ExperimentConfig &config) {
    try {
        const auto &e = config.experiment;
        const auto &o = config.options;
        ExperimentReport report = [&] {
            if (e == "prepare-verify") {
                return prepare_verify(config.model, o);
            }
            if (e == "braid-abelian") {
                return abelian_braiding(config.model, config.abelian, o);
            }
            if (e == "braid-nonabelian") {
                return nonabelian_braiding(config.model, config.g, config.h, config.nonabelian, o,
                                           config.expected_bf_rho1);
            }
            if (e == "restricted") {
                return restricted_excitation_demo(config.model, config.steps, o);
            }
            if (e == "elongation-check") {
                return elongation_check(config.model, config.elongation, o);
            }
            if (e == "un-check") {
                return un_check(config.max_n, o);
            }
            if (e == "purification-check") {
                return purification_experiment(config.model, config.degrees, o);
            }
            throw ConfigError("$.experiment", "unknown experiment \"" + e + "\"; valid: " + valid_names());
        }();
        report.inputs()["seed"] = o.seed;
        report.inputs()["tolerances"] = {{"value", o.tolerance}, {"strict", o.strict_tolerance}};
        return report;
    } catch (const ConfigError &) {
        throw;
    } catch (const std::invalid_argument &ex) {
        throw ConfigError("$.geometry", ex.what());
    } catch (const std::out_of_range &ex) {
        throw ConfigError("$.geometry", ex.what());
    }
}

void print_summary(const ExperimentReport &report, bool verbose, std::ostream &out) {
    std::size_t advisory = 0;
    for (const auto &q : report.quantities()) {
        advisory += q.advisory;
    }
    out << report.experiment() << ": " << (report.passed() ? "PASS" : "FAIL") << " ("
        << report.quantities().size() << " quantities, " << advisory << " advisory)\n";
    if (verbose) {
        for (const auto &q : report.quantities()) {
            out << "  " << (q.pass() ? "ok  " : (q.advisory ? "note" : "FAIL")) << " " << q.name << " = "
                << std::setprecision(12) << q.value << " (" << to_string(q.check);
            if (q.check != Quantity::Check::AtMost) {
                out << " " << q.target;
            }
            out << ", tol " << q.tolerance << ")\n";
        }
        for (const auto &s : report.support_sizes()) {
            out << "  support " << s.step << " = " << s.size << "\n";
        }
    } else {
        for (const auto &q : report.quantities()) {
            if (q.advisory && !q.pass()) {
                out << "  note: advisory " << q.name << " = " << std::setprecision(12) << q.value << " (target "
                    << q.target << ")\n";
            }
        }
    }
    if (const Quantity *q = report.first_failure()) {
        out << "  first violated quantity: " << q->name << " = " << std::setprecision(17) << q->value << " ("
            << to_string(q->check) << " " << q->target << ", tol " << q->tolerance << ")\n";
    }
}

int run(const std::filesystem::path &config_path, const RunOptions &options, std::ostream &out, std::ostream &err) {
    ExperimentConfig config;
    try {
        json j;
        try {
            j = json::parse(read_text_file(config_path));
        } catch (const json::parse_error &ex) {
            throw ConfigError("$", ex.what());
        } catch (const std::runtime_error &ex) {
            throw ConfigError("$", ex.what());
        }
        config = parse_config(j, config_path.parent_path());
        if (options.seed) {
            config.options.seed = *options.seed;
        }
        set_engine_options({std::max<std::size_t>(1, options.threads), engine_options().prune_threshold});

        auto start = std::chrono::steady_clock::now();
        ExperimentReport report = run_experiment(config);
        auto stop = std::chrono::steady_clock::now();
        if (options.wall_time) {
            report.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
        }

        std::string target = options.out ? *options.out
                             : config.output ? *config.output
                                             : config_path.stem().string() + ".report.json";
        std::ofstream file(target);
        if (!file) {
            err << "error: cannot write report to " << target << "\n";
            return kExitConfig;
        }
        file << report.to_json().dump(2) << "\n";

        if (options.dump_state && config.model) {
            std::ofstream dump(*options.dump_state);
            if (!dump) {
                err << "error: cannot write state to " << *options.dump_state << "\n";
                return kExitConfig;
            }
            write_state_jsonl(prepare_ground_state(config.model), dump);
        }

        print_summary(report, options.verbose, out);
        out << "report written to " << target << "\n";
        return report.passed() ? kExitPass : kExitFail;
    } catch (const ConfigError &ex) {
        err << "config error: " << ex.what() << "\n";
        return kExitConfig;
    }
}

}  // namespace qdouble::cli
