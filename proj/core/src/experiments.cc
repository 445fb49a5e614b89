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

#include "qdouble/experiments.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

namespace qdouble {

bool Quantity::pass() const {
    if (!std::isfinite(value)) {
        return false;
    }
    switch (check) {
        case Check::Equal:
            return std::abs(value - target) <= tolerance;
        case Check::AtMost:
            return value <= tolerance;
        case Check::GreaterThan:
            return value > target;
    }
    return false;
}

const char *to_string(Quantity::Check check) {
    switch (check) {
        case Quantity::Check::Equal:
            return "equal";
        case Quantity::Check::AtMost:
            return "at_most";
        case Quantity::Check::GreaterThan:
            return "greater_than";
    }
    return "?";
}

void ExperimentReport::add_equal(std::string name, double value, double target, double tolerance, bool advisory) {
    quantities_.push_back({std::move(name), value, Quantity::Check::Equal, target, tolerance, advisory});
}

void ExperimentReport::add_at_most(std::string name, double value, double tolerance) {
    quantities_.push_back({std::move(name), value, Quantity::Check::AtMost, 0, tolerance, false});
}

void ExperimentReport::add_greater(std::string name, double value, double bound) {
    quantities_.push_back({std::move(name), value, Quantity::Check::GreaterThan, bound, 0, false});
}

void ExperimentReport::add_support(std::string step, std::size_t size) {
    support_sizes_.push_back({std::move(step), size});
}

void ExperimentReport::record_step(const std::string &label, const SparseState &state, double tolerance) {
    add_equal(label + ".trace", trace_of_rho(state).real(), 1.0, tolerance);
    add_at_most(label + ".hermiticity_defect", hermiticity_defect(state), tolerance);
    add_greater(label + ".overlap_with_I", overlap_with_I(state).real(), 0.0);
    add_support(label, state.size());
}

void ExperimentReport::merge(const ExperimentReport &other, const std::string &prefix) {
    for (Quantity q : other.quantities_) {
        q.name = prefix + "." + q.name;
        quantities_.push_back(std::move(q));
    }
    for (const auto &s : other.support_sizes_) {
        support_sizes_.push_back({prefix + "." + s.step, s.size});
    }
}

const Quantity *ExperimentReport::find(std::string_view name) const {
    for (const auto &q : quantities_) {
        if (q.name == name) {
            return &q;
        }
    }
    return nullptr;
}

const Quantity *ExperimentReport::first_failure() const {
    for (const auto &q : quantities_) {
        if (!q.advisory && !q.pass()) {
            return &q;
        }
    }
    return nullptr;
}

OrderedJson ExperimentReport::to_json() const {
    OrderedJson out;
    out["experiment"] = experiment_;
    out["inputs"] = inputs_;
    out["passed"] = passed();
    OrderedJson qs = OrderedJson::object();
    for (const auto &q : quantities_) {
        OrderedJson j;
        j["value"] = q.value;
        j["tolerance"] = q.tolerance;
        j["check"] = to_string(q.check);
        if (q.check != Quantity::Check::AtMost) {
            j["target"] = q.target;
        }
        j["pass"] = q.pass();
        if (q.advisory) {
            j["advisory"] = true;
        }
        qs[q.name] = std::move(j);
    }
    out["quantities"] = std::move(qs);
    OrderedJson sizes = OrderedJson::array();
    for (const auto &s : support_sizes_) {
        sizes.push_back({{"step", s.step}, {"size", s.size}});
    }
    out["support_sizes"] = std::move(sizes);
    if (wall_ms) {
        out["wall_ms"] = *wall_ms;
    }
    return out;
}

namespace {

bool is_connected(const Lattice &L) {
    if (L.vertex_count() == 0) {
        return true;
    }
    std::vector<char> seen(L.vertex_count(), 0);
    std::vector<VertexId> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
        VertexId v = stack.back();
        stack.pop_back();
        for (const Incidence &inc : L.star(v)) {
            const Edge &e = L.edge(inc.edge);
            VertexId w = inc.outgoing ? e.head : e.tail;
            if (!seen[w]) {
                seen[w] = 1;
                count++;
                stack.push_back(w);
            }
        }
    }
    return count == L.vertex_count();
}

VertexId face_base(const Lattice &L, FaceId f) {
    return L.step_start(L.face(f)[0]);
}

double relative_distance(const SparseState &a, const SparseState &b, double scale) {
    return distance(a, b) / scale;
}

OrderedJson steps_to_json(std::span<const Step> steps) {
    OrderedJson out = OrderedJson::array();
    for (const Step &s : steps) {
        out.push_back({s.edge, s.sign});
    }
    return out;
}

OrderedJson string_to_json(const StringSpec &spec) {
    OrderedJson teeth = OrderedJson::array();
    for (const Tooth &t : spec.teeth) {
        teeth.push_back({t.edge, t.attach_index, t.orientation == ToothOrientation::Outgoing ? "out" : "in"});
    }
    return {{"base", steps_to_json(spec.base)}, {"teeth", teeth}, {"closed", spec.closed}};
}

void describe_model(OrderedJson &inputs, const Model &model) {
    inputs["group"] = model.group().name();
    inputs["group_order"] = model.group().order();
    const Lattice &L = model.lattice();
    if (L.torus_shape()) {
        inputs["lattice"] = {{"type", "torus"}, {"lx", L.torus_shape()->lx}, {"ly", L.torus_shape()->ly}};
    } else {
        inputs["lattice"] = {{"vertices", L.vertex_count()}, {"edges", L.edge_count()}, {"faces", L.face_count()}};
    }
}

}  // namespace

SparseState prepare_ground_state(const ModelPtr &model, std::span<const VertexId> order) {
    const std::size_t V = model->lattice().vertex_count();
    std::vector<VertexId> sequence(order.begin(), order.end());
    if (sequence.empty()) {
        sequence.resize(V);
        std::iota(sequence.begin(), sequence.end(), VertexId{0});
    }
    std::vector<VertexId> sorted = sequence;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); i++) {
        if (sorted.size() != V || sorted[i] != i) {
            throw std::invalid_argument("vertex order must be a permutation of all vertices");
        }
    }
    SparseState state = initial_state(model);
    for (VertexId v : sequence) {
        state = apply_channel_Ev(state, v);
    }
    return state;
}

ExperimentReport verify_ground_state(const SparseState &state, double tolerance) {
    ExperimentReport report("verify-ground-state");
    const Model &model = state.model();
    const Lattice &L = model.lattice();
    auto family_min = [&](std::size_t count, auto &&expectation) {
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < count; i++) {
            m = std::min(m, expectation(static_cast<std::uint32_t>(i)));
        }
        return m;
    };
    auto add_family = [&](const std::string &name, std::size_t count, auto &&expectation) {
        if (count > 0) {
            report.add_equal(name, family_min(count, expectation), 1.0, tolerance);
        }
    };
    add_family("edge_match.min", L.edge_count(),
               [&](std::uint32_t e) { return projector_expectation_pure(state, ProjectorSpec::edge_match(e)); });
    add_family("bf_ket.min", L.face_count(), [&](std::uint32_t f) {
        return projector_expectation_pure(state, ProjectorSpec::bf(f, face_base(L, f), Layer::Ket));
    });
    add_family("bf_bra.min", L.face_count(), [&](std::uint32_t f) {
        return projector_expectation_pure(state, ProjectorSpec::bf(f, face_base(L, f), Layer::Bra));
    });
    add_family("diag_av.min", L.vertex_count(),
               [&](std::uint32_t v) { return projector_expectation_pure(state, ProjectorSpec::diag_av(v)); });
    if (model.group().order() == 2) {
        const double n2 = std::pow(norm(state), 2);
        add_family("toric.zz.min", L.edge_count(), [&](std::uint32_t e) {
            PauliMap zz({}, {e});
            return inner(state, apply_map(state, zz, Layer::Diagonal)).real() / n2;
        });
        add_family("toric.zf_ket.min", L.face_count(),
                   [&](std::uint32_t f) { return projector_expectation_pure(state, ProjectorSpec::zf(f, Layer::Ket)); });
        add_family("toric.zf_bra.min", L.face_count(),
                   [&](std::uint32_t f) { return projector_expectation_pure(state, ProjectorSpec::zf(f, Layer::Bra)); });
        add_family("toric.xx.min", L.vertex_count(), [&](std::uint32_t v) {
            return projector_expectation_pure(state, ProjectorSpec::xv(v, Layer::Diagonal));
        });
    }
    return report;
}

ExperimentReport prepare_verify(const ModelPtr &model, const ExperimentOptions &options) {
    ExperimentReport report("prepare-verify");
    describe_model(report.inputs(), *model);
    const Lattice &L = model->lattice();
    if (!is_connected(L)) {
        throw std::invalid_argument("prepare-verify needs a connected lattice");
    }
    const double strict = options.strict_tolerance;

    SparseState initial = initial_state(model);
    report.record_step("initial", initial, strict);
    SparseState state = prepare_ground_state(model);
    report.record_step("prepared", state, strict);

    double expected_support = std::pow(static_cast<double>(model->group().order()),
                                       static_cast<double>(L.vertex_count()) - 1.0);
    report.add_equal("support_size", static_cast<double>(state.size()), expected_support, 0.0);

    report.merge(verify_ground_state(state, options.tolerance), "ground");

    const double n = norm(state);
    SparseState again = state;
    for (VertexId v = 0; v < L.vertex_count(); v++) {
        again = apply_channel_Ev(again, v);
    }
    report.add_at_most("idempotence.distance", relative_distance(again, state, n), strict);

    std::vector<VertexId> reversed(L.vertex_count());
    std::iota(reversed.rbegin(), reversed.rend(), VertexId{0});
    report.add_at_most("vertex_order.distance", relative_distance(prepare_ground_state(model, reversed), state, n),
                       strict);

    if (L.torus_shape() && L.face_count() > 0) {
        std::vector<FaceId> region{0};
        StringSpec loop = closed_comb_around(L, region, face_base(L, 0));
        double worst = 0;
        for (std::size_t g = 0; g < model->group().order(); g++) {
            worst = std::max(worst, closed_loop_action_defect(state, loop, static_cast<Element>(g)));
        }
        report.add_at_most("closed_loop.max_defect", worst, options.tolerance);
    }

    if (model->layer_dimension() <= static_cast<double>(DenseDensity::kMaxDimension)) {
        DenseDensity rho = to_dense(state);
        report.add_at_most("dense.psd_defect", psd_defect(rho), options.tolerance);
        report.add_at_most("dense.hermiticity_defect", hermiticity_defect(rho), strict);
    }
    return report;
}

AbelianGeometry default_abelian_geometry(const Lattice &L) {
    const auto &shape = L.torus_shape();
    if (!shape || shape->lx < 3 || shape->ly < 3) {
        throw std::invalid_argument("the default abelian geometry needs a torus of at least 3 x 3");
    }
    AbelianGeometry geo;
    geo.oz_path = {L.vertex_at(0, 1), L.vertex_at(1, 1), L.vertex_at(2, 1)};
    geo.ox_dual_path = {L.face_at(0, 0), L.face_at(0, 1)};
    geo.wx_around = {L.vertex_at(2, 1)};
    geo.shaded_face = L.face_at(0, 0);
    return geo;
}

ExperimentReport abelian_braiding(const ModelPtr &model, const AbelianGeometry &geo, const ExperimentOptions &options) {
    ExperimentReport report("braid-abelian");
    describe_model(report.inputs(), *model);
    report.inputs()["geometry"] = {{"OZ", {{"path", geo.oz_path}}},
                                   {"OX", {{"dual_path", geo.ox_dual_path}}},
                                   {"WX", {{"around", geo.wx_around}}},
                                   {"shaded_face", geo.shaded_face}};
    if (model->group().order() != 2) {
        throw std::invalid_argument("abelian braiding needs the group Z2");
    }
    if (geo.shaded_face >= model->lattice().face_count()) {
        throw std::out_of_range("shaded face " + std::to_string(geo.shaded_face) + " does not exist");
    }
    const double tol = options.tolerance;
    const double strict = options.strict_tolerance;
    ToricString oz = build_OZ(*model, geo.oz_path);
    ToricString ox = build_OX(*model, geo.ox_dual_path);
    auto wx = build_WX(*model, geo.wx_around, oz);
    LinearOp U = build_U(*model, ox, oz);

    std::mt19937_64 rng(options.seed);
    report.add_at_most("U.unitarity_defect", unitarity_defect(model, U, rng), strict);

    SparseState rho = prepare_ground_state(model);
    report.record_step("rho", rho, strict);
    const double n = norm(rho);

    auto ozoz = apply_map(rho, *oz.map, Layer::Diagonal);
    report.add_equal("OZxOZ.expectation", inner(rho, ozoz).real() / (n * n), 1.0, tol);
    report.add_at_most("WxW.invariance", relative_distance(apply_map(rho, *wx, Layer::Diagonal), rho, n), tol);

    SparseState u_rho = apply_linear_op(rho, U, Layer::Diagonal);
    report.record_step("U_rho", u_rho, strict);
    SparseState wu_rho = apply_map(u_rho, *wx, Layer::Diagonal);
    report.record_step("WU_rho", wu_rho, strict);

    SparseState plus = linear_combination(0.5, u_rho, 0.5, wu_rho);
    SparseState minus = linear_combination(0.5, u_rho, -0.5, wu_rho);
    SparseState oxox = apply_map(rho, *ox.map, Layer::Diagonal);
    SparseState plus_expected = linear_combination(0.5, rho, 0.5, oxox);
    SparseState oxoz = apply_map(apply_map(rho, *ox.map, Layer::Ket), *oz.map, Layer::Bra);
    SparseState ozox = apply_map(apply_map(rho, *oz.map, Layer::Ket), *ox.map, Layer::Bra);
    SparseState minus_expected = linear_combination(0.5, oxoz, 0.5, ozox);
    report.add_at_most("rho_plus.defect", relative_distance(plus, plus_expected, n), tol);
    report.add_at_most("rho_minus.defect", relative_distance(minus, minus_expected, n), tol);

    double minus_norm = norm(minus);
    report.add_greater("rho_minus.norm", minus_norm / n, 0.0);
    if (minus_norm > 0) {
        double sign = inner(minus, apply_map(minus, *wx, Layer::Diagonal)).real() / (minus_norm * minus_norm);
        report.add_equal("rho_minus.WxW_sign", sign, -1.0, tol);
    }

    SparseState rho_prime = apply_linear_op(wu_rho, U, Layer::Diagonal);
    report.record_step("rho_prime", rho_prime, strict);
    report.add_at_most("rho_prime.defect", relative_distance(rho_prime, oxox, n), tol);

    report.add_equal("detect.rho.prob_down", ancilla_detect(rho, geo.shaded_face, true), 0.0, tol);
    report.add_equal("detect.rho_prime.prob_down", ancilla_detect(rho_prime, geo.shaded_face, true), 1.0, tol);
    return report;
}

NonabelianGeometry default_nonabelian_geometry(const Lattice &L) {
    if (!L.torus_shape()) {
        throw std::invalid_argument("the default nonabelian geometry needs a torus");
    }
    NonabelianGeometry geo;
    std::vector<FaceId> region{L.face_at(0, 0)};
    geo.loop = closed_comb_around(L, region, L.vertex_at(0, 0));
    geo.open.base = {{L.vertical_edge(1, 1), -1}};
    geo.open.teeth = {{L.horizontal_edge(0, 1), 1, ToothOrientation::Incoming}};
    geo.face = L.face_at(-1, 0);
    return geo;
}

std::map<Element, double> commutator_census(const FiniteGroup &group, Element g, Element h) {
    auto partition = conjugacy_classes(group);
    const auto &cls = partition.classes.at(partition.class_of.at(h));
    std::map<Element, double> census;
    for (Element h2 : cls) {
        census[commutator(group, g, h2)] += 1.0 / static_cast<double>(cls.size());
    }
    return census;
}

ExperimentReport nonabelian_braiding(const ModelPtr &model, Element g, Element h, const NonabelianGeometry &geo,
                                     const ExperimentOptions &options, std::optional<double> expected_bf_rho1) {
    ExperimentReport report("braid-nonabelian");
    const FiniteGroup &G = model->group();
    const Lattice &L = model->lattice();
    describe_model(report.inputs(), *model);
    report.inputs()["g"] = G.label(g);
    report.inputs()["h"] = G.label(h);
    report.inputs()["geometry"] = {
        {"loop", string_to_json(geo.loop)}, {"open", string_to_json(geo.open)}, {"face", geo.face}};

    if (!geo.loop.closed) {
        throw std::invalid_argument("loop C must be closed");
    }
    if (geo.open.closed) {
        throw std::invalid_argument("string L must be open");
    }
    auto C_checked = validate_string_spec(L, geo.loop);
    validate_string_spec(L, geo.open);
    if (L.torus_shape() && !loop_class(L, geo.loop).contractible()) {
        throw std::invalid_argument("loop C must be contractible");
    }
    std::set<EdgeId> loop_edges;
    for (const Step &s : geo.loop.base) {
        loop_edges.insert(s.edge);
    }
    std::size_t crossings = 0;
    for (const Tooth &t : geo.open.teeth) {
        crossings += loop_edges.count(t.edge);
    }
    if (crossings != 1) {
        throw std::invalid_argument("L must cross C exactly once; found " + std::to_string(crossings) +
                                    " teeth of L on C");
    }
    const VertexId v1 = C_checked.start();
    if (geo.face >= L.face_count() || !L.face_has_vertex(geo.face, v1)) {
        throw std::invalid_argument("face f must exist and contain the loop's base vertex " + std::to_string(v1));
    }

    const double tol = options.tolerance;
    const double strict = options.strict_tolerance;
    CombOperator A_C = make_comb(*model, geo.loop, g, Layer::Diagonal);
    CombOperator A_L = make_comb(*model, geo.open, h, Layer::Diagonal);

    SparseState rho = prepare_ground_state(model);
    report.record_step("rho", rho, strict);
    SparseState rho_L = apply_comb(rho, A_L);
    report.record_step("rho_L", rho_L, strict);
    SparseState rho_1 = apply_comb(rho_L, A_C);
    report.record_step("rho_1", rho_1, strict);
    SparseState c_rho = apply_comb(rho, A_C);
    report.record_step("C_rho", c_rho, strict);
    SparseState rho_2 = apply_comb(c_rho, A_L);
    report.record_step("rho_2", rho_2, strict);

    auto bf = [&](const SparseState &s, FaceId f, VertexId base) {
        return expectation_in_rho(s, ProjectorSpec::bf(f, base, Layer::Ket));
    };
    const double b1 = bf(rho_1, geo.face, v1);
    const double b2 = bf(rho_2, geo.face, v1);

    auto census = commutator_census(G, g, h);
    const double predicted = census.count(kIdentity) ? census.at(kIdentity) : 0.0;
    OrderedJson census_json = OrderedJson::object();
    for (const auto &[value, fraction] : census) {
        census_json[G.label(value)] = fraction;
    }
    report.inputs()["census"] = census_json;
    report.inputs()["census_identity_fraction"] = predicted;

    report.add_equal("Bf.rho_2", b2, 1.0, tol);
    report.add_equal("Bf.rho_1.vs_census", b1, predicted, tol, true);
    if (expected_bf_rho1) {
        report.add_equal("Bf.rho_1", b1, *expected_bf_rho1, tol);
    }
    report.add_equal("detect.rho_2.prob_down", ancilla_detect(rho_2, geo.face, false), 0.0, tol);
    report.add_equal("detect.rho_1.prob_down.vs_census", ancilla_detect(rho_1, geo.face, false), 1.0 - predicted, tol,
                     true);

    auto end_faces = comb_end_faces(L, geo.open);
    std::set<VertexId> loop_vertices(C_checked.base_vertices.begin(), C_checked.base_vertices.end());
    double neighbor_min = std::numeric_limits<double>::infinity();
    double shift = 0;
    std::vector<FaceId> neighbors;
    for (FaceId f = 0; f < L.face_count(); f++) {
        if (f == geo.face) {
            continue;
        }
        double in_1 = bf(rho_1, f, face_base(L, f));
        shift = std::max(shift, std::abs(in_1 - bf(rho_L, f, face_base(L, f))));
        bool touches = std::any_of(loop_vertices.begin(), loop_vertices.end(),
                                   [&](VertexId v) { return L.face_has_vertex(f, v); });
        bool is_end = std::find(end_faces.begin(), end_faces.end(), f) != end_faces.end();
        if (touches && !is_end) {
            neighbors.push_back(f);
            neighbor_min = std::min(neighbor_min, in_1);
        }
    }
    report.inputs()["neighbor_faces"] = neighbors;
    if (!neighbors.empty()) {
        report.add_equal("neighbors.min_Bf_rho_1", neighbor_min, 1.0, tol);
    }
    report.add_at_most("other_faces.max_shift_from_rho_L", shift, tol);
    return report;
}

std::string RestrictedStep::label() const {
    switch (kind) {
        case Kind::Prepare:
            return "prepare";
        case Kind::Channel:
            return "channel_v" + std::to_string(vertex);
        case Kind::Gauge:
            return "gauge_v" + std::to_string(vertex);
        case Kind::Comb:
            return "comb";
        case Kind::Pauli:
            return "pauli";
    }
    return "?";
}

std::vector<RestrictedStep> default_restricted_steps(const Model &model) {
    std::vector<RestrictedStep> steps;
    RestrictedStep prepare;
    prepare.kind = RestrictedStep::Kind::Prepare;
    steps.push_back(prepare);
    RestrictedStep string;
    if (model.group().order() == 2 && model.lattice().torus_shape() && model.lattice().torus_shape()->lx >= 3 &&
        model.lattice().torus_shape()->ly >= 3) {
        auto geo = default_abelian_geometry(model.lattice());
        auto ox = build_OX(model, geo.ox_dual_path);
        string.kind = RestrictedStep::Kind::Pauli;
        string.x_edges.assign(ox.map->x_edges().begin(), ox.map->x_edges().end());
    } else if (model.lattice().torus_shape()) {
        string.kind = RestrictedStep::Kind::Comb;
        string.string = default_nonabelian_geometry(model.lattice()).open;
        string.g = model.group().order() > 1 ? Element{1} : kIdentity;
    } else {
        string.kind = RestrictedStep::Kind::Gauge;
        string.g = model.group().order() > 1 ? Element{1} : kIdentity;
    }
    steps.push_back(string);
    RestrictedStep channel;
    channel.kind = RestrictedStep::Kind::Channel;
    steps.push_back(channel);
    return steps;
}

ExperimentReport restricted_excitation_demo(const ModelPtr &model, const std::vector<RestrictedStep> &steps,
                                            const ExperimentOptions &options) {
    ExperimentReport report("restricted");
    describe_model(report.inputs(), *model);
    const Lattice &L = model->lattice();
    const bool toric = model->group().order() == 2;
    OrderedJson labels = OrderedJson::array();

    SparseState state = initial_state(model);
    report.record_step("step0.initial", state, options.strict_tolerance);
    for (std::size_t i = 0; i < steps.size(); i++) {
        const RestrictedStep &step = steps[i];
        switch (step.kind) {
            case RestrictedStep::Kind::Prepare:
                state = prepare_ground_state(model);
                break;
            case RestrictedStep::Kind::Channel:
                state = apply_channel_Ev(state, step.vertex);
                break;
            case RestrictedStep::Kind::Gauge:
                state = apply_map(state, GaugeMap(model, step.vertex, step.g), Layer::Diagonal);
                break;
            case RestrictedStep::Kind::Comb:
                state = apply_comb(state, make_comb(*model, step.string, step.g, Layer::Diagonal));
                break;
            case RestrictedStep::Kind::Pauli:
                if (!toric) {
                    throw std::invalid_argument("Pauli steps need the group Z2");
                }
                for (EdgeId e : step.x_edges) {
                    if (e >= L.edge_count()) {
                        throw std::out_of_range("Pauli step edge " + std::to_string(e) + " does not exist");
                    }
                }
                for (EdgeId e : step.z_edges) {
                    if (e >= L.edge_count()) {
                        throw std::out_of_range("Pauli step edge " + std::to_string(e) + " does not exist");
                    }
                }
                state = apply_map(state, PauliMap(step.x_edges, step.z_edges), Layer::Diagonal);
                break;
        }
        const std::string label = "step" + std::to_string(i + 1) + "." + step.label();
        labels.push_back(step.label());
        report.record_step(label, state, options.strict_tolerance);

        double edge_min = std::numeric_limits<double>::infinity();
        for (EdgeId e = 0; e < L.edge_count(); e++) {
            edge_min = std::min(edge_min, projector_expectation_pure(state, ProjectorSpec::edge_match(e)));
        }
        double av_min = std::numeric_limits<double>::infinity();
        for (VertexId v = 0; v < L.vertex_count(); v++) {
            av_min = std::min(av_min, projector_expectation_pure(state, ProjectorSpec::diag_av(v)));
        }
        report.add_greater(label + ".edge_match.min", edge_min, 0.0);
        report.add_greater(label + ".diag_av.min", av_min, 0.0);
        if (toric) {
            report.add_greater(label + ".zz.min", 2.0 * edge_min - 1.0, -1.0);
            double xx_min = std::numeric_limits<double>::infinity();
            for (VertexId v = 0; v < L.vertex_count(); v++) {
                xx_min = std::min(xx_min, projector_expectation_pure(state, ProjectorSpec::xv(v, Layer::Diagonal)));
            }
            report.add_greater(label + ".xx.min", xx_min, -1.0);
        }
    }
    report.inputs()["steps"] = labels;
    return report;
}

ElongationGeometry default_elongation_geometry(const Lattice &L) {
    const auto &shape = L.torus_shape();
    if (!shape || shape->lx < 3 || shape->ly < 2) {
        throw std::invalid_argument("the default elongation geometry needs a torus of at least 3 x 2");
    }
    using O = ToothOrientation;
    ElongationGeometry geo;
    geo.L.base = {{L.horizontal_edge(0, 1), 1}};
    geo.L.teeth = {{L.vertical_edge(0, 0), 0, O::Incoming}, {L.vertical_edge(1, 0), 1, O::Incoming}};
    geo.L_prime = geo.L;
    geo.L_prime.base.push_back({L.horizontal_edge(1, 1), 1});
    geo.L_prime.teeth.push_back({L.vertical_edge(2, 0), 2, O::Incoming});
    geo.L_prime.teeth.push_back({L.vertical_edge(2, 1), 2, O::Outgoing});
    return geo;
}

ExperimentReport elongation_check(const ModelPtr &model, const ElongationGeometry &geo,
                                  const ExperimentOptions &options) {
    ExperimentReport report("elongation-check");
    describe_model(report.inputs(), *model);
    report.inputs()["geometry"] = {{"L", string_to_json(geo.L)}, {"L_prime", string_to_json(geo.L_prime)}};
    report.inputs()["samples"] = options.samples;
    const double strict = options.strict_tolerance;
    const FiniteGroup &G = model->group();
    const std::size_t E = model->edge_count();

    auto pin = pin_elongation_convention(model, geo.L, geo.L_prime, options.seed, options.samples);
    for (int bits = 0; bits < 4; bits++) {
        report.add_equal("convention_" + std::to_string(bits) + ".defect", pin.defects[bits], 0.0, strict, true);
    }
    report.add_equal("convention.pinned", pin.found ? 1.0 : 0.0, 1.0, 0.0);
    report.inputs()["convention"] = {{"inverse_transport", pin.convention.inverse_transport},
                                     {"transport_on_right", pin.convention.transport_on_right},
                                     {"bits", pin.convention.bits()}};
    ElongationOperator op = make_elongation(*model, geo.L, geo.L_prime, pin.convention);

    std::mt19937_64 rng(options.seed + 1);
    report.add_at_most("identity.defect",
                       elongation_identity_defect(model, geo.L, geo.L_prime, op, rng, options.samples), strict);

    std::uniform_int_distribution<std::size_t> pick(0, G.order() - 1);
    std::normal_distribution<double> gauss;
    auto random_layer = [&] {
        std::vector<Element> c(E);
        for (auto &z : c) {
            z = static_cast<Element>(pick(rng));
        }
        return c;
    };

    SparseState probe(model);
    for (std::size_t i = 0; i < 32; i++) {
        probe.add(DoubledConfig{random_layer(), random_layer()}, Amplitude(gauss(rng), gauss(rng)));
    }
    SparseState back = apply_elongation(apply_elongation(probe, op, false), op, true);
    report.add_at_most("roundtrip.distance", distance(back, probe) / norm(probe), strict);

    // With the pinned convention E is trivial exactly where sigma^-1 x = 1; the
    // naive control on x alone is not.
    ElongationMap forward(model, op, false);
    std::size_t trivial_moved = 0;
    std::size_t naive_moved = 0;
    for (std::size_t s = 0; s < options.samples; s++) {
        auto c = random_layer();
        Element sv = c[op.reference.edge];
        Element sigma = op.reference.orientation == ToothOrientation::Outgoing ? sv : G.inv(sv);
        Element xhat = pin.convention.inverse_transport ? G.inv(sigma) : sigma;
        c[op.e_star.edge] = op.e_star.sign > 0 ? xhat : G.inv(xhat);
        auto moved = c;
        forward.apply(moved);
        trivial_moved += moved != c;

        auto d = random_layer();
        d[op.e_star.edge] = kIdentity;
        auto naive = d;
        forward.apply(naive);
        naive_moved += naive != d;
    }
    report.add_at_most("trivial_transport.moved_fraction",
                       static_cast<double>(trivial_moved) / static_cast<double>(options.samples), 0.0);
    report.add_equal("identity_control_only.moved_fraction",
                     static_cast<double>(naive_moved) / static_cast<double>(options.samples), 0.0, 0.0, true);
    return report;
}

ExperimentReport un_check(std::size_t max_n, const ExperimentOptions &options) {
    ExperimentReport report("un-check");
    report.inputs()["max_n"] = max_n;
    const double strict = options.strict_tolerance;
    if (max_n < 1 || max_n > 10) {
        throw std::invalid_argument("un-check max_n must be in [1, 10]");
    }
    for (std::size_t n = 1; n <= max_n; n++) {
        const std::string prefix = "U_" + std::to_string(n);
        Eigen::MatrixXd dense = build_Un(n);
        Eigen::MatrixXd closed = un_closed_form(n);
        report.add_at_most(prefix + ".recursion_defect", (dense - closed).cwiseAbs().maxCoeff(), strict);
        report.add_at_most(prefix + ".unitarity_defect",
                           (dense.transpose() * dense - Eigen::MatrixXd::Identity(dense.rows(), dense.cols()))
                               .cwiseAbs()
                               .maxCoeff(),
                           strict);
        if (n >= 2) {
            report.add_at_most("CNOT_" + std::to_string(n) + "_" + std::to_string(n - 1) + ".conjugation_defect",
                               cnot_conjugation_defect(n, n, n - 1), strict);
        }

        // The same operator as a configuration-map combination on n Z2 edges.
        ModelPtr model = make_model(cyclic_group(2), star_lattice(n));
        std::vector<EdgeId> edges(n);
        std::iota(edges.begin(), edges.end(), EdgeId{0});
        LinearOp op = un_linear_op(*model, edges);
        const std::size_t d = std::size_t{1} << n;
        Eigen::MatrixXd assembled = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
        std::vector<Element> zero(n, kIdentity);
        for (std::size_t col = 0; col < d; col++) {
            auto image = apply_linear_op(basis_state(model, DoubledConfig{dense_config(*model, col), zero}), op,
                                         Layer::Ket);
            for (std::size_t i = 0; i < image.size(); i++) {
                auto cfg = image.config(i);
                assembled(static_cast<Eigen::Index>(dense_index(*model, cfg.ket)), static_cast<Eigen::Index>(col)) +=
                    image.amplitude(i).real();
            }
        }
        report.add_at_most(prefix + ".linear_op_defect", (assembled - closed).cwiseAbs().maxCoeff(), strict);
    }
    return report;
}

ExperimentReport purification_experiment(const ModelPtr &model, std::span<const std::size_t> degrees,
                                         const ExperimentOptions &options) {
    ExperimentReport report("purification-check");
    describe_model(report.inputs(), *model);
    report.inputs()["degrees"] = std::vector<std::size_t>(degrees.begin(), degrees.end());
    const double strict = options.strict_tolerance;
    for (std::size_t k = 0; k < degrees.size(); k++) {
        report.add_at_most("purification.degree_" + std::to_string(degrees[k]) + ".defect",
                           purification_check(model->group(), degrees[k], options.seed + k), strict);
    }

    const Lattice &L = model->lattice();
    SparseState state = initial_state(model);
    double trace_dev = 0;
    double idem = 0;
    for (VertexId v = 0; v < L.vertex_count(); v++) {
        SparseState next = apply_channel_Ev(state, v);
        trace_dev = std::max(trace_dev, std::abs(trace_of_rho(next) - 1.0));
        idem = std::max(idem, distance(apply_channel_Ev(next, v), next) / norm(next));
        state = std::move(next);
        report.add_support("after_E" + std::to_string(v), state.size());
    }
    report.add_at_most("channel.trace_deviation", trace_dev, strict);
    report.add_at_most("channel.idempotence_defect", idem, strict);
    report.record_step("prepared", state, strict);
    return report;
}

}  // namespace qdouble
