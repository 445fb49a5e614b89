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

#include "qdouble/operators.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace qdouble {

const char *to_string(Layer layer) {
    switch (layer) {
        case Layer::Ket:
            return "ket";
        case Layer::Bra:
            return "bra";
        case Layer::Diagonal:
            return "diagonal";
    }
    return "?";
}

const char *to_string(ProjectorKind kind) {
    switch (kind) {
        case ProjectorKind::Bf:
            return "Bf";
        case ProjectorKind::Av:
            return "Av";
        case ProjectorKind::DiagAv:
            return "DiagAv";
        case ProjectorKind::EdgeMatch:
            return "EdgeMatch";
        case ProjectorKind::Zf:
            return "Zf";
        case ProjectorKind::Xv:
            return "Xv";
    }
    return "?";
}

GaugeMap::GaugeMap(ModelPtr model, VertexId v, Element g) : model_(std::move(model)), g_(g) {
    if (v >= model_->lattice().vertex_count()) {
        throw std::out_of_range("gauge map vertex " + std::to_string(v) + " does not exist");
    }
    g_inv_ = model_->group().inv(g);
    auto star = model_->lattice().star(v);
    star_.assign(star.begin(), star.end());
}

int GaugeMap::apply(std::span<Element> layer) const {
    const FiniteGroup &G = model_->group();
    for (const Incidence &inc : star_) {
        Element &z = layer[inc.edge];
        z = inc.outgoing ? G.mul_unchecked(g_, z) : G.mul_unchecked(z, g_inv_);
    }
    return 1;
}

namespace {

// Keeps edges of odd multiplicity, sorted.
std::vector<EdgeId> odd_part(std::vector<EdgeId> edges) {
    std::sort(edges.begin(), edges.end());
    std::vector<EdgeId> result;
    for (std::size_t i = 0; i < edges.size();) {
        std::size_t j = i;
        while (j < edges.size() && edges[j] == edges[i]) {
            j++;
        }
        if ((j - i) % 2 == 1) {
            result.push_back(edges[i]);
        }
        i = j;
    }
    return result;
}

void require_z2(const Model &model, const char *what) {
    if (model.group().order() != 2) {
        throw std::invalid_argument(std::string(what) + " is only defined for Z2 models");
    }
}

}  // namespace

PauliMap::PauliMap(std::vector<EdgeId> x_edges, std::vector<EdgeId> z_edges)
    : x_edges_(odd_part(std::move(x_edges))), z_edges_(odd_part(std::move(z_edges))) {
}

int PauliMap::apply(std::span<Element> layer) const {
    // Z acts first so that the map equals the operator product X...X Z...Z.
    int parity = 0;
    for (EdgeId e : z_edges_) {
        parity ^= layer[e];
    }
    for (EdgeId e : x_edges_) {
        layer[e] ^= 1;
    }
    return parity ? -1 : 1;
}

ProductMap::ProductMap(std::vector<MapPtr> factors) : factors_(std::move(factors)) {
}

int ProductMap::apply(std::span<Element> layer) const {
    int sign = 1;
    for (const auto &f : factors_) {
        sign *= f->apply(layer);
    }
    return sign;
}

MapPtr gauge_map(ModelPtr model, VertexId v, Element g) {
    return std::make_shared<GaugeMap>(std::move(model), v, g);
}

SparseState apply_map(const SparseState &state, const ConfigMap &map, Layer layer) {
    const std::size_t e = state.model().edge_count();
    return transform(state, [&](std::span<const Element> c, std::span<Element> out, Amplitude amp, auto &emit) {
        std::copy(c.begin(), c.end(), out.begin());
        int sign = 1;
        if (layer != Layer::Bra) {
            sign *= map.apply(out.first(e));
        }
        if (layer != Layer::Ket) {
            sign *= map.apply(out.subspan(e));
        }
        emit(out, static_cast<double>(sign) * amp);
    });
}

SparseState apply_linear_op(const SparseState &state, const LinearOp &op, Layer layer) {
    const std::size_t e = state.model().edge_count();
    if (layer != Layer::Diagonal) {
        return transform(state, [&](std::span<const Element> c, std::span<Element> out, Amplitude amp, auto &emit) {
            for (const auto &[coef, map] : op.terms) {
                std::copy(c.begin(), c.end(), out.begin());
                int sign = map->apply(layer == Layer::Ket ? out.first(e) : out.subspan(e));
                emit(out, coef * sign * amp);
            }
        });
    }
    return transform(state, [&](std::span<const Element> c, std::span<Element> out, Amplitude amp, auto &emit) {
        for (const auto &[ck, mk] : op.terms) {
            for (const auto &[cb, mb] : op.terms) {
                std::copy(c.begin(), c.end(), out.begin());
                int sign = mk->apply(out.first(e)) * mb->apply(out.subspan(e));
                emit(out, ck * cb * sign * amp);
            }
        }
    });
}

double unitarity_defect(const ModelPtr &model, const LinearOp &op, std::mt19937_64 &rng, std::size_t samples) {
    const std::size_t e = model->edge_count();
    std::uniform_int_distribution<std::size_t> pick(0, model->group().order() - 1);
    std::vector<std::vector<Element>> configs;
    for (std::size_t s = 0; s < samples; s++) {
        std::vector<Element> c(e);
        for (auto &z : c) {
            z = static_cast<Element>(pick(rng));
        }
        if (std::find(configs.begin(), configs.end(), c) == configs.end()) {
            configs.push_back(std::move(c));
        }
    }
    std::vector<SparseState> images;
    for (const auto &c : configs) {
        auto basis = basis_state(model, DoubledConfig{c, std::vector<Element>(e, kIdentity)});
        images.push_back(apply_linear_op(basis, op, Layer::Ket));
    }
    double worst = 0;
    for (std::size_t i = 0; i < images.size(); i++) {
        for (std::size_t j = i; j < images.size(); j++) {
            Amplitude expected = i == j ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(inner(images[i], images[j]) - expected));
        }
    }
    return worst;
}

namespace {

Element flux_along(std::span<const Element> layer, const FiniteGroup &G, std::span<const Step> steps) {
    Element p = kIdentity;
    for (const Step &s : steps) {
        Element z = layer[s.edge];
        p = G.mul_unchecked(p, s.sign > 0 ? z : G.inv_unchecked(z));
    }
    return p;
}

int z_parity(std::span<const Element> layer, std::span<const Step> steps) {
    int parity = 0;
    for (const Step &s : steps) {
        parity ^= layer[s.edge];
    }
    return parity ? -1 : 1;
}

void check_site(const ProjectorSpec &spec, const Model &model) {
    const Lattice &L = model.lattice();
    std::size_t limit = 0;
    switch (spec.kind) {
        case ProjectorKind::Bf:
        case ProjectorKind::Zf:
            limit = L.face_count();
            break;
        case ProjectorKind::Av:
        case ProjectorKind::DiagAv:
        case ProjectorKind::Xv:
            limit = L.vertex_count();
            break;
        case ProjectorKind::EdgeMatch:
            limit = L.edge_count();
            break;
    }
    if (spec.site >= limit) {
        throw std::out_of_range(std::string(to_string(spec.kind)) + " site " + std::to_string(spec.site) +
                                " does not exist");
    }
    if (spec.kind == ProjectorKind::Zf || spec.kind == ProjectorKind::Xv) {
        require_z2(model, to_string(spec.kind));
    }
    if (spec.kind == ProjectorKind::Bf && spec.target >= model.group().order()) {
        throw std::out_of_range("Bf target is not a group element");
    }
}

std::vector<GaugeMap> gauge_family(const ModelPtr &model, VertexId v) {
    std::vector<GaugeMap> maps;
    for (std::size_t g = 0; g < model->group().order(); g++) {
        maps.emplace_back(model, v, static_cast<Element>(g));
    }
    return maps;
}

}  // namespace

Element flux_of(std::span<const Element> layer, const Lattice &lattice, const FiniteGroup &group, FaceId f,
                VertexId base_vertex) {
    if (layer.size() != lattice.edge_count()) {
        throw std::invalid_argument("flux_of: layer size does not match the lattice");
    }
    auto boundary = face_boundary(lattice, f, base_vertex);
    return flux_along(layer, group, boundary);
}

namespace {

/// Calls run(fanout) with the entrywise form of the projector in `spec`.
template <typename Run>
auto with_projector_fanout(const SparseState &state, const ProjectorSpec &spec, Run &&run) {
    const Model &model = state.model();
    check_site(spec, model);
    const FiniteGroup &G = model.group();
    const std::size_t e = model.edge_count();
    const Layer layer = spec.layer;
    const bool on_ket = layer != Layer::Bra;
    const bool on_bra = layer != Layer::Ket;

    switch (spec.kind) {
        case ProjectorKind::Bf: {
            auto boundary = face_boundary(model.lattice(), spec.site, spec.base_vertex);
            return run([&](std::span<const Element> c, std::span<Element>, Amplitude amp, auto &emit) {
                if (on_ket && flux_along(c.first(e), G, boundary) != spec.target) {
                    return;
                }
                if (on_bra && flux_along(c.subspan(e), G, boundary) != spec.target) {
                    return;
                }
                emit(c, amp);
            });
        }
        case ProjectorKind::Zf: {
            auto boundary = model.lattice().face(spec.site);
            return run([&](std::span<const Element> c, std::span<Element>, Amplitude amp, auto &emit) {
                int sign = 1;
                if (on_ket) {
                    sign *= z_parity(c.first(e), boundary);
                }
                if (on_bra) {
                    sign *= z_parity(c.subspan(e), boundary);
                }
                emit(c, static_cast<double>(sign) * amp);
            });
        }
        case ProjectorKind::EdgeMatch:
            return run([&](std::span<const Element> c, std::span<Element>, Amplitude amp, auto &emit) {
                if (c[spec.site] == c[e + spec.site]) {
                    emit(c, amp);
                }
            });
        case ProjectorKind::Xv: {
            GaugeMap flip(state.model_ptr(), spec.site, 1);
            return run([&](std::span<const Element> c, std::span<Element> out, Amplitude amp, auto &emit) {
                std::copy(c.begin(), c.end(), out.begin());
                int sign = 1;
                if (on_ket) {
                    sign *= flip.apply(out.first(e));
                }
                if (on_bra) {
                    sign *= flip.apply(out.subspan(e));
                }
                emit(out, static_cast<double>(sign) * amp);
            });
        }
        case ProjectorKind::DiagAv: {
            auto maps = gauge_family(state.model_ptr(), spec.site);
            const double w = 1.0 / static_cast<double>(maps.size());
            return run([&](std::span<const Element> c, std::span<Element> out, Amplitude amp, auto &emit) {
                for (const auto &m : maps) {
                    std::copy(c.begin(), c.end(), out.begin());
                    m.apply(out.first(e));
                    m.apply(out.subspan(e));
                    emit(out, w * amp);
                }
            });
        }
        case ProjectorKind::Av: {
            // Diagonal layer: A_v (x) A_v, a double sum over the family.
            auto maps = gauge_family(state.model_ptr(), spec.site);
            const double w = 1.0 / static_cast<double>(maps.size());
            return run([&](std::span<const Element> c, std::span<Element> out, Amplitude amp, auto &emit) {
                if (layer != Layer::Diagonal) {
                    for (const auto &m : maps) {
                        std::copy(c.begin(), c.end(), out.begin());
                        m.apply(on_ket ? out.first(e) : out.subspan(e));
                        emit(out, w * amp);
                    }
                    return;
                }
                for (const auto &mk : maps) {
                    for (const auto &mb : maps) {
                        std::copy(c.begin(), c.end(), out.begin());
                        mk.apply(out.first(e));
                        mb.apply(out.subspan(e));
                        emit(out, w * w * amp);
                    }
                }
            });
        }
    }
    throw std::logic_error("unhandled projector kind");
}

}  // namespace

SparseState apply_projector(const SparseState &state, const ProjectorSpec &spec) {
    return with_projector_fanout(state, spec, [&](auto &&fanout) { return transform(state, fanout); });
}

SparseState apply_channel_Ev(const SparseState &state, VertexId v) {
    return apply_projector(state, ProjectorSpec::diag_av(v));
}

double projector_expectation_pure(const SparseState &state, const ProjectorSpec &spec) {
    double n2 = std::pow(norm(state), 2);
    if (n2 == 0) {
        throw std::domain_error("expectation in the zero state");
    }
    Amplitude value =
        with_projector_fanout(state, spec, [&](auto &&fanout) { return transform_inner(state, state, fanout); });
    return value.real() / n2;
}

double expectation_in_rho(const SparseState &state, const ProjectorSpec &spec) {
    const Model &model = state.model();
    check_site(spec, model);
    const std::size_t e = model.edge_count();
    std::vector<Step> boundary;
    switch (spec.kind) {
        case ProjectorKind::Bf:
            boundary = face_boundary(model.lattice(), spec.site, spec.base_vertex);
            break;
        case ProjectorKind::Zf: {
            auto f = model.lattice().face(spec.site);
            boundary.assign(f.begin(), f.end());
            break;
        }
        case ProjectorKind::EdgeMatch:
            break;
        default:
            throw std::invalid_argument(std::string("expectation_in_rho: ") + to_string(spec.kind) +
                                        " is not diagonal in the group basis");
    }
    std::vector<Element> c(model.config_size());
    detail::CompensatedComplexSum trace;
    detail::CompensatedComplexSum total;
    for (std::size_t i = 0; i < state.size(); i++) {
        state.unpack(i, c);
        if (!std::equal(c.begin(), c.begin() + e, c.begin() + e)) {
            continue;
        }
        Amplitude a = state.amplitude(i);
        trace.add(a);
        std::span<const Element> ket(c.data(), e);
        switch (spec.kind) {
            case ProjectorKind::Bf:
                if (flux_along(ket, model.group(), boundary) == spec.target) {
                    total.add(a);
                }
                break;
            case ProjectorKind::Zf:
                total.add(static_cast<double>(z_parity(ket, boundary)) * a);
                break;
            default:
                total.add(a);
                break;
        }
    }
    if (std::abs(trace.value()) == 0) {
        throw std::domain_error("expectation_in_rho: state has zero trace");
    }
    return (total.value() / trace.value()).real();
}

double ancilla_detect(const SparseState &state, FaceId f, bool toric) {
    const Lattice &L = state.model().lattice();
    if (f >= L.face_count()) {
        throw std::out_of_range("detection face " + std::to_string(f) + " does not exist");
    }
    if (toric) {
        double z = expectation_in_rho(state, ProjectorSpec::zf(f, Layer::Ket));
        return 1.0 - (1.0 + z) / 2.0;
    }
    VertexId base = L.step_start(L.face(f)[0]);
    return 1.0 - expectation_in_rho(state, ProjectorSpec::bf(f, base, Layer::Ket));
}

ToricString build_OZ(const Model &model, std::span<const VertexId> path) {
    require_z2(model, "O_Z");
    const Lattice &L = model.lattice();
    if (path.size() < 2) {
        throw std::invalid_argument("O_Z path needs at least two vertices");
    }
    std::vector<EdgeId> edges;
    for (std::size_t k = 0; k < path.size(); k++) {
        if (path[k] >= L.vertex_count()) {
            throw std::out_of_range("O_Z path vertex " + std::to_string(path[k]) + " does not exist");
        }
    }
    for (std::size_t k = 0; k + 1 < path.size(); k++) {
        std::optional<EdgeId> joining;
        for (const Incidence &inc : L.star(path[k])) {
            const Edge &ed = L.edge(inc.edge);
            VertexId other = inc.outgoing ? ed.head : ed.tail;
            if (other == path[k + 1] && (!joining || inc.edge < *joining)) {
                joining = inc.edge;
            }
        }
        if (!joining) {
            throw std::invalid_argument("O_Z path vertices " + std::to_string(path[k]) + " and " +
                                        std::to_string(path[k + 1]) + " are not adjacent");
        }
        edges.push_back(*joining);
    }
    return {std::make_shared<PauliMap>(std::vector<EdgeId>{}, edges), path.front(), path.back()};
}

ToricString build_OX(const Model &model, std::span<const FaceId> dual_path) {
    require_z2(model, "O_X");
    const Lattice &L = model.lattice();
    if (dual_path.size() < 2) {
        throw std::invalid_argument("O_X dual path needs at least two faces");
    }
    for (FaceId f : dual_path) {
        if (f >= L.face_count()) {
            throw std::out_of_range("O_X dual path face " + std::to_string(f) + " does not exist");
        }
    }
    std::vector<EdgeId> edges;
    for (std::size_t k = 0; k + 1 < dual_path.size(); k++) {
        std::optional<EdgeId> shared;
        for (const Step &s : L.face(dual_path[k])) {
            for (FaceId g : L.faces_of_edge(s.edge)) {
                if (g == dual_path[k + 1] && g != dual_path[k] && (!shared || s.edge < *shared)) {
                    shared = s.edge;
                }
            }
        }
        if (!shared) {
            throw std::invalid_argument("O_X dual path faces " + std::to_string(dual_path[k]) + " and " +
                                        std::to_string(dual_path[k + 1]) + " share no edge");
        }
        edges.push_back(*shared);
    }
    return {std::make_shared<PauliMap>(edges, std::vector<EdgeId>{}), dual_path.front(), dual_path.back()};
}

std::shared_ptr<const PauliMap> build_WX(const Model &model, std::span<const VertexId> around, const ToricString &oz) {
    require_z2(model, "W_X");
    const Lattice &L = model.lattice();
    std::set<VertexId> inside;
    for (VertexId v : around) {
        if (v >= L.vertex_count()) {
            throw std::out_of_range("W_X vertex " + std::to_string(v) + " does not exist");
        }
        inside.insert(v);
    }
    if (inside.empty() || inside.size() == L.vertex_count()) {
        throw std::invalid_argument("W_X must enclose a proper non-empty set of vertices");
    }
    int enclosed = static_cast<int>(inside.count(oz.first)) + static_cast<int>(inside.count(oz.last));
    if (oz.first == oz.last || enclosed != 1) {
        throw std::invalid_argument("W_X must enclose exactly one endpoint of O_Z, found " + std::to_string(enclosed));
    }
    std::vector<EdgeId> edges;
    for (std::size_t e = 0; e < L.edge_count(); e++) {
        bool t = inside.count(L.edge(e).tail) > 0;
        bool h = inside.count(L.edge(e).head) > 0;
        if (t != h) {
            edges.push_back(static_cast<EdgeId>(e));
        }
    }
    return std::make_shared<PauliMap>(edges, std::vector<EdgeId>{});
}

std::size_t anticommuting_overlap(const PauliMap &a, const PauliMap &b) {
    auto count = [](std::span<const EdgeId> x, std::span<const EdgeId> z) {
        std::vector<EdgeId> common;
        std::set_intersection(x.begin(), x.end(), z.begin(), z.end(), std::back_inserter(common));
        return common.size();
    };
    return count(a.x_edges(), b.z_edges()) + count(a.z_edges(), b.x_edges());
}

LinearOp build_U(const Model &model, const ToricString &ox, const ToricString &oz) {
    require_z2(model, "U");
    std::size_t overlap = anticommuting_overlap(*ox.map, *oz.map);
    if (overlap % 2 == 0) {
        throw std::invalid_argument("O_X and O_Z must anticommute; they share " + std::to_string(overlap) +
                                    " X/Z edges");
    }
    const double c = 1.0 / std::sqrt(2.0);
    return LinearOp{{{c, ox.map}, {c, oz.map}}};
}

Lattice star_lattice(std::size_t degree) {
    if (degree == 0) {
        throw std::invalid_argument("star needs at least one edge");
    }
    std::vector<Edge> edges;
    for (std::size_t k = 0; k < degree; k++) {
        VertexId leaf = static_cast<VertexId>(k + 1);
        edges.push_back(k % 2 == 0 ? Edge{0, leaf} : Edge{leaf, 0});
    }
    return Lattice(degree + 1, std::move(edges), {});
}

double purification_check(const FiniteGroup &group, std::size_t degree, std::uint64_t seed) {
    const std::size_t n = group.order();
    double full = std::pow(static_cast<double>(n), static_cast<double>(degree + 1));
    if (full > static_cast<double>(DenseDensity::kMaxDimension)) {
        throw std::length_error("purification check dimension " + std::to_string(full) + " exceeds " +
                                std::to_string(DenseDensity::kMaxDimension));
    }
    ModelPtr model = make_model(group, star_lattice(degree));
    const std::size_t D = static_cast<std::size_t>(std::llround(model->layer_dimension()));

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    Eigen::MatrixXcd A(D, D);
    for (Eigen::Index r = 0; r < A.rows(); r++) {
        for (Eigen::Index c = 0; c < A.cols(); c++) {
            A(r, c) = Amplitude(gauss(rng), gauss(rng));
        }
    }
    Eigen::MatrixXcd sigma = A * A.adjoint();
    sigma /= sigma.trace();

    // Controlled gauge unitary, built straight from the multiplication table.
    // Ancilla index is the most significant digit.
    Eigen::MatrixXcd U = Eigen::MatrixXcd::Zero(n * D, n * D);
    for (std::size_t g = 0; g < n; g++) {
        Element gi = group.inv(static_cast<Element>(g));
        for (std::size_t i = 0; i < D; i++) {
            auto c = dense_config(*model, i);
            for (std::size_t k = 0; k < degree; k++) {
                c[k] = k % 2 == 0 ? group.mul(static_cast<Element>(g), c[k]) : group.mul(c[k], gi);
            }
            U(g * D + dense_index(*model, c), g * D + i) = 1.0;
        }
    }
    Eigen::MatrixXcd plus = Eigen::MatrixXcd::Constant(n, n, 1.0 / static_cast<double>(n));
    Eigen::MatrixXcd joint(n * D, n * D);
    for (std::size_t a = 0; a < n; a++) {
        for (std::size_t b = 0; b < n; b++) {
            joint.block(a * D, b * D, D, D) = plus(a, b) * sigma;
        }
    }
    Eigen::MatrixXcd evolved = U * joint * U.adjoint();
    Eigen::MatrixXcd lhs = Eigen::MatrixXcd::Zero(D, D);
    for (std::size_t a = 0; a < n; a++) {
        lhs += evolved.block(a * D, a * D, D, D);
    }

    SparseState state = from_dense(model, sigma);
    DenseDensity rhs = to_dense(apply_channel_Ev(state, 0));
    return (lhs - rhs.matrix).cwiseAbs().maxCoeff();
}

}  // namespace qdouble
