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

#include "qdouble/string_ops.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qdouble {

namespace {

Element signed_value(const FiniteGroup &G, Element z, int sign) {
    return sign > 0 ? z : G.inv_unchecked(z);
}

std::vector<Element> random_layer(const Model &model, std::mt19937_64 &rng) {
    std::uniform_int_distribution<std::size_t> pick(0, model.group().order() - 1);
    std::vector<Element> c(model.edge_count());
    for (auto &z : c) {
        z = static_cast<Element>(pick(rng));
    }
    return c;
}

}  // namespace

CombMap::CombMap(ModelPtr model, CheckedStringSpec spec, Element g)
    : model_(std::move(model)), spec_(std::move(spec)), g_(g) {
    if (g >= model_->group().order()) {
        throw std::out_of_range("comb element is not in the group");
    }
    // Teeth on distinct slots commute, so they can be visited in attach order.
    std::stable_sort(spec_.spec.teeth.begin(), spec_.spec.teeth.end(),
                     [](const Tooth &a, const Tooth &b) { return a.attach_index < b.attach_index; });
}

int CombMap::apply(std::span<Element> layer) const {
    const FiniteGroup &G = model_->group();
    const auto &base = spec_.spec.base;
    const auto &teeth = spec_.spec.teeth;
    Element p = kIdentity;
    std::size_t t = 0;
    for (std::size_t i = 0; i <= base.size() && t < teeth.size(); i++) {
        while (t < teeth.size() && teeth[t].attach_index == i) {
            Element k = G.mul_unchecked(G.mul_unchecked(G.inv_unchecked(p), g_), p);
            Element &y = layer[teeth[t].edge];
            y = teeth[t].orientation == ToothOrientation::Outgoing ? G.mul_unchecked(k, y)
                                                                   : G.mul_unchecked(y, G.inv_unchecked(k));
            t++;
        }
        if (i < base.size()) {
            p = G.mul_unchecked(p, signed_value(G, layer[base[i].edge], base[i].sign));
        }
    }
    return 1;
}

CombOperator make_comb(const Model &model, StringSpec spec, Element g, Layer layer) {
    if (g >= model.group().order()) {
        throw std::out_of_range("comb element is not in the group");
    }
    return {validate_string_spec(model.lattice(), std::move(spec)), g, layer};
}

SparseState apply_comb(const SparseState &state, const CombOperator &comb) {
    CombMap map(state.model_ptr(), comb.spec, comb.g);
    return apply_map(state, map, comb.layer);
}

CommutationDefects comb_commutation_defect(const ModelPtr &model, const StringSpec &spec, Element g,
                                           std::mt19937_64 &rng, std::size_t samples) {
    const Lattice &L = model->lattice();
    CombMap comb(model, validate_string_spec(L, spec), g);
    const CheckedStringSpec &checked = comb.spec();
    auto end_faces = comb_end_faces(L, spec);
    if (spec.closed) {
        // The base site of a closed comb: teeth at the start see the full
        // loop prefix on one side of the closing step and none on the other.
        auto closing = L.faces_of_edge(spec.base.back().edge);
        end_faces.insert(end_faces.end(), closing.begin(), closing.end());
    }

    CommutationDefects result;
    result.vertex.assign(L.vertex_count(), 0.0);
    result.face.assign(L.face_count(), 0.0);
    const std::size_t e = model->edge_count();
    for (std::size_t s = 0; s < samples; s++) {
        auto state = basis_state(model, DoubledConfig{random_layer(*model, rng), std::vector<Element>(e, kIdentity)});
        auto combed = apply_map(state, comb, Layer::Ket);
        auto commutator_norm = [&](const ProjectorSpec &p) {
            auto pa = apply_projector(combed, p);
            auto ap = apply_map(apply_projector(state, p), comb, Layer::Ket);
            return distance(pa, ap);
        };
        for (std::size_t v = 0; v < L.vertex_count(); v++) {
            double d = commutator_norm(ProjectorSpec::av(static_cast<VertexId>(v), Layer::Ket));
            result.vertex[v] = std::max(result.vertex[v], d);
        }
        for (std::size_t f = 0; f < L.face_count(); f++) {
            VertexId base = L.step_start(L.face(static_cast<FaceId>(f))[0]);
            double d = commutator_norm(ProjectorSpec::bf(static_cast<FaceId>(f), base, Layer::Ket));
            result.face[f] = std::max(result.face[f], d);
        }
    }
    for (std::size_t v = 0; v < L.vertex_count(); v++) {
        bool endpoint = v == checked.start() || v == checked.end();
        double &slot = endpoint ? result.endpoints : result.interior;
        slot = std::max(slot, result.vertex[v]);
    }
    for (std::size_t f = 0; f < L.face_count(); f++) {
        bool endpoint = std::find(end_faces.begin(), end_faces.end(), f) != end_faces.end();
        double &slot = endpoint ? result.endpoints : result.interior;
        slot = std::max(slot, result.face[f]);
    }
    return result;
}

double closed_loop_action_defect(const SparseState &state, const StringSpec &loop, Element g) {
    const Model &model = state.model();
    if (!loop.closed) {
        throw std::invalid_argument("closed_loop_action_defect needs a closed loop");
    }
    if (!model.lattice().torus_shape()) {
        throw std::invalid_argument("closed_loop_action_defect needs a torus to decide contractibility");
    }
    if (!loop_class(model.lattice(), loop).contractible()) {
        throw std::invalid_argument("loop is not contractible; it acts as a logical operator");
    }
    double n = norm(state);
    if (n == 0) {
        throw std::domain_error("closed loop check on the zero state");
    }
    auto moved = apply_comb(state, make_comb(model, loop, g, Layer::Diagonal));
    return distance(moved, state) / n;
}

ElongationOperator make_elongation(const Model &model, const StringSpec &L, const StringSpec &L_prime,
                                   ElongationConvention convention) {
    const Lattice &lattice = model.lattice();
    if (L.closed || L_prime.closed) {
        throw std::invalid_argument("elongation needs open strings");
    }
    auto short_spec = validate_string_spec(lattice, L);
    auto long_spec = validate_string_spec(lattice, L_prime);
    const std::size_t n = L.base.size();
    if (L_prime.base.size() != n + 1 || !std::equal(L.base.begin(), L.base.end(), L_prime.base.begin())) {
        throw std::invalid_argument("L' must be L's base followed by exactly one more step");
    }
    ElongationOperator op;
    op.u1 = short_spec.end();
    op.u2 = long_spec.end();
    op.e_star = L_prime.base.back();
    op.convention = convention;

    for (const Tooth &t : L.teeth) {
        if (std::find(L_prime.teeth.begin(), L_prime.teeth.end(), t) == L_prime.teeth.end()) {
            throw std::invalid_argument("L' must keep every tooth of L");
        }
    }
    for (const Tooth &t : L_prime.teeth) {
        if (std::find(L.teeth.begin(), L.teeth.end(), t) != L.teeth.end()) {
            continue;
        }
        if (t.attach_index != n + 1) {
            throw std::invalid_argument("teeth added by L' must attach at its new end vertex");
        }
        op.targets.push_back(t);
    }
    auto ref = std::find_if(L.teeth.begin(), L.teeth.end(), [&](const Tooth &t) { return t.attach_index == n; });
    if (ref == L.teeth.end()) {
        throw std::invalid_argument("L needs a tooth at its end vertex to control the elongation");
    }
    op.reference = *ref;
    for (const Tooth &t : op.targets) {
        if (t.edge == op.reference.edge || t.edge == op.e_star.edge) {
            throw std::invalid_argument("elongation target tooth coincides with a control edge");
        }
    }
    return op;
}

ElongationMap::ElongationMap(ModelPtr model, ElongationOperator op, bool inverse)
    : model_(std::move(model)), op_(std::move(op)), inverse_(inverse) {
}

Element ElongationMap::transport(std::span<const Element> layer) const {
    const FiniteGroup &G = model_->group();
    Element x = signed_value(G, layer[op_.e_star.edge], op_.e_star.sign);
    Element s = layer[op_.reference.edge];
    Element sigma = op_.reference.orientation == ToothOrientation::Outgoing ? s : G.inv_unchecked(s);
    Element xi = op_.convention.inverse_transport ? G.inv_unchecked(x) : x;
    Element si = G.inv_unchecked(sigma);
    Element a = op_.convention.transport_on_right ? G.mul_unchecked(xi, si) : G.mul_unchecked(si, xi);
    return inverse_ ? G.inv_unchecked(a) : a;
}

int ElongationMap::apply(std::span<Element> layer) const {
    const FiniteGroup &G = model_->group();
    Element a = transport(layer);
    Element a_inv = G.inv_unchecked(a);
    for (const Tooth &t : op_.targets) {
        Element &y = layer[t.edge];
        y = t.orientation == ToothOrientation::Outgoing ? G.mul_unchecked(a, y) : G.mul_unchecked(y, a_inv);
    }
    return 1;
}

SparseState apply_elongation(const SparseState &state, const ElongationOperator &op, bool inverse, Layer layer) {
    ElongationMap map(state.model_ptr(), op, inverse);
    return apply_map(state, map, layer);
}

double elongation_identity_defect(const ModelPtr &model, const StringSpec &L, const StringSpec &L_prime,
                                  const ElongationOperator &op, std::mt19937_64 &rng, std::size_t samples) {
    const Lattice &lattice = model->lattice();
    auto short_spec = validate_string_spec(lattice, L);
    auto long_spec = validate_string_spec(lattice, L_prime);
    ElongationMap forward(model, op, false);
    ElongationMap backward(model, op, true);
    std::uniform_int_distribution<std::size_t> pick(0, model->group().order() - 1);
    double worst = 0;
    for (std::size_t s = 0; s < samples; s++) {
        auto c = random_layer(*model, rng);
        Element g = static_cast<Element>(pick(rng));
        auto lhs = c;
        forward.apply(lhs);
        CombMap(model, short_spec, g).apply(lhs);
        backward.apply(lhs);
        auto rhs = c;
        CombMap(model, long_spec, g).apply(rhs);
        if (lhs != rhs) {
            worst = std::sqrt(2.0);
        }
    }
    return worst;
}

ElongationPin pin_elongation_convention(const ModelPtr &model, const StringSpec &L, const StringSpec &L_prime,
                                        std::uint64_t seed, std::size_t samples) {
    ElongationPin pin;
    for (int bits = 0; bits < 4; bits++) {
        auto convention = ElongationConvention::from_bits(bits);
        auto op = make_elongation(*model, L, L_prime, convention);
        std::mt19937_64 rng(seed);
        pin.defects[bits] = elongation_identity_defect(model, L, L_prime, op, rng, samples);
        if (!pin.found && pin.defects[bits] <= 1e-12) {
            pin.found = true;
            pin.convention = convention;
        }
    }
    return pin;
}

namespace {

Eigen::Index dim_of(std::size_t n) {
    if (n == 0 || n > 12) {
        throw std::invalid_argument("qubit count must be in [1, 12]");
    }
    return Eigen::Index{1} << n;
}

void check_qubit(std::size_t n, std::size_t k) {
    if (k == 0 || k > n) {
        throw std::out_of_range("qubit index " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
    }
}

}  // namespace

Eigen::MatrixXd pauli_x(std::size_t n, std::size_t k) {
    Eigen::Index d = dim_of(n);
    check_qubit(n, k);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index i = 0; i < d; i++) {
        m(i ^ (Eigen::Index{1} << (k - 1)), i) = 1;
    }
    return m;
}

Eigen::MatrixXd pauli_z(std::size_t n, std::size_t k) {
    Eigen::Index d = dim_of(n);
    check_qubit(n, k);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index i = 0; i < d; i++) {
        m(i, i) = (i >> (k - 1)) & 1 ? -1.0 : 1.0;
    }
    return m;
}

Eigen::MatrixXd cnot(std::size_t n, std::size_t i, std::size_t j) {
    if (i == j) {
        throw std::invalid_argument("CNOT needs distinct qubits");
    }
    Eigen::Index d = dim_of(n);
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
    Eigen::MatrixXd P = (id - pauli_z(n, i)) / 2;
    Eigen::MatrixXd Q = (id - pauli_x(n, j)) / 2;
    return id - 2 * P * Q;
}

Eigen::MatrixXd build_Un(std::size_t n) {
    dim_of(n);
    Eigen::MatrixXd U(2, 2);
    U << 1, 1, 1, -1;
    U /= std::sqrt(2.0);
    for (std::size_t m = 2; m <= n; m++) {
        Eigen::Index half = U.rows();
        // Qubit m is the most significant bit, so U_{m-1} (x) 1 is block diagonal.
        Eigen::MatrixXd lifted = Eigen::MatrixXd::Zero(2 * half, 2 * half);
        lifted.topLeftCorner(half, half) = U;
        lifted.bottomRightCorner(half, half) = U;
        Eigen::MatrixXd c = cnot(m, m, m - 1);
        U = c * lifted * c;
    }
    return U;
}

Eigen::MatrixXd un_closed_form(std::size_t n) {
    Eigen::Index d = dim_of(n);
    Eigen::MatrixXd zs = Eigen::MatrixXd::Identity(d, d);
    for (std::size_t k = 1; k <= n; k++) {
        zs = zs * pauli_z(n, k);
    }
    return (pauli_x(n, 1) + zs) / std::sqrt(2.0);
}

double cnot_conjugation_defect(std::size_t n, std::size_t i, std::size_t j) {
    Eigen::MatrixXd c = cnot(n, i, j);
    double dz = (c * pauli_z(n, j) * c - pauli_z(n, i) * pauli_z(n, j)).cwiseAbs().maxCoeff();
    double dx = (c * pauli_x(n, j) * c - pauli_x(n, j)).cwiseAbs().maxCoeff();
    return std::max(dz, dx);
}

LinearOp un_linear_op(const Model &model, std::span<const EdgeId> edges) {
    if (model.group().order() != 2) {
        throw std::invalid_argument("U_n is only defined for Z2 models");
    }
    if (edges.empty()) {
        throw std::invalid_argument("U_n needs at least one qubit");
    }
    for (EdgeId e : edges) {
        if (e >= model.edge_count()) {
            throw std::out_of_range("U_n edge " + std::to_string(e) + " does not exist");
        }
    }
    const double c = 1.0 / std::sqrt(2.0);
    auto x = std::make_shared<PauliMap>(std::vector<EdgeId>{edges.front()}, std::vector<EdgeId>{});
    auto z = std::make_shared<PauliMap>(std::vector<EdgeId>{}, std::vector<EdgeId>(edges.begin(), edges.end()));
    return LinearOp{{{c, x}, {c, z}}};
}

}  // namespace qdouble
