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

#ifndef QDOUBLE_OPERATORS_H
#define QDOUBLE_OPERATORS_H

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qdouble/doubled_state.h"

namespace qdouble {

/// Which half of the doubled space an operator acts on. Diagonal means O (x) O,
/// which for the real maps used here is conjugation rho -> O rho O^T.
enum class Layer { Ket, Bra, Diagonal };

const char *to_string(Layer layer);

/// A signed permutation of single-layer configurations.
class ConfigMap {
   public:
    virtual ~ConfigMap() = default;

    /// Rewrites `layer` (one element per edge) in place and returns the phase,
    /// +1 or -1.
    virtual int apply(std::span<Element> layer) const = 0;
};

using MapPtr = std::shared_ptr<const ConfigMap>;

/// A_v(g): outgoing edges z -> g z, incoming edges z -> z g^-1.
class GaugeMap final : public ConfigMap {
   public:
    GaugeMap(ModelPtr model, VertexId v, Element g);
    int apply(std::span<Element> layer) const override;

   private:
    ModelPtr model_;
    std::vector<Incidence> star_;
    Element g_;
    Element g_inv_;
};

/// Product of Pauli X and Z operators for Z2 models. The group element 1 plays
/// the role of |down>; X toggles it and Z contributes a -1 phase.
class PauliMap final : public ConfigMap {
   public:
    PauliMap(std::vector<EdgeId> x_edges, std::vector<EdgeId> z_edges);
    int apply(std::span<Element> layer) const override;

    std::span<const EdgeId> x_edges() const { return x_edges_; }
    std::span<const EdgeId> z_edges() const { return z_edges_; }

   private:
    std::vector<EdgeId> x_edges_;
    std::vector<EdgeId> z_edges_;
};

/// Applies several maps in order (first element acts first).
class ProductMap final : public ConfigMap {
   public:
    explicit ProductMap(std::vector<MapPtr> factors);
    int apply(std::span<Element> layer) const override;

   private:
    std::vector<MapPtr> factors_;
};

MapPtr gauge_map(ModelPtr model, VertexId v, Element g);

SparseState apply_map(const SparseState &state, const ConfigMap &map, Layer layer);

/// sum_k coef_k map_k
struct LinearOp {
    std::vector<std::pair<double, MapPtr>> terms;
};

/// For Layer::Diagonal this applies op (x) op, giving |terms|^2 branches.
SparseState apply_linear_op(const SparseState &state, const LinearOp &op, Layer layer);

/// max |<Uc|Uc'> - delta_cc'| over pairs drawn from `samples` random basis
/// configurations, i.e. a sampled estimate of ||U^T U - 1||.
double unitarity_defect(const ModelPtr &model, const LinearOp &op, std::mt19937_64 &rng, std::size_t samples = 16);

enum class ProjectorKind { Bf, Av, DiagAv, EdgeMatch, Zf, Xv };

const char *to_string(ProjectorKind kind);

/// Bf, Av, DiagAv and EdgeMatch are projectors; Zf and Xv are the toric
/// involutions. DiagAv and EdgeMatch couple both layers and ignore `layer`.
struct ProjectorSpec {
    ProjectorKind kind;
    /// Face for Bf/Zf, vertex for Av/DiagAv/Xv, edge for EdgeMatch.
    std::uint32_t site = 0;
    /// Base vertex for Bf.
    VertexId base_vertex = 0;
    /// Target flux for Bf.
    Element target = kIdentity;
    Layer layer = Layer::Ket;

    static ProjectorSpec bf(FaceId f, VertexId base, Layer layer, Element target = kIdentity) {
        return {ProjectorKind::Bf, f, base, target, layer};
    }
    static ProjectorSpec av(VertexId v, Layer layer) { return {ProjectorKind::Av, v, 0, kIdentity, layer}; }
    static ProjectorSpec diag_av(VertexId v) { return {ProjectorKind::DiagAv, v, 0, kIdentity, Layer::Diagonal}; }
    static ProjectorSpec edge_match(EdgeId e) { return {ProjectorKind::EdgeMatch, e, 0, kIdentity, Layer::Diagonal}; }
    static ProjectorSpec zf(FaceId f, Layer layer) { return {ProjectorKind::Zf, f, 0, kIdentity, layer}; }
    static ProjectorSpec xv(VertexId v, Layer layer) { return {ProjectorKind::Xv, v, 0, kIdentity, layer}; }
};

SparseState apply_projector(const SparseState &state, const ProjectorSpec &spec);

/// Ordered product around face f starting at base_vertex; z for sign +1 and
/// z^-1 for sign -1.
Element flux_of(std::span<const Element> layer, const Lattice &lattice, const FiniteGroup &group, FaceId f,
                VertexId base_vertex);

/// |G|^-1 sum_g A_v(g) (x) A_v(g).
SparseState apply_channel_Ev(const SparseState &state, VertexId v);

/// <rho|P|rho> / <rho|rho>.
double projector_expectation_pure(const SparseState &state, const ProjectorSpec &spec);

/// Tr(P rho) / Tr(rho) for specs diagonal in the group basis (Bf, Zf,
/// EdgeMatch). For Bf and Zf the ket layer is used.
double expectation_in_rho(const SparseState &state, const ProjectorSpec &spec);

/// Probability of reading the ancilla as |down> after the detection channel on
/// face f. The toric variant uses (1 + Z_f)/2 in place of B_f.
double ancilla_detect(const SparseState &state, FaceId f, bool toric);

/// A toric string with its geometric bookkeeping.
struct ToricString {
    std::shared_ptr<const PauliMap> map;
    /// O_Z: first and last vertex of the path. O_X: first and last face.
    std::uint32_t first = 0;
    std::uint32_t last = 0;
};

/// Z on the edges joining consecutive vertices of `path`.
ToricString build_OZ(const Model &model, std::span<const VertexId> path);
/// X on the edges shared by consecutive faces of `dual_path`.
ToricString build_OX(const Model &model, std::span<const FaceId> dual_path);
/// Product of the vertex operators X_v over `around`, i.e. X on the boundary
/// edges of that vertex set. Requires exactly one endpoint of oz inside.
std::shared_ptr<const PauliMap> build_WX(const Model &model, std::span<const VertexId> around, const ToricString &oz);
/// (O_X + O_Z)/sqrt(2); requires an odd overlap between the two strings.
LinearOp build_U(const Model &model, const ToricString &ox, const ToricString &oz);

/// Number of edges where one string has X and the other Z.
std::size_t anticommuting_overlap(const PauliMap &a, const PauliMap &b);

/// Dense check of Tr_anc[U (|+><+| (x) sigma) U^dag] = E_v[sigma] on a star
/// with `degree` edges alternating out/in around its centre, for a random
/// density matrix sigma. Returns the max entrywise difference.
double purification_check(const FiniteGroup &group, std::size_t degree, std::uint64_t seed);

/// Star lattice used by purification_check: vertex 0 at the centre, no faces.
Lattice star_lattice(std::size_t degree);

}  // namespace qdouble

#endif
