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

#ifndef QDOUBLE_STRING_OPS_H
#define QDOUBLE_STRING_OPS_H

#include <array>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "qdouble/operators.h"

namespace qdouble {

/// Comb string operator A_L(g). Base edges are left alone; a tooth attached
/// after the base prefix p is multiplied by k = p^-1 g p (outgoing: k y,
/// incoming: y k^-1).
class CombMap final : public ConfigMap {
   public:
    CombMap(ModelPtr model, CheckedStringSpec spec, Element g);
    int apply(std::span<Element> layer) const override;

    const CheckedStringSpec &spec() const { return spec_; }
    Element g() const { return g_; }

   private:
    ModelPtr model_;
    CheckedStringSpec spec_;
    Element g_;
};

struct CombOperator {
    CheckedStringSpec spec;
    Element g = kIdentity;
    Layer layer = Layer::Diagonal;
};

CombOperator make_comb(const Model &model, StringSpec spec, Element g, Layer layer = Layer::Diagonal);

SparseState apply_comb(const SparseState &state, const CombOperator &comb);

struct CommutationDefects {
    /// Per vertex / face; NaN where not sampled.
    std::vector<double> vertex;
    std::vector<double> face;
    /// Max over vertices other than the two base endpoints and faces other
    /// than the comb's end faces. For a closed comb the faces on either side
    /// of its closing step count as end faces.
    double interior = 0;
    /// Max over the excluded sites.
    double endpoints = 0;
};

/// Samples ||[A_v, A_L(g)] c|| and ||[B_f, A_L(g)] c|| on random single-layer
/// basis states c, for every vertex and face (B_f based at its first vertex).
CommutationDefects comb_commutation_defect(const ModelPtr &model, const StringSpec &spec, Element g,
                                           std::mt19937_64 &rng, std::size_t samples = 8);

/// ||(A_C(g) (x) A_C(g))|rho> - |rho>|| / |||rho>||. Rejects open or
/// non-contractible loops.
double closed_loop_action_defect(const SparseState &state, const StringSpec &loop, Element g);

/// Convention of the elongation unitary; see ElongationOperator.
struct ElongationConvention {
    bool inverse_transport = false;
    bool transport_on_right = false;

    int bits() const { return (inverse_transport ? 1 : 0) | (transport_on_right ? 2 : 0); }
    static ElongationConvention from_bits(int bits) { return {(bits & 1) != 0, (bits & 2) != 0}; }
    bool operator==(const ElongationConvention &) const = default;
};

/// Unitary relating A_L and A_L' where L' = L followed by the step e* from u1 to
/// u2. It is controlled by x, the signed value of e*, and by s, a reference
/// tooth of L at u1 with sigma = s (outgoing) or s^-1 (incoming). Every tooth of
/// L' at u2 is multiplied by a = sigma^-1 x (default convention) on the side set
/// by its orientation. The inverse uses a^-1.
struct ElongationOperator {
    VertexId u1 = 0;
    VertexId u2 = 0;
    Step e_star{};
    Tooth reference{};
    std::vector<Tooth> targets;
    ElongationConvention convention;
};

/// Derives E from L and L'. L' must extend L's base by one step and keep L's
/// teeth, adding teeth only at its new end vertex.
ElongationOperator make_elongation(const Model &model, const StringSpec &L, const StringSpec &L_prime,
                                   ElongationConvention convention = {});

class ElongationMap final : public ConfigMap {
   public:
    ElongationMap(ModelPtr model, ElongationOperator op, bool inverse);
    int apply(std::span<Element> layer) const override;

    /// The transport element a (or a^-1 for the inverse) for this layer.
    Element transport(std::span<const Element> layer) const;

   private:
    ModelPtr model_;
    ElongationOperator op_;
    bool inverse_;
};

SparseState apply_elongation(const SparseState &state, const ElongationOperator &op, bool inverse,
                             Layer layer = Layer::Diagonal);

/// max ||E^-1 A_L(g) E|c> - A_L'(g)|c>|| over `samples` random single-layer
/// configurations c and elements g. Each term is 0 or sqrt(2).
double elongation_identity_defect(const ModelPtr &model, const StringSpec &L, const StringSpec &L_prime,
                                  const ElongationOperator &op, std::mt19937_64 &rng, std::size_t samples = 200);

struct ElongationPin {
    ElongationConvention convention;
    bool found = false;
    std::array<double, 4> defects{};
};

/// Runs the identity for all four conventions and keeps the first exact one.
ElongationPin pin_elongation_convention(const ModelPtr &model, const StringSpec &L, const StringSpec &L_prime,
                                        std::uint64_t seed, std::size_t samples = 200);

/// Dense 2^n x 2^n matrices; qubit k (1-based) is bit k-1 of the index.
Eigen::MatrixXd pauli_x(std::size_t n, std::size_t k);
Eigen::MatrixXd pauli_z(std::size_t n, std::size_t k);
/// (-1)^{(1-Z_i)(1-X_j)/4}, i.e. CNOT with control i and target j.
Eigen::MatrixXd cnot(std::size_t n, std::size_t i, std::size_t j);

/// U_1 = Hadamard, U_n = CNOT_{n,n-1} U_{n-1} CNOT_{n,n-1}.
Eigen::MatrixXd build_Un(std::size_t n);
/// (X_1 + Z_1 ... Z_n)/sqrt(2).
Eigen::MatrixXd un_closed_form(std::size_t n);
/// max |CNOT Z_j CNOT - Z_i Z_j| and |CNOT X_j CNOT - X_j| entries.
double cnot_conjugation_defect(std::size_t n, std::size_t i, std::size_t j);

/// (X_1 + Z_1 ... Z_n)/sqrt(2) as a LinearOp on a Z2 model, qubit k living on
/// edges[k-1].
LinearOp un_linear_op(const Model &model, std::span<const EdgeId> edges);

}  // namespace qdouble

#endif
