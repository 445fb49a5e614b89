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

#ifndef QDOUBLE_EXPERIMENTS_H
#define QDOUBLE_EXPERIMENTS_H

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qdouble/string_ops.h"

namespace qdouble {

using OrderedJson = nlohmann::ordered_json;

/// One measured number and the rule that decides whether it passes.
struct Quantity {
    enum class Check { Equal, AtMost, GreaterThan };

    std::string name;
    double value = 0;
    Check check = Check::Equal;
    /// Equal: expected value. GreaterThan: strict lower bound.
    double target = 0;
    double tolerance = 0;
    /// Advisory quantities are reported but never fail a run.
    bool advisory = false;

    bool pass() const;
};

const char *to_string(Quantity::Check check);

struct SupportSize {
    std::string step;
    std::size_t size;
};

class ExperimentReport {
   public:
    explicit ExperimentReport(std::string experiment) : experiment_(std::move(experiment)) {}

    const std::string &experiment() const { return experiment_; }
    OrderedJson &inputs() { return inputs_; }
    const OrderedJson &inputs() const { return inputs_; }
    const std::vector<Quantity> &quantities() const { return quantities_; }
    const std::vector<SupportSize> &support_sizes() const { return support_sizes_; }

    void add_equal(std::string name, double value, double target, double tolerance, bool advisory = false);
    void add_at_most(std::string name, double value, double tolerance);
    void add_greater(std::string name, double value, double bound);
    void add_support(std::string step, std::size_t size);

    /// Trace = 1, hermiticity and overlap_with_I > 0 for one step, plus its
    /// support size.
    void record_step(const std::string &label, const SparseState &state, double tolerance = 1e-12);

    /// Appends another report's quantities under `prefix.`.
    void merge(const ExperimentReport &other, const std::string &prefix);

    const Quantity *find(std::string_view name) const;
    /// First non-advisory failing quantity, if any.
    const Quantity *first_failure() const;
    bool passed() const { return first_failure() == nullptr; }

    std::optional<double> wall_ms;

    OrderedJson to_json() const;

   private:
    std::string experiment_;
    OrderedJson inputs_ = OrderedJson::object();
    std::vector<Quantity> quantities_;
    std::vector<SupportSize> support_sizes_;
};

struct ExperimentOptions {
    /// Tolerance for physical expectation values.
    double tolerance = 1e-10;
    /// Tolerance for exact structural identities (trace, hermiticity, ...).
    double strict_tolerance = 1e-12;
    std::uint64_t seed = 1;
    std::size_t samples = 200;
};

/// Every Ev applied once to the identity product state. `order` defaults to
/// 0..V-1 and must otherwise be a permutation of the vertices.
SparseState prepare_ground_state(const ModelPtr &model, std::span<const VertexId> order = {});

/// Minimum expectation of each projector family (and the Z2 stabilizers).
ExperimentReport verify_ground_state(const SparseState &state, double tolerance = 1e-10);

/// Preparation, certification and the structural checks on one model.
ExperimentReport prepare_verify(const ModelPtr &model, const ExperimentOptions &options = {});

struct AbelianGeometry {
    std::vector<VertexId> oz_path;
    std::vector<FaceId> ox_dual_path;
    std::vector<VertexId> wx_around;
    FaceId shaded_face = 0;
};

/// O_Z along (0,1) -> (2,1), O_X across the edge between faces (0,0) and
/// (0,1), W_X around vertex (2,1), detection on face (0,0). Needs a torus of
/// size at least 3 x 3.
AbelianGeometry default_abelian_geometry(const Lattice &lattice);

ExperimentReport abelian_braiding(const ModelPtr &model, const AbelianGeometry &geometry,
                                  const ExperimentOptions &options = {});

struct NonabelianGeometry {
    /// Closed comb C; its start vertex is v1.
    StringSpec loop;
    /// Open comb L.
    StringSpec open;
    /// Face where braiding leaves its flux.
    FaceId face = 0;
};

/// C around face (0,0) from vertex (0,0); L from (1,2) to (1,1) with one tooth
/// on C's top edge; f = face (-1,0).
NonabelianGeometry default_nonabelian_geometry(const Lattice &lattice);

/// Fraction of h' in Cl(h) for which g h' g^-1 h'^-1 takes each value.
std::map<Element, double> commutator_census(const FiniteGroup &group, Element g, Element h);

/// The census prediction for <B_f>(rho_1) is reported as an advisory
/// comparison; `expected_bf_rho1`, when given, is enforced.
ExperimentReport nonabelian_braiding(const ModelPtr &model, Element g, Element h, const NonabelianGeometry &geometry,
                                     const ExperimentOptions &options = {},
                                     std::optional<double> expected_bf_rho1 = std::nullopt);

struct RestrictedStep {
    enum class Kind { Prepare, Channel, Gauge, Comb, Pauli };

    Kind kind = Kind::Prepare;
    VertexId vertex = 0;
    Element g = kIdentity;
    StringSpec string;
    std::vector<EdgeId> x_edges;
    std::vector<EdgeId> z_edges;

    std::string label() const;
};

/// prepare, a diagonal string (Pauli X string on Z2, comb elsewhere), then the
/// channel at vertex 0.
std::vector<RestrictedStep> default_restricted_steps(const Model &model);

ExperimentReport restricted_excitation_demo(const ModelPtr &model, const std::vector<RestrictedStep> &steps,
                                            const ExperimentOptions &options = {});

struct ElongationGeometry {
    StringSpec L;
    StringSpec L_prime;
};

/// L along (0,1) -> (1,1) with downward teeth, extended by the edge to (2,1).
ElongationGeometry default_elongation_geometry(const Lattice &lattice);

ExperimentReport elongation_check(const ModelPtr &model, const ElongationGeometry &geometry,
                                  const ExperimentOptions &options = {});

ExperimentReport un_check(std::size_t max_n, const ExperimentOptions &options = {});

/// Dense purification identity on stars of the given degrees plus the channel
/// laws (trace, idempotence) for every vertex of `model`.
ExperimentReport purification_experiment(const ModelPtr &model, std::span<const std::size_t> degrees,
                                         const ExperimentOptions &options = {});

}  // namespace qdouble

#endif
