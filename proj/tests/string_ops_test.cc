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

#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "qdouble/experiments.h"

using namespace qdouble;

namespace {

std::vector<Element> random_layer(const Model &m, std::mt19937_64 &rng) {
    std::vector<Element> d(m.edge_count());
    for (auto &x : d) {
        x = Element(rng() % m.group().order());
    }
    return d;
}

// Straightforward comb: walk the base once, and for each tooth recompute the
// prefix from scratch.
std::vector<Element> reference_comb(const Model &m, const StringSpec &s, Element g, std::vector<Element> c) {
    const auto &G = m.group();
    std::vector<Tooth> teeth = s.teeth;
    std::stable_sort(teeth.begin(), teeth.end(),
                     [](const Tooth &a, const Tooth &b) { return a.attach_index < b.attach_index; });
    for (const Tooth &t : teeth) {
        Element p = kIdentity;
        for (std::size_t i = 0; i < t.attach_index; i++) {
            Element z = c[s.base[i].edge];
            p = G.mul(p, s.base[i].sign > 0 ? z : G.inv(z));
        }
        Element k = G.mul(G.mul(G.inv(p), g), p);
        Element &y = c[t.edge];
        y = t.orientation == ToothOrientation::Outgoing ? G.mul(k, y) : G.mul(y, G.inv(k));
    }
    return c;
}

ModelPtr s3_torus(std::size_t lx = 3, std::size_t ly = 3) {
    return make_model(builtin_group("S3"), torus(lx, ly));
}

StringSpec open_comb(const Lattice &L) {
    // (0,1) -> (1,1) -> (2,1) with teeth hanging down and one pointing up.
    return {{{L.horizontal_edge(0, 1), +1}, {L.horizontal_edge(1, 1), +1}},
            {{L.vertical_edge(0, 0), 0, ToothOrientation::Incoming},
             {L.vertical_edge(1, 0), 1, ToothOrientation::Incoming},
             {L.vertical_edge(1, 1), 1, ToothOrientation::Outgoing},
             {L.vertical_edge(2, 0), 2, ToothOrientation::Incoming}},
            false};
}

}  // namespace

TEST(string_ops, comb_matches_reference) {
    std::mt19937_64 rng(1);
    for (const char *name : {"S3", "D4", "Q8", "Z2"}) {
        auto m = make_model(builtin_group(name), torus(4, 3));
        const auto &L = m->lattice();
        std::vector<StringSpec> specs{open_comb(L)};
        std::vector<FaceId> region{L.face_at(1, 1)};
        specs.push_back(closed_comb_around(L, region, L.vertex_at(2, 2)));
        for (const auto &s : specs) {
            for (int trial = 0; trial < 40; trial++) {
                auto c = random_layer(*m, rng);
                Element g = Element(rng() % m->group().order());
                auto got = c;
                CombMap(m, validate_string_spec(L, s), g).apply(got);
                EXPECT_EQ(got, reference_comb(*m, s, g, c)) << name;
            }
        }
    }
}

TEST(string_ops, comb_homomorphism_and_inverse) {
    auto m = s3_torus();
    const auto &G = m->group();
    auto spec = validate_string_spec(m->lattice(), open_comb(m->lattice()));
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 100; trial++) {
        auto c = random_layer(*m, rng);
        Element g = Element(rng() % 6), h = Element(rng() % 6);
        auto twice = c;
        CombMap(m, spec, g).apply(twice);
        CombMap(m, spec, h).apply(twice);
        auto once = c;
        CombMap(m, spec, G.mul(h, g)).apply(once);
        EXPECT_EQ(twice, once);
        CombMap(m, spec, G.inv(G.mul(h, g))).apply(once);
        EXPECT_EQ(once, c);
    }
}

TEST(string_ops, comb_commutes_away_from_endpoints) {
    auto m = s3_torus(4, 4);
    std::mt19937_64 rng(3);
    auto spec = open_comb(m->lattice());
    auto d = comb_commutation_defect(m, spec, *m->group().find_label("(12)"), rng, 6);
    EXPECT_LT(d.interior, 1e-12);
    EXPECT_GT(d.endpoints, 0.1);
    EXPECT_EQ(d.vertex.size(), 16u);
    EXPECT_EQ(d.face.size(), 16u);
    auto identity = comb_commutation_defect(m, spec, kIdentity, rng, 2);
    EXPECT_EQ(identity.endpoints, 0);
}

TEST(string_ops, closed_comb_commutes_away_from_base) {
    auto m = s3_torus(4, 4);
    const auto &L = m->lattice();
    std::vector<FaceId> region{L.face_at(1, 1), L.face_at(2, 1)};
    auto loop = closed_comb_around(L, region, L.vertex_at(1, 1));
    std::mt19937_64 rng(4);
    auto d = comb_commutation_defect(m, loop, 1, rng, 4);
    EXPECT_LT(d.interior, 1e-12);
    EXPECT_GT(d.vertex[L.vertex_at(1, 1)], 0.1);
    EXPECT_GT(d.face[L.face_at(0, 1)], 0.1);
    EXPECT_TRUE(comb_end_faces(L, loop).empty());
}

TEST(string_ops, closed_loop_acts_trivially_on_ground_state) {
    auto m = s3_torus(2, 2);
    auto rho = prepare_ground_state(m);
    const auto &L = m->lattice();
    std::vector<FaceId> region{L.face_at(0, 0)};
    auto loop = closed_comb_around(L, region, L.vertex_at(0, 0));
    for (Element g = 0; g < 6; g++) {
        EXPECT_LT(closed_loop_action_defect(rho, loop, g), 1e-12);
    }
    // On a 2x2 torus every tooth hangs off the loop at both ends, so the
    // identity configuration is left alone; on 3x3 it is not.
    EXPECT_EQ(closed_loop_action_defect(initial_state(m), loop, 1), 0);
    auto wide = s3_torus(3, 3);
    std::vector<FaceId> wide_region{wide->lattice().face_at(1, 1)};
    auto wide_loop = closed_comb_around(wide->lattice(), wide_region, wide->lattice().vertex_at(1, 1));
    EXPECT_NEAR(closed_loop_action_defect(initial_state(wide), wide_loop, 1), std::sqrt(2.0), 1e-12);

    StringSpec winding;
    for (long x = 0; x < 2; x++) {
        winding.base.push_back({L.horizontal_edge(x, 0), +1});
    }
    winding.closed = true;
    EXPECT_THROW(closed_loop_action_defect(rho, winding, 1), std::invalid_argument);
    StringSpec open{{{L.horizontal_edge(0, 0), +1}}, {}, false};
    EXPECT_THROW(closed_loop_action_defect(rho, open, 1), std::invalid_argument);
}

TEST(string_ops, apply_comb_layers) {
    auto m = s3_torus();
    std::mt19937_64 rng(5);
    DoubledConfig c{random_layer(*m, rng), random_layer(*m, rng)};
    auto s = basis_state(m, c);
    auto spec = open_comb(m->lattice());
    auto ket = apply_comb(s, make_comb(*m, spec, 2, Layer::Ket));
    auto both = apply_comb(s, make_comb(*m, spec, 2, Layer::Diagonal));
    ASSERT_EQ(ket.size(), 1u);
    EXPECT_EQ(ket.config(0).bra, c.bra);
    EXPECT_EQ(ket.config(0).ket, reference_comb(*m, spec, 2, c.ket));
    EXPECT_EQ(both.config(0).bra, reference_comb(*m, spec, 2, c.bra));
    EXPECT_THROW(make_comb(*m, spec, 6), std::out_of_range);
}

TEST(string_ops, elongation_pins_one_convention) {
    for (const char *name : {"S3", "D4", "Q8"}) {
        auto m = make_model(builtin_group(name), torus(3, 2));
        auto geo = default_elongation_geometry(m->lattice());
        auto pin = pin_elongation_convention(m, geo.L, geo.L_prime, 7, 300);
        ASSERT_TRUE(pin.found) << name;
        EXPECT_EQ(pin.convention.bits(), 0) << name;
        EXPECT_EQ(pin.defects[0], 0);
        // Inverting the transport only survives when every square is central.
        const auto &G = m->group();
        bool central_squares = true;
        for (Element x = 0; x < G.order(); x++) {
            for (Element k = 0; k < G.order(); k++) {
                Element xx = G.mul(x, x);
                central_squares = central_squares && G.mul(xx, k) == G.mul(k, xx);
            }
        }
        EXPECT_NEAR(pin.defects[1], central_squares ? 0 : std::sqrt(2.0), 1e-15) << name;
        EXPECT_NEAR(pin.defects[2], std::sqrt(2.0), 1e-15) << name;
        EXPECT_NEAR(pin.defects[3], std::sqrt(2.0), 1e-15) << name;
    }
}

TEST(string_ops, elongation_roundtrip_and_abelian_case) {
    auto m = make_model(builtin_group("D4"), torus(4, 3));
    auto geo = default_elongation_geometry(m->lattice());
    auto op = make_elongation(*m, geo.L, geo.L_prime);
    EXPECT_EQ(op.targets.size(), 2u);
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 50; trial++) {
        auto c = random_layer(*m, rng);
        auto d = c;
        ElongationMap(m, op, false).apply(d);
        ElongationMap(m, op, true).apply(d);
        EXPECT_EQ(d, c);
    }
    auto z = make_model(builtin_group("Zn", 4), torus(3, 2));
    auto zgeo = default_elongation_geometry(z->lattice());
    auto pin = pin_elongation_convention(z, zgeo.L, zgeo.L_prime, 1, 100);
    EXPECT_TRUE(pin.found);
    EXPECT_EQ(pin.defects[0], 0);
}

TEST(string_ops, elongation_validation) {
    auto m = s3_torus(3, 2);
    const auto &L = m->lattice();
    auto geo = default_elongation_geometry(L);
    auto bad = geo.L_prime;
    bad.base.push_back({L.vertical_edge(2, 1), +1});
    EXPECT_THROW(make_elongation(*m, geo.L, bad), std::invalid_argument);
    auto dropped = geo.L_prime;
    dropped.teeth.erase(dropped.teeth.begin());
    EXPECT_THROW(make_elongation(*m, geo.L, dropped), std::invalid_argument);
    auto no_reference = geo.L;
    no_reference.teeth.pop_back();
    auto no_reference_prime = geo.L_prime;
    no_reference_prime.teeth.erase(no_reference_prime.teeth.begin() + 1);
    EXPECT_THROW(make_elongation(*m, no_reference, no_reference_prime), std::invalid_argument);
    auto closed = geo.L;
    closed.closed = true;
    EXPECT_THROW(make_elongation(*m, closed, geo.L_prime), std::invalid_argument);
}

namespace {

// CNOT as a permutation of basis indices.
Eigen::MatrixXd cnot_oracle(std::size_t n, std::size_t i, std::size_t j) {
    Eigen::Index d = Eigen::Index{1} << n;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index x = 0; x < d; x++) {
        Eigen::Index y = (x >> (i - 1)) & 1 ? x ^ (Eigen::Index{1} << (j - 1)) : x;
        m(y, x) = 1;
    }
    return m;
}

// (X_1 + Z_1...Z_n)/sqrt(2) from its action on basis vectors.
Eigen::MatrixXd un_oracle(std::size_t n) {
    Eigen::Index d = Eigen::Index{1} << n;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index x = 0; x < d; x++) {
        m(x ^ 1, x) += 1;
        m(x, x) += std::popcount(static_cast<unsigned long>(x)) % 2 ? -1 : 1;
    }
    return m / std::sqrt(2.0);
}

}  // namespace

TEST(string_ops, dense_qubit_gates) {
    for (std::size_t n = 2; n <= 5; n++) {
        for (std::size_t i = 1; i <= n; i++) {
            for (std::size_t j = 1; j <= n; j++) {
                if (i != j) {
                    EXPECT_EQ(cnot(n, i, j), cnot_oracle(n, i, j));
                    EXPECT_LT(cnot_conjugation_defect(n, i, j), 1e-15);
                }
            }
        }
    }
    EXPECT_THROW(cnot(3, 2, 2), std::invalid_argument);
    EXPECT_THROW(pauli_x(3, 4), std::out_of_range);
    EXPECT_THROW(build_Un(13), std::invalid_argument);
}

TEST(string_ops, un_recursion_matches_closed_form) {
    for (std::size_t n = 1; n <= 8; n++) {
        auto U = build_Un(n);
        auto want = un_oracle(n);
        EXPECT_LT((U - want).cwiseAbs().maxCoeff(), 1e-12) << n;
        EXPECT_LT((un_closed_form(n) - want).cwiseAbs().maxCoeff(), 1e-12) << n;
        EXPECT_LT((U * U.transpose() - Eigen::MatrixXd::Identity(U.rows(), U.cols())).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(string_ops, un_linear_op_on_edges) {
    auto m = make_model(builtin_group("Z2"), torus(2, 2));
    std::vector<EdgeId> edges{5, 0, 3};
    auto op = un_linear_op(*m, edges);
    std::mt19937_64 rng(9);
    EXPECT_LT(unitarity_defect(m, op, rng, 32), 1e-12);
    auto want = un_oracle(3);
    for (Eigen::Index x = 0; x < 8; x++) {
        std::vector<Element> c(8, 0);
        for (std::size_t k = 0; k < 3; k++) {
            c[edges[k]] = Element((x >> k) & 1);
        }
        auto s = basis_state(m, DoubledConfig{c, std::vector<Element>(8, 0)});
        auto out = apply_linear_op(s, op, Layer::Ket);
        for (Eigen::Index y = 0; y < 8; y++) {
            std::vector<Element> d(8, 0);
            for (std::size_t k = 0; k < 3; k++) {
                d[edges[k]] = Element((y >> k) & 1);
            }
            EXPECT_NEAR(out.amplitude_of(DoubledConfig{d, std::vector<Element>(8, 0)}).real(), want(y, x), 1e-12);
        }
    }
}
