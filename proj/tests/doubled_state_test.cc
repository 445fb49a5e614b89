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

#include "qdouble/doubled_state.h"

#include <cmath>
#include <map>
#include <random>

#include "gtest/gtest.h"

using namespace qdouble;

namespace {

ModelPtr z2_model() {
    return make_model(builtin_group("Z2"), torus(2, 2));
}

DoubledConfig random_config(const Model &m, std::mt19937_64 &rng) {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(m.group().order()) - 1);
    DoubledConfig c{std::vector<Element>(m.edge_count()), std::vector<Element>(m.edge_count())};
    for (auto &x : c.ket) {
        x = static_cast<Element>(pick(rng));
    }
    for (auto &x : c.bra) {
        x = static_cast<Element>(pick(rng));
    }
    return c;
}

SparseState random_state(ModelPtr m, std::mt19937_64 &rng, int terms) {
    std::normal_distribution<double> gauss;
    SparseState s(m);
    for (int k = 0; k < terms; k++) {
        s.add(random_config(*m, rng), {gauss(rng), gauss(rng)});
    }
    return s;
}

struct EngineGuard {
    EngineOptions saved = engine_options();
    ~EngineGuard() { set_engine_options(saved); }
};

}  // namespace

TEST(doubled_state, pack_roundtrip_for_many_orders) {
    std::mt19937_64 rng(3);
    for (std::size_t n : {1, 2, 3, 6, 8, 17, 300}) {
        auto m = make_model(builtin_group("Zn", n), torus(3, 2));
        for (int trial = 0; trial < 20; trial++) {
            auto c = random_config(*m, rng);
            std::vector<Element> flat = c.ket;
            flat.insert(flat.end(), c.bra.begin(), c.bra.end());
            std::vector<std::uint64_t> words(m->words_per_config());
            m->pack(flat, words.data());
            std::vector<Element> back(flat.size());
            m->unpack(words.data(), back);
            EXPECT_EQ(back, flat);
        }
    }
}

TEST(doubled_state, initial_state_overlap) {
    auto s = initial_state(z2_model());
    EXPECT_EQ(s.size(), 1u);
    EXPECT_NEAR(std::abs(trace_of_rho(s) - 1.0), 0, 1e-15);
    // 2^8 layer dimension, so <rho|I>/(|rho| |I|) = 1/16.
    EXPECT_NEAR(overlap_with_I(s).real(), 1.0 / 16, 1e-15);
    EXPECT_EQ(hermiticity_defect(s), 0);
}

TEST(doubled_state, add_accumulates_and_cancels) {
    auto m = z2_model();
    std::mt19937_64 rng(5);
    auto c = random_config(*m, rng);
    SparseState s(m);
    s.add(c, {1, 2});
    s.add(c, {0.5, -1});
    EXPECT_EQ(s.size(), 1u);
    EXPECT_EQ(s.amplitude_of(c), Amplitude(1.5, 1));
    auto zero = linear_combination(1.0, s, -1.0, s);
    EXPECT_EQ(zero.size(), 0u);
    EXPECT_THROW(normalize(zero), std::domain_error);
    EXPECT_THROW(overlap_with_I(zero), std::domain_error);
}

TEST(doubled_state, add_rejects_bad_configs) {
    auto m = z2_model();
    SparseState s(m);
    DoubledConfig short_config{std::vector<Element>(3), std::vector<Element>(8)};
    EXPECT_THROW(s.add(short_config, 1.0), std::invalid_argument);
    DoubledConfig bad{std::vector<Element>(8, 0), std::vector<Element>(8, 0)};
    bad.bra[2] = 5;
    EXPECT_THROW(s.add(bad, 1.0), std::out_of_range);
}

TEST(doubled_state, mirrored_imaginary_entry_is_not_hermitian) {
    auto m = z2_model();
    DoubledConfig c{std::vector<Element>(8, 0), std::vector<Element>(8, 0)};
    c.ket[0] = 1;
    DoubledConfig mirror{c.bra, c.ket};
    SparseState s(m);
    s.add(c, {0, 0.5});
    s.add(mirror, {0, 0.5});
    // i/2 opposite i/2 should have been i/2 opposite -i/2.
    EXPECT_NEAR(hermiticity_defect(s), 1.0, 1e-15);
    SparseState h(m);
    h.add(c, {0, 0.5});
    h.add(mirror, {0, -0.5});
    EXPECT_EQ(hermiticity_defect(h), 0);
}

TEST(doubled_state, inner_norm_distance_against_dense) {
    auto m = make_model(builtin_group("Z2"), torus(2, 2));
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; trial++) {
        auto a = random_state(m, rng, 30);
        auto b = random_state(m, rng, 30);
        Eigen::MatrixXcd A = to_dense(a).matrix;
        Eigen::MatrixXcd B = to_dense(b).matrix;
        Amplitude want = (A.adjoint() * B).trace();
        EXPECT_NEAR(std::abs(inner(a, b) - want), 0, 1e-10);
        EXPECT_NEAR(norm(a), A.norm(), 1e-10);
        EXPECT_NEAR(distance(a, b), (A - B).norm(), 1e-10);
        EXPECT_NEAR(std::abs(trace_of_rho(a) - A.trace()), 0, 1e-10);
        EXPECT_NEAR(norm(normalize(a)), 1, 1e-12);
        auto c = linear_combination(2.0, a, {0, 1}, b);
        EXPECT_NEAR((to_dense(c).matrix - (2.0 * A + Amplitude(0, 1) * B)).norm(), 0, 1e-10);
        EXPECT_NEAR(distance(scale(a, 3.0), linear_combination(1.0, a, 2.0, a)), 0, 1e-10);
    }
}

TEST(doubled_state, dense_roundtrip) {
    auto m = make_model(builtin_group("S3"), torus(2, 2));
    EXPECT_THROW(to_dense(initial_state(m)), std::length_error);
    // Three edges on two vertices, no faces: dimension 27.
    auto z = make_model(builtin_group("Zn", 3), Lattice(2, {{0, 1}, {1, 0}, {0, 1}}, {}));
    std::mt19937_64 rng(2);
    auto s = random_state(z, rng, 50);
    EXPECT_EQ(distance(from_dense(z, to_dense(s).matrix), s), 0);
    for (std::size_t i : {0, 1, 17, 26}) {
        EXPECT_EQ(dense_index(*z, dense_config(*z, i)), i);
    }
    EXPECT_THROW(from_dense(z, Eigen::MatrixXcd::Zero(3, 3)), std::invalid_argument);
}

TEST(doubled_state, dense_psd_and_hermiticity) {
    auto m = z2_model();
    DenseDensity rho{Eigen::MatrixXcd::Zero(256, 256)};
    rho.matrix(0, 0) = 0.5;
    rho.matrix(1, 1) = 0.5;
    rho.matrix(0, 1) = 0.5;
    rho.matrix(1, 0) = 0.5;
    EXPECT_LT(psd_defect(rho), 1e-14);
    EXPECT_EQ(hermiticity_defect(rho), 0);
    rho.matrix(0, 1) = 1.0;
    EXPECT_GT(hermiticity_defect(rho), 0.4);
    DenseDensity neg{Eigen::MatrixXcd::Zero(4, 4)};
    neg.matrix(2, 2) = -0.25;
    EXPECT_NEAR(psd_defect(neg), 0.25, 1e-14);
}

TEST(doubled_state, prune_drops_small_entries) {
    auto m = z2_model();
    std::mt19937_64 rng(9);
    SparseState s(m);
    s.add(random_config(*m, rng), 1e-20);
    s.add(random_config(*m, rng), 1.0);
    EXPECT_EQ(prune(s, 1e-14).size(), 1u);
    EXPECT_EQ(prune(s, 0).size(), 2u);
}

TEST(doubled_state, engine_options_validation) {
    EngineGuard guard;
    EXPECT_THROW(set_engine_options({0, 1e-14}), std::invalid_argument);
    EXPECT_THROW(set_engine_options({1, -1}), std::invalid_argument);
    set_engine_options({4, 0});
    EXPECT_EQ(engine_options().threads, 4u);
}

TEST(doubled_state, transform_is_deterministic_across_threads) {
    EngineGuard guard;
    auto m = make_model(builtin_group("Zn", 4), torus(3, 3));
    std::mt19937_64 rng(21);
    auto s = random_state(m, rng, 20000);
    auto fanout = [](std::span<const Element> c, std::span<Element> scratch, Amplitude amp, auto &emit) {
        std::copy(c.begin(), c.end(), scratch.begin());
        scratch[0] = static_cast<Element>((scratch[0] + 1) % 4);
        emit(scratch, amp * 0.5);
        emit(c, amp * 0.5);
    };
    set_engine_options({1, 1e-14});
    auto one = transform(s, fanout);
    set_engine_options({4, 1e-14});
    auto four = transform(s, fanout);
    ASSERT_EQ(one.size(), four.size());
    for (std::size_t i = 0; i < one.size(); i++) {
        EXPECT_EQ(one.config(i), four.config(i));
        EXPECT_EQ(one.amplitude(i), four.amplitude(i));
    }

    std::map<std::vector<Element>, Amplitude> expected;
    std::vector<Element> c(m->config_size());
    for (std::size_t i = 0; i < s.size(); i++) {
        s.unpack(i, c);
        expected[c] += s.amplitude(i) * 0.5;
        c[0] = static_cast<Element>((c[0] + 1) % 4);
        expected[c] += s.amplitude(i) * 0.5;
    }
    std::erase_if(expected, [](const auto &kv) { return std::abs(kv.second) < 1e-14; });
    ASSERT_EQ(one.size(), expected.size());
    for (std::size_t i = 0; i < one.size(); i++) {
        one.unpack(i, c);
        auto it = expected.find(c);
        ASSERT_NE(it, expected.end());
        EXPECT_NEAR(std::abs(one.amplitude(i) - it->second), 0, 1e-15);
    }
}

TEST(doubled_state, transform_inner_matches_materialized_map) {
    EngineGuard guard;
    auto m = make_model(builtin_group("Zn", 4), torus(3, 3));
    std::mt19937_64 rng(22);
    auto s = random_state(m, rng, 20000);
    // Overlaps both branches of the map below.
    auto t = transform(s, [](std::span<const Element> c, std::span<Element> scratch, Amplitude amp, auto &emit) {
        std::copy(c.begin(), c.end(), scratch.begin());
        scratch[1] = static_cast<Element>((scratch[1] + 3) % 4);
        emit(scratch, amp * 0.3);
        emit(c, amp * Amplitude(0.5, -0.2));
    });
    auto fanout = [](std::span<const Element> c, std::span<Element> scratch, Amplitude amp, auto &emit) {
        std::copy(c.begin(), c.end(), scratch.begin());
        scratch[1] = static_cast<Element>((scratch[1] + 3) % 4);
        emit(scratch, amp * Amplitude(0, 1));
        emit(c, amp * 2.0);
    };
    set_engine_options({1, 0});
    Amplitude want = inner(t, transform(s, fanout));
    Amplitude one = transform_inner(t, s, fanout);
    set_engine_options({4, 0});
    Amplitude four = transform_inner(t, s, fanout);
    EXPECT_NEAR(std::abs(one - want), 0, 1e-12 * std::abs(want));
    EXPECT_EQ(one, four);
}
