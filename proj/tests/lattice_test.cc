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

#include "qdouble/lattice.h"

#include <algorithm>
#include <map>

#include "gtest/gtest.h"

using namespace qdouble;

namespace {

StringSpec horizontal_loop(const Lattice &L, long y) {
    StringSpec s;
    for (long x = 0; x < static_cast<long>(L.torus_shape()->lx); x++) {
        s.base.push_back({L.horizontal_edge(x, y), +1});
    }
    s.closed = true;
    return s;
}

void expect_lattice_error(const std::function<void()> &fn, const std::string &fragment) {
    try {
        fn();
        FAIL() << "expected LatticeError containing '" << fragment << "'";
    } catch (const LatticeError &e) {
        EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
    }
}

}  // namespace

TEST(lattice, torus_counts) {
    for (auto [lx, ly] : {std::pair{2, 2}, std::pair{3, 3}, std::pair{4, 3}, std::pair{5, 2}}) {
        auto L = torus(lx, ly);
        EXPECT_EQ(L.vertex_count(), std::size_t(lx * ly));
        EXPECT_EQ(L.edge_count(), std::size_t(2 * lx * ly));
        EXPECT_EQ(L.face_count(), std::size_t(lx * ly));
        EXPECT_EQ(L.euler_characteristic(), 0);
        require_closed_surface(L);
        for (VertexId v = 0; v < L.vertex_count(); v++) {
            EXPECT_EQ(L.star(v).size(), 4u);
        }
    }
}

TEST(lattice, torus_too_small) {
    EXPECT_THROW(torus(1, 3), LatticeError);
}

TEST(lattice, addressing_wraps) {
    auto L = torus(3, 3);
    EXPECT_EQ(L.vertex_at(-1, 0), L.vertex_at(2, 0));
    EXPECT_EQ(L.vertex_at(1, 4), 4u);
    EXPECT_EQ(L.horizontal_edge(1, 1), 8u);
    EXPECT_EQ(L.vertical_edge(1, 1), 9u);
    EXPECT_EQ(L.face_at(3, -1), L.face_at(0, 2));
    EXPECT_EQ(L.edge(L.vertical_edge(2, 2)).head, L.vertex_at(2, 0));
}

TEST(lattice, faces_are_counterclockwise) {
    auto L = torus(3, 3);
    auto f = L.face(L.face_at(1, 1));
    ASSERT_EQ(f.size(), 4u);
    EXPECT_EQ(L.step_start(f[0]), L.vertex_at(1, 1));
    EXPECT_EQ(L.step_end(f[0]), L.vertex_at(2, 1));
    EXPECT_EQ(L.step_end(f[1]), L.vertex_at(2, 2));
    EXPECT_EQ(L.step_end(f[2]), L.vertex_at(1, 2));
    EXPECT_EQ(L.step_end(f[3]), L.vertex_at(1, 1));
}

TEST(lattice, every_edge_in_two_faces_with_opposite_signs) {
    auto L = torus(4, 3);
    std::map<EdgeId, int> sign_sum;
    for (FaceId f = 0; f < L.face_count(); f++) {
        for (const auto &s : L.face(f)) {
            sign_sum[s.edge] += s.sign;
        }
    }
    for (EdgeId e = 0; e < L.edge_count(); e++) {
        EXPECT_EQ(L.faces_of_edge(e).size(), 2u);
        EXPECT_EQ(sign_sum[e], 0);
    }
}

TEST(lattice, face_boundary_rotation) {
    auto L = torus(3, 3);
    FaceId f = L.face_at(0, 0);
    auto b = face_boundary(L, f, L.vertex_at(1, 1));
    EXPECT_EQ(L.step_start(b.front()), L.vertex_at(1, 1));
    EXPECT_EQ(L.step_end(b.back()), L.vertex_at(1, 1));
    EXPECT_EQ(b.size(), 4u);
    expect_lattice_error([&] { face_boundary(L, f, L.vertex_at(2, 2)); }, "is not on face");
    expect_lattice_error([&] { face_boundary(L, 99, 0); }, "does not exist");
}

TEST(lattice, constructor_validation) {
    expect_lattice_error([] { Lattice(2, {{0, 5}}, {}); }, "outside");
    expect_lattice_error([] { Lattice(2, {{0, 1}}, {{}}); }, "empty boundary");
    expect_lattice_error([] { Lattice(2, {{0, 1}}, {{{0, +1}}}); }, "not a closed walk");
    expect_lattice_error([] { Lattice(2, {{0, 1}}, {{{3, +1}}}); }, "references edge");
    expect_lattice_error([] { Lattice(2, {{0, 1}}, {{{0, 2}}}); }, "sign");
}

TEST(lattice, require_closed_surface_rejects_disk) {
    // A single square with no partner faces.
    Lattice square(4, {{0, 1}, {1, 2}, {3, 2}, {0, 3}}, {{{0, +1}, {1, +1}, {2, -1}, {3, -1}}});
    expect_lattice_error([&] { require_closed_surface(square); }, "edge 0 appears in 1");
}

TEST(lattice, validate_string_spec_errors) {
    auto L = torus(3, 3);
    StringSpec empty;
    expect_lattice_error([&] { validate_string_spec(L, empty); }, "at least one edge");

    StringSpec gap{{{L.horizontal_edge(0, 0), +1}, {L.horizontal_edge(0, 1), +1}}, {}, false};
    expect_lattice_error([&] { validate_string_spec(L, gap); }, "disconnected");

    StringSpec open_claimed_closed{{{L.horizontal_edge(0, 0), +1}}, {}, true};
    expect_lattice_error([&] { validate_string_spec(L, open_claimed_closed); }, "does not return");

    StringSpec far_tooth{{{L.horizontal_edge(0, 0), +1}}, {{L.vertical_edge(2, 2), 0, ToothOrientation::Outgoing}}};
    expect_lattice_error([&] { validate_string_spec(L, far_tooth); }, "not incident");

    StringSpec flipped{{{L.horizontal_edge(0, 0), +1}}, {{L.vertical_edge(0, 0), 0, ToothOrientation::Incoming}}};
    expect_lattice_error([&] { validate_string_spec(L, flipped); }, "wrong orientation");

    StringSpec base_tooth{{{L.horizontal_edge(0, 0), +1}}, {{L.horizontal_edge(0, 0), 0, ToothOrientation::Outgoing}}};
    expect_lattice_error([&] { validate_string_spec(L, base_tooth); }, "also a base edge");

    StringSpec late{{{L.horizontal_edge(0, 0), +1}}, {{L.vertical_edge(1, 0), 2, ToothOrientation::Outgoing}}};
    expect_lattice_error([&] { validate_string_spec(L, late); }, "exceeds");

    Tooth t{L.vertical_edge(0, 0), 0, ToothOrientation::Outgoing};
    StringSpec dup{{{L.horizontal_edge(0, 0), +1}}, {t, t}};
    expect_lattice_error([&] { validate_string_spec(L, dup); }, "duplicates");
}

TEST(lattice, validate_string_spec_vertices) {
    auto L = torus(3, 3);
    StringSpec s{{{L.horizontal_edge(0, 0), +1}, {L.vertical_edge(1, 0), +1}},
                 {{L.vertical_edge(1, -1), 1, ToothOrientation::Incoming}}};
    auto c = validate_string_spec(L, s);
    EXPECT_EQ(c.base_vertices, (std::vector<VertexId>{L.vertex_at(0, 0), L.vertex_at(1, 0), L.vertex_at(1, 1)}));
    EXPECT_EQ(c.tooth_vertices, (std::vector<VertexId>{L.vertex_at(1, 0)}));
    EXPECT_EQ(c.start(), L.vertex_at(0, 0));
    EXPECT_EQ(c.end(), L.vertex_at(1, 1));
}

TEST(lattice, loop_class_windings) {
    auto L = torus(3, 4);
    EXPECT_EQ(loop_class(L, horizontal_loop(L, 2)), (LoopClass{1, 0}));

    StringSpec vertical;
    for (long y = 3; y >= 0; y--) {
        vertical.base.push_back({L.vertical_edge(1, y), -1});
    }
    vertical.closed = true;
    EXPECT_EQ(loop_class(L, vertical), (LoopClass{0, -1}));

    for (FaceId f = 0; f < L.face_count(); f++) {
        StringSpec s{std::vector<Step>(L.face(f).begin(), L.face(f).end()), {}, true};
        EXPECT_TRUE(loop_class(L, s).contractible()) << "face " << f;
    }
    StringSpec open{{{L.horizontal_edge(0, 0), +1}}, {}, false};
    EXPECT_THROW(loop_class(L, open), LatticeError);
}

TEST(lattice, closed_comb_around_single_face) {
    auto L = torus(3, 3);
    std::vector<FaceId> region{L.face_at(1, 1)};
    auto s = closed_comb_around(L, region, L.vertex_at(1, 1));
    EXPECT_TRUE(s.closed);
    ASSERT_EQ(s.base.size(), 4u);
    EXPECT_EQ(s.teeth.size(), 8u);
    auto c = validate_string_spec(L, s);
    EXPECT_EQ(c.start(), L.vertex_at(1, 1));
    EXPECT_TRUE(loop_class(L, s).contractible());
    for (const auto &t : s.teeth) {
        auto fs = L.faces_of_edge(t.edge);
        EXPECT_EQ(std::count(fs.begin(), fs.end(), region[0]), 0);
        EXPECT_LT(t.attach_index, s.base.size());
    }
    EXPECT_TRUE(comb_end_faces(L, s).empty());
}

TEST(lattice, closed_comb_around_two_faces) {
    auto L = torus(4, 4);
    std::vector<FaceId> region{L.face_at(1, 1), L.face_at(2, 1)};
    auto s = closed_comb_around(L, region, L.vertex_at(2, 1));
    EXPECT_EQ(s.base.size(), 6u);
    // Corners carry two teeth, the two middle vertices one each.
    EXPECT_EQ(s.teeth.size(), 10u);
    expect_lattice_error([&] { closed_comb_around(L, region, L.vertex_at(0, 0)); }, "not on the region boundary");
    std::vector<FaceId> diagonal{L.face_at(0, 0), L.face_at(1, 1)};
    EXPECT_THROW(closed_comb_around(L, diagonal, L.vertex_at(0, 0)), LatticeError);
}

TEST(lattice, comb_end_faces_of_single_tooth) {
    auto L = torus(2, 2);
    StringSpec s{{{L.vertical_edge(1, 1), -1}}, {{L.horizontal_edge(0, 1), 1, ToothOrientation::Incoming}}};
    validate_string_spec(L, s);
    auto ends = comb_end_faces(L, s);
    std::vector<FaceId> expect(L.faces_of_edge(s.teeth[0].edge).begin(), L.faces_of_edge(s.teeth[0].edge).end());
    std::sort(expect.begin(), expect.end());
    std::sort(ends.begin(), ends.end());
    EXPECT_EQ(ends, expect);
}
