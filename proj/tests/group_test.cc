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

#include "qdouble/group.h"

#include <algorithm>
#include <array>
#include <numeric>
#include <random>

#include "gtest/gtest.h"
#include "qdouble/io.h"

using namespace qdouble;

namespace {

std::vector<FiniteGroup> catalog() {
    return {builtin_group("Zn", 1), builtin_group("Z2"), builtin_group("Zn", 5), builtin_group("S3"),
            builtin_group("D4"), builtin_group("Q8")};
}

std::vector<std::size_t> sorted_sizes(const FiniteGroup &G) {
    auto sizes = conjugacy_classes(G).class_sizes();
    std::sort(sizes.begin(), sizes.end());
    return sizes;
}

// Brute-force isomorphism: try every bijection fixing the identity.
bool isomorphic(const FiniteGroup &a, const FiniteGroup &b) {
    if (a.order() != b.order()) {
        return false;
    }
    std::vector<Element> perm(a.order());
    std::iota(perm.begin(), perm.end(), Element{0});
    do {
        bool ok = true;
        for (std::size_t x = 0; x < a.order() && ok; x++) {
            for (std::size_t y = 0; y < a.order() && ok; y++) {
                ok = perm[a.mul(Element(x), Element(y))] == b.mul(perm[x], perm[y]);
            }
        }
        if (ok) {
            return true;
        }
    } while (std::next_permutation(perm.begin() + 1, perm.end()));
    return false;
}

std::string z2_text(const std::string &rows) {
    return "group z2\norder 2\ntable\n" + rows;
}

}  // namespace

TEST(group, builtin_orders_and_abelian_flags) {
    EXPECT_EQ(builtin_group("Zn", 2).order(), 2u);
    EXPECT_TRUE(builtin_group("Zn", 2).is_abelian());
    EXPECT_EQ(builtin_group("S3").order(), 6u);
    EXPECT_FALSE(builtin_group("S3").is_abelian());
    EXPECT_EQ(builtin_group("D4").order(), 8u);
    EXPECT_FALSE(builtin_group("Q8").is_abelian());
    EXPECT_EQ(builtin_group("Z7").order(), 7u);
}

TEST(group, builtin_errors) {
    EXPECT_THROW(builtin_group("A5"), std::invalid_argument);
    EXPECT_THROW(builtin_group("Zn"), std::invalid_argument);
    EXPECT_THROW(builtin_group("Zn", 0), std::invalid_argument);
}

TEST(group, class_sizes) {
    EXPECT_EQ(sorted_sizes(builtin_group("Z2")), (std::vector<std::size_t>{1, 1}));
    EXPECT_EQ(sorted_sizes(builtin_group("S3")), (std::vector<std::size_t>{1, 2, 3}));
    EXPECT_EQ(conjugacy_classes(builtin_group("D4")).classes.size(), 5u);
    EXPECT_EQ(sorted_sizes(builtin_group("Q8")), (std::vector<std::size_t>{1, 1, 2, 2, 2}));
}

TEST(group, quaternion_classes_match_hamilton_product) {
    // Units as (sign, axis) with axis 0 = 1, 1 = i, 2 = j, 3 = k.
    auto hmul = [](std::pair<int, int> a, std::pair<int, int> b) {
        static const int table[4][4][2] = {{{1, 0}, {1, 1}, {1, 2}, {1, 3}},
                                           {{1, 1}, {-1, 0}, {1, 3}, {-1, 2}},
                                           {{1, 2}, {-1, 3}, {-1, 0}, {1, 1}},
                                           {{1, 3}, {1, 2}, {-1, 1}, {-1, 0}}};
        const int *t = table[a.second][b.second];
        return std::make_pair(a.first * b.first * t[0], t[1]);
    };
    std::vector<std::pair<int, int>> units;
    for (int axis = 0; axis < 4; axis++) {
        units.push_back({1, axis});
        units.push_back({-1, axis});
    }
    std::vector<std::vector<std::pair<int, int>>> classes;
    for (auto u : units) {
        std::vector<std::pair<int, int>> cls;
        for (auto a : units) {
            auto ainv = std::make_pair(a.second == 0 ? a.first : -a.first, a.second);
            auto c = hmul(hmul(a, u), ainv);
            if (std::find(cls.begin(), cls.end(), c) == cls.end()) {
                cls.push_back(c);
            }
        }
        std::sort(cls.begin(), cls.end());
        if (std::find(classes.begin(), classes.end(), cls) == classes.end()) {
            classes.push_back(cls);
        }
    }
    std::vector<std::size_t> sizes;
    for (const auto &c : classes) {
        sizes.push_back(c.size());
    }
    std::sort(sizes.begin(), sizes.end());
    EXPECT_EQ(sizes, sorted_sizes(builtin_group("Q8")));
}

TEST(group, s3_composition_is_left_to_right) {
    auto G = builtin_group("S3");
    auto a = *G.find_label("(12)");
    auto b = *G.find_label("(23)");
    Element ab = G.mul(a, b);
    EXPECT_EQ(G.element_order(ab), 3u);
    // Apply (12) then (23): 1 -> 2 -> 1, 2 -> 1 -> 3, 3 -> 3 -> 2.
    EXPECT_EQ(G.label(ab), "(132)");
}

TEST(group, inverse_of_involution) {
    auto G = builtin_group("S3");
    for (Element a = 0; a < G.order(); a++) {
        if (G.element_order(a) == 2) {
            EXPECT_EQ(G.inv(a), a);
        }
        EXPECT_EQ(G.mul(a, G.inv(a)), kIdentity);
        EXPECT_EQ(G.mul(kIdentity, a), a);
    }
}

TEST(group, out_of_range) {
    auto G = builtin_group("S3");
    EXPECT_THROW(G.mul(6, 0), std::out_of_range);
    EXPECT_THROW(G.inv(17), std::out_of_range);
}

TEST(group, commutators) {
    auto G = builtin_group("S3");
    Element t = *G.find_label("(12)");
    Element r = *G.find_label("(123)");
    Element r2 = *G.find_label("(132)");
    EXPECT_NE(commutator(G, t, r), kIdentity);
    EXPECT_EQ(commutator(G, r, r2), kIdentity);
    auto Z = builtin_group("Zn", 6);
    for (Element a = 0; a < 6; a++) {
        for (Element b = 0; b < 6; b++) {
            EXPECT_EQ(commutator(Z, a, b), kIdentity);
        }
    }
}

TEST(group, properties_hold_across_catalog) {
    for (const auto &G : catalog()) {
        auto part = conjugacy_classes(G);
        std::size_t total = 0;
        for (const auto &c : part.classes) {
            total += c.size();
        }
        EXPECT_EQ(total, G.order()) << G.name();
        EXPECT_EQ(part.classes[part.class_of[kIdentity]].size(), 1u);
        for (Element a = 0; a < G.order(); a++) {
            for (Element b = 0; b < G.order(); b++) {
                EXPECT_EQ(G.inv(G.mul(a, b)), G.mul(G.inv(b), G.inv(a)));
                EXPECT_EQ(part.class_of[a], part.class_of[G.mul(G.mul(b, a), G.inv(b))]);
                EXPECT_EQ(commutator(G, a, b) == kIdentity, G.mul(a, b) == G.mul(b, a));
            }
        }
    }
}

TEST(group, parse_z2) {
    auto G = parse_group(z2_text("0 1\n1 0\n"));
    EXPECT_EQ(G.order(), 2u);
    EXPECT_EQ(G, builtin_group("Z2"));
}

TEST(group, parse_rejects_broken_identity) {
    try {
        parse_group(z2_text("1 0\n0 1\n"));
        FAIL() << "expected an identity error";
    } catch (const GroupError &e) {
        EXPECT_EQ(e.kind(), GroupError::Kind::Identity);
    }
}

TEST(group, parse_names_each_axiom) {
    auto kind_of = [](const std::string &text) {
        try {
            parse_group(text);
        } catch (const GroupError &e) {
            return e.kind();
        }
        return GroupError::Kind::Argument;
    };
    EXPECT_EQ(kind_of(z2_text("0 1\n1 2\n")), GroupError::Kind::Closure);
    EXPECT_EQ(kind_of("group g\norder 3\ntable\n0 1 2\n1 2 2\n2 2 1\n"), GroupError::Kind::Inverse);
    // Identity and inverses fine, not associative.
    std::string nonassoc =
        "group q\norder 5\ntable\n0 1 2 3 4\n1 0 3 4 2\n2 4 0 1 3\n3 2 4 0 1\n4 3 1 2 0\n";
    EXPECT_EQ(kind_of(nonassoc), GroupError::Kind::Associativity);
    EXPECT_EQ(kind_of("group g\norder two\n"), GroupError::Kind::Syntax);
}

TEST(group, parse_reports_line_numbers) {
    try {
        parse_group("# header\ngroup g\norder 2\ntable\n0 1\n1 x\n");
        FAIL();
    } catch (const GroupError &e) {
        EXPECT_EQ(e.kind(), GroupError::Kind::Syntax);
        EXPECT_EQ(e.line(), 6u);
    }
}

TEST(group, format_roundtrip) {
    for (const auto &G : catalog()) {
        auto back = parse_group(format_group(G));
        EXPECT_EQ(back, G);
        EXPECT_EQ(back.name(), G.name());
    }
}

TEST(group, s3_file_is_isomorphic_to_builtin) {
    auto file = parse_group(read_text_file(QDOUBLE_TESTDATA_DIR "/s3.group"));
    auto builtin = builtin_group("S3");
    EXPECT_NE(file, builtin);
    EXPECT_TRUE(isomorphic(file, builtin));
    EXPECT_FALSE(isomorphic(builtin_group("Z6"), builtin));
}

TEST(group, large_order_uses_sampled_associativity) {
    auto G = builtin_group("Zn", 200);
    EXPECT_EQ(G.order(), 200u);
    EXPECT_EQ(G.mul(150, 60), 10);
}
