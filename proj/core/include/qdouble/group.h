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

#ifndef QDOUBLE_GROUP_H
#define QDOUBLE_GROUP_H

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qdouble {

/// Dense index of a group element. Index 0 is always the identity.
using Element = std::uint16_t;
inline constexpr Element kIdentity = 0;

/// Raised when a group table or a group file is rejected.
class GroupError : public std::invalid_argument {
   public:
    enum class Kind { Syntax, Closure, Identity, Inverse, Associativity, Argument };

    GroupError(Kind kind, const std::string &message, std::size_t line = 0);

    Kind kind() const { return kind_; }
    /// 1-based line of a syntax error, 0 when not applicable.
    std::size_t line() const { return line_; }

   private:
    Kind kind_;
    std::size_t line_;
};

const char *to_string(GroupError::Kind kind);

/// A finite group stored as an explicit multiplication table.
///
/// Construction validates closure, identity, inverses and associativity
/// (exhaustive up to order 64, 10*n^2 sampled triples beyond that), so every
/// FiniteGroup value satisfies the group axioms. Instances are immutable.
class FiniteGroup {
   public:
    static constexpr std::size_t kMaxOrder = 65535;
    static constexpr std::size_t kExhaustiveAssociativityOrder = 64;

    /// `mul_table[a * order + b]` is the product `a * b`.
    FiniteGroup(std::string name, std::size_t order, std::vector<Element> mul_table,
                std::vector<std::string> labels = {});

    const std::string &name() const { return name_; }
    std::size_t order() const { return order_; }
    bool is_abelian() const { return abelian_; }

    /// Checked product; throws std::out_of_range on invalid indices.
    Element mul(Element a, Element b) const;
    /// Checked inverse; throws std::out_of_range on invalid indices.
    Element inv(Element a) const;

    Element mul_unchecked(Element a, Element b) const {
        assert(a < order_ && b < order_);
        return table_[static_cast<std::size_t>(a) * order_ + b];
    }
    Element inv_unchecked(Element a) const {
        assert(a < order_);
        return inverse_[a];
    }
    /// a^-1 * b * a
    Element conjugate_by(Element b, Element a) const {
        return mul_unchecked(mul_unchecked(inverse_[a], b), a);
    }

    /// Order of the element (smallest k >= 1 with a^k = identity).
    std::size_t element_order(Element a) const;

    const std::string &label(Element a) const;
    std::span<const std::string> labels() const { return labels_; }
    std::optional<Element> find_label(std::string_view label) const;

    std::span<const Element> table() const { return table_; }
    std::span<const Element> inverse_table() const { return inverse_; }

    bool operator==(const FiniteGroup &other) const {
        return order_ == other.order_ && table_ == other.table_;
    }

   private:
    std::string name_;
    std::size_t order_;
    std::vector<Element> table_;
    std::vector<Element> inverse_;
    std::vector<std::string> labels_;
    bool abelian_ = true;
};

/// Conjugacy classes of a group. Classes are listed in order of their smallest
/// element, so class 0 is always the identity class.
struct ConjugacyPartition {
    std::vector<std::vector<Element>> classes;
    std::vector<std::size_t> class_of;

    std::vector<std::size_t> class_sizes() const;
};

ConjugacyPartition conjugacy_classes(const FiniteGroup &group);

/// g h g^-1 h^-1
Element commutator(const FiniteGroup &group, Element g, Element h);

/// Builds one of the catalog groups: "Zn" (with parameter n >= 1), "S3",
/// "D4" or "Q8". Shorthands like "Z2" or "Z5" are accepted as well.
///
/// Permutation groups compose left to right: the product a*b means "apply a,
/// then b".
FiniteGroup builtin_group(std::string_view name, std::optional<std::size_t> parameter = std::nullopt);

FiniteGroup cyclic_group(std::size_t n);
FiniteGroup symmetric_group_3();
FiniteGroup dihedral_group_4();
FiniteGroup quaternion_group();

/// Builds a group from a list of permutations closed under composition. The
/// identity permutation must be first. Composition is left to right.
FiniteGroup group_from_permutations(std::string name, const std::vector<std::vector<int>> &perms,
                                    std::vector<std::string> labels);

/// Parses the text group format:
///
///     # comment
///     group <name>
///     order <n>
///     elements <label_0> ... <label_{n-1}>     (optional)
///     table
///     <n rows of n indices; row i holds mul(i, j)>
FiniteGroup parse_group(std::string_view text);

/// Inverse of parse_group.
std::string format_group(const FiniteGroup &group);

}  // namespace qdouble

#endif
