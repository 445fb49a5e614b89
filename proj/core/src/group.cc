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
#include <charconv>
#include <random>
#include <sstream>

namespace qdouble {

GroupError::GroupError(Kind kind, const std::string &message, std::size_t line)
    : std::invalid_argument(line == 0 ? std::string(to_string(kind)) + " error: " + message
                                      : "line " + std::to_string(line) + ": " + to_string(kind) +
                                            " error: " + message),
      kind_(kind),
      line_(line) {
}

const char *to_string(GroupError::Kind kind) {
    switch (kind) {
        case GroupError::Kind::Syntax:
            return "syntax";
        case GroupError::Kind::Closure:
            return "closure";
        case GroupError::Kind::Identity:
            return "identity";
        case GroupError::Kind::Inverse:
            return "inverse";
        case GroupError::Kind::Associativity:
            return "associativity";
        case GroupError::Kind::Argument:
            return "argument";
    }
    return "unknown";
}

FiniteGroup::FiniteGroup(std::string name, std::size_t order, std::vector<Element> mul_table,
                         std::vector<std::string> labels)
    : name_(std::move(name)), order_(order), table_(std::move(mul_table)), labels_(std::move(labels)) {
    using Kind = GroupError::Kind;
    if (order_ == 0 || order_ > kMaxOrder) {
        throw GroupError(Kind::Argument, "order must be in [1, " + std::to_string(kMaxOrder) + "]");
    }
    if (table_.size() != order_ * order_) {
        throw GroupError(Kind::Argument, "table has " + std::to_string(table_.size()) + " entries, expected " +
                                             std::to_string(order_ * order_));
    }
    if (labels_.empty()) {
        for (std::size_t k = 0; k < order_; k++) {
            labels_.push_back(std::to_string(k));
        }
    } else if (labels_.size() != order_) {
        throw GroupError(Kind::Argument, "expected " + std::to_string(order_) + " labels");
    }

    for (std::size_t k = 0; k < table_.size(); k++) {
        if (table_[k] >= order_) {
            throw GroupError(Kind::Closure, "entry (" + std::to_string(k / order_) + ", " +
                                                std::to_string(k % order_) + ") = " + std::to_string(table_[k]) +
                                                " is outside [0, " + std::to_string(order_) + ")");
        }
    }
    for (std::size_t a = 0; a < order_; a++) {
        if (table_[a] != a || table_[a * order_] != a) {
            throw GroupError(Kind::Identity, "row 0 and column 0 must act as the identity (element " +
                                                 std::to_string(a) + " violates it)");
        }
    }

    inverse_.assign(order_, 0);
    for (std::size_t a = 0; a < order_; a++) {
        std::size_t found = 0;
        Element inverse = 0;
        for (std::size_t b = 0; b < order_; b++) {
            if (table_[a * order_ + b] == kIdentity && table_[b * order_ + a] == kIdentity) {
                found++;
                inverse = static_cast<Element>(b);
            }
        }
        if (found != 1) {
            throw GroupError(Kind::Inverse, "element " + std::to_string(a) + " has " + std::to_string(found) +
                                                " two-sided inverses");
        }
        inverse_[a] = inverse;
    }

    auto check_triple = [&](std::size_t a, std::size_t b, std::size_t c) {
        Element left = table_[table_[a * order_ + b] * order_ + c];
        Element right = table_[a * order_ + table_[b * order_ + c]];
        if (left != right) {
            throw GroupError(Kind::Associativity, "(" + std::to_string(a) + "*" + std::to_string(b) + ")*" +
                                                      std::to_string(c) + " != " + std::to_string(a) + "*(" +
                                                      std::to_string(b) + "*" + std::to_string(c) + ")");
        }
    };
    if (order_ <= kExhaustiveAssociativityOrder) {
        for (std::size_t a = 0; a < order_; a++) {
            for (std::size_t b = 0; b < order_; b++) {
                for (std::size_t c = 0; c < order_; c++) {
                    check_triple(a, b, c);
                }
            }
        }
    } else {
        // Fixed seed keeps validation deterministic.
        std::mt19937_64 rng(0x9e3779b97f4a7c15ULL ^ order_);
        std::uniform_int_distribution<std::size_t> pick(0, order_ - 1);
        for (std::size_t k = 0; k < 10 * order_ * order_; k++) {
            check_triple(pick(rng), pick(rng), pick(rng));
        }
    }

    for (std::size_t a = 0; a < order_ && abelian_; a++) {
        for (std::size_t b = a + 1; b < order_; b++) {
            if (table_[a * order_ + b] != table_[b * order_ + a]) {
                abelian_ = false;
                break;
            }
        }
    }
}

Element FiniteGroup::mul(Element a, Element b) const {
    if (a >= order_ || b >= order_) {
        throw std::out_of_range("group element index out of range in " + name_);
    }
    return table_[static_cast<std::size_t>(a) * order_ + b];
}

Element FiniteGroup::inv(Element a) const {
    if (a >= order_) {
        throw std::out_of_range("group element index out of range in " + name_);
    }
    return inverse_[a];
}

std::size_t FiniteGroup::element_order(Element a) const {
    std::size_t k = 1;
    Element power = a;
    while (power != kIdentity) {
        power = mul(power, a);
        k++;
    }
    return k;
}

const std::string &FiniteGroup::label(Element a) const {
    if (a >= order_) {
        throw std::out_of_range("group element index out of range in " + name_);
    }
    return labels_[a];
}

std::optional<Element> FiniteGroup::find_label(std::string_view label) const {
    for (std::size_t k = 0; k < labels_.size(); k++) {
        if (labels_[k] == label) {
            return static_cast<Element>(k);
        }
    }
    return std::nullopt;
}

std::vector<std::size_t> ConjugacyPartition::class_sizes() const {
    std::vector<std::size_t> sizes;
    sizes.reserve(classes.size());
    for (const auto &c : classes) {
        sizes.push_back(c.size());
    }
    return sizes;
}

ConjugacyPartition conjugacy_classes(const FiniteGroup &group) {
    const std::size_t n = group.order();
    constexpr std::size_t kUnassigned = static_cast<std::size_t>(-1);
    ConjugacyPartition result;
    result.class_of.assign(n, kUnassigned);
    for (std::size_t a = 0; a < n; a++) {
        if (result.class_of[a] != kUnassigned) {
            continue;
        }
        std::size_t id = result.classes.size();
        std::vector<Element> members;
        for (std::size_t g = 0; g < n; g++) {
            Element conj = group.conjugate_by(static_cast<Element>(a), static_cast<Element>(g));
            if (result.class_of[conj] == kUnassigned) {
                result.class_of[conj] = id;
                members.push_back(conj);
            }
        }
        std::sort(members.begin(), members.end());
        result.classes.push_back(std::move(members));
    }
    return result;
}

Element commutator(const FiniteGroup &group, Element g, Element h) {
    return group.mul(group.mul(group.mul(g, h), group.inv(g)), group.inv(h));
}

FiniteGroup cyclic_group(std::size_t n) {
    if (n < 1 || n > FiniteGroup::kMaxOrder) {
        throw GroupError(GroupError::Kind::Argument, "Zn requires 1 <= n <= " + std::to_string(FiniteGroup::kMaxOrder));
    }
    std::vector<Element> table(n * n);
    for (std::size_t a = 0; a < n; a++) {
        for (std::size_t b = 0; b < n; b++) {
            table[a * n + b] = static_cast<Element>((a + b) % n);
        }
    }
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < n; k++) {
        labels.push_back(k == 0 ? "e" : "a" + (k == 1 ? std::string() : std::to_string(k)));
    }
    return FiniteGroup("Z" + std::to_string(n), n, std::move(table), std::move(labels));
}

FiniteGroup group_from_permutations(std::string name, const std::vector<std::vector<int>> &perms,
                                   std::vector<std::string> labels) {
    const std::size_t n = perms.size();
    std::map<std::vector<int>, Element> index;
    for (std::size_t k = 0; k < n; k++) {
        index.emplace(perms[k], static_cast<Element>(k));
    }
    if (index.size() != n) {
        throw GroupError(GroupError::Kind::Argument, "duplicate permutation");
    }
    std::vector<Element> table(n * n);
    for (std::size_t a = 0; a < n; a++) {
        for (std::size_t b = 0; b < n; b++) {
            // Left to right: x -> b(a(x)).
            std::vector<int> composed(perms[a].size());
            for (std::size_t x = 0; x < composed.size(); x++) {
                composed[x] = perms[b][perms[a][x]];
            }
            auto it = index.find(composed);
            if (it == index.end()) {
                throw GroupError(GroupError::Kind::Closure, "permutation list is not closed under composition");
            }
            table[a * n + b] = it->second;
        }
    }
    return FiniteGroup(std::move(name), n, std::move(table), std::move(labels));
}

FiniteGroup symmetric_group_3() {
    // Points are 1,2,3 stored as 0,1,2. (123) sends 1->2->3->1.
    return group_from_permutations("S3",
                                   {
                                       {0, 1, 2},
                                       {1, 0, 2},
                                       {0, 2, 1},
                                       {2, 1, 0},
                                       {1, 2, 0},
                                       {2, 0, 1},
                                   },
                                   {"()", "(12)", "(23)", "(13)", "(123)", "(132)"});
}

FiniteGroup dihedral_group_4() {
    // Symmetries of a square with corners 0..3: rotations i -> i+k and
    // reflections i -> k-i.
    std::vector<std::vector<int>> perms;
    std::vector<std::string> labels;
    for (int k = 0; k < 4; k++) {
        std::vector<int> p(4);
        for (int i = 0; i < 4; i++) {
            p[i] = (i + k) % 4;
        }
        perms.push_back(p);
        labels.push_back("r" + std::to_string(k));
    }
    for (int k = 0; k < 4; k++) {
        std::vector<int> p(4);
        for (int i = 0; i < 4; i++) {
            p[i] = ((k - i) % 4 + 4) % 4;
        }
        perms.push_back(p);
        labels.push_back("s" + std::to_string(k));
    }
    return group_from_permutations("D4", perms, labels);
}

FiniteGroup quaternion_group() {
    // Element 2*u + s encodes (-1)^s * unit[u], with units 1, i, j, k.
    // unit[a] * unit[b] = sign * unit[c].
    static constexpr int kUnitProduct[4][4] = {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
    static constexpr int kUnitSign[4][4] = {{0, 0, 0, 0}, {0, 1, 0, 1}, {0, 1, 1, 0}, {0, 0, 1, 1}};
    std::vector<Element> table(64);
    for (int a = 0; a < 8; a++) {
        for (int b = 0; b < 8; b++) {
            int ua = a / 2, ub = b / 2;
            int sign = (a % 2) ^ (b % 2) ^ kUnitSign[ua][ub];
            table[a * 8 + b] = static_cast<Element>(2 * kUnitProduct[ua][ub] + sign);
        }
    }
    return FiniteGroup("Q8", 8, std::move(table), {"1", "-1", "i", "-i", "j", "-j", "k", "-k"});
}

FiniteGroup builtin_group(std::string_view name, std::optional<std::size_t> parameter) {
    if (name == "Zn") {
        if (!parameter.has_value() || *parameter < 1) {
            throw GroupError(GroupError::Kind::Argument, "Zn requires a parameter n >= 1");
        }
        return cyclic_group(*parameter);
    }
    if (name.size() > 1 && name[0] == 'Z') {
        std::size_t n = 0;
        auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), n);
        if (ec == std::errc() && ptr == name.data() + name.size() && n >= 1) {
            return cyclic_group(n);
        }
    }
    if (name == "S3") {
        return symmetric_group_3();
    }
    if (name == "D4") {
        return dihedral_group_4();
    }
    if (name == "Q8") {
        return quaternion_group();
    }
    throw GroupError(GroupError::Kind::Argument,
                     "unknown group '" + std::string(name) + "' (known: Zn, Z<n>, S3, D4, Q8)");
}

namespace {

std::vector<std::string> split_words(std::string_view line) {
    std::vector<std::string> words;
    std::size_t k = 0;
    while (k < line.size()) {
        while (k < line.size() && (line[k] == ' ' || line[k] == '\t' || line[k] == '\r')) {
            k++;
        }
        std::size_t start = k;
        while (k < line.size() && line[k] != ' ' && line[k] != '\t' && line[k] != '\r') {
            k++;
        }
        if (k > start) {
            words.emplace_back(line.substr(start, k - start));
        }
    }
    return words;
}

std::size_t parse_index(const std::string &word, std::size_t line) {
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), value);
    if (ec != std::errc() || ptr != word.data() + word.size()) {
        throw GroupError(GroupError::Kind::Syntax, "expected a non-negative integer, got '" + word + "'", line);
    }
    return value;
}

}  // namespace

FiniteGroup parse_group(std::string_view text) {
    using Kind = GroupError::Kind;
    enum class Stage { Name, Order, ElementsOrTable, Rows, Done };

    Stage stage = Stage::Name;
    std::string name;
    std::size_t order = 0;
    std::vector<std::string> labels;
    std::vector<Element> table;
    std::size_t rows_read = 0;
    std::size_t line_number = 0;

    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        line_number++;
        if (auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        auto words = split_words(line);
        if (words.empty()) {
            if (end == text.size()) {
                break;
            }
            continue;
        }
        switch (stage) {
            case Stage::Name:
                if (words[0] != "group" || words.size() != 2) {
                    throw GroupError(Kind::Syntax, "expected 'group <name>'", line_number);
                }
                name = words[1];
                stage = Stage::Order;
                break;
            case Stage::Order:
                if (words[0] != "order" || words.size() != 2) {
                    throw GroupError(Kind::Syntax, "expected 'order <n>'", line_number);
                }
                order = parse_index(words[1], line_number);
                if (order == 0 || order > FiniteGroup::kMaxOrder) {
                    throw GroupError(Kind::Syntax, "order out of range", line_number);
                }
                stage = Stage::ElementsOrTable;
                break;
            case Stage::ElementsOrTable:
                if (words[0] == "elements" && labels.empty()) {
                    if (words.size() != order + 1) {
                        throw GroupError(Kind::Syntax,
                                         "expected " + std::to_string(order) + " element labels, got " +
                                             std::to_string(words.size() - 1),
                                         line_number);
                    }
                    labels.assign(words.begin() + 1, words.end());
                } else if (words[0] == "table" && words.size() == 1) {
                    stage = Stage::Rows;
                    table.reserve(order * order);
                } else {
                    throw GroupError(Kind::Syntax, "expected 'elements ...' or 'table'", line_number);
                }
                break;
            case Stage::Rows:
                if (words.size() != order) {
                    throw GroupError(Kind::Syntax,
                                     "table row has " + std::to_string(words.size()) + " entries, expected " +
                                         std::to_string(order),
                                     line_number);
                }
                for (const auto &w : words) {
                    std::size_t v = parse_index(w, line_number);
                    if (v >= order) {
                        throw GroupError(Kind::Closure,
                                         "entry " + w + " is outside [0, " + std::to_string(order) + ")",
                                         line_number);
                    }
                    table.push_back(static_cast<Element>(v));
                }
                if (++rows_read == order) {
                    stage = Stage::Done;
                }
                break;
            case Stage::Done:
                throw GroupError(Kind::Syntax, "unexpected content after the table", line_number);
        }
        if (end == text.size()) {
            break;
        }
    }
    if (stage != Stage::Done) {
        throw GroupError(Kind::Syntax, "unexpected end of input (table incomplete or missing)", line_number);
    }
    return FiniteGroup(std::move(name), order, std::move(table), std::move(labels));
}

std::string format_group(const FiniteGroup &group) {
    std::ostringstream out;
    out << "group " << group.name() << "\n";
    out << "order " << group.order() << "\n";
    out << "elements";
    for (const auto &label : group.labels()) {
        out << " " << label;
    }
    out << "\ntable\n";
    for (std::size_t a = 0; a < group.order(); a++) {
        for (std::size_t b = 0; b < group.order(); b++) {
            out << (b ? " " : "") << group.mul_unchecked(static_cast<Element>(a), static_cast<Element>(b));
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace qdouble
