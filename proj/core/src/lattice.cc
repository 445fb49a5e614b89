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
#include <set>
#include <tuple>

namespace qdouble {

Lattice::Lattice(std::size_t vertex_count, std::vector<Edge> edges, std::vector<std::vector<Step>> faces,
                 std::optional<TorusShape> torus)
    : vertex_count_(vertex_count), edges_(std::move(edges)), faces_(std::move(faces)), torus_(torus) {
    for (std::size_t e = 0; e < edges_.size(); e++) {
        if (edges_[e].tail >= vertex_count_ || edges_[e].head >= vertex_count_) {
            throw LatticeError("edge " + std::to_string(e) + " references a vertex outside [0, " +
                               std::to_string(vertex_count_) + ")");
        }
    }
    stars_.resize(vertex_count_);
    for (std::size_t e = 0; e < edges_.size(); e++) {
        stars_[edges_[e].tail].push_back({static_cast<EdgeId>(e), true});
        stars_[edges_[e].head].push_back({static_cast<EdgeId>(e), false});
    }
    edge_faces_.resize(edges_.size());
    for (std::size_t f = 0; f < faces_.size(); f++) {
        const auto &boundary = faces_[f];
        if (boundary.empty()) {
            throw LatticeError("face " + std::to_string(f) + " has an empty boundary");
        }
        for (std::size_t k = 0; k < boundary.size(); k++) {
            const Step &s = boundary[k];
            if (s.edge >= edges_.size()) {
                throw LatticeError("face " + std::to_string(f) + " references edge " + std::to_string(s.edge) +
                                   " which does not exist");
            }
            if (s.sign != 1 && s.sign != -1) {
                throw LatticeError("face " + std::to_string(f) + " has a step with sign other than +1/-1");
            }
        }
        for (std::size_t k = 0; k < boundary.size(); k++) {
            const Step &s = boundary[k];
            const Step &next = boundary[(k + 1) % boundary.size()];
            if (step_end(s) != step_start(next)) {
                throw LatticeError("face " + std::to_string(f) + " boundary is not a closed walk at step " +
                                   std::to_string(k));
            }
            edge_faces_[s.edge].push_back(static_cast<FaceId>(f));
        }
    }
    if (torus_.has_value() && static_cast<std::size_t>(torus_->lx) * torus_->ly != vertex_count_) {
        throw LatticeError("torus shape does not match the vertex count");
    }
}

bool Lattice::face_has_vertex(FaceId f, VertexId v) const {
    for (const Step &s : face(f)) {
        if (step_start(s) == v) {
            return true;
        }
    }
    return false;
}

std::vector<VertexId> Lattice::face_vertices(FaceId f) const {
    std::vector<VertexId> result;
    for (const Step &s : face(f)) {
        VertexId v = step_start(s);
        if (std::find(result.begin(), result.end(), v) == result.end()) {
            result.push_back(v);
        }
    }
    return result;
}

namespace {

long wrap(long value, long period) {
    return ((value % period) + period) % period;
}

}  // namespace

VertexId Lattice::vertex_at(long x, long y) const {
    if (!torus_.has_value()) {
        throw LatticeError("lattice has no torus addressing");
    }
    return static_cast<VertexId>(wrap(y, torus_->ly) * torus_->lx + wrap(x, torus_->lx));
}

EdgeId Lattice::horizontal_edge(long x, long y) const {
    return 2 * vertex_at(x, y);
}

EdgeId Lattice::vertical_edge(long x, long y) const {
    return 2 * vertex_at(x, y) + 1;
}

FaceId Lattice::face_at(long x, long y) const {
    return vertex_at(x, y);
}

Lattice torus(std::size_t lx, std::size_t ly) {
    if (lx < 2 || ly < 2) {
        throw LatticeError("torus dimensions must be at least 2 (got " + std::to_string(lx) + "x" +
                           std::to_string(ly) + ")");
    }
    auto vid = [&](std::size_t x, std::size_t y) { return static_cast<VertexId>((y % ly) * lx + (x % lx)); };
    std::vector<Edge> edges(2 * lx * ly);
    std::vector<std::vector<Step>> faces(lx * ly);
    for (std::size_t y = 0; y < ly; y++) {
        for (std::size_t x = 0; x < lx; x++) {
            VertexId v = vid(x, y);
            edges[2 * v] = {v, vid(x + 1, y)};
            edges[2 * v + 1] = {v, vid(x, y + 1)};
        }
    }
    for (std::size_t y = 0; y < ly; y++) {
        for (std::size_t x = 0; x < lx; x++) {
            faces[vid(x, y)] = {
                {2 * vid(x, y), +1},
                {2 * vid(x + 1, y) + 1, +1},
                {2 * vid(x, y + 1), -1},
                {2 * vid(x, y) + 1, -1},
            };
        }
    }
    return Lattice(lx * ly, std::move(edges), std::move(faces),
                   TorusShape{static_cast<std::uint32_t>(lx), static_cast<std::uint32_t>(ly)});
}

void require_closed_surface(const Lattice &lattice) {
    std::vector<int> slots(lattice.edge_count(), 0);
    std::vector<int> net(lattice.edge_count(), 0);
    for (FaceId f = 0; f < lattice.face_count(); f++) {
        for (const Step &s : lattice.face(f)) {
            slots[s.edge]++;
            net[s.edge] += s.sign;
        }
    }
    for (EdgeId e = 0; e < lattice.edge_count(); e++) {
        if (slots[e] != 2 || net[e] != 0) {
            throw LatticeError("edge " + std::to_string(e) + " appears in " + std::to_string(slots[e]) +
                               " face slots with net traversal " + std::to_string(net[e]) +
                               "; a closed orientable surface needs 2 slots with opposite signs");
        }
    }
}

std::vector<Step> face_boundary(const Lattice &lattice, FaceId f, VertexId base_vertex) {
    if (f >= lattice.face_count()) {
        throw LatticeError("face " + std::to_string(f) + " does not exist");
    }
    auto boundary = lattice.face(f);
    for (std::size_t k = 0; k < boundary.size(); k++) {
        if (lattice.step_start(boundary[k]) == base_vertex) {
            std::vector<Step> rotated;
            rotated.reserve(boundary.size());
            for (std::size_t j = 0; j < boundary.size(); j++) {
                rotated.push_back(boundary[(k + j) % boundary.size()]);
            }
            return rotated;
        }
    }
    throw LatticeError("vertex " + std::to_string(base_vertex) + " is not on face " + std::to_string(f));
}

CheckedStringSpec validate_string_spec(const Lattice &lattice, StringSpec spec) {
    CheckedStringSpec checked;
    if (spec.base.empty()) {
        throw LatticeError("string base must contain at least one edge");
    }
    std::set<EdgeId> base_edges;
    for (std::size_t k = 0; k < spec.base.size(); k++) {
        const Step &s = spec.base[k];
        if (s.edge >= lattice.edge_count()) {
            throw LatticeError("base step " + std::to_string(k) + " references missing edge " +
                               std::to_string(s.edge));
        }
        if (s.sign != 1 && s.sign != -1) {
            throw LatticeError("base step " + std::to_string(k) + " has sign other than +1/-1");
        }
        if (k == 0) {
            checked.base_vertices.push_back(lattice.step_start(s));
        } else if (lattice.step_start(s) != checked.base_vertices.back()) {
            throw LatticeError("string base is disconnected at step " + std::to_string(k));
        }
        checked.base_vertices.push_back(lattice.step_end(s));
        base_edges.insert(s.edge);
    }
    if (spec.closed && checked.base_vertices.back() != checked.base_vertices.front()) {
        throw LatticeError("closed string base does not return to its start vertex");
    }
    std::set<std::tuple<EdgeId, VertexId, bool>> seen;
    for (std::size_t k = 0; k < spec.teeth.size(); k++) {
        const Tooth &t = spec.teeth[k];
        if (t.edge >= lattice.edge_count()) {
            throw LatticeError("tooth " + std::to_string(k) + " references missing edge " + std::to_string(t.edge));
        }
        if (t.attach_index > spec.base.size()) {
            throw LatticeError("tooth " + std::to_string(k) + " attach index " + std::to_string(t.attach_index) +
                               " exceeds the base length");
        }
        if (base_edges.count(t.edge)) {
            throw LatticeError("tooth " + std::to_string(k) + " edge " + std::to_string(t.edge) +
                               " is also a base edge");
        }
        VertexId v = checked.base_vertices[t.attach_index];
        const Edge &edge = lattice.edge(t.edge);
        bool outgoing = t.orientation == ToothOrientation::Outgoing;
        if ((outgoing && edge.tail != v) || (!outgoing && edge.head != v)) {
            bool incident = edge.tail == v || edge.head == v;
            throw LatticeError("tooth " + std::to_string(k) + " edge " + std::to_string(t.edge) +
                               (incident ? " has the wrong orientation flag at vertex "
                                         : " is not incident to attachment vertex ") +
                               std::to_string(v));
        }
        if (!seen.emplace(t.edge, v, outgoing).second) {
            throw LatticeError("tooth " + std::to_string(k) + " duplicates an earlier tooth");
        }
        checked.tooth_vertices.push_back(v);
    }
    checked.spec = std::move(spec);
    return checked;
}

LoopClass loop_class(const Lattice &lattice, const StringSpec &spec) {
    if (!spec.closed) {
        throw LatticeError("loop_class requires a closed string");
    }
    const auto &shape = lattice.torus_shape();
    if (!shape.has_value()) {
        throw LatticeError("loop_class requires a torus lattice");
    }
    // Checks closure and connectivity.
    validate_string_spec(lattice, StringSpec{spec.base, {}, true});
    LoopClass result;
    for (const Step &s : spec.base) {
        EdgeId e = s.edge;
        VertexId tail = e / 2;
        std::uint32_t x = tail % shape->lx;
        std::uint32_t y = tail / shape->lx;
        if (e % 2 == 0 && x == shape->lx - 1) {
            result.wx += s.sign;
        }
        if (e % 2 == 1 && y == shape->ly - 1) {
            result.wy += s.sign;
        }
    }
    return result;
}

StringSpec closed_comb_around(const Lattice &lattice, std::span<const FaceId> region, VertexId start) {
    if (region.empty()) {
        throw LatticeError("closed_comb_around needs at least one face");
    }
    std::set<FaceId> faces(region.begin(), region.end());
    std::vector<int> region_slots(lattice.edge_count(), 0);
    for (FaceId f : faces) {
        if (f >= lattice.face_count()) {
            throw LatticeError("face " + std::to_string(f) + " does not exist");
        }
        for (const Step &s : lattice.face(f)) {
            region_slots[s.edge]++;
        }
    }
    std::map<VertexId, Step> next_step;
    std::size_t boundary_size = 0;
    for (FaceId f : faces) {
        for (const Step &s : lattice.face(f)) {
            if (region_slots[s.edge] != 1) {
                continue;
            }
            boundary_size++;
            if (!next_step.emplace(lattice.step_start(s), s).second) {
                throw LatticeError("region boundary touches itself at vertex " +
                                   std::to_string(lattice.step_start(s)));
            }
        }
    }
    if (boundary_size == 0) {
        throw LatticeError("region has no boundary");
    }
    StringSpec spec;
    spec.closed = true;
    VertexId v = start;
    do {
        auto it = next_step.find(v);
        if (it == next_step.end()) {
            throw LatticeError("vertex " + std::to_string(v) + " is not on the region boundary");
        }
        spec.base.push_back(it->second);
        v = lattice.step_end(it->second);
    } while (v != start && spec.base.size() <= boundary_size);
    if (spec.base.size() != boundary_size) {
        throw LatticeError("region boundary is not a single loop");
    }
    for (std::size_t i = 0; i < spec.base.size(); i++) {
        VertexId u = lattice.step_start(spec.base[i]);
        for (const Incidence &inc : lattice.star(u)) {
            if (region_slots[inc.edge] != 0) {
                continue;
            }
            spec.teeth.push_back(
                {inc.edge, i, inc.outgoing ? ToothOrientation::Outgoing : ToothOrientation::Incoming});
        }
    }
    return spec;
}

std::vector<FaceId> comb_end_faces(const Lattice &lattice, const StringSpec &spec) {
    std::map<FaceId, int> count;
    for (const Tooth &t : spec.teeth) {
        for (FaceId f : lattice.faces_of_edge(t.edge)) {
            count[f]++;
        }
    }
    std::vector<FaceId> result;
    for (auto [f, c] : count) {
        if (c % 2 == 1) {
            result.push_back(f);
        }
    }
    return result;
}

}  // namespace qdouble
