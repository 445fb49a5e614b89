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

#ifndef QDOUBLE_LATTICE_H
#define QDOUBLE_LATTICE_H

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qdouble {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;
using FaceId = std::uint32_t;

struct Edge {
    VertexId tail;
    VertexId head;
};

/// One step of a walk along edges. sign = +1 traverses tail -> head, -1 the
/// reverse.
struct Step {
    EdgeId edge;
    int sign;

    bool operator==(const Step &) const = default;
};

/// An edge seen from one of its endpoints.
struct Incidence {
    EdgeId edge;
    bool outgoing;
};

struct TorusShape {
    std::uint32_t lx;
    std::uint32_t ly;
};

class LatticeError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// An oriented two-dimensional cell complex. Faces are closed walks listed
/// counterclockwise; faces do not carry a preferred base vertex.
class Lattice {
   public:
    /// Checks index ranges and that every face boundary is a closed walk.
    Lattice(std::size_t vertex_count, std::vector<Edge> edges, std::vector<std::vector<Step>> faces,
            std::optional<TorusShape> torus = std::nullopt);

    std::size_t vertex_count() const { return vertex_count_; }
    std::size_t edge_count() const { return edges_.size(); }
    std::size_t face_count() const { return faces_.size(); }

    const Edge &edge(EdgeId e) const { return edges_.at(e); }
    std::span<const Edge> edges() const { return edges_; }
    std::span<const Step> face(FaceId f) const { return faces_.at(f); }

    /// Incident edges of v. A self-loop appears twice.
    std::span<const Incidence> star(VertexId v) const { return stars_.at(v); }
    /// Faces whose boundary contains e, one entry per occurrence.
    std::span<const FaceId> faces_of_edge(EdgeId e) const { return edge_faces_.at(e); }

    VertexId step_start(const Step &s) const { return s.sign > 0 ? edges_[s.edge].tail : edges_[s.edge].head; }
    VertexId step_end(const Step &s) const { return s.sign > 0 ? edges_[s.edge].head : edges_[s.edge].tail; }

    bool face_has_vertex(FaceId f, VertexId v) const;
    /// Distinct vertices of a face in boundary order.
    std::vector<VertexId> face_vertices(FaceId f) const;

    long euler_characteristic() const {
        return static_cast<long>(vertex_count_) - static_cast<long>(edges_.size()) + static_cast<long>(faces_.size());
    }

    const std::optional<TorusShape> &torus_shape() const { return torus_; }

    // Torus addressing; only valid when torus_shape() is set.
    VertexId vertex_at(long x, long y) const;
    EdgeId horizontal_edge(long x, long y) const;
    EdgeId vertical_edge(long x, long y) const;
    FaceId face_at(long x, long y) const;

   private:
    std::size_t vertex_count_;
    std::vector<Edge> edges_;
    std::vector<std::vector<Step>> faces_;
    std::vector<std::vector<Incidence>> stars_;
    std::vector<std::vector<FaceId>> edge_faces_;
    std::optional<TorusShape> torus_;
};

/// Periodic square lattice. Vertex (x, y) has index y*lx + x; its horizontal
/// edge (index 2*v) points +x and its vertical edge (2*v + 1) points +y. Face
/// (x, y) has (x, y) as its lower-left corner.
Lattice torus(std::size_t lx, std::size_t ly);

/// Throws LatticeError unless every edge appears in exactly two face slots with
/// opposite signs (closed orientable surface).
void require_closed_surface(const Lattice &lattice);

/// Boundary of f rotated to start at base_vertex.
std::vector<Step> face_boundary(const Lattice &lattice, FaceId f, VertexId base_vertex);

enum class ToothOrientation { Outgoing, Incoming };

struct Tooth {
    EdgeId edge;
    /// Number of base steps preceding the attachment vertex.
    std::size_t attach_index;
    ToothOrientation orientation;

    bool operator==(const Tooth &) const = default;
};

/// Geometry of a comb string operator: an oriented base walk plus teeth
/// hanging off base vertices.
struct StringSpec {
    std::vector<Step> base;
    std::vector<Tooth> teeth;
    bool closed = false;
};

/// A StringSpec whose invariants have been verified against a lattice.
struct CheckedStringSpec {
    StringSpec spec;
    /// base_vertices[i] is the vertex after i base steps (size base.size()+1).
    std::vector<VertexId> base_vertices;
    /// Attachment vertex of each tooth.
    std::vector<VertexId> tooth_vertices;

    VertexId start() const { return base_vertices.front(); }
    VertexId end() const { return base_vertices.back(); }
};

CheckedStringSpec validate_string_spec(const Lattice &lattice, StringSpec spec);

struct LoopClass {
    int wx = 0;
    int wy = 0;

    bool contractible() const { return wx == 0 && wy == 0; }
    bool operator==(const LoopClass &) const = default;
};

/// Torus winding numbers of a closed base walk, counted as signed crossings of
/// the seams x = lx-1 -> 0 and y = ly-1 -> 0.
LoopClass loop_class(const Lattice &lattice, const StringSpec &spec);

/// Closed comb around a disk-shaped union of faces, starting at `start`. The
/// base is the counterclockwise boundary of the region; the teeth are all edges
/// at base vertices that touch no face of the region.
StringSpec closed_comb_around(const Lattice &lattice, std::span<const FaceId> region, VertexId start);

/// Faces containing an odd number of tooth slots of the comb: the faces at the
/// two ends of its dual string.
std::vector<FaceId> comb_end_faces(const Lattice &lattice, const StringSpec &spec);

}  // namespace qdouble

#endif
