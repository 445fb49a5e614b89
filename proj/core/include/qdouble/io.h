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

#ifndef QDOUBLE_IO_H
#define QDOUBLE_IO_H

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "qdouble/doubled_state.h"

namespace qdouble {

/// A problem with one field of a JSON document. `path` looks like
/// `$.geometry.OX.dual_path[1]`.
class ConfigError : public std::invalid_argument {
   public:
    ConfigError(std::string path, const std::string &message);
    const std::string &path() const { return path_; }

   private:
    std::string path_;
};

std::string read_text_file(const std::filesystem::path &path);

/// A builtin name ("S3", "Z2", ...), an object {"builtin": name, "parameter":
/// n}, or {"file": path} in the group file format. Relative paths resolve
/// against `base_dir`. A bare string that is not a builtin is tried as a file.
FiniteGroup group_from_json(const nlohmann::json &j, const std::string &path,
                            const std::filesystem::path &base_dir = {});

/// {"type":"torus","lx":L,"ly":M} or {"vertices":N,"edges":[[t,h],...],
/// "faces":[[[e,s],...],...]}. Explicit lattices must be closed orientable
/// surfaces.
Lattice lattice_from_json(const nlohmann::json &j, const std::string &path);

/// Index or label.
Element element_from_json(const FiniteGroup &group, const nlohmann::json &j, const std::string &path);

/// {"base":[[e,s],...],"teeth":[[e,attach,"out"|"in"],...],"closed":bool},
/// validated against the lattice.
StringSpec string_spec_from_json(const Lattice &lattice, const nlohmann::json &j, const std::string &path);
nlohmann::json string_spec_to_json(const StringSpec &spec);

/// Array of ids, each below `limit`.
std::vector<std::uint32_t> id_list_from_json(const nlohmann::json &j, const std::string &path, std::size_t limit,
                                             const char *what);
std::uint32_t id_from_json(const nlohmann::json &j, const std::string &path, std::size_t limit, const char *what);

/// One line per stored configuration: {"ket":[...],"bra":[...],"re":x,"im":y}.
void write_state_jsonl(const SparseState &state, std::ostream &out);
SparseState read_state_jsonl(const ModelPtr &model, std::istream &in);

}  // namespace qdouble

#endif
