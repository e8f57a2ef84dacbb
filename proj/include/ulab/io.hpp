// Copyright 2026 The ulab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// JSON forms of the toolkit's data types.
//
//   GroupFn       {"p", "n", "values": [[re, im], ...]} or {"p", "n", "phases": [k, ...]}
//   GridFn        {"p", "n", "values": [[re, im], ...]}, row-major
//   DistFn        {"p", "n", "points": [{"x", "y", "dist": [{"g", "w"}]}]}
//   PolyPhase     {"p", "n", "terms": [{"m": [e_0, ...], "c"}]}
//   BiAffineMap   {"p", "n", "k", "coords": [{"T", "a", "b", "lambda"}]}
//   TrilinearForm {"p", "n", "coeffs": [[i, j, k, v], ...]}, nonzero only

#ifndef ULAB_IO_HPP_
#define ULAB_IO_HPP_

#include <string>

#include "json.hpp"
#include "ulab/bilinear.hpp"
#include "ulab/galg.hpp"
#include "ulab/trilinear.hpp"

namespace ulab {

using Json = nlohmann::ordered_json;

Json to_json(const GroupFn& f);
Json to_json(const GridFn& F);
Json to_json(const DistFn& phi);
Json to_json(const PolyPhase& q);
Json to_json(const BiAffineMap& beta);
Json to_json(const TrilinearForm& tau);
Json to_json(const FpMat& m);
Json to_json(const FpVec& v);

GroupFn group_fn_from_json(const Json& j);
GridFn grid_fn_from_json(const Json& j);
DistFn dist_fn_from_json(const Json& j);
PolyPhase poly_phase_from_json(const Json& j);
BiAffineMap biaffine_from_json(const Json& j);
TrilinearForm trilinear_from_json(const Json& j);

// Throws Error on unreadable files or malformed JSON.
Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

}  // namespace ulab

#endif  // ULAB_IO_HPP_
