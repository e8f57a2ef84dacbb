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

#include "ulab/io.hpp"

#include <fstream>

namespace ulab {
namespace {

GroupParams params_of(const Json& j) {
  if (!j.is_object() || !j.contains("p") || !j.contains("n"))
    throw Error("json: object with \"p\" and \"n\" expected");
  return GroupParams(j.at("p").get<int>(), j.at("n").get<int>());
}

Json header(const GroupParams& g) { return Json{{"p", g.p}, {"n", g.n}}; }

Json complex_array(const cplx* data, int64_t count) {
  Json a = Json::array();
  for (int64_t i = 0; i < count; ++i) a.push_back({data[i].real(), data[i].imag()});
  return a;
}

void read_complex(const Json& a, int64_t count, cplx* out) {
  if (!a.is_array() || int64_t(a.size()) != count)
    throw Error("json: expected " + std::to_string(count) + " values");
  for (int64_t i = 0; i < count; ++i) {
    const Json& e = a[i];
    if (e.is_number()) {
      out[i] = cplx(e.get<double>(), 0.0);
    } else if (e.is_array() && e.size() == 2) {
      out[i] = cplx(e[0].get<double>(), e[1].get<double>());
    } else {
      throw Error("json: value must be a number or [re, im]");
    }
  }
}

FpMat mat_from_json(const Json& j, int rows, int cols, int p) {
  FpMat m = FpMat::Zero(rows, cols);
  if (!j.is_array() || int(j.size()) != rows)
    throw Error("json: matrix has the wrong number of rows");
  for (int r = 0; r < rows; ++r) {
    if (!j[r].is_array() || int(j[r].size()) != cols)
      throw Error("json: matrix has the wrong number of columns");
    for (int c = 0; c < cols; ++c) m(r, c) = mod(j[r][c].get<int64_t>(), p);
  }
  return m;
}

FpVec vec_from_json(const Json& j, int len, int p) {
  FpVec v = FpVec::Zero(len);
  if (!j.is_array() || int(j.size()) != len)
    throw Error("json: vector has the wrong length");
  for (int i = 0; i < len; ++i) v[i] = mod(j[i].get<int64_t>(), p);
  return v;
}

}  // namespace

Json to_json(const FpMat& m) {
  Json a = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    a.push_back(row);
  }
  return a;
}

Json to_json(const FpVec& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json to_json(const GroupFn& f) {
  Json j = header(f.g);
  j["values"] = complex_array(f.v.data(), f.size());
  return j;
}

Json to_json(const GridFn& F) {
  Json j = header(F.g);
  j["values"] = complex_array(F.v.data(), F.side() * F.side());
  return j;
}

Json to_json(const DistFn& phi) {
  Json j = header(phi.g);
  Json pts = Json::array();
  for (const auto& [flat, d] : phi.values) {
    Json dist = Json::array();
    for (const auto& [a, w] : d.entries()) dist.push_back({{"g", a}, {"w", w}});
    pts.push_back({{"x", flat / phi.g.size}, {"y", flat % phi.g.size},
                   {"dist", dist}});
  }
  j["points"] = pts;
  return j;
}

Json to_json(const PolyPhase& q) {
  Json j{{"p", q.p()}, {"n", q.n()}};
  Json terms = Json::array();
  for (const auto& [m, c] : q.terms()) terms.push_back({{"m", m}, {"c", c}});
  j["terms"] = terms;
  j["text"] = q.to_string();
  return j;
}

Json to_json(const BiAffineMap& beta) {
  Json j = header(beta.group());
  j["k"] = beta.k();
  Json coords = Json::array();
  for (const auto& c : beta.coords())
    coords.push_back({{"T", to_json(c.T)}, {"a", to_json(c.a)},
                      {"b", to_json(c.b)}, {"lambda", c.lambda}});
  j["coords"] = coords;
  return j;
}

Json to_json(const TrilinearForm& tau) {
  Json j{{"p", tau.p()}, {"n", tau.n()}};
  Json cs = Json::array();
  const int n = tau.n();
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (tau.at(i, a, b) != 0) cs.push_back({i, a, b, tau.at(i, a, b)});
  j["coeffs"] = cs;
  return j;
}

GroupFn group_fn_from_json(const Json& j) {
  const GroupParams g = params_of(j);
  GroupFn f(g);
  if (j.contains("values")) {
    read_complex(j.at("values"), g.size, f.v.data());
  } else if (j.contains("phases")) {
    const Json& ph = j.at("phases");
    if (!ph.is_array() || int64_t(ph.size()) != g.size)
      throw Error("json: expected " + std::to_string(g.size) + " phases");
    for (int64_t x = 0; x < g.size; ++x)
      f[x] = root_of_unity(g.p, ph[x].get<int64_t>());
  } else {
    throw Error("json: GroupFn needs \"values\" or \"phases\"");
  }
  return f;
}

GridFn grid_fn_from_json(const Json& j) {
  const GroupParams g = params_of(j);
  GridFn F(g);
  read_complex(j.at("values"), g.size * g.size, F.v.data());
  return F;
}

DistFn dist_fn_from_json(const Json& j) {
  const GroupParams g = params_of(j);
  DistFn phi(g);
  for (const Json& pt : j.at("points")) {
    const int64_t x = pt.at("x").get<int64_t>(), y = pt.at("y").get<int64_t>();
    if (x < 0 || y < 0 || x >= g.size || y >= g.size)
      throw Error("json: DistFn point out of range");
    std::vector<Dist::Entry> e;
    for (const Json& w : pt.at("dist"))
      e.emplace_back(w.at("g").get<int64_t>(), w.at("w").get<double>());
    phi.values[x * g.size + y] = Dist(g, std::move(e));
  }
  return phi;
}

PolyPhase poly_phase_from_json(const Json& j) {
  PolyPhase q(j.at("p").get<int>(), j.at("n").get<int>());
  for (const Json& t : j.at("terms"))
    q.set(t.at("m").get<std::vector<int>>(), t.at("c").get<int64_t>());
  return q;
}

BiAffineMap biaffine_from_json(const Json& j) {
  const GroupParams g = params_of(j);
  BiAffineMap beta(g);
  for (const Json& c : j.at("coords")) {
    AffineForm f;
    f.T = mat_from_json(c.at("T"), g.n, g.n, g.p);
    f.a = vec_from_json(c.at("a"), g.n, g.p);
    f.b = vec_from_json(c.at("b"), g.n, g.p);
    f.lambda = mod(c.value("lambda", int64_t(0)), g.p);
    beta.push_back(std::move(f));
  }
  if (j.contains("k") && j.at("k").get<int>() != beta.k())
    throw Error("json: \"k\" disagrees with the number of coordinates");
  return beta;
}

TrilinearForm trilinear_from_json(const Json& j) {
  const GroupParams g = params_of(j);
  TrilinearForm tau(g.p, g.n);
  for (const Json& c : j.at("coeffs")) {
    if (!c.is_array() || c.size() != 4)
      throw Error("json: trilinear coefficient must be [i, j, k, v]");
    const int a = c[0].get<int>(), b = c[1].get<int>(), d = c[2].get<int>();
    if (a < 0 || b < 0 || d < 0 || a >= g.n || b >= g.n || d >= g.n)
      throw Error("json: trilinear index out of range");
    tau.set(a, b, d, c[3].get<int64_t>());
  }
  return tau;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace ulab
