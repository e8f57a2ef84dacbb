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

// Functions with values in the group algebra of G, restricted to non-negative
// weights. The product is convolution (uv)(c) = sum_{a+b=c} u(a) v(b), the
// adjoint is u*(a) = u(-a), and <u, v> = sum_a u(a) v(a).

#ifndef ULAB_GALG_HPP_
#define ULAB_GALG_HPP_

#include <array>
#include <map>
#include <utility>
#include <vector>

#include "ulab/gridfn.hpp"

namespace ulab {

inline constexpr double kWeightFloor = 1e-15;

// Sparse non-negative weights on G, sorted by element.
class Dist {
 public:
  using Entry = std::pair<int64_t, double>;

  Dist() = default;
  explicit Dist(const GroupParams& g) : g_(g) {}
  Dist(const GroupParams& g, std::vector<Entry> entries);

  static Dist delta(const GroupParams& g, int64_t a);
  static Dist uniform(const GroupParams& g);
  static Dist from_dense(const GroupParams& g, const Eigen::VectorXd& w,
                         double floor = kWeightFloor);

  const GroupParams& group() const { return g_; }
  const std::vector<Entry>& entries() const { return e_; }
  double at(int64_t a) const;
  double total() const;
  bool in_simplex(double tol = 1e-12) const;
  Eigen::VectorXd dense() const;
  Dist scaled(double c) const;
  // Heaviest element; ties go to the lowest index.
  int64_t argmax(bool* tie = nullptr) const;

 private:
  GroupParams g_;
  std::vector<Entry> e_;
};

Dist dist_product(const Dist& u, const Dist& v);
Dist adjoint(const Dist& u);
double dist_inner(const Dist& u, const Dist& v);
// d(u, v) = total(u) total(v) - <u, v>; equals 1 - <u, v> on the simplex.
double ddist(const Dist& u, const Dist& v);

// Sparse map from flat indices x |G| + y to weights; absent means zero.
struct DistFn {
  GroupParams g;
  std::map<int64_t, Dist> values;

  DistFn() = default;
  explicit DistFn(const GroupParams& g) : g(g) {}
  // Every stored value has total 0 or 1 up to tol.
  bool valid(double tol = 1e-12) const;
  // delta_{phi(a)} on each listed point.
  static DistFn from_map(const GroupParams& g, const std::vector<int64_t>& flat,
                         const std::vector<int64_t>& phi);
};

// Dense G x G x G array, entry (x |G| + y) |G| + c is the weight of c at (x, y).
struct AlgGrid {
  GroupParams g;
  CVec v;

  AlgGrid() = default;
  explicit AlgGrid(const GroupParams& g);
  int64_t side() const { return g.size; }
  cplx& at(int64_t x, int64_t y, int64_t c) {
    return v[(x * g.size + y) * g.size + c];
  }
  const cplx& at(int64_t x, int64_t y, int64_t c) const {
    return v[(x * g.size + y) * g.size + c];
  }
};

AlgGrid to_dense(const DistFn& phi);
DistFn to_sparse(const AlgGrid& a, double floor = kWeightFloor);
// (mu phi)(x, y) = mu(x, y) phi(x, y) for real mu.
DistFn weighted(const DistFn& phi, const GridFn& mu);

// E_y a(x, y) b(x, y - h)*
AlgGrid alg_vert_conv(const AlgGrid& a, const AlgGrid& b);
// E_x a(x, y) b(x - w, y)*
AlgGrid alg_horiz_conv(const AlgGrid& a, const AlgGrid& b);
AlgGrid alg_mixed_conv(const AlgGrid& a1, const AlgGrid& a2,
                       const AlgGrid& a3, const AlgGrid& a4);
DistFn mixed_conv(const DistFn& phi);
// E_{w,h} <a(w,h), b(w,h)>
double alg_inner(const AlgGrid& a, const AlgGrid& b);

// <mixed(phi1..phi4), mixed(phi5..phi8)>
double gen_inner(const std::array<DistFn, 8>& phi);
// gen_inner(phi, ..., phi)^{1/8}
double gen_norm(const DistFn& phi);

// Smallest eta for which phi is a (1 - eta)-bihomomorphism with respect to
// mu, namely 1 - ||mixed(mu phi)||^2 / ||mixed(mu)||^2.
double bihom_defect(const DistFn& phi, const GridFn& mu);

// Functions G -> group algebra.
using DistMap = std::vector<Dist>;

// psi(u) = E_x phi(x) phi(x - u)*
DistMap self_difference(const DistMap& phi);
// theta(x) = E_u phi(u) psi(u - x)*
DistMap cross_difference(const DistMap& phi, const DistMap& psi);
// E_{x-y=z-w} d(phi(x) phi(y)*, phi(z) phi(w)*) = 1 - E_u ||psi(u)||^2.
double hom_defect(const DistMap& phi);
// omega(x) - omega(0) additive for all pairs.
bool is_affine_map(const GroupParams& g, const std::vector<int64_t>& omega);

struct Rounding {
  std::vector<int64_t> omega;
  double agreement = 0;      // E_x d(phi(x), delta_{omega(x)})
  double measured_eta = 0;   // hom_defect(phi)
  bool tie = false;          // some argmax was not unique
  bool freiman = false;      // omega is an affine map
};

// theta = phi * (phi * phi*)*, omega(x) = argmax theta(x). No precondition.
Rounding round_by_argmax(const DistMap& phi);
// Same procedure for a declared (1 - eta)-homomorphism with eta < 1/18.
Rounding round_stability(const DistMap& phi, double eta);

}  // namespace ulab

#endif  // ULAB_GALG_HPP_
