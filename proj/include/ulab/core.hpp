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

// Arithmetic on G = F_p^n, dense functions on G, the Fourier transform and
// the two convolutions, polynomial phases and exact character sums.
//
// Elements are encoded as x = sum_i x_i p^i. Physical-side quantities are
// averages, dual-side quantities are sums:
//   f^(r) = E_x f(x) w^{-x.r},   f(x) = sum_r f^(r) w^{x.r},   w = e^{2 pi i/p}.

#ifndef ULAB_CORE_HPP_
#define ULAB_CORE_HPP_

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ulab/util.hpp"

namespace ulab {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using FpMat = Eigen::Matrix<int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using FpVec = Eigen::Matrix<int64_t, Eigen::Dynamic, 1>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr int64_t kDefaultSizeCap = 1000000;

bool is_prime(int64_t p);
int64_t ipow(int64_t b, int e);
inline int64_t mod(int64_t a, int64_t p) {
  int64_t r = a % p;
  return r < 0 ? r + p : r;
}
int64_t inv_mod(int64_t a, int64_t p);

// w^k with w = e^{2 pi i/p}.
cplx root_of_unity(int p, int64_t k);

struct GroupParams {
  int p = 2;
  int n = 1;
  int64_t size = 2;

  GroupParams() = default;
  GroupParams(int p, int n, int64_t cap = kDefaultSizeCap);

  bool operator==(const GroupParams& o) const { return p == o.p && n == o.n; }
  bool operator!=(const GroupParams& o) const { return !(*this == o); }

  FpVec digits(int64_t x) const;
  int64_t index(const FpVec& d) const;  // entries reduced mod p
  int64_t add(int64_t x, int64_t y) const;
  int64_t sub(int64_t x, int64_t y) const;
  int64_t neg(int64_t x) const;
  int64_t scale(int64_t c, int64_t x) const;
  int64_t dot(int64_t x, int64_t y) const;
  int digit(int64_t x, int i) const;
  std::string to_string() const;
};

void require_same(const GroupParams& a, const GroupParams& b);

struct GroupElem {
  GroupParams g;
  int64_t index = 0;

  GroupElem() = default;
  GroupElem(const GroupParams& g, int64_t index);
  static GroupElem from_digits(const GroupParams& g, const FpVec& d);
  FpVec digits() const { return g.digits(index); }
  bool operator==(const GroupElem& o) const {
    return g == o.g && index == o.index;
  }
};

GroupElem elem_add(const GroupElem& x, const GroupElem& y);
int64_t dot(const GroupElem& x, const GroupElem& y);

// In-place DFT of the length p^n vector data[0], data[stride], ...
// Forward divides by p in each of the n radix-p passes; inverse does not.
template <class T>
void dft_axis(std::complex<T>* data, int p, int n, std::ptrdiff_t stride,
              bool inverse) {
  std::vector<std::complex<T>> w(p), buf(p), out(p);
  const T sign = inverse ? T(1) : T(-1);
  for (int k = 0; k < p; ++k) {
    const T ang = sign * T(2) * T(kPi) * T(k) / T(p);
    w[k] = std::complex<T>(std::cos(ang), std::sin(ang));
  }
  const T scale = inverse ? T(1) : T(1) / T(p);
  std::ptrdiff_t total = 1;
  for (int i = 0; i < n; ++i) total *= p;
  std::ptrdiff_t block = 1;
  for (int d = 0; d < n; ++d) {
    const std::ptrdiff_t span = block * p;
    for (std::ptrdiff_t hi = 0; hi < total; hi += span) {
      for (std::ptrdiff_t lo = 0; lo < block; ++lo) {
        const std::ptrdiff_t base = hi + lo;
        for (int j = 0; j < p; ++j) buf[j] = data[(base + j * block) * stride];
        for (int r = 0; r < p; ++r) {
          std::complex<T> acc(0);
          int idx = 0;
          for (int j = 0; j < p; ++j) {
            acc += buf[j] * w[idx];
            idx += r;
            if (idx >= p) idx -= p;
          }
          out[r] = acc * scale;
        }
        for (int r = 0; r < p; ++r) data[(base + r * block) * stride] = out[r];
      }
    }
    block = span;
  }
}

struct GroupFn {
  GroupParams g;
  CVec v;

  GroupFn() = default;
  explicit GroupFn(const GroupParams& g) : g(g), v(CVec::Zero(g.size)) {}
  GroupFn(const GroupParams& g, CVec v);

  int64_t size() const { return g.size; }
  cplx& operator[](int64_t i) { return v[i]; }
  const cplx& operator[](int64_t i) const { return v[i]; }

  double sup_norm() const;
  // (E_x |f|^2)^{1/2}
  double l2() const;
  double l1() const;  // E_x |f|
  bool bounded(double tol = 1e-12) const { return sup_norm() <= 1.0 + tol; }

  static GroupFn constant(const GroupParams& g, cplx c);
  static GroupFn indicator(const GroupParams& g,
                           const std::vector<int64_t>& points);
};

GroupFn dft(const GroupFn& f);
GroupFn idft(const GroupFn& fhat);
// (f bar* g)(x) = E_u f(u) conj(g(u - x)); transform f^ conj(g^).
GroupFn barconv(const GroupFn& f, const GroupFn& g);
// (f * g)(x) = E_{u+v=x} f(u) g(v); transform f^ g^.
GroupFn conv(const GroupFn& f, const GroupFn& g);
// sum_r |f^(r)|^p, the dual-side p-norm to the p.
double dual_norm_pow(const GroupFn& fhat, int power);

// Coefficients indexed by sorted multisets of at most three variables.
class PolyPhase {
 public:
  using Monomial = std::vector<int>;

  PolyPhase() : PolyPhase(2, 1) {}
  PolyPhase(int p, int n);

  int p() const { return p_; }
  int n() const { return n_; }
  void set(Monomial m, int64_t c);
  int64_t coeff(Monomial m) const;
  int degree() const;
  int64_t eval(const FpVec& x) const;
  // Phase q(x) mod p for every index of g.
  std::vector<int64_t> table(const GroupParams& g) const;
  const std::map<Monomial, int64_t>& terms() const { return terms_; }

  PolyPhase operator+(const PolyPhase& o) const;
  PolyPhase operator-(const PolyPhase& o) const;
  bool operator==(const PolyPhase& o) const {
    return p_ == o.p_ && n_ == o.n_ && terms_ == o.terms_;
  }
  std::string to_string() const;

  static PolyPhase random(int p, int n, int degree, Rng& rng);

 private:
  int p_, n_;
  std::map<Monomial, int64_t> terms_;
};

GroupFn phase_fn(const GroupParams& g, const std::vector<int64_t>& phases);
GroupFn poly_phase_fn(const PolyPhase& q, const GroupParams& g);
// E_x f(x) w^{-q(x)}
cplx correlation(const GroupFn& f, const PolyPhase& q);

// Reduced fraction with positive denominator.
struct Rational {
  int64_t num = 0;
  int64_t den = 1;

  Rational() = default;
  Rational(int64_t num, int64_t den = 1);
  double to_double() const { return double(num) / double(den); }
  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  Rational operator/(const Rational& o) const;
  bool operator==(const Rational& o) const {
    return num == o.num && den == o.den;
  }
  bool operator<(const Rational& o) const;
  bool operator<=(const Rational& o) const { return !(o < *this); }
  std::string to_string() const;
};

// Histogram of phases over a finite point set; the sum of w^phase is
// evaluated only on request.
struct CharacterSum {
  int p = 2;
  std::vector<int64_t> counts;

  CharacterSum() = default;
  explicit CharacterSum(int p) : p(p), counts(p, 0) {}
  static CharacterSum from_phases(int p, const std::vector<int64_t>& phases);

  void add(int64_t phase, int64_t mult = 1) { counts[mod(phase, p)] += mult; }
  CharacterSum& operator+=(const CharacterSum& o);
  int64_t total() const;
  cplx value() const;  // sum over points
  cplx mean() const;   // average over points
  // Exact mean when all nonzero phases are equally frequent.
  std::optional<Rational> exact_mean() const;
};

}  // namespace ulab

#endif  // ULAB_CORE_HPP_
