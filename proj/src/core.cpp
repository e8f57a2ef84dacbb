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

#include "ulab/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ulab {

bool is_prime(int64_t p) {
  if (p < 2) return false;
  for (int64_t d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

int64_t ipow(int64_t b, int e) {
  int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

int64_t inv_mod(int64_t a, int64_t p) {
  a = mod(a, p);
  if (a == 0) throw Error("inv_mod: zero has no inverse");
  int64_t r = 1, e = p - 2, b = a;
  while (e > 0) {
    if (e & 1) r = r * b % p;
    b = b * b % p;
    e >>= 1;
  }
  return r;
}

cplx root_of_unity(int p, int64_t k) {
  const double ang = 2.0 * kPi * double(mod(k, p)) / double(p);
  return {std::cos(ang), std::sin(ang)};
}

GroupParams::GroupParams(int p, int n, int64_t cap) : p(p), n(n) {
  if (!is_prime(p)) throw Error("GroupParams: p must be prime");
  if (n < 1) throw Error("GroupParams: n must be at least 1");
  int64_t s = 1;
  for (int i = 0; i < n; ++i) {
    s *= p;
    if (s > cap) throw Error("GroupParams: p^n exceeds the size cap");
  }
  size = s;
}

FpVec GroupParams::digits(int64_t x) const {
  FpVec d(n);
  for (int i = 0; i < n; ++i) {
    d[i] = x % p;
    x /= p;
  }
  return d;
}

int64_t GroupParams::index(const FpVec& d) const {
  int64_t x = 0;
  for (int i = n - 1; i >= 0; --i) x = x * p + mod(d[i], p);
  return x;
}

int GroupParams::digit(int64_t x, int i) const {
  for (int j = 0; j < i; ++j) x /= p;
  return int(x % p);
}

int64_t GroupParams::add(int64_t x, int64_t y) const {
  int64_t r = 0, m = 1;
  for (int i = 0; i < n; ++i) {
    int64_t s = x % p + y % p;
    if (s >= p) s -= p;
    r += s * m;
    m *= p;
    x /= p;
    y /= p;
  }
  return r;
}

int64_t GroupParams::neg(int64_t x) const {
  int64_t r = 0, m = 1;
  for (int i = 0; i < n; ++i) {
    int64_t d = x % p;
    r += (d == 0 ? 0 : p - d) * m;
    m *= p;
    x /= p;
  }
  return r;
}

int64_t GroupParams::sub(int64_t x, int64_t y) const { return add(x, neg(y)); }

int64_t GroupParams::scale(int64_t c, int64_t x) const {
  c = mod(c, p);
  int64_t r = 0, m = 1;
  for (int i = 0; i < n; ++i) {
    r += (c * (x % p) % p) * m;
    m *= p;
    x /= p;
  }
  return r;
}

int64_t GroupParams::dot(int64_t x, int64_t y) const {
  int64_t s = 0;
  for (int i = 0; i < n; ++i) {
    s += (x % p) * (y % p);
    x /= p;
    y /= p;
  }
  return s % p;
}

std::string GroupParams::to_string() const {
  std::ostringstream os;
  os << "F_" << p << "^" << n;
  return os.str();
}

void require_same(const GroupParams& a, const GroupParams& b) {
  if (a != b)
    throw Error("mismatched group parameters: " + a.to_string() + " vs " +
                b.to_string());
}

GroupElem::GroupElem(const GroupParams& g, int64_t index) : g(g), index(index) {
  if (index < 0 || index >= g.size) throw Error("GroupElem: index out of range");
}

GroupElem GroupElem::from_digits(const GroupParams& g, const FpVec& d) {
  if (d.size() != g.n) throw Error("GroupElem: digit count mismatch");
  return GroupElem(g, g.index(d));
}

GroupElem elem_add(const GroupElem& x, const GroupElem& y) {
  require_same(x.g, y.g);
  return GroupElem(x.g, x.g.add(x.index, y.index));
}

int64_t dot(const GroupElem& x, const GroupElem& y) {
  require_same(x.g, y.g);
  return x.g.dot(x.index, y.index);
}

GroupFn::GroupFn(const GroupParams& g, CVec values) : g(g), v(std::move(values)) {
  if (v.size() != g.size) throw Error("GroupFn: value count must equal p^n");
}

double GroupFn::sup_norm() const {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

double GroupFn::l2() const { return std::sqrt(v.squaredNorm() / double(g.size)); }

double GroupFn::l1() const { return v.cwiseAbs().sum() / double(g.size); }

GroupFn GroupFn::constant(const GroupParams& g, cplx c) {
  return GroupFn(g, CVec::Constant(g.size, c));
}

GroupFn GroupFn::indicator(const GroupParams& g,
                           const std::vector<int64_t>& points) {
  GroupFn f(g);
  for (int64_t x : points) f.v[x] = 1.0;
  return f;
}

GroupFn dft(const GroupFn& f) {
  GroupFn out = f;
  dft_axis(out.v.data(), f.g.p, f.g.n, 1, false);
  return out;
}

GroupFn idft(const GroupFn& fhat) {
  GroupFn out = fhat;
  dft_axis(out.v.data(), fhat.g.p, fhat.g.n, 1, true);
  return out;
}

GroupFn barconv(const GroupFn& f, const GroupFn& g) {
  require_same(f.g, g.g);
  GroupFn a = dft(f), b = dft(g);
  a.v.array() *= b.v.array().conjugate();
  return idft(a);
}

GroupFn conv(const GroupFn& f, const GroupFn& g) {
  require_same(f.g, g.g);
  GroupFn a = dft(f), b = dft(g);
  a.v.array() *= b.v.array();
  return idft(a);
}

double dual_norm_pow(const GroupFn& fhat, int power) {
  double s = 0;
  for (int64_t r = 0; r < fhat.size(); ++r)
    s += std::pow(std::abs(fhat.v[r]), power);
  return s;
}

PolyPhase::PolyPhase(int p, int n) : p_(p), n_(n) {}

void PolyPhase::set(Monomial m, int64_t c) {
  if (m.size() > 3) throw Error("PolyPhase: degree above 3");
  for (int i : m)
    if (i < 0 || i >= n_) throw Error("PolyPhase: variable index out of range");
  std::sort(m.begin(), m.end());
  c = mod(c, p_);
  if (c == 0)
    terms_.erase(m);
  else
    terms_[m] = c;
}

int64_t PolyPhase::coeff(Monomial m) const {
  std::sort(m.begin(), m.end());
  auto it = terms_.find(m);
  return it == terms_.end() ? 0 : it->second;
}

int PolyPhase::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max<int>(d, int(m.size()));
  return d;
}

int64_t PolyPhase::eval(const FpVec& x) const {
  int64_t s = 0;
  for (const auto& [m, c] : terms_) {
    int64_t t = c;
    for (int i : m) t = t * mod(x[i], p_) % p_;
    s += t;
  }
  return s % p_;
}

std::vector<int64_t> PolyPhase::table(const GroupParams& g) const {
  if (g.p != p_ || g.n != n_) throw Error("PolyPhase: parameter mismatch");
  std::vector<int64_t> t(g.size);
  for (int64_t x = 0; x < g.size; ++x) t[x] = eval(g.digits(x));
  return t;
}

PolyPhase PolyPhase::operator+(const PolyPhase& o) const {
  if (p_ != o.p_ || n_ != o.n_) throw Error("PolyPhase: parameter mismatch");
  PolyPhase r = *this;
  for (const auto& [m, c] : o.terms_) r.set(m, r.coeff(m) + c);
  return r;
}

PolyPhase PolyPhase::operator-(const PolyPhase& o) const {
  if (p_ != o.p_ || n_ != o.n_) throw Error("PolyPhase: parameter mismatch");
  PolyPhase r = *this;
  for (const auto& [m, c] : o.terms_) r.set(m, r.coeff(m) - c);
  return r;
}

std::string PolyPhase::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << c;
    for (int i : m) os << "*x" << i;
  }
  if (first) os << "0";
  return os.str();
}

PolyPhase PolyPhase::random(int p, int n, int degree, Rng& rng) {
  PolyPhase q(p, n);
  for (int a = 0; a < n && degree >= 1; ++a) {
    q.set({a}, rng.uniform_int(0, p - 1));
    for (int b = a; b < n && degree >= 2; ++b) {
      q.set({a, b}, rng.uniform_int(0, p - 1));
      for (int c = b; c < n && degree >= 3; ++c)
        q.set({a, b, c}, rng.uniform_int(0, p - 1));
    }
  }
  q.set({}, rng.uniform_int(0, p - 1));
  return q;
}

GroupFn phase_fn(const GroupParams& g, const std::vector<int64_t>& phases) {
  if (int64_t(phases.size()) != g.size) throw Error("phase_fn: size mismatch");
  GroupFn f(g);
  for (int64_t x = 0; x < g.size; ++x) f.v[x] = root_of_unity(g.p, phases[x]);
  return f;
}

GroupFn poly_phase_fn(const PolyPhase& q, const GroupParams& g) {
  return phase_fn(g, q.table(g));
}

cplx correlation(const GroupFn& f, const PolyPhase& q) {
  const auto t = q.table(f.g);
  cplx s = 0;
  for (int64_t x = 0; x < f.size(); ++x)
    s += f.v[x] * root_of_unity(f.g.p, -t[x]);
  return s / double(f.size());
}

namespace {

using i128 = __int128;

int64_t checked(i128 v) {
  if (v > INT64_MAX || v < INT64_MIN) throw Error("Rational: overflow");
  return int64_t(v);
}

Rational make(i128 num, i128 den) {
  if (den == 0) throw Error("Rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  i128 a = num < 0 ? -num : num, b = den;
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    num /= a;
    den /= a;
  }
  Rational r;
  r.num = checked(num);
  r.den = checked(den);
  return r;
}

}  // namespace

Rational::Rational(int64_t n, int64_t d) { *this = make(n, d); }

Rational Rational::operator+(const Rational& o) const {
  return make(i128(num) * o.den + i128(o.num) * den, i128(den) * o.den);
}
Rational Rational::operator-(const Rational& o) const {
  return make(i128(num) * o.den - i128(o.num) * den, i128(den) * o.den);
}
Rational Rational::operator*(const Rational& o) const {
  return make(i128(num) * o.num, i128(den) * o.den);
}
Rational Rational::operator/(const Rational& o) const {
  return make(i128(num) * o.den, i128(den) * o.num);
}
bool Rational::operator<(const Rational& o) const {
  return i128(num) * o.den < i128(o.num) * den;
}
std::string Rational::to_string() const {
  return std::to_string(num) + "/" + std::to_string(den);
}

CharacterSum CharacterSum::from_phases(int p, const std::vector<int64_t>& phases) {
  CharacterSum s(p);
  for (int64_t t : phases) s.add(t);
  return s;
}

CharacterSum& CharacterSum::operator+=(const CharacterSum& o) {
  if (o.p != p) throw Error("CharacterSum: modulus mismatch");
  for (int c = 0; c < p; ++c) counts[c] += o.counts[c];
  return *this;
}

int64_t CharacterSum::total() const {
  return std::accumulate(counts.begin(), counts.end(), int64_t{0});
}

cplx CharacterSum::value() const {
  cplx s = 0;
  for (int c = 0; c < p; ++c) s += double(counts[c]) * root_of_unity(p, c);
  return s;
}

cplx CharacterSum::mean() const { return value() / double(total()); }

std::optional<Rational> CharacterSum::exact_mean() const {
  for (int c = 2; c < p; ++c)
    if (counts[c] != counts[1]) return std::nullopt;
  // sum_{c != 0} w^c = -1
  return Rational(counts[0] - (p > 1 ? counts[1] : 0), total());
}

}  // namespace ulab
