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

#include "ulab/grid.hpp"

#include <cmath>
#include <vector>

namespace ulab {

std::array<int64_t, 4> Parallelogram::vertices() const {
  const int64_t N = g.size;
  const int64_t x2 = g.add(x, w);
  return {x * N + y, x * N + g.add(y, h), x2 * N + y2, x2 * N + g.add(y2, h)};
}

Parallelogram Parallelogram::from_vertices(const GroupParams& g,
                                           const std::array<int64_t, 4>& v) {
  const int64_t N = g.size;
  Parallelogram P;
  P.g = g;
  P.x = v[0] / N;
  P.y = v[0] % N;
  P.w = g.sub(v[2] / N, P.x);
  P.h = g.sub(v[1] % N, P.y);
  P.y2 = v[2] % N;
  if (P.vertices() != v)
    throw Error("Parallelogram: vertices do not form a vertical parallelogram");
  return P;
}

void dft_rows(CMatRM& m, const GroupParams& g, bool inverse) {
  const int64_t N = g.size;
  parallel_for(0, N, [&](int64_t x) {
    dft_axis(m.data() + x * N, g.p, g.n, 1, inverse);
  });
}

void dft_cols(CMatRM& m, const GroupParams& g, bool inverse) {
  const int64_t N = g.size;
  parallel_for(0, N, [&](int64_t y) {
    dft_axis(m.data() + y, g.p, g.n, N, inverse);
  });
}

GridFn vert_conv(const GridFn& f, const GridFn& g) {
  require_same(f.g, g.g);
  CMatRM a = f.v, b = g.v;
  dft_rows(a, f.g, false);
  dft_rows(b, f.g, false);
  a.array() *= b.array().conjugate();
  dft_rows(a, f.g, true);
  return GridFn(f.g, std::move(a));
}

GridFn horiz_conv(const GridFn& f, const GridFn& g) {
  require_same(f.g, g.g);
  CMatRM a = f.v, b = g.v;
  dft_cols(a, f.g, false);
  dft_cols(b, f.g, false);
  a.array() *= b.array().conjugate();
  dft_cols(a, f.g, true);
  return GridFn(f.g, std::move(a));
}

GridFn mixed_conv(const GridFn& f1, const GridFn& f2, const GridFn& f3,
                  const GridFn& f4) {
  return horiz_conv(vert_conv(f1, f2), vert_conv(f3, f4));
}

GridFn mixed_conv(const GridFn& f) {
  GridFn v = vert_conv(f, f);
  return horiz_conv(v, v);
}

double arr_functional(const GridFn& f) {
  GridFn m = mixed_conv(f);
  return m.v.squaredNorm() / double(m.v.size());
}

namespace {

inline cplx signed_value(const cplx& z, int sign) {
  return sign > 0 ? z : std::conj(z);
}

}  // namespace

std::array<int64_t, 8> arrangement_points(const GroupParams& g,
                                          const std::array<int64_t, 8>& t) {
  Parallelogram a{g, t[0], t[1], t[2], t[3], t[4]};
  Parallelogram b{g, t[0], t[1], t[5], t[6], t[7]};
  auto va = a.vertices(), vb = b.vertices();
  return {va[0], va[1], va[2], va[3], vb[0], vb[1], vb[2], vb[3]};
}

std::array<int64_t, 32> arrangement2_points(const GroupParams& g,
                                            const std::array<int64_t, 32>& t) {
  const int64_t N = g.size;
  // Widths and heights of the eight inner parallelograms.
  std::array<int64_t, 8> wh = arrangement_points(
      g, {t[0], t[1], t[2], t[3], t[4], t[5], t[6], t[7]});
  std::array<int64_t, 32> out;
  for (int i = 0; i < 8; ++i) {
    Parallelogram P{g, wh[i] / N, wh[i] % N, t[8 + 3 * i], t[9 + 3 * i],
                    t[10 + 3 * i]};
    auto v = P.vertices();
    for (int j = 0; j < 4; ++j) out[4 * i + j] = v[j];
  }
  return out;
}

std::array<int64_t, 32> random_arrangement2(const GroupParams& g, Rng& rng) {
  std::array<int64_t, 32> t;
  for (auto& v : t) v = rng.uniform_int(0, g.size - 1);
  return arrangement2_points(g, t);
}

double arr_exhaustive(const GridFn& f) {
  const GroupParams& g = f.g;
  const int64_t N = g.size;
  if (N > 9) throw Error("arr_exhaustive: oracle limited to |G| <= 9");
  std::vector<int64_t> add(N * N);
  for (int64_t a = 0; a < N; ++a)
    for (int64_t b = 0; b < N; ++b) add[a * N + b] = g.add(a, b);
  auto F = [&](int64_t x, int64_t y) { return f.v(x, y); };
  // Nested loops over (w, h, x1, y1, y1', x2, y2, y2'), every tuple visited.
  std::vector<cplx> part(N * N);
  parallel_for(0, N * N, [&](int64_t wh) {
    const int64_t w = wh / N, h = wh % N;
    cplx acc = 0;
    for (int64_t x1 = 0; x1 < N; ++x1) {
      const int64_t x1w = add[x1 * N + w];
      for (int64_t y1 = 0; y1 < N; ++y1) {
        const cplx e1 = F(x1, y1) * std::conj(F(x1, add[y1 * N + h]));
        for (int64_t z1 = 0; z1 < N; ++z1) {
          const cplx p1 = e1 * std::conj(F(x1w, z1)) * F(x1w, add[z1 * N + h]);
          for (int64_t x2 = 0; x2 < N; ++x2) {
            const int64_t x2w = add[x2 * N + w];
            for (int64_t y2 = 0; y2 < N; ++y2) {
              const cplx e2 =
                  p1 * std::conj(F(x2, y2)) * F(x2, add[y2 * N + h]);
              for (int64_t z2 = 0; z2 < N; ++z2)
                acc += e2 * F(x2w, z2) * std::conj(F(x2w, add[z2 * N + h]));
            }
          }
        }
      }
    }
    part[wh] = acc;
  });
  cplx total = 0;
  for (const cplx& z : part) total += z;
  total /= std::pow(double(N), 8);
  if (std::abs(total.imag()) > 1e-9)
    throw NumericalFault("arr_exhaustive: imaginary residue");
  return total.real();
}

MonteCarlo arr2_estimate(const GridFn& f, int64_t samples, uint64_t seed) {
  if (samples < 1) throw Error("arr2_estimate: samples must be positive");
  const int64_t blocks = (samples + kMcBlock - 1) / kMcBlock;
  std::vector<double> sum(blocks), sum2(blocks);
  parallel_for(0, blocks, [&](int64_t b) {
    Rng rng(seed, uint64_t(b));
    const int64_t lo = b * kMcBlock;
    const int64_t hi = std::min(samples, lo + kMcBlock);
    double s = 0, s2 = 0;
    for (int64_t i = lo; i < hi; ++i) {
      auto pts = random_arrangement2(f.g, rng);
      cplx prod = 1;
      for (int k = 0; k < 32; ++k)
        prod *= signed_value(f.v.data()[pts[k]], morse_sign(k));
      s += prod.real();
      s2 += prod.real() * prod.real();
    }
    sum[b] = s;
    sum2[b] = s2;
  });
  double s = 0, s2 = 0;
  for (int64_t b = 0; b < blocks; ++b) {
    s += sum[b];
    s2 += sum2[b];
  }
  MonteCarlo r;
  r.samples = samples;
  r.estimate = s / double(samples);
  const double var =
      samples > 1 ? std::max(0.0, (s2 - s * s / double(samples)) / double(samples - 1))
                  : 0.0;
  r.stderr_ = std::sqrt(var / double(samples));
  return r;
}

double arr2_exact(const GridFn& f) {
  GridFn m = mixed_conv(mixed_conv(f));
  return m.v.squaredNorm() / double(m.v.size());
}

}  // namespace ulab
