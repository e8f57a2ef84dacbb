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

#include "ulab/gowers.hpp"

#include <cmath>
#include <numeric>
#include <vector>

namespace ulab {

std::string to_string(NormMethod m) {
  switch (m) {
    case NormMethod::kDirect:
      return "direct";
    case NormMethod::kNested:
      return "nested";
    case NormMethod::kFourier:
      return "fourier";
  }
  return "unknown";
}

GroupFn derivative(const GroupFn& f, int64_t a) {
  GroupFn out(f.g);
  for (int64_t x = 0; x < f.size(); ++x)
    out.v[x] = f.v[x] * std::conj(f.v[f.g.sub(x, a)]);
  return out;
}

GroupFn derivative(const GroupFn& f, const GroupElem& a) {
  require_same(f.g, a.g);
  return derivative(f, a.index);
}

double u2_pow4(const GroupFn& f) { return dual_norm_pow(dft(f), 4); }

namespace {

double ordered_sum(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0);
}

// Real part of a provably real average; a large imaginary residue means the
// computation is broken.
double checked_real(cplx z, const char* what) {
  if (std::abs(z.imag()) > 1e-9)
    throw NumericalFault(std::string(what) + ": imaginary residue " +
                         std::to_string(z.imag()));
  return z.real();
}

}  // namespace

double u3_pow8(const GroupFn& f) {
  std::vector<double> part(f.size());
  parallel_for(0, f.size(), [&](int64_t a) { part[a] = u2_pow4(derivative(f, a)); });
  return ordered_sum(part) / double(f.size());
}

double u4_pow16(const GroupFn& f) {
  const int64_t N = f.size();
  std::vector<double> part(N);
  parallel_for(0, N, [&](int64_t a) {
    GroupFn da = derivative(f, a);
    double s = 0;
    for (int64_t b = 0; b < N; ++b) s += u2_pow4(derivative(da, b));
    part[a] = s;
  });
  return ordered_sum(part) / double(N * N);
}

double u4_pow16_via_u3(const GroupFn& f) {
  std::vector<double> part(f.size());
  for (int64_t a = 0; a < f.size(); ++a) part[a] = u3_pow8(derivative(f, a));
  return ordered_sum(part) / double(f.size());
}

double uk_pow_direct(const GroupFn& f, int k) {
  if (k < 1 || k > 4) throw Error("uk_pow_direct: k must be in 1..4");
  if (f.size() > 32) throw Error("uk_pow_direct: oracle limited to |G| <= 32");
  const GroupParams& g = f.g;
  const int64_t N = f.size();
  const int verts = 1 << k;
  int64_t tuples = 1;
  for (int i = 0; i < k; ++i) tuples *= N;
  std::vector<cplx> part(N);
  parallel_for(0, N, [&](int64_t x) {
    std::vector<int64_t> a(k), shift(verts);
    cplx acc = 0;
    for (int64_t t = 0; t < tuples; ++t) {
      int64_t r = t;
      for (int i = 0; i < k; ++i) {
        a[i] = r % N;
        r /= N;
      }
      shift[0] = 0;
      for (int w = 1; w < verts; ++w) {
        const int low = __builtin_ctz(w);
        shift[w] = g.add(shift[w & (w - 1)], a[low]);
      }
      cplx prod = 1;
      for (int w = 0; w < verts; ++w) {
        cplx val = f.v[g.sub(x, shift[w])];
        prod *= (__builtin_popcount(w) & 1) ? std::conj(val) : val;
      }
      acc += prod;
    }
    part[x] = acc;
  });
  cplx total = 0;
  for (const cplx& z : part) total += z;
  return checked_real(total / (double(N) * double(tuples)), "uk_pow_direct");
}

NormReport uk_norm(const GroupFn& f, int k) {
  return uk_norm(f, k, k <= 2 ? NormMethod::kFourier : NormMethod::kNested);
}

NormReport uk_norm(const GroupFn& f, int k, NormMethod method) {
  if (k < 1 || k > 4) throw Error("uk_norm: k must be in 1..4");
  NormReport r;
  r.k = k;
  r.method = method;
  const int e = 1 << k;
  if (method == NormMethod::kDirect) {
    r.power = uk_pow_direct(f, k);
  } else if (k == 1) {
    r.power = std::norm(f.v.sum() / double(f.size()));
  } else if (k == 2) {
    r.power = u2_pow4(f);
  } else if (k == 3) {
    r.power = u3_pow8(f);
  } else {
    r.power = u4_pow16(f);
  }
  r.value = std::pow(std::max(r.power, 0.0), 1.0 / e);
  return r;
}

double box_norm2_pow4(const GridFn& F) {
  const double N = double(F.side());
  CMatRM m = F.v * F.v.adjoint() / N;
  const double v = m.cwiseAbs2().sum() / (N * N);
  if (v < -1e-9) throw NumericalFault("box_norm2: negative fourth power");
  return std::max(v, 0.0);
}

double box_norm2(const GridFn& F) { return std::pow(box_norm2_pow4(F), 0.25); }

double box_norm3_pow8(const Grid3Fn& F) {
  const int64_t N = F.g.size;
  const int64_t plane = N * N;
  std::vector<double> part(N);
  parallel_for(0, N, [&](int64_t a) {
    CMatRM h(N, N);
    double s = 0;
    for (int64_t a2 = 0; a2 < N; ++a2) {
      for (int64_t i = 0; i < plane; ++i)
        h.data()[i] = F.v[a * plane + i] * std::conj(F.v[a2 * plane + i]);
      CMatRM m = h * h.adjoint() / double(N);
      s += m.cwiseAbs2().sum() / double(plane);
    }
    part[a] = s;
  });
  const double v = ordered_sum(part) / double(plane);
  if (v < -1e-9) throw NumericalFault("box_norm3: negative eighth power");
  return std::max(v, 0.0);
}

double box_norm3(const Grid3Fn& F) { return std::pow(box_norm3_pow8(F), 0.125); }

}  // namespace ulab
