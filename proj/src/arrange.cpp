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

#include "ulab/arrange.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ulab/gowers.hpp"
#include "ulab/parallel_impl.hpp"

namespace ulab {

PartialMap::PartialMap(const GroupParams& g)
    : g(g), domain(g.size * g.size, 0), values(g.size * g.size, 0) {}

void PartialMap::set(int64_t flat, int64_t value) {
  if (value < 0 || value >= g.size) throw Error("PartialMap: value out of range");
  domain.at(flat) = 1;
  values[flat] = value;
}

void PartialMap::erase(int64_t flat) {
  domain.at(flat) = 0;
  values[flat] = 0;
}

int64_t PartialMap::size() const {
  return std::count(domain.begin(), domain.end(), uint8_t(1));
}

double PartialMap::density() const {
  return double(size()) / double(domain.size());
}

std::vector<int64_t> PartialMap::points() const {
  std::vector<int64_t> out;
  for (int64_t i = 0; i < int64_t(domain.size()); ++i)
    if (domain[i]) out.push_back(i);
  return out;
}

GridFn PartialMap::indicator() const { return GridFn::indicator(g, points()); }

DistFn PartialMap::to_distfn() const {
  DistFn f(g);
  for (int64_t i : points()) f.values.emplace(i, Dist::delta(g, values[i]));
  return f;
}

PartialMap spectral_map(const GroupFn& f, double gamma,
                        std::vector<double>* magnitude) {
  const GroupParams& g = f.g;
  const int64_t N = g.size;
  PartialMap phi(g);
  std::vector<int64_t> arg(N * N, -1);
  std::vector<double> mag(N * N, 0.0);
  parallel_for(0, N * N, [&](int64_t ab) {
    GroupFn s = dft(derivative(derivative(f, ab / N), ab % N));
    int64_t best = 0;
    for (int64_t r = 1; r < N; ++r)
      if (std::abs(s.v[r]) > std::abs(s.v[best]) + 1e-12) best = r;
    mag[ab] = std::abs(s.v[best]);
    if (mag[ab] >= gamma) arg[ab] = best;
  });
  if (magnitude) *magnitude = std::move(mag);
  for (int64_t i = 0; i < N * N; ++i)
    if (arg[i] >= 0) phi.set(i, arg[i]);
  return phi;
}

double ArrangementStats::tuples(const GroupParams& g) const {
  return std::pow(double(g.size), order == 1 ? 8 : 32);
}

namespace {

template <size_t K>
int64_t signed_sum(const GroupParams& g, const PartialMap& phi,
                   const std::array<int64_t, K>& pts) {
  int64_t s = 0;
  for (size_t i = 0; i < K; ++i)
    s = morse_sign(int(i)) > 0 ? g.add(s, phi.values[pts[i]])
                               : g.sub(s, phi.values[pts[i]]);
  return s;
}

ArrangementStats exact_stats(const PartialMap& phi, int order) {
  ArrangementStats st;
  st.order = order;
  GridFn ind = phi.indicator();
  AlgGrid d = to_dense(phi.to_distfn());
  AlgGrid m = alg_mixed_conv(d, d, d, d);
  if (order == 1) {
    st.total = arr_functional(ind);
  } else {
    st.total = arr2_exact(ind);
    m = alg_mixed_conv(m, m, m, m);
  }
  st.respected = alg_inner(m, m);
  return st;
}

ArrangementStats mc_stats(const PartialMap& phi, int order, int64_t samples,
                          uint64_t seed) {
  if (samples < 1) throw Error("respect_stats: samples must be positive");
  const GroupParams& g = phi.g;
  const int64_t blocks = (samples + kMcBlock - 1) / kMcBlock;
  std::vector<int64_t> inside(blocks), resp(blocks);
  parallel_for(0, blocks, [&](int64_t b) {
    Rng rng(seed, uint64_t(b));
    const int64_t lo = b * kMcBlock, hi = std::min(samples, lo + kMcBlock);
    int64_t in = 0, rs = 0;
    for (int64_t i = lo; i < hi; ++i) {
      if (order == 1) {
        std::array<int64_t, 8> t;
        for (auto& v : t) v = rng.uniform_int(0, g.size - 1);
        auto pts = arrangement_points(g, t);
        if (!std::all_of(pts.begin(), pts.end(),
                         [&](int64_t q) { return phi.contains(q); }))
          continue;
        ++in;
        rs += signed_sum(g, phi, pts) == 0;
      } else {
        auto pts = random_arrangement2(g, rng);
        if (!std::all_of(pts.begin(), pts.end(),
                         [&](int64_t q) { return phi.contains(q); }))
          continue;
        ++in;
        rs += signed_sum(g, phi, pts) == 0;
      }
    }
    inside[b] = in;
    resp[b] = rs;
  });
  int64_t in = 0, rs = 0;
  for (int64_t b = 0; b < blocks; ++b) {
    in += inside[b];
    rs += resp[b];
  }
  ArrangementStats st;
  st.order = order;
  st.exact = false;
  st.samples = samples;
  const double n = double(samples);
  st.total = double(in) / n;
  st.respected = double(rs) / n;
  st.total_stderr = std::sqrt(st.total * (1 - st.total) / n);
  st.respected_stderr = std::sqrt(st.respected * (1 - st.respected) / n);
  return st;
}

}  // namespace

ArrangementStats respect_stats(const PartialMap& phi, int order,
                               RespectMode mode, int64_t samples,
                               uint64_t seed) {
  if (order != 1 && order != 2) throw Error("respect_stats: order must be 1 or 2");
  return mode == RespectMode::kExact ? exact_stats(phi, order)
                                     : mc_stats(phi, order, samples, seed);
}

ArrangementStats respect_enumerate(const PartialMap& phi) {
  const GroupParams& g = phi.g;
  const int64_t N = g.size;
  if (N > 9) throw Error("respect_enumerate: limited to |G| <= 9");
  std::vector<int64_t> add(N * N), sub(N * N);
  for (int64_t a = 0; a < N; ++a)
    for (int64_t b = 0; b < N; ++b) {
      add[a * N + b] = g.add(a, b);
      sub[a * N + b] = g.sub(a, b);
    }
  // Value of a point, or -1 outside A.
  std::vector<int64_t> val(N * N);
  for (int64_t i = 0; i < N * N; ++i) val[i] = phi.contains(i) ? phi.values[i] : -1;
  // phi(P) of every parallelogram with base (x, y, y') and given (w, h).
  std::vector<int64_t> inside(N * N), resp(N * N);
  parallel_for(0, N * N, [&](int64_t wh) {
    const int64_t w = wh / N, h = wh % N;
    std::vector<int64_t> hist(N, 0);
    for (int64_t x = 0; x < N; ++x) {
      const int64_t xw = add[x * N + w];
      for (int64_t y = 0; y < N; ++y) {
        const int64_t v1 = val[x * N + y], v2 = val[x * N + add[y * N + h]];
        if (v1 < 0 || v2 < 0) continue;
        for (int64_t y2 = 0; y2 < N; ++y2) {
          const int64_t v3 = val[xw * N + y2], v4 = val[xw * N + add[y2 * N + h]];
          if (v3 < 0 || v4 < 0) continue;
          ++hist[add[sub[v1 * N + v2] * N + sub[v4 * N + v3]]];
        }
      }
    }
    // Pairs of parallelograms inside A, and pairs with equal values.
    int64_t in = 0, rs = 0;
    for (int64_t a = 0; a < N; ++a) {
      in += hist[a];
      rs += hist[a] * hist[a];
    }
    inside[wh] = in * in;
    resp[wh] = rs;
  });
  ArrangementStats st;
  const double tuples = std::pow(double(N), 8);
  for (int64_t i = 0; i < N * N; ++i) {
    st.total += double(inside[i]);
    st.respected += double(resp[i]);
  }
  st.total /= tuples;
  st.respected /= tuples;
  return st;
}

Signs8 morse8() {
  Signs8 s;
  for (int i = 0; i < 8; ++i) s[i] = morse_sign(i);
  return s;
}

Signs32 morse32() {
  Signs32 s;
  for (int i = 0; i < 32; ++i) s[i] = morse_sign(i);
  return s;
}

bool first_order_admissible(const Signs8& eps, int p) {
  // Point i is (alpha_i . (x1, x2, w), beta_i . (y1, y1', y2, y2', h)).
  static constexpr int kAlpha[8][3] = {{1, 0, 0}, {1, 0, 0}, {1, 0, 1}, {1, 0, 1},
                                       {0, 1, 0}, {0, 1, 0}, {0, 1, 1}, {0, 1, 1}};
  static constexpr int kBeta[8][5] = {
      {1, 0, 0, 0, 0}, {1, 0, 0, 0, 1}, {0, 1, 0, 0, 0}, {0, 1, 0, 0, 1},
      {0, 0, 1, 0, 0}, {0, 0, 1, 0, 1}, {0, 0, 0, 1, 0}, {0, 0, 0, 1, 1}};
  for (int r = 0; r < 3; ++r)
    for (int s = 0; s < 5; ++s) {
      int64_t c = 0;
      for (int i = 0; i < 8; ++i) c += eps[i] * kAlpha[i][r] * kBeta[i][s];
      if (mod(c, p) != 0) return false;
    }
  return true;
}

std::vector<Signs8> morse_sign_scan(int p) {
  std::vector<Signs8> out;
  for (int code = 0; code < 6561; ++code) {
    Signs8 eps;
    int c = code;
    for (int i = 7; i >= 0; --i) {
      eps[i] = c % 3 - 1;
      c /= 3;
    }
    if (first_order_admissible(eps, p)) out.push_back(eps);
  }
  return out;
}

bool is_morse_multiple(const Signs32& eps) {
  const Signs32 m = morse32();
  for (int c : {-1, 0, 1}) {
    bool all = true;
    for (int i = 0; i < 32; ++i) all = all && eps[i] == c * m[i];
    if (all) return true;
  }
  return false;
}

MonteCarlo rare_zero_fraction(const GroupParams& g, const Signs32& eps,
                              int64_t samples, uint64_t seed) {
  for (int e : eps)
    if (e < -1 || e > 1) throw Error("rare_zero_fraction: signs must lie in {-1,0,1}");
  if (is_morse_multiple(eps))
    throw Error("rare_zero_fraction: pattern is a multiple of the Morse sequence");
  if (samples < 1) throw Error("rare_zero_fraction: samples must be positive");
  const int64_t N = g.size;
  const int n = g.n;
  std::vector<int64_t> dig(N * n);
  for (int64_t a = 0; a < N; ++a)
    for (int r = 0; r < n; ++r) dig[a * n + r] = g.digit(a, r);
  const int64_t blocks = (samples + kMcBlock - 1) / kMcBlock;
  std::vector<int64_t> zeros(blocks);
  parallel_for(0, blocks, [&](int64_t b) {
    Rng rng(seed, uint64_t(b));
    const int64_t lo = b * kMcBlock, hi = std::min(samples, lo + kMcBlock);
    std::vector<int64_t> t(n * n);
    int64_t z = 0;
    for (int64_t i = lo; i < hi; ++i) {
      auto pts = random_arrangement2(g, rng);
      std::fill(t.begin(), t.end(), 0);
      for (int k = 0; k < 32; ++k) {
        if (eps[k] == 0) continue;
        const int64_t* a = &dig[(pts[k] / N) * n];
        const int64_t* c = &dig[(pts[k] % N) * n];
        for (int r = 0; r < n; ++r)
          for (int s = 0; s < n; ++s) t[r * n + s] += eps[k] * a[r] * c[s];
      }
      z += std::all_of(t.begin(), t.end(), [&](int64_t v) { return mod(v, g.p) == 0; });
    }
    zeros[b] = z;
  });
  int64_t z = 0;
  for (int64_t v : zeros) z += v;
  MonteCarlo mc;
  mc.samples = samples;
  mc.estimate = double(z) / double(samples);
  mc.stderr_ = std::sqrt(mc.estimate * (1 - mc.estimate) / double(samples));
  return mc;
}

namespace {

PartialMap riesz_select(const PartialMap& phi, int k, Rng& rng) {
  const GroupParams& g = phi.g;
  const int64_t N = g.size;
  const int n = g.n;
  std::vector<int64_t> s(k);
  std::vector<FpMat> M(k);
  for (int i = 0; i < k; ++i) {
    s[i] = rng.uniform_int(0, N - 1);
    M[i] = FpMat(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) M[i](r, c) = rng.uniform_int(0, g.p - 1);
  }
  PartialMap out(g);
  for (int64_t q : phi.points()) {
    const FpVec x = g.digits(q / N), y = g.digits(q % N);
    double prob = 1;
    for (int i = 0; i < k; ++i) {
      const int64_t e = mod(g.dot(s[i], phi.values[q]) + x.dot(M[i] * y), g.p);
      prob *= 0.5 * (1 + std::cos(2 * kPi * double(e) / g.p));
    }
    if (rng.uniform() < prob) out.set(q, phi.values[q]);
  }
  return out;
}

}  // namespace

DensifyResult densify(const PartialMap& phi, const DensifyOptions& opt) {
  if (!(opt.eta > 0 && opt.eta < 1)) throw Error("densify: eta must lie in (0, 1)");
  if (opt.retries < 1) throw Error("densify: retries must be positive");
  auto stats = [&](const PartialMap& m, uint64_t stream) {
    return respect_stats(m, 2, opt.mode, opt.samples, substream_seed(opt.seed, stream));
  };
  DensifyResult best;
  best.input = stats(phi, 0);
  const double delta = best.input.respected;
  best.formula_k = delta > 0 ? std::ldexp(1.0, 32) * (std::log(1 / opt.eta) + std::log(1 / delta))
                             : std::numeric_limits<double>::infinity();
  best.score = -std::numeric_limits<double>::infinity();
  const int k_lo = opt.k >= 0 ? opt.k : 0;
  const int k_hi = opt.k >= 0 ? opt.k : opt.k_max;
  int tries = 0;
  bool any = false;
  for (int k = k_lo; k <= k_hi; ++k) {
    // Without factors the selection keeps all of A.
    const int reps = k == 0 ? 1 : opt.retries;
    for (int r = 0; r < reps; ++r) {
      ++tries;
      Rng rng(opt.seed, 1 + uint64_t(k) * uint64_t(opt.retries) + uint64_t(r));
      PartialMap sel = riesz_select(phi, k, rng);
      if (sel.size() == 0) continue;
      any = true;
      ArrangementStats st = stats(sel, 1 + uint64_t(k) * uint64_t(opt.retries) + uint64_t(r));
      const double score = st.respected - (st.total - st.respected) / opt.eta;
      if (score > best.score) {
        best.selected = std::move(sel);
        best.stats = st;
        best.k = k;
        best.score = score;
        best.satisfied = score >= 0 && st.respected > 0;
      }
    }
    if (best.satisfied) break;
  }
  best.tries = tries;
  if (!any) {
    std::ostringstream os;
    os << "densify: every selection was empty (|A| = " << phi.size()
       << ", k up to " << k_hi << ", " << tries << " tries)";
    throw Error(os.str());
  }
  return best;
}

PartialMap freiman_rows(const PartialMap& phi) {
  return freiman_rows(phi, std::vector<double>());
}

PartialMap freiman_rows(const PartialMap& phi, const std::vector<double>& priority) {
  const GroupParams& g = phi.g;
  const int64_t N = g.size;
  if (!priority.empty() && int64_t(priority.size()) != N * N)
    throw Error("freiman_rows: priority must have |G|^2 entries");
  PartialMap out(g);
  std::vector<int64_t> sum_value(N);
  std::vector<int64_t> kept, order(N);
  for (int64_t y = 0; y < N; ++y) {
    std::fill(sum_value.begin(), sum_value.end(), -1);
    kept.clear();
    for (int64_t x = 0; x < N; ++x) order[x] = x;
    if (!priority.empty())
      std::stable_sort(order.begin(), order.end(), [&](int64_t a, int64_t b) {
        return priority[a * N + y] > priority[b * N + y];
      });
    for (int64_t x : order) {
      const int64_t q = x * N + y;
      if (!phi.contains(q)) continue;
      const int64_t v = phi.values[q];
      // New sums x + b have distinct keys, so only old entries can clash.
      bool ok = true;
      for (int64_t b : kept)
        if (int64_t sv = sum_value[g.add(x, b)];
            sv >= 0 && sv != g.add(v, phi.values[b * N + y])) {
          ok = false;
          break;
        }
      if (const int64_t sv = sum_value[g.add(x, x)]; sv >= 0 && sv != g.add(v, v))
        ok = false;
      if (!ok) continue;
      for (int64_t b : kept) sum_value[g.add(x, b)] = g.add(v, phi.values[b * N + y]);
      sum_value[g.add(x, x)] = g.add(v, v);
      kept.push_back(x);
      out.set(q, v);
    }
  }
  return out;
}

bool rows_are_freiman(const PartialMap& phi) {
  const GroupParams& g = phi.g;
  const int64_t N = g.size;
  for (int64_t y = 0; y < N; ++y) {
    std::vector<int64_t> sum_value(N, -1);
    for (int64_t a = 0; a < N; ++a) {
      if (!phi.contains(a * N + y)) continue;
      for (int64_t b = a; b < N; ++b) {
        if (!phi.contains(b * N + y)) continue;
        const int64_t s = g.add(a, b);
        const int64_t v = g.add(phi.values[a * N + y], phi.values[b * N + y]);
        if (sum_value[s] >= 0 && sum_value[s] != v) return false;
        sum_value[s] = v;
      }
    }
  }
  return true;
}

}  // namespace ulab
