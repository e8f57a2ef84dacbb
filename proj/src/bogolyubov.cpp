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

#include "ulab/bogolyubov.hpp"

#include <algorithm>
#include <cmath>

#include "ulab/grid.hpp"

namespace ulab {

int64_t AffineMap::apply(const GroupParams& g, int64_t h) const {
  return g.index(L * g.digits(h) + c);
}

bool AffineMap::operator<(const AffineMap& o) const {
  for (Eigen::Index i = 0; i < L.size(); ++i)
    if (L.data()[i] != o.L.data()[i]) return L.data()[i] < o.L.data()[i];
  for (Eigen::Index i = 0; i < c.size(); ++i)
    if (c[i] != o.c[i]) return c[i] < o.c[i];
  return false;
}

namespace {

// Map number i: row-major L then c, least significant digit first.
AffineMap map_from_index(int64_t i, int p, int n) {
  AffineMap m{FpMat(n, n), FpVec(n)};
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      m.L(r, c) = i % p;
      i /= p;
    }
  for (int r = 0; r < n; ++r) {
    m.c[r] = i % p;
    i /= p;
  }
  return m;
}

int64_t bad_row_count(const std::vector<uint8_t>& uncovered, int64_t N) {
  int64_t bad = 0;
  for (int64_t h = 0; h < N; ++h)
    for (int64_t u = 0; u < N; ++u)
      if (uncovered[h * N + u]) {
        ++bad;
        break;
      }
  return bad;
}

int64_t coverage(const GroupParams& g, const AffineMap& m,
                 const std::vector<uint8_t>& uncovered) {
  int64_t c = 0;
  for (int64_t h = 0; h < g.size; ++h) c += uncovered[h * g.size + m.apply(g, h)];
  return c;
}

// Grows a point set through the anchor and the second point, adding points
// in order while an affine map through all of them exists.
AffineMap fit_through(const GroupParams& g, const std::vector<int64_t>& pts,
                      size_t anchor, size_t second) {
  const int n = g.n, p = g.p;
  const int64_t N = g.size;
  std::vector<int64_t> chosen;
  auto try_add = [&](int64_t q) {
    std::vector<int64_t> trial = chosen;
    trial.push_back(q);
    FpMat A(Eigen::Index(trial.size()), n + 1);
    FpMat U(Eigen::Index(trial.size()), n);
    for (size_t r = 0; r < trial.size(); ++r) {
      A.row(r) << g.digits(trial[r] / N).transpose(), 1;
      U.row(r) = g.digits(trial[r] % N).transpose();
    }
    for (int j = 0; j < n; ++j)
      if (!fp_solve(A, U.col(j), p)) return false;
    chosen = std::move(trial);
    return true;
  };
  try_add(pts[anchor]);
  if (second != anchor) try_add(pts[second]);
  for (size_t i = 0; i < pts.size(); ++i) {
    if (i == anchor || i == second) continue;
    try_add(pts[i]);
  }
  FpMat A(Eigen::Index(chosen.size()), n + 1);
  FpMat U(Eigen::Index(chosen.size()), n);
  for (size_t r = 0; r < chosen.size(); ++r) {
    A.row(r) << g.digits(chosen[r] / N).transpose(), 1;
    U.row(r) = g.digits(chosen[r] % N).transpose();
  }
  AffineMap m{FpMat(n, n), FpVec(n)};
  for (int j = 0; j < n; ++j) {
    const FpVec s = *fp_solve(A, U.col(j), p);
    for (int c = 0; c < n; ++c) m.L(j, c) = s[c];
    m.c[j] = s[n];
  }
  return m;
}

constexpr size_t kFitCandidates = 64;

}  // namespace

AffineCover affine_cover(const GroupParams& g,
                         const std::vector<std::vector<int64_t>>& spectrum,
                         int64_t max_bad_rows, int64_t exhaustive_budget) {
  const int n = g.n, p = g.p;
  const int64_t N = g.size;
  if (int64_t(spectrum.size()) != N) throw Error("affine_cover: one list per h");
  std::vector<uint8_t> uncovered(N * N, 0);
  for (int64_t h = 0; h < N; ++h)
    for (int64_t u : spectrum[h]) uncovered[h * N + u] = 1;

  AffineCover out;
  // p^{n^2 + n} maps, each evaluated on |G| points per round.
  double maps = std::pow(double(p), double(n * n + n));
  out.exhaustive = maps * double(N) <= double(exhaustive_budget);
  std::vector<int64_t> counts;
  while (bad_row_count(uncovered, N) > max_bad_rows) {
    AffineMap best;
    int64_t best_count = 0;
    if (out.exhaustive) {
      const int64_t M = int64_t(maps);
      counts.assign(M, 0);
      parallel_for(0, M, [&](int64_t i) {
        counts[i] = coverage(g, map_from_index(i, p, n), uncovered);
      });
      int64_t arg = 0;
      for (int64_t i = 1; i < M; ++i)
        if (counts[i] > counts[arg]) arg = i;
      best = map_from_index(arg, p, n);
      best_count = counts[arg];
    } else {
      std::vector<int64_t> pts;
      for (int64_t q = 0; q < N * N; ++q)
        if (uncovered[q]) pts.push_back(q);
      const size_t cand = std::min(pts.size(), kFitCandidates);
      for (size_t s = 0; s < cand; ++s) {
        AffineMap m = fit_through(g, pts, 0, s);
        const int64_t c = coverage(g, m, uncovered);
        if (c > best_count) {
          best = std::move(m);
          best_count = c;
        }
      }
    }
    if (best_count == 0) throw NumericalFault("affine_cover: no progress");
    for (int64_t h = 0; h < N; ++h) uncovered[h * N + best.apply(g, h)] = 0;
    out.maps.push_back(std::move(best));
  }
  out.bad_rows = bad_row_count(uncovered, N);
  std::sort(out.maps.begin(), out.maps.end());
  return out;
}

double column_decay_max(const GridFn& F) {
  double worst = 0;
  for (int64_t x = 0; x < F.side(); ++x)
    worst = std::max(worst, dft(F.row(x)).v.cwiseAbs().sum());
  return worst;
}

namespace {

// Coefficient vector (T, a, b, lambda) of one coordinate.
FpVec form_vector(const AffineForm& f) {
  const Eigen::Index n = f.a.size();
  FpVec v(n * n + 2 * n + 1);
  for (Eigen::Index i = 0; i < n * n; ++i) v[i] = f.T.data()[i];
  v.segment(n * n, n) = f.a;
  v.segment(n * n + n, n) = f.b;
  v[n * n + 2 * n] = f.lambda;
  return v;
}

BiAffineMap prune(const BiAffineMap& beta) {
  const GroupParams& g = beta.group();
  BiAffineMap out(g);
  FpMat rows(0, g.n * g.n + 2 * g.n + 1);
  int rank = 0;
  for (const AffineForm& f : beta.coords()) {
    FpMat next(rows.rows() + 1, rows.cols());
    next << rows, form_vector(f).transpose();
    const int r = fp_rank(next, g.p);
    if (r > rank) {
      rows = std::move(next);
      rank = r;
      out.push_back(f);
    }
  }
  return out;
}

}  // namespace

BogResult bogolyubov_bilinear(const GridFn& f, double zeta,
                              const BogOptions& opt) {
  if (!(zeta > 0)) throw Error("bogolyubov_bilinear: zeta must be positive");
  if (f.sup_norm() > 1 + 1e-9) throw Error("bogolyubov_bilinear: f must be bounded");
  const GroupParams& g = f.g;
  const int64_t N = g.size;
  const GridFn gv = vert_conv(f, f);
  const GridFn F = horiz_conv(gv, gv);

  BogResult best;
  best.report.column_decay = column_decay_max(F);
  if (best.report.column_decay > 1 + 1e-9)
    throw NumericalFault("bogolyubov_bilinear: row transforms exceed l1 norm 1");

  std::vector<GroupFn> ghat(N), Fhat(N);
  for (int64_t h = 0; h < N; ++h) {
    ghat[h] = dft(gv.col(h));
    Fhat[h] = dft(F.col(h));
  }

  bool have = false;
  for (int s = 0; s <= opt.max_halvings; ++s) {
    const double scale = std::ldexp(1.0, -s);
    BogReport rep;
    rep.zeta = zeta;
    rep.column_decay = best.report.column_decay;
    rep.halvings = s;
    rep.gamma = zeta * zeta / 8 * scale;
    rep.eps = rep.gamma;
    rep.delta = zeta / 2;

    std::vector<std::vector<int64_t>> spectrum(N);
    for (int64_t h = 0; h < N; ++h)
      for (int64_t u = 0; u < N; ++u)
        if (std::norm(ghat[h][u]) >= rep.gamma) spectrum[h].push_back(u);
    for (const auto& row : spectrum) rep.spectrum_size += int64_t(row.size());

    AffineCover cover = affine_cover(g, spectrum, int64_t(rep.eps * double(N)),
                                     opt.exhaustive_budget);
    rep.bad_rows = cover.bad_rows;
    rep.exhaustive_cover = cover.exhaustive;
    rep.m = int(cover.maps.size());
    const double trunc =
        rep.m ? rep.delta * rep.delta / double(rep.m * rep.m) * scale : 0.0;

    BiAffineMap beta(g);
    for (int i = 0; i < rep.m; ++i) {
      const AffineMap& T = cover.maps[i];
      GroupFn u(g);
      for (int64_t y = 0; y < N; ++y) {
        const int64_t ty = T.apply(g, y);
        bool first = true;
        for (int j = 0; j < i && first; ++j)
          first = cover.maps[j].apply(g, y) != ty;
        if (first) u[y] = Fhat[y][ty];
      }
      const GroupFn uhat = dft(u);
      rep.u_l1.push_back(uhat.v.cwiseAbs().sum());
      for (int64_t v = 0; v < N; ++v) {
        if (std::abs(uhat[v]) < trunc) continue;
        AffineForm form = AffineForm::bilinear(T.L);
        form.b = T.c;
        form.a = g.digits(v);
        beta.push_back(std::move(form));
      }
    }
    rep.k_raw = beta.k();
    if (opt.prune) beta = prune(beta);
    rep.k = beta.k();
    rep.error = (F.v - avg_projection(F, beta).v).norm() / double(N);
    rep.within = rep.error <= zeta;
    rep.cover = cover.maps;
    if (!have || rep.error < best.report.error) {
      best.beta = beta;
      best.report = rep;
      have = true;
    }
    if (rep.within) break;
  }
  return best;
}

WeakBog weak_bog_linear(const GroupFn& f, const GroupFn& g, double eps) {
  if (!(eps > 0)) throw Error("weak_bog_linear: eps must be positive");
  require_same(f.g, g.g);
  const GroupParams& G = f.g;
  const GroupFn fh = dft(f), gh = dft(g);
  WeakBog out{Subspace(G), {}, 0};
  for (int64_t r = 0; r < G.size; ++r)
    if (std::abs(fh[r] * gh[r]) >= eps / 4) out.spectrum.push_back(r);
  out.B = Subspace::span_points(G, out.spectrum).annihilator();
  const GroupFn F = conv(f, g);
  const std::vector<int64_t> B = out.B.elements();
  GroupFn avg(G);
  for (int64_t x = 0; x < G.size; ++x) {
    cplx s = 0;
    for (int64_t b : B) s += F[G.sub(x, b)];
    avg[x] = s / double(B.size());
  }
  GroupFn diff(G, F.v - avg.v);
  out.error = diff.l2();
  return out;
}

}  // namespace ulab
