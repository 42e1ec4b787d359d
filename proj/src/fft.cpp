#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

namespace ksmix::detail {

namespace {

std::mutex& cache_mutex() {
  static std::mutex m;
  return m;
}

struct PlanPair {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

PlanPair make_plans(const Grid& grid) {
  int dims[3] = {grid.n, grid.n, grid.n};
  const std::size_t real_n = grid.size();
  const std::size_t half_n = grid.half_size();
  double* r = fftw_alloc_real(real_n);
  fftw_complex* c = fftw_alloc_complex(half_n);
  const unsigned flags = FFTW_ESTIMATE;
  PlanPair p;
  p.r2c = fftw_plan_dft_r2c(grid.dim, dims, r, c, flags);
  p.c2r = fftw_plan_dft_c2r(grid.dim, dims, c, r, flags);
  fftw_free(r);
  fftw_free(c);
  if (p.r2c == nullptr || p.c2r == nullptr) throw std::runtime_error("FFTW plan creation failed");
  return p;
}

const PlanPair& plans_for(const Grid& grid) {
  static std::map<std::pair<int, int>, PlanPair> cache;
  std::lock_guard<std::mutex> lock(cache_mutex());
  auto key = std::make_pair(grid.dim, grid.n);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, make_plans(grid)).first;
  return it->second;
}

ModeTable build_table(const Grid& grid) {
  ModeTable t;
  t.grid = grid;
  const int n = grid.n;
  const int h = n / 2 + 1;
  const std::size_t m = grid.half_size();
  t.kx.resize(m);
  t.ky.resize(m);
  t.kz.resize(m, 0);
  t.ksq.resize(m);
  t.weight.resize(m);
  t.sign.resize(m);
  t.kmax.resize(m);
  std::size_t idx = 0;
  auto fill = [&](int a, int b, int c, int last) {
    t.kx[idx] = a;
    t.ky[idx] = b;
    t.kz[idx] = c;
    t.ksq[idx] = static_cast<double>(a * a + b * b + c * c);
    t.weight[idx] = (last == 0 || last == n / 2) ? 1.0 : 2.0;
    t.sign[idx] = ((a + b + c) % 2 == 0) ? 1.0 : -1.0;
    t.kmax[idx] = std::max({std::abs(a), std::abs(b), std::abs(c)});
    ++idx;
  };
  if (grid.dim == 2) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < h; ++j) fill(wavenumber(i, n), j, 0, j);
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < h; ++k) fill(wavenumber(i, n), wavenumber(j, n), k, k);
  }
  return t;
}

}  // namespace

Fft::Fft(const Grid& grid)
    : grid_(grid),
      real_(fftw_alloc_real(grid.size()), fftw_free),
      spec_(fftw_alloc_complex(grid.half_size()), fftw_free) {
  if (!real_ || !spec_) throw std::bad_alloc();
  const PlanPair& p = plans_for(grid);
  r2c_ = p.r2c;
  c2r_ = p.c2r;
}

void Fft::forward(const double* in, cplx* out) const {
  double* r = static_cast<double*>(real_.get());
  fftw_complex* c = static_cast<fftw_complex*>(spec_.get());
  std::copy(in, in + grid_.size(), r);
  fftw_execute_dft_r2c(static_cast<fftw_plan>(r2c_), r, c);
  const cplx* src = reinterpret_cast<const cplx*>(c);
  std::copy(src, src + grid_.half_size(), out);
}

void Fft::backward(const cplx* in, double* out) const {
  double* r = static_cast<double*>(real_.get());
  fftw_complex* c = static_cast<fftw_complex*>(spec_.get());
  std::copy(in, in + grid_.half_size(), reinterpret_cast<cplx*>(c));
  fftw_execute_dft_c2r(static_cast<fftw_plan>(c2r_), c, r);
  std::copy(r, r + grid_.size(), out);
}

const ModeTable& mode_table(const Grid& grid) {
  static std::map<std::pair<int, int>, std::unique_ptr<ModeTable>> cache;
  std::lock_guard<std::mutex> lock(cache_mutex());
  auto key = std::make_pair(grid.dim, grid.n);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_unique<ModeTable>(build_table(grid))).first;
  return *it->second;
}

SpectralCoeffs half_to_full(const Grid& grid, const std::vector<cplx>& half) {
  const ModeTable& t = mode_table(grid);
  SpectralCoeffs out = SpectralCoeffs::zeros(grid);
  const double inv_n = 1.0 / static_cast<double>(grid.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const cplx v = half[i] * (t.sign[i] * inv_n);
    const Wavevector k{t.kx[i], t.ky[i], t.kz[i]};
    out.at(k) = v;
    out.at(Wavevector{-k[0], -k[1], -k[2]}) = std::conj(v);
  }
  // self-conjugate modes were written twice; the forward transform of a real
  // field makes both writes agree, so rewrite them from the half value
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t.weight[i] == 1.0) {
      out.at(Wavevector{t.kx[i], t.ky[i], t.kz[i]}) = half[i] * (t.sign[i] * inv_n);
    }
  }
  return out;
}

std::vector<cplx> full_to_half(const SpectralCoeffs& c) {
  const ModeTable& t = mode_table(c.grid);
  std::vector<cplx> half(t.size());
  const double nn = static_cast<double>(c.grid.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    half[i] = c.at(Wavevector{t.kx[i], t.ky[i], t.kz[i]}) * (t.sign[i] * nn);
  }
  return half;
}

}  // namespace ksmix::detail
