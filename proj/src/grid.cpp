#include "bihartree/grid.hpp"

#include <fftw3.h>

#include <atomic>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "bihartree/error.hpp"

namespace bihartree {

namespace {

std::atomic<int> g_threads{1};
std::mutex g_planner_mutex;  // FFTW's planner is not re-entrant
std::once_flag g_fftw_threads_init;

}  // namespace

void set_thread_count(int n) { g_threads.store(n < 1 ? 1 : n); }
int thread_count() { return g_threads.load(); }

struct TorusGrid::Plans {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;

  Plans(int d, int M) {
    std::call_once(g_fftw_threads_init, [] { fftw_init_threads(); });
    std::lock_guard lock(g_planner_mutex);
    int n[3] = {M, M, M};
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(M);
    auto* buf = fftw_alloc_complex(total);
    fftw_plan_with_nthreads(thread_count());
    // ESTIMATE keeps the chosen algorithm, hence the rounding, reproducible.
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward = fftw_plan_dft(d, n, buf, buf, FFTW_FORWARD, flags);
    inverse = fftw_plan_dft(d, n, buf, buf, FFTW_BACKWARD, flags);
    fftw_free(buf);
    if (!forward || !inverse) throw NumericalError("FFTW planning failed");
  }
  ~Plans() {
    std::lock_guard lock(g_planner_mutex);
    fftw_destroy_plan(forward);
    fftw_destroy_plan(inverse);
  }
};

TorusGrid::TorusGrid(int d, double L, int M)
    : d_(d), L_(L), M_(M), h_(L / M), size_(1), cell_volume_(1.0) {
  for (int i = 0; i < d; ++i) {
    size_ *= static_cast<std::size_t>(M);
    cell_volume_ *= h_;
  }
  coords_.resize(M);
  wavenumbers_.resize(M);
  for (int j = 0; j < M; ++j) {
    coords_[j] = -0.5 * L + j * h_;
    wavenumbers_[j] = 2.0 * std::numbers::pi * axis_mode(j) / L;
  }
  plans_ = std::make_unique<Plans>(d, M);
}

TorusGrid::~TorusGrid() = default;

std::array<int, 3> TorusGrid::unravel(std::size_t flat) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = d_ - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % M_);
    flat /= M_;
  }
  return idx;
}

std::size_t TorusGrid::ravel(const std::array<int, 3>& idx) const {
  std::size_t flat = 0;
  for (int a = 0; a < d_; ++a) flat = flat * M_ + static_cast<std::size_t>(idx[a]);
  return flat;
}

void TorusGrid::transform_in_place(std::span<cplx> data, Direction dir) const {
  if (data.size() != size_) throw ParameterError("transform: array length does not match grid");
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(dir == Direction::forward ? plans_->forward : plans_->inverse, ptr, ptr);
  const double scale = 1.0 / std::sqrt(static_cast<double>(size_));
  for (auto& z : data) z *= scale;
}

GridPtr make_grid(int d, double L, int M) {
  if (d < 1 || d > 3) throw ParameterError("grid dimension d must be 1, 2 or 3 (got " + std::to_string(d) + ")");
  if (M < 8 || M % 2 != 0) throw ParameterError("points per axis M must be even and >= 8 (got " + std::to_string(M) + ")");
  if (!(L > 0.0) || !std::isfinite(L)) throw ParameterError("box length L must be positive");
  return std::make_shared<const TorusGrid>(d, L, M);
}

ComplexField::ComplexField(GridPtr grid) : grid_(std::move(grid)), values_(grid_->size()) {}

ComplexField::ComplexField(GridPtr grid, std::vector<cplx> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_->size()) throw ParameterError("field values do not match grid size");
}

bool ComplexField::is_finite() const {
  for (const auto& z : values_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

void require_same_grid(const TorusGrid& grid, const ComplexField& u) {
  if (!grid.same_shape(u.grid())) throw ParameterError("field shape does not match grid");
}

ComplexField transform(const ComplexField& u, Direction dir) {
  ComplexField out = u;
  u.grid().transform_in_place(out.values(), dir);
  return out;
}

ComplexField multiply_spectrum(const ComplexField& uhat, std::span<const double> m) {
  if (m.size() != uhat.size()) throw ParameterError("multiplier shape does not match spectrum");
  ComplexField out = uhat;
  auto v = out.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= m[i];
  uhat.grid().transform_in_place(v, Direction::inverse);
  return out;
}

ComplexField apply_multiplier(const ComplexField& u, std::span<const double> m) {
  return multiply_spectrum(transform(u, Direction::forward), m);
}

ComplexField differentiate_spectrum(const ComplexField& uhat, const std::array<int, 3>& orders) {
  const auto& g = uhat.grid();
  const int M = g.points();
  const auto k = g.axis_wavenumbers();
  // Per-axis symbol tables (i k)^o.
  std::array<std::vector<cplx>, 3> sym;
  for (int a = 0; a < 3; ++a) {
    sym[a].assign(M, cplx(1.0, 0.0));
    if (a >= g.dim() || orders[a] == 0) continue;
    for (int j = 0; j < M; ++j) {
      if (orders[a] % 2 == 1 && j == M / 2) {
        sym[a][j] = 0.0;
        continue;
      }
      cplx s(1.0, 0.0);
      for (int o = 0; o < orders[a]; ++o) s *= cplx(0.0, k[j]);
      sym[a][j] = s;
    }
  }
  ComplexField out = uhat;
  auto v = out.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto idx = g.unravel(i);
    v[i] *= sym[0][idx[0]] * sym[1][idx[1]] * sym[2][idx[2]];
  }
  g.transform_in_place(v, Direction::inverse);
  return out;
}

cplx inner(const ComplexField& u, const ComplexField& v) {
  if (u.size() != v.size()) throw ParameterError("inner: shape mismatch");
  cplx acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += std::conj(u[i]) * v[i];
  return acc * u.grid().cell_volume();
}

double norm_squared(const ComplexField& u) {
  double acc = 0.0;
  for (const auto& z : u.values()) acc += std::norm(z);
  return acc * u.grid().cell_volume();
}

double norm(const ComplexField& u) { return std::sqrt(norm_squared(u)); }

RealArray radius(const TorusGrid& grid) {
  RealArray r(grid.size());
  const auto x = grid.axis_coords();
  for (std::size_t i = 0; i < r.size(); ++i) {
    const auto idx = grid.unravel(i);
    double s = 0.0;
    for (int a = 0; a < grid.dim(); ++a) s += x[idx[a]] * x[idx[a]];
    r[i] = std::sqrt(s);
  }
  return r;
}

RealArray wavenumber_squared(const TorusGrid& grid) {
  RealArray k2(grid.size());
  const auto k = grid.axis_wavenumbers();
  for (std::size_t i = 0; i < k2.size(); ++i) {
    const auto idx = grid.unravel(i);
    double s = 0.0;
    for (int a = 0; a < grid.dim(); ++a) s += k[idx[a]] * k[idx[a]];
    k2[i] = s;
  }
  return k2;
}

}  // namespace bihartree
