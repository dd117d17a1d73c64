#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace bihartree {

using cplx = std::complex<double>;
using RealArray = std::vector<double>;

enum class Direction { forward, inverse };

/// Bounds the number of threads FFTW may use for transforms planned after
/// the call. Results are deterministic for a fixed count.
void set_thread_count(int n);
int thread_count();

/// Uniform periodic box [−L/2, L/2)^d with M points per axis.
///
/// Layout is axis-major (axis 0 slowest). Real-space samples sit at
/// x_j = −L/2 + j h. Spectral index j carries the signed mode
/// m = j for j < M/2 and m = j − M otherwise, so k = 2π m / L runs over
/// {−M/2, …, M/2−1} with negative frequencies in the upper half.
class TorusGrid {
 public:
  TorusGrid(int d, double L, int M);
  ~TorusGrid();
  TorusGrid(const TorusGrid&) = delete;
  TorusGrid& operator=(const TorusGrid&) = delete;

  int dim() const { return d_; }
  double length() const { return L_; }
  int points() const { return M_; }
  double spacing() const { return h_; }
  std::size_t size() const { return size_; }
  double cell_volume() const { return cell_volume_; }
  /// Bytes held by one complex field on this grid.
  std::size_t field_bytes() const { return size_ * sizeof(cplx); }

  std::span<const double> axis_coords() const { return coords_; }
  std::span<const double> axis_wavenumbers() const { return wavenumbers_; }
  int axis_mode(int j) const { return j < M_ / 2 ? j : j - M_; }

  /// Per-axis indices of a flat index (unused trailing axes are 0).
  std::array<int, 3> unravel(std::size_t flat) const;
  std::size_t ravel(const std::array<int, 3>& idx) const;

  /// Unitary DFT in place on `data` (length size()).
  void transform_in_place(std::span<cplx> data, Direction dir) const;

  bool same_shape(const TorusGrid& other) const {
    return d_ == other.d_ && M_ == other.M_ && L_ == other.L_;
  }

 private:
  struct Plans;
  int d_;
  double L_;
  int M_;
  double h_;
  std::size_t size_;
  double cell_volume_;
  std::vector<double> coords_;
  std::vector<double> wavenumbers_;
  std::unique_ptr<Plans> plans_;
};

using GridPtr = std::shared_ptr<const TorusGrid>;

/// Validates (d in {1,2,3}, M even >= 8, L > 0) and builds the grid.
GridPtr make_grid(int d, double L, int M);

/// Complex grid function. Holds either real-space samples or spectral
/// coefficients; the producing call documents which.
class ComplexField {
 public:
  explicit ComplexField(GridPtr grid);
  ComplexField(GridPtr grid, std::vector<cplx> values);

  const TorusGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }

  std::span<cplx> values() { return values_; }
  std::span<const cplx> values() const { return values_; }
  std::vector<cplx>& data() { return values_; }
  const std::vector<cplx>& data() const { return values_; }
  std::size_t size() const { return values_.size(); }
  cplx& operator[](std::size_t i) { return values_[i]; }
  const cplx& operator[](std::size_t i) const { return values_[i]; }

  bool is_finite() const;

 private:
  GridPtr grid_;
  std::vector<cplx> values_;
};

/// Throws ParameterError unless `u` lives on a grid shaped like `grid`.
void require_same_grid(const TorusGrid& grid, const ComplexField& u);

ComplexField transform(const ComplexField& u, Direction dir);

/// inverse(m · forward(u)) for a real multiplier in spectral layout.
ComplexField apply_multiplier(const ComplexField& u, std::span<const double> m);

/// inverse(m · uhat) where `uhat` already holds spectral coefficients.
ComplexField multiply_spectrum(const ComplexField& uhat, std::span<const double> m);

/// Mixed partial derivative ∂^{orders} of the field whose spectrum is
/// `uhat`, returned in real space. Odd orders zero the Nyquist mode of that
/// axis so real data stays real.
ComplexField differentiate_spectrum(const ComplexField& uhat, const std::array<int, 3>& orders);

/// Quadrature inner product h^d Σ conj(u) v.
cplx inner(const ComplexField& u, const ComplexField& v);
/// Quadrature norm squared h^d Σ |u|².
double norm_squared(const ComplexField& u);
double norm(const ComplexField& u);

/// Per-point |x| (sample coordinates, already minimal images).
RealArray radius(const TorusGrid& grid);
/// Per-point |k|² in spectral layout.
RealArray wavenumber_squared(const TorusGrid& grid);

}  // namespace bihartree
