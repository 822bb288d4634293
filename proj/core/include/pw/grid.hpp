#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include "pw/errors.hpp"

namespace pw {

using cplx = std::complex<double>;

enum class Boundary { Periodic, HardWall };
enum class DerivMethod { FiniteDifference, Spectral };

// Uniform 1D/2D lattice. Sites are at x_i = i*dx on each axis; all functional
// sums carry the cell volume dx^d so lattice sums converge to integrals.
class GridSpec {
  public:
    GridSpec(int dimension, std::array<int, 2> points, std::array<double, 2> lengths,
             Boundary bc = Boundary::Periodic);

    static GridSpec line(int n, double length, Boundary bc = Boundary::Periodic) {
        return GridSpec(1, {n, 1}, {length, 0.0}, bc);
    }
    static GridSpec plane(int nx, int ny, double lx, double ly,
                          Boundary bc = Boundary::Periodic) {
        return GridSpec(2, {nx, ny}, {lx, ly}, bc);
    }

    int dimension() const { return dim_; }
    int points(int axis) const { return n_[axis]; }
    double length(int axis) const { return len_[axis]; }
    double dx(int axis) const { return len_[axis] / n_[axis]; }
    Boundary boundary() const { return bc_; }

    std::size_t size() const { return total_; }
    // Lattice measure dx^d; the lattice delta is delta_ij / cell_volume().
    double cell_volume() const;

    double coord(int axis, int index) const { return index * dx(axis); }
    std::size_t index(int ix, int iy = 0) const {
        return static_cast<std::size_t>(ix) * (dim_ == 2 ? n_[1] : 1) + iy;
    }

    bool operator==(const GridSpec& o) const {
        return dim_ == o.dim_ && n_ == o.n_ && len_ == o.len_ && bc_ == o.bc_;
    }
    bool operator!=(const GridSpec& o) const { return !(*this == o); }

  private:
    int dim_;
    std::array<int, 2> n_;
    std::array<double, 2> len_;
    Boundary bc_;
    std::size_t total_;
};

// Complex values on a lattice; houses psi, psi*, Pi_psi, Pi_psi*.
class ComplexLatticeField {
  public:
    explicit ComplexLatticeField(GridSpec grid, cplx fill = cplx{0.0, 0.0});
    ComplexLatticeField(GridSpec grid, std::vector<cplx> values);

    // Sample a function of position (1D: f(x), 2D: f(x, y) with y passed 0 in 1D).
    static ComplexLatticeField sampled(const GridSpec& grid,
                                       const std::function<cplx(double, double)>& f);

    const GridSpec& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    cplx& operator[](std::size_t i) { return values_[i]; }
    const cplx& operator[](std::size_t i) const { return values_[i]; }
    cplx& at(int ix, int iy = 0) { return values_[grid_.index(ix, iy)]; }
    const cplx& at(int ix, int iy = 0) const { return values_[grid_.index(ix, iy)]; }
    std::vector<cplx>& values() { return values_; }
    const std::vector<cplx>& values() const { return values_; }

    bool all_finite() const;
    double norm() const;           // sqrt(inner_product(f, f).real())
    void scale(cplx factor);
    ComplexLatticeField conjugated() const;

    ComplexLatticeField& operator+=(const ComplexLatticeField& o);
    ComplexLatticeField& operator-=(const ComplexLatticeField& o);
    friend ComplexLatticeField operator+(ComplexLatticeField a, const ComplexLatticeField& b) {
        return a += b;
    }
    friend ComplexLatticeField operator-(ComplexLatticeField a, const ComplexLatticeField& b) {
        return a -= b;
    }
    friend ComplexLatticeField operator*(cplx c, ComplexLatticeField f) {
        f.scale(c);
        return f;
    }

  private:
    GridSpec grid_;
    std::vector<cplx> values_;
};

// sum_i conj(f_i) g_i dx^d
cplx inner_product(const ComplexLatticeField& f, const ComplexLatticeField& g);

ComplexLatticeField laplacian(const ComplexLatticeField& f,
                              DerivMethod method = DerivMethod::FiniteDifference);
std::vector<ComplexLatticeField> gradient(const ComplexLatticeField& f,
                                          DerivMethod method = DerivMethod::FiniteDifference);

// Forward/backward DFT of the field values (unnormalized forward, 1/N backward).
std::vector<cplx> fft(const GridSpec& grid, const std::vector<cplx>& in, int sign);

// Wavenumber of FFT bin j on the given axis (2*pi*j/L, folded to negative
// frequencies above N/2).
double fft_wavenumber(const GridSpec& grid, int axis, int bin);

// |c_k|^2 scaled so their sum equals inner_product(f, f); periodic grids only.
std::vector<double> power_spectrum(const ComplexLatticeField& f);

}  // namespace pw
