#include "pw/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

namespace pw {

GridSpec::GridSpec(int dimension, std::array<int, 2> points, std::array<double, 2> lengths,
                   Boundary bc)
    : dim_(dimension), n_(points), len_(lengths), bc_(bc) {
    if (dim_ != 1 && dim_ != 2) throw ConfigError("GridSpec: dimension must be 1 or 2");
    total_ = 1;
    for (int a = 0; a < dim_; ++a) {
        if (n_[a] < 8) throw ConfigError("GridSpec: need at least 8 points per axis");
        if (len_[a] <= 0.0) throw ConfigError("GridSpec: box length must be positive");
        total_ *= static_cast<std::size_t>(n_[a]);
    }
}

double GridSpec::cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < dim_; ++a) v *= dx(a);
    return v;
}

ComplexLatticeField::ComplexLatticeField(GridSpec grid, cplx fill)
    : grid_(grid), values_(grid.size(), fill) {}

ComplexLatticeField::ComplexLatticeField(GridSpec grid, std::vector<cplx> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size())
        throw ShapeError("ComplexLatticeField: value count does not match grid");
}

ComplexLatticeField ComplexLatticeField::sampled(const GridSpec& grid,
                                                 const std::function<cplx(double, double)>& f) {
    ComplexLatticeField out(grid);
    if (grid.dimension() == 1) {
        for (int i = 0; i < grid.points(0); ++i) out.at(i) = f(grid.coord(0, i), 0.0);
    } else {
        for (int ix = 0; ix < grid.points(0); ++ix)
            for (int iy = 0; iy < grid.points(1); ++iy)
                out.at(ix, iy) = f(grid.coord(0, ix), grid.coord(1, iy));
    }
    return out;
}

bool ComplexLatticeField::all_finite() const {
    for (const auto& v : values_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

double ComplexLatticeField::norm() const {
    double s = 0.0;
    for (const auto& v : values_) s += std::norm(v);
    return std::sqrt(s * grid_.cell_volume());
}

void ComplexLatticeField::scale(cplx factor) {
    for (auto& v : values_) v *= factor;
}

ComplexLatticeField ComplexLatticeField::conjugated() const {
    ComplexLatticeField out(grid_);
    for (std::size_t i = 0; i < values_.size(); ++i) out[i] = std::conj(values_[i]);
    return out;
}

ComplexLatticeField& ComplexLatticeField::operator+=(const ComplexLatticeField& o) {
    if (grid_ != o.grid_) throw ShapeError("field +=: mismatched grids");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
}

ComplexLatticeField& ComplexLatticeField::operator-=(const ComplexLatticeField& o) {
    if (grid_ != o.grid_) throw ShapeError("field -=: mismatched grids");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
}

cplx inner_product(const ComplexLatticeField& f, const ComplexLatticeField& g) {
    if (f.grid() != g.grid()) throw ShapeError("inner_product: mismatched grids");
    cplx s{0.0, 0.0};
    for (std::size_t i = 0; i < f.size(); ++i) s += std::conj(f[i]) * g[i];
    return s * f.grid().cell_volume();
}

namespace {

// FFTW planning is not thread-safe; execution of a plan on its own arrays is.
std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

void run_fft(std::vector<cplx>& data, int n0, int n1, int sign) {
    fftw_plan plan;
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        if (n1 <= 1)
            plan = fftw_plan_dft_1d(n0, ptr, ptr, sign, FFTW_ESTIMATE);
        else
            plan = fftw_plan_dft_2d(n0, n1, ptr, ptr, sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_destroy_plan(plan);
    }
}

}  // namespace

std::vector<cplx> fft(const GridSpec& grid, const std::vector<cplx>& in, int sign) {
    std::vector<cplx> out = in;
    int n0 = grid.points(0);
    int n1 = grid.dimension() == 2 ? grid.points(1) : 1;
    run_fft(out, n0, n1, sign);
    if (sign == +1) {
        double inv = 1.0 / static_cast<double>(grid.size());
        for (auto& v : out) v *= inv;
    }
    return out;
}

double fft_wavenumber(const GridSpec& grid, int axis, int bin) {
    int n = grid.points(axis);
    int j = bin <= n / 2 ? bin : bin - n;
    return 2.0 * std::numbers::pi * j / grid.length(axis);
}

std::vector<double> power_spectrum(const ComplexLatticeField& f) {
    const GridSpec& g = f.grid();
    if (g.boundary() != Boundary::Periodic)
        throw ConfigError("power_spectrum: periodic grid required");
    auto coeffs = fft(g, f.values(), +1);
    // inner_product(f,f) = sum_i |f_i|^2 dV = N dV sum_k |c_k|^2 with c_k = (1/N) DFT.
    double scale = static_cast<double>(g.size()) * g.cell_volume();
    std::vector<double> out(coeffs.size());
    for (std::size_t k = 0; k < coeffs.size(); ++k) out[k] = std::norm(coeffs[k]) * scale;
    return out;
}

namespace {

ComplexLatticeField spectral_apply(const ComplexLatticeField& f,
                                   const std::function<cplx(double, double)>& symbol) {
    const GridSpec& g = f.grid();
    if (g.boundary() != Boundary::Periodic)
        throw ConfigError("spectral derivative requires a periodic grid");
    auto coeffs = fft(g, f.values(), -1);
    if (g.dimension() == 1) {
        for (int j = 0; j < g.points(0); ++j) coeffs[j] *= symbol(fft_wavenumber(g, 0, j), 0.0);
    } else {
        for (int jx = 0; jx < g.points(0); ++jx)
            for (int jy = 0; jy < g.points(1); ++jy)
                coeffs[g.index(jx, jy)] *=
                    symbol(fft_wavenumber(g, 0, jx), fft_wavenumber(g, 1, jy));
    }
    // the -1 transform is unnormalized and +1 divides by N, so the round trip
    // is exact
    auto vals = fft(g, coeffs, +1);
    return ComplexLatticeField(g, std::move(vals));
}

// Value of f at (ix+sx, iy+sy) honoring the boundary (zero ghost cells for
// hard walls).
cplx shifted(const ComplexLatticeField& f, int ix, int iy, int sx, int sy) {
    const GridSpec& g = f.grid();
    int nx = g.points(0);
    int ny = g.dimension() == 2 ? g.points(1) : 1;
    int jx = ix + sx, jy = iy + sy;
    if (g.boundary() == Boundary::Periodic) {
        jx = (jx % nx + nx) % nx;
        jy = (jy % ny + ny) % ny;
    } else {
        if (jx < 0 || jx >= nx || jy < 0 || jy >= ny) return cplx{0.0, 0.0};
    }
    return g.dimension() == 1 ? f.at(jx) : f.at(jx, jy);
}

}  // namespace

ComplexLatticeField laplacian(const ComplexLatticeField& f, DerivMethod method) {
    const GridSpec& g = f.grid();
    if (method == DerivMethod::Spectral)
        return spectral_apply(f, [](double kx, double ky) { return cplx{-(kx * kx + ky * ky), 0.0}; });

    ComplexLatticeField out(g);
    if (g.dimension() == 1) {
        double inv = 1.0 / (g.dx(0) * g.dx(0));
        for (int i = 0; i < g.points(0); ++i)
            out.at(i) = (shifted(f, i, 0, -1, 0) - 2.0 * f.at(i) + shifted(f, i, 0, 1, 0)) * inv;
    } else {
        double ivx = 1.0 / (g.dx(0) * g.dx(0));
        double ivy = 1.0 / (g.dx(1) * g.dx(1));
        for (int ix = 0; ix < g.points(0); ++ix)
            for (int iy = 0; iy < g.points(1); ++iy)
                out.at(ix, iy) =
                    (shifted(f, ix, iy, -1, 0) - 2.0 * f.at(ix, iy) + shifted(f, ix, iy, 1, 0)) * ivx +
                    (shifted(f, ix, iy, 0, -1) - 2.0 * f.at(ix, iy) + shifted(f, ix, iy, 0, 1)) * ivy;
    }
    return out;
}

std::vector<ComplexLatticeField> gradient(const ComplexLatticeField& f, DerivMethod method) {
    const GridSpec& g = f.grid();
    std::vector<ComplexLatticeField> out;
    if (method == DerivMethod::Spectral) {
        // Nyquist derivative coefficient set to zero (odd-order derivative of
        // the unpaired mode).
        for (int a = 0; a < g.dimension(); ++a) {
            int n = g.points(a);
            out.push_back(spectral_apply(f, [a, n, &g](double kx, double ky) {
                double k = a == 0 ? kx : ky;
                double knyq = 2.0 * std::numbers::pi * (n / 2) / g.length(a);
                if (n % 2 == 0 && std::abs(std::abs(k) - knyq) < 1e-12 * knyq + 1e-300)
                    return cplx{0.0, 0.0};
                return cplx{0.0, k};
            }));
        }
        return out;
    }
    for (int a = 0; a < g.dimension(); ++a) {
        ComplexLatticeField d(g);
        double inv = 1.0 / (2.0 * g.dx(a));
        int sx = a == 0 ? 1 : 0;
        int sy = a == 1 ? 1 : 0;
        if (g.dimension() == 1) {
            for (int i = 0; i < g.points(0); ++i)
                d.at(i) = (shifted(f, i, 0, 1, 0) - shifted(f, i, 0, -1, 0)) * inv;
        } else {
            for (int ix = 0; ix < g.points(0); ++ix)
                for (int iy = 0; iy < g.points(1); ++iy)
                    d.at(ix, iy) =
                        (shifted(f, ix, iy, sx, sy) - shifted(f, ix, iy, -sx, -sy)) * inv;
        }
        out.push_back(std::move(d));
    }
    return out;
}

}  // namespace pw
