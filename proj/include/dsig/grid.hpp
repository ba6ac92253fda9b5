#ifndef DSIG_GRID_HPP
#define DSIG_GRID_HPP

// Periodic sampling grids on [-L, L)^n, n ∈ {1, 2, 3}, with unitary
// discrete Fourier transforms and spectral operators. Samples are stored
// row-major, axis 0 slowest.

#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace dsig {

using cplx = std::complex<double>;

struct GridSpec {
    int n = 1;
    int points = 512;
    double half_length = 20.0;

    double spacing() const noexcept { return 2.0 * half_length / points; }
    std::size_t size() const noexcept;
    /// Throws InvalidArgument unless n ∈ {1,2,3}, points is a power of two ≥ 16
    /// and half_length > 0.
    void validate() const;

    /// 512 points in 1-d, 256² in 2-d, 64³ in 3-d.
    static GridSpec defaults(int n, double half_length = 20.0);
};

struct FieldState {
    GridSpec grid;
    std::vector<double> u;
    std::vector<double> ut;
    double time = 0.0;

    /// Zero-initialized state on `g`.
    static FieldState zeros(const GridSpec& g);
    void check_shape() const;
};

namespace grid {

enum class Direction { Forward, Inverse };

/// Unitary DFT: both directions carry N^{-n/2}.
std::vector<cplx> transform(std::span<const cplx> samples, Direction dir, const GridSpec& g);

std::vector<cplx> forward(std::span<const double> samples, const GridSpec& g);
/// Inverse transform keeping the real part.
std::vector<double> inverse_real(std::span<const cplx> spectrum, const GridSpec& g);

/// Physical coordinate of sample index j along one axis: −L + j·dx.
double coordinate(const GridSpec& g, int j);
/// Signed integer wavenumber of index j: j for j < N/2, j − N otherwise.
int wavenumber(const GridSpec& g, int j);
/// |ξ| at every spectral index, with ξ_i = π k_i / L.
std::vector<double> frequency_magnitudes(const GridSpec& g);
/// max_i |k_i| at every spectral index.
std::vector<int> max_abs_wavenumber(const GridSpec& g);

/// Samples f(x) with x the coordinate vector (length n) of each point.
std::vector<double> sample(const GridSpec& g, const std::function<double(std::span<const double>)>& f);

/// Multiplies the spectrum by m(|ξ|) and returns the real part of the result.
std::vector<double> apply_radial_multiplier(std::span<const double> field, const GridSpec& g,
                                            const std::function<double(double)>& m);

/// |D|^s: symbol |ξ|^s, zero at ξ = 0 for s > 0. Negative s is admitted
/// (the zero mode is dropped) for the |D|^{s−2σ2} channel.
std::vector<double> riesz_apply(std::span<const double> field, double s, const GridSpec& g);

/// ⟨D⟩^s with symbol (1 + |ξ|²)^{s/2}.
std::vector<double> bessel_potential_apply(std::span<const double> field, double s, const GridSpec& g);

/// (Σ |u|^q dx^n)^{1/q}; q = ∞ gives max |u|.
double lq_norm_grid(std::span<const double> field, double q, const GridSpec& g);

/// ‖⟨D⟩^s u‖_{L^q}.
double sobolev_norm(std::span<const double> field, double s, double q, const GridSpec& g);

/// CSV with columns x[,y[,z]],u,ut.
void write_field_csv(std::ostream& os, const FieldState& state);

}  // namespace grid
}  // namespace dsig

#endif
