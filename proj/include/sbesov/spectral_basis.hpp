#pragma once

// Eigenbasis of the Stokes operator on the unit disk with the free (Neumann-type)
// boundary conditions u.nu = 0, curl u = 0, and the transforms between spectral
// coefficients and values on a polar quadrature grid.
//
// Every mode is u = grad-perp(psi) / velocity_norm with psi = J_n(j_{n,k} r) cos(n theta)
// or sin(n theta). Writing Z_m = J_m(kappa r) e^{i m theta}, the Cartesian
// derivatives act as ladder operators,
//
//   d_x Z_m = kappa/2 (Z_{m-1} - Z_{m+1}),   d_y Z_m = i kappa/2 (Z_{m-1} + Z_{m+1}),
//
// so velocities, gradients, the stream function and the curl of a mode are all
// real parts of short sums over Z_{n-2} .. Z_{n+2}. Those five-term "pieces" drive
// every transform below: radial tables of J_{n-2..n+2}(kappa r_i) times angular
// Fourier sums. Nothing divides by r, so the origin needs no special treatment.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "sbesov/errors.hpp"
#include "sbesov/specfun.hpp"

namespace sbesov {

enum class Parity { cosine, sine };

inline const char* to_string(Parity p) { return p == Parity::cosine ? "cos" : "sin"; }

struct EigenMode {
  int n = 0;
  Parity parity = Parity::cosine;
  int k = 1;
  double zero = 0.0;           // j_{n,k}: the radial wave number of the mode shape
  double lambda = 0.0;         // eigenvalue of A (= zero^2 for a built basis)
  double stream_norm = 0.0;    // L2 norm of psi
  double velocity_norm = 0.0;  // L2 norm of grad-perp(psi)
};

/// Distinct (n, k) radial profiles; cosine and sine modes share one.
struct RadialProfile {
  int n = 0;
  int k = 1;
  double zero = 0.0;
};

class Basis {
 public:
  Basis(int n_max, int k_max, std::vector<EigenMode> modes) : n_max_(n_max), k_max_(k_max), modes_(std::move(modes)) {
    for (const auto& m : modes_) {
      if (!(m.lambda > 0.0) || !std::isfinite(m.lambda) || !(m.zero > 0.0) || !(m.velocity_norm > 0.0)) {
        throw ArgumentError("basis modes need positive finite lambda, zero and norms");
      }
      if (m.n < 0 || m.k < 1 || (m.n == 0 && m.parity == Parity::sine)) {
        throw ArgumentError("invalid mode indices");
      }
    }
    std::stable_sort(modes_.begin(), modes_.end(), [](const EigenMode& a, const EigenMode& b) {
      return std::tie(a.lambda, a.n, a.parity, a.k) < std::tie(b.lambda, b.n, b.parity, b.k);
    });
    mode_profile_.reserve(modes_.size());
    for (const auto& m : modes_) {
      std::size_t idx = profiles_.size();
      for (std::size_t p = 0; p < profiles_.size(); ++p) {
        if (profiles_[p].n == m.n && profiles_[p].k == m.k) {
          idx = p;
          break;
        }
      }
      if (idx == profiles_.size()) profiles_.push_back({m.n, m.k, m.zero});
      mode_profile_.push_back(idx);
      max_angular_ = std::max(max_angular_, m.n);
    }
  }

  const std::vector<EigenMode>& modes() const { return modes_; }
  const EigenMode& mode(std::size_t i) const { return modes_[i]; }
  std::size_t size() const { return modes_.size(); }
  bool empty() const { return modes_.empty(); }
  int n_max() const { return n_max_; }
  int k_max() const { return k_max_; }
  int max_angular() const { return max_angular_; }
  double lambda_min() const { return modes_.empty() ? 0.0 : modes_.front().lambda; }
  double lambda_max() const { return modes_.empty() ? 0.0 : modes_.back().lambda; }

  const std::vector<RadialProfile>& profiles() const { return profiles_; }
  std::size_t profile_of(std::size_t mode) const { return mode_profile_[mode]; }

  std::optional<std::size_t> find(int n, Parity parity, int k) const {
    for (std::size_t i = 0; i < modes_.size(); ++i) {
      if (modes_[i].n == n && modes_[i].parity == parity && modes_[i].k == k) return i;
    }
    return std::nullopt;
  }

  friend bool operator==(const Basis& a, const Basis& b) {
    if (a.modes_.size() != b.modes_.size()) return false;
    for (std::size_t i = 0; i < a.modes_.size(); ++i) {
      const auto& x = a.modes_[i];
      const auto& y = b.modes_[i];
      if (x.n != y.n || x.parity != y.parity || x.k != y.k || x.lambda != y.lambda ||
          x.stream_norm != y.stream_norm || x.zero != y.zero) {
        return false;
      }
    }
    return true;
  }

 private:
  int n_max_;
  int k_max_;
  int max_angular_ = 0;
  std::vector<EigenMode> modes_;
  std::vector<RadialProfile> profiles_;
  std::vector<std::size_t> mode_profile_;
};

using BasisPtr = std::shared_ptr<const Basis>;

/// Closed-form mode normalization: ||psi||^2 = (2 pi or pi) * J_{n+1}(j_{n,k})^2 / 2.
inline EigenMode make_mode(int n, Parity parity, int k, double zero) {
  const double jn1 = bessel_j(n + 1, zero);
  const double angular = (n == 0) ? 2.0 * std::numbers::pi : std::numbers::pi;
  EigenMode m;
  m.n = n;
  m.parity = parity;
  m.k = k;
  m.zero = zero;
  m.lambda = zero * zero;
  m.stream_norm = std::sqrt(angular * 0.5 * jn1 * jn1);
  m.velocity_norm = zero * m.stream_norm;
  return m;
}

/// All modes with n <= n_max, k <= k_max (cosine and sine for n >= 1), ascending lambda.
inline BasisPtr build_basis(int n_max, int k_max) {
  if (n_max < 1 || n_max > 128 || k_max < 1 || k_max > 128) {
    throw ArgumentError("build_basis: need 1 <= n_max, k_max <= 128");
  }
  std::vector<EigenMode> modes;
  modes.reserve(static_cast<std::size_t>(k_max) * (2 * n_max + 1));
  for (int n = 0; n <= n_max; ++n) {
    const auto zeros = bessel_zeros(n, k_max);
    for (int k = 1; k <= k_max; ++k) {
      const double z = zeros[static_cast<std::size_t>(k - 1)];
      modes.push_back(make_mode(n, Parity::cosine, k, z));
      if (n > 0) modes.push_back(make_mode(n, Parity::sine, k, z));
    }
  }
  return std::make_shared<const Basis>(n_max, k_max, std::move(modes));
}

// ---------------------------------------------------------------------------
// Polar quadrature grid

class PolarGrid {
 public:
  PolarGrid(int radial_order, int angular_count) : radial_rule_(gauss_legendre(radial_order)), angular_(angular_count) {
    if (angular_count < 4 || angular_count % 2 != 0) {
      throw ArgumentError("build_grid: angular_count must be even and >= 4");
    }
    const auto nr = static_cast<std::size_t>(radial_order);
    const auto nt = static_cast<std::size_t>(angular_count);
    radial_weights_.resize(nr);
    for (std::size_t i = 0; i < nr; ++i) radial_weights_[i] = radial_rule_.weights[i] * radial_rule_.nodes[i];
    dtheta_ = 2.0 * std::numbers::pi / angular_count;
    theta_.resize(nt);
    for (std::size_t l = 0; l < nt; ++l) theta_[l] = dtheta_ * static_cast<double>(l);
    weights_.resize(nr * nt);
    x_.resize(nr * nt);
    y_.resize(nr * nt);
    for (std::size_t i = 0; i < nr; ++i) {
      for (std::size_t l = 0; l < nt; ++l) {
        const std::size_t node = i * nt + l;
        weights_[node] = radial_weights_[i] * dtheta_;
        x_[node] = radial_rule_.nodes[i] * std::cos(theta_[l]);
        y_[node] = radial_rule_.nodes[i] * std::sin(theta_[l]);
      }
    }
    // Exactness self-test: the integral of x^2 + y^2 over the disk is pi/2.
    double s = 0.0;
    for (std::size_t node = 0; node < weights_.size(); ++node) s += weights_[node] * (x_[node] * x_[node] + y_[node] * y_[node]);
    self_test_error_ = std::abs(s - 0.5 * std::numbers::pi);
  }

  int radial_count() const { return radial_rule_.order(); }
  int angular_count() const { return angular_; }
  std::size_t size() const { return weights_.size(); }
  const QuadratureRule& radial_rule() const { return radial_rule_; }
  double radius(std::size_t i) const { return radial_rule_.nodes[i]; }
  /// Weight of ring i for the integral of r dr over (0,1).
  double radial_weight(std::size_t i) const { return radial_weights_[i]; }
  double theta(std::size_t l) const { return theta_[l]; }
  double dtheta() const { return dtheta_; }
  const std::vector<double>& weights() const { return weights_; }
  double x(std::size_t node) const { return x_[node]; }
  double y(std::size_t node) const { return y_[node]; }
  /// Largest gap between adjacent radial nodes (including the gaps to 0 and 1).
  double max_radial_spacing() const {
    double gap = radial_rule_.nodes.front();
    for (std::size_t i = 1; i < radial_rule_.nodes.size(); ++i) gap = std::max(gap, radial_rule_.nodes[i] - radial_rule_.nodes[i - 1]);
    return std::max(gap, 1.0 - radial_rule_.nodes.back());
  }
  /// |sum w (x^2 + y^2) - pi/2|, recorded at construction.
  double self_test_error() const { return self_test_error_; }

 private:
  QuadratureRule radial_rule_;
  int angular_;
  double dtheta_ = 0.0;
  std::vector<double> radial_weights_;
  std::vector<double> theta_;
  std::vector<double> weights_;
  std::vector<double> x_;
  std::vector<double> y_;
  double self_test_error_ = 0.0;
};

using GridPtr = std::shared_ptr<const PolarGrid>;

inline GridPtr build_grid(int radial_order, int angular_count) {
  return std::make_shared<const PolarGrid>(radial_order, angular_count);
}

// ---------------------------------------------------------------------------
// Fields

/// A divergence-free field as coefficients over a truncated eigenbasis.
struct SpectralField {
  BasisPtr basis;
  std::vector<double> coeffs;

  SpectralField() = default;
  explicit SpectralField(BasisPtr b) : basis(std::move(b)), coeffs(basis ? basis->size() : 0, 0.0) {}
  SpectralField(BasisPtr b, std::vector<double> c) : basis(std::move(b)), coeffs(std::move(c)) {
    if (!basis || coeffs.size() != basis->size()) throw ArgumentError("coefficient count does not match the basis");
  }

  static SpectralField unit(BasisPtr b, std::size_t mode) {
    SpectralField f(std::move(b));
    f.coeffs.at(mode) = 1.0;
    return f;
  }

  std::size_t size() const { return coeffs.size(); }

  SpectralField& operator+=(const SpectralField& o) {
    check_same(o);
    for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] += o.coeffs[i];
    return *this;
  }
  SpectralField& operator-=(const SpectralField& o) {
    check_same(o);
    for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] -= o.coeffs[i];
    return *this;
  }
  SpectralField& operator*=(double s) {
    for (double& c : coeffs) c *= s;
    return *this;
  }
  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }
  friend SpectralField operator*(SpectralField a, double s) { return a *= s; }

 private:
  void check_same(const SpectralField& o) const {
    if (o.coeffs.size() != coeffs.size() || (basis && o.basis && basis != o.basis && !(*basis == *o.basis))) {
      throw ArgumentError("fields live on different bases");
    }
  }
};

/// Exact L2 norm of a spectral field (the modes are orthonormal).
inline double coefficient_l2(const SpectralField& f) {
  double s = 0.0;
  for (double c : f.coeffs) s += c * c;
  return std::sqrt(s);
}

inline double coefficient_dot(const SpectralField& f, const SpectralField& g) {
  if (f.size() != g.size()) throw ArgumentError("fields live on different bases");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f.coeffs[i] * g.coeffs[i];
  return s;
}

/// Velocity samples (Cartesian components) on a polar grid; node = ring * angular_count + angle.
struct GridVectorField {
  GridPtr grid;
  std::vector<double> ux;
  std::vector<double> uy;

  GridVectorField() = default;
  explicit GridVectorField(GridPtr g) : grid(std::move(g)), ux(grid->size(), 0.0), uy(grid->size(), 0.0) {}
};

/// Velocity gradient samples, component(j, k) = d_k u_j.
struct GridTensorField {
  GridPtr grid;
  std::array<std::vector<double>, 4> comp;  // d_x u_x, d_y u_x, d_x u_y, d_y u_y

  GridTensorField() = default;
  explicit GridTensorField(GridPtr g) : grid(std::move(g)) {
    for (auto& c : comp) c.assign(grid->size(), 0.0);
  }
  std::vector<double>& at(int j, int k) { return comp[static_cast<std::size_t>(2 * j + k)]; }
  const std::vector<double>& at(int j, int k) const { return comp[static_cast<std::size_t>(2 * j + k)]; }
};

// ---------------------------------------------------------------------------
// Mode pieces

enum class Quantity { ux, uy, dx_ux, dy_ux, dx_uy, dy_uy, stream, curl };
inline constexpr std::size_t kQuantityCount = 8;

/// Complex amplitudes a_o with quantity = Re sum_o a_o Z_{n-2+o}, o = 0..4.
using Pieces = std::array<std::complex<double>, 5>;

inline Pieces mode_pieces(const EigenMode& m, Quantity q) {
  using namespace std::complex_literals;
  const std::complex<double> beta = (m.parity == Parity::cosine) ? 1.0 + 0.0i : -1.0i;
  const double kap = m.zero;
  const double k1 = 0.5 * kap / m.velocity_norm;
  const double k2 = 0.25 * kap * kap / m.velocity_norm;
  Pieces a{};
  switch (q) {
    case Quantity::ux:
      a[1] = beta * 1.0i * k1;
      a[3] = beta * 1.0i * k1;
      break;
    case Quantity::uy:
      a[1] = -beta * k1;
      a[3] = beta * k1;
      break;
    case Quantity::dx_ux:
      a[0] = beta * 1.0i * k2;
      a[4] = -beta * 1.0i * k2;
      break;
    case Quantity::dy_ux:
      a[0] = -beta * k2;
      a[2] = -2.0 * beta * k2;
      a[4] = -beta * k2;
      break;
    case Quantity::dx_uy:
      a[0] = -beta * k2;
      a[2] = 2.0 * beta * k2;
      a[4] = -beta * k2;
      break;
    case Quantity::dy_uy:
      a[0] = -beta * 1.0i * k2;
      a[4] = beta * 1.0i * k2;
      break;
    case Quantity::stream:
      a[2] = beta / m.velocity_norm;
      break;
    case Quantity::curl:
      a[2] = beta * kap * kap / m.velocity_norm;
      break;
  }
  return a;
}

namespace detail {
inline std::complex<double> angular_factor(int m, double theta) {
  return {std::cos(m * theta), std::sin(m * theta)};
}
}  // namespace detail

/// Values of the listed quantities for every basis mode at one point (x, y).
/// The mode formulas extend analytically past r = 1, which finite-difference
/// stencils at the boundary rely on.
inline std::vector<std::vector<double>> mode_values_at(const Basis& basis, double x, double y, std::span<const Quantity> quantities) {
  const double r = std::hypot(x, y);
  const double theta = std::atan2(y, x);
  std::vector<std::vector<double>> out(quantities.size(), std::vector<double>(basis.size(), 0.0));
  std::vector<std::array<double, 5>> radial(basis.profiles().size());
  for (std::size_t p = 0; p < basis.profiles().size(); ++p) {
    const auto& prof = basis.profiles()[p];
    bessel_j_range(prof.n - 2, prof.n + 2, prof.zero * r, radial[p]);
  }
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto& m = basis.mode(i);
    const auto& jr = radial[basis.profile_of(i)];
    std::array<std::complex<double>, 5> z{};
    for (int o = 0; o < 5; ++o) z[static_cast<std::size_t>(o)] = jr[static_cast<std::size_t>(o)] * detail::angular_factor(m.n - 2 + o, theta);
    for (std::size_t q = 0; q < quantities.size(); ++q) {
      const Pieces a = mode_pieces(m, quantities[q]);
      double v = 0.0;
      for (std::size_t o = 0; o < 5; ++o) v += (a[o] * z[o]).real();
      out[q][i] = v;
    }
  }
  return out;
}

/// One quantity of a spectral field at a point.
inline double evaluate_at(const SpectralField& f, double x, double y, Quantity q) {
  const std::array<Quantity, 1> qs{q};
  const auto vals = mode_values_at(*f.basis, x, y, qs);
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f.coeffs[i] * vals[0][i];
  return s;
}

// ---------------------------------------------------------------------------
// Transforms bound to one (basis, grid) pair

class SpectralTransform {
 public:
  SpectralTransform(BasisPtr basis, GridPtr grid) : basis_(std::move(basis)), grid_(std::move(grid)) {
    if (!basis_ || !grid_) throw ArgumentError("transform needs a basis and a grid");
    nr_ = static_cast<std::size_t>(grid_->radial_count());
    nt_ = static_cast<std::size_t>(grid_->angular_count());
    mmax_ = static_cast<std::size_t>(basis_->max_angular() + 2);
    cos_.assign((mmax_ + 1) * nt_, 0.0);
    sin_.assign((mmax_ + 1) * nt_, 0.0);
    for (std::size_t m = 0; m <= mmax_; ++m) {
      for (std::size_t l = 0; l < nt_; ++l) {
        const double a = static_cast<double>(m) * grid_->theta(l);
        cos_[m * nt_ + l] = std::cos(a);
        sin_[m * nt_ + l] = std::sin(a);
      }
    }
    const auto& profiles = basis_->profiles();
    radial_.assign(profiles.size() * nr_ * 5, 0.0);
    for (std::size_t p = 0; p < profiles.size(); ++p) {
      for (std::size_t i = 0; i < nr_; ++i) {
        bessel_j_range(profiles[p].n - 2, profiles[p].n + 2, profiles[p].zero * grid_->radius(i),
                       std::span<double>(&radial_[(p * nr_ + i) * 5], 5));
      }
    }
    pieces_.resize(basis_->size() * kQuantityCount);
    for (std::size_t i = 0; i < basis_->size(); ++i) {
      for (std::size_t q = 0; q < kQuantityCount; ++q) {
        pieces_[i * kQuantityCount + q] = mode_pieces(basis_->mode(i), static_cast<Quantity>(q));
      }
    }
  }

  const BasisPtr& basis() const { return basis_; }
  const GridPtr& grid() const { return grid_; }

  /// Grid samples of one quantity of f.
  std::vector<double> synthesize_quantity(const SpectralField& f, Quantity q) const {
    check_field(f);
    std::vector<std::complex<double>> acc(nr_ * (mmax_ + 1));
    for (std::size_t i = 0; i < basis_->size(); ++i) {
      const double c = f.coeffs[i];
      if (c == 0.0) continue;
      const auto& m = basis_->mode(i);
      const Pieces& a = pieces_[i * kQuantityCount + static_cast<std::size_t>(q)];
      const double* rad = &radial_[basis_->profile_of(i) * nr_ * 5];
      for (int o = 0; o < 5; ++o) {
        const auto ao = a[static_cast<std::size_t>(o)];
        if (ao == 0.0) continue;
        const int freq = m.n - 2 + o;
        const std::size_t slot = static_cast<std::size_t>(std::abs(freq));
        const std::complex<double> amp = c * (freq >= 0 ? ao : std::conj(ao));
        for (std::size_t r = 0; r < nr_; ++r) acc[r * (mmax_ + 1) + slot] += amp * rad[r * 5 + static_cast<std::size_t>(o)];
      }
    }
    std::vector<double> out(nr_ * nt_, 0.0);
    for (std::size_t r = 0; r < nr_; ++r) {
      double* row = &out[r * nt_];
      for (std::size_t m = 0; m <= mmax_; ++m) {
        const auto g = acc[r * (mmax_ + 1) + m];
        if (g == 0.0) continue;
        const double gr = g.real();
        const double gi = g.imag();
        const double* cs = &cos_[m * nt_];
        const double* sn = &sin_[m * nt_];
        for (std::size_t l = 0; l < nt_; ++l) row[l] += gr * cs[l] - gi * sn[l];
      }
    }
    return out;
  }

  GridVectorField synthesize(const SpectralField& f) const {
    GridVectorField v(grid_);
    v.ux = synthesize_quantity(f, Quantity::ux);
    v.uy = synthesize_quantity(f, Quantity::uy);
    return v;
  }

  GridTensorField gradient(const SpectralField& f) const {
    GridTensorField g(grid_);
    g.at(0, 0) = synthesize_quantity(f, Quantity::dx_ux);
    g.at(0, 1) = synthesize_quantity(f, Quantity::dy_ux);
    g.at(1, 0) = synthesize_quantity(f, Quantity::dx_uy);
    g.at(1, 1) = synthesize_quantity(f, Quantity::dy_uy);
    return g;
  }

  /// Quadrature inner products: result[i] = sum_q  integral of values_q * (quantity q of mode i).
  /// `modes` restricts the output to a subset (others stay zero).
  std::vector<double> project(std::span<const std::pair<Quantity, const std::vector<double>*>> terms,
                              std::span<const std::size_t> modes = {}) const {
    std::vector<double> out(basis_->size(), 0.0);
    std::vector<std::complex<double>> moments(nr_ * (mmax_ + 1));
    for (const auto& [q, values] : terms) {
      if (values->size() != nr_ * nt_) throw ArgumentError("grid field does not match the transform grid");
      angular_moments(*values, moments);
      auto accumulate = [&](std::size_t i) {
        const auto& m = basis_->mode(i);
        const Pieces& a = pieces_[i * kQuantityCount + static_cast<std::size_t>(q)];
        const double* rad = &radial_[basis_->profile_of(i) * nr_ * 5];
        double s = 0.0;
        for (int o = 0; o < 5; ++o) {
          const auto ao = a[static_cast<std::size_t>(o)];
          if (ao == 0.0) continue;
          const int freq = m.n - 2 + o;
          const std::size_t slot = static_cast<std::size_t>(std::abs(freq));
          for (std::size_t r = 0; r < nr_; ++r) {
            auto h = moments[r * (mmax_ + 1) + slot];
            if (freq < 0) h = std::conj(h);
            s += grid_->radial_weight(r) * rad[r * 5 + static_cast<std::size_t>(o)] * (ao * h).real();
          }
        }
        out[i] += s;
      };
      if (modes.empty()) {
        for (std::size_t i = 0; i < basis_->size(); ++i) accumulate(i);
      } else {
        for (std::size_t i : modes) accumulate(i);
      }
    }
    return out;
  }

  /// Coefficients c_m = integral of v . e_m (the L2-orthogonal projection onto the span).
  SpectralField analyze(const GridVectorField& v) const {
    const std::array<std::pair<Quantity, const std::vector<double>*>, 2> terms{{{Quantity::ux, &v.ux}, {Quantity::uy, &v.uy}}};
    return SpectralField(basis_, project(terms));
  }

  /// sum_{j,k} integral of T_jk d_k (e_m)_j for each mode m (or the listed subset).
  std::vector<double> contract_gradients(const GridTensorField& t, std::span<const std::size_t> modes = {}) const {
    const std::array<std::pair<Quantity, const std::vector<double>*>, 4> terms{{{Quantity::dx_ux, &t.at(0, 0)},
                                                                               {Quantity::dy_ux, &t.at(0, 1)},
                                                                               {Quantity::dx_uy, &t.at(1, 0)},
                                                                               {Quantity::dy_uy, &t.at(1, 1)}}};
    return project(terms, modes);
  }

 private:
  void check_field(const SpectralField& f) const {
    if (f.size() != basis_->size()) throw ArgumentError("field does not match the transform basis");
  }

  // moments[r][m] = dtheta * sum_l values(r, l) e^{i m theta_l}
  void angular_moments(const std::vector<double>& values, std::vector<std::complex<double>>& moments) const {
    const double dt = grid_->dtheta();
    for (std::size_t r = 0; r < nr_; ++r) {
      const double* row = &values[r * nt_];
      for (std::size_t m = 0; m <= mmax_; ++m) {
        const double* cs = &cos_[m * nt_];
        const double* sn = &sin_[m * nt_];
        double re = 0.0;
        double im = 0.0;
        for (std::size_t l = 0; l < nt_; ++l) {
          re += row[l] * cs[l];
          im += row[l] * sn[l];
        }
        moments[r * (mmax_ + 1) + m] = {dt * re, dt * im};
      }
    }
  }

  BasisPtr basis_;
  GridPtr grid_;
  std::size_t nr_ = 0;
  std::size_t nt_ = 0;
  std::size_t mmax_ = 0;
  std::vector<double> cos_;
  std::vector<double> sin_;
  std::vector<double> radial_;  // [profile][ring][J_{n-2}..J_{n+2}]
  std::vector<Pieces> pieces_;  // [mode][quantity]
};

using TransformPtr = std::shared_ptr<const SpectralTransform>;

// Free-function forms. Each builds a throwaway transform; hold a SpectralTransform
// when transforming repeatedly.

inline GridVectorField synthesize(const SpectralField& f, const GridPtr& grid) {
  return SpectralTransform(f.basis, grid).synthesize(f);
}

inline SpectralField analyze(const GridVectorField& v, const BasisPtr& basis, const GridPtr& grid) {
  return SpectralTransform(basis, grid).analyze(v);
}

/// A^power acting diagonally: coefficient-wise multiplication by lambda^power.
inline SpectralField apply_stokes(const SpectralField& f, double power) {
  SpectralField out = f;
  for (std::size_t i = 0; i < out.size(); ++i) out.coeffs[i] *= std::pow(f.basis->mode(i).lambda, power);
  return out;
}

/// Gradient tensor d_k (e_m)_j of one basis mode on the grid.
inline GridTensorField mode_gradient_values(const BasisPtr& basis, std::size_t mode, const GridPtr& grid) {
  return SpectralTransform(basis, grid).gradient(SpectralField::unit(basis, mode));
}

}  // namespace sbesov
