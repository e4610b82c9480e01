#include "semihyp/sector_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

#include "semihyp/csv.hpp"
#include "semihyp/error.hpp"

namespace semihyp {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

int wrap(long long i, int m) {
  const long long r = i % m;
  return static_cast<int>(r < 0 ? r + m : r);
}

double arg_0_2pi(Complex z) {
  double a = std::arg(z);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a -= kTwoPi;
  return a;
}

Complex ipow(Complex z, int e) {
  Complex r = 1.0;
  Complex b = e < 0 ? 1.0 / z : z;
  for (int n = std::abs(e); n > 0; n >>= 1) {
    if (n & 1) r *= b;
    b *= b;
  }
  return r;
}

void check_k_q(int k, int q) {
  if (k < 1 || q < 1) raise(ErrorCode::parameter, "k and q must be positive");
}

}  // namespace

double chart_arg(Complex w, int sheet) {
  double a = std::arg(w);  // (-pi, pi]
  if (sheet == 0) {
    if (a < 0.0) a += kTwoPi;
  } else if (a >= kPi) {
    a -= kTwoPi;
  }
  return a;
}

SectorPoint to_sector_on_sheet(Complex z, int sheet, int k, int q) {
  check_k_q(k, q);
  if (z == Complex(0.0)) raise(ErrorCode::domain, "z = 0 has no sector coordinate");
  if (sheet != 0 && sheet != 1) raise(ErrorCode::domain, "sheet must be 0 or 1");
  const int m = k * q;
  const double a = arg_0_2pi(z);
  const double s = (m * a - sheet * kPi) / kTwoPi;
  const long long fl = static_cast<long long>(std::floor(s));
  const int i = wrap(fl, m);
  const double theta = kTwoPi * static_cast<double>(fl + 1) - m * a;
  return {sheet, i, std::polar(std::pow(std::abs(z), -m), theta)};
}

SectorPoint to_sector(Complex z, int k, int q) {
  check_k_q(k, q);
  if (z == Complex(0.0)) raise(ErrorCode::domain, "z = 0 has no sector coordinate");
  const double s = k * q * arg_0_2pi(z) / kTwoPi;
  const double frac = s - std::floor(s);
  const bool on_sheet0_boundary = frac < 1e-12 || frac > 1.0 - 1e-12;
  return to_sector_on_sheet(z, on_sheet0_boundary ? 1 : 0, k, q);
}

Complex from_sector(const SectorPoint& p, int k, int q) {
  check_k_q(k, q);
  const int m = k * q;
  const double theta = chart_arg(p.w, p.sheet);
  const double a = (kTwoPi * (p.sector + 1) - theta) / m;
  return std::polar(std::pow(std::abs(p.w), -1.0 / m), a);
}

double BlendParams::rho() const { return std::pow(r0, -1.0 / kq()); }
double BlendParams::r_hat() const { return std::pow(eta, -kq()); }
Complex BlendParams::lambda() const { return std::polar(1.0, kTwoPi * h / q); }

BlendParams make_blend_params(int k, int q, int h, double eta, double r0) {
  check_k_q(k, q);
  if (h < 1 || h > q || std::gcd(h, q) != 1) raise(ErrorCode::parameter, "need 0 < h <= q with gcd(h, q) = 1");
  BlendParams p;
  p.k = k;
  p.q = q;
  p.h = h;
  p.r0 = r0 > 0.0 ? r0 : 2.0 * k * q;
  if (p.r0 <= k * q) raise(ErrorCode::parameter, "R0 must exceed kq");
  p.eta = eta > 0.0 ? eta : std::pow(16.0 * p.r0, -1.0 / (k * q));
  if (!(p.eta < p.rho())) raise(ErrorCode::parameter, "eta must lie below rho = R0^{-1/kq}");
  return p;
}

SectorPoint translate_Phi(const SectorPoint& p, const BlendParams& params) {
  if (!(std::abs(p.w) > params.r0)) raise(ErrorCode::out_of_domain, "translation needs |w| > R0");
  const int m = params.kq();
  SectorPoint out{p.sheet, wrap(static_cast<long long>(p.sector) + params.h * params.k, m),
                  p.w - static_cast<double>(m)};
  // The image can only hit the chart cut when w sits on the real axis; move
  // it to the other sheet through the gluing relation.
  if (out.w.imag() == 0.0) {
    const bool on_cut = out.sheet == 0 ? out.w.real() > 0.0 : out.w.real() < 0.0;
    if (on_cut) {
      if (out.sheet == 0) {
        out.sheet = 1;
      } else {
        out.sheet = 0;
      }
    }
  }
  return out;
}

Complex model_phi_charts(Complex z, const BlendParams& params) {
  const SectorPoint p = translate_Phi(to_sector(z, params.k, params.q), params);
  return from_sector(p, params.k, params.q);
}

Complex model_phi(Complex z, const BlendParams& params) {
  const int m = params.kq();
  return params.lambda() * z * std::pow(1.0 - static_cast<double>(m) * ipow(z, m), -1.0 / m);
}

double bump(double r, double eta) {
  if (eta <= 0.0) raise(ErrorCode::parameter, "bump radius must be positive");
  if (r <= 0.5 * eta) return 1.0;
  if (r >= eta) return 0.0;
  const double t = (r - 0.5 * eta) / (0.5 * eta);
  return 1.0 - 1.0 / (1.0 + std::exp(1.0 / t - 1.0 / (1.0 - t)));
}

double bump_derivative(double r, double eta) {
  if (eta <= 0.0) raise(ErrorCode::parameter, "bump radius must be positive");
  if (r <= 0.5 * eta || r >= eta) return 0.0;
  const double t = (r - 0.5 * eta) / (0.5 * eta);
  const double s = 1.0 / (1.0 + std::exp(1.0 / t - 1.0 / (1.0 - t)));
  const double ds = s * (1.0 - s) * (1.0 / (t * t) + 1.0 / ((1.0 - t) * (1.0 - t)));
  return -ds * 2.0 / eta;
}

Map1D blend(Map1D f, const BlendParams& params) {
  return [f = std::move(f), params](Complex z) {
    const double b = bump(std::abs(z), params.eta);
    const Complex phi = model_phi(z, params);
    if (b == 0.0) return phi;
    return b * f(z) + (1.0 - b) * phi;
  };
}

DiscreteConjugacy::DiscreteConjugacy(double r_min, double r_max, int n_r, int n_theta, double eta)
    : r_min_(r_min), r_max_(r_max), n_r_(n_r), n_theta_(n_theta), eta_(eta) {
  if (n_r < 2 || n_theta < 3 || !(r_min > 0.0) || !(r_max > r_min)) {
    raise(ErrorCode::parameter, "invalid annulus grid");
  }
  const auto size = static_cast<std::size_t>(n_r) * n_theta;
  disp_.assign(size, 0.0);
  m_.assign(size, 0);
  covered_.assign(size, 0);
}

Complex DiscreteConjugacy::node(int ir, int it) const {
  const double r = r_min_ + (r_max_ - r_min_) * ir / (n_r_ - 1);
  return std::polar(r, kTwoPi * it / n_theta_);
}

std::size_t DiscreteConjugacy::covered_count() const {
  return static_cast<std::size_t>(std::count(covered_.begin(), covered_.end(), 1));
}

void DiscreteConjugacy::set_node(int ir, int it, std::optional<Complex> image, int m) {
  const std::size_t i = index(ir, it);
  m_[i] = m;
  covered_[i] = image ? 1 : 0;
  disp_[i] = image ? *image - node(ir, it) : Complex(0.0);
}

std::optional<Complex> DiscreteConjugacy::evaluate(Complex z) const {
  const double r = std::abs(z);
  if (r >= eta_) return z;
  if (r < r_min_ || r > r_max_) return std::nullopt;
  const double tr = (r - r_min_) / (r_max_ - r_min_) * (n_r_ - 1);
  const int j = std::min(static_cast<int>(tr), n_r_ - 2);
  const double a = tr - j;
  const double tt = arg_0_2pi(z) / kTwoPi * n_theta_;
  const int k = std::min(static_cast<int>(tt), n_theta_ - 1);
  const double b = tt - k;
  const int k2 = (k + 1) % n_theta_;
  const std::size_t i00 = index(j, k), i10 = index(j + 1, k), i01 = index(j, k2), i11 = index(j + 1, k2);
  if (!covered_[i00] || !covered_[i10] || !covered_[i01] || !covered_[i11]) return std::nullopt;
  const Complex d = (1 - a) * (1 - b) * disp_[i00] + a * (1 - b) * disp_[i10] + (1 - a) * b * disp_[i01] +
                    a * b * disp_[i11];
  return z + d;
}

int fundamental_orbit_index(Complex w, double r_hat, int kq) {
  const double x = w.real(), y = w.imag();
  const double m_len = kq;
  long long best = std::numeric_limits<long long>::max();
  bool best_is_disk = false;
  auto consider = [&](long long m, bool disk) {
    const long long am = std::llabs(m), ab = std::llabs(best);
    if (best == std::numeric_limits<long long>::max() || am < ab || (am == ab && disk && !best_is_disk)) {
      best = m;
      best_is_disk = disk;
    }
  };
  if (std::abs(y) <= r_hat) {
    const double s = std::sqrt(r_hat * r_hat - y * y);
    const double lo = (x - s) / m_len, hi = (x + s) / m_len;
    const double clo = std::ceil(lo), fhi = std::floor(hi);
    if (clo <= fhi) {
      if (lo <= 0.0 && hi >= 0.0) {
        consider(0, true);
      } else {
        consider(static_cast<long long>(lo > 0.0 ? clo : fhi), true);
      }
    }
  }
  const double ms = std::floor(x / m_len);
  consider(static_cast<long long>(ms), false);
  if (x - ms * m_len == 0.0) consider(static_cast<long long>(ms) - 1, false);
  if (best > std::numeric_limits<int>::max() || best < std::numeric_limits<int>::min()) {
    return best > 0 ? std::numeric_limits<int>::max() : std::numeric_limits<int>::min();
  }
  return static_cast<int>(best);
}

std::optional<Complex> fundamental_conjugacy_at(Complex z, const Map1D& f_tilde, const BlendParams& params,
                                                int* m_out) {
  const int k = params.k, q = params.q, mm = params.kq();
  const int shift = params.h * params.k;
  const double r_hat = params.r_hat();
  if (m_out) *m_out = 0;
  if (std::abs(z) >= params.eta) return z;

  // The orbit moves horizontally in w; read it on the sheet whose cut is on
  // the opposite side of the imaginary axis.
  const Complex w_any = to_sector_on_sheet(z, 0, k, q).w;
  const int sheet = w_any.real() >= 0.0 ? 1 : 0;
  const SectorPoint p = to_sector_on_sheet(z, sheet, k, q);
  if (std::abs(p.w) <= r_hat) return z;

  const int m = fundamental_orbit_index(p.w, r_hat, mm);
  if (m_out) *m_out = m;
  if (m == std::numeric_limits<int>::max() || m == std::numeric_limits<int>::min() ||
      std::abs(m) > params.max_iter) {
    return std::nullopt;
  }
  const Complex wm = p.w - static_cast<double>(m) * mm;
  const int im = wrap(static_cast<long long>(p.sector) + static_cast<long long>(m) * shift, mm);

  // Gamma_0 on the fundamental region: identity on the disk; on the strip of
  // sector i, linear in x from a_i + delta (left edge) to a_i (right edge).
  // The left edge is the F~-image of the right edge of sector i - hk, so
  // a_i + delta = a_{i-hk} + D_i with D_i the chart defect there. Chaining
  // the offsets around the sector cycle with the mean defect delta keeps
  // the slope equal in every strip.
  Complex g = wm;
  if (std::abs(wm) > r_hat) {
    const double x = wm.real(), y = wm.imag();
    const Complex left(0.0, y);
    // Offsets belong to physical strips, so sectors are labelled on sheet 0
    // (a sheet-1 label is one less where Im w < 0); strip edges have
    // |Im w| > R-hat and stay away from the sheet-0 cut.
    const int im0 = (sheet == 1 && y < 0.0) ? wrap(im + 1, mm) : im;
    auto defect = [&](int i) {
      const Complex z0 = from_sector({0, wrap(i - shift, mm), left + static_cast<double>(mm)}, k, q);
      return ipow(f_tilde(z0), -mm) - left;
    };
    const int cyc = mm / std::gcd(shift, mm);
    const int s0 = im0 % std::gcd(shift, mm);
    std::vector<Complex> d(static_cast<std::size_t>(cyc));
    Complex delta = 0.0;
    for (int j = 0; j < cyc; ++j) {
      d[static_cast<std::size_t>(j)] = defect(wrap(s0 + static_cast<long long>(j) * shift, mm));
      delta += d[static_cast<std::size_t>(j)];
    }
    delta /= static_cast<double>(cyc);
    // a_{s_0} = 0 and a_{s_j} = a_{s_{j-1}} + D_{s_j} - delta along s_j = s_0 + j hk.
    Complex a = 0.0;
    for (int j = 1; j < cyc && wrap(s0 + static_cast<long long>(j - 1) * shift, mm) != im0; ++j)
      a += d[static_cast<std::size_t>(j)] - delta;
    g = wm + a + (1.0 - x / mm) * delta;
  }

  if (m <= 0) {
    Complex zc = from_sector({sheet, im, g}, k, q);
    for (int s = 0; s < -m; ++s) zc = f_tilde(zc);
    return zc;
  }
  // F~^{-1} in chart coordinates: solve u - kq + E(u) = v by fixed point,
  // E(u) = f~(z_u)^{-kq} - (u - kq).
  Complex v = g;
  int sector = im;
  for (int s = 0; s < m; ++s) {
    const int target = wrap(sector - shift, mm);
    Complex u = v + static_cast<double>(mm);
    double step = 0.0, prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 60; ++it) {
      const Complex zu = from_sector({sheet, target, u}, k, q);
      const Complex e = ipow(f_tilde(zu), -mm) - (u - static_cast<double>(mm));
      const Complex next = v + static_cast<double>(mm) - e;
      step = std::abs(next - u);
      u = next;
      if (step <= 4e-16 * std::abs(u) || (step >= prev && step <= 1e-13 * std::abs(u))) break;
      prev = step;
    }
    // Stagnation at roundoff level is accepted.
    if (!(step <= 1e-13 * std::abs(u))) return std::nullopt;
    v = u;
    sector = target;
  }
  return from_sector({sheet, sector, v}, k, q);
}

DiscreteConjugacy build_fundamental_conjugacy(const Map1D& f_tilde, const BlendParams& params,
                                              const GridSpec& grid) {
  DiscreteConjugacy g(grid.r_min_factor * params.eta, grid.r_max_factor * params.eta, grid.n_r, grid.n_theta,
                      params.eta);
  for (int ir = 0; ir < grid.n_r; ++ir) {
    for (int it = 0; it < grid.n_theta; ++it) {
      int m = 0;
      const auto img = fundamental_conjugacy_at(g.node(ir, it), f_tilde, params, &m);
      g.set_node(ir, it, img, m);
    }
  }
  return g;
}

ResidualReport conjugacy_residual(const DiscreteConjugacy& gamma, const Map1D& phi, const Map1D& f_tilde) {
  ResidualReport rep;
  rep.per_node.assign(static_cast<std::size_t>(gamma.n_r()) * gamma.n_theta(),
                      std::numeric_limits<double>::quiet_NaN());
  for (int ir = 0; ir < gamma.n_r(); ++ir) {
    for (int it = 0; it < gamma.n_theta(); ++it) {
      if (!gamma.covered(ir, it)) {
        ++rep.skipped;
        continue;
      }
      const auto lhs = gamma.evaluate(phi(gamma.node(ir, it)));
      if (!lhs) {
        ++rep.skipped;
        continue;
      }
      const double r = std::abs(*lhs - f_tilde(gamma.image(ir, it)));
      rep.per_node[gamma.index(ir, it)] = r;
      rep.sup = std::max(rep.sup, r);
      ++rep.evaluated;
    }
  }
  return rep;
}

std::size_t count_fold_overs(const DiscreteConjugacy& gamma) {
  auto cross = [](Complex a, Complex b, Complex c) {
    const Complex u = b - a, v = c - a;
    return u.real() * v.imag() - u.imag() * v.real();
  };
  std::size_t folds = 0;
  for (int ir = 0; ir + 1 < gamma.n_r(); ++ir) {
    for (int it = 0; it < gamma.n_theta(); ++it) {
      const int it2 = (it + 1) % gamma.n_theta();
      if (!gamma.covered(ir, it) || !gamma.covered(ir + 1, it) || !gamma.covered(ir + 1, it2) ||
          !gamma.covered(ir, it2)) {
        continue;
      }
      const Complex a = gamma.image(ir, it), b = gamma.image(ir + 1, it), c = gamma.image(ir + 1, it2),
                    d = gamma.image(ir, it2);
      if (cross(a, b, c) <= 0.0 || cross(a, c, d) <= 0.0) ++folds;
    }
  }
  return folds;
}

double sup_chart_distance(const Map1D& f_tilde, const BlendParams& params, const GridSpec& grid) {
  const DiscreteConjugacy g(grid.r_min_factor * params.eta, grid.r_max_factor * params.eta, grid.n_r,
                            grid.n_theta, params.eta);
  const int mm = params.kq();
  double sup = 0.0;
  for (int ir = 0; ir < grid.n_r; ++ir) {
    for (int it = 0; it < grid.n_theta; ++it) {
      const Complex z = g.node(ir, it);
      if (std::abs(z) >= params.eta) continue;
      const Complex w = ipow(z, -mm);
      sup = std::max(sup, std::abs(ipow(f_tilde(z), -mm) - (w - static_cast<double>(mm))));
    }
  }
  return sup;
}

void write_gamma_csv(const std::filesystem::path& path, const DiscreteConjugacy& gamma,
                     const ResidualReport& residual) {
  CsvWriter csv(path, {"re_z", "im_z", "re_gamma_z", "im_gamma_z", "m", "residual"});
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int ir = 0; ir < gamma.n_r(); ++ir) {
    for (int it = 0; it < gamma.n_theta(); ++it) {
      const Complex z = gamma.node(ir, it);
      const bool cov = gamma.covered(ir, it);
      const Complex gz = cov ? gamma.image(ir, it) : Complex(nan, nan);
      const std::size_t i = gamma.index(ir, it);
      csv << z.real() << z.imag() << gz.real() << gz.imag() << gamma.orbit_index(ir, it)
          << (i < residual.per_node.size() ? residual.per_node[i] : nan);
      csv.end_row();
    }
  }
}

void write_orbit_csv(const std::filesystem::path& path, const Map1D& map, std::span<const Complex> starts,
                     int steps) {
  CsvWriter csv(path, {"orbit", "step", "re_z", "im_z"});
  for (std::size_t o = 0; o < starts.size(); ++o) {
    Complex z = starts[o];
    for (int s = 0; s <= steps; ++s) {
      csv << o << s << z.real() << z.imag();
      csv.end_row();
      z = map(z);
    }
  }
}

}  // namespace semihyp
