#include "mdfn/ocp.hpp"

#include "mdfn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mdfn {

namespace {
// NMC622 rational fit, normalized stoichiometry window [0.27, 0.92].
constexpr double kNmcP[5] = {-204.3, -166.6, -172.4, 167.3, 272.2};
constexpr double kNmcQ[5] = {-158.1, 221.4, -331.6, 200.1, 38.07};
constexpr double kLfpPlateau = 3.413;     // V, mean of the plateau region
constexpr double kLfpAmplitude = 0.001;   // V
} // namespace

OcpCurve OcpCurve::nmc622() {
  OcpCurve c;
  c.variant_ = Variant::Nmc622Rational;
  c.x_lo_ = 0.27;
  c.x_hi_ = 0.92;
  c.coeff_.assign(std::begin(kNmcP), std::end(kNmcP));
  c.coeff_.insert(c.coeff_.end(), std::begin(kNmcQ), std::end(kNmcQ));
  return c;
}

OcpCurve OcpCurve::lfp() {
  OcpCurve c;
  c.variant_ = Variant::LfpPlateau;
  // The plateau expression is singular at both ends of (0, 1). Solving uses
  // the linearly extended curve outside a symmetric inner window, which keeps
  // the end walls thermodynamically closing (the extension exceeds the cell
  // voltage window well before the stoichiometry bound) without the
  // switch-like 1/y stiffness that defeats Newton's method at the corners.
  // The symmetric window also preserves the curve's exact antisymmetry about
  // the half-filled state.
  c.x_lo_ = 1e-3;
  c.x_hi_ = 1.0 - 1e-3;
  c.coeff_ = {kLfpPlateau, kLfpAmplitude};
  return c;
}

OcpCurve OcpCurve::tabulated(std::vector<double> x, std::vector<double> u) {
  if (x.size() < 2 || x.size() != u.size())
    throw ConfigError("tabulated OCP needs >= 2 matching samples");
  if (!std::is_sorted(x.begin(), x.end(), std::less_equal<double>()))
    throw ConfigError("tabulated OCP stoichiometry must be strictly increasing");
  OcpCurve c;
  c.variant_ = Variant::Tabulated;
  c.x_lo_ = x.front();
  c.x_hi_ = x.back();
  c.tab_x_ = std::move(x);
  c.tab_u_ = std::move(u);
  return c;
}

double OcpCurve::eval_inside(double x) const {
  switch (variant_) {
  case Variant::Nmc622Rational: {
    const double *p = coeff_.data();
    const double *q = coeff_.data() + 5;
    const double num = (((p[0] * x + p[1]) * x + p[2]) * x + p[3]) * x + p[4];
    const double den = ((((x + q[0]) * x + q[1]) * x + q[2]) * x + q[3]) * x + q[4];
    return num / den;
  }
  case Variant::LfpPlateau:
    return coeff_[0] + coeff_[1] * (1.0 / x + 1.0 / (x - 1.0));
  case Variant::Tabulated: {
    auto it = std::upper_bound(tab_x_.begin(), tab_x_.end(), x);
    std::size_t hi = std::min<std::size_t>(tab_x_.size() - 1,
                                           std::max<std::size_t>(1, it - tab_x_.begin()));
    std::size_t lo = hi - 1;
    const double t = (x - tab_x_[lo]) / (tab_x_[hi] - tab_x_[lo]);
    return tab_u_[lo] + t * (tab_u_[hi] - tab_u_[lo]);
  }
  }
  return 0.0;
}

double OcpCurve::slope_inside(double x) const {
  switch (variant_) {
  case Variant::Nmc622Rational: {
    const double *p = coeff_.data();
    const double *q = coeff_.data() + 5;
    const double num = (((p[0] * x + p[1]) * x + p[2]) * x + p[3]) * x + p[4];
    const double den = ((((x + q[0]) * x + q[1]) * x + q[2]) * x + q[3]) * x + q[4];
    const double dnum = ((4 * p[0] * x + 3 * p[1]) * x + 2 * p[2]) * x + p[3];
    const double dden = (((5 * x + 4 * q[0]) * x + 3 * q[1]) * x + 2 * q[2]) * x + q[3];
    return (dnum * den - num * dden) / (den * den);
  }
  case Variant::LfpPlateau:
    return coeff_[1] * (-1.0 / (x * x) - 1.0 / ((x - 1.0) * (x - 1.0)));
  case Variant::Tabulated: {
    auto it = std::upper_bound(tab_x_.begin(), tab_x_.end(), x);
    std::size_t hi = std::min<std::size_t>(tab_x_.size() - 1,
                                           std::max<std::size_t>(1, it - tab_x_.begin()));
    std::size_t lo = hi - 1;
    return (tab_u_[hi] - tab_u_[lo]) / (tab_x_[hi] - tab_x_[lo]);
  }
  }
  return 0.0;
}

double OcpCurve::value(double x) const {
  if (!(x >= x_lo_ && x <= x_hi_)) {
    std::ostringstream os;
    os << "stoichiometry " << x << " outside OCP window [" << x_lo_ << ", " << x_hi_ << "]";
    throw DomainError(os.str());
  }
  return eval_inside(x);
}

double OcpCurve::slope(double x) const {
  if (!(x >= x_lo_ && x <= x_hi_)) {
    std::ostringstream os;
    os << "stoichiometry " << x << " outside OCP window [" << x_lo_ << ", " << x_hi_ << "]";
    throw DomainError(os.str());
  }
  return slope_inside(x);
}

double OcpCurve::value_extended(double x) const {
  if (x < x_lo_)
    return eval_inside(x_lo_) + slope_inside(x_lo_) * (x - x_lo_);
  if (x > x_hi_)
    return eval_inside(x_hi_) + slope_inside(x_hi_) * (x - x_hi_);
  return eval_inside(x);
}

double OcpCurve::slope_extended(double x) const {
  if (x < x_lo_)
    return slope_inside(x_lo_);
  if (x > x_hi_)
    return slope_inside(x_hi_);
  return slope_inside(x);
}

double ocp_nmc622(double x) {
  static const OcpCurve curve = OcpCurve::nmc622();
  return curve.value(x);
}

double ocp_lfp(double y) {
  if (!(y > 0.0 && y < 1.0))
    throw DomainError("LFP stoichiometry must lie strictly inside (0, 1)");
  return kLfpPlateau + kLfpAmplitude * (1.0 / y + 1.0 / (y - 1.0));
}

} // namespace mdfn
