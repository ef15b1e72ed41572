#pragma once

#include <vector>

namespace mdfn {

/// Open-circuit potential of an active material as a function of lithium
/// stoichiometry. Two closed forms are built in (the NMC622 rational fit and
/// the LFP plateau expression); arbitrary measured curves can be tabulated.
class OcpCurve {
public:
  enum class Variant { Nmc622Rational, LfpPlateau, Tabulated };

  static OcpCurve nmc622();
  static OcpCurve lfp();
  /// Strictly increasing stoichiometry samples with their potentials.
  static OcpCurve tabulated(std::vector<double> x, std::vector<double> u);

  Variant variant() const { return variant_; }
  double x_lo() const { return x_lo_; }
  double x_hi() const { return x_hi_; }
  const std::vector<double> &coefficients() const { return coeff_; }

  /// Potential at stoichiometry x. Throws DomainError outside [x_lo, x_hi].
  double value(double x) const;
  /// dU/dx at stoichiometry x (same domain as value()).
  double slope(double x) const;

  /// Clamped-linear extension used inside Newton iterations: inside the
  /// window it equals value(); outside it continues linearly with the
  /// end-point slope so residuals stay finite and monotone.
  double value_extended(double x) const;
  double slope_extended(double x) const;

private:
  OcpCurve() = default;
  double eval_inside(double x) const;
  double slope_inside(double x) const;

  Variant variant_ = Variant::Tabulated;
  double x_lo_ = 0.0, x_hi_ = 1.0;
  std::vector<double> coeff_;           // rational: p1..p5, q1..q5; plateau: U0, amplitude
  std::vector<double> tab_x_, tab_u_;   // tabulated variant
};

/// NMC622 open-circuit potential, Li stoichiometry window [0.27, 0.92].
double ocp_nmc622(double x);

/// LFP open-circuit potential, valid for stoichiometry strictly inside (0, 1).
double ocp_lfp(double y);

} // namespace mdfn
