#pragma once

#include <vector>

namespace mdfn {

/// General banded matrix in LAPACK gbsv storage, column-major with kl extra
/// rows of fill-in workspace.
class BandedMatrix {
public:
  BandedMatrix(int n, int kl, int ku)
      : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1), ab_(static_cast<std::size_t>(ldab_) * n, 0.0) {}

  int size() const { return n_; }
  int kl() const { return kl_; }
  int ku() const { return ku_; }

  void zero() { std::fill(ab_.begin(), ab_.end(), 0.0); }

  double &at(int i, int j) { return ab_[static_cast<std::size_t>(j) * ldab_ + (kl_ + ku_ + i - j)]; }

  bool in_band(int i, int j) const { return j - i <= ku_ && i - j <= kl_; }

  /// Solves A x = b in place (b becomes x). Returns false if the
  /// factorization failed (singular pivot).
  bool solve(std::vector<double> &b);

private:
  int n_, kl_, ku_, ldab_;
  std::vector<double> ab_;
};

} // namespace mdfn
