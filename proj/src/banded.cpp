#include "mdfn/banded.hpp"

extern "C" {
void dgbsv_(const int *n, const int *kl, const int *ku, const int *nrhs, double *ab,
            const int *ldab, int *ipiv, double *b, const int *ldb, int *info);
}

namespace mdfn {

bool BandedMatrix::solve(std::vector<double> &b) {
  std::vector<int> ipiv(n_);
  int info = 0;
  const int nrhs = 1;
  dgbsv_(&n_, &kl_, &ku_, &nrhs, ab_.data(), &ldab_, ipiv.data(), b.data(), &n_, &info);
  return info == 0;
}

} // namespace mdfn
