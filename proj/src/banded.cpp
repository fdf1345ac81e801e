#include "treewave/banded.hpp"

#include <lapacke.h>

#include <stdexcept>

namespace treewave {

BandMatrix::BandMatrix(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1),
      ab_(static_cast<size_t>(ldab_) * n, 0.0) {
  if (n <= 0 || kl < 0 || ku < 0)
    throw std::invalid_argument("BandMatrix: bad dimensions");
}

double& BandMatrix::at(int i, int j) {
  if (i < 0 || i >= n_ || j < 0 || j >= n_ || j - i > ku_ || i - j > kl_)
    throw std::out_of_range("BandMatrix::at outside band");
  // Column-major dgbsv layout: row kl+ku+i-j of column j.
  return ab_[static_cast<size_t>(j) * ldab_ + (kl_ + ku_ + i - j)];
}

void BandMatrix::clear() { ab_.assign(ab_.size(), 0.0); }

void BandMatrix::solve(std::vector<double>& b, int nrhs) {
  if (b.size() != static_cast<size_t>(n_) * nrhs)
    throw std::invalid_argument("BandMatrix::solve: rhs size mismatch");
  std::vector<lapack_int> ipiv(n_);
  lapack_int info =
      LAPACKE_dgbsv(LAPACK_COL_MAJOR, n_, kl_, ku_, nrhs, ab_.data(), ldab_,
                    ipiv.data(), b.data(), n_);
  if (info < 0) throw std::invalid_argument("dgbsv: illegal argument");
  if (info > 0) throw std::runtime_error("dgbsv: singular matrix");
}

void solve_tridiag(std::vector<double> dl, std::vector<double> diag,
                   std::vector<double> du, std::vector<double>& b) {
  lapack_int n = static_cast<lapack_int>(diag.size());
  if (dl.size() + 1 != diag.size() || du.size() + 1 != diag.size() ||
      b.size() != diag.size())
    throw std::invalid_argument("solve_tridiag: size mismatch");
  lapack_int info = LAPACKE_dgtsv(LAPACK_COL_MAJOR, n, 1, dl.data(),
                                  diag.data(), du.data(), b.data(), n);
  if (info < 0) throw std::invalid_argument("dgtsv: illegal argument");
  if (info > 0) throw std::runtime_error("dgtsv: singular matrix");
}

}  // namespace treewave
