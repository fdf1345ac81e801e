#pragma once
#include <vector>

namespace treewave {

/// General banded matrix in LAPACK band storage with room for the
/// partial-pivoting fill-in; solved in place by dgbsv. Entries outside the
/// declared bands must not be touched.
class BandMatrix {
 public:
  BandMatrix(int n, int kl, int ku);

  double& at(int i, int j);  // 0-based, requires -kl <= j - i <= ku
  void clear();

  int n() const { return n_; }
  int kl() const { return kl_; }
  int ku() const { return ku_; }

  /// Solves A X = B for nrhs right-hand sides stored column-major in b
  /// (length n*nrhs), overwriting b with X. Destroys the stored factor;
  /// refill before solving again. Throws std::runtime_error when singular.
  void solve(std::vector<double>& b, int nrhs);

 private:
  int n_, kl_, ku_, ldab_;
  std::vector<double> ab_;
};

/// Tridiagonal solve (dgtsv): dl/du have length n-1, diag and b length n.
/// Band arrays are taken by value because LAPACK destroys them.
void solve_tridiag(std::vector<double> dl, std::vector<double> diag,
                   std::vector<double> du, std::vector<double>& b);

}  // namespace treewave
