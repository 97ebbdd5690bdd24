#include "stfe/pentasolve.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>

namespace stfe {

CyclicPentaSolver::CyclicPentaSolver(int n) : n_(n) {
    if (n < 8) throw std::invalid_argument("CyclicPentaSolver: need N >= 8");
    ab_.resize(size_t(ldab_) * n);
    ipiv_.resize(n);
    z_.resize(size_t(n) * 4);
}

void CyclicPentaSolver::factor(const std::array<const double*, 5>& diags) {
    const double* a = diags[0];  // column i-2
    const double* b = diags[1];  // column i-1
    const double* d = diags[2];  // column i
    const double* e = diags[3];  // column i+1
    const double* f = diags[4];  // column i+2
    const int n = n_;
    dense_ = false;

    std::fill(ab_.begin(), ab_.end(), 0.0);
    auto band = [&](int i, int j) -> double& { return ab_[size_t(j) * ldab_ + (kl_ + ku_ + i - j)]; };
    for (int i = 0; i < n; ++i) {
        if (i - 2 >= 0) band(i, i - 2) = a[i];
        if (i - 1 >= 0) band(i, i - 1) = b[i];
        band(i, i) = d[i];
        if (i + 1 < n) band(i, i + 1) = e[i];
        if (i + 2 < n) band(i, i + 2) = f[i];
    }
    corner_ = {a[0], b[0], a[1], f[n - 2], e[n - 1], f[n - 1]};

    int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n, n, kl_, ku_, ab_.data(), ldab_, ipiv_.data());
    if (info != 0) {
        factor_dense(diags);
        return;
    }

    // Z = B^{-1} [e_0, e_1, e_{n-2}, e_{n-1}]
    std::fill(z_.begin(), z_.end(), 0.0);
    z_[0] = 1.0;
    z_[size_t(n) + 1] = 1.0;
    z_[2 * size_t(n) + n - 2] = 1.0;
    z_[3 * size_t(n) + n - 1] = 1.0;
    info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n, kl_, ku_, 4, ab_.data(), ldab_, ipiv_.data(),
                          z_.data(), n);
    if (info != 0) throw SolverError("banded back substitution failed, info=" + std::to_string(info));

    // Capacitance C = I + V^T Z with V columns encoding the six corner entries.
    auto vt_dot = [&](const double* y, double* out) {
        out[0] = corner_[0] * y[n - 2] + corner_[1] * y[n - 1];
        out[1] = corner_[2] * y[n - 1];
        out[2] = corner_[3] * y[0];
        out[3] = corner_[4] * y[0] + corner_[5] * y[1];
    };
    for (int c = 0; c < 4; ++c) {
        double col[4];
        vt_dot(z_.data() + size_t(c) * n, col);
        for (int r = 0; r < 4; ++r) cap_[size_t(c) * 4 + r] = (r == c ? 1.0 : 0.0) + col[r];
    }
    info = LAPACKE_dgetrf(LAPACK_COL_MAJOR, 4, 4, cap_.data(), 4, cap_piv_.data());
    if (info != 0) {
        factor_dense(diags);
        return;
    }
}

void CyclicPentaSolver::factor_dense(const std::array<const double*, 5>& diags) {
    const int n = n_;
    if (n > 512) throw SolverError("cyclic banded factorization failed and N > 512 exceeds the dense fallback");
    dense_ = true;
    dense_lu_.assign(size_t(n) * n, 0.0);
    dense_piv_.resize(n);
    for (int i = 0; i < n; ++i) {
        for (int off = -2; off <= 2; ++off) {
            const int j = ((i + off) % n + n) % n;
            dense_lu_[size_t(j) * n + i] += diags[off + 2][i];
        }
    }
    const int info = LAPACKE_dgetrf(LAPACK_COL_MAJOR, n, n, dense_lu_.data(), n, dense_piv_.data());
    if (info != 0) throw SolverError("dense fallback factorization failed, info=" + std::to_string(info));
}

void CyclicPentaSolver::solve(std::vector<double>& x) const {
    const int n = n_;
    if (int(x.size()) != n) throw std::invalid_argument("CyclicPentaSolver::solve: size mismatch");
    if (dense_) {
        const int info = LAPACKE_dgetrs(LAPACK_COL_MAJOR, 'N', n, 1, dense_lu_.data(), n,
                                        dense_piv_.data(), x.data(), n);
        if (info != 0) throw SolverError("dense back substitution failed");
        return;
    }
    int info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n, kl_, ku_, 1,
                              const_cast<double*>(ab_.data()), ldab_,
                              const_cast<int*>(ipiv_.data()), x.data(), n);
    if (info != 0) throw SolverError("banded back substitution failed");

    double w[4];
    w[0] = corner_[0] * x[n - 2] + corner_[1] * x[n - 1];
    w[1] = corner_[2] * x[n - 1];
    w[2] = corner_[3] * x[0];
    w[3] = corner_[4] * x[0] + corner_[5] * x[1];
    info = LAPACKE_dgetrs(LAPACK_COL_MAJOR, 'N', 4, 1, const_cast<double*>(cap_.data()), 4,
                          const_cast<int*>(cap_piv_.data()), w, 4);
    if (info != 0) throw SolverError("capacitance solve failed");
    for (int c = 0; c < 4; ++c) {
        const double* zc = z_.data() + size_t(c) * n;
        const double wc = w[c];
        if (wc == 0.0) continue;
        for (int i = 0; i < n; ++i) x[i] -= zc[i] * wc;
    }
}

}  // namespace stfe
