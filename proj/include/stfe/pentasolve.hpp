#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace stfe {

// Solver for cyclic pentadiagonal systems A x = b where row i of A has
// entries on columns i-2 .. i+2 (indices mod N). The periodic wrap entries
// are handled as a rank-4 Woodbury correction on top of a banded LU
// factorization; a dense LU fallback covers N <= 512 if the banded path
// degenerates.
class CyclicPentaSolver {
  public:
    explicit CyclicPentaSolver(int n);

    // diags[j] holds the coefficient of column i + (j - 2) in row i.
    void factor(const std::array<const double*, 5>& diags);
    void solve(std::vector<double>& x) const;

    bool used_dense_fallback() const { return dense_; }

  private:
    void factor_dense(const std::array<const double*, 5>& diags);

    int n_;
    static constexpr int kl_ = 2, ku_ = 2, ldab_ = 2 * 2 + 2 + 1;
    std::vector<double> ab_;
    std::vector<int> ipiv_;
    std::vector<double> z_;      // n x 4, columns are B^{-1} e_{rows touched}
    std::array<double, 16> cap_{};
    std::array<int, 4> cap_piv_{};
    std::array<double, 6> corner_{};  // a0, b0, a1, fN2, eN1, fN1
    bool dense_ = false;
    std::vector<double> dense_lu_;
    std::vector<int> dense_piv_;
};

struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace stfe
