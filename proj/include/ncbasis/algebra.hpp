#pragma once

#include "ncbasis/matrix.hpp"

namespace ncbasis {

/// The weight (alpha, nu) with derived density A_nu = diag(alpha, 1-alpha)
/// tensored nu times, the density of the product state rho_nu(x) = Tr(x A_nu).
///
/// alpha is restricted to (0, 1/2]; the mirror alpha <-> 1-alpha gives the
/// same family of states up to a basis flip, so nothing is lost. 1-alpha is
/// carried separately so that fraction input ("1/3") keeps both endpoints
/// correctly rounded.
class Weight {
public:
    Weight(double alpha, int level) : Weight(alpha, 1.0 - alpha, level) {}
    Weight(double alpha, double one_minus_alpha, int level);

    double alpha() const { return alpha_; }
    double one_minus_alpha() const { return oma_; }
    int level() const { return level_; }
    double lambda() const { return alpha_ / oma_; }  // in (0, 1]
    Eigen::Index dim() const { return Eigen::Index(1) << level_; }
    const Diagonal& density() const { return density_; }

    /// Diagonal entry k of A_nu as the digit product over the bits of k.
    /// distorted_measure evaluates the same function, so the identity
    /// rho_nu(eps_k) = m_alpha(I_k) holds bit for bit.
    static double digit_product(double alpha, double one_minus_alpha, int level,
                                std::uint64_t k);

private:
    double alpha_, oma_;
    int level_;
    Diagonal density_;
};

/// rho_nu(x) = Tr(x A_nu).
Complex state(const Weight& w, const Mat& x);

/// i_nu(x) = x (x) 1_2; doubles the dimension, preserves the state.
Mat embed(const Mat& x);

struct ModularContext {
    Weight weight;
    double t;
};

/// sigma_t(x) = A^{it} x A^{-it}.
Mat modular_flow(const ModularContext& ctx, const Mat& x);
Mat modular_flow(const Weight& w, double t, const Mat& x);

/// f_{x,y}(z) = Tr(A^{1+iz} x A^{-iz} y). On the strip boundary,
/// f(t) = rho(sigma_t(x) y) and f(t+i) = rho(y sigma_t(x)).
Complex kms_function(const Weight& w, const Mat& x, const Mat& y, Complex z);

/// Level-reduction conditional expectation in reduced form: the weighted
/// partial trace over the last tensor factor,
///   y[i,j] = alpha x[2i,2j] + (1-alpha) x[2i+1,2j+1].
/// On elementary tensors this is a (x) b -> rho_1(b) a; composing with
/// embed() gives the subalgebra-valued projection.
Mat expect_level(const Weight& w_next, const Mat& x);

/// Same reduction without a Weight object; the recursion workhorse.
Mat reduce_last_factor(const Mat& x, double alpha, double one_minus_alpha);

/// Projection onto the diagonal subalgebra: zeroes every off-diagonal entry.
Mat expect_diagonal(const Mat& x);

}  // namespace ncbasis
