#pragma once

#include "ncbasis/normlab.hpp"

namespace ncbasis {

/// One tensor factor: its dimension and the diagonal density of a faithful
/// state of trace one.
struct FactorState {
    Eigen::Index dim;
    Diagonal density;

    static FactorState from_weight(const Weight& w);
    static FactorState normalized_trace(Eigen::Index n);
    static FactorState explicit_density(Diagonal d);
};

/// Two factors under the product state; the joint density is the Kronecker
/// product of the factor densities.
struct ProductAlgebra {
    FactorState left;
    FactorState right;

    Eigen::Index dim() const { return left.dim * right.dim; }
    Diagonal joint_density() const;
};

/// Conditional expectation onto the left factor, reduced form: the weighted
/// partial trace over the right factor. On elementary tensors,
/// x (x) y -> phi(y) x.
Mat expect_left_factor(const ProductAlgebra& pa, const Mat& z);

/// Right-factor elements normalized so that phi(y_j^* y_k) = delta_jk; the
/// applied scale factors are kept for reporting. Construction validates the
/// Gram condition after normalization.
class DecompositionSystem {
public:
    DecompositionSystem(std::vector<Mat> elements, FactorState phi);
    static DecompositionSystem from_haar(const HaarSystem& sys);
    /// n x n shell matrix units under the normalized trace; every unit picks
    /// up the scale sqrt(n).
    static DecompositionSystem from_matrix_units(Eigen::Index n);

    const FactorState& phi() const { return phi_; }
    size_t size() const { return elements_.size(); }
    const std::vector<Mat>& elements() const { return elements_; }
    const std::vector<double>& scales() const { return scales_; }
    double gram_residual() const { return gram_residual_; }

private:
    FactorState phi_;
    std::vector<Mat> elements_;
    std::vector<double> scales_;
    double gram_residual_;
};

/// D_j z = (1 (x) y_j) E_N((1 (x) y_j)^* z).
Mat decomposition_project(const ProductAlgebra& pa, const DecompositionSystem& ds, size_t j,
                          const Mat& z);

/// Product elements a_j (x) b_k ordered by the shell pairing s(j,k); for
/// factor systems of unequal length the square enumeration is filtered to
/// the index rectangle, preserving relative shell order.
std::vector<Mat> product_basis(const std::vector<Mat>& a, const std::vector<Mat>& b);

/// Shell-ordered (j,k) slots (0-based) of the rectangular product grid.
std::vector<std::pair<int, int>> product_shell_slots(int len_a, int len_b);

/// A factor system carrying elements and their Frobenius duals; the inputs
/// to product certification.
struct FactorSystem {
    Eigen::Index dim;
    std::vector<Mat> elements;
    std::vector<Mat> duals;
    FactorState phi;
    double bound;  // partial-sum constant of the factor system
    std::string description;

    static FactorSystem from_haar(const HaarSystem& sys, const NormSpec& spec);
    static FactorSystem from_matrix_units(Eigen::Index n);
};

/// Frames of the shell-ordered product system; duals are the Kronecker
/// products of the factor duals.
std::shared_ptr<const SystemFrames> make_product_frames(const FactorSystem& a,
                                                        const FactorSystem& b);

/// Certifies partial sums of the shell-ordered product system against the
/// derived bound 3 c_A c_B. The product state is kron of the factor states.
NormReport product_partial_sum_certify(const FactorSystem& a, const FactorSystem& b,
                                       NormSpec spec, const EstimationStrategy& strategy,
                                       const CertifyOptions& options = {});

/// x -> x (x) A_1^{1/p}; an isometry for the plain Schatten-p norm,
/// p in [1, inf).
Mat lp_embed(const Mat& x, PExp p, double alpha, double one_minus_alpha);
Mat lp_embed(const Mat& x, PExp p, double alpha);

}  // namespace ncbasis
