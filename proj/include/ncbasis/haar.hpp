#pragma once

#include <array>
#include <utility>
#include <vector>

#include "ncbasis/algebra.hpp"
#include "ncbasis/matrix.hpp"

namespace ncbasis {

/// Four 2x2 matrices orthonormal under the state inner product:
/// left side  rho_1(r_j^* r_k) = delta_jk,
/// right side rho_1(r_j r_k^*) = delta_jk.
/// Validated to 1e-12 at construction; the residual is kept for reporting.
class RademacherQuad {
public:
    RademacherQuad(std::array<Mat, 4> r, double alpha, double one_minus_alpha, Side side);

    Side side() const { return side_; }
    double alpha() const { return alpha_; }
    double one_minus_alpha() const { return oma_; }
    const Mat& r(int j) const { return r_.at(size_t(j)); }
    const std::array<Mat, 4>& all() const { return r_; }
    double gram_residual() const { return gram_residual_; }
    /// The uniform-boundedness hypothesis ||r_0|| <= 1 fails for this quad.
    bool r0_norm_exceeds_one() const { return r0_warn_; }

    static constexpr double kGramTolerance = 1e-12;

private:
    std::array<Mat, 4> r_;
    double alpha_, oma_;
    Side side_;
    double gram_residual_;
    bool r0_warn_;
};

/// The standard quadruple: r_0 = 1, r_1 = diag(1/sqrt(lam), -sqrt(lam)),
/// r_2 = flip, r_3 = [[0, -sqrt(lam)], [1/sqrt(lam), 0]] with
/// lam = alpha/(1-alpha); side = right replaces r_3 by its adjoint.
RademacherQuad standard_quad(double alpha, Side side);
RademacherQuad standard_quad(double alpha, double one_minus_alpha, Side side);

/// Square-shell pairing of a doubly indexed family (1-based):
///   s(j,k) = (k-1)^2 + j   if j <= k,
///   s(j,k) = j^2 - k + 1   if j > k.
int shell_index(int j, int k);
std::pair<int, int> shell_pair(int s);

/// n^2 matrix units of an n x n algebra in shell order; unit at slot
/// 0 <= t < n^2 sits at (row, col) = shell_pair(t+1) - (1,1).
std::vector<Mat> unit_positions_to_matrices(Eigen::Index n);

/// Matrix units of the 2^nu x 2^nu algebra in shell order.
std::vector<Mat> matrix_units_shell(int nu);

/// 0-based (row, col) of the matrix unit at 0-based shell slot t.
std::pair<Eigen::Index, Eigen::Index> unit_position(int t);

/// The inductively built family h_{4^nu q + k}: block q = 0 lifts the
/// lower-level system, blocks q = 1..3 pair shell matrix units with the
/// step's Rademacher elements. Stores one quad per level; coefficient
/// extraction runs the reduction recursion dual to the construction.
class HaarSystem {
public:
    explicit HaarSystem(std::vector<RademacherQuad> quads);
    static HaarSystem standard(double alpha, int level, Side side);
    static HaarSystem standard(double alpha, double one_minus_alpha, int level, Side side);

    Side side() const { return side_; }
    double alpha() const { return alpha_; }
    double one_minus_alpha() const { return oma_; }
    int level() const { return int(quads_.size()); }
    Eigen::Index dim() const { return Eigen::Index(1) << level(); }
    size_t size() const { return elements_.size(); }  // 4^level
    const std::vector<RademacherQuad>& quads() const { return quads_; }
    const std::vector<Mat>& elements() const { return elements_; }
    const Mat& element(size_t j) const { return elements_.at(j); }
    /// Some quad in the tower has ||r_0|| > 1 (uniform bound hypothesis broken).
    bool r0_norm_warning() const { return r0_warn_; }

    /// Coefficients alpha_j with x = sum alpha_j h_j.
    std::vector<Complex> analyze(const Mat& x) const;
    /// sum coeffs[j] h_j.
    Mat synthesize(const std::vector<Complex>& coeffs) const;

private:
    std::vector<Complex> analyze_level(const Mat& x, int lvl) const;

    std::vector<RademacherQuad> quads_;
    std::vector<Mat> elements_;
    double alpha_, oma_;
    Side side_;
    bool r0_warn_;
};

/// Dyadic masses of the distorted measure: masses[k] is the digit product
/// over the binary digits of k, identical to the k-th diagonal entry of A_nu.
struct MeasureTable {
    double alpha;
    int level;
    std::vector<double> masses;  // 2^level entries, sum 1
};

MeasureTable distorted_measure(double alpha, int level);
MeasureTable distorted_measure(double alpha, double one_minus_alpha, int level);

/// The diagonal reduction of the Haar system: chi_0 = 1, chi_1 = r_1 and
/// chi_{2^mu + k} = eps_k (x) r_1, padded up to dimension 2^nu. step_values
/// reads each chi as a step function on the 2^nu dyadic intervals.
struct CommutativeSystem {
    double alpha;
    int level;
    std::vector<Mat> chi;              // 2^level diagonal matrices, dim 2^level
    std::vector<RealVec> step_values;  // per-interval values (real for standard quads)
    MeasureTable measure;
};

CommutativeSystem commutative_haar(double alpha, int level);
CommutativeSystem commutative_haar(double alpha, double one_minus_alpha, int level);

/// Step values of the classical Haar function with index j on 2^level dyadic
/// intervals (L^inf normalization, values in {0, +1, -1}). Test oracle for
/// the alpha = 1/2 reduction.
RealVec classical_haar_values(int j, int level);

}  // namespace ncbasis
