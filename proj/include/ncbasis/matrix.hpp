#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ncbasis {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RealVec = Eigen::VectorXd;

/// Thrown when a decomposition fails to converge or produces non-finite
/// output. Maps to exit code 4 in the CLI.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Extended Schatten exponent p in [1, inf]. Infinity is a distinguished
/// state, not a large float.
class PExp {
public:
    static PExp finite(double p) {
        if (!(p >= 1.0) || !std::isfinite(p))
            throw std::domain_error("Schatten exponent must satisfy 1 <= p < inf");
        return PExp(p, false);
    }
    static PExp inf() { return PExp(0.0, true); }
    static PExp parse(const std::string& text);

    bool is_inf() const { return inf_; }
    double value() const {
        if (inf_) throw std::logic_error("value() called on p = inf");
        return p_;
    }
    std::string str() const;

    friend bool operator==(const PExp& a, const PExp& b) {
        return a.inf_ == b.inf_ && (a.inf_ || a.p_ == b.p_);
    }

private:
    PExp(double p, bool inf) : p_(p), inf_(inf) {}
    double p_;
    bool inf_;
};

enum class Side { plain, left, right };

std::string side_name(Side s);
Side side_parse(const std::string& text);

/// Which norm a computation runs in: plain Schatten-p, left-weighted
/// ||x W^{1/p}||_p or right-weighted ||W^{1/p} x||_p.
struct NormSpec {
    PExp p;
    Side side;
};

/// Strictly positive diagonal matrix; the density carrier of the faithful
/// states. Positivity is validated at construction.
class Diagonal {
public:
    explicit Diagonal(RealVec values);
    static Diagonal identity(Eigen::Index n);

    Eigen::Index dim() const { return values_.size(); }
    const RealVec& values() const { return values_; }
    Mat to_matrix() const;

private:
    RealVec values_;
};

/// Kronecker product; first factor owns the most significant index block:
/// (a (x) b)[(i*nb+k),(j*nb+l)] = a[i,j] * b[k,l].
Mat kron(const Mat& a, const Mat& b);

/// All singular values, sorted descending.
RealVec singular_values(const Mat& x);

/// (sum sigma_i^p)^{1/p}; max sigma_i for p = inf.
double schatten_norm(const Mat& x, PExp p);

/// Weighted Schatten norm per NormSpec. p = inf ignores the weight.
double weighted_norm(const Mat& x, const Diagonal& w, const NormSpec& spec);

/// Entrywise complex power of a positive diagonal: values[k]^z.
Mat diag_power(const Diagonal& w, Complex z);

/// Largest |entry| difference, the workhorse comparison in tests.
double max_abs_diff(const Mat& a, const Mat& b);

}  // namespace ncbasis
