#include "ncbasis/matrix.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

namespace ncbasis {

PExp PExp::parse(const std::string& text) {
    if (text == "inf" || text == "Inf" || text == "INF" || text == "infinity")
        return PExp::inf();
    size_t pos = 0;
    double p = std::stod(text, &pos);
    if (pos != text.size()) throw std::domain_error("bad Schatten exponent: " + text);
    if (std::isinf(p)) return PExp::inf();
    return PExp::finite(p);
}

std::string PExp::str() const {
    if (inf_) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", p_);
    return buf;
}

std::string side_name(Side s) {
    switch (s) {
        case Side::plain: return "plain";
        case Side::left: return "left";
        case Side::right: return "right";
    }
    throw std::logic_error("bad side");
}

Side side_parse(const std::string& text) {
    if (text == "plain") return Side::plain;
    if (text == "left") return Side::left;
    if (text == "right") return Side::right;
    throw std::domain_error("bad side: " + text);
}

Diagonal::Diagonal(RealVec values) : values_(std::move(values)) {
    if (values_.size() < 1) throw std::invalid_argument("Diagonal: empty");
    for (Eigen::Index k = 0; k < values_.size(); ++k)
        if (!(values_[k] > 0.0) || !std::isfinite(values_[k]))
            throw std::invalid_argument("Diagonal: entries must be strictly positive");
}

Diagonal Diagonal::identity(Eigen::Index n) {
    return Diagonal(RealVec::Ones(n));
}

Mat Diagonal::to_matrix() const {
    Mat m = Mat::Zero(dim(), dim());
    for (Eigen::Index k = 0; k < dim(); ++k) m(k, k) = values_[k];
    return m;
}

Mat kron(const Mat& a, const Mat& b) {
    const Eigen::Index an = a.rows(), bn = b.rows();
    if (a.cols() != an || b.cols() != bn)
        throw std::invalid_argument("kron: square matrices required");
    Mat out(an * bn, an * bn);
    for (Eigen::Index i = 0; i < an; ++i)
        for (Eigen::Index j = 0; j < an; ++j)
            out.block(i * bn, j * bn, bn, bn) = a(i, j) * b;
    return out;
}

RealVec singular_values(const Mat& x) {
    if (x.rows() != x.cols()) throw std::invalid_argument("singular_values: square input required");
    Eigen::JacobiSVD<Mat> svd(x);
    if (svd.info() != Eigen::Success)
        throw NumericError("singular value decomposition did not converge");
    RealVec s = svd.singularValues();
    if (!s.allFinite()) throw NumericError("singular values not finite");
    return s;  // Eigen returns them sorted descending
}

double schatten_norm(const Mat& x, PExp p) {
    RealVec s = singular_values(x);
    if (p.is_inf()) return s.size() ? s[0] : 0.0;
    const double pv = p.value();
    if (pv == 1.0) return s.sum();
    if (pv == 2.0) return std::sqrt(s.squaredNorm());
    double acc = 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i) acc += std::pow(s[i], pv);
    return std::pow(acc, 1.0 / pv);
}

double weighted_norm(const Mat& x, const Diagonal& w, const NormSpec& spec) {
    if (spec.side == Side::plain || spec.p.is_inf()) return schatten_norm(x, spec.p);
    if (x.rows() != w.dim())
        throw std::invalid_argument("weighted_norm: dimension mismatch");
    RealVec wp = w.values().array().pow(1.0 / spec.p.value());
    Mat y = spec.side == Side::left ? Mat(x * wp.asDiagonal())
                                    : Mat(wp.asDiagonal() * x);
    return schatten_norm(y, spec.p);
}

Mat diag_power(const Diagonal& w, Complex z) {
    Mat m = Mat::Zero(w.dim(), w.dim());
    for (Eigen::Index k = 0; k < w.dim(); ++k)
        m(k, k) = std::exp(z * std::log(w.values()[k]));
    return m;
}

double max_abs_diff(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("max_abs_diff: shape mismatch");
    return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace ncbasis
