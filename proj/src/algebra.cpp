#include "ncbasis/algebra.hpp"

#include <cmath>

namespace ncbasis {

namespace {

Diagonal make_density(double alpha, double oma, int level) {
    const Eigen::Index n = Eigen::Index(1) << level;
    RealVec d(n);
    for (Eigen::Index k = 0; k < n; ++k)
        d[k] = Weight::digit_product(alpha, oma, level, std::uint64_t(k));
    return Diagonal(std::move(d));
}

}  // namespace

Weight::Weight(double alpha, double one_minus_alpha, int level)
    : alpha_(alpha),
      oma_(one_minus_alpha),
      level_(level),
      density_(make_density(alpha, one_minus_alpha, level)) {
    if (!(alpha > 0.0) || !(alpha <= 0.5))
        throw std::invalid_argument("Weight: alpha must lie in (0, 1/2]");
    if (std::abs((alpha + one_minus_alpha) - 1.0) > 1e-15)
        throw std::invalid_argument("Weight: alpha + (1-alpha) must equal 1");
    if (level < 1 || level > 12)
        throw std::invalid_argument("Weight: level must lie in [1, 12]");
}

double Weight::digit_product(double alpha, double one_minus_alpha, int level,
                             std::uint64_t k) {
    double m = 1.0;
    for (int s = 0; s < level; ++s)
        m *= ((k >> s) & 1u) ? one_minus_alpha : alpha;
    return m;
}

Complex state(const Weight& w, const Mat& x) {
    if (x.rows() != w.dim() || x.cols() != w.dim())
        throw std::invalid_argument("state: dimension mismatch with A_nu");
    Complex acc = 0.0;
    for (Eigen::Index k = 0; k < x.rows(); ++k) acc += x(k, k) * w.density().values()[k];
    return acc;
}

Mat embed(const Mat& x) {
    return kron(x, Mat::Identity(2, 2));
}

Mat modular_flow(const ModularContext& ctx, const Mat& x) {
    return modular_flow(ctx.weight, ctx.t, x);
}

Mat modular_flow(const Weight& w, double t, const Mat& x) {
    if (x.rows() != w.dim() || x.cols() != w.dim())
        throw std::invalid_argument("modular_flow: dimension mismatch");
    Mat u = diag_power(w.density(), Complex(0.0, t));
    Mat uinv = diag_power(w.density(), Complex(0.0, -t));
    return u * x * uinv;
}

Complex kms_function(const Weight& w, const Mat& x, const Mat& y, Complex z) {
    if (x.rows() != w.dim() || y.rows() != w.dim())
        throw std::invalid_argument("kms_function: dimension mismatch");
    const Complex i(0.0, 1.0);
    Mat a_front = diag_power(w.density(), 1.0 + i * z);
    Mat a_back = diag_power(w.density(), -i * z);
    return (a_front * x * a_back * y).trace();
}

Mat expect_level(const Weight& w_next, const Mat& x) {
    if (x.rows() != w_next.dim())
        throw std::invalid_argument("expect_level: dimension mismatch with weight");
    return reduce_last_factor(x, w_next.alpha(), w_next.one_minus_alpha());
}

Mat reduce_last_factor(const Mat& x, double alpha, double one_minus_alpha) {
    if (x.rows() % 2 != 0 || x.rows() != x.cols())
        throw std::invalid_argument("reduce_last_factor: even square matrix required");
    const Eigen::Index n = x.rows() / 2;
    Mat y(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            y(i, j) = alpha * x(2 * i, 2 * j) + one_minus_alpha * x(2 * i + 1, 2 * j + 1);
    return y;
}

Mat expect_diagonal(const Mat& x) {
    Mat y = Mat::Zero(x.rows(), x.cols());
    for (Eigen::Index k = 0; k < std::min(x.rows(), x.cols()); ++k) y(k, k) = x(k, k);
    return y;
}

}  // namespace ncbasis
