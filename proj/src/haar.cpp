#include "ncbasis/haar.hpp"

#include <cmath>

namespace ncbasis {

namespace {

Complex rho1(const Mat& m, double alpha, double oma) {
    return alpha * m(0, 0) + oma * m(1, 1);
}

double op_norm(const Mat& x) { return schatten_norm(x, PExp::inf()); }

Mat last_factor(Eigen::Index half_dim, const Mat& r) {
    return kron(Mat::Identity(half_dim, half_dim), r);
}

}  // namespace

RademacherQuad::RademacherQuad(std::array<Mat, 4> r, double alpha,
                               double one_minus_alpha, Side side)
    : r_(std::move(r)), alpha_(alpha), oma_(one_minus_alpha), side_(side) {
    if (side_ == Side::plain)
        throw std::invalid_argument("RademacherQuad: side must be left or right");
    if (!(alpha_ > 0.0) || !(alpha_ <= 0.5))
        throw std::invalid_argument("RademacherQuad: alpha must lie in (0, 1/2]");
    for (const Mat& m : r_)
        if (m.rows() != 2 || m.cols() != 2)
            throw std::invalid_argument("RademacherQuad: 2x2 matrices required");
    double residual = 0.0;
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) {
            Mat prod = side_ == Side::left ? Mat(r_[j].adjoint() * r_[k])
                                           : Mat(r_[j] * r_[k].adjoint());
            Complex g = rho1(prod, alpha_, oma_);
            residual = std::max(residual, std::abs(g - (j == k ? 1.0 : 0.0)));
        }
    gram_residual_ = residual;
    if (residual > kGramTolerance)
        throw std::invalid_argument("RademacherQuad: Gram condition violated, residual " +
                                    std::to_string(residual));
    r0_warn_ = op_norm(r_[0]) > 1.0 + 1e-12;
}

RademacherQuad standard_quad(double alpha, Side side) {
    return standard_quad(alpha, 1.0 - alpha, side);
}

RademacherQuad standard_quad(double alpha, double one_minus_alpha, Side side) {
    if (!(alpha > 0.0) || !(alpha <= 0.5))
        throw std::invalid_argument("standard_quad: alpha must lie in (0, 1/2]");
    const double lam = alpha / one_minus_alpha;
    const double s = std::sqrt(lam);
    Mat r0 = Mat::Identity(2, 2);
    Mat r1(2, 2), r2(2, 2), r3(2, 2);
    r1 << 1.0 / s, 0, 0, -s;
    r2 << 0, 1, 1, 0;
    r3 << 0, -s, 1.0 / s, 0;
    if (side == Side::right) r3 = r3.adjoint().eval();
    return RademacherQuad({r0, r1, r2, r3}, alpha, one_minus_alpha, side);
}

int shell_index(int j, int k) {
    if (j < 1 || k < 1) throw std::invalid_argument("shell_index: 1-based indices required");
    return j <= k ? (k - 1) * (k - 1) + j : j * j - k + 1;
}

std::pair<int, int> shell_pair(int s) {
    if (s < 1) throw std::invalid_argument("shell_pair: s >= 1 required");
    int m = int(std::lround(std::ceil(std::sqrt(double(s)))));
    while (m * m < s) ++m;
    while ((m - 1) * (m - 1) >= s) --m;
    const int base = (m - 1) * (m - 1);
    if (s <= base + m) return {s - base, m};  // column segment, j <= k
    return {m, m * m - s + 1};                // row segment, j > k
}

std::pair<Eigen::Index, Eigen::Index> unit_position(int t) {
    auto [j, k] = shell_pair(t + 1);
    return {Eigen::Index(j - 1), Eigen::Index(k - 1)};
}

std::vector<Mat> unit_positions_to_matrices(Eigen::Index n) {
    std::vector<Mat> units;
    units.reserve(size_t(n * n));
    for (int t = 0; t < int(n * n); ++t) {
        auto [r, c] = unit_position(t);
        Mat e = Mat::Zero(n, n);
        e(r, c) = 1.0;
        units.push_back(std::move(e));
    }
    return units;
}

std::vector<Mat> matrix_units_shell(int nu) {
    if (nu < 1) throw std::invalid_argument("matrix_units_shell: nu >= 1 required");
    return unit_positions_to_matrices(Eigen::Index(1) << nu);
}

HaarSystem::HaarSystem(std::vector<RademacherQuad> quads) : quads_(std::move(quads)) {
    if (quads_.empty()) throw std::invalid_argument("HaarSystem: at least one quad required");
    side_ = quads_[0].side();
    alpha_ = quads_[0].alpha();
    oma_ = quads_[0].one_minus_alpha();
    r0_warn_ = false;
    for (const RademacherQuad& q : quads_) {
        if (q.side() != side_)
            throw std::invalid_argument("HaarSystem: side mismatch among quads");
        if (q.alpha() != alpha_)
            throw std::invalid_argument("HaarSystem: alpha mismatch among quads");
        r0_warn_ = r0_warn_ || q.r0_norm_exceeds_one();
    }
    const int nu = level();
    if (nu > 6) throw std::invalid_argument("HaarSystem: level capped at 6 (4^nu elements)");

    elements_.assign(quads_[0].all().begin(), quads_[0].all().end());
    for (int lvl = 1; lvl < nu; ++lvl) {
        const RademacherQuad& q = quads_[size_t(lvl)];
        const Eigen::Index half = Eigen::Index(1) << lvl;
        std::vector<Mat> units = unit_positions_to_matrices(half);
        std::vector<Mat> next;
        next.reserve(elements_.size() * 4);
        for (int blk = 0; blk < 4; ++blk)
            for (size_t k = 0; k < elements_.size(); ++k)
                next.push_back(blk == 0 ? kron(elements_[k], q.r(0))
                                        : kron(units[k], q.r(blk)));
        elements_ = std::move(next);
    }
    for (const Mat& h : elements_)
        if (h.cwiseAbs().maxCoeff() == 0.0)
            throw std::invalid_argument("HaarSystem: zero element");
}

HaarSystem HaarSystem::standard(double alpha, int level, Side side) {
    return standard(alpha, 1.0 - alpha, level, side);
}

HaarSystem HaarSystem::standard(double alpha, double one_minus_alpha, int level, Side side) {
    if (level < 1) throw std::invalid_argument("HaarSystem: level >= 1 required");
    std::vector<RademacherQuad> quads(size_t(level),
                                      standard_quad(alpha, one_minus_alpha, side));
    return HaarSystem(std::move(quads));
}

std::vector<Complex> HaarSystem::analyze(const Mat& x) const {
    if (x.rows() != dim() || x.cols() != dim())
        throw std::invalid_argument("analyze: dimension mismatch");
    return analyze_level(x, level());
}

std::vector<Complex> HaarSystem::analyze_level(const Mat& x, int lvl) const {
    const RademacherQuad& q = quads_[size_t(lvl - 1)];
    if (lvl == 1) {
        std::vector<Complex> c(4);
        for (int j = 0; j < 4; ++j) {
            Mat prod = side_ == Side::left ? Mat(q.r(j).adjoint() * x)
                                           : Mat(x * q.r(j).adjoint());
            c[size_t(j)] = rho1(prod, alpha_, oma_);
        }
        return c;
    }
    const Eigen::Index half = x.rows() / 2;
    const size_t n4 = size_t(1) << (2 * (lvl - 1));
    std::vector<Complex> c(4 * n4);
    for (int blk = 0; blk < 4; ++blk) {
        Mat rq = last_factor(half, q.r(blk));
        Mat y = side_ == Side::left
                    ? reduce_last_factor(rq.adjoint() * x, alpha_, oma_)
                    : reduce_last_factor(x * rq.adjoint(), alpha_, oma_);
        if (blk == 0) {
            std::vector<Complex> lower = analyze_level(y, lvl - 1);
            std::copy(lower.begin(), lower.end(), c.begin());
        } else {
            for (size_t k = 0; k < n4; ++k) {
                auto [r, col] = unit_position(int(k));
                c[size_t(blk) * n4 + k] = y(r, col);
            }
        }
    }
    return c;
}

Mat HaarSystem::synthesize(const std::vector<Complex>& coeffs) const {
    if (coeffs.size() != elements_.size())
        throw std::invalid_argument("synthesize: coefficient count mismatch");
    Mat acc = Mat::Zero(dim(), dim());
    for (size_t j = 0; j < coeffs.size(); ++j) acc += coeffs[j] * elements_[j];
    return acc;
}

MeasureTable distorted_measure(double alpha, int level) {
    return distorted_measure(alpha, 1.0 - alpha, level);
}

MeasureTable distorted_measure(double alpha, double one_minus_alpha, int level) {
    if (level < 1 || level > 24)
        throw std::invalid_argument("distorted_measure: level out of range");
    MeasureTable t{alpha, level, {}};
    const std::uint64_t n = std::uint64_t(1) << level;
    t.masses.reserve(n);
    for (std::uint64_t k = 0; k < n; ++k)
        t.masses.push_back(Weight::digit_product(alpha, one_minus_alpha, level, k));
    return t;
}

CommutativeSystem commutative_haar(double alpha, int level) {
    return commutative_haar(alpha, 1.0 - alpha, level);
}

CommutativeSystem commutative_haar(double alpha, double one_minus_alpha, int level) {
    if (level < 1 || level > 10)
        throw std::invalid_argument("commutative_haar: level out of range");
    RademacherQuad q = standard_quad(alpha, one_minus_alpha, Side::left);
    const Eigen::Index n = Eigen::Index(1) << level;

    CommutativeSystem sys{alpha, level, {}, {}, distorted_measure(alpha, one_minus_alpha, level)};
    sys.chi.push_back(Mat::Identity(n, n));
    for (int mu = 0; mu < level; ++mu) {
        const Eigen::Index block = Eigen::Index(1) << mu;
        const Eigen::Index pad = n / (2 * block);
        for (Eigen::Index k = 0; k < block; ++k) {
            Mat eps = Mat::Zero(block, block);
            eps(k, k) = 1.0;
            Mat chi = kron(eps, q.r(1));
            if (pad > 1) chi = kron(chi, Mat::Identity(pad, pad));
            sys.chi.push_back(std::move(chi));
        }
    }
    sys.step_values.reserve(sys.chi.size());
    for (const Mat& chi : sys.chi) {
        RealVec v(n);
        for (Eigen::Index t = 0; t < n; ++t) v[t] = chi(t, t).real();
        sys.step_values.push_back(std::move(v));
    }
    return sys;
}

RealVec classical_haar_values(int j, int level) {
    const Eigen::Index n = Eigen::Index(1) << level;
    RealVec v = RealVec::Zero(n);
    if (j == 0) return RealVec::Ones(n);
    int mu = 0;
    while ((1 << (mu + 1)) <= j) ++mu;
    const int k = j - (1 << mu);
    const Eigen::Index width = n >> mu;  // support length in grid cells
    const Eigen::Index start = Eigen::Index(k) * width;
    for (Eigen::Index t = 0; t < width / 2; ++t) v[start + t] = 1.0;
    for (Eigen::Index t = width / 2; t < width; ++t) v[start + t] = -1.0;
    return v;
}

}  // namespace ncbasis
