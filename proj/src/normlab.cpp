#include "ncbasis/normlab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "ncbasis/rng.hpp"

namespace ncbasis {

namespace {

using VecMap = Eigen::Map<const CVec>;

CVec vec(const Mat& x) { return VecMap(x.data(), x.size()); }

Mat unvec(const CVec& v, Eigen::Index n) {
    return Eigen::Map<const Mat>(v.data(), n, n);
}

// Closed-form 2x2 singular values; the estimator hot path.
std::pair<double, double> sv2(const Mat& z) {
    const double a2 = std::norm(z(0, 0)) + std::norm(z(1, 0));
    const double b2 = std::norm(z(0, 1)) + std::norm(z(1, 1));
    const Complex c = std::conj(z(0, 0)) * z(0, 1) + std::conj(z(1, 0)) * z(1, 1);
    const double tr = a2 + b2;
    const double disc = std::sqrt(std::max(0.0, (a2 - b2) * (a2 - b2) + 4.0 * std::norm(c)));
    const double l1 = 0.5 * (tr + disc), l2 = std::max(0.0, 0.5 * (tr - disc));
    return {std::sqrt(l1), std::sqrt(l2)};
}

double schatten_fast(const Mat& z, PExp p) {
    if (z.rows() == 2) {
        auto [s1, s2] = sv2(z);
        if (p.is_inf()) return s1;
        const double pv = p.value();
        if (pv == 1.0) return s1 + s2;
        if (pv == 2.0) return std::sqrt(s1 * s1 + s2 * s2);
        return std::pow(std::pow(s1, pv) + std::pow(s2, pv), 1.0 / pv);
    }
    return schatten_norm(z, p);
}

// Schatten-p duality element: G with ||G||_q <= 1 and Re Tr(G^* z) = ||z||_p.
// At singular z the SVD's full factors complete the polar pairing.
Mat dual_element(const Mat& z, PExp p) {
    Eigen::JacobiSVD<Mat> svd(z, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svd.info() != Eigen::Success) throw NumericError("dual_element: SVD failed");
    const Mat& u = svd.matrixU();
    const Mat& v = svd.matrixV();
    if (p.is_inf()) return u.col(0) * v.col(0).adjoint();
    const double pv = p.value();
    if (pv == 1.0) return u * v.adjoint();
    const RealVec& s = svd.singularValues();
    const double np = schatten_fast(z, p);
    if (np < 1e-290) {
        const double q = pv / (pv - 1.0);
        return Mat(u * v.adjoint()) / std::pow(double(z.rows()), 1.0 / q);
    }
    RealVec d(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) d[i] = std::pow(s[i] / np, pv - 1.0);
    return u * d.asDiagonal() * v.adjoint();
}

std::pair<CVec, CVec> leading_pair(const Mat& w) {
    Eigen::JacobiSVD<Mat> svd(w, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) throw NumericError("leading_pair: SVD failed");
    return {svd.matrixU().col(0), svd.matrixV().col(0)};
}

CVec sphere_point(double theta, double phi) {
    CVec u(2);
    u[0] = std::cos(theta);
    u[1] = Complex(std::cos(phi), std::sin(phi)) * std::sin(theta);
    return u;
}

}  // namespace

std::string method_name(EstimationMethod m) {
    switch (m) {
        case EstimationMethod::sampling: return "sampling";
        case EstimationMethod::polar_ascent: return "polar_ascent";
        case EstimationMethod::grid_oracle: return "grid_oracle";
    }
    throw std::logic_error("bad method");
}

EstimationMethod method_parse(const std::string& text) {
    if (text == "sampling") return EstimationMethod::sampling;
    if (text == "polar_ascent") return EstimationMethod::polar_ascent;
    if (text == "grid_oracle") return EstimationMethod::grid_oracle;
    throw std::domain_error("bad estimation method: " + text);
}

std::shared_ptr<const SystemFrames> make_haar_frames(const HaarSystem& sys) {
    auto frames = std::make_shared<SystemFrames>();
    const Eigen::Index n = sys.dim();
    const Eigen::Index count = Eigen::Index(sys.size());
    frames->dim = n;
    frames->elements = sys.elements();
    frames->basis.resize(n * n, count);
    frames->dual.resize(n * n, count);
    for (Eigen::Index j = 0; j < count; ++j) frames->basis.col(j) = vec(sys.element(size_t(j)));
    Mat e = Mat::Zero(n, n);
    for (Eigen::Index idx = 0; idx < n * n; ++idx) {
        e(idx % n, idx / n) = 1.0;  // column-major unit, matches vec()
        std::vector<Complex> co = sys.analyze(e);
        for (Eigen::Index j = 0; j < count; ++j) frames->dual(idx, j) = std::conj(co[size_t(j)]);
        e(idx % n, idx / n) = 0.0;
    }
    return frames;
}

PartialSumMap::PartialSumMap(Kind kind, std::shared_ptr<const SystemFrames> frames, Mat mask,
                             int m, Eigen::Index dim, int system_size, Diagonal weight,
                             NormSpec spec)
    : kind_(kind),
      frames_(std::move(frames)),
      mask_(std::move(mask)),
      m_(m),
      dim_(dim),
      system_size_(system_size),
      weight_(std::move(weight)),
      spec_(spec) {
    if (m_ < 0 || m_ > system_size_)
        throw std::invalid_argument("PartialSumMap: m out of range [0, system size]");
    if (weight_.dim() != dim_)
        throw std::invalid_argument("PartialSumMap: weight dimension mismatch");
}

PartialSumMap PartialSumMap::haar(const HaarSystem& sys, int m, NormSpec spec) {
    Weight w(sys.alpha(), sys.one_minus_alpha(), sys.level());
    return from_frames(Kind::haar, make_haar_frames(sys), m, w.density(), spec);
}

PartialSumMap PartialSumMap::schur(int nu, int m, const Weight& w, NormSpec spec) {
    if (w.level() != nu) throw std::invalid_argument("PartialSumMap::schur: level mismatch");
    const Eigen::Index n = Eigen::Index(1) << nu;
    const int total = int(n * n);
    if (m < 0 || m > total) throw std::invalid_argument("schur: m out of range");
    Mat mask = Mat::Zero(n, n);
    for (int t = 0; t < m; ++t) {
        auto [r, c] = unit_position(t);
        mask(r, c) = 1.0;
    }
    return PartialSumMap(Kind::schur, nullptr, std::move(mask), m, n, total, w.density(), spec);
}

PartialSumMap PartialSumMap::from_frames(Kind kind, std::shared_ptr<const SystemFrames> frames,
                                         int m, Diagonal weight, NormSpec spec) {
    if (!frames) throw std::invalid_argument("from_frames: null frames");
    const Eigen::Index n = frames->dim;
    const int total = int(frames->basis.cols());
    return PartialSumMap(kind, std::move(frames), Mat(), m, n, total, std::move(weight), spec);
}

Mat PartialSumMap::apply(const Mat& x) const {
    if (x.rows() != dim_ || x.cols() != dim_)
        throw std::invalid_argument("PartialSumMap::apply: dimension mismatch");
    if (kind_ == Kind::schur) return mask_.cwiseProduct(x);
    if (m_ == 0) return Mat::Zero(dim_, dim_);
    CVec c = frames_->dual.leftCols(m_).adjoint() * vec(x);
    return unvec(frames_->basis.leftCols(m_) * c, dim_);
}

Mat PartialSumMap::apply_adjoint(const Mat& z) const {
    if (z.rows() != dim_ || z.cols() != dim_)
        throw std::invalid_argument("PartialSumMap::apply_adjoint: dimension mismatch");
    if (kind_ == Kind::schur) return mask_.cwiseProduct(z);  // real 0/1 mask
    if (m_ == 0) return Mat::Zero(dim_, dim_);
    CVec c = frames_->basis.leftCols(m_).adjoint() * vec(z);
    return unvec(frames_->dual.leftCols(m_) * c, dim_);
}

std::vector<Mat> PartialSumMap::probe_elements() const {
    std::vector<Mat> out;
    out.reserve(size_t(m_));
    if (kind_ == Kind::schur) {
        for (int t = 0; t < m_; ++t) {
            auto [r, c] = unit_position(t);
            Mat e = Mat::Zero(dim_, dim_);
            e(r, c) = 1.0;
            out.push_back(std::move(e));
        }
    } else {
        for (int j = 0; j < m_; ++j) out.push_back(frames_->elements[size_t(j)]);
    }
    return out;
}

Mat schur_project(int nu, int m, const Mat& x) {
    const Eigen::Index n = Eigen::Index(1) << nu;
    if (x.rows() != n || x.cols() != n)
        throw std::invalid_argument("schur_project: dimension mismatch");
    if (m < 0 || m > int(n * n)) throw std::invalid_argument("schur_project: m out of range");
    Mat y = Mat::Zero(n, n);
    for (int t = 0; t < m; ++t) {
        auto [r, c] = unit_position(t);
        y(r, c) = x(r, c);
    }
    return y;
}

Mat haar_partial_sum(const HaarSystem& sys, int m, const Mat& x) {
    if (m < 0 || size_t(m) > sys.size())
        throw std::invalid_argument("haar_partial_sum: m out of range");
    std::vector<Complex> c = sys.analyze(x);
    std::fill(c.begin() + m, c.end(), Complex(0.0));
    return sys.synthesize(c);
}

namespace {

// The estimator works in plain Schatten coordinates: with s = 1/p and
// W the weight, the left norm conjugates as y = x W^s, the right as
// y = W^s x, so that ||x||_{p,side} = ||y||_p and the conjugated map
// T~(y) has the same operator norm as the original.
class ConjugatedMap {
public:
    ConjugatedMap(const PartialSumMap& map) : map_(map) {
        const NormSpec& spec = map.spec();
        weighted_ = spec.side != Side::plain && !spec.p.is_inf();
        side_ = spec.side;
        p_ = spec.p;
        if (weighted_) {
            ws_ = map.weight().values().array().pow(1.0 / spec.p.value());
            wsi_ = ws_.cwiseInverse();
        }
    }

    Eigen::Index dim() const { return map_.dim(); }
    PExp p() const { return p_; }

    Mat apply(const Mat& y) const {
        if (!weighted_) return map_.apply(y);
        if (side_ == Side::left) return map_.apply(y * wsi_.asDiagonal()) * ws_.asDiagonal();
        return ws_.asDiagonal() * map_.apply(wsi_.asDiagonal() * y);
    }

    Mat apply_adjoint(const Mat& g) const {
        if (!weighted_) return map_.apply_adjoint(g);
        if (side_ == Side::left)
            return map_.apply_adjoint(g * ws_.asDiagonal()) * wsi_.asDiagonal();
        return wsi_.asDiagonal() * map_.apply_adjoint(ws_.asDiagonal() * g);
    }

    double gain(const Mat& y) const {
        const double den = schatten_fast(y, p_);
        if (den < 1e-290) return 0.0;
        return schatten_fast(apply(y), p_) / den;
    }

private:
    const PartialSumMap& map_;
    bool weighted_;
    Side side_;
    PExp p_ = PExp::finite(1.0);
    RealVec ws_, wsi_;
};

double run_sampling(const ConjugatedMap& cm, const EstimationStrategy& s) {
    const Eigen::Index n = cm.dim();
    const bool gaussians = cm.p().is_inf() || cm.p().value() > 1.0;
    double best = 0.0;
    const long long total = s.total_samples();
    for (long long i = 0; i < total; ++i) {
        Rng rng(mix_seed(s.seed, std::uint64_t(i)));
        CVec u = rng.unit_vector(n), v = rng.unit_vector(n);
        best = std::max(best, cm.gain(u * v.adjoint()));
        if (gaussians) best = std::max(best, cm.gain(rng.gaussian_matrix(n)));
    }
    return best;
}

double ascend(const ConjugatedMap& cm, CVec u, CVec v, int iterations) {
    double best = 0.0, prev = 0.0;
    for (int it = 0; it < iterations; ++it) {
        Mat z = cm.apply(u * v.adjoint());
        const double val = schatten_fast(z, cm.p());
        best = std::max(best, val);
        if (it > 0 && val <= prev * (1.0 + 1e-10)) break;
        prev = val;
        Mat g = dual_element(z, cm.p());
        Mat w = cm.apply_adjoint(g);
        if (w.cwiseAbs().maxCoeff() < 1e-290) break;
        std::tie(u, v) = leading_pair(w);
    }
    return best;
}

double run_polar_ascent(const ConjugatedMap& cm, const EstimationStrategy& s) {
    const Eigen::Index n = cm.dim();
    double best = 0.0;
    for (int r = 0; r < s.restarts; ++r) {
        double start_val = -1.0;
        CVec su, sv;
        for (int i = 0; i < s.samples_per_restart; ++i) {
            const std::uint64_t ctr =
                std::uint64_t(r) * std::uint64_t(s.samples_per_restart) + std::uint64_t(i);
            Rng rng(mix_seed(s.seed, ctr));
            CVec u = rng.unit_vector(n), v = rng.unit_vector(n);
            const double val = cm.gain(u * v.adjoint());
            if (val > start_val) {
                start_val = val;
                su = u;
                sv = v;
            }
        }
        best = std::max(best, start_val);
        if (su.size()) best = std::max(best, ascend(cm, su, sv, s.ascent_iterations));
    }
    return best;
}

double run_grid_oracle(const ConjugatedMap& cm) {
    if (cm.dim() != 2)
        throw std::invalid_argument("grid_oracle: only available at level 1 (dim 2)");
    constexpr double kPi = 3.14159265358979323846;
    const int nt = 25, np = 24;  // coarse stage; refined 8x below (~200 per axis)
    const double dt = (kPi / 2.0) / (nt - 1), dp = (2.0 * kPi) / np;

    struct Cand {
        double val, tu, pu, tv, pv;
    };
    std::vector<Cand> top;
    auto offer = [&top](const Cand& c) {
        top.push_back(c);
        std::sort(top.begin(), top.end(),
                  [](const Cand& a, const Cand& b) { return a.val > b.val; });
        if (top.size() > 10) top.pop_back();
    };

    auto evaluate = [&cm](double tu, double pu, double tv, double pv) {
        Mat y = sphere_point(tu, pu) * sphere_point(tv, pv).adjoint();
        return schatten_fast(cm.apply(y), cm.p());  // ||y||_p = 1 for unit pairs
    };

    for (int a = 0; a < nt; ++a)
        for (int b = 0; b < np; ++b)
            for (int c = 0; c < nt; ++c)
                for (int d = 0; d < np; ++d) {
                    Cand cand{0.0, a * dt, b * dp, c * dt, d * dp};
                    cand.val = evaluate(cand.tu, cand.pu, cand.tv, cand.pv);
                    offer(cand);
                }

    double best = top.empty() ? 0.0 : top.front().val;
    const int span = 8;
    for (const Cand& c : top)
        for (int a = -span; a <= span; ++a)
            for (int b = -span; b <= span; ++b)
                for (int e = -span; e <= span; ++e)
                    for (int d = -span; d <= span; ++d) {
                        const double tu = c.tu + a * dt / span, pu = c.pu + b * dp / span;
                        const double tv = c.tv + e * dt / span, pv = c.pv + d * dp / span;
                        best = std::max(best, evaluate(tu, pu, tv, pv));
                    }
    return best;
}

}  // namespace

double estimate_map_norm(const PartialSumMap& map, const EstimationStrategy& strategy) {
    ConjugatedMap cm(map);
    double best = 0.0;
    // Fixed elements give exact ratio 1; they pin the projection-norm floor.
    for (const Mat& b : map.probe_elements()) {
        const double den = weighted_norm(b, map.weight(), map.spec());
        if (den < 1e-290) continue;
        best = std::max(best, weighted_norm(map.apply(b), map.weight(), map.spec()) / den);
    }
    switch (strategy.method) {
        case EstimationMethod::sampling:
            return std::max(best, run_sampling(cm, strategy));
        case EstimationMethod::polar_ascent:
            return std::max(best, run_polar_ascent(cm, strategy));
        case EstimationMethod::grid_oracle:
            return std::max(best, run_grid_oracle(cm));
    }
    throw std::logic_error("bad method");
}

double theoretical_bound(const std::vector<RademacherQuad>& quads, const NormSpec& spec) {
    if (quads.empty()) throw std::invalid_argument("theoretical_bound: no quads");
    const RademacherQuad& base = quads[0];
    Weight w1(base.alpha(), base.one_minus_alpha(), 1);
    auto opn = [](const Mat& x) { return schatten_norm(x, PExp::inf()); };
    double c = 0.0;
    for (int j = 0; j < 4; ++j)
        c += opn(base.r(j)) * weighted_norm(base.r(j), w1.density(), spec);
    for (size_t lvl = 1; lvl < quads.size(); ++lvl) {
        const RademacherQuad& q = quads[lvl];
        const double r0sq = opn(q.r(0)) * opn(q.r(0));
        double tail = 0.0;
        for (int j = 1; j < 4; ++j) tail += opn(q.r(j)) * opn(q.r(j));
        c = std::max(c * r0sq, r0sq + 2.0 * tail);
    }
    return c;
}

double theoretical_bound(const HaarSystem& sys, const NormSpec& spec) {
    return theoretical_bound(sys.quads(), spec);
}

bool NormReport::all_pass() const {
    for (const NormReportRow& r : rows)
        if (r.counted && !r.pass) return false;
    return true;
}

std::vector<int> certification_schedule(int nu) {
    const int total = 1 << (2 * nu);
    std::vector<int> ms;
    if (nu <= 2) {
        for (int m = 0; m <= total; ++m) ms.push_back(m);
        return ms;
    }
    ms.push_back(0);
    for (int m = 1; m <= total; m *= 2) ms.push_back(m);
    for (int mu = 0; (1 << (2 * mu)) <= total; ++mu)
        for (int q = 1; q <= 3; ++q) {
            const int m = q << (2 * mu);
            if (m <= total) ms.push_back(m);
        }
    std::sort(ms.begin(), ms.end());
    ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
    return ms;
}

namespace {

NormReportRow make_row(double alpha, int level, const NormSpec& spec, int m,
                       const EstimationStrategy& strategy, double bound) {
    NormReportRow row;
    row.alpha = alpha;
    row.level = level;
    row.p = spec.p;
    row.norm_side = spec.side;
    row.m = m;
    row.bound = bound;
    row.method = strategy.method;
    row.samples = strategy.total_samples();
    row.seed = strategy.seed;
    return row;
}

}  // namespace

NormReport certify(const HaarSystem& sys, NormSpec spec, const EstimationStrategy& strategy,
                   const CertifyOptions& options) {
    if (sys.level() > options.level_cap)
        throw std::invalid_argument("certify: level exceeds cap (raise the cap explicitly)");
    NormReport report;
    report.suite = "haar";
    report.system_side = sys.side();
    report.tolerance = options.tolerance;
    report.bound_kind = "inductive";
    const double bound = theoretical_bound(sys, spec);
    auto frames = make_haar_frames(sys);
    Weight w(sys.alpha(), sys.one_minus_alpha(), sys.level());
    for (int m : certification_schedule(sys.level())) {
        NormReportRow row = make_row(sys.alpha(), sys.level(), spec, m, strategy, bound);
        if (m == 0) {
            row.estimate = 0.0;
            row.counted = false;
        } else {
            try {
                PartialSumMap map = PartialSumMap::from_frames(PartialSumMap::Kind::haar,
                                                               frames, m, w.density(), spec);
                row.estimate = estimate_map_norm(map, strategy);
                row.pass = row.estimate <= bound + options.tolerance;
            } catch (const std::exception& ex) {
                row.estimate = std::numeric_limits<double>::quiet_NaN();
                row.pass = false;
                row.error = ex.what();
            }
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

NormReport certify_schur(int nu, const Weight& w, NormSpec spec,
                         const EstimationStrategy& strategy, const CertifyOptions& options) {
    if (nu > options.level_cap)
        throw std::invalid_argument("certify_schur: level exceeds cap");
    if (w.level() != nu) throw std::invalid_argument("certify_schur: weight level mismatch");
    NormReport report;
    report.suite = "schur";
    report.system_side = spec.side;
    report.tolerance = options.tolerance;
    report.bound_kind = "matrix-units";
    const double bound = 2.0;
    for (int m : certification_schedule(nu)) {
        NormReportRow row = make_row(w.alpha(), nu, spec, m, strategy, bound);
        if (m == 0) {
            row.estimate = 0.0;
            row.counted = false;
        } else {
            try {
                PartialSumMap map = PartialSumMap::schur(nu, m, w, spec);
                row.estimate = estimate_map_norm(map, strategy);
                row.pass = row.estimate <= bound + options.tolerance;
            } catch (const std::exception& ex) {
                row.estimate = std::numeric_limits<double>::quiet_NaN();
                row.pass = false;
                row.error = ex.what();
            }
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace ncbasis
