#include "ncbasis/tensorprod.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ncbasis {

FactorState FactorState::from_weight(const Weight& w) {
    return FactorState{w.dim(), w.density()};
}

FactorState FactorState::normalized_trace(Eigen::Index n) {
    if (n < 1) throw std::invalid_argument("normalized_trace: n >= 1 required");
    return FactorState{n, Diagonal(RealVec::Constant(n, 1.0 / double(n)))};
}

FactorState FactorState::explicit_density(Diagonal d) {
    if (std::abs(d.values().sum() - 1.0) > 1e-12)
        throw std::invalid_argument("explicit_density: trace must equal 1");
    const Eigen::Index n = d.dim();
    return FactorState{n, std::move(d)};
}

Diagonal ProductAlgebra::joint_density() const {
    RealVec joint(dim());
    for (Eigen::Index i = 0; i < left.dim; ++i)
        for (Eigen::Index k = 0; k < right.dim; ++k)
            joint[i * right.dim + k] = left.density.values()[i] * right.density.values()[k];
    return Diagonal(std::move(joint));
}

Mat expect_left_factor(const ProductAlgebra& pa, const Mat& z) {
    const Eigen::Index na = pa.left.dim, nb = pa.right.dim;
    if (z.rows() != na * nb || z.cols() != na * nb)
        throw std::invalid_argument("expect_left_factor: dimension mismatch");
    const RealVec& d = pa.right.density.values();
    Mat y = Mat::Zero(na, na);
    for (Eigen::Index i = 0; i < na; ++i)
        for (Eigen::Index j = 0; j < na; ++j)
            for (Eigen::Index k = 0; k < nb; ++k)
                y(i, j) += z(i * nb + k, j * nb + k) * d[k];
    return y;
}

namespace {

Complex factor_state_value(const FactorState& phi, const Mat& m) {
    Complex acc = 0.0;
    for (Eigen::Index k = 0; k < phi.dim; ++k) acc += m(k, k) * phi.density.values()[k];
    return acc;
}

}  // namespace

DecompositionSystem::DecompositionSystem(std::vector<Mat> elements, FactorState phi)
    : phi_(std::move(phi)) {
    if (elements.empty()) throw std::invalid_argument("DecompositionSystem: empty system");
    elements_.reserve(elements.size());
    scales_.reserve(elements.size());
    for (Mat& y : elements) {
        if (y.rows() != phi_.dim || y.cols() != phi_.dim)
            throw std::invalid_argument("DecompositionSystem: element dimension mismatch");
        const double nrm2 = factor_state_value(phi_, y.adjoint() * y).real();
        if (!(nrm2 > 1e-280))
            throw std::invalid_argument("DecompositionSystem: element with vanishing state norm");
        const double scale = 1.0 / std::sqrt(nrm2);
        scales_.push_back(scale);
        elements_.push_back(scale * y);
    }
    double residual = 0.0;
    for (size_t j = 0; j < elements_.size(); ++j)
        for (size_t k = 0; k < elements_.size(); ++k) {
            const Complex g = factor_state_value(phi_, elements_[j].adjoint() * elements_[k]);
            residual = std::max(residual, std::abs(g - (j == k ? 1.0 : 0.0)));
        }
    gram_residual_ = residual;
    if (residual > 1e-12)
        throw std::invalid_argument(
            "DecompositionSystem: system is not orthogonal under the state, residual " +
            std::to_string(residual));
}

DecompositionSystem DecompositionSystem::from_haar(const HaarSystem& sys) {
    Weight w(sys.alpha(), sys.one_minus_alpha(), sys.level());
    return DecompositionSystem(sys.elements(), FactorState::from_weight(w));
}

DecompositionSystem DecompositionSystem::from_matrix_units(Eigen::Index n) {
    return DecompositionSystem(unit_positions_to_matrices(n), FactorState::normalized_trace(n));
}

Mat decomposition_project(const ProductAlgebra& pa, const DecompositionSystem& ds, size_t j,
                          const Mat& z) {
    if (j >= ds.size()) throw std::out_of_range("decomposition_project: index out of range");
    const Mat& y = ds.elements()[j];
    Mat lifted = kron(Mat::Identity(pa.left.dim, pa.left.dim), y);
    Mat reduced = expect_left_factor(pa, lifted.adjoint() * z);
    return kron(reduced, y);
}

std::vector<std::pair<int, int>> product_shell_slots(int len_a, int len_b) {
    std::vector<std::pair<int, int>> slots;
    slots.reserve(size_t(len_a) * size_t(len_b));
    for (int j = 1; j <= len_a; ++j)
        for (int k = 1; k <= len_b; ++k) slots.emplace_back(j, k);
    std::sort(slots.begin(), slots.end(), [](const auto& x, const auto& y) {
        return shell_index(x.first, x.second) < shell_index(y.first, y.second);
    });
    for (auto& s : slots) {
        --s.first;
        --s.second;
    }
    return slots;
}

std::vector<Mat> product_basis(const std::vector<Mat>& a, const std::vector<Mat>& b) {
    std::vector<Mat> out;
    out.reserve(a.size() * b.size());
    for (auto [j, k] : product_shell_slots(int(a.size()), int(b.size())))
        out.push_back(kron(a[size_t(j)], b[size_t(k)]));
    return out;
}

FactorSystem FactorSystem::from_haar(const HaarSystem& sys, const NormSpec& spec) {
    auto frames = make_haar_frames(sys);
    const Eigen::Index n = sys.dim();
    std::vector<Mat> duals;
    duals.reserve(sys.size());
    for (Eigen::Index j = 0; j < frames->dual.cols(); ++j)
        duals.push_back(Eigen::Map<const Mat>(frames->dual.col(j).data(), n, n));
    Weight w(sys.alpha(), sys.one_minus_alpha(), sys.level());
    char buf[128];
    std::snprintf(buf, sizeof(buf), "haar side=%s alpha=%.17g level=%d",
                  side_name(sys.side()).c_str(), sys.alpha(), sys.level());
    return FactorSystem{n,
                        frames->elements,
                        std::move(duals),
                        FactorState::from_weight(w),
                        theoretical_bound(sys, spec),
                        buf};
}

FactorSystem FactorSystem::from_matrix_units(Eigen::Index n) {
    std::vector<Mat> units = unit_positions_to_matrices(n);
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "matrix-units n=%lld state=normalized-trace dual-sys-scale=sqrt(n)",
                  static_cast<long long>(n));
    return FactorSystem{n, units, units, FactorState::normalized_trace(n), 2.0, buf};
}

std::shared_ptr<const SystemFrames> make_product_frames(const FactorSystem& a,
                                                        const FactorSystem& b) {
    auto frames = std::make_shared<SystemFrames>();
    const Eigen::Index n = a.dim * b.dim;
    const auto slots = product_shell_slots(int(a.elements.size()), int(b.elements.size()));
    frames->dim = n;
    frames->basis.resize(n * n, Eigen::Index(slots.size()));
    frames->dual.resize(n * n, Eigen::Index(slots.size()));
    frames->elements.reserve(slots.size());
    for (size_t s = 0; s < slots.size(); ++s) {
        auto [j, k] = slots[s];
        Mat z = kron(a.elements[size_t(j)], b.elements[size_t(k)]);
        Mat g = kron(a.duals[size_t(j)], b.duals[size_t(k)]);
        frames->basis.col(Eigen::Index(s)) = Eigen::Map<const CVec>(z.data(), z.size());
        frames->dual.col(Eigen::Index(s)) = Eigen::Map<const CVec>(g.data(), g.size());
        frames->elements.push_back(std::move(z));
    }
    return frames;
}

namespace {

std::vector<int> product_schedule(int total) {
    std::vector<int> ms;
    if (total <= 32) {
        for (int m = 0; m <= total; ++m) ms.push_back(m);
        return ms;
    }
    ms.push_back(0);
    for (int m = 1; m <= total; m *= 2) ms.push_back(m);
    for (int m1 = 1; m1 * m1 <= total; ++m1) ms.push_back(m1 * m1);
    ms.push_back(total);
    std::sort(ms.begin(), ms.end());
    ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
    return ms;
}

}  // namespace

NormReport product_partial_sum_certify(const FactorSystem& a, const FactorSystem& b,
                                       NormSpec spec, const EstimationStrategy& strategy,
                                       const CertifyOptions& options) {
    const Eigen::Index n = a.dim * b.dim;
    if (n > 64) throw std::invalid_argument("product certify: product dimension capped at 64");
    ProductAlgebra pa{FactorState{a.dim, a.phi.density}, FactorState{b.dim, b.phi.density}};
    Diagonal joint = pa.joint_density();
    auto frames = make_product_frames(a, b);
    const int total = int(frames->basis.cols());
    const double bound = 3.0 * a.bound * b.bound;

    NormReport report;
    report.suite = "product";
    report.system_side = spec.side;
    report.tolerance = options.tolerance;
    report.bound_kind = "derived";
    report.notes.push_back("left factor: " + a.description);
    report.notes.push_back("right factor: " + b.description);
    char buf[128];
    std::snprintf(buf, sizeof(buf), "bound = 3 c_A c_B with c_A=%.17g c_B=%.17g", a.bound,
                  b.bound);
    report.notes.push_back(buf);

    const int level = int(std::lround(std::log2(double(n))));
    for (int m : product_schedule(total)) {
        NormReportRow row;
        row.alpha = 0.0;  // two-factor run; factor parameters are in the notes
        row.level = level;
        row.p = spec.p;
        row.norm_side = spec.side;
        row.m = m;
        row.bound = bound;
        row.method = strategy.method;
        row.samples = strategy.total_samples();
        row.seed = strategy.seed;
        if (m == 0) {
            row.estimate = 0.0;
            row.counted = false;
        } else {
            try {
                PartialSumMap map = PartialSumMap::from_frames(PartialSumMap::Kind::product,
                                                               frames, m, joint, spec);
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

Mat lp_embed(const Mat& x, PExp p, double alpha) {
    return lp_embed(x, p, alpha, 1.0 - alpha);
}

Mat lp_embed(const Mat& x, PExp p, double alpha, double one_minus_alpha) {
    if (p.is_inf())
        throw std::domain_error("lp_embed: p = inf is not an isometric embedding");
    Weight w1(alpha, one_minus_alpha, 1);
    return kron(x, diag_power(w1.density(), Complex(1.0 / p.value(), 0.0)));
}

}  // namespace ncbasis
