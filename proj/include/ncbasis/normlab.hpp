#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ncbasis/haar.hpp"

namespace ncbasis {

enum class EstimationMethod { sampling, polar_ascent, grid_oracle };

std::string method_name(EstimationMethod m);
EstimationMethod method_parse(const std::string& text);

/// Deterministic estimation parameters. Streams are split per sample and
/// per restart by counter, so output is independent of execution order and
/// a shorter sample budget explores a prefix of a longer one.
struct EstimationStrategy {
    EstimationMethod method = EstimationMethod::polar_ascent;
    int restarts = 50;
    int samples_per_restart = 200;
    int ascent_iterations = 200;
    std::uint64_t seed = 0xC0FFEE;

    long long total_samples() const {
        return static_cast<long long>(restarts) * samples_per_restart;
    }
};

/// A spanning system with its Frobenius-dual frame, vectorized column-wise:
/// basis.col(j) = vec(b_j), dual.col(j) = vec(g_j) with Tr(g_j^* x) equal to
/// the j-th expansion coefficient of x.
struct SystemFrames {
    Eigen::Index dim = 0;
    Mat basis;
    Mat dual;
    std::vector<Mat> elements;
};

std::shared_ptr<const SystemFrames> make_haar_frames(const HaarSystem& sys);

/// Coefficient-truncation projection x -> sum_{j<m} coeff_j(x) b_j, together
/// with the weighted norm it is certified in. The Schur kind keeps the first
/// m shell matrix units via an entrywise 0/1 mask.
class PartialSumMap {
public:
    enum class Kind { haar, schur, product };

    static PartialSumMap haar(const HaarSystem& sys, int m, NormSpec spec);
    static PartialSumMap schur(int nu, int m, const Weight& w, NormSpec spec);
    static PartialSumMap from_frames(Kind kind, std::shared_ptr<const SystemFrames> frames,
                                     int m, Diagonal weight, NormSpec spec);

    Mat apply(const Mat& x) const;
    /// Frobenius adjoint of apply.
    Mat apply_adjoint(const Mat& z) const;

    Kind kind() const { return kind_; }
    int m() const { return m_; }
    Eigen::Index dim() const { return dim_; }
    int system_size() const { return system_size_; }
    const Diagonal& weight() const { return weight_; }
    const NormSpec& spec() const { return spec_; }
    /// Elements fixed by the map; deterministic candidates for the estimator.
    std::vector<Mat> probe_elements() const;

private:
    PartialSumMap(Kind kind, std::shared_ptr<const SystemFrames> frames, Mat mask,
                  int m, Eigen::Index dim, int system_size, Diagonal weight, NormSpec spec);

    Kind kind_;
    std::shared_ptr<const SystemFrames> frames_;  // haar/product
    Mat mask_;                                    // schur
    int m_;
    Eigen::Index dim_;
    int system_size_;
    Diagonal weight_;
    NormSpec spec_;
};

/// Entrywise product of x with the mask of the first m shell matrix units.
Mat schur_project(int nu, int m, const Mat& x);

/// synthesize(first m coefficients of analyze(x)), zero-padded.
Mat haar_partial_sum(const HaarSystem& sys, int m, const Mat& x);

/// Certified lower bound for the operator norm of the map between the
/// weighted Schatten spaces named in its NormSpec. Explores deterministic
/// probes plus the strategy's candidates; never reports more than the best
/// ratio actually evaluated.
double estimate_map_norm(const PartialSumMap& map, const EstimationStrategy& strategy);

/// Inductive upper bound for the partial-sum constants of the system built
/// from the given per-level quads:
///   c_1 <= sum_j ||r_j|| ||r_j||_spec,
///   c_{nu+1} <= max{c_nu ||r_0||^2, ||r_0||^2 + 2 sum_{q>=1} ||r_q||^2}.
double theoretical_bound(const std::vector<RademacherQuad>& quads, const NormSpec& spec);
double theoretical_bound(const HaarSystem& sys, const NormSpec& spec);

struct NormReportRow {
    double alpha = 0.0;
    int level = 0;
    PExp p = PExp::finite(1.0);
    Side norm_side = Side::left;
    int m = 0;
    double estimate = 0.0;
    double bound = 0.0;
    EstimationMethod method = EstimationMethod::polar_ascent;
    long long samples = 0;
    std::uint64_t seed = 0;
    bool pass = true;
    bool counted = true;  // m = 0 rows are reported but not scored
    std::string error;
};

struct NormReport {
    std::string suite;  // haar | schur | product
    Side system_side = Side::left;
    double tolerance = 1e-6;
    std::string bound_kind;  // inductive | matrix-units | derived
    std::vector<std::string> notes;
    std::vector<NormReportRow> rows;

    bool all_pass() const;
};

/// Partial-sum indices certified per level: every m at nu <= 2; powers of
/// two plus the block boundaries q 4^mu at nu >= 3.
std::vector<int> certification_schedule(int nu);

struct CertifyOptions {
    double tolerance = 1e-6;
    int level_cap = 4;
};

NormReport certify(const HaarSystem& sys, NormSpec spec, const EstimationStrategy& strategy,
                   const CertifyOptions& options = {});
NormReport certify_schur(int nu, const Weight& w, NormSpec spec,
                         const EstimationStrategy& strategy, const CertifyOptions& options = {});

}  // namespace ncbasis
