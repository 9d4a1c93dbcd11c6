#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ncbasis/normlab.hpp"
#include "ncbasis/rng.hpp"

using namespace ncbasis;

namespace {

EstimationStrategy small_strategy(EstimationMethod method, std::uint64_t seed = 7) {
    EstimationStrategy s;
    s.method = method;
    s.restarts = 8;
    s.samples_per_restart = 60;
    s.ascent_iterations = 60;
    s.seed = seed;
    return s;
}

}  // namespace

TEST_CASE("schur projection basics") {
    Rng rng(1);
    Mat x = rng.gaussian_matrix(4);
    CHECK(max_abs_diff(schur_project(2, 16, x), x) == 0.0);
    CHECK(schur_project(2, 0, x).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(schur_project(2, 17, x), std::invalid_argument);

    // commutes with diagonal multiplication, exactly
    Mat d = Mat::Zero(4, 4);
    for (int k = 0; k < 4; ++k) d(k, k) = 0.25 * (k + 1);
    for (int m : {1, 3, 7, 12}) {
        CHECK(max_abs_diff(schur_project(2, m, d * x), d * schur_project(2, m, x)) == 0.0);
        CHECK(max_abs_diff(schur_project(2, m, x * d), schur_project(2, m, x) * d) == 0.0);
    }
}

TEST_CASE("haar partial sums") {
    HaarSystem sys = HaarSystem::standard(1.0 / 3, 2, Side::left);
    Weight w(1.0 / 3, 2);
    Rng rng(2);
    Mat x = rng.gaussian_matrix(4);

    CHECK(max_abs_diff(haar_partial_sum(sys, 16, x), x) < 1e-10);

    // with r_0 = 1 the first coefficient is the state, so m = 1 projects
    // onto scalars
    Mat m1 = haar_partial_sum(sys, 1, x);
    CHECK(max_abs_diff(m1, Mat(state(w, x) * Mat::Identity(4, 4))) < 1e-13);

    for (int m : {1, 5, 9, 13}) {
        Mat once = haar_partial_sum(sys, m, x);
        CHECK(max_abs_diff(haar_partial_sum(sys, m, once), once) < 1e-10);
    }
}

TEST_CASE("partial sum map agrees with the literal analyze-truncate-synthesize") {
    HaarSystem sys = HaarSystem::standard(0.3, 2, Side::left);
    NormSpec spec{PExp::finite(1.0), Side::left};
    Rng rng(3);
    Mat x = rng.gaussian_matrix(4);
    for (int m : {0, 1, 6, 16}) {
        PartialSumMap map = PartialSumMap::haar(sys, m, spec);
        CHECK(max_abs_diff(map.apply(x), haar_partial_sum(sys, m, x)) < 1e-12);
        CHECK(max_abs_diff(map.apply(map.apply(x)), map.apply(x)) < 1e-10);
    }
}

TEST_CASE("partial sum map adjoint is the Frobenius adjoint") {
    HaarSystem sys = HaarSystem::standard(0.3, 2, Side::left);
    NormSpec spec{PExp::finite(1.0), Side::left};
    PartialSumMap map = PartialSumMap::haar(sys, 7, spec);
    Rng rng(4);
    for (int rep = 0; rep < 5; ++rep) {
        Mat x = rng.gaussian_matrix(4), z = rng.gaussian_matrix(4);
        Complex lhs = (z.adjoint() * map.apply(x)).trace();
        Complex rhs = (map.apply_adjoint(z).adjoint() * x).trace();
        CHECK(std::abs(lhs - rhs) < 1e-12);
    }
}

TEST_CASE("theoretical bounds from the inductive recursion") {
    NormSpec tc{PExp::finite(1.0), Side::left};

    std::vector<RademacherQuad> half{standard_quad(0.5, Side::left)};
    CHECK(theoretical_bound(half, tc) == doctest::Approx(4.0).epsilon(1e-13));
    half.push_back(standard_quad(0.5, Side::left));
    CHECK(theoretical_bound(half, tc) == doctest::Approx(7.0).epsilon(1e-13));
    half.push_back(standard_quad(0.5, Side::left));
    CHECK(theoretical_bound(half, tc) == doctest::Approx(7.0).epsilon(1e-13));

    CHECK(theoretical_bound(HaarSystem::standard(1.0 / 3, 1, Side::left), tc) ==
          doctest::Approx(14.0 / 3).epsilon(1e-13));
    CHECK(theoretical_bound(HaarSystem::standard(1.0 / 3, 2, Side::left), tc) ==
          doctest::Approx(11.0).epsilon(1e-13));
    CHECK(theoretical_bound(HaarSystem::standard(1.0 / 3, 4, Side::left), tc) ==
          doctest::Approx(11.0).epsilon(1e-13));

    CHECK(theoretical_bound(HaarSystem::standard(0.25, 1, Side::left), tc) ==
          doctest::Approx(5.0).epsilon(1e-13));

    // right-side bounds for the standard quads match the left ones: the
    // right quad is the elementwise adjoint, which preserves every norm used
    NormSpec tr{PExp::finite(1.0), Side::right};
    CHECK(theoretical_bound(HaarSystem::standard(1.0 / 3, 2, Side::right), tr) ==
          doctest::Approx(11.0).epsilon(1e-13));

    // with ||r_0|| <= 1 the bound sequence is constant from level 2 on
    NormSpec op{PExp::inf(), Side::left};
    double prev = theoretical_bound(HaarSystem::standard(0.3, 2, Side::left), op);
    for (int nu = 3; nu <= 5; ++nu) {
        double cur = theoretical_bound(HaarSystem::standard(0.3, nu, Side::left), op);
        CHECK(cur == doctest::Approx(prev).epsilon(1e-13));
        prev = cur;
    }
}

TEST_CASE("identity map estimates to one") {
    HaarSystem sys = HaarSystem::standard(1.0 / 3, 2, Side::left);
    for (double p : {1.0, 2.0}) {
        NormSpec spec{PExp::finite(p), Side::left};
        PartialSumMap map = PartialSumMap::haar(sys, 16, spec);
        const double est =
            estimate_map_norm(map, small_strategy(EstimationMethod::polar_ascent));
        CHECK(est >= 1.0 - 1e-9);
        CHECK(est <= 1.0 + 1e-9);
    }
}

TEST_CASE("m = 1 estimates are at least one") {
    HaarSystem sys = HaarSystem::standard(0.3, 2, Side::left);
    NormSpec spec{PExp::finite(1.0), Side::left};
    PartialSumMap map = PartialSumMap::haar(sys, 1, spec);
    const double est = estimate_map_norm(map, small_strategy(EstimationMethod::sampling));
    CHECK(est >= 1.0 - 1e-9);
}

TEST_CASE("schur estimates stay under the matrix-unit constant") {
    Weight w(1.0 / 3, 2);
    for (Side side : {Side::left, Side::right}) {
        for (double p : {1.0, 2.0}) {
            NormSpec spec{PExp::finite(p), side};
            for (int m : {1, 5, 11}) {
                PartialSumMap map = PartialSumMap::schur(2, m, w, spec);
                const double est =
                    estimate_map_norm(map, small_strategy(EstimationMethod::polar_ascent));
                CHECK(est <= 2.0 + 1e-6);
                CHECK(est >= 1.0 - 1e-9);
            }
        }
    }
}

TEST_CASE("sampling estimates are monotone in the sample budget") {
    HaarSystem sys = HaarSystem::standard(1.0 / 3, 2, Side::left);
    NormSpec spec{PExp::finite(1.0), Side::left};
    PartialSumMap map = PartialSumMap::haar(sys, 6, spec);

    EstimationStrategy small = small_strategy(EstimationMethod::sampling, 99);
    EstimationStrategy large = small;
    large.samples_per_restart *= 2;  // the sample stream of `small` is a prefix

    const double e_small = estimate_map_norm(map, small);
    const double e_large = estimate_map_norm(map, large);
    CHECK(e_small <= e_large);
    CHECK(estimate_map_norm(map, small) == e_small);  // deterministic
}

TEST_CASE("polar ascent dominates its own sampling floor") {
    HaarSystem sys = HaarSystem::standard(1.0 / 3, 2, Side::left);
    NormSpec spec{PExp::finite(1.0), Side::left};
    for (int m : {3, 6, 9}) {
        PartialSumMap map = PartialSumMap::haar(sys, m, spec);
        const double by_sampling =
            estimate_map_norm(map, small_strategy(EstimationMethod::sampling, 5));
        const double by_ascent =
            estimate_map_norm(map, small_strategy(EstimationMethod::polar_ascent, 5));
        CHECK(by_ascent >= by_sampling - 1e-12);
    }
}

TEST_CASE("grid oracle agrees with polar ascent at level 1") {
    Rng pick(123);
    HaarSystem left = HaarSystem::standard(1.0 / 3, 1, Side::left);
    NormSpec spec{PExp::finite(1.0), Side::left};
    for (int m : {1, 2, 3}) {
        PartialSumMap map = PartialSumMap::haar(left, m, spec);
        const double grid =
            estimate_map_norm(map, small_strategy(EstimationMethod::grid_oracle));
        const double ascent =
            estimate_map_norm(map, small_strategy(EstimationMethod::polar_ascent, 11));
        CHECK(std::abs(grid - ascent) < 1e-3);
    }
    // the oracle is a level-1 brute force only
    HaarSystem big = HaarSystem::standard(1.0 / 3, 2, Side::left);
    PartialSumMap map2 = PartialSumMap::haar(big, 3, spec);
    CHECK_THROWS_AS(estimate_map_norm(map2, small_strategy(EstimationMethod::grid_oracle)),
                    std::invalid_argument);
}

TEST_CASE("left and right estimates mirror within tolerance") {
    NormSpec ls{PExp::finite(1.0), Side::left};
    NormSpec rs{PExp::finite(1.0), Side::right};
    HaarSystem lsys = HaarSystem::standard(1.0 / 3, 2, Side::left);
    HaarSystem rsys = HaarSystem::standard(1.0 / 3, 2, Side::right);
    for (int m : {1, 4, 8, 12, 16}) {
        const double le = estimate_map_norm(PartialSumMap::haar(lsys, m, ls),
                                            small_strategy(EstimationMethod::polar_ascent, 21));
        const double re = estimate_map_norm(PartialSumMap::haar(rsys, m, rs),
                                            small_strategy(EstimationMethod::polar_ascent, 22));
        CHECK(std::abs(le - re) < 2e-3);
    }
}

TEST_CASE("certification schedule") {
    std::vector<int> s2 = certification_schedule(2);
    CHECK(s2.size() == 17);
    CHECK(s2.front() == 0);
    CHECK(s2.back() == 16);

    std::vector<int> s3 = certification_schedule(3);
    CHECK(s3.front() == 0);
    CHECK(s3.back() == 64);
    for (int required : {1, 2, 4, 8, 16, 32, 64, 3, 12, 48}) {
        CHECK(std::find(s3.begin(), s3.end(), required) != s3.end());
    }
}

TEST_CASE("certify haar report") {
    HaarSystem sys = HaarSystem::standard(0.5, 2, Side::left);
    NormSpec spec{PExp::finite(1.0), Side::left};
    NormReport report = certify(sys, spec, small_strategy(EstimationMethod::polar_ascent, 1));
    CHECK(report.suite == "haar");
    CHECK(report.all_pass());
    REQUIRE(report.rows.size() == 17);
    CHECK(report.rows[0].m == 0);
    CHECK_FALSE(report.rows[0].counted);
    CHECK(report.rows[0].estimate == 0.0);
    for (const NormReportRow& row : report.rows) {
        CHECK(row.bound == doctest::Approx(7.0));
        if (row.counted) {
            CHECK(row.estimate <= 7.0 + 1e-6);
            CHECK(row.estimate >= 1.0 - 1e-9);
        }
    }
    CHECK(report.rows.back().estimate == doctest::Approx(1.0).epsilon(1e-9));

    CertifyOptions opts;
    opts.level_cap = 1;
    CHECK_THROWS_AS(certify(sys, spec, small_strategy(EstimationMethod::sampling), opts),
                    std::invalid_argument);
}

TEST_CASE("certify schur report") {
    Weight w(1.0 / 3, 2);
    NormSpec spec{PExp::inf(), Side::left};
    NormReport report =
        certify_schur(2, w, spec, small_strategy(EstimationMethod::polar_ascent, 2));
    CHECK(report.suite == "schur");
    CHECK(report.all_pass());
    for (const NormReportRow& row : report.rows) CHECK(row.bound == 2.0);
}
