#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ncbasis/rng.hpp"
#include "ncbasis/tensorprod.hpp"

using namespace ncbasis;

namespace {

ProductAlgebra third_quarter() {
    return ProductAlgebra{FactorState::from_weight(Weight(1.0 / 3, 1)),
                          FactorState::from_weight(Weight(0.25, 1))};
}

}  // namespace

TEST_CASE("product algebra joint density") {
    ProductAlgebra pa = third_quarter();
    CHECK(pa.dim() == 4);
    Diagonal joint = pa.joint_density();
    CHECK(joint.values().sum() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(joint.values()[0] == doctest::Approx((1.0 / 3) * 0.25).epsilon(1e-15));

    Rng rng(1);
    Mat x = rng.gaussian_matrix(2), y = rng.gaussian_matrix(2);
    Complex joint_val = 0.0;
    Mat z = kron(x, y);
    for (Eigen::Index k = 0; k < 4; ++k) joint_val += z(k, k) * joint.values()[k];
    Complex split = state(Weight(1.0 / 3, 1), x) * state(Weight(0.25, 1), y);
    CHECK(std::abs(joint_val - split) < 1e-14);
}

TEST_CASE("expectation onto the left factor") {
    ProductAlgebra pa = third_quarter();
    Rng rng(2);
    Mat x = rng.gaussian_matrix(2);

    CHECK(max_abs_diff(expect_left_factor(pa, kron(x, Mat::Identity(2, 2))), x) < 1e-15);

    // phi(r_1) = 0 for the standard quad of the right factor
    RademacherQuad q = standard_quad(0.25, Side::left);
    CHECK(expect_left_factor(pa, kron(x, q.r(1))).cwiseAbs().maxCoeff() < 1e-15);

    for (int rep = 0; rep < 10; ++rep) {
        Mat a = rng.gaussian_matrix(2), b = rng.gaussian_matrix(2), z = rng.gaussian_matrix(4);
        Mat big_a = kron(a, Mat::Identity(2, 2)), big_b = kron(b, Mat::Identity(2, 2));
        Mat lhs = expect_left_factor(pa, big_a * z * big_b);
        Mat rhs = a * expect_left_factor(pa, z) * b;
        CHECK(max_abs_diff(lhs, rhs) < 1e-13);
    }
}

TEST_CASE("decomposition projections from a haar factor") {
    ProductAlgebra pa = third_quarter();
    HaarSystem right = HaarSystem::standard(0.25, 1, Side::left);
    DecompositionSystem ds = DecompositionSystem::from_haar(right);
    CHECK(ds.gram_residual() < 1e-14);
    // level-1 standard quads are already normalized
    for (double s : ds.scales()) CHECK(s == doctest::Approx(1.0).epsilon(1e-13));

    Rng rng(3);
    Mat a = rng.gaussian_matrix(2);
    for (size_t j = 0; j < ds.size(); ++j) {
        Mat z = kron(a, ds.elements()[j]);
        CHECK(max_abs_diff(decomposition_project(pa, ds, j, z), z) < 1e-13);
        for (size_t i = 0; i < ds.size(); ++i) {
            if (i == j) continue;
            CHECK(decomposition_project(pa, ds, i, z).cwiseAbs().maxCoeff() < 1e-13);
        }
    }
}

TEST_CASE("decomposition projections are annihilating idempotents summing to one") {
    ProductAlgebra pa = third_quarter();
    HaarSystem right = HaarSystem::standard(0.25, 1, Side::left);
    DecompositionSystem ds = DecompositionSystem::from_haar(right);
    Rng rng(4);
    for (int rep = 0; rep < 10; ++rep) {
        Mat z = rng.gaussian_matrix(4);
        Mat total = Mat::Zero(4, 4);
        for (size_t j = 0; j < ds.size(); ++j) {
            Mat dj = decomposition_project(pa, ds, j, z);
            total += dj;
            CHECK(max_abs_diff(decomposition_project(pa, ds, j, dj), dj) < 1e-10);
            for (size_t k = 0; k < ds.size(); ++k) {
                if (k == j) continue;
                CHECK(decomposition_project(pa, ds, k, dj).cwiseAbs().maxCoeff() < 1e-10);
            }
        }
        CHECK(max_abs_diff(total, z) < 1e-10);  // the system spans the right factor
    }
}

TEST_CASE("algebraic tensor formula for D_j") {
    ProductAlgebra pa = third_quarter();
    HaarSystem right = HaarSystem::standard(0.25, 1, Side::left);
    DecompositionSystem ds = DecompositionSystem::from_haar(right);
    Weight w_right(0.25, 1);

    Rng rng(5);
    for (int rep = 0; rep < 10; ++rep) {
        Mat a1 = rng.gaussian_matrix(2), a2 = rng.gaussian_matrix(2);
        Mat b1 = rng.gaussian_matrix(2), b2 = rng.gaussian_matrix(2);
        Mat z = kron(a1, b1) + kron(a2, b2);
        for (size_t j = 0; j < ds.size(); ++j) {
            const Mat& yj = ds.elements()[j];
            // expansion coefficient of b against the state-orthonormal system
            Complex c1 = state(w_right, Mat(yj.adjoint() * b1));
            Complex c2 = state(w_right, Mat(yj.adjoint() * b2));
            Mat direct = c1 * kron(a1, yj) + c2 * kron(a2, yj);
            CHECK(max_abs_diff(decomposition_project(pa, ds, j, z), direct) < 1e-12);
        }
    }
}

TEST_CASE("matrix-unit decomposition needs the sqrt(n) rescale") {
    DecompositionSystem ds = DecompositionSystem::from_matrix_units(4);
    CHECK(ds.gram_residual() < 1e-14);
    for (double s : ds.scales()) CHECK(s == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("a right system is rejected by the sharp-side dual condition") {
    HaarSystem right_sys = HaarSystem::standard(0.25, 1, Side::right);
    CHECK_THROWS_AS(DecompositionSystem::from_haar(right_sys), std::invalid_argument);
}

TEST_CASE("matrix-unit D_j acts as a block-column Schur mask") {
    ProductAlgebra pa{FactorState::from_weight(Weight(1.0 / 3, 1)),
                      FactorState::normalized_trace(2)};
    DecompositionSystem ds = DecompositionSystem::from_matrix_units(2);
    Rng rng(6);
    Mat z = rng.gaussian_matrix(4);
    for (size_t j = 0; j < 4; ++j) {
        auto [r, c] = unit_position(int(j));
        // D_j keeps, inside every 2x2 block, exactly the (r, c) entry
        Mat mask = Mat::Zero(4, 4);
        for (Eigen::Index bi = 0; bi < 2; ++bi)
            for (Eigen::Index bj = 0; bj < 2; ++bj) mask(2 * bi + r, 2 * bj + c) = 1.0;
        Mat expected = mask.cwiseProduct(z);
        CHECK(max_abs_diff(decomposition_project(pa, ds, j, z), expected) < 1e-14);
    }
}

TEST_CASE("product basis in shell order") {
    HaarSystem a = HaarSystem::standard(1.0 / 3, 1, Side::left);
    HaarSystem b = HaarSystem::standard(0.25, 1, Side::left);
    CHECK(a.quads()[0].alpha() / a.quads()[0].one_minus_alpha() == doctest::Approx(0.5));
    CHECK(b.quads()[0].alpha() / b.quads()[0].one_minus_alpha() ==
          doctest::Approx(1.0 / 3).epsilon(1e-14));

    std::vector<Mat> prod = product_basis(a.elements(), b.elements());
    REQUIRE(prod.size() == 16);
    CHECK(max_abs_diff(prod[0], kron(a.element(0), b.element(0))) == 0.0);

    // slot s(1,2) = 2 holds x_1 (x) y_2
    CHECK(max_abs_diff(prod[1], kron(a.element(0), b.element(1))) == 0.0);
    // slot s(2,1) = 4 holds x_2 (x) y_1
    CHECK(max_abs_diff(prod[3], kron(a.element(1), b.element(0))) == 0.0);

    // bijective audit on a 16 x 16 grid
    auto slots = product_shell_slots(16, 16);
    CHECK(slots.size() == 256);
    std::vector<int> seen(256, 0);
    for (auto [j, k] : slots) seen[size_t(j * 16 + k)] += 1;
    for (int count : seen) CHECK(count == 1);
    for (size_t s = 0; s < slots.size(); ++s) {
        auto [j, k] = slots[s];
        CHECK(shell_index(j + 1, k + 1) == int(s) + 1);
    }
}

TEST_CASE("product coefficients transfer biorthogonality") {
    NormSpec spec{PExp::finite(1.0), Side::left};
    FactorSystem a = FactorSystem::from_haar(HaarSystem::standard(1.0 / 3, 1, Side::left), spec);
    FactorSystem b = FactorSystem::from_haar(HaarSystem::standard(0.25, 1, Side::left), spec);
    auto frames = make_product_frames(a, b);
    // analyzing z_s against the dual frame yields a single unit coefficient
    for (Eigen::Index s = 0; s < 16; ++s) {
        CVec coeffs = frames->dual.adjoint() * frames->basis.col(s);
        for (Eigen::Index t = 0; t < 16; ++t) {
            const double expected = s == t ? 1.0 : 0.0;
            CHECK(std::abs(coeffs[t] - expected) < 1e-12);
        }
    }
}

TEST_CASE("full shells equal the double truncation") {
    NormSpec spec{PExp::finite(1.0), Side::left};
    HaarSystem ha = HaarSystem::standard(1.0 / 3, 1, Side::left);
    HaarSystem hb = HaarSystem::standard(0.25, 1, Side::left);
    FactorSystem a = FactorSystem::from_haar(ha, spec);
    FactorSystem b = FactorSystem::from_haar(hb, spec);
    auto frames = make_product_frames(a, b);
    Diagonal joint =
        ProductAlgebra{FactorState::from_weight(Weight(1.0 / 3, 1)),
                       FactorState::from_weight(Weight(0.25, 1))}
            .joint_density();

    Rng rng(7);
    Mat z = rng.gaussian_matrix(4);
    for (int m1 : {1, 2, 3, 4}) {
        PartialSumMap map = PartialSumMap::from_frames(PartialSumMap::Kind::product, frames,
                                                       m1 * m1, joint, spec);
        // P_{m1} Q_{m1}: keep product coefficients with both indices <= m1
        Mat direct = Mat::Zero(4, 4);
        CVec coeffs = frames->dual.adjoint() * Eigen::Map<const CVec>(z.data(), 16);
        auto slots = product_shell_slots(4, 4);
        for (size_t s = 0; s < slots.size(); ++s) {
            auto [j, k] = slots[s];
            if (j < m1 && k < m1)
                direct += coeffs[Eigen::Index(s)] *
                          Eigen::Map<const Mat>(frames->basis.col(Eigen::Index(s)).data(), 4, 4);
        }
        CHECK(max_abs_diff(map.apply(z), direct) < 1e-12);
    }
}

TEST_CASE("product certification against the derived bound") {
    EstimationStrategy s;
    s.method = EstimationMethod::polar_ascent;
    s.restarts = 6;
    s.samples_per_restart = 50;
    s.ascent_iterations = 50;
    s.seed = 12;
    NormSpec spec{PExp::finite(1.0), Side::left};

    FactorSystem a = FactorSystem::from_haar(HaarSystem::standard(1.0 / 3, 1, Side::left), spec);
    FactorSystem b = FactorSystem::from_haar(HaarSystem::standard(0.25, 1, Side::left), spec);
    NormReport r = product_partial_sum_certify(a, b, spec, s);
    CHECK(r.suite == "product");
    CHECK(r.bound_kind == "derived");
    CHECK(r.all_pass());
    CHECK(r.rows.front().bound == doctest::Approx(3.0 * (14.0 / 3) * 5.0).epsilon(1e-13));

    // II-infinity style truncation: tracial haar times 4x4 matrix units
    FactorSystem a2 = FactorSystem::from_haar(HaarSystem::standard(0.5, 1, Side::left), spec);
    FactorSystem b2 = FactorSystem::from_matrix_units(4);
    NormReport r2 = product_partial_sum_certify(a2, b2, spec, s);
    CHECK(r2.all_pass());
    CHECK(r2.rows.front().bound == doctest::Approx(3.0 * 4.0 * 2.0).epsilon(1e-13));
}

TEST_CASE("trivial right factor reduces to the plain certification") {
    EstimationStrategy s;
    s.method = EstimationMethod::polar_ascent;
    s.restarts = 4;
    s.samples_per_restart = 40;
    s.ascent_iterations = 40;
    s.seed = 3;
    NormSpec spec{PExp::finite(1.0), Side::left};
    HaarSystem ha = HaarSystem::standard(0.5, 2, Side::left);
    FactorSystem a = FactorSystem::from_haar(ha, spec);
    FactorSystem unit = FactorSystem::from_matrix_units(1);

    NormReport prod = product_partial_sum_certify(a, unit, spec, s);
    NormReport plain = certify(ha, spec, s);
    REQUIRE(prod.rows.size() == plain.rows.size());
    for (size_t i = 0; i < prod.rows.size(); ++i) {
        CHECK(prod.rows[i].m == plain.rows[i].m);
        CHECK(prod.rows[i].estimate == doctest::Approx(plain.rows[i].estimate).epsilon(1e-12));
    }
}

TEST_CASE("lp embedding") {
    Mat x = Mat::Identity(2, 2);
    Mat e = lp_embed(x, PExp::finite(1.0), 1.0 / 3);
    CHECK(e.rows() == 4);
    CHECK(e(0, 0).real() == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(e(1, 1).real() == doctest::Approx(2.0 / 3).epsilon(1e-15));
    CHECK(schatten_norm(e, PExp::finite(1.0)) == doctest::Approx(2.0).epsilon(1e-13));

    Rng rng(8);
    for (int rep = 0; rep < 20; ++rep) {
        Mat y = rng.gaussian_matrix(4);
        for (double p : {1.0, 2.0, 3.0}) {
            PExp pe = PExp::finite(p);
            CHECK(schatten_norm(lp_embed(y, pe, 1.0 / 3), pe) ==
                  doctest::Approx(schatten_norm(y, pe)).epsilon(1e-12));
        }
    }

    // iterating the embedding corresponds to the level-2 weight
    Mat twice = lp_embed(lp_embed(x, PExp::finite(2.0), 1.0 / 3), PExp::finite(2.0), 1.0 / 3);
    Weight w2(1.0 / 3, 2);
    Mat direct = kron(x, diag_power(w2.density(), 0.5));
    CHECK(max_abs_diff(twice, direct) < 1e-14);

    CHECK_THROWS_AS(lp_embed(x, PExp::inf(), 1.0 / 3), std::domain_error);
}

TEST_CASE("product dimension cap") {
    NormSpec spec{PExp::finite(1.0), Side::left};
    FactorSystem a = FactorSystem::from_haar(HaarSystem::standard(0.5, 3, Side::left), spec);
    FactorSystem b = FactorSystem::from_matrix_units(16);
    EstimationStrategy s;
    CHECK_THROWS_AS(product_partial_sum_certify(a, b, spec, s), std::invalid_argument);
}
