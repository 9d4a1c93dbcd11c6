#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ncbasis/algebra.hpp"
#include "ncbasis/matrix.hpp"
#include "ncbasis/rng.hpp"

using namespace ncbasis;

namespace {

Mat diag2(double a, double b) {
    Mat m = Mat::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

Mat random_mat(Eigen::Index n, std::uint64_t seed) {
    Rng rng(seed);
    return rng.gaussian_matrix(n);
}

}  // namespace

TEST_CASE("kron identities and index convention") {
    Mat i2 = Mat::Identity(2, 2);
    CHECK(max_abs_diff(kron(i2, i2), Mat::Identity(4, 4)) == 0.0);

    Mat a = diag2(1.0 / 3, 2.0 / 3);
    Mat k = kron(a, a);
    CHECK(k(0, 0) == Complex(1.0 / 9));
    CHECK(k(1, 1) == Complex(2.0 / 9));
    CHECK(k(2, 2) == Complex(2.0 / 9));
    CHECK(k(3, 3) == Complex(4.0 / 9));

    // first factor owns the most significant block
    Mat e01 = Mat::Zero(2, 2);
    e01(0, 1) = 1.0;
    Mat ke = kron(e01, i2);
    CHECK(ke(0, 2) == Complex(1.0));
    CHECK(ke(1, 3) == Complex(1.0));
}

TEST_CASE("kron is associative on integer matrices") {
    Rng rng(7);
    for (int rep = 0; rep < 5; ++rep) {
        Mat a(2, 2), b(2, 2), c(2, 2);
        auto ri = [&rng]() {
            return Complex(std::floor(rng.uniform() * 7) - 3, std::floor(rng.uniform() * 7) - 3);
        };
        for (Eigen::Index i = 0; i < 2; ++i)
            for (Eigen::Index j = 0; j < 2; ++j) {
                a(i, j) = ri();
                b(i, j) = ri();
                c(i, j) = ri();
            }
        CHECK(max_abs_diff(kron(kron(a, b), c), kron(a, kron(b, c))) == 0.0);
    }
}

TEST_CASE("state multiplicativity under kron") {
    Weight w1(1.0 / 3, 1);
    Weight w2(1.0 / 3, 2);
    Weight w3(1.0 / 3, 3);
    for (std::uint64_t s = 0; s < 4; ++s) {
        Mat x = random_mat(2, 100 + s), y = random_mat(4, 200 + s);
        Complex lhs = state(w3, kron(x, y));
        Complex rhs = state(w1, x) * state(w2, y);
        CHECK(std::abs(lhs - rhs) < 1e-13);
    }
}

TEST_CASE("singular values") {
    CHECK((singular_values(Mat::Identity(5, 5)) - RealVec::Ones(5)).cwiseAbs().maxCoeff() <
          1e-14);

    const double s = std::sqrt(2.0) / 3.0;
    Mat z(2, 2);
    z << 0, -s, s, 0;
    RealVec sv = singular_values(z);
    CHECK(sv[0] == doctest::Approx(s).epsilon(1e-13));
    CHECK(sv[1] == doctest::Approx(s).epsilon(1e-13));

    Rng rng(3);
    CVec u = rng.unit_vector(6), v = rng.unit_vector(6);
    RealVec r1 = singular_values(u * v.adjoint());
    CHECK(r1[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(r1[1]) < 1e-13);
}

TEST_CASE("schatten norms") {
    CHECK(schatten_norm(Mat::Identity(2, 2), PExp::finite(1.0)) == doctest::Approx(2.0));

    // r_1 A_1 at alpha = 1/3: trace norm 2 sqrt(2) / 3
    Mat r1 = diag2(std::sqrt(2.0), -1.0 / std::sqrt(2.0));
    Mat a1 = diag2(1.0 / 3, 2.0 / 3);
    CHECK(schatten_norm(r1 * a1, PExp::finite(1.0)) ==
          doctest::Approx(2.0 * std::sqrt(2.0) / 3.0).epsilon(1e-13));

    Mat x = random_mat(6, 11);
    const double fro = schatten_norm(x, PExp::finite(2.0));
    CHECK(fro * fro == doctest::Approx((x.adjoint() * x).trace().real()).epsilon(1e-12));

    CHECK_THROWS_AS(PExp::finite(0.5), std::domain_error);
}

TEST_CASE("schatten norm properties on random samples") {
    Rng rng(21);
    for (int rep = 0; rep < 20; ++rep) {
        Mat x = rng.gaussian_matrix(5), y = rng.gaussian_matrix(5);
        for (double p : {1.0, 2.0, 3.5}) {
            const double nx = schatten_norm(x, PExp::finite(p));
            const double ny = schatten_norm(y, PExp::finite(p));
            const double nxy = schatten_norm(x + y, PExp::finite(p));
            CHECK(nxy <= (nx + ny) * (1 + 1e-10));
        }
        // unitary invariance via a random unitary from a QR factorization
        Eigen::HouseholderQR<Mat> qr(rng.gaussian_matrix(5));
        Mat q = qr.householderQ();
        const double before = schatten_norm(x, PExp::finite(1.0));
        const double after = schatten_norm(q * x * q.adjoint(), PExp::finite(1.0));
        CHECK(after == doctest::Approx(before).epsilon(1e-10));
    }
}

TEST_CASE("Hoelder inequality consumer check") {
    Rng rng(33);
    for (int rep = 0; rep < 20; ++rep) {
        Mat x = rng.gaussian_matrix(8), y = rng.gaussian_matrix(8);
        for (double p : {1.0, 2.0, 4.0}) {
            PExp pp = PExp::finite(p);
            PExp qq = p == 1.0 ? PExp::inf() : PExp::finite(p / (p - 1.0));
            const double lhs = std::abs((x * y).trace());
            CHECK(lhs <= schatten_norm(x, pp) * schatten_norm(y, qq) * (1 + 1e-10));
        }
    }
}

TEST_CASE("weighted norms") {
    Weight w(1.0 / 3, 2);
    CHECK(weighted_norm(Mat::Identity(4, 4), w.density(), {PExp::finite(1.0), Side::left}) ==
          doctest::Approx(1.0).epsilon(1e-14));

    Diagonal half(RealVec::Constant(2, 0.5));
    CHECK(weighted_norm(diag2(1, -1), half, {PExp::finite(1.0), Side::left}) ==
          doctest::Approx(1.0).epsilon(1e-14));

    Mat x = random_mat(4, 5);
    CHECK(weighted_norm(x, w.density(), {PExp::inf(), Side::left}) ==
          doctest::Approx(schatten_norm(x, PExp::inf())).epsilon(1e-13));

    CHECK_THROWS_AS(weighted_norm(random_mat(2, 1), w.density(),
                                  NormSpec{PExp::finite(1.0), Side::left}),
                    std::invalid_argument);
}

TEST_CASE("left and right weighted norms are adjoint-dual") {
    Weight w(0.3, 3);
    Rng rng(44);
    for (int rep = 0; rep < 10; ++rep) {
        Mat x = rng.gaussian_matrix(8);
        for (double p : {1.0, 2.0, 4.0}) {
            const double l = weighted_norm(x, w.density(), {PExp::finite(p), Side::left});
            const double r =
                weighted_norm(x.adjoint(), w.density(), {PExp::finite(p), Side::right});
            CHECK(l == doctest::Approx(r).epsilon(1e-11));
        }
    }
}

TEST_CASE("diag_power") {
    Diagonal w(RealVec{{1.0 / 3, 2.0 / 3}});
    CHECK(max_abs_diff(diag_power(w, 0.0), Mat::Identity(2, 2)) == 0.0);

    Mat h = diag_power(w, 0.5);
    CHECK(h(0, 0).real() == doctest::Approx(0.5773502691896258).epsilon(1e-14));
    CHECK(h(1, 1).real() == doctest::Approx(0.8164965809277260).epsilon(1e-14));

    Mat u = diag_power(w, Complex(0.0, 1.7));
    CHECK(max_abs_diff(u.adjoint() * u, Mat::Identity(2, 2)) < 1e-15);
}

TEST_CASE("diagonal validation") {
    CHECK_THROWS_AS(Diagonal(RealVec{{1.0, 0.0}}), std::invalid_argument);
    CHECK_THROWS_AS(Diagonal(RealVec{{1.0, -0.5}}), std::invalid_argument);
}
