#include <catch2/catch_amalgamated.hpp>

#include "pfopt/unscented.hpp"

using namespace pfopt;

namespace {

Vector vec1(double a) {
    Vector v(1);
    v[0] = a;
    return v;
}

Matrix random_psd(int n, RngStream& rng) {
    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
    return a.transpose() * a + 0.05 * Matrix::Identity(n, n);
}

NoisyObjective affine_objective(const Vector& slope, double intercept,
                                const SearchDomain& box) {
    NoisyObjective obj;
    obj.name = "affine";
    obj.core = [slope, intercept](const Vector& x) { return slope.dot(x) + intercept; };
    obj.noise = NoiseModel::noiseless();
    obj.domain = box;
    return obj;
}

SearchDomain wide_box(int n) {
    Vector lo = Vector::Constant(n, -1e6), hi = Vector::Constant(n, 1e6);
    return SearchDomain(lo, hi);
}

}  // namespace

TEST_CASE("sigma point closed forms") {
    SECTION("n=1, P=2, lambda=1") {
        Matrix p(1, 1);
        p << 2.0;
        SigmaSet s = sigma_points(vec1(0.0), p, 1.0);
        REQUIRE(s.count() == 3);
        CHECK(s.points(0, 0) == 0.0);
        CHECK(s.points(1, 0) == Catch::Approx(2.0));
        CHECK(s.points(2, 0) == Catch::Approx(-2.0));
        CHECK(s.weights[0] == Catch::Approx(0.5));
        CHECK(s.weights[1] == Catch::Approx(0.25));
        CHECK(s.weights[2] == Catch::Approx(0.25));
    }
    SECTION("n=2, identity, lambda=2 gives +-2 e_j offsets") {
        Vector c(2);
        c << 1.0, -1.0;
        SigmaSet s = sigma_points(c, Matrix::Identity(2, 2), 2.0);
        REQUIRE(s.count() == 5);
        CHECK((s.points.row(1).transpose() - c).norm() == Catch::Approx(2.0));
        CHECK((s.points.row(2).transpose() - c).norm() == Catch::Approx(2.0));
        CHECK(s.weights[0] == Catch::Approx(0.5));
        for (int j = 1; j < 5; ++j) CHECK(s.weights[j] == Catch::Approx(0.125));
    }
    SECTION("zero covariance collapses all points onto the center") {
        Vector c(3);
        c << 1.0, 2.0, 3.0;
        SigmaSet s = sigma_points(c, Matrix::Zero(3, 3), 1.5);
        for (int j = 0; j < s.count(); ++j)
            REQUIRE((s.points.row(j).transpose() - c).norm() == 0.0);
    }
    SECTION("scaling must keep n + lambda positive") {
        REQUIRE_THROWS_AS(sigma_points(vec1(0.0), Matrix::Identity(1, 1), -1.0),
                          BadScaling);
    }
}

TEST_CASE("sigma sets reconstruct their defining moments") {
    RngStream rng(11, 0);
    const double lambdas[] = {0.5, 1.0, 2.0, 3.0, 5.5};
    for (int rep = 0; rep < 100; ++rep) {
        const int n = 1 + static_cast<int>(rng.uniform01() * 3);
        Vector c(n);
        for (int j = 0; j < n; ++j) c[j] = rng.uniform(-5.0, 5.0);
        Matrix p = random_psd(n, rng);
        const double lambda = lambdas[rep % 5];
        SigmaSet s = sigma_points(c, p, lambda);

        REQUIRE(std::fabs(s.weights.sum() - 1.0) < 1e-12);
        Vector mean = s.points.transpose() * s.weights;
        REQUIRE((mean - c).norm() < 1e-10);
        Matrix cov = Matrix::Zero(n, n);
        for (int j = 0; j < s.count(); ++j) {
            Vector d = s.points.row(j).transpose() - c;
            cov += s.weights[j] * d * d.transpose();
        }
        REQUIRE((cov - p).norm() / p.norm() < 1e-9);
    }
}

TEST_CASE("sigma offsets are symmetric about the center") {
    RngStream rng(13, 0);
    for (int rep = 0; rep < 20; ++rep) {
        const int n = 1 + static_cast<int>(rng.uniform01() * 3);
        Vector c(n);
        for (int j = 0; j < n; ++j) c[j] = rng.uniform(-2.0, 2.0);
        SigmaSet s = sigma_points(c, random_psd(n, rng), 1.0);
        Vector first_moment = Vector::Zero(n);
        for (int j = 1; j <= n; ++j) {
            Vector up = s.points.row(j).transpose() - c;
            Vector dn = s.points.row(j + n).transpose() - c;
            REQUIRE((up + dn).norm() < 1e-12);
        }
        for (int j = 0; j < s.count(); ++j)
            first_moment += s.weights[j] * (s.points.row(j).transpose() - c);
        REQUIRE(first_moment.norm() <= 1e-12 * std::max(1.0, c.norm()));
    }
}

TEST_CASE("transform is exact on affine maps") {
    RngStream rng(19, 0);
    for (int rep = 0; rep < 100; ++rep) {
        const int n = 1 + static_cast<int>(rng.uniform01() * 3);
        Vector slope(n);
        for (int j = 0; j < n; ++j) slope[j] = rng.uniform(-3.0, 3.0);
        const double intercept = rng.uniform(-5.0, 5.0);
        NoisyObjective obj = affine_objective(slope, intercept, wide_box(n));

        Vector c(n);
        for (int j = 0; j < n; ++j) c[j] = rng.uniform(-4.0, 4.0);
        Matrix p = random_psd(n, rng);
        const double r = rng.uniform(0.0, 2.0);

        SigmaSet s = sigma_points(c, p, 1.0);
        RngStream ut_rng(1, 2);
        UtMoments m = ut_propagate(s, obj, r, ut_rng);

        REQUIRE(std::fabs(m.y_mean - (slope.dot(c) + intercept)) < 1e-10);
        REQUIRE(std::fabs(m.y_var - (slope.dot(p * slope) + r)) <
                1e-9 * std::max(1.0, slope.dot(p * slope)));
    }
}

TEST_CASE("hand-computed quadratic moments") {
    NoisyObjective obj;
    obj.name = "square";
    obj.core = [](const Vector& x) { return x[0] * x[0]; };
    obj.domain = wide_box(1);

    Matrix p(1, 1);
    p << 1.0;
    SigmaSet s = sigma_points(vec1(0.0), p, 1.0);
    RngStream rng(0, 0);
    UtMoments m = ut_propagate(s, obj, 0.0, rng);
    // points {0, +sqrt(2), -sqrt(2)} map to {0, 2, 2}; mean = 2 * 1/4 + 2 * 1/4
    REQUIRE(m.y_mean == Catch::Approx(1.0));
    REQUIRE(m.transformed[1] == Catch::Approx(2.0));
    REQUIRE(m.transformed[2] == Catch::Approx(2.0));
}

TEST_CASE("degenerate spread returns the center value with the noise floor") {
    NoisyObjective obj;
    obj.name = "cubic";
    obj.core = [](const Vector& x) { return x[0] * x[0] * x[0] - 2.0; };
    obj.domain = wide_box(1);

    SigmaSet s = sigma_points(vec1(1.5), Matrix::Zero(1, 1), 2.0);
    RngStream rng(4, 4);
    UtMoments m = ut_propagate(s, obj, 0.25, rng);
    REQUIRE(m.y_mean == Catch::Approx(obj.eval_true(vec1(1.5))));
    REQUIRE(m.y_var == Catch::Approx(0.25));
}

TEST_CASE("transform result does not depend on the caller's stream position") {
    const auto& obj = find_objective("H2");
    Matrix p(1, 1);
    p << 0.5;
    SigmaSet s = sigma_points(vec1(0.3), p, 1.0);
    RngStream a(42, 9);
    RngStream b(42, 9);
    (void)b.normal(); // advancing the parent must not change substream draws
    UtMoments ma = ut_propagate(s, obj, 0.5, a);
    UtMoments mb = ut_propagate(s, obj, 0.5, b);
    REQUIRE(ma.y_mean == mb.y_mean);
    REQUIRE(ma.y_var == mb.y_var);
}
