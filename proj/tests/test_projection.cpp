#include "ceos/projection.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace ceos;

TEST_CASE("make_rotation pads spinner dimensions to a power of two") {
    const RotationSpec a = make_rotation(RotationKind::spinner, 7, 500, 1024);
    CHECK(a.D == 1024);
    const RotationSpec b = make_rotation(RotationKind::spinner, 7, 1000, 1000);
    CHECK(b.D == 1024);
    for (const auto& diag : b.sign_diags) {
        REQUIRE(diag.size() == 1024);
        for (int i = 0; i < diag.size(); ++i) CHECK(std::abs(diag[i]) == 1.0f);
    }
}

TEST_CASE("make_rotation gaussian uses requested_D exactly and is reproducible") {
    const RotationSpec a = make_rotation(RotationKind::gaussian, 1, 4, 6);
    REQUIRE(a.gaussian.rows() == 6);
    REQUIRE(a.gaussian.cols() == 4);
    const RotationSpec b = make_rotation(RotationKind::gaussian, 1, 4, 6);
    CHECK(a.gaussian == b.gaussian);
    const RotationSpec c = make_rotation(RotationKind::gaussian, 2, 4, 6);
    CHECK(a.gaussian != c.gaussian);
}

TEST_CASE("make_rotation rejects bad dimensions") {
    CHECK_THROWS_AS(make_rotation(RotationKind::gaussian, 1, 0, 8), ParamError);
    CHECK_THROWS_AS(make_rotation(RotationKind::spinner, 1, 8, 0), ParamError);
    CHECK_THROWS_AS(make_rotation(RotationKind::gaussian, 1, -3, 8), ParamError);
}

TEST_CASE("fwht of a basis vector is the first Hadamard column") {
    std::vector<double> v{1.0, 0.0, 0.0, 0.0};
    fwht(v);
    for (double x : v) CHECK(x == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("fwht keeps zero at zero and rejects non-power-of-two lengths") {
    std::vector<double> zeros(8, 0.0);
    fwht(zeros);
    for (double x : zeros) CHECK(x == 0.0);

    std::vector<double> bad(6, 1.0);
    CHECK_THROWS_AS(fwht(bad), ParamError);
}

TEST_CASE("fwht is orthonormal: norm preserved and involutive") {
    rng::Stream stream(99);
    std::vector<double> v(8);
    for (double& x : v) x = stream.next_gaussian();
    const std::vector<double> original = v;

    double norm_before = 0.0;
    for (double x : v) norm_before += x * x;
    fwht(v);
    double norm_after = 0.0;
    for (double x : v) norm_after += x * x;
    CHECK(std::abs(std::sqrt(norm_after) - std::sqrt(norm_before)) < 1e-12);

    fwht(v);
    for (size_t i = 0; i < v.size(); ++i) CHECK(v[i] == doctest::Approx(original[i]).epsilon(1e-12));
}

TEST_CASE("apply maps zero to zero and rejects length mismatches") {
    const RotationSpec spinner = make_rotation(RotationKind::spinner, 3, 10, 16);
    const Vector zero = Vector::Zero(10);
    CHECK(apply(spinner, zero).isZero(0.0f));

    const RotationSpec gauss = make_rotation(RotationKind::gaussian, 3, 10, 12);
    CHECK(apply(gauss, zero).isZero(0.0f));

    CHECK_THROWS_AS(apply(spinner, Vector::Zero(11)), ParamError);
}

TEST_CASE("spinner rotation preserves inner products") {
    rng::Stream stream(4242);
    const RotationSpec spec = make_rotation(RotationKind::spinner, 11, 100, 128);
    for (int rep = 0; rep < 20; ++rep) {
        const Vector x = testsupport::random_vector(100, stream);
        const Vector y = testsupport::random_vector(100, stream);
        const double expected = dot_exact(x, y);
        const double rotated = dot_exact(apply(spec, x), apply(spec, y));
        const double norms = std::sqrt(dot_exact(x, x)) * std::sqrt(dot_exact(y, y));
        CHECK(std::abs(rotated - expected) <= 1e-6 * norms);
    }
}

TEST_CASE("gaussian apply matches a hand computation on an injected matrix") {
    RotationSpec spec;
    spec.kind = RotationKind::gaussian;
    spec.d = 2;
    spec.D = 3;
    spec.gaussian.resize(3, 2);
    spec.gaussian << 1, 0, 0, 1, 1, 1;
    Vector x(2);
    x << 2, 3;
    const Vector out = apply(spec, x);
    CHECK(out[0] == 2.0f);
    CHECK(out[1] == 3.0f);
    CHECK(out[2] == 5.0f);
}

TEST_CASE("project_all matches per-point apply bit-for-bit") {
    rng::Stream stream(7);
    VectorSet set;
    set.points = Matrix::NullaryExpr(40, 9, [&](Eigen::Index, Eigen::Index) {
        return static_cast<float>(stream.next_gaussian());
    });

    const RotationSpec spec = make_rotation(RotationKind::spinner, 5, 40, 64);
    const ProjectedMatrix pm = project_all(spec, set);
    REQUIRE(pm.D == 64);
    REQUIRE(pm.n == 9);
    for (int j = 0; j < set.size(); ++j) {
        const Vector per_point = apply(spec, set.col(j));
        CHECK(pm.values.col(j) == per_point);
    }

    SUBCASE("single point reduces to apply") {
        VectorSet one;
        one.points = set.points.leftCols(1);
        const ProjectedMatrix single = project_all(spec, one);
        CHECK(single.values.col(0) == apply(spec, one.col(0)));
    }
}

TEST_CASE("project_all with an injected identity rotation is the identity") {
    RotationSpec spec;
    spec.kind = RotationKind::gaussian;
    spec.d = 3;
    spec.D = 3;
    spec.gaussian = Matrix::Identity(3, 3);

    VectorSet set;
    set.points.resize(3, 3);
    set.points << 1, 4, 7, 2, 5, 8, 3, 6, 9;
    const ProjectedMatrix pm = project_all(spec, set);
    CHECK(pm.values == set.points);
}

TEST_CASE("project_all is deterministic under a fixed seed") {
    rng::Stream stream(123);
    VectorSet set;
    set.points = Matrix::NullaryExpr(30, 50, [&](Eigen::Index, Eigen::Index) {
        return static_cast<float>(stream.next_gaussian());
    });
    const ProjectedMatrix a = project_all(make_rotation(RotationKind::gaussian, 9, 30, 64), set);
    const ProjectedMatrix b = project_all(make_rotation(RotationKind::gaussian, 9, 30, 64), set);
    CHECK(a.values == b.values);
}

TEST_CASE("extreme_dims hand examples and tie rule") {
    Vector sig(4);
    sig << 0.3f, -1.2f, 2.5f, 0.1f;
    const ExtremeDims dims = extreme_dims(sig, 1);
    CHECK(dims.max_dims == std::vector<int32_t>{2});
    CHECK(dims.min_dims == std::vector<int32_t>{1});

    Vector tied(4);
    tied << 1, 1, 0, 0;
    const ExtremeDims tie_dims = extreme_dims(tied, 1);
    CHECK(tie_dims.max_dims == std::vector<int32_t>{0});
    CHECK(tie_dims.min_dims == std::vector<int32_t>{2});

    CHECK_THROWS_AS(extreme_dims(sig, 3), ParamError);
    CHECK_THROWS_AS(extreme_dims(sig, 0), ParamError);
}

TEST_CASE("extreme_dims stays disjoint when every value ties") {
    Vector flat = Vector::Constant(6, 2.0f);
    const ExtremeDims dims = extreme_dims(flat, 3);
    CHECK(dims.max_dims == std::vector<int32_t>{0, 1, 2});
    CHECK(dims.min_dims == std::vector<int32_t>{3, 4, 5});
}

TEST_CASE("extreme_dims agrees with a full argsort oracle") {
    rng::Stream stream(31337);
    for (int rep = 0; rep < 50; ++rep) {
        Vector sig = testsupport::random_vector(64, stream);
        const int s0 = 5;
        const ExtremeDims dims = extreme_dims(sig, s0);

        // Oracle: full argsort, descending by value with lower index first.
        std::vector<int> order(64);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (sig[a] != sig[b]) return sig[a] > sig[b];
            return a < b;
        });
        for (int i = 0; i < s0; ++i) {
            CHECK(dims.max_dims[static_cast<size_t>(i)] == order[static_cast<size_t>(i)]);
            CHECK(dims.min_dims[static_cast<size_t>(i)] ==
                  order[static_cast<size_t>(63 - i)]);
        }

        // Separation property from the type contract.
        float min_of_max = sig[dims.max_dims[0]];
        for (int32_t i : dims.max_dims) min_of_max = std::min(min_of_max, sig[i]);
        float max_of_min = sig[dims.min_dims[0]];
        for (int32_t j : dims.min_dims) max_of_min = std::max(max_of_min, sig[j]);
        std::vector<char> chosen(64, 0);
        for (int32_t i : dims.max_dims) chosen[static_cast<size_t>(i)] = 1;
        for (int32_t j : dims.min_dims) chosen[static_cast<size_t>(j)] = 1;
        for (int i = 0; i < 64; ++i) {
            if (chosen[static_cast<size_t>(i)]) continue;
            CHECK(min_of_max >= sig[i]);
            CHECK(max_of_min <= sig[i]);
        }
    }
}

TEST_CASE("spinner signatures keep vector norms (isometry over 1000 vectors)") {
    rng::Stream stream(555);
    const RotationSpec spec = make_rotation(RotationKind::spinner, 21, 100, 128);
    for (int rep = 0; rep < 1000; ++rep) {
        const Vector x = testsupport::random_vector(100, stream);
        const double nx = std::sqrt(dot_exact(x, x));
        const Vector sig = apply(spec, x);
        const double ns = std::sqrt(dot_exact(sig, sig));
        CHECK(std::abs(ns - nx) <= 1e-6 * nx);
    }
}

TEST_CASE("gaussian signature entries center on zero like N(0, |x|^2)") {
    rng::Stream stream(77);
    const Vector x = testsupport::random_vector(30, stream);
    const double nx = std::sqrt(dot_exact(x, x));
    const int D = 1024;
    for (uint64_t seed : {11ULL, 12ULL, 13ULL, 14ULL, 15ULL}) {
        const RotationSpec spec = make_rotation(RotationKind::gaussian, seed, 30, D);
        const Vector sig = apply(spec, x);
        double mean = 0.0;
        for (int i = 0; i < D; ++i) mean += sig[i];
        mean /= D;
        CHECK(std::abs(mean) <= 3.0 * nx / std::sqrt(static_cast<double>(D)));

        double var = 0.0;
        for (int i = 0; i < D; ++i) var += (sig[i] - mean) * (sig[i] - mean);
        var /= (D - 1);
        CHECK(var / (nx * nx) == doctest::Approx(1.0).epsilon(0.25));
    }
}

TEST_CASE("gaussian projection satisfies the relative distortion bound") {
    // Empirical failure rate of |(Rx)^T(Rq)/l - x^T q| >= eps * x^T q over
    // 500 seeds stays below 2 exp(-l eps^2 cos^2(theta) / 8) plus 3-sigma
    // sampling slack.
    rng::Stream stream(2020);
    const int d = 32;
    const int l = 100;
    const double eps = 0.5;
    const auto [x, q] = testsupport::make_unit_pair(d, 0.8, stream);
    const double target = dot_exact(x, q);

    const int trials = 500;
    int violations = 0;
    for (int t = 0; t < trials; ++t) {
        const RotationSpec spec =
            make_rotation(RotationKind::gaussian, 9000 + static_cast<uint64_t>(t), d, l);
        const double est = dot_exact(apply(spec, x), apply(spec, q)) / l;
        if (std::abs(est - target) >= eps * target) ++violations;
    }
    const double cos2 = target * target;  // unit vectors
    const double bound = 2.0 * std::exp(-l * eps * eps * cos2 / 8.0);
    const double sigma = std::sqrt(bound * (1.0 - bound) / trials);
    CHECK(static_cast<double>(violations) / trials <= bound + 3.0 * sigma);
}
