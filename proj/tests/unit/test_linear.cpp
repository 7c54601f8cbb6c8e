#include <doctest.h>

#include "liqrec/econ/linear.hpp"
#include "liqrec/error.hpp"

#include <cmath>
#include <random>

using namespace liqrec;
using namespace liqrec::econ;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

struct Toy {
    MatrixXd x;
    VectorXd y;
    std::vector<long> g;
};

Toy toy40() {
    Toy t;
    const int n = 40;
    t.x.resize(n, 2);
    t.y.resize(n);
    for (int i = 0; i < n; ++i) {
        t.x(i, 0) = std::sin(i * 0.7) + 0.1 * i;
        t.x(i, 1) = std::cos(i * 1.3);
        t.y(i) = 1.0 + 2.0 * t.x(i, 0) - 0.5 * t.x(i, 1) + std::sin(i * 2.1) * 0.8;
        t.g.push_back(i % 5);
    }
    return t;
}

// Direct double sum over all (s, t) pairs with Bartlett weights.
MatrixXd nw_oracle(const VectorXd& e, const MatrixXd& x, int lag) {
    const auto n = x.rows(), k = x.cols();
    MatrixXd s = MatrixXd::Zero(k, k);
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) {
            const double w = std::max(0.0, 1.0 - std::abs(static_cast<double>(a - b)) / (lag + 1.0));
            if (w == 0.0) continue;
            s += w * e(a) * e(b) * x.row(a).transpose() * x.row(b);
        }
    const MatrixXd bread = (x.transpose() * x).inverse();
    return bread * s * bread;
}

}  // namespace

TEST_CASE("exact fit") {
    MatrixXd x(5, 1);
    x << 1, 2, 3, 4, 5;
    VectorXd y = 2.0 * x.col(0);
    const auto r = ols(x, {"x"}, y, {}, SeSpec::classical(), {.intercept = false});
    CHECK(r.b("x") == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(r.ssr < 1e-24);
}

TEST_CASE("SE flavors against reference values") {
    const auto t = toy40();
    const std::vector<std::string> nm{"x1", "x2"};
    const std::vector<double> b{1.0267226996771095, 1.987813124382173, -0.49595167252844075};
    struct Row {
        SeSpec se;
        std::vector<double> want;
    };
    const std::vector<Row> rows{
        {SeSpec::classical(), {0.16525529001338654, 0.06814891522745684, 0.12872490811929926}},
        {SeSpec::hc(SeKind::hc0), {0.15589409258748738, 0.06386371784546474, 0.12173193783102737}},
        {SeSpec::hc(SeKind::hc1), {0.16209095912789578, 0.0664023319115529, 0.12657084198655735}},
        {SeSpec::hc(SeKind::hc3), {0.17194083629534607, 0.0716796591767939, 0.13354103760031427}},
        {SeSpec::clustered(t.g, "g"), {0.06861114770227557, 0.020606964580349336, 0.03206846356710975}},
        {SeSpec::newey_west(3), {0.07375634407823344, 0.02893369716673292, 0.11407928274363349}},
    };
    for (const auto& row : rows) {
        const auto r = ols(t.x, nm, t.y, {}, row.se);
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(r.coef(static_cast<Eigen::Index>(i)) == doctest::Approx(b[i]).epsilon(1e-12));
            CHECK(r.se(i) == doctest::Approx(row.want[i]).epsilon(1e-10));
        }
    }
    const auto r = ols(t.x, nm, t.y, {}, SeSpec::classical());
    CHECK(r.r2 == doctest::Approx(0.9589837743775645).epsilon(1e-12));
    CHECK(r.adj_r2 == doctest::Approx(0.9567666811006762).epsilon(1e-12));
}

TEST_CASE("FE absorption matches explicit dummies") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> z;
    const int n = 30;
    MatrixXd x(n, 2);
    VectorXd y(n);
    std::vector<long> g1(n), g2(n);
    for (int i = 0; i < n; ++i) {
        g1[static_cast<std::size_t>(i)] = i % 3;
        g2[static_cast<std::size_t>(i)] = (i / 3) % 4;
        x(i, 0) = z(rng) + 0.3 * g1[static_cast<std::size_t>(i)];
        x(i, 1) = z(rng);
        y(i) = 1.5 * x(i, 0) - x(i, 1) + 2.0 * g1[static_cast<std::size_t>(i)] - g2[static_cast<std::size_t>(i)] + z(rng);
    }
    SUBCASE("one-way") {
        MatrixXd xd(n, 2 + 3);
        xd.leftCols(2) = x;
        for (int i = 0; i < n; ++i)
            for (int g = 0; g < 3; ++g) xd(i, 2 + g) = g1[static_cast<std::size_t>(i)] == g;
        const auto within = ols(x, {"a", "b"}, y, {g1}, SeSpec::classical());
        const auto dummy = ols(xd, {"a", "b", "d0", "d1", "d2"}, y, {}, SeSpec::classical(), {.intercept = false});
        CHECK(std::abs(within.b("a") - dummy.b("a")) < 1e-10);
        CHECK(std::abs(within.b("b") - dummy.b("b")) < 1e-10);
        CHECK(within.n_params == dummy.n_params);
        CHECK(within.se("a") == doctest::Approx(dummy.se("a")).epsilon(1e-10));
        CHECK(within.ssr == doctest::Approx(dummy.ssr).epsilon(1e-10));
    }
    SUBCASE("two-way") {
        MatrixXd xd(n, 2 + 3 + 3);
        xd.leftCols(2) = x;
        for (int i = 0; i < n; ++i) {
            for (int g = 0; g < 3; ++g) xd(i, 2 + g) = g1[static_cast<std::size_t>(i)] == g;
            for (int g = 1; g < 4; ++g) xd(i, 4 + g) = g2[static_cast<std::size_t>(i)] == g;
        }
        const auto within = ols(x, {"a", "b"}, y, {g1, g2}, SeSpec::hc(SeKind::hc1));
        const auto dummy = ols(xd, {"a", "b", "d0", "d1", "d2", "e1", "e2", "e3"}, y, {}, SeSpec::hc(SeKind::hc1),
                               {.intercept = false});
        CHECK(std::abs(within.b("a") - dummy.b("a")) < 1e-10);
        CHECK(std::abs(within.b("b") - dummy.b("b")) < 1e-10);
        CHECK(within.n_params == dummy.n_params);
        CHECK(within.se("b") == doctest::Approx(dummy.se("b")).epsilon(1e-9));
    }
}

TEST_CASE("one observation per cluster equals HC1") {
    const auto t = toy40();
    std::vector<long> own(40);
    for (long i = 0; i < 40; ++i) own[static_cast<std::size_t>(i)] = i;
    const auto c = ols(t.x, {"x1", "x2"}, t.y, {}, SeSpec::clustered(own, "row"));
    const auto h = ols(t.x, {"x1", "x2"}, t.y, {}, SeSpec::hc(SeKind::hc1));
    for (std::size_t i = 0; i < 3; ++i) CHECK(c.se(i) == doctest::Approx(h.se(i)).epsilon(1e-12));
}

TEST_CASE("Newey-West") {
    const auto t = toy40();
    const auto r0 = ols(t.x, {"x1", "x2"}, t.y, {}, SeSpec::newey_west(0));
    const auto h0 = ols(t.x, {"x1", "x2"}, t.y, {}, SeSpec::hc(SeKind::hc0));
    CHECK((r0.vcov - h0.vcov).cwiseAbs().maxCoeff() < 1e-15);

    std::mt19937_64 rng(5);
    std::normal_distribution<double> z;
    MatrixXd x(50, 3);
    VectorXd e(50);
    for (int i = 0; i < 50; ++i) {
        x(i, 0) = 1.0;
        x(i, 1) = z(rng);
        x(i, 2) = z(rng);
        e(i) = z(rng);
    }
    const MatrixXd got = newey_west(e, x, 3);
    const MatrixXd want = nw_oracle(e, x, 3);
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-10);
    CHECK_THROWS_AS(newey_west(e, x, 50), EstimatorError);
}

TEST_CASE("rank deficiency names the columns") {
    MatrixXd x(10, 3);
    for (int i = 0; i < 10; ++i) {
        x(i, 0) = i;
        x(i, 1) = i * i;
        x(i, 2) = 2.0 * i - 0.5 * i * i;
    }
    VectorXd y = VectorXd::LinSpaced(10, 0, 1);
    try {
        ols(x, {"lin", "sq", "combo"}, y, {}, SeSpec::classical());
        FAIL("expected rank error");
    } catch (const EstimatorError& e) {
        CHECK(std::string(e.what()).find("combo") != std::string::npos);
    }
    // a regressor constant within groups is absorbed by the FE
    std::vector<long> g{0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
    MatrixXd xc(10, 2);
    for (int i = 0; i < 10; ++i) {
        xc(i, 0) = i;
        xc(i, 1) = g[static_cast<std::size_t>(i)] * 3.0;
    }
    CHECK_THROWS_AS(ols(xc, {"t", "grp"}, y, {g}, SeSpec::classical()), EstimatorError);
}

TEST_CASE("Wald test") {
    const auto t = toy40();
    auto r = ols(t.x, {"x1", "x2"}, t.y, {}, SeSpec::classical());
    const std::size_t one[] = {2};
    const auto w = wald_test(r, one, "x2");
    CHECK(w.f == doctest::Approx(r.t(2) * r.t(2)).epsilon(1e-12));
    CHECK(w.p == doctest::Approx(r.p(2)).epsilon(1e-10));
    CHECK(w.df2 == 37);
}
