#include "heurreg/errors.hpp"
#include "heurreg/selection.hpp"
#include "heurreg/spectral_model.hpp"

#include <doctest.h>

#include "support.hpp"

#include <cmath>
#include <limits>
#include <vector>

using namespace heurreg;

TEST_CASE("geometric grid: endpoints, ratio, example values") {
    auto grid = make_geometric_grid(1.0, 1e-4, 5);
    REQUIRE(grid.size() == 5);
    CHECK(grid.points[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(grid.points[1] == doctest::Approx(1e-1).epsilon(1e-12));
    CHECK(grid.points[2] == doctest::Approx(1e-2).epsilon(1e-12));
    CHECK(grid.points[3] == doctest::Approx(1e-3).epsilon(1e-12));
    CHECK(grid.points[4] == doctest::Approx(1e-4).epsilon(1e-12));
    for (std::size_t k = 1; k < grid.size(); ++k)
        CHECK(grid.points[k] < grid.points[k - 1]);

    CHECK_THROWS_AS(make_geometric_grid(1.0, 1e-4, 1), parameter_error);
    CHECK_THROWS_AS(make_geometric_grid(1e-4, 1.0, 5), parameter_error);
    CHECK_THROWS_AS(make_geometric_grid(1.0, 0.0, 5), parameter_error);
    CHECK_THROWS_AS(make_geometric_grid(1.0, 1.0, 5), parameter_error);
}

TEST_CASE("default problem grid spans the spectrum") {
    auto prob = build_polynomial_problem(2.0, 100, 0.5, 2.0);
    auto grid = make_alpha_grid(prob);
    CHECK(grid.size() == 400);
    CHECK(grid.points.front() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(grid.points.back() == doctest::Approx(1e-4).epsilon(1e-10));

    // floor kicks in once lambda_N drops below 1e-12
    auto deep = build_polynomial_problem(4.0, 2000, 0.5, 2.0);
    auto deep_grid = make_alpha_grid(deep, 50);
    CHECK(deep_grid.points.back() == doctest::Approx(1e-12).epsilon(1e-10));

    auto overridden = make_alpha_grid(prob, 30, 1e-6);
    CHECK(overridden.points.back() == doctest::Approx(1e-6).epsilon(1e-10));
}

TEST_CASE("select_from_curve: scan semantics") {
    AlphaGrid grid = make_geometric_grid(1.0, 1e-3, 4);

    auto r = select_from_curve({3.0, 1.0, 2.0, 4.0}, grid);
    CHECK(r.index == 1);
    CHECK(r.alpha_star == grid.points[1]);
    CHECK(r.psi_star == 1.0);
    CHECK(r.flag == SelectionFlag::interior);

    // ties resolve toward the smaller alpha (later index)
    r = select_from_curve({3.0, 1.0, 1.0, 4.0}, grid);
    CHECK(r.index == 2);

    // all equal: last point wins and is flagged as the min edge
    r = select_from_curve({0.0, 0.0, 0.0, 0.0}, grid);
    CHECK(r.index == 3);
    CHECK(r.flag == SelectionFlag::at_min_edge);

    r = select_from_curve({1.0, 2.0, 3.0, 4.0}, grid);
    CHECK(r.flag == SelectionFlag::at_max_edge);
    CHECK(r.index == 0);

    // non-finite entries are skipped
    double nan = std::numeric_limits<double>::quiet_NaN();
    double inf = std::numeric_limits<double>::infinity();
    r = select_from_curve({nan, 5.0, inf, 6.0}, grid);
    CHECK(r.index == 1);
    CHECK(r.psi_star == 5.0);

    CHECK_THROWS_AS(select_from_curve({nan, inf, nan, nan}, grid), selection_failed);
    CHECK_THROWS_AS(select_from_curve({1.0, 2.0}, grid), parameter_error);
}

TEST_CASE("psi_curve matches pointwise evaluation and rejects bad grids") {
    auto prob = build_polynomial_problem(2.0, 64, 0.5, 2.0);
    auto noise = build_polynomial_noise(0.0, 1e-3, 64);
    std::vector<double> d(64);
    for (std::size_t i = 0; i < 64; ++i)
        d[i] = prob.exact_data[i] + noise.coefficients[i];
    auto grid = make_alpha_grid(prob, 37);

    for (auto rule : {make_rule(RuleKind::QO), make_rule(RuleKind::HD, 0.3),
                      make_rule(RuleKind::HR, 0.1), make_rule(RuleKind::Residual)}) {
        auto curve = psi_curve(rule, prob, d, grid);
        REQUIRE(curve.size() == grid.size());
        for (std::size_t k = 0; k < grid.size(); k += 7)
            CHECK(curve[k] == psi(rule, prob, d, grid.points[k]));
    }

    auto pms_curve = psi_curve(make_rule(RuleKind::PMS), prob, d, grid);
    CHECK(pms_curve[3] == psi_pms(prob, d, prob.exact_data, grid.points[3]));
    auto gcv_curve = psi_curve(make_rule(RuleKind::GCV), prob, d, grid);
    CHECK(gcv_curve[3] == psi_gcv(prob, d, grid.points[3]));

    // grid reaching above lambda_1 is outside the filter-rule domain
    AlphaGrid high = make_geometric_grid(2.0, 1e-3, 10);
    CHECK_THROWS_AS(psi_curve(make_rule(RuleKind::QO), prob, d, high), parameter_error);

    AlphaGrid unsorted;
    unsorted.points = {0.5, 0.7, 0.1};
    CHECK_THROWS_AS(psi_curve(make_rule(RuleKind::QO), prob, d, unsorted), parameter_error);
    CHECK_THROWS_AS(psi_curve(make_rule(RuleKind::QO), prob, {1.0}, grid), parameter_error);
}

TEST_CASE("select_alpha: noisy quasi-optimality lands in the interior") {
    auto prob = build_polynomial_problem(2.0, 500, 1.0, 2.0);
    auto noise = build_polynomial_noise(0.0, 1.0, 500, SignPattern::alternating);
    noise = scale_noise_to_eta(noise, prob, 0.0, 1e-3);
    std::vector<double> d(500);
    for (std::size_t i = 0; i < 500; ++i)
        d[i] = prob.exact_data[i] + noise.coefficients[i];
    auto grid = make_alpha_grid(prob, 100);
    auto r = select_alpha(make_rule(RuleKind::QO), prob, d, grid);
    CHECK(r.flag == SelectionFlag::interior);
    CHECK(r.alpha_star > grid.points.back());
    CHECK(r.alpha_star < grid.points.front());
    CHECK(r.psi_star > 0.0);
}

TEST_CASE("select_alpha: zero noise drives the minimizer to the small edge") {
    auto prob = build_polynomial_problem(2.0, 500, 1.0, 2.0);
    auto grid = make_alpha_grid(prob, 100);
    auto r = select_alpha(make_rule(RuleKind::QO), prob, prob.exact_data, grid);
    CHECK(r.flag == SelectionFlag::at_min_edge);
    CHECK(r.index == grid.size() - 1);
}

TEST_CASE("selection is invariant under data scaling") {
    auto prob = build_polynomial_problem(1.5, 200, 0.5, 1.8);
    auto noise = build_polynomial_noise(0.5, 0.01, 200, SignPattern::seeded_random, 17);
    std::vector<double> d(200), d2(200);
    for (std::size_t i = 0; i < 200; ++i) {
        d[i] = prob.exact_data[i] + noise.coefficients[i];
        d2[i] = 2.0 * d[i]; // power of two: scaling is exact in binary FP
    }
    auto grid = make_alpha_grid(prob, 80);
    for (auto rule : {make_rule(RuleKind::QO), make_rule(RuleKind::HD, 0.2),
                      make_rule(RuleKind::HR, 0.2)}) {
        auto a = select_alpha(rule, prob, d, grid);
        auto b = select_alpha(rule, prob, d2, grid);
        CHECK(a.index == b.index); // argmin is scale-free, bitwise here
        CHECK(b.psi_star == 2.0 * a.psi_star);
    }
}

TEST_CASE("grid refinement moves the minimizer by at most one coarse step") {
    auto prob = build_polynomial_problem(2.0, 2000, 1.0, 2.0);
    auto noise = build_polynomial_noise(0.0, 1.0, 2000, SignPattern::alternating);
    noise = scale_noise_to_eta(noise, prob, 0.3, 1e-2);
    std::vector<double> d(2000);
    for (std::size_t i = 0; i < 2000; ++i)
        d[i] = prob.exact_data[i] + noise.coefficients[i];

    auto coarse = make_alpha_grid(prob, 100);
    auto fine = make_alpha_grid(prob, 200);
    auto rc = select_alpha(make_rule(RuleKind::QO, std::nullopt, 0.3), prob, d, coarse);
    auto rf = select_alpha(make_rule(RuleKind::QO, std::nullopt, 0.3), prob, d, fine);

    CHECK(rc.alpha_star == doctest::Approx(3.410952e-2).epsilon(1e-5));
    CHECK(rf.alpha_star == doctest::Approx(3.469349e-2).epsilon(1e-5));

    double coarse_ratio = coarse.points[0] / coarse.points[1];
    double move = std::max(rf.alpha_star / rc.alpha_star, rc.alpha_star / rf.alpha_star);
    CHECK(move <= coarse_ratio);
}

TEST_CASE("apriori_optimal_alpha: values and validation") {
    CHECK(apriori_optimal_alpha(1e-3, 1.0, 0.0) ==
          doctest::Approx(std::pow(1e-3, 2.0 / 3.0)).epsilon(1e-14));
    CHECK(apriori_optimal_alpha(1e-2, 0.5, 0.5, 2.0) ==
          doctest::Approx(2.0 * std::pow(1e-2, 2.0 / 3.0)).epsilon(1e-14));
    CHECK(apriori_optimal_alpha(0.04, 0.0, 0.0) ==
          doctest::Approx(0.04 * 0.04).epsilon(1e-14));

    CHECK_THROWS_AS(apriori_optimal_alpha(0.0, 1.0, 0.0), parameter_error);
    CHECK_THROWS_AS(apriori_optimal_alpha(1e-3, 1.5, 0.0), parameter_error);
    CHECK_THROWS_AS(apriori_optimal_alpha(1e-3, 1.0, 0.6), parameter_error);
    CHECK_THROWS_AS(apriori_optimal_alpha(1e-3, 1.0, 0.0, 0.0), parameter_error);
}

TEST_CASE("selection flag names") {
    CHECK(to_string(SelectionFlag::interior) == "interior");
    CHECK(to_string(SelectionFlag::at_min_edge) == "at_min_edge");
    CHECK(to_string(SelectionFlag::at_max_edge) == "at_max_edge");
}
