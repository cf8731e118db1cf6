#include "heurreg/errors.hpp"
#include "heurreg/experiments.hpp"

#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

using namespace heurreg;

namespace {

bool message_contains(const std::exception& e, const std::string& needle) {
    return std::string(e.what()).find(needle) != std::string::npos;
}

} // namespace

TEST_CASE("log-log slope fit: exact lines and validation") {
    auto fit = fit_loglog_slope({1.0, 2.0, 4.0, 8.0}, {1.0, 4.0, 16.0, 64.0});
    CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(fit.slope_stderr < 1e-10);
    CHECK(fit.n_points == 4);

    auto two = fit_loglog_slope({1.0, std::exp(1.0)}, {2.0, 2.0 * std::exp(1.0)});
    CHECK(two.slope == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(two.intercept == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(two.slope_stderr == 0.0);
    CHECK(two.n_points == 2);

    // a noisy line still recovers the slope, with a nonzero standard error
    std::vector<double> x, y;
    for (int k = 0; k < 12; ++k) {
        x.push_back(std::pow(10.0, -k / 3.0));
        y.push_back(0.7 * std::pow(x.back(), 0.5) * (k % 2 ? 1.05 : 0.95));
    }
    auto noisy = fit_loglog_slope(x, y);
    CHECK(noisy.slope == doctest::Approx(0.5).epsilon(0.05));
    CHECK(noisy.slope_stderr > 0.0);

    CHECK_THROWS_AS(fit_loglog_slope({1.0}, {1.0}), parameter_error);
    CHECK_THROWS_AS(fit_loglog_slope({1.0, 2.0}, {1.0}), parameter_error);
    CHECK_THROWS_AS(fit_loglog_slope({1.0, -2.0}, {1.0, 1.0}), parameter_error);
    CHECK_THROWS_AS(fit_loglog_slope({1.0, 2.0}, {0.0, 1.0}), parameter_error);
    CHECK_THROWS_AS(fit_loglog_slope({3.0, 3.0}, {1.0, 2.0}), parameter_error);
}

TEST_CASE("known rate exponents: hand values") {
    // qo at full smoothness: guaranteed and order-optimal exponents coincide
    CHECK(theoretical_exponent(RuleKind::QO, 1.0, 0.0, 0.0, false) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(theoretical_exponent(RuleKind::QO, 1.0, 0.0, 0.0, true) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(theoretical_exponent(RuleKind::QO, 0.5, 0.3, 0.0, false) ==
          doctest::Approx(0.5 / 2.6).epsilon(1e-14));
    CHECK(theoretical_exponent(RuleKind::QO, 0.5, 0.3, 0.0, true) ==
          doctest::Approx(1.0 / 2.6).epsilon(1e-14));

    // discrepancy variant at the boundary q = 1/2 - mu
    CHECK(theoretical_exponent(RuleKind::HD, 0.5, 0.0, 0.0, false) ==
          doctest::Approx(0.5).epsilon(1e-14));
    CHECK(theoretical_exponent(RuleKind::HD, 0.5, 0.0, 0.0, true) ==
          doctest::Approx(0.5).epsilon(1e-14));
    CHECK(theoretical_exponent(RuleKind::HD, 0.2, 0.3, 0.3, false) ==
          doctest::Approx((0.4 / 2.0) * (0.4 / 0.4)).epsilon(1e-14));

    // ratio variant is square-root slower without regularity
    CHECK(theoretical_exponent(RuleKind::HR, 0.5, 0.0, 0.0, false) ==
          doctest::Approx(0.25).epsilon(1e-14));
    CHECK(theoretical_exponent(RuleKind::HR, 0.5, 0.0, 0.0, true) ==
          doctest::Approx(0.5).epsilon(1e-14));
    CHECK(theoretical_exponent(RuleKind::HR, 0.5, 0.3, 0.3, false) ==
          doctest::Approx((1.0 / 2.6) * (0.5 / 0.7)).epsilon(1e-14));

    CHECK(theoretical_exponent(RuleKind::PMS, 0.25, 0.3, 0.0, false) ==
          doctest::Approx(5.0 / 28.0).epsilon(1e-14));
    CHECK(theoretical_exponent(RuleKind::PMS, 0.25, 0.3, 0.0, true) ==
          doctest::Approx(5.0 / 28.0).epsilon(1e-14)); // flag is ignored

    // no smoothness, nothing to converge: exponent zero
    CHECK(theoretical_exponent(RuleKind::QO, 0.0, 0.3, 0.0, false) == 0.0);
    CHECK(theoretical_exponent(RuleKind::HD, 0.0, 0.0, 0.5, false) == 0.0);
    CHECK(theoretical_exponent(RuleKind::HR, 0.0, 0.0, 1.0, false) == 0.0);
}

TEST_CASE("known rate exponents: saturation and domain refusals") {
    CHECK_THROWS_AS(theoretical_exponent(RuleKind::QO, 1.2, 0.0, 0.0, false),
                    saturation_violated);
    try {
        theoretical_exponent(RuleKind::QO, 1.2, 0.0, 0.0, false);
    } catch (const saturation_violated& e) {
        CHECK(message_contains(e, "mu <= 1"));
    }

    CHECK_THROWS_AS(theoretical_exponent(RuleKind::HD, 0.3, 0.3, 0.3, false),
                    saturation_violated);
    try {
        theoretical_exponent(RuleKind::HD, 0.3, 0.3, 0.3, false);
    } catch (const saturation_violated& e) {
        CHECK(message_contains(e, "q <= 1/2 - mu"));
    }

    CHECK_THROWS_AS(theoretical_exponent(RuleKind::HR, 0.9, 0.0, 0.2, false),
                    saturation_violated);
    CHECK_THROWS_AS(theoretical_exponent(RuleKind::PMS, 0.6, 0.3, 0.0, false),
                    saturation_violated);

    // q outside the admissible window is a parameter defect, not saturation
    CHECK_THROWS_AS(theoretical_exponent(RuleKind::HD, 0.1, 0.3, 1.5, false),
                    parameter_error);
    CHECK_THROWS_AS(theoretical_exponent(RuleKind::HD, 0.1, 0.3, 0.1, false),
                    parameter_error);
    CHECK_THROWS_AS(theoretical_exponent(RuleKind::HR, 0.1, 0.3, 2.0, false),
                    parameter_error);
    CHECK_THROWS_AS(theoretical_exponent(RuleKind::QO, 1.0, 0.7, 0.0, false),
                    parameter_error);

    CHECK_THROWS_AS(theoretical_exponent(RuleKind::GCV, 0.5, 0.3, 0.0, false),
                    usage_error);
    CHECK_THROWS_AS(theoretical_exponent(RuleKind::Residual, 0.5, 0.3, 0.0, false),
                    usage_error);
}

TEST_CASE("risk-based case exponents and the T-norm exponent") {
    auto cases = pms_case_exponents(0.25, 0.3, 0.1);
    CHECK(cases.above_opt == doctest::Approx(5.0 / 28.0).epsilon(1e-14));
    CHECK(cases.below_opt == doctest::Approx(3.0 / 35.0).epsilon(1e-14));
    // the margin costs rate: the below-oracle case is strictly slower
    CHECK(cases.below_opt < cases.above_opt);

    CHECK(pms_t_norm_exponent(0.25, 0.3) == doctest::Approx(5.0 / 7.0).epsilon(1e-14));
    CHECK(pms_t_norm_exponent(0.5, 0.3) == doctest::Approx(2.0 / 2.6).epsilon(1e-14));
    CHECK(pms_t_norm_exponent(0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-14));

    CHECK_THROWS_AS(pms_case_exponents(0.6, 0.3, 0.1), parameter_error);
    CHECK_THROWS_AS(pms_case_exponents(0.25, 0.0, 0.1), parameter_error);
    CHECK_THROWS_AS(pms_case_exponents(0.25, 0.3, 0.6), parameter_error);
    CHECK_THROWS_AS(pms_case_exponents(0.25, 0.3, 0.0), parameter_error);
    CHECK_THROWS_AS(pms_t_norm_exponent(0.6, 0.3), parameter_error);
}

TEST_CASE("rank correlation") {
    CHECK(spearman_rank_correlation({1, 2, 3}, {10, 20, 30}) ==
          doctest::Approx(1.0).epsilon(1e-14));
    CHECK(spearman_rank_correlation({1, 2, 3}, {30, 20, 10}) ==
          doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(spearman_rank_correlation({1, 1, 2}, {5, 7, 9}) ==
          doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-14));
    CHECK(spearman_rank_correlation({1, 2, 3}, {4, 4, 4}) == 0.0);
    // monotone nonlinear map: rank correlation is exactly one
    CHECK(spearman_rank_correlation({0.1, 0.5, 2.0, 7.0}, {1e-3, 2e-3, 0.1, 50.0}) ==
          doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(spearman_rank_correlation({1.0}, {1.0}), parameter_error);
    CHECK_THROWS_AS(spearman_rank_correlation({1, 2}, {1, 2, 3}), parameter_error);
}

TEST_CASE("rate study: quasi-optimality on the reference configuration") {
    RateStudyConfig config;
    config.gamma = 2.0;
    config.n = 2000;
    config.mu = 1.0;
    config.s = 2.0;
    config.beta = 0.0;
    config.p = 0.3;
    config.rules = {make_rule(RuleKind::QO, std::nullopt, 0.3)};
    config.grid_count = 200;

    auto report = run_rate_study(config);
    REQUIRE(report.summaries.size() == 1);
    REQUIRE(report.records.size() == 8);

    const auto& summary = report.summaries[0];
    CHECK(summary.status == "ok");
    CHECK(summary.fit_ok);
    CHECK(summary.interior_count == 8);
    CHECK(summary.flagged_count == 0);
    CHECK(summary.fit_x.slope == doctest::Approx(0.542442).epsilon(1e-4));
    REQUIRE(summary.target_exponent.has_value());
    CHECK(*summary.target_exponent == doctest::Approx(2.0 / 3.6).epsilon(1e-14));
    REQUIRE(summary.passed.has_value());
    CHECK(*summary.passed); // one-sided: slope above target - tolerance
    CHECK(summary.spearman == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report.all_passed);

    double eff_max = 0.0;
    for (const auto& rec : report.records) {
        CHECK(rec.flag == SelectionFlag::interior);
        CHECK(rec.err_x > 0.0);
        CHECK(rec.err_T > 0.0);
        CHECK(rec.efficiency >= 1.0 - 1e-12);
        CHECK(std::isfinite(rec.alpha_opt));
        eff_max = std::max(eff_max, rec.efficiency);
    }
    CHECK(eff_max == doctest::Approx(1.0173608771400469).epsilon(1e-6));
    CHECK(eff_max <= 1.2);

    // noise levels descend geometrically from eta_max to eta_min
    CHECK(report.records.front().eta == doctest::Approx(1e-1).epsilon(1e-12));
    CHECK(report.records.back().eta == doctest::Approx(1e-4).epsilon(1e-12));

    // the noise-spread diagnostic rides along for the qo rule
    REQUIRE(report.conditions.size() == 1);
    CHECK(report.conditions[0].id == "N_nu");
    CHECK(report.conditions[0].satisfied);
}

TEST_CASE("rate study: saturation regime reported, not failed") {
    RateStudyConfig config;
    config.n = 2000;
    config.mu = 0.2;
    config.p = 0.3;
    config.rules = {make_rule(RuleKind::HD, 0.3, 0.3)};
    config.eta_max = 1e-2;
    config.eta_min = 1e-4;
    config.eta_levels = 6;
    config.grid_count = 200;

    auto report = run_rate_study(config);
    const auto& summary = report.summaries[0];
    CHECK(summary.status == "ok");
    CHECK(summary.fit_ok);
    CHECK(summary.flagged_count == 1); // largest level hits the top of the grid
    CHECK(report.records[0].flag == SelectionFlag::at_max_edge);
    CHECK(summary.interior_count == 5);
    CHECK(summary.fit_x.slope == doctest::Approx(0.170578).epsilon(1e-4));
    // q = 1/2 - mu exactly: the saturation boundary still admits a target
    REQUIRE(summary.target_exponent.has_value());
    CHECK(*summary.target_exponent == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(report.all_passed);
}

TEST_CASE("rate study: no target beyond saturation, study still passes") {
    RateStudyConfig config;
    config.n = 800;
    config.mu = 0.45;
    config.p = 0.3;
    config.rules = {make_rule(RuleKind::HD, 0.3, 0.3)};
    config.eta_max = 1e-2;
    config.eta_min = 1e-4;
    config.eta_levels = 5;
    config.grid_count = 150;

    auto report = run_rate_study(config);
    const auto& summary = report.summaries[0];
    CHECK_FALSE(summary.target_exponent.has_value());
    CHECK_FALSE(summary.passed.has_value());
    CHECK(summary.target_note.find("1/2 - mu") != std::string::npos);
    CHECK(report.all_passed == summary.fit_ok);
}

TEST_CASE("rate study: zero-noise mode cannot produce a fit") {
    RateStudyConfig config;
    config.n = 500;
    config.mu = 1.0;
    config.zero_noise = true;
    config.rules = {make_rule(RuleKind::QO)};
    config.grid_count = 100;

    auto report = run_rate_study(config);
    REQUIRE(report.records.size() == 1);
    const auto& rec = report.records[0];
    CHECK(rec.eta == 0.0);
    CHECK(rec.flag == SelectionFlag::at_min_edge); // exact data: no interior minimum
    CHECK(std::isnan(rec.alpha_opt));
    CHECK(std::isnan(rec.err_x_opt));

    const auto& summary = report.summaries[0];
    CHECK_FALSE(summary.fit_ok);
    CHECK(summary.status != "ok");
    CHECK_FALSE(report.all_passed);
}

TEST_CASE("rate study: validation") {
    RateStudyConfig config;
    config.rules = {};
    CHECK_THROWS_AS(run_rate_study(config), parameter_error);

    config.rules = {make_rule(RuleKind::QO)};
    config.eta_levels = 3;
    CHECK_THROWS_AS(run_rate_study(config), parameter_error);

    config.eta_levels = 4;
    config.eta_min = 1.0;
    config.eta_max = 0.1;
    CHECK_THROWS_AS(run_rate_study(config), parameter_error);

    config.eta_min = 1e-4;
    config.eta_max = 1e-1;
    config.grid_count = 1;
    CHECK_THROWS_AS(run_rate_study(config), parameter_error);

    config.grid_count = 100;
    config.slope_tolerance = 0.0;
    CHECK_THROWS_AS(run_rate_study(config), parameter_error);

    config.slope_tolerance = 0.1;
    RuleSpec bad;
    bad.kind = RuleKind::HD;
    bad.q = 0.1;
    bad.p = 0.3;
    config.rules = {bad};
    CHECK_THROWS_AS(run_rate_study(config), parameter_error);
}

TEST_CASE("rate study: per-level redraws change the realization, not the law") {
    RateStudyConfig config;
    config.n = 400;
    config.mu = 1.0;
    config.p = 0.0;
    config.signs = SignPattern::seeded_random;
    config.seed = 9;
    config.rules = {make_rule(RuleKind::QO)};
    config.eta_levels = 4;
    config.grid_count = 80;

    auto fixed = run_rate_study(config);
    config.redraw_per_level = true;
    auto redrawn = run_rate_study(config);

    bool any_differs = false;
    for (std::size_t k = 0; k < fixed.records.size(); ++k) {
        CHECK(fixed.records[k].eta == redrawn.records[k].eta);
        if (fixed.records[k].err_x != redrawn.records[k].err_x) any_differs = true;
    }
    CHECK(any_differs);
}

TEST_CASE("rate study: results are worker-count independent") {
    RateStudyConfig config;
    config.n = 600;
    config.mu = 0.5;
    config.p = 0.3;
    config.rules = {make_rule(RuleKind::QO, std::nullopt, 0.3),
                    make_rule(RuleKind::HR, 0.3, 0.3)};
    config.eta_levels = 4;
    config.grid_count = 120;

    config.workers = 1;
    auto serial = run_rate_study(config);
    config.workers = 4;
    auto parallel = run_rate_study(config);

    REQUIRE(serial.records.size() == parallel.records.size());
    for (std::size_t k = 0; k < serial.records.size(); ++k) {
        CHECK(serial.records[k].alpha_star == parallel.records[k].alpha_star);
        CHECK(serial.records[k].psi_star == parallel.records[k].psi_star);
        CHECK(serial.records[k].err_x == parallel.records[k].err_x);
        CHECK(serial.records[k].efficiency == parallel.records[k].efficiency);
    }
    for (std::size_t k = 0; k < serial.summaries.size(); ++k) {
        CHECK(serial.summaries[k].fit_x.slope == parallel.summaries[k].fit_x.slope);
        CHECK(serial.summaries[k].fit_T.slope == parallel.summaries[k].fit_T.slope);
    }
}

TEST_CASE("gcv bracket check on the reference configuration") {
    RateStudyConfig config;
    config.gamma = 2.0;
    config.n = 20000;
    config.mu = 0.5;
    config.s = 2.0;
    config.beta = 0.0;
    config.p = 0.3;
    config.rules = {make_rule(RuleKind::GCV, std::nullopt, 0.3)};
    config.eta_max = 1e-1;
    config.eta_min = 1e-4;
    config.eta_levels = 6;
    config.grid_count = 200;

    auto report = run_rate_study(config);
    auto check = gcv_bound_check(report, 0.1, 0.1);

    CHECK(check.applicable);
    CHECK(check.t_reg == doctest::Approx(2.1).epsilon(1e-14));
    REQUIRE(check.levels.size() == 6);
    for (const auto& level : check.levels) {
        CHECK_FALSE(level.boundary);
        CHECK(level.contained);
        CHECK(level.lower <= level.alpha_star);
        CHECK(level.alpha_star <= level.upper_t2);
        CHECK(level.alpha_star <= level.upper_treg);
    }
    CHECK(check.levels[0].alpha_star == doctest::Approx(4.138e-2).epsilon(1e-3));
    CHECK(check.contained_all);
    CHECK(check.max_drift_c_low == doctest::Approx(1.817).epsilon(1e-3));
    CHECK(check.max_drift_c_up_t2 == doctest::Approx(1.773).epsilon(1e-3));
    CHECK(check.max_drift_c_up_treg == doctest::Approx(1.589).epsilon(1e-3));
    CHECK(check.constants_stable);

    REQUIRE(check.conditions.size() == 2);
    CHECK(check.conditions[0].id == "gcv_noise");
    CHECK(check.conditions[0].satisfied);
    CHECK(check.conditions[1].id == "gcv_regularity");
    CHECK(check.conditions[1].satisfied);

    CHECK_THROWS_AS(gcv_bound_check(report, 0.0, 0.1), parameter_error);
    CHECK_THROWS_AS(gcv_bound_check(report, 0.7, 0.1), parameter_error);
    CHECK_THROWS_AS(gcv_bound_check(report, 0.1, 0.0), parameter_error);
}
