#include <doctest.h>

#include <cmath>
#include <random>

#include "vhrd/errors.hpp"
#include "vhrd/ode.hpp"

using namespace vhrd;

namespace {

OdeParams reference_params(double h_u = 4.0) {
    OdeParams p;
    p.sigma2 = 0.5;
    p.h_u = h_u;
    return p;
}

} // namespace

TEST_CASE("well-mixed reproduction number") {
    CHECK(ode_r0(reference_params()) == doctest::Approx(2.0));
    CHECK(ode_r0(OdeParams{}) == doctest::Approx(1.0));

    OdeParams doubled = reference_params(8.0);
    CHECK(ode_r0(doubled) == doctest::Approx(2.0 * ode_r0(reference_params())));

    OdeParams bad = reference_params();
    bad.mu = -1.0;
    CHECK_THROWS_WITH_AS(ode_r0(bad), doctest::Contains("mu"), ConfigError);
}

TEST_CASE("closed-form equilibria") {
    OdeParams ones;
    OdeEquilibria eq1 = ode_equilibria(ones);
    CHECK(eq1.infection_free.h_i == 0.0);
    CHECK(eq1.infection_free.v_u == doctest::Approx(1.0));
    CHECK(eq1.infection_free.v_i == 0.0);
    CHECK_FALSE(eq1.endemic.has_value()); // r0 = 1 exactly

    OdeParams p2 = reference_params();
    OdeEquilibria eq2 = ode_equilibria(p2);
    REQUIRE(eq2.endemic.has_value());
    CHECK(eq2.endemic->h_i == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(eq2.endemic->v_u == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(eq2.endemic->v_i == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(eq2.endemic->v_u + eq2.endemic->v_i == doctest::Approx(p2.beta / p2.mu).epsilon(1e-14));

    // the right-hand sides vanish at ss2
    const OdeState& e = *eq2.endemic;
    double n = e.v_u + e.v_i;
    double rh = -p2.lambda * e.h_i + p2.sigma1 * p2.h_u * e.v_i;
    double ru = -p2.sigma2 * e.v_u * e.h_i + p2.beta * n - p2.mu * n * e.v_u;
    double ri = p2.sigma2 * e.v_u * e.h_i - p2.mu * n * e.v_i;
    CHECK(std::abs(rh) <= 1e-14);
    CHECK(std::abs(ru) <= 1e-14);
    CHECK(std::abs(ri) <= 1e-14);

    OdeParams p05 = reference_params(1.0);
    CHECK_FALSE(ode_equilibria(p05).endemic.has_value());
}

TEST_CASE("infection-free state is stationary") {
    OdeParams p = reference_params();
    OdeState s{0.0, 1.0, 0.0, 0.0};
    for (int k = 0; k < 100; ++k) {
        OdeState next = ode_step(s, p, 0.05);
        CHECK(std::abs(next.h_i) <= 1e-12);
        CHECK(std::abs(next.v_u - 1.0) <= 1e-12);
        CHECK(std::abs(next.v_i) <= 1e-12);
        s = next;
    }
}

TEST_CASE("total vector density follows the logistic closed form") {
    OdeParams p = reference_params();
    OdeState s{0.5, 0.08, 0.02, 0.0};
    double n0 = s.n();
    double dt = 0.005;
    for (long k = 0; k < 2000; ++k) {
        s = ode_step(s, p, dt);
        double t = s.t;
        double exact = p.beta / p.mu * n0 * std::exp(p.beta * t) /
                       (p.beta / p.mu + n0 * (std::exp(p.beta * t) - 1.0));
        CHECK(std::abs(s.n() - exact) <= 1e-8);
    }
}

TEST_CASE("integrator converges at fourth order") {
    OdeParams p = reference_params();
    auto run_to = [&](double dt) {
        OdeState s{1.0, 0.7, 0.3, 0.0};
        long n = static_cast<long>(std::lround(2.0 / dt));
        for (long k = 0; k < n; ++k) s = ode_step(s, p, dt);
        return s;
    };
    OdeState ref = run_to(1e-4);
    auto err = [&](const OdeState& s) {
        return std::max({std::abs(s.h_i - ref.h_i), std::abs(s.v_u - ref.v_u),
                         std::abs(s.v_i - ref.v_i)});
    };
    double e1 = err(run_to(0.1));
    double e2 = err(run_to(0.05));
    CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.35));
}

TEST_CASE("supercritical runs settle at the endemic state") {
    OdeParams p = reference_params();
    OdeRunOptions opts;
    OdeRunResult r = ode_run(OdeState{1.0, 0.7, 0.3, 0.0}, p, opts);
    CHECK(r.settled);
    CHECK(r.verdict == OdeVerdict::Endemic);
    CHECK(r.r0 == doctest::Approx(2.0));
    CHECK(std::abs(r.final_state.h_i - 2.0) <= 1e-6);
    CHECK(std::abs(r.final_state.v_u - 0.5) <= 1e-6);
    CHECK(std::abs(r.final_state.v_i - 0.5) <= 1e-6);

    OdeParams sub = reference_params(1.0);
    OdeRunResult r1 = ode_run(OdeState{0.5, 0.8, 0.2, 0.0}, sub, opts);
    CHECK(r1.settled);
    CHECK(r1.verdict == OdeVerdict::InfectionFree);

    OdeRunOptions tiny;
    tiny.horizon = 0.5;
    OdeRunResult ru = ode_run(OdeState{1.0, 0.7, 0.3, 0.0}, p, tiny);
    CHECK_FALSE(ru.settled);
    CHECK(ru.verdict == OdeVerdict::Unsettled);
    CHECK(std::string(ode_verdict_name(ru.verdict)) == "unsettled");
}

TEST_CASE("verdict flips exactly once across the threshold") {
    int flips = 0;
    bool last_endemic = false;
    bool first = true;
    for (double s1 : {0.05, 0.1, 0.2, 0.4, 0.8, 1.6, 3.2}) {
        OdeParams p = reference_params();
        p.sigma1 = s1; // r0 = 2 s1
        OdeRunOptions opts;
        opts.horizon = 400.0;
        OdeRunResult r = ode_run(OdeState{0.5, 0.8, 0.2, 0.0}, p, opts);
        bool endemic = r.verdict == OdeVerdict::Endemic;
        bool quiet = r.verdict == OdeVerdict::InfectionFree || r.verdict == OdeVerdict::Extinct;
        CHECK((endemic || quiet));
        CHECK(endemic == (r.r0 > 1.0));
        if (!first && endemic != last_endemic) ++flips;
        last_endemic = endemic;
        first = false;
    }
    CHECK(flips == 1);
}

TEST_CASE("reduced system mirrors the endemic components") {
    OdeParams p = reference_params();

    OdeReducedState zero{0.0, 0.0};
    OdeReducedState z = ode_reduced_step(zero, p, 0.1);
    CHECK(z.h_i == 0.0);
    CHECK(z.v_i == 0.0);

    OdeReducedState s{0.5, 0.1};
    for (int k = 0; k < 4000; ++k) s = ode_reduced_step(s, p, 0.05);
    CHECK(std::abs(s.h_i - 2.0) <= 1e-6);
    CHECK(std::abs(s.v_i - 0.5) <= 1e-6);

    std::mt19937 rng(81);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int pair = 0; pair < 20; ++pair) {
        OdeReducedState lo{2.0 * u(rng), 0.8 * u(rng)};
        OdeReducedState hi{lo.h_i + u(rng), std::min(lo.v_i + 0.2 * u(rng), p.beta / p.mu)};
        for (int k = 0; k < 100; ++k) {
            lo = ode_reduced_step(lo, p, 0.05);
            hi = ode_reduced_step(hi, p, 0.05);
            CHECK(lo.h_i <= hi.h_i + 1e-12);
            CHECK(lo.v_i <= hi.v_i + 1e-12);
        }
    }
}

TEST_CASE("oversized ode steps are rejected") {
    OdeParams ones;
    OdeState s{0.0, 2.0, 0.0, 0.0};
    try {
        ode_step(s, ones, 3.0);
        FAIL("expected StepRejected");
    } catch (const StepRejected& e) {
        CHECK(e.suggested_dt == doctest::Approx(1.5));
    }
}
