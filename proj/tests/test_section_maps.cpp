#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "glacial/errors.hpp"
#include "glacial/section_maps.hpp"

using namespace glacial;
using doctest::Approx;

namespace {

ModelParameters with_epsilon(double eps) {
    ModelParameters p;
    p.epsilon = eps;
    return p;
}

SectionPoint sink_projection(const ModelParameters& p, Regime r) {
    const auto eqs = all_equilibria(p);
    const auto* s = find_sink(eqs, r);
    REQUIRE(s != nullptr);
    return {s->state.w, s->state.eta};
}

}  // namespace

TEST_CASE("guard set") {
    const ModelParameters p;
    const GuardSet guard(p);
    const auto& table = guard.table();
    REQUIRE(table.size() > 10);
    for (std::size_t i = 1; i < table.size(); ++i) CHECK(table[i].first > table[i - 1].first);

    CHECK(guard.contains(sink_projection(p, Regime::Advance)));
    CHECK(guard.contains(sink_projection(p, Regime::Retreat)));
    CHECK_FALSE(guard.contains({-100.0, 0.25}));
    const PlanarEquilibrium& s = guard.saddle();
    CHECK(guard.separatrix(s.eta) == Approx(s.w).epsilon(1e-6));
    CHECK_FALSE(guard.contains({guard.separatrix(0.6), 0.6}));
    CHECK(guard.contains({guard.separatrix(0.6) + 1e-6, 0.6}));

    // Separatrix points flow into the saddle under the advance planar field.
    for (const auto& [eta, w] : table) {
        if (std::abs(eta - s.eta) < 1e-3 || eta < 0.05 || eta > 0.95) continue;
        const State x{w, eta, 0.0};
        const State v = vector_field(x, Regime::Advance, p);
        // The field at a curve point is tangent to the curve.
        const double slope = (guard.separatrix(eta + 1e-6) - guard.separatrix(eta - 1e-6)) / 2e-6;
        CHECK(std::abs(v.w - slope * v.eta) <= 1e-3 * (std::abs(v.w) + std::abs(slope * v.eta)) + 1e-6);
    }
    CHECK(guard_set_membership(sink_projection(p, Regime::Advance), p));
}

TEST_CASE("section maps from the sink projections") {
    const ModelParameters p = with_epsilon(0.003);
    const SectionMaps maps(p, {});
    const SectionPoint zr = maps.retreat_sink_projection();
    const SectionPoint za = maps.advance_sink_projection();
    CHECK(maps.classify(zr) == BoundaryKind::SigmaPlus);
    CHECK(maps.classify(za) == BoundaryKind::SigmaMinus);

    // Small epsilon: the planar flow relaxes to its sink long before the ice line catches up.
    const SectionImage m = maps.minus(zr);
    CHECK(maps.classify(m.point) == BoundaryKind::SigmaMinus);
    CHECK(planar_distance(m.point, za) < 0.05);
    const SectionImage q = maps.plus(za);
    CHECK(maps.classify(q.point) == BoundaryKind::SigmaPlus);
    CHECK(planar_distance(q.point, zr) < 0.05);

    CHECK_THROWS_AS(maps.minus(za), MapUndefined);
    CHECK_THROWS_AS(maps.plus(zr), MapUndefined);
    CHECK_THROWS_AS(maps.minus({-100.0, 0.95}), MapUndefined);

    const CompositeImage c = maps.composite(zr);
    CHECK(c.partner == m.point);
    CHECK(c.transit_minus == m.transit_time);
    CHECK(c.period() == c.transit_minus + c.transit_plus);

    const SectionImage free_form = section_map_minus(zr, p, {});
    CHECK(free_form.point == m.point);
    CHECK(section_map_plus(za, p, {}).point == q.point);
    CHECK(composite_map(zr, p, {}).point == c.point);
}

TEST_CASE("distances") {
    const ModelParameters p;
    const SectionPoint x{1.0, 0.8}, y{1.5, 0.7};
    CHECK(planar_distance(x, y) == Approx(std::hypot(0.5, 0.1)));
    const double k = 1.0 + p.a_over_b();
    CHECK(section_distance(x, y, p) == Approx(std::sqrt(0.25 + 0.01 + k * k * 0.01)));
}

TEST_CASE("transit times grow as epsilon decreases") {
    const SectionPoint seed = sink_projection(ModelParameters{}, Regime::Retreat);
    double previous = 0.0;
    for (double eps : {0.3, 0.03, 0.003}) {
        const SectionMaps maps(with_epsilon(eps), {});
        const double t = maps.minus(seed).transit_time;
        CHECK(t > 0.0);
        CHECK(t > previous);
        previous = t;
    }
}

TEST_CASE("periodic orbits") {
    for (double eps : {0.003, 0.03, 0.3}) {
        CAPTURE(eps);
        const ModelParameters p = with_epsilon(eps);
        const SectionMaps maps(p, {});
        const OrbitResult r = maps.find_periodic_orbit(maps.retreat_sink_projection());
        CHECK(maps.classify(r.fixed_point) == BoundaryKind::SigmaPlus);
        CHECK(maps.classify(r.partner_point) == BoundaryKind::SigmaMinus);
        CHECK(maps.in_guard_set(r.fixed_point));
        CHECK(maps.in_guard_set(r.partner_point));
        CHECK(r.closure_error < 1e-8);
        CHECK(r.period == Approx(r.transit_minus + r.transit_plus));
        CHECK(r.contraction_estimate < 1.0);

        // Fixed point of the composite; partner is the minus image.
        const CompositeImage c = maps.composite(r.fixed_point);
        CHECK(section_distance(c.point, r.fixed_point, p) < 1e-8);
        CHECK(section_distance(maps.minus(r.fixed_point).point, r.partner_point, p) < 1e-8);
        CHECK(section_distance(maps.plus(r.partner_point).point, r.fixed_point, p) < 1e-8);

        // Iterate steps shrink geometrically once settled.
        REQUIRE(r.step_sizes.size() >= 2);
        CHECK(r.step_sizes.back() < r.step_sizes.front());

        // Random admissible seeds in SigmaPlus and the guard set agree.
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        int agreed = 0;
        for (int draws = 0; agreed < 5 && draws < 200; ++draws) {
            const double eta = p.a / (p.a + p.b) + u(rng) * (1.0 - p.a / (p.a + p.b));
            const double lo = maps.guard().separatrix(eta);
            const double hi = tangency_curve(eta, Regime::Retreat, p);
            const SectionPoint seed{lo + u(rng) * (hi - lo), eta};
            if (!(hi > lo) || maps.classify(seed) != BoundaryKind::SigmaPlus || !maps.in_guard_set(seed)) continue;
            const OrbitResult other = maps.find_periodic_orbit(seed);
            CHECK(section_distance(other.fixed_point, r.fixed_point, p) < 1e-8);
            ++agreed;
        }
        CHECK(agreed == 5);
    }
}

TEST_CASE("perturbations of the fixed point decay") {
    const ModelParameters p = with_epsilon(0.03);
    const SectionMaps maps(p, {});
    const OrbitResult r = maps.find_periodic_orbit(maps.retreat_sink_projection());
    // Perturb into the interior of SigmaPlus: lower w keeps the point below g_plus.
    SectionPoint x{r.fixed_point.w - 1e-2, r.fixed_point.eta};
    REQUIRE(maps.classify(x) == BoundaryKind::SigmaPlus);
    std::vector<double> d{section_distance(x, r.fixed_point, p)};
    for (int i = 0; i < 4; ++i) {
        x = maps.composite(x).point;
        d.push_back(section_distance(x, r.fixed_point, p));
    }
    for (std::size_t i = 1; i < d.size(); ++i) CHECK(d[i] < 0.5 * d[i - 1] + 1e-12);
}

TEST_CASE("one period re-integrated from the fixed point closes") {
    for (double eps : {0.03, 0.3}) {
        const ModelParameters p = with_epsilon(eps);
        const SectionMaps maps(p, {});
        const OrbitOptions opts;
        const OrbitResult r = maps.find_periodic_orbit(maps.retreat_sink_projection(), opts);
        IntegratorConfig c;
        c.max_events = 2;
        const auto traj = evolve_hybrid(r.fixed_point.on_plane(p), Regime::Advance, p, c);
        REQUIRE(traj.events.size() == 2);
        CHECK(traj.events[0].kind == BoundaryKind::SigmaMinus);
        CHECK(traj.events[1].kind == BoundaryKind::SigmaPlus);
        CHECK(traj.events[1].time == Approx(r.period).epsilon(1e-8));
        CHECK(norm(traj.final_state - r.fixed_point.on_plane(p)) < 10.0 * opts.tolerance);
    }
}

TEST_CASE("epsilon bound is enforced") {
    const ModelParameters p = with_epsilon(0.35);
    const SectionMaps maps(p, {});
    CHECK_THROWS_AS(maps.find_periodic_orbit({0.0, 0.9}), std::invalid_argument);
    OrbitOptions opts;
    opts.max_iterations = 0;
    CHECK_THROWS_AS(SectionMaps(with_epsilon(0.03), {}).find_periodic_orbit({0.0, 0.9}, opts),
                    std::invalid_argument);
}

TEST_CASE("no orbit within the iteration budget") {
    const ModelParameters p = with_epsilon(0.003);
    const SectionMaps maps(p, {});
    OrbitOptions opts;
    opts.max_iterations = 1;
    opts.tolerance = 1e-14;
    CHECK_THROWS_AS(maps.find_periodic_orbit(maps.retreat_sink_projection(), opts), NoOrbitFound);
}

TEST_CASE("contraction estimates") {
    for (double eps : {0.003, 0.03}) {
        CAPTURE(eps);
        const ModelParameters p = with_epsilon(eps);
        const SectionMaps maps(p, {});
        const OrbitResult r = maps.find_periodic_orbit(maps.retreat_sink_projection());
        const SectionPoint y = r.partner_point;
        const Rectangle region{y.w, y.w + 0.1, y.eta - 0.1, y.eta};
        const ContractionEstimate e = maps.estimate_contraction(region, WhichMap::Plus, 200);
        CHECK(e.pairs_used + e.pairs_excluded == 200);
        CHECK(e.pairs_used >= 150);
        CHECK(e.factor < 1.0);
        CHECK(e.exclusions.size() == static_cast<std::size_t>(e.pairs_excluded));

        // Embedded and planar norms differ by at most the factor k = sqrt(1 + (1 + a/b)^2).
        const double k = std::sqrt(1.0 + (1.0 + p.a_over_b()) * (1.0 + p.a_over_b()));
        CHECK(e.factor <= k * e.planar_factor * (1.0 + 1e-12));
        CHECK(e.planar_factor <= k * e.factor * (1.0 + 1e-12));

        // Same seed, same answer.
        const ContractionEstimate again = maps.estimate_contraction(region, WhichMap::Plus, 200);
        CHECK(again.factor == e.factor);
    }
    const SectionMaps maps(with_epsilon(0.03), {});
    CHECK_THROWS_AS(maps.estimate_contraction({1.0, 1.0, 0.8, 0.8}, WhichMap::Plus, 10), std::invalid_argument);
    CHECK_THROWS_AS(maps.estimate_contraction({1.0, 1.1, 0.8, 0.9}, WhichMap::Plus, 0), std::invalid_argument);
    // A region with no admissible point reports MapUndefined.
    CHECK_THROWS_AS(maps.estimate_contraction({-200.0, -199.0, 0.1, 0.2}, WhichMap::Minus, 10), MapUndefined);
}
