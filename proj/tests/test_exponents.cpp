#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "modbox/exponents.hpp"
#include "modbox/random.hpp"

using namespace modbox;

TEST_CASE("exponent parsing") {
    CHECK(parse_exponent("5/2").v == Rat(5, 2));
    CHECK(parse_exponent("2.5").v == Rat(5, 2));
    CHECK(parse_exponent("3").v == Rat(3));
    CHECK(parse_exponent("-0.25").v == Rat(-1, 4));
    CHECK(parse_exponent("inf").is_inf);
    CHECK_THROWS_AS(parse_exponent("x/y"), InvalidExponent);
    CHECK(rational_from_double(1.0 / 3.0) == Rat(1, 3));
    CHECK(rational_from_double(0.125) == Rat(1, 8));
}

TEST_CASE("Klein-Gordon admissibility: reference points") {
    // d=5, p=5/2, r=3: 1/beta = 1/3 <= min(5/7, 1/2); feasible.
    auto w = kg_admissible(5, Rat(5, 2), XReal::of(3), ThirdConditionMode::reciprocal);
    REQUIRE(w.has_value());
    CHECK(w->inv_beta == Rat(1, 3));
    CHECK(w->case_tag == CaseTag::II);  // strict inequality against the cap
    CHECK(w->r_at_least_3);
    CHECK(w->r_finite);
    CHECK(w->rd_halfgap_gt_1);
    // theta window is (2/3, 1]; the midpoint is exact.
    CHECK(w->theta == Rat(5, 6));

    // d=3, p=5/2: cap = min(3/5, 3/10) = 3/10 < 1/3, window empty for all r.
    for (long rn = 2; rn <= 40; ++rn)
        CHECK(!kg_admissible(3, Rat(5, 2), XReal::of(Rat(rn, 2)),
                             ThirdConditionMode::reciprocal));

    // r = 2 forces 1/beta = 0 < 1/3.
    CHECK(!kg_admissible(5, Rat(5, 2), XReal::of(2), ThirdConditionMode::reciprocal));
    CHECK(!kg_admissible(9, Rat(11, 4), XReal::of(2), ThirdConditionMode::reciprocal));

    // Equality case: cap hit exactly -> case I with theta in (0, 1].
    // d=5, p=5/2: cap = 1/2; r = 4 gives 1/beta = 1/2.
    auto w1 = kg_admissible(5, Rat(5, 2), XReal::of(4), ThirdConditionMode::reciprocal);
    REQUIRE(w1.has_value());
    CHECK(w1->case_tag == CaseTag::I);
    CHECK(w1->theta == Rat(1));

    CHECK_THROWS_AS(kg_admissible(5, Rat(2), XReal::of(3), ThirdConditionMode::reciprocal),
                    InvalidExponent);
}

TEST_CASE("third condition modes") {
    // As written, 1/4 <= p < 1/2 - 1/(3d) is empty for p > 2.
    CHECK(!kg_admissible(5, Rat(5, 2), XReal::of(3), ThirdConditionMode::as_written));
    CHECK(kg_admissible(5, Rat(5, 2), XReal::of(3), ThirdConditionMode::off));
    // Reciprocal mode needs 1/p >= 1/4, so p <= 4.
    CHECK(!kg_admissible(64, Rat(5), XReal::of(3), ThirdConditionMode::reciprocal));
    CHECK(kg_admissible(64, Rat(5), XReal::of(3), ThirdConditionMode::off));
}

TEST_CASE("Schrodinger admissibility: reference points") {
    auto w = schrodinger_admissible(5, Rat(5, 2), XReal::of(3),
                                    ThirdConditionMode::reciprocal);
    REQUIRE(w.has_value());
    CHECK(w->inv_beta == Rat(1, 3));
    CHECK(w->case_tag == CaseTag::I);

    // The excluded endpoint (2d/(d-2), inf) at d = 3 is p = 6 (third condition off,
    // since 1/6 < 1/4).
    CHECK(!schrodinger_admissible(3, Rat(6), XReal::infinity(), ThirdConditionMode::off));
    // Nearby pairs with r = inf and d(1/2 - 1/p) > 1 are case II.
    auto w2 = schrodinger_admissible(5, Rat(4), XReal::infinity(),
                                     ThirdConditionMode::reciprocal);
    REQUIRE(w2.has_value());
    CHECK(w2->case_tag == CaseTag::II);

    // Case III: 1/beta = d(1/2 - 1/p) < 1 with r > 3.
    // d=2, p=10/3: halfgap = 2(1/2 - 3/10) = 2/5; r solves 2/r = 3/5 -> r = 10/3.
    auto w3 = schrodinger_admissible(2, Rat(10, 3), XReal::of(Rat(10, 3)),
                                     ThirdConditionMode::reciprocal);
    REQUIRE(w3.has_value());
    CHECK(w3->case_tag == CaseTag::III);
    CHECK(!w3->proof_caveat);
}

TEST_CASE("random admissible witnesses satisfy the stated consequences") {
    Rng rng(99);
    int found = 0, tried = 0;
    while (found < 10000 && tried < 400000) {
        ++tried;
        int d = 1 + int(rng.raw() % 8);
        Rat p(long(21 + rng.raw() % 60), 10);  // p in (2.1, 8.0]
        Rat r(long(20 + rng.raw() % 100), 10);
        auto w = kg_admissible(d, p, XReal::of(r), ThirdConditionMode::off);
        if (!w) continue;
        ++found;
        // Re-substitute the system exactly.
        Rat ib = Rat(1) - Rat(2) / r;
        CHECK(ib == w->inv_beta);
        Rat cap = std::min(Rat(d, d + 2), Rat(d) * (Rat(1, 2) - Rat(1) / p));
        CHECK(Rat(1, 3) <= ib);
        CHECK(ib <= cap);
        // Stated consequences; the strict time-integrability inequality fails
        // exactly on the corner r = 3, 1/beta = d(1/2 - 1/p) = 1/3, which the
        // witness flags as a proof caveat.
        CHECK(w->r_at_least_3);
        CHECK(w->r_finite);
        CHECK((w->rd_halfgap_gt_1 || w->proof_caveat));
        CHECK(r >= Rat(3));
        if (!w->proof_caveat)
            CHECK(r * Rat(d) * (Rat(1, 2) - Rat(1) / p) > Rat(1));
        // The returned theta respects its window.
        CHECK(w->theta * Rat(d) * (Rat(1, 2) - Rat(1) / p) >= ib);
        CHECK(w->theta <= Rat(1));
    }
    CHECK(found == 10000);
}

TEST_CASE("gamma from p") {
    auto g = gamma_from_p(5, Rat(5, 2));
    CHECK(g.gamma == Rat(9, 2));
    CHECK(g.gamma_over_d_gt_half);

    auto g2 = gamma_from_p(4, Rat(2), /*range_check=*/false);
    CHECK(g2.gamma == Rat(3));

    // The defining relation holds exactly after substitution.
    for (long num = 21; num < 30; ++num) {
        Rat p(num, 10);
        for (int d : {1, 2, 3, 5}) {
            Rat gamma = gamma_from_p(d, p).gamma;
            Rat pc = p / (p - Rat(1));
            CHECK(Rat(1) / p + gamma / Rat(d) - Rat(1) == Rat(1) / (Rat(2) * pc));
        }
    }

    CHECK_THROWS_AS(gamma_from_p(3, Rat(7, 2)), InvalidExponent);
    CHECK_THROWS_AS(gamma_from_p(3, Rat(3), /*range_check=*/false), InfeasibleGamma);
}

TEST_CASE("sigma exponent") {
    CHECK(sigma_exponent(4, XReal::of(2)) == Rat(0));
    CHECK(sigma_exponent(5, XReal::of(Rat(5, 2))) == Rat(7, 10));
    Rat prev(-1);
    for (long num = 20; num <= 60; num += 4) {
        Rat v = sigma_exponent(3, XReal::of(Rat(num, 10)));
        CHECK(v >= prev);
        prev = v;
    }
    CHECK_THROWS_AS(sigma_exponent(3, XReal::of(Rat(3, 2))), InvalidExponent);
}

TEST_CASE("embedding check cases") {
    // tau(2,2) = 0; case (i) needs s1 >= s2.
    EmbeddingResult r =
        embedding_check(3, {XReal::of(2), XReal::of(2), Rat(1, 2), Rat(1, 2)});
    CHECK(r.tau == Rat(0));
    CHECK(r.case_id == 1);
    CHECK(r.holds);

    // p = 2 > q = 1, d = 3: tau = 3/2; strict inequality required.
    EmbeddingResult eq =
        embedding_check(3, {XReal::of(2), XReal::of(1), Rat(3, 2), Rat(0)});
    CHECK(eq.tau == Rat(3, 2));
    CHECK(eq.case_id == 2);
    CHECK(!eq.holds);
    EmbeddingResult gt =
        embedding_check(3, {XReal::of(2), XReal::of(1), Rat(8, 5), Rat(0)});
    CHECK(gt.holds);

    // L^2_s into M^{2,1}_{-d/2} holds for every s > 0.
    for (int d : {1, 2, 3}) {
        EmbeddingResult h = embedding_check(
            d, {XReal::of(2), XReal::of(1), Rat(1, 100), Rat(-d, 2)});
        CHECK(h.holds);
        EmbeddingResult b =
            embedding_check(d, {XReal::of(2), XReal::of(1), Rat(0), Rat(-d, 2)});
        CHECK(!b.holds);
    }

    // p = 1 rows: (iii) allows equality at q = inf, (iv) does not.
    EmbeddingResult c3 =
        embedding_check(2, {XReal::of(1), XReal::infinity(), Rat(0), Rat(0)});
    CHECK(c3.case_id == 3);
    CHECK(c3.tau == Rat(0));
    CHECK(c3.holds);
    EmbeddingResult c4 = embedding_check(2, {XReal::of(1), XReal::of(1), Rat(2), Rat(0)});
    CHECK(c4.case_id == 4);
    CHECK(c4.tau == Rat(2));
    CHECK(!c4.holds);
    EmbeddingResult c4b =
        embedding_check(2, {XReal::of(1), XReal::of(1), Rat(21, 10), Rat(0)});
    CHECK(c4b.holds);
}

TEST_CASE("embedding golden table from an independent rational oracle") {
    // Independent tau and verdict evaluation, written against the statement
    // rather than the implementation.
    auto tau_oracle = [](int d, const XReal& p, const XReal& q) {
        Rat ip = p.recip(), iq = q.recip();
        Rat a = Rat(0), b = Rat(d) * (iq - ip), c = Rat(d) * (iq + ip - Rat(1));
        Rat t = a;
        if (b > t) t = b;
        if (c > t) t = c;
        return t;
    };
    auto holds_oracle = [&](int d, const XReal& p, const XReal& q, Rat s1, Rat s2) {
        Rat t = tau_oracle(d, p, q);
        bool p1 = !p.is_inf && p.v == Rat(1);
        if (p1 && q.is_inf) return s1 >= s2 + t;
        if (p1) return s1 > s2 + t;
        if (q.recip() <= p.recip()) return s1 >= s2 + t;
        return s1 > s2 + t;
    };

    Rng rng(123);
    std::vector<XReal> pool = {XReal::of(1),       XReal::of(Rat(4, 3)), XReal::of(2),
                               XReal::of(Rat(5, 2)), XReal::of(4),       XReal::infinity()};
    int checked = 0;
    while (checked < 50) {
        int d = 1 + int(rng.raw() % 3);
        XReal p = pool[rng.raw() % pool.size()];
        XReal q = pool[rng.raw() % pool.size()];
        Rat s1(long(rng.raw() % 41) - 20, 10);
        Rat s2(long(rng.raw() % 41) - 20, 10);
        EmbeddingResult got = embedding_check(d, {p, q, s1, s2});
        CHECK(got.tau == tau_oracle(d, p, q));
        CHECK(got.holds == holds_oracle(d, p, q, s1, s2));
        ++checked;
    }
}
