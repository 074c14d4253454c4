#include <random>

#include "doctest.h"
#include "driftflux/lie_algebra.hpp"

using namespace dfx;

namespace {

Rational rnd_rat(std::mt19937_64& rng, bool nonzero = false) {
    for (;;) {
        const long long n = static_cast<long long>(rng() % 13) - 6;
        if (nonzero && n == 0) continue;
        return Rational(n, 1 + static_cast<long long>(rng() % 3));
    }
}

GVector rnd_gvec(std::mt19937_64& rng, int maxdeg = 3) {
    GVector v;
    for (int i = 0; i < 5; ++i) v.c[static_cast<size_t>(i)] = rnd_rat(rng);
    std::vector<Rational> coeffs(1 + rng() % static_cast<uint64_t>(maxdeg + 1));
    for (auto& c : coeffs) c = rnd_rat(rng);
    v.omega = Poly(std::move(coeffs));
    return v;
}

const Poly kOne(Rational(1));
const Poly kW = Poly::variable();

}  // namespace

TEST_CASE("commutator matches the stated relations") {
    CHECK(commutator(gvec_Pt(), gvec_D()) == gvec_Pt());
    CHECK(commutator(gvec_Px(), gvec_D()) == gvec_Px());
    CHECK(commutator(gvec_Pt(), gvec_G()) == gvec_Px());
    CHECK(commutator(gvec_D(), gvec_G()).is_zero());
    CHECK(commutator(gvec_Pv(), gvec_D()).is_zero());
    // [W(1), W(w)] = W(1*1 - w*0) = W(1)
    CHECK(commutator(gvec_W(kOne), gvec_W(kW)) == gvec_W(kOne));
    // W part commutes with the finite part
    CHECK(commutator(gvec_W(kW * kW), gvec_D()).is_zero());

    std::mt19937_64 rng(31);
    for (int i = 0; i < 200; ++i) {
        const GVector X = rnd_gvec(rng), Y = rnd_gvec(rng);
        CHECK(commutator(X, X).is_zero());
        CHECK((commutator(X, Y) + commutator(Y, X)).is_zero());
    }
}

TEST_CASE("jacobi identity holds exactly on random triples") {
    std::mt19937_64 rng(32);
    for (int i = 0; i < 1000; ++i) {
        const GVector X = rnd_gvec(rng), Y = rnd_gvec(rng), Z = rnd_gvec(rng);
        const GVector s = commutator(X, commutator(Y, Z)) + commutator(Y, commutator(Z, X)) +
                          commutator(Z, commutator(X, Y));
        CHECK(s.is_zero());
    }
}

TEST_CASE("derived series of g, r and an abelian subspace") {
    const auto sg = derived_series(alg_g());
    REQUIRE(sg.size() == 3);
    CHECK(sg[1] == Subspace({gvec_Pt(), gvec_Px()}, Subspace::WPart::Full));
    CHECK(sg[2] == w_ideal());
    // stabilization: [g'', g''] = g''
    CHECK(bracket_space(sg[2], sg[2]) == sg[2]);

    const auto sr = derived_series(radical_r());
    REQUIRE(sr.size() == 3);
    CHECK(sr[1] == Subspace({gvec_Pt(), gvec_Px()}));
    CHECK(sr[2].is_zero());

    const auto sa = derived_series(Subspace({gvec_Pt(), gvec_Px()}));
    REQUIRE(sa.size() == 2);
    CHECK(sa[1].is_zero());

    // <D, G + Pt> is not closed: [D, G + Pt] = -Pt leaves the span
    CHECK_THROWS_AS(derived_series(Subspace({gvec_D(), gvec_G() + gvec_Pt()})), not_a_subalgebra);
}

TEST_CASE("centers") {
    CHECK(center(alg_g()) == Subspace({gvec_Pv()}));
    // kernel of ad on the radical: [Px, D] = Px rules Px out
    CHECK(center(radical_r()) == Subspace({gvec_Pv()}));
    // on the nilradical both Px and Pv are central
    CHECK(center(nilradical_n()) == Subspace({gvec_Px(), gvec_Pv()}));
    const Subspace ab({gvec_Pt(), gvec_Px()});
    CHECK(center(ab) == ab);
}

TEST_CASE("radical and nilradical verification") {
    CHECK(radical_check(radical_r()));
    CHECK(nilradical_check(nilradical_n()));
    CHECK_FALSE(nilradical_check(Subspace({gvec_D()})));  // not an ideal
    CHECK_FALSE(radical_check(nilradical_n()));           // not maximal
    CHECK_FALSE(nilradical_check(radical_r()));           // not nilpotent
    CHECK_FALSE(radical_check(alg_g()));                  // not solvable
    CHECK(is_solvable(radical_r()));
    CHECK(is_nilpotent(nilradical_n()));
    CHECK_FALSE(is_nilpotent(radical_r()));
    CHECK_FALSE(is_solvable(alg_g()));
}

TEST_CASE("megaideal closure reproduces m1 and the center") {
    const Subspace m1 = megaideal_closure(radical_r(), radical_r(), Subspace({gvec_Px()}));
    CHECK(m1 == Subspace({gvec_G(), gvec_Px(), gvec_Pv()}));

    CHECK(megaideal_closure(alg_g(), alg_g(), alg_g()) == alg_g());

    // i0 = finite part, i1 = g, i2 = 0 unwinds to the centralizer
    const Subspace z = megaideal_closure(radical_r(), alg_g(), Subspace());
    CHECK(z == Subspace({gvec_Pv()}));
}

TEST_CASE("automorphism matrices") {
    CHECK(aut_preserves_brackets(AutMatrix::identity()));
    CHECK_THROWS_AS(AutMatrix::from_params(Rational(0), Rational(1), Rational(1), Rational(),
                                           Rational(), Rational(), Rational(), Rational(1)),
                    std::invalid_argument);

    std::mt19937_64 rng(33);
    auto random_aut = [&]() {
        return AutMatrix::from_params(rnd_rat(rng, true), rnd_rat(rng), rnd_rat(rng, true),
                                      rnd_rat(rng), rnd_rat(rng), rnd_rat(rng), rnd_rat(rng),
                                      rnd_rat(rng, true));
    };
    for (int i = 0; i < 100; ++i) {
        const AutMatrix m = random_aut();
        CHECK(aut_preserves_brackets(m));
        // product and inverse stay in the parametric family
        const AutMatrix p = aut_product(m, random_aut());
        CHECK(aut_preserves_brackets(p));
        const AutMatrix inv = aut_inverse(m);
        const AutMatrix id = aut_product(m, inv);
        for (int r = 0; r < 5; ++r)
            for (int c = 0; c < 5; ++c) CHECK(id.at(r, c) == (r == c ? Rational(1) : Rational()));
    }
}

TEST_CASE("megaideals are invariant under 100 random automorphisms") {
    std::mt19937_64 rng(34);
    std::vector<AutMatrix> mats;
    for (int i = 0; i < 100; ++i)
        mats.push_back(AutMatrix::from_params(rnd_rat(rng, true), rnd_rat(rng), rnd_rat(rng, true),
                                              rnd_rat(rng), rnd_rat(rng), rnd_rat(rng),
                                              rnd_rat(rng), rnd_rat(rng, true)));
    for (const auto& entry : megaideal_list()) {
        for (const auto& m : mats) CHECK(aut_invariant(m, entry.space));
    }
    // a non-megaideal fails: <D> moves under inner automorphisms
    const AutMatrix shear = AutMatrix::from_params(Rational(1), Rational(1), Rational(1),
                                                   Rational(), Rational(), Rational(), Rational(),
                                                   Rational(1));
    CHECK_FALSE(aut_invariant(shear, Subspace({gvec_D()})));
}

TEST_CASE("adjoint pushforwards follow the listed actions") {
    // Pt-shift(T0): D -> D - T0 Pt
    const GVector d1 = adjoint_push(GroupElement::pt_shift(Rational(3)), gvec_D());
    CHECK(d1 == gvec_D() - Rational(3) * gvec_Pt());
    // Pt-shift(T0): G -> G - T0 Px
    CHECK(adjoint_push(GroupElement::pt_shift(Rational(2)), gvec_G()) ==
          gvec_G() - Rational(2) * gvec_Px());
    // dilation leaves Pv alone
    CHECK(adjoint_push(GroupElement::dilation(Rational(5)), gvec_Pv()) == gvec_Pv());
    // Galilean(U0): Pt -> Pt + U0 Px
    CHECK(adjoint_push(GroupElement::galilean(Rational(1)), gvec_Pt()) ==
          gvec_Pt() + gvec_Px());
    // affine W transport: w -> 2w shifts omega = w to (1/2) * 2w... exactly w
    const GVector ww = adjoint_push(GroupElement::w_affine(Rational(2), Rational()), gvec_W(kW));
    CHECK(ww == gvec_W(kW));  // w d/dw is scale invariant
    // omega = 1 transported by w -> 2w becomes 2
    const GVector w1 = adjoint_push(GroupElement::w_affine(Rational(2), Rational()), gvec_W(kOne));
    CHECK(w1 == gvec_W(Poly(Rational(2))));
    // general monotone transport of a nonzero omega is unsupported
    GroupElement gen;
    gen.tag = GroupElement::Tag::WGeneral;
    gen.label = "tanh";
    CHECK_THROWS_AS(adjoint_push(gen, gvec_W(kW)), unsupported_transport);
    CHECK(adjoint_push(gen, gvec_D()) == gvec_D());
}

TEST_CASE("canonicalization: stated examples") {
    {
        // D + 3Pt + 2Px -> family 1 with a = b = 0, witness shifts (3, 2)
        const Canonical1D c = canonicalize_1d(parse_gvector("D+3Pt+2Px"));
        CHECK(c.family == 1);
        CHECK(c.a == Rational(0));
        CHECK(c.b == Rational(0));
        CHECK(c.delta1 == 0);
        REQUIRE(c.witness.size() == 2);
        CHECK(c.witness[0].tag == GroupElement::Tag::PtShift);
        CHECK(c.witness[0].a == Rational(3));
        CHECK(c.witness[1].tag == GroupElement::Tag::PxShift);
        CHECK(c.witness[1].a == Rational(2));
        CHECK(c.canonical == gvec_D());
    }
    {
        const Canonical1D c = canonicalize_1d(gvec_Pv());
        CHECK(c.family == 5);
        CHECK(c.delta1 == 0);
        CHECK(c.witness.empty());
        CHECK(c.canonical == gvec_Pv());
    }
    {
        // G + 2Pt + Px -> family 2 with delta2 = 1, b = 0; dilation(1/2) in the witness
        const Canonical1D c = canonicalize_1d(parse_gvector("G+2Pt+Px"));
        CHECK(c.family == 2);
        CHECK(c.delta2 == 1);
        CHECK(c.b == Rational(0));
        bool has_dilation_half = false;
        for (const auto& w : c.witness)
            if (w.tag == GroupElement::Tag::Dilation && w.a == Rational(1, 2))
                has_dilation_half = true;
        CHECK(has_dilation_half);
        CHECK(c.canonical == gvec_G() + gvec_Pt());
    }
    {
        // pure W goes to family 6
        const Canonical1D c = canonicalize_1d(gvec_W(kW * kW));
        CHECK(c.family == 6);
        CHECK(c.canonical == gvec_W(kOne));
    }
    CHECK_THROWS_AS(canonicalize_1d(GVector{}), std::invalid_argument);
}

TEST_CASE("canonicalization replay is exact for 200 random vectors") {
    std::mt19937_64 rng(35);
    int done = 0;
    while (done < 200) {
        const GVector x = rnd_gvec(rng);
        if (x.is_zero()) continue;
        ++done;
        const Canonical1D c = canonicalize_1d(x);
        CHECK(c.family >= 1);
        CHECK(c.family <= 6);
        GVector replay = x;
        for (const auto& w : c.witness) replay = adjoint_push(w, replay);
        CHECK(replay == c.scale * c.canonical);
        CHECK_FALSE(c.scale.is_zero());
        // canonical form has the expected shape per family
        switch (c.family) {
            case 1: CHECK(c.canonical.c[B_D] == Rational(1)); break;
            case 2:
                CHECK(c.canonical.c[B_D] == Rational(0));
                CHECK(c.canonical.c[B_G] == Rational(1));
                CHECK(c.canonical.c[B_PX] == Rational(0));
                break;
            case 3:
                CHECK(c.canonical.c[B_PT] == Rational(1));
                CHECK(c.canonical.c[B_PX] == Rational(0));
                break;
            case 4: CHECK(c.canonical.c[B_PX] == Rational(1)); break;
            case 5: CHECK(c.canonical.c[B_PV] == Rational(1)); break;
            case 6: CHECK(c.canonical == gvec_W(kOne)); break;
        }
        if (c.delta1 == 1) CHECK(c.canonical.omega == kOne);
        else CHECK(c.canonical.omega.is_zero());
    }
}

TEST_CASE("two-dimensional subalgebra families close under the bracket") {
    const auto checks = verify_2d_list(99);
    REQUIRE(checks.size() == 17);
    for (const auto& chk : checks) {
        INFO(chk.description);
        CHECK(chk.closed);
    }
    // family <D+aPv+W(w), Pt+W(1)>: bracket is -Q2
    CHECK(checks[2].closed);
    CHECK(checks[2].c1 == Rational(0));
    CHECK(checks[2].c2 == Rational(-1));
    // abelian pair <Pt+..., Px+...>
    CHECK(checks[8].c1 == Rational(0));
    CHECK(checks[8].c2 == Rational(0));

    // direct instances from the optimal list
    const GVector q1 = gvec_D() + gvec_Pv() + gvec_W(kW);
    const GVector q2 = gvec_Pt() + gvec_W(kOne);
    const GVector br = commutator(q1, q2);
    CHECK(br == Rational(-1) * q2);

    // <G + Pt, Px> closes since [Pt, G] = Px
    const GVector p1 = gvec_G() + gvec_Pt();
    CHECK(commutator(p1, gvec_Px()).is_zero());
    CHECK(commutator(gvec_Pt(), gvec_G()) == gvec_Px());
}

TEST_CASE("gvector parsing") {
    CHECK(parse_gvector("D") == gvec_D());
    CHECK(parse_gvector("3Pt") == Rational(3) * gvec_Pt());
    CHECK(parse_gvector("1/2Px - Pv") ==
          Rational(1, 2) * gvec_Px() + Rational(-1) * gvec_Pv());
    CHECK(parse_gvector("D+3Pt+2Px") == gvec_D() + Rational(3) * gvec_Pt() + Rational(2) * gvec_Px());
    CHECK(parse_gvector("W(w^2-2w+1)") == gvec_W(kW * kW - Rational(2) * kW + kOne));
    CHECK(parse_gvector("2W(w)") == gvec_W(Rational(2) * kW));
    CHECK(parse_gvector("G - W(1)") == gvec_G() - gvec_W(kOne));
    CHECK_THROWS_AS(parse_gvector(""), std::invalid_argument);
    CHECK_THROWS_AS(parse_gvector("Q"), std::invalid_argument);
    CHECK_THROWS_AS(parse_gvector("W("), std::invalid_argument);
}

TEST_CASE("printer and parser round-trip") {
    std::mt19937_64 rng(36);
    for (int i = 0; i < 300; ++i) {
        const GVector v = rnd_gvec(rng);
        if (v.is_zero()) continue;
        CAPTURE(v.str());
        CHECK(parse_gvector(v.str()) == v);
    }
    CHECK(GVector{}.str() == "0");
    CHECK((Rational(-1) * gvec_D() + Rational(1, 2) * gvec_Pv()).str() == "-D + 1/2*Pv");
}
