#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tractscope/be.hpp"

using namespace tractscope;

TEST_CASE("tree segment geometry anchors") {
    TreeSegment b{TreeSegment::Kind::B, 1, 0, 0.125};
    CHECK(b.r_n() == doctest::Approx(4.5));
    CHECK(b.rp_n() == doctest::Approx(6.0));
    CHECK(b.r_next() == doctest::Approx(9.0));
    CHECK(b.base_angle() == doctest::Approx(M_PI / 2.0));

    TreeSegment b11{TreeSegment::Kind::B, 1, 1, 0.125};
    CHECK(b11.base_angle() == doctest::Approx(3.0 * M_PI / 2.0));

    auto pts = tree_points(b, 5);
    REQUIRE(pts.size() == 5);
    // radial segment at fixed angle pi/2
    CHECK(std::abs(pts.front()) == doctest::Approx(4.5));
    CHECK(std::abs(pts.back()) == doctest::Approx(6.0));
    for (const Complex& z : pts)
        CHECK(std::arg(z) == doctest::Approx(M_PI / 2.0));

    // C+ swings from the parent angle to the j' = 2j child angle
    TreeSegment cp{TreeSegment::Kind::CPlus, 1, 0, 0.125};
    auto cpts = tree_points(cp, 3);
    REQUIRE(cpts.size() == 3);
    CHECK(std::abs(cpts.front()) == doctest::Approx(6.0));
    CHECK(std::arg(cpts.front()) == doctest::Approx(M_PI / 2.0));
    CHECK(std::abs(cpts.back()) == doctest::Approx(9.0));
    CHECK(std::arg(cpts.back()) == doctest::Approx(M_PI / 2.0 + M_PI / 4.0));
    // child angle matches base_angle of (n=2, j=1): pi/4 * 3 = 3pi/4
    TreeSegment child{TreeSegment::Kind::B, 2, 1, 0.125};
    CHECK(std::arg(cpts.back()) == doctest::Approx(child.base_angle()));

    TreeSegment cm{TreeSegment::Kind::CMinus, 1, 0, 0.125};
    auto mpts = tree_points(cm, 3);
    CHECK(std::arg(mpts.back()) == doctest::Approx(M_PI / 4.0));
    CHECK(std::arg(mpts.back()) ==
          doctest::Approx((TreeSegment{TreeSegment::Kind::B, 2, 0, 0.125}).base_angle()));
}

TEST_CASE("series value oracles and symmetry") {
    CHECK(eval_g(Complex(2, 0)).real() == doctest::Approx(1.0625152587891).epsilon(1e-12));
    for (Complex z : {Complex(3.0, 1.0), Complex(-7.0, 2.0), Complex(0.5, -9.0)}) {
        Complex a = eval_g(z), b = eval_g(-z);
        CHECK(std::abs(a - b) < 1e-12 * (1.0 + std::abs(a)));
    }
}

TEST_CASE("tree bound margins: frozen values") {
    // n = 1: the stated bound Re g < -4 is NOT met on B; the measured
    // maximum is about -3.45067. Frozen here so any drift is caught.
    TreeBoundResult r1 = verify_tree_bound(TreeSegment{TreeSegment::Kind::B, 1, 0, 0.125}, 64);
    CHECK_FALSE(r1.ok);
    CHECK(r1.bound == doctest::Approx(-4.0));
    CHECK(r1.max_re_g == doctest::Approx(-3.450670762).epsilon(1e-6));
    CHECK(r1.margin == doctest::Approx(-0.549329238).epsilon(1e-5));

    // n = 2 and n = 3 hold with room to spare, for every branch and kind
    for (int n : {2, 3}) {
        for (int j = 0; j < (1 << (n - 1)); ++j) {
            for (auto kind : {TreeSegment::Kind::B, TreeSegment::Kind::CPlus,
                              TreeSegment::Kind::CMinus}) {
                TreeBoundResult r = verify_tree_bound(TreeSegment{kind, n, j, 0.125}, 64);
                INFO("n=", n, " j=", j);
                CHECK(r.ok);
                CHECK(r.margin > 1.0);
            }
        }
    }
    // anchor the n = 2 radial margin
    TreeBoundResult r2 = verify_tree_bound(TreeSegment{TreeSegment::Kind::B, 2, 0, 0.125}, 64);
    CHECK(r2.bound == doctest::Approx(-16.0));
    CHECK(r2.margin == doctest::Approx(7.0630299).epsilon(1e-5));
}

TEST_CASE("negative control: Re g is large and positive on the real axis") {
    for (double r : {4.5, 6.0, 9.0, 20.0}) {
        TreeSegment b{TreeSegment::Kind::B, 1, 0, 0.125};
        (void)b;
        CHECK(eval_g(Complex(r, 0)).real() > 1.0);
        CHECK(eval_g(Complex(r, 0)).real() > -std::pow(2.0, 2.0));
    }
}

TEST_CASE("winding of g on dominance circles") {
    WindingResult w5 = winding_of_g(5.0, 512);
    CHECK(w5.dominant);
    CHECK(w5.index_n == 1);
    CHECK(w5.winding == 2);
    CHECK(w5.arg_monotone);

    WindingResult w10 = winding_of_g(10.0, 512);
    CHECK(w10.dominant);
    CHECK(w10.index_n == 2);
    CHECK(w10.winding == 4);
    CHECK(w10.arg_monotone);

    // near the crossover radius no single term dominates
    WindingResult w8 = winding_of_g(8.0, 512);
    CHECK_FALSE(w8.dominant);
}

TEST_CASE("sign pattern of Re g - log R repeats under rotation by 2 pi / 2^n") {
    // dominance annulus of n = 5 (around r = 1.125 * 2^6 = 72): rotation by
    // 2 pi / 32 fixes the n = 5 term, so the sign of u = Re g - level is
    // preserved wherever |u| exceeds twice the mass of all other terms
    double level = 9e10;
    Complex rot = std::polar(1.0, 2.0 * M_PI / 32.0);
    int tested = 0;
    for (int a = 0; a < 256; ++a) {
        double th = 2.0 * M_PI * a / 256.0;
        for (double r : {70.0, 72.0, 74.0}) {
            double asym = 0.0;
            for (int k = 1; k <= 12; ++k)
                if (k != 5) asym += std::pow(r / std::pow(2.0, k), std::pow(2.0, k));
            asym *= 2.0;
            Complex z = std::polar(r, th);
            double u = eval_g(z).real() - level;
            if (std::abs(u) < asym) continue;  // mixing zone, sign not protected
            double u_rot = eval_g(z * rot).real() - level;
            CHECK(u * u_rot > 0.0);
            ++tested;
        }
    }
    CHECK(tested > 100);
}

TEST_CASE("single-curve tracts in a quarter-plane window") {
    Window w{0.0, 60.0, 0.0, 60.0, 301, 301};
    SingleCurveReport rep = verify_single_curve_tracts(w, std::exp(10.0));
    CHECK(rep.tracts >= 2);
    CHECK(rep.complete_tracts >= 1);
    CHECK(rep.all_complete_m1);
    CHECK(rep.complete_m1 == rep.complete_tracts);
    CHECK(rep.tree_intersections == 0);
    CHECK(rep.critical_count == 0);
    CHECK(rep.max_u > 0.0);
}
