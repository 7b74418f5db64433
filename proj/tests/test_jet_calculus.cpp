#include <doctest.h>

#include <random>

#include "rddym/parser.hpp"
#include "rddym/verifier.hpp"

using namespace rddym;

namespace {

Workspace make_ws() {
    Workspace ws;
    ws.declare("u", FieldKind::Base);
    ws.declare("v", FieldKind::Base);
    ws.declare("w", FieldKind::Base);
    ws.declare("p", FieldKind::Fiber);
    ws.declare("q", FieldKind::Fiber);
    ws.declare("lambda", FieldKind::Parameter);
    ws.declare("kappa", FieldKind::Parameter);
    ws.freeze();
    return ws;
}

Covering cov7(const Workspace& ws) {
    return Covering(ws.require("p"), parse_expression("(u_x - lambda)*p_x", ws),
                    parse_expression("u_y*p_x/lambda", ws), ws, ws.require("lambda"));
}

Expr rnd_base_expr(const Workspace& ws, std::mt19937& rng, int depth) {
    std::vector<std::string> names{"u", "u_x", "u_y", "v", "v_x", "u_ty", "w"};
    auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
    if (depth <= 0) {
        if (pick(4) == 0) return ex::integer(pick(5) - 2);
        return parse_expression(names[pick(static_cast<int>(names.size()))], ws);
    }
    switch (pick(5)) {
        case 0: return ex::add(rnd_base_expr(ws, rng, depth - 1), rnd_base_expr(ws, rng, depth - 1));
        case 1: return ex::mul(rnd_base_expr(ws, rng, depth - 1), rnd_base_expr(ws, rng, depth - 1));
        case 2: return ex::pow(parse_expression(names[pick(3)], ws), 2);
        case 3: return ex::exp_(parse_expression(names[pick(3)], ws));
        default: return rnd_base_expr(ws, rng, depth - 1);
    }
}

}  // namespace

TEST_CASE("total derivative basics") {
    Workspace ws = make_ws();
    CHECK(normalize(total_derivative(parse_expression("u_x", ws), Coord::Y, ws, nullptr), ws) ==
          normalize(parse_expression("u_xy", ws), ws));
    CHECK(normalize(total_derivative(parse_expression("exp(w)", ws), Coord::X, ws, nullptr), ws) ==
          normalize(parse_expression("exp(w)*w_x", ws), ws));
    CHECK(normalize(total_derivative(parse_expression("lambda", ws), Coord::T, ws, nullptr), ws)
              .is_zero());
    CHECK(normalize(total_derivative(parse_expression("x", ws), Coord::X, ws, nullptr), ws).str(ws) ==
          "1");
    CHECK(normalize(total_derivative(parse_expression("x", ws), Coord::T, ws, nullptr), ws).is_zero());
}

TEST_CASE("extended derivative rewrites fiber t/y jets through the covering") {
    Workspace ws = make_ws();
    Covering cov = cov7(ws);
    Expr lhs = total_derivative(parse_expression("u_y*p_x/lambda", ws), Coord::T, ws, &cov);
    Expr want = parse_expression("(u_ty*p_x + u_y*D[(u_x - lambda)*p_x, x])/lambda", ws);
    CHECK(normalize(lhs, ws) == normalize(want, ws));
    CHECK_THROWS_AS(total_derivative(parse_expression("p_x", ws), Coord::T, ws, nullptr),
                    ValidationError);
}

TEST_CASE("fiber jet depth cap") {
    Workspace ws = make_ws();
    Expr p4 = parse_expression("D[p, x, x, x, x]", ws);  // depth 4 is the cap
    CHECK_THROWS_AS(total_derivative(p4, Coord::X, ws, nullptr), FiberDepthError);
}

TEST_CASE("total derivatives commute on base expressions") {
    Workspace ws = make_ws();
    std::mt19937 rng(7);
    for (int i = 0; i < 25; ++i) {
        Expr e = rnd_base_expr(ws, rng, 3);
        Expr ab = total_derivative(total_derivative(e, Coord::T, ws, nullptr), Coord::Y, ws, nullptr);
        Expr ba = total_derivative(total_derivative(e, Coord::Y, ws, nullptr), Coord::T, ws, nullptr);
        CHECK(normalize(ab, ws) == normalize(ba, ws));
    }
}

TEST_CASE("Leibniz property") {
    Workspace ws = make_ws();
    std::mt19937 rng(11);
    for (int i = 0; i < 25; ++i) {
        Expr a = rnd_base_expr(ws, rng, 2), b = rnd_base_expr(ws, rng, 2);
        for (Coord c : kCoords) {
            Expr lhs = total_derivative(ex::mul(a, b), c, ws, nullptr);
            Expr rhs = ex::add(ex::mul(total_derivative(a, c, ws, nullptr), b),
                               ex::mul(a, total_derivative(b, c, ws, nullptr)));
            CHECK(normalize(ex::sub(lhs, rhs), ws).is_zero());
        }
    }
}

TEST_CASE("extended cross derivatives of the fiber differ by the compatibility residual") {
    Workspace ws = make_ws();
    Covering cov = cov7(ws);
    Expr p = parse_expression("p", ws);
    Expr ty = total_derivative(total_derivative(p, Coord::T, ws, &cov), Coord::Y, ws, &cov);
    Expr yt = total_derivative(total_derivative(p, Coord::Y, ws, &cov), Coord::T, ws, &cov);
    NormalForm diff = normalize(ex::sub(ty, yt), ws);
    NormalForm res = normalize(compatibility_residual(cov, ws), ws);
    CHECK(diff == res);
}

TEST_CASE("substitution semantics") {
    Workspace ws = make_ws();
    // identity binding returns the input up to normal form
    Bindings ident;
    ident.bind_jet(parse_jet("u_x", ws), parse_expression("u_x", ws));
    Expr e = parse_expression("u_ty - (u_x + v)*u_xy + u_y*u_xx", ws);
    CHECK(normalize(substitute(e, ident, ws), ws) == normalize(e, ws));

    // whole-field binding rewrites all jets by total derivatives
    Bindings vzero;
    vzero.bind_field(ws.require("v"), ex::zero());
    CHECK(normalize(substitute(e, vzero, ws), ws) ==
          normalize(parse_expression("u_ty - u_x*u_xy + u_y*u_xx", ws), ws));

    Bindings vlin;
    vlin.bind_field(ws.require("v"), parse_expression("u_x", ws));
    CHECK(normalize(substitute(parse_expression("v_ty + v", ws), vlin, ws), ws) ==
          normalize(parse_expression("u_txy + u_x", ws), ws));

    // a jet dominated by two keys is a conflict
    Bindings clash;
    clash.bind_jet(parse_jet("u_x", ws), ex::zero());
    clash.bind_jet(parse_jet("u_y", ws), ex::zero());
    CHECK_THROWS_AS(substitute(parse_expression("u_xy", ws), clash, ws), ValidationError);

    // parameters only bind to differential constants
    Bindings bad;
    bad.bind_field(ws.require("lambda"), parse_expression("u_x", ws));
    CHECK_THROWS_AS(substitute(parse_expression("lambda", ws), bad, ws), ValidationError);
    Bindings ok;
    ok.bind_field(ws.require("lambda"), parse_expression("2*kappa", ws));
    CHECK(normalize(substitute(parse_expression("lambda", ws), ok, ws), ws).str(ws) == "2*kappa");
}

TEST_CASE("reduce_modulo rewrites prolonged leads to a fixpoint") {
    Workspace ws = make_ws();
    OrientedSystem rdDym2(
        {{parse_jet("u_ty", ws), parse_expression("(u_x + v)*u_xy - u_y*u_xx", ws)},
         {parse_jet("v_ty", ws), parse_expression("(u_x + v)*v_xy - u_y*v_xx + v_x*v_y", ws)}},
        ws);
    CHECK(reduce_modulo(parse_expression("u_ty - (u_x + v)*u_xy + u_y*u_xx", ws), rdDym2, ws).is_zero());
    // no leading present: untouched
    NormalForm same = reduce_modulo(parse_expression("u_x", ws), rdDym2, ws);
    CHECK(same == normalize(parse_expression("u_x", ws), ws));
    // reduction is a projection
    Expr mixed = parse_expression("u_tty*u_x + v_txy^2 + u_y", ws);
    NormalForm once = reduce_modulo(mixed, rdDym2, ws);
    NormalForm twice = reduce_modulo(nf_to_expr(once, ws), rdDym2, ws);
    CHECK(once == twice);
    // an x-prolongation of a rule's residual reduces to zero by construction
    OrientedSystem eq14({{parse_jet("u_ty", ws),
                          parse_expression("-u_x*u_xy/kappa - u_y*u_xx", ws)}},
                        ws);
    Expr res14 = parse_expression("u_ty + u_x*u_xy/kappa + u_y*u_xx", ws);
    Expr dres = total_derivative(res14, Coord::X, ws, nullptr);
    CHECK(reduce_modulo(dres, eq14, ws).is_zero());
}

TEST_CASE("mis-oriented systems hit the pass cap") {
    Workspace ws = make_ws();
    OrientedSystem loop({{parse_jet("u_tx", ws), parse_expression("u_ty + 1", ws)},
                         {parse_jet("u_ty", ws), parse_expression("u_tx", ws)}},
                        ws);
    CHECK_THROWS_AS(reduce_modulo(parse_expression("u_tx", ws), loop, ws), ReductionCapError);
}

TEST_CASE("system validation rejects bad orientations") {
    Workspace ws = make_ws();
    CHECK_THROWS_AS(OrientedSystem({{parse_jet("u_ty", ws), parse_expression("u_ty + 1", ws)}}, ws),
                    ValidationError);
    CHECK_THROWS_AS(OrientedSystem({{parse_jet("u_ty", ws), parse_expression("u_txy", ws)}}, ws),
                    ValidationError);
    CHECK_THROWS_AS(OrientedSystem({{parse_jet("u_ty", ws), ex::zero()},
                                    {parse_jet("u_ty", ws), ex::one()}},
                                   ws),
                    ValidationError);
}

TEST_CASE("prolong_system materializes and re-orients") {
    Workspace ws = make_ws();
    OrientedSystem rdDym({{parse_jet("u_ty", ws), parse_expression("u_x*u_xy - u_y*u_xx", ws)}}, ws);
    OrientedSystem p3 = prolong_system(rdDym, 3, ws);
    bool has_txy = false;
    for (const auto& r : p3.rules())
        if (r.lead == parse_jet("u_txy", ws)) has_txy = true;
    CHECK(has_txy);
    CHECK(p3.rules().size() == 4);  // tau in {0, x, y, t}
    // same order: identical rule set
    OrientedSystem p2 = prolong_system(rdDym, 2, ws);
    CHECK(p2.rules().size() == rdDym.rules().size());
    CHECK(p2.rules()[0].lead == rdDym.rules()[0].lead);
    // prolonged leads colliding with another rule is an error
    OrientedSystem bad({{parse_jet("u_ty", ws), ex::zero()}, {parse_jet("u_txy", ws), ex::one()}}, ws);
    CHECK_THROWS_AS(prolong_system(bad, 3, ws), ValidationError);
}

TEST_CASE("order-4 prolongation suffices for the generalized covering residual") {
    Catalog cat = Catalog::load(RDDYM_SOURCE_CATALOG);
    const Workspace& ws = cat.workspace();
    OrientedSystem p4 = prolong_system(cat.system("sys.rdDym2"), 4, ws);
    Expr res = compatibility_residual(cat.covering("cov.gen"), ws);
    CHECK(reduce_modulo(res, p4, ws).is_zero());
}

TEST_CASE("covering validation") {
    Workspace ws = make_ws();
    CHECK_THROWS_AS(Covering(ws.require("u"), ex::zero(), ex::zero(), ws), ValidationError);
    CHECK_THROWS_AS(parse_expression("D[p, t]", ws), ParseError);
    CHECK_THROWS_AS(Covering(ws.require("p"), parse_expression("q_x", ws), ex::zero(), ws),
                    ValidationError);
}

TEST_CASE("fixture serialization round-trips") {
    Catalog cat = Catalog::load(RDDYM_SOURCE_CATALOG);
    const Workspace& ws = cat.workspace();
    for (const auto& id : cat.ids()) {
        std::string text = serialize_entry(cat.get(id), ws);
        RawFixture fx = parse_fixture(text, id);
        CHECK(fx.headers.at("id") == id);
        // reparse every payload expression against the same workspace
        for (const auto& [lhs, rhs] : fx.payload) {
            if (lhs.rfind("map ", 0) == 0 || lhs.rfind("target_map ", 0) == 0 ||
                lhs.rfind("relation ", 0) == 0)
                continue;
            CHECK_NOTHROW(parse_expression(rhs, ws));
        }
    }
}
