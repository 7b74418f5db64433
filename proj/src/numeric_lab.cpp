#include "rddym/numeric_lab.hpp"

#include <algorithm>
#include <cmath>

#include "rddym/verifier.hpp"

namespace rddym {

void GridSpec::validate() const {
    for (int i = 0; i < 3; ++i) {
        if (points[i] < 8) throw ValidationError("grid needs at least 8 points per coordinate");
        if (!(hi[i] > lo[i])) throw ValidationError("degenerate grid interval");
    }
}

// ---------------------------------------------------------------------------
// symbolic certification

namespace {

// Rewrites every derivative jet of a sqrt field through phi_c =
// D_c(inner) / (2 phi), peeling one coordinate at a time (routes agree since
// the jets come from one potential).
Expr rewrite_sqrt_jets(Expr e, const SolutionField& f, const Workspace& ws) {
    Expr phi_inv = ex::pow(ex::jet(Jet{f.field, Multi{}}), -1);
    std::map<Coord, Expr> first;
    for (Coord c : kCoords)
        first.emplace(c, ex::prod({ex::rational(rat(1, 2)),
                                   total_derivative(f.value, c, ws, nullptr), phi_inv}));
    for (int pass = 0; pass < 16; ++pass) {
        std::map<Jet, Expr> repl;
        for (const auto& j : collect_jets(e)) {
            if (j.field != f.field || j.index.is_zero()) continue;
            Coord c = Coord::T;
            for (Coord cand : kCoords)
                if (j.index[cand]) c = cand;
            Multi rest = *j.index.minus(Multi{}.plus(c));
            repl.emplace(j, total_derivative(first.at(c), rest, ws, nullptr));
        }
        if (repl.empty()) return e;
        e = replace_exact_jets(e, repl);
    }
    throw ValidationError("sqrt jet rewriting did not stabilize");
}

// reduce powers phi^k modulo phi^2 = inner (numerator and denominator)
Poly reduce_sqrt_poly(const Poly& p, const Jet& phi, const Poly& inner, const Workspace& ws) {
    Poly out = poly_zero();
    for (const auto& t : p.terms) {
        int k = 0;
        Term rest = t;
        rest.mono.jets.clear();
        for (const auto& f : t.mono.jets) {
            if (f.jet == phi)
                k = f.exp;
            else
                rest.mono.jets.push_back(f);
        }
        Poly piece;
        piece.terms.push_back(rest);
        if (k != 0) {
            piece = poly_mul(piece, poly_pow(inner, k / 2));
            if (k % 2) piece = poly_mul(piece, poly_atom(ws, phi));
        }
        out = poly_add(out, piece);
    }
    return out;
}

}  // namespace

CheckOutcome certify_solution(ExactSolution& sol, const OrientedSystem& sys, const Workspace& ws) {
    try {
        Bindings whole;
        std::vector<const SolutionField*> sqrt_fields;
        for (const auto& f : sol.fields) {
            for (const auto& j : collect_jets(f.value))
                if (ws.kind(j.field) != FieldKind::Coordinate && !f.sqrt_of)
                    return CheckOutcome::error("solution field '" + ws.name(f.field) +
                                               "' must be written in coordinates only");
            if (f.sqrt_of)
                sqrt_fields.push_back(&f);
            else
                whole.bind_field(f.field, f.value);
        }
        for (size_t i = 0; i < sys.rules().size(); ++i) {
            Expr res = substitute(sys.residual(i, ws), whole, ws);
            for (const auto* f : sqrt_fields) res = rewrite_sqrt_jets(res, *f, ws);
            NormalForm nf = normalize(res, ws);
            for (const auto* f : sqrt_fields) {
                Jet phi{f->field, Multi{}};
                NormalForm inner_nf = normalize(f->value, ws);
                if (!inner_nf.den().is_one())
                    return CheckOutcome::error("sqrt inner expression must be polynomial");
                Poly num = reduce_sqrt_poly(nf.num(), phi, inner_nf.num(), ws);
                Poly den = reduce_sqrt_poly(nf.den(), phi, inner_nf.num(), ws);
                nf = NormalForm(std::move(num), std::move(den), ws);
            }
            if (!nf.is_zero()) {
                sol.certified = false;
                return CheckOutcome::fail(nf.str(ws), "equation " + std::to_string(i + 1) +
                                                          " does not vanish on the candidate solution");
            }
        }
        sol.certified = true;
        return CheckOutcome::pass();
    } catch (const Error& e) {
        return CheckOutcome::error(e.what());
    }
}

// ---------------------------------------------------------------------------
// grid residuals

namespace {

struct Grid3 {
    GridSpec spec;
    std::vector<double> data;  // [it][iy][ix]

    Grid3() = default;
    explicit Grid3(const GridSpec& s) : spec(s), data(size_t(s.points[0]) * s.points[1] * s.points[2], 0.0) {}
    double& at(int it, int iy, int ix) {
        return data[(size_t(it) * spec.points[1] + iy) * spec.points[2] + ix];
    }
    double at(int it, int iy, int ix) const {
        return data[(size_t(it) * spec.points[1] + iy) * spec.points[2] + ix];
    }
};

double eval_expr(const Expr& e, const std::function<double(const Jet&)>& atom) {
    const auto& n = e->node();
    if (auto* q = std::get_if<Rational>(&n)) return rat_double(*q);
    if (auto* j = std::get_if<Jet>(&n)) return atom(*j);
    if (auto* s = std::get_if<ExprNode::Sum>(&n)) {
        double acc = 0;
        for (const auto& t : s->terms) acc += eval_expr(t, atom);
        return acc;
    }
    if (auto* p = std::get_if<ExprNode::Prod>(&n)) {
        double acc = 1;
        for (const auto& f : p->factors) acc *= eval_expr(f, atom);
        return acc;
    }
    if (auto* pw = std::get_if<ExprNode::Pow>(&n)) return std::pow(eval_expr(pw->base, atom), pw->exponent);
    return std::exp(eval_expr(std::get<ExprNode::ExpF>(n).arg, atom));
}

// centered difference of g along c
Grid3 diff_grid(const Grid3& g, Coord c) {
    Grid3 out(g.spec);
    double h = g.spec.step(c);
    int nt = g.spec.points[0], ny = g.spec.points[1], nx = g.spec.points[2];
    for (int it = 0; it < nt; ++it)
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < nx; ++ix) {
                int jt = it, jy = iy, jx = ix, kt = it, ky = iy, kx = ix;
                int n = c == Coord::T ? nt : c == Coord::Y ? ny : nx;
                int i = c == Coord::T ? it : c == Coord::Y ? iy : ix;
                if (i == 0 || i == n - 1) continue;  // boundary excluded
                (c == Coord::T ? jt : c == Coord::Y ? jy : jx) += 1;
                (c == Coord::T ? kt : c == Coord::Y ? ky : kx) -= 1;
                out.at(it, iy, ix) = (g.at(jt, jy, jx) - g.at(kt, ky, kx)) / (2 * h);
            }
    return out;
}

// pure second derivative via the standard 3-point stencil
Grid3 diff2_grid(const Grid3& g, Coord c) {
    Grid3 out(g.spec);
    double h = g.spec.step(c);
    int nt = g.spec.points[0], ny = g.spec.points[1], nx = g.spec.points[2];
    for (int it = 0; it < nt; ++it)
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < nx; ++ix) {
                int n = c == Coord::T ? nt : c == Coord::Y ? ny : nx;
                int i = c == Coord::T ? it : c == Coord::Y ? iy : ix;
                if (i == 0 || i == n - 1) continue;
                int jt = it, jy = iy, jx = ix, kt = it, ky = iy, kx = ix;
                (c == Coord::T ? jt : c == Coord::Y ? jy : jx) += 1;
                (c == Coord::T ? kt : c == Coord::Y ? ky : kx) -= 1;
                out.at(it, iy, ix) = (g.at(jt, jy, jx) - 2 * g.at(it, iy, ix) + g.at(kt, ky, kx)) / (h * h);
            }
    return out;
}

struct FieldSampler {
    const Workspace& ws;
    const GridSpec& spec;
    std::map<FieldId, Grid3> base;           // sampled fields
    std::map<Jet, Grid3> jets;               // finite-difference jets
    std::array<int, 3> margin{0, 0, 0};      // excluded boundary layers

    double coord_value(Coord c, int i) const {
        return spec.lo[static_cast<size_t>(c)] + i * spec.step(c);
    }

    void sample(const ExactSolution& sol) {
        for (const auto& f : sol.fields) {
            Grid3 g(spec);
            for (int it = 0; it < spec.points[0]; ++it)
                for (int iy = 0; iy < spec.points[1]; ++iy)
                    for (int ix = 0; ix < spec.points[2]; ++ix) {
                        double t = coord_value(Coord::T, it), y = coord_value(Coord::Y, iy),
                               x = coord_value(Coord::X, ix);
                        double v = eval_expr(f.value, [&](const Jet& j) -> double {
                            if (ws.kind(j.field) == FieldKind::Coordinate) {
                                if (j.field == ws.coordinate(Coord::T)) return t;
                                if (j.field == ws.coordinate(Coord::Y)) return y;
                                return x;
                            }
                            throw ValidationError("solution expression mentions a non-coordinate atom");
                        });
                        g.at(it, iy, ix) = f.sqrt_of ? std::sqrt(v) : v;
                    }
            base.emplace(f.field, std::move(g));
        }
    }

    const Grid3& jet_grid(const Jet& j) {
        auto it = jets.find(j);
        if (it != jets.end()) return it->second;
        auto bit = base.find(j.field);
        if (bit == base.end()) throw ValidationError("equation mentions an unsampled field");
        Grid3 g = bit->second;
        for (Coord c : kCoords) {
            int k = j.index[c];
            // each stencil application contaminates one boundary layer
            margin[static_cast<size_t>(c)] = std::max(margin[static_cast<size_t>(c)], (k + 1) / 2);
            while (k >= 2) {
                g = diff2_grid(g, c);
                k -= 2;
            }
            if (k == 1) g = diff_grid(g, c);
        }
        return jets.emplace(j, std::move(g)).first->second;
    }
};

}  // namespace

std::vector<double> evaluate_residual_grid(const ExactSolution& sol, const OrientedSystem& sys,
                                           const GridSpec& g, const Workspace& ws) {
    g.validate();
    FieldSampler sampler{ws, g, {}, {}, {0, 0, 0}};
    sampler.sample(sol);
    std::vector<double> out;
    for (size_t i = 0; i < sys.rules().size(); ++i) {
        Expr res = sys.residual(i, ws);
        // materialize every jet grid first so the margins are known
        std::vector<Jet> needed;
        for (const auto& j : collect_jets(res))
            if (ws.kind(j.field) != FieldKind::Coordinate) {
                sampler.jet_grid(j);
                needed.push_back(j);
            }
        std::array<int, 3> m = sampler.margin;
        for (auto& mm : m) mm = std::max(mm, 1);
        double worst = 0;
        for (int it = m[0]; it < g.points[0] - m[0]; ++it)
            for (int iy = m[1]; iy < g.points[1] - m[1]; ++iy)
                for (int ix = m[2]; ix < g.points[2] - m[2]; ++ix) {
                    double t = sampler.coord_value(Coord::T, it), y = sampler.coord_value(Coord::Y, iy),
                           x = sampler.coord_value(Coord::X, ix);
                    double v = eval_expr(res, [&](const Jet& j) -> double {
                        if (ws.kind(j.field) == FieldKind::Coordinate) {
                            if (j.field == ws.coordinate(Coord::T)) return t;
                            if (j.field == ws.coordinate(Coord::Y)) return y;
                            return x;
                        }
                        return sampler.jet_grid(j).at(it, iy, ix);
                    });
                    worst = std::max(worst, std::abs(v));
                }
        out.push_back(worst);
    }
    return out;
}

double fit_loglog_slope(const std::vector<std::pair<double, double>>& points) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    size_t n = points.size();
    for (const auto& [x, y] : points) {
        double lx = std::log(x), ly = std::log(std::max(y, 1e-300));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double d = n * sxx - sx * sx;
    if (std::abs(d) < 1e-12) return 0.0;
    return (n * sxy - sx * sy) / d;
}

ConvergenceReport estimate_convergence_order(const ExactSolution& sol, const OrientedSystem& sys,
                                             GridSpec g, int halvings, const Workspace& ws) {
    if (halvings < 2) throw ValidationError("need at least 2 halvings to fit a slope");
    ConvergenceReport rep;
    for (int level = 0; level <= halvings; ++level) {
        auto res = evaluate_residual_grid(sol, sys, g, ws);
        double worst = *std::max_element(res.begin(), res.end());
        rep.rows.push_back({g.max_step(), worst});
        g = g.refined();
    }
    rep.exact = std::all_of(rep.rows.begin(), rep.rows.end(),
                            [](const ConvergenceRow& r) { return r.residual <= 1e-10; });
    if (!rep.exact) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& r : rep.rows) pts.emplace_back(r.h, r.residual);
        rep.slope = fit_loglog_slope(pts);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// commutativity of the covering flows

namespace {

struct Flow1D {
    // dp/dtau = speed(tau, x) * p_x on a fixed x-grid, zero beyond the ends
    std::vector<double> xs;
    double h;

    std::vector<double> px(const std::vector<double>& p) const {
        std::vector<double> d(p.size(), 0.0);
        for (size_t i = 0; i < p.size(); ++i) {
            double right = i + 1 < p.size() ? p[i + 1] : 0.0;
            double left = i >= 1 ? p[i - 1] : 0.0;
            d[i] = (right - left) / (2 * h);
        }
        return d;
    }

    // classical RK4 with CFL-limited internal substeps
    void evolve(std::vector<double>& p, double span,
                const std::function<double(double, double)>& speed, double tau0) const {
        if (span == 0) return;
        double vmax = 1e-12;
        for (double x : xs) vmax = std::max({vmax, std::abs(speed(tau0, x)), std::abs(speed(tau0 + span, x))});
        double dtau = 0.25 * h / vmax;
        int steps = std::max(1, static_cast<int>(std::ceil(std::abs(span) / dtau)));
        double dt = span / steps;
        auto rhs = [&](const std::vector<double>& q, double tau) {
            std::vector<double> d = px(q);
            for (size_t i = 0; i < d.size(); ++i) d[i] *= speed(tau, xs[i]);
            return d;
        };
        double start = std::abs(*std::max_element(p.begin(), p.end(),
                                                  [](double a, double b) { return std::abs(a) < std::abs(b); }));
        for (int s = 0; s < steps; ++s) {
            double tau = tau0 + s * dt;
            auto k1 = rhs(p, tau);
            std::vector<double> tmp(p.size());
            for (size_t i = 0; i < p.size(); ++i) tmp[i] = p[i] + 0.5 * dt * k1[i];
            auto k2 = rhs(tmp, tau + 0.5 * dt);
            for (size_t i = 0; i < p.size(); ++i) tmp[i] = p[i] + 0.5 * dt * k2[i];
            auto k3 = rhs(tmp, tau + 0.5 * dt);
            for (size_t i = 0; i < p.size(); ++i) tmp[i] = p[i] + dt * k3[i];
            auto k4 = rhs(tmp, tau + dt);
            for (size_t i = 0; i < p.size(); ++i)
                p[i] += dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        }
        double end = std::abs(*std::max_element(p.begin(), p.end(),
                                                [](double a, double b) { return std::abs(a) < std::abs(b); }));
        if (start > 0 && end > 10 * start)
            throw ValidationError("flow evolution unstable (growth factor > 10); reduce the step");
    }
};

}  // namespace

CommutativityReport commutativity_test(const Covering& cov, const ExactSolution& base,
                                       const CommutativitySetup& setup, const Workspace& ws) {
    if (setup.lambda == 0) throw ValidationError("the swap parameter must be nonzero");
    // coefficients of the two linear flows: p_t = A p_x, p_y = B p_x
    NormalForm px = normalize(ex::jet(Jet{cov.fiber(), Multi{}.plus(Coord::X)}), ws);
    Expr A = nf_to_expr(nf_div(normalize(cov.equation(Coord::T), ws), px, ws), ws);
    Expr B = nf_to_expr(nf_div(normalize(cov.equation(Coord::Y), ws), px, ws), ws);
    for (const Expr* coeff : {&A, &B})
        for (const auto& j : collect_jets(*coeff))
            if (j.field == cov.fiber())
                throw ValidationError("covering is not linear in the fiber x-derivative");

    Bindings fields;
    for (const auto& f : base.fields) fields.bind_field(f.field, f.value);
    Expr Ab = substitute(A, fields, ws);
    Expr Bb = substitute(B, fields, ws);

    auto coeff_fn = [&, lambda = setup.lambda](const Expr& e) {
        return [&, e, lambda](double t, double y, double x) {
            return eval_expr(e, [&](const Jet& j) -> double {
                if (ws.kind(j.field) == FieldKind::Parameter) return lambda;
                if (j.field == ws.coordinate(Coord::T)) return t;
                if (j.field == ws.coordinate(Coord::Y)) return y;
                if (j.field == ws.coordinate(Coord::X)) return x;
                throw ValidationError("flow coefficient mentions an unbound atom");
            });
        };
    };
    auto a_fn = coeff_fn(Ab);
    auto b_fn = coeff_fn(Bb);

    CommutativityReport rep;
    double h = (setup.x_hi - setup.x_lo) / (setup.points - 1);
    double delta = setup.delta;
    int n = setup.points;
    for (int level = 0; level < setup.levels; ++level) {
        Flow1D flow;
        flow.h = h;
        flow.xs.resize(n);
        for (int i = 0; i < n; ++i) flow.xs[i] = setup.x_lo + i * h;
        std::vector<double> p0(n, 0.0);
        for (int i = 0; i < n; ++i) {
            double x = flow.xs[i];
            if (x > setup.bump_lo && x < setup.bump_hi) {
                double a = (x - setup.bump_lo) * (setup.bump_hi - x);
                p0[i] = std::pow(a / (0.25 * (setup.bump_hi - setup.bump_lo) * (setup.bump_hi - setup.bump_lo)), 4);
            }
        }
        // path A: t-flow at y0, then y-flow at t0+delta
        std::vector<double> pa = p0;
        flow.evolve(pa, delta, [&](double tau, double x) { return a_fn(tau, setup.y0, x); }, setup.t0);
        flow.evolve(pa, delta, [&](double tau, double x) { return b_fn(setup.t0 + delta, tau, x); }, setup.y0);
        // path B: y-flow at t0, then t-flow at y0+delta
        std::vector<double> pb = p0;
        flow.evolve(pb, delta, [&](double tau, double x) { return b_fn(setup.t0, tau, x); }, setup.y0);
        flow.evolve(pb, delta, [&](double tau, double x) { return a_fn(tau, setup.y0 + delta, x); }, setup.t0);
        double mismatch = 0;
        for (int i = 0; i < n; ++i) mismatch = std::max(mismatch, std::abs(pa[i] - pb[i]));
        rep.rows.push_back({h, delta, mismatch, mismatch / (delta * delta)});
        h /= 2;
        delta /= 2;
        n = 2 * n - 1;
    }
    std::vector<std::pair<double, double>> pts, dts;
    for (const auto& r : rep.rows) {
        pts.emplace_back(r.h, std::max(r.mismatch, 1e-16));
        dts.emplace_back(r.h, std::max(r.defect_rate, 1e-16));
    }
    rep.slope = fit_loglog_slope(pts);
    rep.defect_slope = fit_loglog_slope(dts);
    return rep;
}

}  // namespace rddym
