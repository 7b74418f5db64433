#pragma once

#include <array>
#include <functional>

#include "rddym/verifier.hpp"

namespace rddym {

// Uniform tensor grid over closed intervals in (t, y, x); second-order
// centered differences, interior points only.
struct GridSpec {
    std::array<double, 3> lo{0.0, 0.0, 0.0};  // indexed by Coord
    std::array<double, 3> hi{1.0, 1.0, 1.0};
    std::array<int, 3> points{9, 9, 9};

    void validate() const;
    double step(Coord c) const {
        return (hi[static_cast<size_t>(c)] - lo[static_cast<size_t>(c)]) /
               (points[static_cast<size_t>(c)] - 1);
    }
    double max_step() const { return std::max({step(Coord::T), step(Coord::Y), step(Coord::X)}); }
    GridSpec refined() const {
        GridSpec g = *this;
        for (auto& n : g.points) n = 2 * n - 1;
        return g;
    }
};

// Closed-form candidate solution: one expression per field over coordinates
// only. sqrt_of marks fields sampled as the square root of the stored
// expression (the expression class keeps integer powers only).
struct SolutionField {
    FieldId field;
    Expr value;
    bool sqrt_of = false;
};

struct ExactSolution {
    std::string id;
    std::vector<SolutionField> fields;
    bool certified = false;  // set by certify()
};

// In-process symbolic gate: substituting the solution into every equation of
// the system must normalize to zero. sqrt fields are handled through their
// first-derivative jet relations plus reduction modulo phi^2 = inner.
CheckOutcome certify_solution(ExactSolution& sol, const OrientedSystem& sys, const Workspace& ws);

// max |lead - rhs| per equation over interior grid points, all derivatives
// taken by centered differences of the sampled fields
std::vector<double> evaluate_residual_grid(const ExactSolution& sol, const OrientedSystem& sys,
                                           const GridSpec& g, const Workspace& ws);

struct ConvergenceRow {
    double h;
    double residual;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    double slope = 0.0;   // least-squares log-log slope
    bool exact = false;   // all residuals at rounding level (<= 1e-10)
};

ConvergenceReport estimate_convergence_order(const ExactSolution& sol, const OrientedSystem& sys,
                                             GridSpec g, int halvings, const Workspace& ws);

// Evolves a profile p(x) by delta in t then delta in y and in the opposite
// order through the covering's two linear flows (RK4 in time, centered
// differences in space, step ratio 0.25 against the max characteristic
// speed). Returns the path mismatch per refinement level under simultaneous
// (delta, h) halving, plus the defect rate mismatch/delta^2 whose plateau
// flags incompatible base fields.
struct CommutativityRow {
    double h;
    double delta;
    double mismatch;
    double defect_rate;
};

struct CommutativityReport {
    std::vector<CommutativityRow> rows;
    double slope = 0.0;        // of mismatch under simultaneous halving
    double defect_slope = 0.0; // of mismatch / delta^2
};

struct CommutativitySetup {
    double x_lo = 0.0, x_hi = 1.0;
    int points = 65;
    double t0 = 0.0, y0 = 0.25;
    double delta = 0.02;
    double lambda = 1.0;
    int levels = 4;
    double bump_lo = 0.25, bump_hi = 0.75;
};

CommutativityReport commutativity_test(const Covering& cov, const ExactSolution& base,
                                       const CommutativitySetup& setup, const Workspace& ws);

double fit_loglog_slope(const std::vector<std::pair<double, double>>& points);

}  // namespace rddym
