#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "rddym/normal_form.hpp"

namespace rddym {

class Covering;

// Total derivative: linear over sums, Leibniz over products, chain rule
// through powers and exponentials. Jets of base fields get their index
// incremented; parameters differentiate to zero; coordinates to 0/1. Fiber
// fields carry pure x-jets in stored form: an x-derivative increments (depth
// capped), while t/y-derivatives are rewritten through the covering, which
// must then be supplied.
Expr total_derivative(const Expr& e, Coord c, const Workspace& ws, const Covering* cov);

inline Expr total_derivative(const Expr& e, const Multi& m, const Workspace& ws, const Covering* cov) {
    Expr out = e;
    for (Coord c : kCoords)
        for (int i = 0; i < m[c]; ++i) out = total_derivative(out, c, ws, cov);
    return out;
}

// Substitution bindings. A whole-field key rewrites every jet of the field
// by the corresponding total derivative of the bound expression; a jet key
// (field, index0) rewrites every jet whose index dominates index0 by the
// complementary total derivative. Bindings apply simultaneously in one pass;
// a jet matched by two keys is a conflict.
class Bindings {
  public:
    void bind_field(FieldId f, Expr value) { add(BindKey{f, std::nullopt}, std::move(value)); }
    void bind_jet(const Jet& j, Expr value) { add(BindKey{j.field, j.index}, std::move(value)); }
    bool empty() const { return entries_.empty(); }

    struct BindKey {
        FieldId field;
        std::optional<Multi> index;
        auto operator<=>(const BindKey&) const = default;
    };
    const std::map<BindKey, Expr>& entries() const { return entries_; }

  private:
    void add(BindKey k, Expr v) {
        if (!entries_.emplace(std::move(k), std::move(v)).second)
            throw ValidationError("conflicting substitution keys");
    }
    std::map<BindKey, Expr> entries_;
};

Expr substitute(const Expr& e, const Bindings& b, const Workspace& ws);

// substitute repeatedly until no bound jet remains (derivative closure can
// reintroduce bindable jets, e.g. sqrt-style jet relations)
Expr substitute_fixpoint(const Expr& e, const Bindings& b, const Workspace& ws, int max_passes = 8);

// A PDE system as rewrite rules "leading derivative -> right-hand side".
class OrientedSystem {
  public:
    struct Rule {
        Jet lead;
        Expr rhs;
    };

    OrientedSystem(std::vector<Rule> rules, const Workspace& ws, int max_order = 8);

    const std::vector<Rule>& rules() const { return rules_; }
    int max_order() const { return max_order_; }

    // residual lead - rhs of one rule
    Expr residual(size_t i, const Workspace& ws) const;

    // rhs for the prolonged leading jet lead+tau, derived on demand
    Expr prolonged_rhs(size_t rule, const Multi& tau, const Workspace& ws) const;

  private:
    struct Cache;
    std::vector<Rule> rules_;
    int max_order_ = 8;
    std::shared_ptr<Cache> cache_;  // shared across copies, internally locked
};

struct ReduceResult {
    NormalForm nf;
    int passes = 0;
};

// Rewrites every occurrence of a (possibly prolonged) leading derivative by
// its right-hand side until fixpoint. The pass cap guards mis-oriented
// systems.
ReduceResult reduce_modulo_traced(const Expr& e, const OrientedSystem& sys, const Workspace& ws,
                                  int max_passes = 64);
ReduceResult reduce_modulo_traced(NormalForm nf, const OrientedSystem& sys, const Workspace& ws,
                                  int max_passes = 64);
NormalForm reduce_modulo(const Expr& e, const OrientedSystem& sys, const Workspace& ws);

// Materializes all total-derivative images of the rules up to the given
// order, each re-oriented on the derivative of the original leading.
OrientedSystem prolong_system(const OrientedSystem& sys, int order, const Workspace& ws);

// Fiber variable with defining t- and y-derivatives. eq_t and eq_y may
// mention base jets, the fiber's pure x-jets and declared parameters only.
class Covering {
  public:
    static constexpr int kFiberDepthCap = 4;

    Covering(FieldId fiber, Expr eq_t, Expr eq_y, const Workspace& ws,
             std::optional<FieldId> parameter = std::nullopt);

    FieldId fiber() const { return fiber_; }
    std::optional<FieldId> parameter() const { return parameter_; }
    const Expr& equation(Coord c) const {
        if (c == Coord::T) return eq_t_;
        if (c == Coord::Y) return eq_y_;
        throw ValidationError("covering stores t and y equations only");
    }

    // D_x^k of the defining equation, k <= depth cap
    const Expr& prolonged_equation(Coord c, int k) const;

  private:
    FieldId fiber_;
    Expr eq_t_;
    Expr eq_y_;
    std::optional<FieldId> parameter_;
    std::vector<Expr> prolonged_t_;
    std::vector<Expr> prolonged_y_;
};

}  // namespace rddym
