#include "rddym/jet_calculus.hpp"

#include <algorithm>

namespace rddym {

// ---------------------------------------------------------------------------
// total derivative

namespace {

Expr derive_jet(const Jet& j, Coord c, const Workspace& ws, const Covering* cov) {
    FieldKind k = ws.kind(j.field);
    switch (k) {
        case FieldKind::Parameter:
            return ex::zero();
        case FieldKind::Coordinate:
            return ws.coordinate(c) == j.field ? ex::one() : ex::zero();
        case FieldKind::Base:
            return ex::jet(Jet{j.field, j.index.plus(c)});
        case FieldKind::Fiber: {
            if (j.index[Coord::T] || j.index[Coord::Y])
                throw ValidationError("fiber jet not in stored form: " + jet_name(ws, j));
            if (c == Coord::X) {
                if (j.index[Coord::X] + 1 > Covering::kFiberDepthCap)
                    throw FiberDepthError("fiber jet depth cap exceeded for field '" + ws.name(j.field) + "'");
                return ex::jet(Jet{j.field, j.index.plus(c)});
            }
            if (!cov || cov->fiber() != j.field)
                throw ValidationError("missing covering context for fiber field '" + ws.name(j.field) + "'");
            return cov->prolonged_equation(c, j.index[Coord::X]);
        }
    }
    throw ValidationError("unreachable field kind");
}

}  // namespace

Expr total_derivative(const Expr& e, Coord c, const Workspace& ws, const Covering* cov) {
    const auto& n = e->node();
    if (std::holds_alternative<Rational>(n)) return ex::zero();
    if (auto* j = std::get_if<Jet>(&n)) return derive_jet(*j, c, ws, cov);
    if (auto* s = std::get_if<ExprNode::Sum>(&n)) {
        std::vector<Expr> out;
        out.reserve(s->terms.size());
        for (const auto& t : s->terms) out.push_back(total_derivative(t, c, ws, cov));
        return ex::sum(std::move(out));
    }
    if (auto* p = std::get_if<ExprNode::Prod>(&n)) {
        std::vector<Expr> out;
        for (size_t i = 0; i < p->factors.size(); ++i) {
            std::vector<Expr> fs = p->factors;
            fs[i] = total_derivative(p->factors[i], c, ws, cov);
            out.push_back(ex::prod(std::move(fs)));
        }
        return ex::sum(std::move(out));
    }
    if (auto* pw = std::get_if<ExprNode::Pow>(&n)) {
        // d(b^k) = k b^{k-1} b'
        return ex::prod({ex::integer(pw->exponent), ex::pow(pw->base, pw->exponent - 1),
                         total_derivative(pw->base, c, ws, cov)});
    }
    const auto& ef = std::get<ExprNode::ExpF>(n);
    return ex::mul(e, total_derivative(ef.arg, c, ws, cov));
}

// ---------------------------------------------------------------------------
// substitution

namespace {

struct SubstCtx {
    const Bindings& b;
    const Workspace& ws;
    std::map<std::pair<Bindings::BindKey, Multi>, Expr> memo;
    bool applied = false;

    const Expr* match(const Jet& j) {
        const Bindings::BindKey* found = nullptr;
        const Expr* value = nullptr;
        Multi tau;
        for (const auto& [key, val] : b.entries()) {
            if (key.field != j.field) continue;
            std::optional<Multi> extra =
                key.index ? j.index.minus(*key.index) : std::optional<Multi>(j.index);
            if (!extra) continue;
            if (found) throw ValidationError("jet " + jet_name(ws, j) + " matched by conflicting bindings");
            found = &key;
            tau = *extra;
            value = &val;
        }
        if (!found) return nullptr;
        applied = true;
        auto memo_key = std::make_pair(*found, tau);
        auto it = memo.find(memo_key);
        if (it == memo.end()) {
            Expr d = total_derivative(*value, tau, ws, nullptr);
            it = memo.emplace(memo_key, std::move(d)).first;
        }
        return &it->second;
    }

    Expr walk(const Expr& e) {
        const auto& n = e->node();
        if (std::holds_alternative<Rational>(n)) return e;
        if (auto* j = std::get_if<Jet>(&n)) {
            if (const Expr* v = match(*j)) return *v;
            return e;
        }
        if (auto* s = std::get_if<ExprNode::Sum>(&n)) {
            std::vector<Expr> out;
            out.reserve(s->terms.size());
            for (const auto& t : s->terms) out.push_back(walk(t));
            return ex::sum(std::move(out));
        }
        if (auto* p = std::get_if<ExprNode::Prod>(&n)) {
            std::vector<Expr> out;
            out.reserve(p->factors.size());
            for (const auto& f : p->factors) out.push_back(walk(f));
            return ex::prod(std::move(out));
        }
        if (auto* pw = std::get_if<ExprNode::Pow>(&n)) return ex::pow(walk(pw->base), pw->exponent);
        const auto& ef = std::get<ExprNode::ExpF>(n);
        return ex::exp_(walk(ef.arg));
    }
};

bool is_differential_constant(const Expr& e, const Workspace& ws) {
    for (const auto& j : collect_jets(e)) {
        if (ws.kind(j.field) != FieldKind::Parameter) return false;
    }
    return true;
}

}  // namespace

Expr substitute(const Expr& e, const Bindings& b, const Workspace& ws) {
    for (const auto& [key, val] : b.entries()) {
        if (ws.kind(key.field) == FieldKind::Parameter && !is_differential_constant(val, ws))
            throw ValidationError("parameter '" + ws.name(key.field) + "' bound to a non-constant");
    }
    SubstCtx ctx{b, ws, {}, false};
    return ctx.walk(e);
}

Expr substitute_fixpoint(const Expr& e, const Bindings& b, const Workspace& ws, int max_passes) {
    Expr cur = e;
    for (int i = 0; i < max_passes; ++i) {
        SubstCtx ctx{b, ws, {}, false};
        Expr next = ctx.walk(cur);
        if (!ctx.applied) return next;
        cur = next;
    }
    throw ValidationError("substitution did not reach a fixpoint");
}

// ---------------------------------------------------------------------------
// oriented systems

struct OrientedSystem::Cache {
    std::mutex mu;
    std::map<std::pair<size_t, Multi>, Expr> map;
};

OrientedSystem::OrientedSystem(std::vector<Rule> rules, const Workspace& ws, int max_order)
    : rules_(std::move(rules)), max_order_(max_order), cache_(std::make_shared<Cache>()) {
    for (size_t i = 0; i < rules_.size(); ++i) {
        for (size_t j = i + 1; j < rules_.size(); ++j)
            if (rules_[i].lead == rules_[j].lead)
                throw ValidationError("duplicate leading derivative " + jet_name(ws, rules_[i].lead));
        NormalForm rhs = normalize(rules_[i].rhs, ws);
        for (const auto& jet : rhs.jets()) {
            auto extra = jet.index.minus(rules_[i].lead.index);
            if (jet.field == rules_[i].lead.field && extra)
                throw ValidationError("rule right-hand side contains its own leading derivative " +
                                      jet_name(ws, rules_[i].lead));
        }
        if (rules_[i].lead.index.total() > max_order_)
            throw ValidationError("leading derivative order exceeds the prolongation bound");
    }
}

Expr OrientedSystem::residual(size_t i, const Workspace& ws) const {
    (void)ws;
    const Rule& r = rules_.at(i);
    return ex::sub(ex::jet(r.lead), r.rhs);
}

Expr OrientedSystem::prolonged_rhs(size_t rule, const Multi& tau, const Workspace& ws) const {
    if (tau.is_zero()) return rules_.at(rule).rhs;
    auto key = std::make_pair(rule, tau);
    {
        std::lock_guard lock(cache_->mu);
        auto it = cache_->map.find(key);
        if (it != cache_->map.end()) return it->second;
    }
    const Rule& r = rules_.at(rule);
    if (r.lead.index.total() + tau.total() > max_order_)
        throw ReductionCapError("prolongation order bound exceeded");
    Expr d = total_derivative(r.rhs, tau, ws, nullptr);
    std::lock_guard lock(cache_->mu);
    return cache_->map.emplace(key, std::move(d)).first->second;
}

ReduceResult reduce_modulo_traced(NormalForm nf, const OrientedSystem& sys, const Workspace& ws,
                                  int max_passes) {
    for (int pass = 0; pass < max_passes; ++pass) {
        std::map<Jet, NormalForm> repl;
        for (const Jet& j : nf.jets()) {
            for (size_t i = 0; i < sys.rules().size(); ++i) {
                const auto& rule = sys.rules()[i];
                if (rule.lead.field != j.field) continue;
                auto tau = j.index.minus(rule.lead.index);
                if (!tau) continue;
                repl.emplace(j, normalize(sys.prolonged_rhs(i, *tau, ws), ws));
                break;  // first matching rule wins
            }
        }
        if (repl.empty()) return {std::move(nf), pass};
        nf = nf_replace_atoms(nf, repl, ws);
    }
    throw ReductionCapError("reduction pass cap exceeded (mis-oriented system?)");
}

ReduceResult reduce_modulo_traced(const Expr& e, const OrientedSystem& sys, const Workspace& ws,
                                  int max_passes) {
    return reduce_modulo_traced(normalize(e, ws), sys, ws, max_passes);
}

NormalForm reduce_modulo(const Expr& e, const OrientedSystem& sys, const Workspace& ws) {
    return reduce_modulo_traced(e, sys, ws).nf;
}

OrientedSystem prolong_system(const OrientedSystem& sys, int order, const Workspace& ws) {
    int current = 0;
    for (const auto& r : sys.rules()) current = std::max(current, r.lead.index.total());
    if (order < current)
        throw ValidationError("prolongation order below the system's current order");
    std::vector<OrientedSystem::Rule> rules;
    for (size_t i = 0; i < sys.rules().size(); ++i) {
        const auto& r = sys.rules()[i];
        int room = order - r.lead.index.total();
        for (int dt = 0; dt <= room; ++dt)
            for (int dy = 0; dy + dt <= room; ++dy)
                for (int dx = 0; dx + dy + dt <= room; ++dx) {
                    Multi tau;
                    tau[Coord::T] = static_cast<uint8_t>(dt);
                    tau[Coord::Y] = static_cast<uint8_t>(dy);
                    tau[Coord::X] = static_cast<uint8_t>(dx);
                    rules.push_back({Jet{r.lead.field, r.lead.index.plus(tau)},
                                     sys.prolonged_rhs(i, tau, ws)});
                }
    }
    std::sort(rules.begin(), rules.end(),
              [](const OrientedSystem::Rule& a, const OrientedSystem::Rule& b) { return a.lead < b.lead; });
    for (size_t i = 1; i < rules.size(); ++i)
        if (rules[i].lead == rules[i - 1].lead)
            throw ValidationError("prolonged leading derivative collides with another rule");
    return OrientedSystem(std::move(rules), ws, std::max(order, sys.max_order()));
}

// ---------------------------------------------------------------------------
// coverings

Covering::Covering(FieldId fiber, Expr eq_t, Expr eq_y, const Workspace& ws,
                   std::optional<FieldId> parameter)
    : fiber_(fiber), eq_t_(std::move(eq_t)), eq_y_(std::move(eq_y)), parameter_(parameter) {
    if (ws.kind(fiber_) != FieldKind::Fiber)
        throw ValidationError("covering fiber '" + ws.name(fiber_) + "' must be a fiber field");
    for (const Expr* eq : {&eq_t_, &eq_y_}) {
        for (const auto& j : collect_jets(*eq)) {
            FieldKind k = ws.kind(j.field);
            if (k == FieldKind::Fiber) {
                if (j.field != fiber_)
                    throw ValidationError("covering equation mentions foreign fiber '" + ws.name(j.field) + "'");
                if (j.index[Coord::T] || j.index[Coord::Y])
                    throw ValidationError("covering equation contains a t/y-derivative of the fiber");
                if (j.index[Coord::X] > kFiberDepthCap)
                    throw FiberDepthError("covering equation exceeds the fiber jet depth cap");
            }
        }
    }
    // pre-prolong the defining equations as far as the depth cap permits;
    // lookups after construction are read-only
    prolonged_t_.push_back(eq_t_);
    prolonged_y_.push_back(eq_y_);
    for (int k = 1; k <= kFiberDepthCap; ++k) {
        try {
            Expr pt = total_derivative(prolonged_t_.back(), Coord::X, ws, this);
            Expr py = total_derivative(prolonged_y_.back(), Coord::X, ws, this);
            prolonged_t_.push_back(std::move(pt));
            prolonged_y_.push_back(std::move(py));
        } catch (const FiberDepthError&) {
            break;
        }
    }
}

const Expr& Covering::prolonged_equation(Coord c, int k) const {
    const auto& v = c == Coord::T ? prolonged_t_ : prolonged_y_;
    if (k < 0 || static_cast<size_t>(k) >= v.size())
        throw FiberDepthError("fiber jet depth cap exceeded");
    return v[static_cast<size_t>(k)];
}

}  // namespace rddym
