#pragma once

#include <functional>
#include <optional>

#include "rddym/catalog.hpp"

namespace rddym {

enum class CheckStatus { Pass, Fail, Error };

inline const char* status_name(CheckStatus s) {
    switch (s) {
        case CheckStatus::Pass: return "pass";
        case CheckStatus::Fail: return "fail";
        case CheckStatus::Error: return "error";
    }
    return "?";
}

// Outcome of one verification. status == Pass iff the residual is the zero
// normal form (or the check's stated assertion holds); errors carry a
// diagnostic instead of a residual.
struct CheckOutcome {
    CheckStatus status = CheckStatus::Error;
    std::string residual = "0";   // canonical printed normal form
    std::string factor;           // recorded unit factor, when one was matched
    std::string diagnostic;
    int trace_len = 0;

    static CheckOutcome pass(std::string residual = "0") {
        return {CheckStatus::Pass, std::move(residual), "", "", 0};
    }
    static CheckOutcome fail(std::string residual, std::string diag = "") {
        return {CheckStatus::Fail, std::move(residual), "", std::move(diag), 0};
    }
    static CheckOutcome error(std::string diag) { return {CheckStatus::Error, "", "", std::move(diag), 0}; }
};

// D~_y(eq_t) - D~_t(eq_y), fiber derivatives rewritten through the covering;
// fully expanded, not reduced modulo any base system.
Expr compatibility_residual(const Covering& cov, const Workspace& ws);

CheckOutcome verify_covering(const Covering& cov, const OrientedSystem& sys, const Workspace& ws);

// Rewrites a parameter-carrying covering p_c = A_c(jets, lambda) p_x into the
// parameter-free covering q_c = A_c(jets, q) q_x of the implicit function
// q(t, x, y, p) = lambda.
Covering implicit_parameter_swap(const Covering& cov, FieldId new_fiber, const Workspace& ws);

// Unit factors are single-monomial quotients whose atoms are parameters or
// exponentials; the printed form is recorded in reports.
std::optional<std::string> unit_factor(const NormalForm& ratio, const Workspace& ws);

// The unit c with a == c * b, if one exists (leading-term candidate verified
// by exact subtraction).
std::optional<std::string> unit_factor_between(const NormalForm& a, const NormalForm& b,
                                               const Workspace& ws);

// Substitution reductions (whole-field bindings): each substituted source
// equation must become the target equation up to a unit factor, vanish
// identically, or reduce to zero modulo the prolonged target.
CheckOutcome verify_reduction(const ReductionSpec& red, const OrientedSystem& source,
                              const OrientedSystem& target, const Workspace& ws);

// The point transformation of a reduction entry (e.g. u -> -kappa*u) applied
// to `from`, matched against `to` up to a unit factor.
CheckOutcome verify_point_map(const ReductionSpec& red, const OrientedSystem& from,
                              const OrientedSystem& to, const Workspace& ws);

// Change of unknown: substitute v, rewrite u-jets containing y through the
// relation u_y = eps*exp(w), eliminate u_xx from the rewritten scalar
// relation, and match the y-differentiated equation against the target up to
// a unit factor.
CheckOutcome verify_change_of_unknown(const ReductionSpec& red, const OrientedSystem& source,
                                      const OrientedSystem& target, const Workspace& ws);

// The covering obtained by pushing a change-of-unknown reduction through a
// parameterless covering and switching fiber q = exp(new_fiber).
Covering derive_reduced_covering(const ReductionSpec& red, const OrientedSystem& source,
                                 const Covering& cov, FieldId new_fiber, const Workspace& ws);

// Substitutes the transformation into cov_src's equations; pass iff the
// results equal cov_dst's equations exactly.
CheckOutcome verify_backlund_forward(const TransformationSpec& bt, const Covering& cov_src,
                                     const Covering& cov_dst, const Workspace& ws);

// Solves a first-order transformation for the given unknown jets by
// sequential elimination.
TransformationSpec solve_backlund_inverse(const TransformationSpec& bt, const std::vector<Jet>& unknowns,
                                          const Workspace& ws);

// Substitutes `inverse` into the right-hand sides of `forward`; pass iff
// every defined jet of `forward` comes back identically.
CheckOutcome backlund_roundtrip(const TransformationSpec& forward, const TransformationSpec& inverse,
                                const Workspace& ws);

// Cross-derivative conditions of the bound jets, reduced modulo sys.
CheckOutcome verify_backlund_compatibility(const TransformationSpec& bt, const OrientedSystem& sys,
                                           const Workspace& ws);

// Induced-substitution images of source residuals, reduced modulo target.
CheckOutcome verify_backlund_images(const TransformationSpec& bt, const OrientedSystem& source,
                                    const OrientedSystem& target, const Workspace& ws);

// Rebuilds an expression/system with fields renamed through the id map
// (within one workspace).
Expr rename_fields(const Expr& e, const std::map<FieldId, FieldId>& m, const Workspace& ws);
OrientedSystem rename_fields(const OrientedSystem& sys, const std::map<FieldId, FieldId>& m,
                             const Workspace& ws);

}  // namespace rddym
