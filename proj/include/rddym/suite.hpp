#pragma once

#include <functional>

#include "rddym/numeric_lab.hpp"
#include "rddym/verifier.hpp"

namespace rddym {

struct NumericRow {
    double h = 0;
    double delta = 0;  // 0 when not applicable
    double residual = 0;
    double slope = 0;
};

struct CheckReport {
    std::string id;
    std::string suite;
    CheckStatus status = CheckStatus::Error;
    std::string residual;
    std::string factor;
    std::string diagnostic;
    std::string paper_eq;
    int trace_len = 0;
    double time_ms = 0;
    std::vector<NumericRow> rows;  // numeric checks only
};

struct SuiteResult {
    std::string suite;
    std::vector<CheckReport> checks;  // sorted by id
    int passed = 0;
    int failed = 0;
    int errored = 0;
    double time_ms = 0;

    int exit_code() const { return errored ? 2 : (failed ? 1 : 0); }
};

// Registry of every named check, built over a loaded catalog. Checks are
// pure; run() may execute them on a thread pool, and the aggregated result
// (ordering and content) does not depend on the parallelism.
class SuiteRunner {
  public:
    explicit SuiteRunner(const Catalog& catalog);

    static const std::vector<std::string>& suite_names();
    SuiteResult run(const std::string& suite, int parallel = 1) const;

    struct CheckDef {
        std::string suite;
        std::string id;
        std::string paper_eq;
        std::function<CheckOutcome(std::vector<NumericRow>&)> fn;
    };
    const std::vector<CheckDef>& checks() const { return checks_; }

  private:
    const Catalog& cat_;
    std::vector<CheckDef> checks_;

    void add(std::string suite, std::string id, std::string paper_eq,
             std::function<CheckOutcome()> fn);
    void add_rows(std::string suite, std::string id, std::string paper_eq,
                  std::function<CheckOutcome(std::vector<NumericRow>&)> fn);
    void register_coverings();
    void register_reductions();
    void register_backlund();
    void register_numeric();
};

std::string emit_text(const SuiteResult& r);
std::string emit_json(const SuiteResult& r);  // stable documented schema
std::string emit_csv(const SuiteResult& r);   // numeric rows

// numeric fixtures shared by the suite and the acceptance tests
struct NumericFixtures {
    ExactSolution rdDym_cubic;     // u = (x + 2y)^3 for eq.rdDym
    ExactSolution rdDym2_linear;   // u = t + 2x + 3y, v = 5 for sys.rdDym2
    ExactSolution rdDym2_sqrt;     // u = x + 2y, v = sqrt(2(x+2y) + 1)
    ExactSolution control;         // u = x*y*t, a planted non-solution
    GridSpec grid;
    CommutativitySetup commut;
};
NumericFixtures make_numeric_fixtures(const Catalog& cat);

}  // namespace rddym
