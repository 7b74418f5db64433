#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rddym/jet_calculus.hpp"

namespace rddym {

enum class EntryKind { Equation, System, Covering, Reduction, Transformation };

const char* entry_kind_name(EntryKind k);

struct ReductionSpec {
    std::vector<std::pair<FieldId, Expr>> substitutions;      // whole-field, e.g. v = 0 or s = x
    std::optional<std::pair<Jet, Expr>> relation;             // change of unknown, e.g. u_y = -exp(w)
    std::optional<std::pair<FieldId, Expr>> point_map;        // e.g. u -> -kappa*u
    std::string map_target;                                   // target of the point map
    std::optional<std::pair<FieldId, Expr>> target_map;       // applied to the target residual when matching
    std::string source;
    std::string target;
};

struct TransformationSpec {
    std::vector<std::pair<Jet, Expr>> bindings;  // defined jet -> expression
};

struct CatalogEntry {
    std::string id;
    EntryKind kind;
    std::string paper_eq;  // short citation, or "derived"
    std::string base;      // base system id for coverings

    std::optional<OrientedSystem> system;
    std::shared_ptr<const Covering> covering;
    std::optional<ReductionSpec> reduction;
    std::optional<TransformationSpec> transformation;
};

// All named systems, coverings, reductions and transformations, loaded from
// fixture files `catalog/<kind>/<id>.sys`. One shared workspace spans the
// catalog; every payload is parsed and normalized at load time.
class Catalog {
  public:
    static Catalog load(const std::filesystem::path& dir);

    const Workspace& workspace() const { return *ws_; }
    std::shared_ptr<const Workspace> workspace_ptr() const { return ws_; }

    const CatalogEntry& get(const std::string& id) const;
    bool has(const std::string& id) const { return entries_.count(id) != 0; }
    std::vector<std::string> ids() const;

    const OrientedSystem& system(const std::string& id) const;
    const Covering& covering(const std::string& id) const;

    std::string show(const std::string& id) const;  // canonical pretty print

  private:
    std::shared_ptr<Workspace> ws_;
    std::map<std::string, CatalogEntry> entries_;
};

// Locates the catalog directory: explicit argument, $RDDYM_CATALOG_DIR,
// ./catalog, then the compiled-in source path.
std::filesystem::path find_catalog_dir(const std::string& override_dir = "");

// Fixture text for one entry (round-trip stable against the parser).
std::string serialize_entry(const CatalogEntry& e, const Workspace& ws);

// in fixture_io.cpp: low-level fixture parsing shared by Catalog::load
struct RawFixture {
    std::map<std::string, std::string> headers;           // id, kind, cite, base, ...
    std::vector<std::pair<std::string, FieldKind>> fields;
    std::string section;                                  // system | covering | reduction | transformation
    std::vector<std::string> covering_args;               // fiber [param]
    std::vector<std::pair<std::string, std::string>> payload;  // lhs = rhs lines and map lines
};
RawFixture parse_fixture(const std::string& text, const std::string& origin);

}  // namespace rddym
