#include "rddym/catalog.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "rddym/parser.hpp"

#ifndef RDDYM_SOURCE_CATALOG
#define RDDYM_SOURCE_CATALOG ""
#endif

namespace rddym {

namespace fs = std::filesystem;

const char* entry_kind_name(EntryKind k) {
    switch (k) {
        case EntryKind::Equation: return "equation";
        case EntryKind::System: return "system";
        case EntryKind::Covering: return "covering";
        case EntryKind::Reduction: return "reduction";
        case EntryKind::Transformation: return "transformation";
    }
    return "?";
}

namespace {

EntryKind entry_kind_from(const std::string& s, const std::string& origin) {
    if (s == "equation") return EntryKind::Equation;
    if (s == "system") return EntryKind::System;
    if (s == "covering") return EntryKind::Covering;
    if (s == "reduction") return EntryKind::Reduction;
    if (s == "transformation") return EntryKind::Transformation;
    throw ValidationError(origin + ": unknown entry kind '" + s + "'");
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw ValidationError("cannot read fixture file " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

Catalog Catalog::load(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw ValidationError("catalog directory not found: " + dir.string());
    std::vector<std::pair<std::string, RawFixture>> raw;
    std::vector<fs::path> files;
    for (const auto& sub : fs::directory_iterator(dir)) {
        if (!sub.is_directory()) continue;
        for (const auto& f : fs::directory_iterator(sub.path()))
            if (f.path().extension() == ".sys") files.push_back(f.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) raw.emplace_back(f.string(), parse_fixture(read_file(f), f.filename().string()));

    Catalog cat;
    cat.ws_ = std::make_shared<Workspace>();
    // one workspace across the catalog: union of all declarations
    for (const auto& [origin, fx] : raw) {
        for (const auto& [name, kind] : fx.fields) {
            if (auto f = cat.ws_->find(name)) {
                if (cat.ws_->kind(*f) != kind)
                    throw ValidationError(origin + ": field '" + name + "' redeclared with a different kind");
            } else {
                cat.ws_->declare(name, kind);
            }
        }
    }
    cat.ws_->freeze();
    const Workspace& ws = *cat.ws_;

    for (const auto& [origin, fx] : raw) {
        CatalogEntry e;
        e.id = fx.headers.at("id");
        e.kind = entry_kind_from(fx.headers.count("kind") ? fx.headers.at("kind") : fx.section, origin);
        e.paper_eq = fx.headers.count("cite") ? fx.headers.at("cite") : "derived";
        if (fx.headers.count("base")) e.base = fx.headers.at("base");
        try {
            if (fx.section == "system") {
                std::vector<OrientedSystem::Rule> rules;
                for (const auto& [lhs, rhs] : fx.payload)
                    rules.push_back({parse_jet(lhs, ws), parse_expression(rhs, ws)});
                e.system.emplace(std::move(rules), ws);
            } else if (fx.section == "covering") {
                FieldId fiber = ws.require(fx.covering_args.at(0));
                std::optional<FieldId> param;
                if (fx.covering_args.size() > 1) param = ws.require(fx.covering_args.at(1));
                Expr eq_t, eq_y;
                std::string fn = ws.name(fiber);
                for (const auto& [lhs, rhs] : fx.payload) {
                    if (lhs == fn + "_t")
                        eq_t = parse_expression(rhs, ws);
                    else if (lhs == fn + "_y")
                        eq_y = parse_expression(rhs, ws);
                    else
                        throw ValidationError(origin + ": covering line must define " + fn + "_t or " + fn + "_y");
                }
                if (!eq_t || !eq_y) throw ValidationError(origin + ": covering needs both t and y equations");
                e.covering = std::make_shared<Covering>(fiber, eq_t, eq_y, ws, param);
            } else if (fx.section == "reduction") {
                ReductionSpec spec;
                if (fx.headers.count("source")) spec.source = fx.headers.at("source");
                if (fx.headers.count("target")) spec.target = fx.headers.at("target");
                if (fx.headers.count("map_target")) spec.map_target = fx.headers.at("map_target");
                for (const auto& [lhs, rhs] : fx.payload) {
                    Expr value = parse_expression(rhs, ws);
                    if (lhs.rfind("relation ", 0) == 0) {
                        spec.relation = {parse_jet(lhs.substr(9), ws), value};
                    } else if (lhs.rfind("map ", 0) == 0) {
                        spec.point_map = {ws.require(lhs.substr(4)), value};
                    } else if (lhs.rfind("target_map ", 0) == 0) {
                        spec.target_map = {ws.require(lhs.substr(11)), value};
                    } else {
                        spec.substitutions.emplace_back(ws.require(lhs), value);
                    }
                }
                e.reduction = std::move(spec);
            } else if (fx.section == "transformation") {
                TransformationSpec spec;
                for (const auto& [lhs, rhs] : fx.payload)
                    spec.bindings.emplace_back(parse_jet(lhs, ws), parse_expression(rhs, ws));
                e.transformation = std::move(spec);
            }
            // every payload must normalize cleanly
            if (e.system)
                for (const auto& r : e.system->rules()) normalize(r.rhs, ws);
            if (e.covering) {
                normalize(e.covering->equation(Coord::T), ws);
                normalize(e.covering->equation(Coord::Y), ws);
            }
        } catch (const Error& err) {
            throw ValidationError("catalog entry '" + e.id + "': " + err.what());
        }
        if (!cat.entries_.emplace(e.id, std::move(e)).second)
            throw ValidationError(origin + ": duplicate catalog id '" + fx.headers.at("id") + "'");
    }
    return cat;
}

const CatalogEntry& Catalog::get(const std::string& id) const {
    auto it = entries_.find(id);
    if (it == entries_.end()) throw ValidationError("unknown catalog id '" + id + "'");
    return it->second;
}

std::vector<std::string> Catalog::ids() const {
    std::vector<std::string> out;
    for (const auto& [id, e] : entries_) out.push_back(id);
    return out;
}

const OrientedSystem& Catalog::system(const std::string& id) const {
    const auto& e = get(id);
    if (!e.system) throw ValidationError("catalog entry '" + id + "' is not a system");
    return *e.system;
}

const Covering& Catalog::covering(const std::string& id) const {
    const auto& e = get(id);
    if (!e.covering) throw ValidationError("catalog entry '" + id + "' is not a covering");
    return *e.covering;
}

std::string Catalog::show(const std::string& id) const { return serialize_entry(get(id), *ws_); }

fs::path find_catalog_dir(const std::string& override_dir) {
    if (!override_dir.empty()) return override_dir;
    if (const char* env = std::getenv("RDDYM_CATALOG_DIR")) return env;
    if (fs::is_directory("catalog")) return "catalog";
    std::string compiled = RDDYM_SOURCE_CATALOG;
    if (!compiled.empty() && fs::is_directory(compiled)) return compiled;
    throw ValidationError("no catalog directory found (set RDDYM_CATALOG_DIR or pass --catalog)");
}

}  // namespace rddym
