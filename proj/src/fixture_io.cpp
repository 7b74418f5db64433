#include <sstream>

#include "rddym/catalog.hpp"

namespace rddym {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

FieldKind parse_kind_word(const std::string& w, const std::string& origin) {
    if (w == "base") return FieldKind::Base;
    if (w == "fiber") return FieldKind::Fiber;
    if (w == "param") return FieldKind::Parameter;
    throw ValidationError(origin + ": unknown field kind '" + w + "'");
}

}  // namespace

RawFixture parse_fixture(const std::string& text, const std::string& origin) {
    RawFixture fx;
    std::istringstream in(text);
    std::string line;
    bool in_payload = false;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (!in_payload) {
            auto words = split_ws(line);
            const std::string& key = words[0];
            if (key == "field") {
                if (words.size() != 3) throw ValidationError(origin + ": bad field line '" + line + "'");
                fx.fields.emplace_back(words[1], parse_kind_word(words[2], origin));
            } else if (key == "param") {
                if (words.size() != 2) throw ValidationError(origin + ": bad param line '" + line + "'");
                fx.fields.emplace_back(words[1], FieldKind::Parameter);
            } else if (key == "system" || key == "reduction" || key == "transformation") {
                fx.section = key;
                in_payload = true;
            } else if (key == "covering") {
                fx.section = key;
                fx.covering_args.assign(words.begin() + 1, words.end());
                if (fx.covering_args.empty())
                    throw ValidationError(origin + ": covering section needs a fiber name");
                in_payload = true;
            } else {
                auto space = line.find(' ');
                if (space == std::string::npos)
                    throw ValidationError(origin + ": bad header line '" + line + "'");
                fx.headers[key] = trim(line.substr(space + 1));
            }
        } else {
            auto arrow = line.find("->");
            auto eq = line.find('=');
            if (line.rfind("map ", 0) == 0 || line.rfind("target_map ", 0) == 0) {
                if (arrow == std::string::npos)
                    throw ValidationError(origin + ": map line needs '->': '" + line + "'");
                auto keyword_end = line.find(' ');
                std::string lhs = trim(line.substr(keyword_end + 1, arrow - keyword_end - 1));
                std::string rhs = trim(line.substr(arrow + 2));
                fx.payload.emplace_back(line.substr(0, keyword_end) + " " + lhs, rhs);
            } else if (line.rfind("relation ", 0) == 0) {
                std::string rest = line.substr(9);
                auto releq = rest.find('=');
                if (releq == std::string::npos)
                    throw ValidationError(origin + ": relation line needs '=': '" + line + "'");
                fx.payload.emplace_back("relation " + trim(rest.substr(0, releq)), trim(rest.substr(releq + 1)));
            } else {
                if (eq == std::string::npos)
                    throw ValidationError(origin + ": payload line needs '=': '" + line + "'");
                fx.payload.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
            }
        }
    }
    if (fx.section.empty()) throw ValidationError(origin + ": missing payload section");
    if (!fx.headers.count("id")) throw ValidationError(origin + ": missing id header");
    return fx;
}

std::string serialize_entry(const CatalogEntry& e, const Workspace& ws) {
    std::ostringstream out;
    out << "id " << e.id << "\n";
    out << "kind " << entry_kind_name(e.kind) << "\n";
    out << "cite " << (e.paper_eq.empty() ? "derived" : e.paper_eq) << "\n";
    if (!e.base.empty()) out << "base " << e.base << "\n";
    if (e.reduction) {
        if (!e.reduction->source.empty()) out << "source " << e.reduction->source << "\n";
        if (!e.reduction->target.empty()) out << "target " << e.reduction->target << "\n";
        if (!e.reduction->map_target.empty()) out << "map_target " << e.reduction->map_target << "\n";
    }
    std::vector<std::pair<std::string, FieldKind>> fields;
    auto used = [&](FieldId f) {
        for (auto& [name, kind] : fields)
            if (name == ws.name(f)) return true;
        return false;
    };
    auto note_fields = [&](const Expr& ex_) {
        for (const auto& j : collect_jets(ex_))
            if (ws.kind(j.field) != FieldKind::Coordinate && !used(j.field))
                fields.emplace_back(ws.name(j.field), ws.kind(j.field));
    };
    std::vector<std::pair<std::string, std::string>> payload;
    std::string section;
    std::vector<std::string> covering_args;
    if (e.system) {
        section = "system";
        for (const auto& r : e.system->rules()) {
            if (!used(r.lead.field)) fields.emplace_back(ws.name(r.lead.field), ws.kind(r.lead.field));
            note_fields(r.rhs);
            payload.emplace_back(jet_name(ws, r.lead), to_string(r.rhs, ws));
        }
    } else if (e.covering) {
        section = "covering";
        covering_args.push_back(ws.name(e.covering->fiber()));
        if (e.covering->parameter()) covering_args.push_back(ws.name(*e.covering->parameter()));
        fields.emplace_back(ws.name(e.covering->fiber()), FieldKind::Fiber);
        note_fields(e.covering->equation(Coord::T));
        note_fields(e.covering->equation(Coord::Y));
        if (e.covering->parameter() && !used(*e.covering->parameter()))
            fields.emplace_back(ws.name(*e.covering->parameter()), FieldKind::Parameter);
        payload.emplace_back(ws.name(e.covering->fiber()) + "_t", to_string(e.covering->equation(Coord::T), ws));
        payload.emplace_back(ws.name(e.covering->fiber()) + "_y", to_string(e.covering->equation(Coord::Y), ws));
    } else if (e.reduction) {
        section = "reduction";
        for (const auto& [f, val] : e.reduction->substitutions) {
            if (!used(f)) fields.emplace_back(ws.name(f), ws.kind(f));
            note_fields(val);
            payload.emplace_back(ws.name(f), to_string(val, ws));
        }
        if (e.reduction->relation) {
            note_fields(e.reduction->relation->second);
            payload.emplace_back("relation " + jet_name(ws, e.reduction->relation->first),
                                 to_string(e.reduction->relation->second, ws));
        }
        if (e.reduction->point_map) {
            note_fields(e.reduction->point_map->second);
            payload.emplace_back("map " + ws.name(e.reduction->point_map->first),
                                 to_string(e.reduction->point_map->second, ws));
        }
        if (e.reduction->target_map) {
            note_fields(e.reduction->target_map->second);
            payload.emplace_back("target_map " + ws.name(e.reduction->target_map->first),
                                 to_string(e.reduction->target_map->second, ws));
        }
    } else if (e.transformation) {
        section = "transformation";
        for (const auto& [jet, val] : e.transformation->bindings) {
            if (!used(jet.field)) fields.emplace_back(ws.name(jet.field), ws.kind(jet.field));
            note_fields(val);
            payload.emplace_back(jet_name(ws, jet), to_string(val, ws));
        }
    }
    for (const auto& [name, kind] : fields) {
        if (kind == FieldKind::Parameter)
            out << "param " << name << "\n";
        else
            out << "field " << name << " " << kind_name(kind) << "\n";
    }
    out << section;
    for (const auto& a : covering_args) out << " " << a;
    out << "\n";
    for (const auto& [lhs, rhs] : payload) {
        if (lhs.rfind("map ", 0) == 0 || lhs.rfind("target_map ", 0) == 0)
            out << lhs << " -> " << rhs << "\n";
        else
            out << lhs << " = " << rhs << "\n";
    }
    return out.str();
}

}  // namespace rddym
