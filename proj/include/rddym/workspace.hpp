#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rddym {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParseError : Error {
    ParseError(const std::string& msg, size_t pos)
        : Error(msg + " (at position " + std::to_string(pos) + ")"), position(pos) {}
    size_t position;
};
struct ValidationError : Error {
    using Error::Error;
};
struct ReductionCapError : Error {
    using Error::Error;
};
struct FiberDepthError : Error {
    using Error::Error;
};

// Independent variables, in the fixed ranking t < y < x.
enum class Coord : uint8_t { T = 0, Y = 1, X = 2 };

inline const char* coord_name(Coord c) {
    switch (c) {
        case Coord::T: return "t";
        case Coord::Y: return "y";
        case Coord::X: return "x";
    }
    return "?";
}

inline std::optional<Coord> coord_from_char(char c) {
    if (c == 't') return Coord::T;
    if (c == 'y') return Coord::Y;
    if (c == 'x') return Coord::X;
    return std::nullopt;
}

constexpr std::array<Coord, 3> kCoords{Coord::T, Coord::Y, Coord::X};

// Derivative multi-index over (t, y, x).
struct Multi {
    std::array<uint8_t, 3> n{0, 0, 0};

    uint8_t& operator[](Coord c) { return n[static_cast<size_t>(c)]; }
    uint8_t operator[](Coord c) const { return n[static_cast<size_t>(c)]; }
    int total() const { return n[0] + n[1] + n[2]; }
    bool is_zero() const { return total() == 0; }

    Multi plus(Coord c) const {
        Multi m = *this;
        ++m[c];
        return m;
    }
    Multi plus(const Multi& o) const {
        Multi m = *this;
        for (int i = 0; i < 3; ++i) m.n[i] = static_cast<uint8_t>(m.n[i] + o.n[i]);
        return m;
    }
    // componentwise difference, or nullopt if not >= o
    std::optional<Multi> minus(const Multi& o) const {
        Multi m;
        for (int i = 0; i < 3; ++i) {
            if (n[i] < o.n[i]) return std::nullopt;
            m.n[i] = static_cast<uint8_t>(n[i] - o.n[i]);
        }
        return m;
    }
    bool contains(Coord c) const { return (*this)[c] > 0; }

    // lexicographic with priority t, y, x
    auto operator<=>(const Multi& o) const = default;

    // suffix in display order t, x, y (matches the u_txy convention)
    std::string suffix() const {
        std::string s;
        s.append(n[0], 't');
        s.append(n[2], 'x');
        s.append(n[1], 'y');
        return s;
    }
};

enum class FieldKind : uint8_t { Base = 0, Fiber = 1, Parameter = 2, Coordinate = 3 };

inline const char* kind_name(FieldKind k) {
    switch (k) {
        case FieldKind::Base: return "base";
        case FieldKind::Fiber: return "fiber";
        case FieldKind::Parameter: return "param";
        case FieldKind::Coordinate: return "coord";
    }
    return "?";
}

struct FieldId {
    uint32_t id = 0;
    auto operator<=>(const FieldId&) const = default;
};

// Field table. Declarations first, then freeze(); a frozen workspace assigns
// each field a sort ordinal by (kind, name), which the canonical atom order
// uses everywhere. The three coordinates are pre-declared.
class Workspace {
  public:
    Workspace() {
        declare("t", FieldKind::Coordinate);
        declare("x", FieldKind::Coordinate);
        declare("y", FieldKind::Coordinate);
    }

    FieldId declare(const std::string& name, FieldKind kind) {
        if (frozen_) throw ValidationError("workspace is frozen; cannot declare '" + name + "'");
        if (by_name_.count(name)) throw ValidationError("duplicate field name '" + name + "'");
        FieldId f{static_cast<uint32_t>(fields_.size())};
        fields_.push_back({name, kind, 0});
        by_name_.emplace(name, f);
        return f;
    }

    void freeze() {
        if (frozen_) return;
        std::vector<uint32_t> order(fields_.size());
        for (uint32_t i = 0; i < fields_.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
            const auto& fa = fields_[a];
            const auto& fb = fields_[b];
            if (fa.kind != fb.kind) return fa.kind < fb.kind;
            return fa.name < fb.name;
        });
        for (uint32_t rank = 0; rank < order.size(); ++rank) fields_[order[rank]].ordinal = rank;
        frozen_ = true;
    }
    bool frozen() const { return frozen_; }

    std::optional<FieldId> find(const std::string& name) const {
        auto it = by_name_.find(name);
        if (it == by_name_.end()) return std::nullopt;
        return it->second;
    }
    FieldId require(const std::string& name) const {
        auto f = find(name);
        if (!f) throw ValidationError("unknown field '" + name + "'");
        return *f;
    }

    const std::string& name(FieldId f) const { return fields_.at(f.id).name; }
    FieldKind kind(FieldId f) const { return fields_.at(f.id).kind; }
    uint32_t ordinal(FieldId f) const {
        if (!frozen_) throw ValidationError("workspace must be frozen before use");
        return fields_.at(f.id).ordinal;
    }
    FieldId coordinate(Coord c) const { return require(coord_name(c)); }
    size_t size() const { return fields_.size(); }

    std::vector<std::pair<std::string, FieldKind>> declared() const {
        std::vector<std::pair<std::string, FieldKind>> out;
        for (const auto& f : fields_)
            if (f.kind != FieldKind::Coordinate) out.emplace_back(f.name, f.kind);
        return out;
    }

  private:
    struct Info {
        std::string name;
        FieldKind kind;
        uint32_t ordinal;
    };
    std::vector<Info> fields_;
    std::map<std::string, FieldId> by_name_;
    bool frozen_ = false;
};

// One derivative coordinate of a dependent field.
struct Jet {
    FieldId field;
    Multi index;

    auto operator<=>(const Jet&) const = default;
};

inline Jet make_jet(const Workspace& ws, FieldId f, const Multi& m) {
    FieldKind k = ws.kind(f);
    if ((k == FieldKind::Parameter || k == FieldKind::Coordinate) && !m.is_zero())
        throw ValidationError("derivative index on " + std::string(kind_name(k)) + " '" + ws.name(f) + "'");
    return Jet{f, m};
}

inline std::string jet_name(const Workspace& ws, const Jet& j) {
    std::string s = ws.name(j.field);
    if (!j.index.is_zero()) {
        s += '_';
        s += j.index.suffix();
    }
    return s;
}

}  // namespace rddym
