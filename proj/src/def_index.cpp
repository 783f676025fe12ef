#include "polycall/def_index.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace polycall {

namespace {

bool scope_suffix_matches(const std::vector<std::string>& scope,
                          const std::vector<std::string>& qualifiers) {
    if (qualifiers.empty()) return true;
    if (qualifiers.size() > scope.size()) return false;
    return std::equal(qualifiers.rbegin(), qualifiers.rend(), scope.rbegin());
}

}  // namespace

std::string DefIndex::row_key(const FunctionDef& def) {
    return def.unit + "\x1f" + join_scope(def.scope) + "\x1f" + def.name + "\x1f" +
           std::to_string(def.line);
}

DefIndex::DefIndex(const std::vector<FunctionDef>& defs) {
    // group rows by (unit, scope, name); definitions in line order
    std::map<std::string, std::vector<const FunctionDef*>> groups;
    for (const auto& d : defs) {
        groups[d.unit + "\x1f" + join_scope(d.scope) + "\x1f" + d.name].push_back(&d);
    }
    for (auto& [key, rows] : groups) {
        std::sort(rows.begin(), rows.end(),
                  [](const FunctionDef* a, const FunctionDef* b) { return a->line < b->line; });
    }

    // pass 1: canonical fqns for definitions (ordinal suffix disambiguates
    // same-named definitions within one unit)
    auto definition_canonical = [&](const FunctionDef& row) {
        const auto& rows = groups[row.unit + "\x1f" + join_scope(row.scope) + "\x1f" + row.name];
        std::vector<const FunctionDef*> definitions;
        for (const auto* r : rows) {
            if (r->has_body) definitions.push_back(r);
        }
        if (definitions.size() < 2) return row.fqn();
        size_t ordinal = 1;
        for (const auto* d : definitions) {
            if (d->line == row.line) break;
            ++ordinal;
        }
        return row.fqn() + "/" + std::to_string(ordinal);
    };

    // canonical definition fqns keyed by (scope, name, language), for
    // cross-unit declaration merging
    std::map<std::string, std::set<std::string>> defs_by_signature;
    for (const auto& d : defs) {
        if (!d.has_body) continue;
        defs_by_signature[join_scope(d.scope) + "\x1f" + d.name + "\x1f" + to_string(d.language)]
            .insert(definition_canonical(d));
    }

    // pass 2: all rows
    for (const auto& d : defs) {
        Entry e;
        e.def = d;
        if (d.has_body) {
            e.canonical = definition_canonical(d);
        } else {
            const auto& rows = groups[d.unit + "\x1f" + join_scope(d.scope) + "\x1f" + d.name];
            std::vector<const FunctionDef*> same_unit_defs;
            for (const auto* r : rows) {
                if (r->has_body) same_unit_defs.push_back(r);
            }
            if (same_unit_defs.size() == 1) {
                e.canonical = definition_canonical(*same_unit_defs.front());
            } else if (!same_unit_defs.empty()) {
                e.canonical = d.fqn();  // ambiguous overload set in this unit
            } else {
                auto it = defs_by_signature.find(join_scope(d.scope) + "\x1f" + d.name + "\x1f" +
                                                 to_string(d.language));
                if (it != defs_by_signature.end() && it->second.size() == 1) {
                    e.canonical = *it->second.begin();
                } else {
                    e.canonical = d.fqn();
                }
            }
        }
        row_index_[row_key(d)] = entries_.size();
        entries_.push_back(std::move(e));
    }
    for (size_t i = 0; i < entries_.size(); ++i) {
        by_name_[entries_[i].def.name].push_back(i);
    }

    for (const auto& e : entries_) {
        auto it = by_fqn_.find(e.canonical);
        if (it == by_fqn_.end()) {
            NodeInfo info;
            info.fqn = e.canonical;
            info.display = e.def.name;
            info.language = e.def.language;
            info.is_anonymous = e.def.is_anonymous;
            by_fqn_.emplace(e.canonical, std::move(info));
        }
    }
    nodes_.reserve(by_fqn_.size());
    for (const auto& [fqn, info] : by_fqn_) nodes_.push_back(info);
}

const DefIndex::Entry* DefIndex::find_entry(const FunctionDef& def) const {
    auto it = row_index_.find(row_key(def));
    return it == row_index_.end() ? nullptr : &entries_[it->second];
}

const std::string& DefIndex::canonical_fqn(const FunctionDef& def) const {
    const Entry* e = find_entry(def);
    if (e == nullptr) {
        throw std::runtime_error("function record not in index: " + def.fqn());
    }
    return e->canonical;
}

const DefIndex::NodeInfo* DefIndex::node(const std::string& fqn) const {
    auto it = by_fqn_.find(fqn);
    return it == by_fqn_.end() ? nullptr : &it->second;
}

const std::vector<size_t>& DefIndex::entries_named(const std::string& name) const {
    static const std::vector<size_t> empty;
    auto it = by_name_.find(name);
    return it == by_name_.end() ? empty : it->second;
}

std::optional<std::string> DefIndex::resolve_target(const std::string& name,
                                                    const std::vector<std::string>& qualifiers,
                                                    const std::string& unit) const {
    const Entry* same_unit_def = nullptr;
    const Entry* same_unit_decl = nullptr;
    std::set<std::string> repo_wide;
    for (size_t idx : entries_named(name)) {
        const Entry& e = entries_[idx];
        const FunctionDef& d = e.def;
        if (d.language != Lang::Cpp || d.is_anonymous) continue;
        if (!scope_suffix_matches(d.scope, qualifiers)) continue;
        repo_wide.insert(e.canonical);
        if (d.unit != unit) continue;
        if (d.has_body) {
            if (same_unit_def == nullptr || d.line < same_unit_def->def.line) same_unit_def = &e;
        } else {
            if (same_unit_decl == nullptr || d.line < same_unit_decl->def.line) {
                same_unit_decl = &e;
            }
        }
    }
    if (same_unit_def != nullptr) return same_unit_def->canonical;
    if (same_unit_decl != nullptr) return same_unit_decl->canonical;
    if (repo_wide.size() == 1) return *repo_wide.begin();
    return std::nullopt;
}

std::optional<std::string> DefIndex::resolve_anonymous(const std::string& unit, int line) const {
    for (const auto& e : entries_) {
        if (e.def.is_anonymous && e.def.unit == unit && e.def.line == line) return e.canonical;
    }
    return std::nullopt;
}

std::optional<std::string> DefIndex::resolve_callee(const std::string& callee_expr,
                                                    const std::string& unit,
                                                    Lang language) const {
    CalleeParts parts = split_callee(callee_expr);
    if (parts.name.empty()) return std::nullopt;
    if (language == Lang::Python && parts.attribute_access) {
        // attribute calls are opaque unless rewritten by the FFI filter
        return std::nullopt;
    }
    if (language == Lang::Cpp && parts.attribute_access) {
        // method call through an object: match by trailing name, same unit only
        const Entry* best = nullptr;
        for (size_t idx : entries_named(parts.name)) {
            const Entry& e = entries_[idx];
            if (e.def.language != language || e.def.unit != unit) continue;
            if (e.def.is_anonymous) continue;
            if (best == nullptr || e.def.line < best->def.line) best = &e;
        }
        if (best != nullptr) return best->canonical;
        return std::nullopt;
    }

    const std::vector<std::string>& quals = parts.qualifiers;
    const Entry* same_unit = nullptr;
    std::set<std::string> repo_wide;
    for (size_t idx : entries_named(parts.name)) {
        const Entry& e = entries_[idx];
        const FunctionDef& d = e.def;
        if (d.language != language || d.is_anonymous) continue;
        if (!scope_suffix_matches(d.scope, quals)) continue;
        repo_wide.insert(e.canonical);
        if (d.unit != unit) continue;
        if (same_unit == nullptr) {
            same_unit = &e;
        } else {
            // prefer shallower scopes, then definitions, then earlier lines
            auto rank = [](const FunctionDef& f) {
                return std::make_tuple(f.scope.size(), f.has_body ? 0 : 1, f.line);
            };
            if (rank(d) < rank(same_unit->def)) same_unit = &e;
        }
    }
    if (same_unit != nullptr) return same_unit->canonical;
    if (repo_wide.size() == 1) return *repo_wide.begin();
    return std::nullopt;
}

CalleeParts split_callee(const std::string& expr) {
    CalleeParts parts;
    std::string current;
    size_t i = 0;
    while (i < expr.size()) {
        if (expr.compare(i, 2, "::") == 0) {
            parts.qualifiers.push_back(current);
            parts.qualified_by_scope = true;
            current.clear();
            i += 2;
            continue;
        }
        if (expr.compare(i, 2, "->") == 0) {
            parts.qualifiers.push_back(current);
            parts.attribute_access = true;
            current.clear();
            i += 2;
            continue;
        }
        if (expr[i] == '.') {
            parts.qualifiers.push_back(current);
            parts.attribute_access = true;
            current.clear();
            ++i;
            continue;
        }
        current += expr[i];
        ++i;
    }
    parts.name = current;
    return parts;
}

}  // namespace polycall
