#include "polycall/ffi_resolve.hpp"

#include <algorithm>
#include <map>

#include "polycall/csv.hpp"
#include "polycall/def_index.hpp"
#include "polycall/reaching_defs.hpp"

namespace polycall {

namespace {

// "&ns::f" / "ns::f" / "f" -> qualifiers + name
CalleeParts target_parts(const std::string& text) {
    std::string t = text;
    if (!t.empty() && t[0] == '&') t = t.substr(1);
    size_t b = 0, e = t.size();
    while (b < e && (t[b] == ' ' || t[b] == '\t')) ++b;
    while (e > b && (t[e - 1] == ' ' || t[e - 1] == '\t')) --e;
    return split_callee(t.substr(b, e - b));
}

}  // namespace

std::vector<BindingRecord> resolve_bindings(const std::vector<RawBinding>& raw,
                                            const std::vector<AssignRecord>& assigns,
                                            const std::vector<FunctionDef>& defs) {
    DefIndex index(defs);
    std::vector<BindingRecord> out;
    out.reserve(raw.size());
    for (const auto& rb : raw) {
        BindingRecord rec;
        rec.module = rb.module;
        rec.unit = rb.unit;
        rec.line = rb.line;

        UseSite use{rb.unit, rb.line, module_block_scope(rb.module)};
        std::vector<AssignRecord> unit_assigns;
        for (const auto& a : assigns) {
            if (a.unit == rb.unit) unit_assigns.push_back(a);
        }
        Resolution exposed = resolve_string_arg(rb.exposed_arg, use, unit_assigns);
        bool exposed_ok = exposed.status == ResolutionStatus::Resolved;
        rec.exposed_name = exposed_ok ? exposed.value : kUnresolved;

        switch (rb.target_arg.form) {
            case ArgForm::FunctionRef: {
                CalleeParts parts = target_parts(rb.target_arg.text);
                auto target = index.resolve_target(parts.name, parts.qualifiers, rb.unit);
                if (target.has_value() && exposed_ok) {
                    rec.target_fqn = *target;
                    rec.status = BindingStatus::Resolved;
                } else {
                    rec.target_fqn = target.value_or(kUnresolved);
                    rec.status = BindingStatus::Unresolved;
                }
                break;
            }
            case ArgForm::Lambda: {
                auto anon = index.resolve_anonymous(rb.unit, rb.line);
                if (anon.has_value()) {
                    rec.target_fqn = *anon;
                    rec.status = exposed_ok ? BindingStatus::Anonymous
                                            : BindingStatus::Unresolved;
                } else {
                    rec.target_fqn = kUnresolved;
                    rec.status = BindingStatus::Unresolved;
                }
                break;
            }
            default:
                rec.target_fqn = kUnresolved;
                rec.status = BindingStatus::Unresolved;
                break;
        }
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<ResolvedCall> rewrite_calls(const std::vector<CallSite>& calls,
                                        const std::vector<ImportRecord>& imports,
                                        const std::vector<BindingRecord>& bindings) {
    // alias tables per unit: alias -> module, member alias -> (module, name)
    std::map<std::pair<std::string, std::string>, std::string> alias_to_module;
    std::map<std::pair<std::string, std::string>, std::pair<std::string, std::string>>
        member_alias;
    for (const auto& imp : imports) {
        if (imp.member.empty()) {
            alias_to_module[{imp.unit, imp.alias}] = imp.imported_name;
        } else {
            member_alias[{imp.unit, imp.alias}] = {imp.imported_name, imp.member};
        }
    }

    std::map<std::string, std::vector<const BindingRecord*>> module_bindings;
    for (const auto& b : bindings) module_bindings[b.module].push_back(&b);

    auto rewrite_against = [&](ResolvedCall& out, const std::string& module,
                               const std::string& exposed) {
        auto it = module_bindings.find(module);
        if (it == module_bindings.end()) return;  // not a bound module
        std::vector<std::string> targets;
        bool any_anonymous = false;
        for (const BindingRecord* b : it->second) {
            if (b->exposed_name != exposed) continue;
            if (b->status == BindingStatus::Resolved) {
                targets.push_back(b->target_fqn);
            } else if (b->status == BindingStatus::Anonymous) {
                targets.push_back(b->target_fqn);
                any_anonymous = true;
            }
        }
        if (!targets.empty()) {
            std::sort(targets.begin(), targets.end());
            targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
            std::string joined;
            for (const auto& t : targets) joined += (joined.empty() ? "" : ";") + t;
            out.cross_language = true;
            out.resolved_callee = joined;
            if (any_anonymous) out.flag = kFlagAnonymousTarget;
            return;
        }
        // a call into a bound module with no resolvable exposed name
        out.cross_language = false;
        out.resolved_callee = kUnresolved;
        out.flag = kFlagUnresolvedCross;
    };

    std::vector<ResolvedCall> out;
    out.reserve(calls.size());
    for (const auto& call : calls) {
        ResolvedCall rc;
        rc.call = call;
        rc.cross_language = false;
        if (call.language != Lang::Python) {
            out.push_back(std::move(rc));
            continue;
        }
        size_t dot = call.callee_expr.find('.');
        if (dot != std::string::npos && call.callee_expr.find('.', dot + 1) == std::string::npos) {
            std::string receiver = call.callee_expr.substr(0, dot);
            std::string attr = call.callee_expr.substr(dot + 1);
            auto alias_it = alias_to_module.find({call.unit, receiver});
            if (alias_it != alias_to_module.end()) {
                rewrite_against(rc, alias_it->second, attr);
            }
        } else if (dot == std::string::npos) {
            auto member_it = member_alias.find({call.unit, call.callee_expr});
            if (member_it != member_alias.end()) {
                rewrite_against(rc, member_it->second.first, member_it->second.second);
            }
        }
        out.push_back(std::move(rc));
    }
    return out;
}

ResolvedTables resolve_tables(const IrTables& ir) {
    ResolvedTables out;
    out.bindings = resolve_bindings(ir.raw_bindings, ir.assigns, ir.defs);
    out.calls = rewrite_calls(ir.calls, ir.imports, out.bindings);
    csv::canonical_sort(out.bindings);
    csv::canonical_sort(out.calls);
    return out;
}

}  // namespace polycall
