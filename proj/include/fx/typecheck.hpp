#pragma once

#include <map>

#include "fx/persistent.hpp"
#include "fx/syntax.hpp"

namespace fx {

/// Variable types keyed by binder id; a later insert for the same binder shadows.
using TypeEnv = PersistentMap<std::uint32_t, TypePtr>;

/// Types closed-over-env terms by unification. Annotations are optional; type
/// variables left unconstrained default to Unit. Throws TypeError.
TypePtr typecheck(const TypeEnv& env, const CompPtr& term, const Signature& sig);
TypePtr typecheckValue(const TypeEnv& env, const ValuePtr& value, const Signature& sig);
TypePtr typecheck(const Program& program);

/// Runtime terms may mention locations; each location's type is inferred from
/// its uses and from the stored value.
TypePtr typecheckRuntime(const CompPtr& term, const Signature& sig, const std::map<std::uint64_t, ValuePtr>& store);

/// Structural type equality up to unfolding of lists and named data types.
bool sameType(const TypePtr& a, const TypePtr& b);

}  // namespace fx
