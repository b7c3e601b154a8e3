#pragma once

#include <string>

#include "fx/syntax.hpp"

namespace fx {

/// Parses a `.fx` source: operation and data declarations followed by one expression.
/// Direct-style expressions are let-normalised left to right.
Program parseProgram(const std::string& source);

/// Parses a bare expression against an existing signature.
CompPtr parseTerm(const std::string& source, const Signature& sig = {});

/// Prints terms in the surface syntax accepted by the parser. Binders are renamed
/// only when a name would otherwise be captured.
std::string print(const CompPtr& m);
std::string print(const ValuePtr& v);
std::string print(const Program& p);
/// Prints a closed value at a known type: lists as [..], booleans and data constructors by name.
std::string printAt(const ValuePtr& v, const TypePtr& type);

}  // namespace fx
