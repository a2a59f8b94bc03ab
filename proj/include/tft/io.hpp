#pragma once

#include <string>

#include "json.hpp"
#include "tft/semicont.hpp"
#include "tft/thompson.hpp"
#include "tft/trivalent.hpp"

namespace tft {

// Insertion-ordered JSON so emitted documents have a fixed key layout.
using Json = nlohmann::ordered_json;

// Complex numbers travel as [re, im]; a bare number is accepted on input.
Json complex_json(const Complex& z);
Complex complex_from_json(const Json& j);

// Dyadic m / 2^k as {"m": ..., "k": ...}.
Json dyadic_json(const Dyadic& x);
Dyadic dyadic_from_json(const Json& j);

// {"num": tree, "den": tree, "rot": n} with trees in the text grammar.
Json element_json(const GroupElement& a);
GroupElement element_from_json(const Json& j);

// {"circle": bool, "points": [[x, y], ...]} with dyadic coordinates.
// Parsing validates the breakpoint and slope conditions.
Json pl_json(const PLMap& f);
PLMap pl_from_json(const Json& j);

// {"tree": ..., "rot": ..., "amps": [[re, im], ...]}.
Json state_json(const LimitState& s);
LimitState state_from_json(const Json& j);

// {"boundary": n, "vertices": m, "circles": c, "edges": [[a, b], ...]}
// with strand ends in the numeric coding of Diagram::make: mark i is -1-i,
// port s of vertex v is 3*v+s.
Json diagram_json(const Diagram& d);
Diagram diagram_from_json(const Json& j);

// {"terms": [{"coeff": [re, im], "diagram": ...}, ...]}.
Json diagram_sum_json(const DiagramSum& s);
DiagramSum diagram_sum_from_json(const Json& j);

// Two-space indent, keys in insertion order, trailing newline: the same
// data always serializes to the same bytes.
std::string dump_stable(const Json& j);

// Reads and parses one JSON document; throws ParseError on missing files
// or malformed input.
Json load_json_file(const std::string& path);

} // namespace tft
