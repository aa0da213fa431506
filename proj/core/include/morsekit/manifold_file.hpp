#pragma once

#include <optional>
#include <string>

#include "morsekit/manifold.hpp"

namespace morsekit {

/// Contents of a manifold definition file.
///
///     # comments start with '#'
///     name = circle
///     ambient_dim = 2
///     intrinsic_dim = 1
///     constraint = x1^2 + x2^2 - 1      (one line per constraint, in order)
///     domain = [-1.5, 1.5] x [-1.5, 1.5]
///     regularity_tol = 1e-6             (optional)
///     projection_tol = 1e-10            (optional)
///     oracle = circle                   (optional: circle, sphere or torus(R, r, axis))
///     euler_characteristic = 0          (optional)
struct ManifoldDefinition {
  ImplicitManifold manifold;
  std::string oracle;
  std::optional<int> euler_characteristic;
};

/// Throws ParseError with the line and column of the offending token.
ManifoldDefinition parse_manifold_definition(const std::string& text);
ManifoldDefinition load_manifold_definition(const std::string& path);

/// Canonical text. Parsing it back gives structurally identical constraints
/// and bit-identical numbers.
std::string format_manifold_definition(const ManifoldDefinition& def);

}  // namespace morsekit
