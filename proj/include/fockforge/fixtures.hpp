#pragma once

#include <string>
#include <vector>

#include "fockforge/zx.hpp"

namespace fockforge {

// Built-in generation schemes as ZX diagrams, ready for extract_scheme.
// Each name says what the scheme builds and from which seeds.
ZXDiagram fixture_diagram(const std::string& name);

// Catalogue order is stable; the CLI and the check matrix iterate it.
std::vector<std::string> fixture_names();

// (|0...0> + |1...1>) / sqrt(2) over 2^n entries, QubitString order.
std::vector<Complex> ghz_state_vector(int n);

// Cycle graph state on n vertices: CZ along every ring edge applied to
// |+>^n, so amplitude(b) = 2^(-n/2) * (-1)^(number of adjacent 1-pairs).
std::vector<Complex> ring_graph_state_vector(int n);

}  // namespace fockforge
