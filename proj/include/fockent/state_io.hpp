// Self-describing JSON state files: statistics, the ordered mode list, the
// bosonic occupation cap, and complex amplitude terms over occupation
// patterns. The loader normalizes and reports the stored norm.
#pragma once

#include <string>

#include "fockent/fock.hpp"

namespace fockent {

// A parsed state document. `original_norm` is the norm of the amplitudes as
// stored in the file; `state` is already normalized.
struct LoadedState {
    QuantumState state;
    double original_norm;
};

// Parses a state document. Document shape:
//   {
//     "statistics": "fermion" | "boson",
//     "modes": [{"site": "A", "spin": "up", "arm": "L"}, ...],
//     "nmax": 4,                      // bosons only; rejected for fermions
//     "terms": [{"occupations": [1, 0, ...], "re": 0.5, "im": 0.0}, ...]
//   }
// `spin` defaults to "none" and `arm` to absent. Each occupation list follows
// the order of the document's mode list (which need not be canonical).
// Throws std::invalid_argument on malformed documents and std::runtime_error
// when the stored amplitudes have zero norm.
LoadedState parse_state_text(const std::string& text);
LoadedState load_state_file(const std::string& path);

// Serializes a state as a document that parse_state_text round-trips
// exactly. Modes are written in canonical order, amplitudes at full
// precision.
std::string state_to_text(const QuantumState& s);
void save_state_file(const QuantumState& s, const std::string& path);

}  // namespace fockent
