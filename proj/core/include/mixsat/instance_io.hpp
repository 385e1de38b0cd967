#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mixsat/ensemble.hpp"

namespace mixsat {

inline constexpr int kInstanceFormatVersion = 1;

/// Instance documents are JSON:
///
///   {
///     "format_version": 1,
///     "n_qubits": N,
///     "params": {"n_qubits", "clause_density", "quantum_fraction",
///                "graph_model", "seed"}  |  "handcrafted",
///     "seed": master seed,
///     "clauses": [
///       {"i": 0, "j": 3, "kind": "classical", "forbidden": [b_i, b_j]},
///       {"i": 1, "j": 2, "kind": "quantum",
///        "ray_re": [4 numbers], "ray_im": [4 numbers]}
///     ],
///     "clause_streams": [pair index per clause]   (optional)
///   }
///
/// Ray amplitudes use the |b_i b_j> order with b_i major and are written
/// with 17 significant digits, so a read/write cycle is bit-exact.
class FormatError : public std::runtime_error {
 public:
  enum class Kind { Malformed, VersionMismatch, InvariantViolation };
  FormatError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

void write_instance(const Instance& instance, std::ostream& out);
Instance read_instance(std::istream& in);

std::string instance_to_string(const Instance& instance);
Instance instance_from_string(const std::string& text);

void save_instance(const Instance& instance, const std::filesystem::path& path);
Instance load_instance(const std::filesystem::path& path);

/// Product-state witness documents:
///   {"format_version": 1, "n_qubits": N,
///    "states": [{"site": s, "ray_re": [2], "ray_im": [2]}, ...]}
void write_product_state(std::span<const Ray2> states, std::ostream& out);
std::vector<Ray2> read_product_state(std::istream& in);

}  // namespace mixsat
