#include "mixsat/instance_io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"

namespace mixsat {

namespace {

using nlohmann::json;

std::string num(double x) { return fmt::format("{:.17g}", x); }

template <std::size_t Dim>
std::string amplitude_arrays(const Ray<Dim>& ray) {
  std::string re = "[", im = "[";
  for (std::size_t k = 0; k < Dim; ++k) {
    if (k) {
      re += ", ";
      im += ", ";
    }
    re += num(ray[k].real());
    im += num(ray[k].imag());
  }
  return fmt::format("\"ray_re\": {}], \"ray_im\": {}]", re, im);
}

[[noreturn]] void malformed(const std::string& what) {
  throw FormatError(FormatError::Kind::Malformed, "malformed document: " + what);
}

const json& field(const json& obj, const char* key) {
  if (!obj.is_object()) malformed("expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) malformed(fmt::format("missing field '{}'", key));
  return *it;
}

template <typename T>
T number(const json& obj, const char* key) {
  const json& v = field(obj, key);
  if (!v.is_number()) malformed(fmt::format("field '{}' must be a number", key));
  if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer() || (std::is_unsigned_v<T> && v.is_number_integer() && !v.is_number_unsigned()))
      malformed(fmt::format("field '{}' must be a non-negative integer", key));
  }
  return v.get<T>();
}

template <std::size_t Dim>
std::array<cplx, Dim> amplitudes(const json& obj) {
  const json& re = field(obj, "ray_re");
  const json& im = field(obj, "ray_im");
  if (!re.is_array() || !im.is_array() || re.size() != Dim || im.size() != Dim)
    malformed(fmt::format("ray_re/ray_im must hold {} numbers", Dim));
  std::array<cplx, Dim> v;
  for (std::size_t k = 0; k < Dim; ++k) {
    if (!re[k].is_number() || !im[k].is_number()) malformed("ray amplitudes must be numbers");
    v[k] = cplx(re[k].get<double>(), im[k].get<double>());
  }
  return v;
}

void check_version(const json& doc) {
  const int version = number<int>(doc, "format_version");
  if (version != kInstanceFormatVersion)
    throw FormatError(FormatError::Kind::VersionMismatch,
                      fmt::format("format_version {} is not supported (expected {})", version,
                                  kInstanceFormatVersion));
}

json parse(std::istream& in) {
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    malformed(e.what());
  }
}

}  // namespace

void write_instance(const Instance& instance, std::ostream& out) {
  out << "{\n";
  out << fmt::format("  \"format_version\": {},\n", kInstanceFormatVersion);
  out << fmt::format("  \"n_qubits\": {},\n", instance.n_qubits());
  if (const auto& p = instance.provenance()) {
    out << fmt::format(
        "  \"params\": {{\"n_qubits\": {}, \"clause_density\": {}, \"quantum_fraction\": {}, "
        "\"graph_model\": \"{}\", \"seed\": {}}},\n",
        p->n_qubits, num(p->clause_density), num(p->quantum_fraction), to_string(p->graph_model), p->seed);
  } else {
    out << "  \"params\": \"handcrafted\",\n";
  }
  out << fmt::format("  \"seed\": {},\n", instance.lineage().master_seed);
  out << "  \"clauses\": [";
  const auto& clauses = instance.clauses();
  for (std::size_t k = 0; k < clauses.size(); ++k) {
    const Clause& c = clauses[k];
    out << (k ? ",\n    " : "\n    ");
    if (c.is_quantum()) {
      out << fmt::format("{{\"i\": {}, \"j\": {}, \"kind\": \"quantum\", {}}}", c.i, c.j,
                         amplitude_arrays(std::get<QuantumPayload>(c.payload).ray));
    } else {
      const auto& f = c.classical_payload();
      out << fmt::format("{{\"i\": {}, \"j\": {}, \"kind\": \"classical\", \"forbidden\": [{}, {}]}}", c.i,
                         c.j, f.bit_i, f.bit_j);
    }
  }
  out << (clauses.empty() ? "]" : "\n  ]");
  if (!instance.lineage().clause_streams.empty()) {
    out << ",\n  \"clause_streams\": [";
    const auto& streams = instance.lineage().clause_streams;
    for (std::size_t k = 0; k < streams.size(); ++k) out << (k ? ", " : "") << streams[k];
    out << "]";
  }
  out << "\n}\n";
}

Instance read_instance(std::istream& in) {
  const json doc = parse(in);
  check_version(doc);
  const auto n = number<std::uint32_t>(doc, "n_qubits");

  std::optional<EnsembleParams> provenance;
  const json& params = field(doc, "params");
  if (params.is_string()) {
    if (params.get<std::string>() != "handcrafted") malformed("params must be an object or \"handcrafted\"");
  } else {
    EnsembleParams p;
    p.n_qubits = number<std::uint32_t>(params, "n_qubits");
    p.clause_density = number<double>(params, "clause_density");
    p.quantum_fraction = number<double>(params, "quantum_fraction");
    const json& model = field(params, "graph_model");
    if (!model.is_string()) malformed("graph_model must be a string");
    try {
      p.graph_model = graph_model_from_string(model.get<std::string>());
    } catch (const EnsembleError& e) {
      malformed(e.what());
    }
    p.seed = number<std::uint64_t>(params, "seed");
    provenance = p;
  }

  RngLineage lineage;
  lineage.master_seed = number<std::uint64_t>(doc, "seed");

  const json& list = field(doc, "clauses");
  if (!list.is_array()) malformed("clauses must be an array");
  std::vector<Clause> clauses;
  clauses.reserve(list.size());
  try {
    for (const json& c : list) {
      const auto i = number<Site>(c, "i");
      const auto j = number<Site>(c, "j");
      const json& kind = field(c, "kind");
      if (!kind.is_string()) malformed("clause kind must be a string");
      ClausePayload payload;
      if (kind == "classical") {
        const json& f = field(c, "forbidden");
        if (!f.is_array() || f.size() != 2 || !f[0].is_number_unsigned() || !f[1].is_number_unsigned())
          malformed("forbidden must be a pair of bits");
        const auto bi = f[0].get<unsigned>(), bj = f[1].get<unsigned>();
        if (bi > 1 || bj > 1)
          throw InstanceError(fmt::format("forbidden bits on edge {{{}, {}}} must be 0 or 1", i, j));
        payload = ClassicalPayload{static_cast<std::uint8_t>(bi), static_cast<std::uint8_t>(bj)};
      } else if (kind == "quantum") {
        try {
          payload = QuantumPayload{Ray4::from_canonical(amplitudes<4>(c))};
        } catch (const RayError& e) {
          throw InstanceError(fmt::format("{} on edge {{{}, {}}}", e.what(), i, j));
        }
      } else {
        malformed("clause kind must be \"classical\" or \"quantum\"");
      }
      clauses.push_back(Clause{i, j, std::move(payload)});
    }
    if (const auto it = doc.find("clause_streams"); it != doc.end()) {
      if (!it->is_array()) malformed("clause_streams must be an array");
      for (const json& s : *it) {
        if (!s.is_number_unsigned()) malformed("clause_streams entries must be non-negative integers");
        lineage.clause_streams.push_back(s.get<std::uint64_t>());
      }
    }
    return Instance(n, std::move(clauses), provenance, std::move(lineage));
  } catch (const InstanceError& e) {
    throw FormatError(FormatError::Kind::InvariantViolation, e.what());
  }
}

std::string instance_to_string(const Instance& instance) {
  std::ostringstream out;
  write_instance(instance, out);
  return out.str();
}

Instance instance_from_string(const std::string& text) {
  std::istringstream in(text);
  return read_instance(in);
}

void save_instance(const Instance& instance, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot open '{}' for writing", path.string()));
  write_instance(instance, out);
  if (!out) throw std::runtime_error(fmt::format("failed writing '{}'", path.string()));
}

Instance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
  return read_instance(in);
}

void write_product_state(std::span<const Ray2> states, std::ostream& out) {
  out << "{\n";
  out << fmt::format("  \"format_version\": {},\n", kInstanceFormatVersion);
  out << fmt::format("  \"n_qubits\": {},\n", states.size());
  out << "  \"states\": [";
  for (std::size_t s = 0; s < states.size(); ++s) {
    out << (s ? ",\n    " : "\n    ");
    out << fmt::format("{{\"site\": {}, {}}}", s, amplitude_arrays(states[s]));
  }
  out << (states.empty() ? "]" : "\n  ]") << "\n}\n";
}

std::vector<Ray2> read_product_state(std::istream& in) {
  const json doc = parse(in);
  check_version(doc);
  const auto n = number<std::uint32_t>(doc, "n_qubits");
  const json& list = field(doc, "states");
  if (!list.is_array() || list.size() != n) malformed("states must list one ray per qubit");
  std::vector<Ray2> states(n);
  std::vector<bool> seen(n, false);
  for (const json& entry : list) {
    const auto site = number<std::uint32_t>(entry, "site");
    if (site >= n || seen[site]) malformed("state sites must be a permutation of [0, n_qubits)");
    seen[site] = true;
    try {
      states[site] = Ray2::from_canonical(amplitudes<2>(entry));
    } catch (const RayError& e) {
      throw FormatError(FormatError::Kind::InvariantViolation, fmt::format("{} at site {}", e.what(), site));
    }
  }
  return states;
}

}  // namespace mixsat
