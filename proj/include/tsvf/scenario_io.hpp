#pragma once

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tsvf/ensemble.hpp"
#include "tsvf/hilbert.hpp"
#include "tsvf/pointer.hpp"
#include "tsvf/tsv.hpp"

// JSON scenario documents. Complex numbers are two-element [re, im] arrays;
// every failure carries the path of the offending field. The schema mirrors
// the domain types directly:
//
// {
//   "space":      {"dimension": 3, "labels": ["A", "B", "C"]},
//   "pre":        [[re, im], ...],
//   "post":       {"bra": [[re, im], ...]} | {"projector_basis": [[[re, im], ...], ...]},
//   "generalized":{"terms": [{"coeff": [re, im], "bra": [...], "ket": [...]}, ...]},
//   "observable": {"matrix": [[[re, im], ...], ...]} | {"builtin": "pauli_y"},
//   "device":     {"builtin": "shimony"} |
//                 {"device_dimension": n, "ready_index": i,
//                  "outcome_labels": [...], "unitary": [[[re, im], ...], ...]},
//   "coupling":   {"lambda": x, "delta": y},
//   "trials":     n, "seed": n
// }

namespace tsvf {

enum class SelectionKind { PreOnly, RankOne, Subspace, Generalized };

template <class Scalar>
struct ScenarioDocument {
  HilbertSpace space;
  std::optional<Ket<Scalar>> pre;
  std::optional<Bra<Scalar>> post_bra;
  std::optional<Operator<Scalar>> post_projector;
  std::optional<GeneralizedTSV<Scalar>> generalized;
  std::optional<Operator<Scalar>> observable;
  std::optional<UnitaryDevice<Scalar>> device;
  std::optional<Coupling<Scalar>> coupling;
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> seed;

  SelectionKind selection_kind() const {
    if (generalized.has_value()) return SelectionKind::Generalized;
    if (post_bra.has_value()) return SelectionKind::RankOne;
    if (post_projector.has_value()) return SelectionKind::Subspace;
    return SelectionKind::PreOnly;
  }

  Description<Scalar> description() const {
    switch (selection_kind()) {
      case SelectionKind::Generalized:
        return *generalized;
      case SelectionKind::RankOne:
        return TwoStateVector<Scalar>(*post_bra, *pre);
      case SelectionKind::PreOnly:
        return *pre;
      case SelectionKind::Subspace:
        break;
    }
    throw ValidationError(
        "a subspace post-selection has no two-state description; use the degenerate "
        "evaluators");
  }

  const Operator<Scalar>& require_observable() const {
    if (!observable.has_value())
      throw ValidationError("observable", "missing; give a matrix or a builtin name");
    return *observable;
  }

  Scenario<Scalar> scenario() const {
    if (!pre.has_value())
      throw ValidationError("pre", "the ensemble engine needs a pre-selected state");
    typename Scenario<Scalar>::Intermediate intermediate{};
    if (device.has_value())
      intermediate = *device;
    else if (observable.has_value())
      intermediate = eigendecompose(*observable);
    typename Scenario<Scalar>::Post post{};
    if (post_bra.has_value())
      post = *post_bra;
    else if (post_projector.has_value())
      post = *post_projector;
    return Scenario<Scalar>{space, *pre, std::move(intermediate), std::move(post)};
  }
};

template <class Scalar>
Operator<Scalar> builtin_observable(const std::string& name, const HilbertSpace& space) {
  if (name == "pauli_x") return pauli_x<Scalar>(space);
  if (name == "pauli_y") return pauli_y<Scalar>(space);
  if (name == "pauli_z") return pauli_z<Scalar>(space);
  if (name == "total_spin_squared") return total_spin_squared<Scalar>(space);
  if (name.rfind("projector:", 0) == 0) {
    const std::string label = name.substr(10);
    const auto index = space.index_of(label);
    if (!index.has_value())
      throw ValidationError("no basis label '" + label + "' in this space");
    return projector_onto<Scalar>({Ket<Scalar>::basis_state(space, *index)});
  }
  throw ValidationError("unknown builtin observable '" + name + "'");
}

namespace detail_io {

using json = nlohmann::json;

inline std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

inline const json& member(const json& j, const std::string& path, const std::string& key) {
  if (!j.is_object()) throw ParseError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(join(path, key), "missing required field");
  return *it;
}

inline const json* opt_member(const json& j, const std::string& path, const std::string& key) {
  if (!j.is_object()) throw ParseError(path, "expected an object");
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

template <class Scalar>
Scalar as_real(const json& j, const std::string& path) {
  if (!j.is_number()) throw ParseError(path, "expected a number");
  return static_cast<Scalar>(j.template get<double>());
}

inline std::uint64_t as_count(const json& j, const std::string& path) {
  if (!j.is_number_unsigned()) throw ParseError(path, "expected a nonnegative integer");
  return j.template get<std::uint64_t>();
}

inline int as_index(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ParseError(path, "expected an integer");
  return j.template get<int>();
}

template <class Scalar>
Complex<Scalar> as_complex(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2)
    throw ParseError(path, "expected a complex number as [re, im]");
  return Complex<Scalar>(as_real<Scalar>(j[0], path + "[0]"),
                         as_real<Scalar>(j[1], path + "[1]"));
}

template <class Scalar>
VectorX<Scalar> as_vector(const json& j, int dimension, const std::string& path) {
  if (!j.is_array()) throw ParseError(path, "expected an array of [re, im] pairs");
  if (static_cast<int>(j.size()) != dimension)
    throw ParseError(path, "expected " + std::to_string(dimension) + " entries, got " +
                               std::to_string(j.size()));
  VectorX<Scalar> v(dimension);
  for (int i = 0; i < dimension; ++i)
    v[i] = as_complex<Scalar>(j[static_cast<std::size_t>(i)],
                              path + "[" + std::to_string(i) + "]");
  return v;
}

template <class Scalar>
MatrixX<Scalar> as_matrix(const json& j, int dimension, const std::string& path) {
  if (!j.is_array() || static_cast<int>(j.size()) != dimension)
    throw ParseError(path, "expected " + std::to_string(dimension) + " rows");
  MatrixX<Scalar> m(dimension, dimension);
  for (int r = 0; r < dimension; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    const std::string row_path = path + "[" + std::to_string(r) + "]";
    if (!row.is_array() || static_cast<int>(row.size()) != dimension)
      throw ParseError(row_path, "expected " + std::to_string(dimension) + " entries");
    for (int c = 0; c < dimension; ++c)
      m(r, c) = as_complex<Scalar>(row[static_cast<std::size_t>(c)],
                                   row_path + "[" + std::to_string(c) + "]");
  }
  return m;
}

// Domain constructors validate; their complaints get the field path attached.
// Parse-level failures pass through untouched.
template <class F>
auto with_path(const std::string& path, F&& build) {
  try {
    return build();
  } catch (const ParseError&) {
    throw;
  } catch (const InputError& e) {
    throw ValidationError(path, e.detail());
  }
}

template <class Scalar>
json complex_to_json(const Complex<Scalar>& z) {
  return json::array({static_cast<double>(z.real()), static_cast<double>(z.imag())});
}

template <class Scalar>
json vector_to_json(const VectorX<Scalar>& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json<Scalar>(v[i]));
  return out;
}

template <class Scalar>
json matrix_to_json(const MatrixX<Scalar>& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json<Scalar>(m(r, c)));
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace detail_io

template <class Scalar>
ScenarioDocument<Scalar> parse_scenario(const std::string& text) {
  namespace io = detail_io;
  io::json root;
  try {
    root = io::json::parse(text);
  } catch (const io::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("top level must be an object");

  static const std::vector<std::string> known = {
      "space", "pre", "post", "generalized", "observable",
      "device", "coupling", "trials", "seed"};
  for (auto it = root.begin(); it != root.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw ParseError(it.key(), "unknown field");
  }

  ScenarioDocument<Scalar> doc;

  const io::json& space_json = io::member(root, "", "space");
  const int dimension =
      io::as_index(io::member(space_json, "space", "dimension"), "space.dimension");
  std::vector<std::string> labels;
  if (const io::json* labels_json = io::opt_member(space_json, "space", "labels")) {
    if (!labels_json->is_array()) throw ParseError("space.labels", "expected an array");
    for (std::size_t i = 0; i < labels_json->size(); ++i) {
      const io::json& label = (*labels_json)[i];
      if (!label.is_string())
        throw ParseError("space.labels[" + std::to_string(i) + "]", "expected a string");
      labels.push_back(label.template get<std::string>());
    }
  }
  doc.space = io::with_path("space", [&] { return HilbertSpace(dimension, labels); });

  const io::json* generalized_json = io::opt_member(root, "", "generalized");
  const io::json* pre_json = io::opt_member(root, "", "pre");
  const io::json* post_json = io::opt_member(root, "", "post");
  if (generalized_json != nullptr && (pre_json != nullptr || post_json != nullptr))
    throw ValidationError("generalized",
                          "a generalized description excludes separate pre/post fields");
  if (generalized_json == nullptr && pre_json == nullptr)
    throw ParseError("pre", "missing required field");

  if (pre_json != nullptr) {
    doc.pre = io::with_path("pre", [&] {
      return Ket<Scalar>(doc.space, io::as_vector<Scalar>(*pre_json, dimension, "pre"));
    });
  }

  if (post_json != nullptr) {
    const io::json* bra_json = io::opt_member(*post_json, "post", "bra");
    const io::json* basis_json = io::opt_member(*post_json, "post", "projector_basis");
    if ((bra_json != nullptr) == (basis_json != nullptr))
      throw ParseError("post", "give exactly one of 'bra' or 'projector_basis'");
    if (bra_json != nullptr) {
      doc.post_bra = io::with_path("post.bra", [&] {
        return Bra<Scalar>(doc.space, io::as_vector<Scalar>(*bra_json, dimension, "post.bra"));
      });
    } else {
      if (!basis_json->is_array() || basis_json->empty())
        throw ParseError("post.projector_basis", "expected a nonempty array of kets");
      std::vector<Ket<Scalar>> kets;
      for (std::size_t i = 0; i < basis_json->size(); ++i) {
        const std::string path = "post.projector_basis[" + std::to_string(i) + "]";
        kets.push_back(io::with_path(path, [&] {
          return Ket<Scalar>(doc.space,
                             io::as_vector<Scalar>((*basis_json)[i], dimension, path));
        }));
      }
      doc.post_projector =
          io::with_path("post.projector_basis", [&] { return projector_onto(kets); });
    }
  }

  if (generalized_json != nullptr) {
    const io::json& terms_json =
        io::member(*generalized_json, "generalized", "terms");
    if (!terms_json.is_array() || terms_json.empty())
      throw ParseError("generalized.terms", "expected a nonempty array");
    std::vector<GtsvTerm<Scalar>> terms;
    for (std::size_t i = 0; i < terms_json.size(); ++i) {
      const std::string path = "generalized.terms[" + std::to_string(i) + "]";
      const io::json& term = terms_json[i];
      const Complex<Scalar> coeff =
          io::as_complex<Scalar>(io::member(term, path, "coeff"), path + ".coeff");
      Bra<Scalar> bra = io::with_path(path + ".bra", [&] {
        return Bra<Scalar>(doc.space, io::as_vector<Scalar>(io::member(term, path, "bra"),
                                                            dimension, path + ".bra"));
      });
      Ket<Scalar> ket = io::with_path(path + ".ket", [&] {
        return Ket<Scalar>(doc.space, io::as_vector<Scalar>(io::member(term, path, "ket"),
                                                            dimension, path + ".ket"));
      });
      terms.push_back(GtsvTerm<Scalar>{coeff, std::move(bra), std::move(ket)});
    }
    doc.generalized = io::with_path("generalized", [&] {
      return GeneralizedTSV<Scalar>(std::move(terms));
    });
  }

  if (const io::json* obs_json = io::opt_member(root, "", "observable")) {
    const io::json* matrix_json = io::opt_member(*obs_json, "observable", "matrix");
    const io::json* builtin_json = io::opt_member(*obs_json, "observable", "builtin");
    if ((matrix_json != nullptr) == (builtin_json != nullptr))
      throw ParseError("observable", "give exactly one of 'matrix' or 'builtin'");
    if (matrix_json != nullptr) {
      doc.observable = io::with_path("observable.matrix", [&] {
        return Operator<Scalar>(
            doc.space, io::as_matrix<Scalar>(*matrix_json, dimension, "observable.matrix"));
      });
    } else {
      if (!builtin_json->is_string())
        throw ParseError("observable.builtin", "expected a string");
      doc.observable = io::with_path("observable.builtin", [&] {
        return builtin_observable<Scalar>(builtin_json->template get<std::string>(),
                                          doc.space);
      });
    }
  }

  if (const io::json* device_json = io::opt_member(root, "", "device")) {
    if (const io::json* builtin_json = io::opt_member(*device_json, "device", "builtin")) {
      if (!builtin_json->is_string() ||
          builtin_json->template get<std::string>() != "shimony")
        throw ParseError("device.builtin", "the only builtin device is 'shimony'");
      doc.device = shimony_unitary<Scalar>();
      if (doc.device->system_space().dimension() != dimension)
        throw ValidationError("device.builtin",
                              "the shimony device needs a dimension-4 system space");
    } else {
      const int device_dim = io::as_index(
          io::member(*device_json, "device", "device_dimension"), "device.device_dimension");
      const HilbertSpace device_space = io::with_path(
          "device.device_dimension", [&] { return HilbertSpace(device_dim); });
      const int ready = io::as_index(io::member(*device_json, "device", "ready_index"),
                                     "device.ready_index");
      const io::json& labels_json = io::member(*device_json, "device", "outcome_labels");
      if (!labels_json.is_array())
        throw ParseError("device.outcome_labels", "expected an array of strings");
      std::vector<std::string> outcome_labels;
      for (std::size_t i = 0; i < labels_json.size(); ++i) {
        if (!labels_json[i].is_string())
          throw ParseError("device.outcome_labels[" + std::to_string(i) + "]",
                           "expected a string");
        outcome_labels.push_back(labels_json[i].template get<std::string>());
      }
      const io::json& unitary_json = io::member(*device_json, "device", "unitary");
      doc.device = io::with_path("device.unitary", [&] {
        const HilbertSpace composite = tensor(doc.space, device_space);
        Operator<Scalar> u(composite, io::as_matrix<Scalar>(
                                          unitary_json, composite.dimension(), "device.unitary"));
        return UnitaryDevice<Scalar>(std::move(u), doc.space, device_space, ready,
                                     outcome_labels);
      });
    }
  }

  if (const io::json* coupling_json = io::opt_member(root, "", "coupling")) {
    const Scalar lambda = io::as_real<Scalar>(
        io::member(*coupling_json, "coupling", "lambda"), "coupling.lambda");
    const Scalar delta = io::as_real<Scalar>(io::member(*coupling_json, "coupling", "delta"),
                                             "coupling.delta");
    doc.coupling = io::with_path("coupling", [&] { return Coupling<Scalar>(lambda, delta); });
  }

  if (const io::json* trials_json = io::opt_member(root, "", "trials"))
    doc.trials = io::as_count(*trials_json, "trials");
  if (const io::json* seed_json = io::opt_member(root, "", "seed"))
    doc.seed = io::as_count(*seed_json, "seed");

  return doc;
}

template <class Scalar>
std::string serialize_scenario(const ScenarioDocument<Scalar>& doc) {
  namespace io = detail_io;
  io::json root;
  root["space"]["dimension"] = doc.space.dimension();
  if (doc.space.labeled()) root["space"]["labels"] = doc.space.basis_labels();
  if (doc.pre.has_value())
    root["pre"] = io::vector_to_json<Scalar>(doc.pre->amplitudes());
  if (doc.post_bra.has_value())
    root["post"]["bra"] = io::vector_to_json<Scalar>(doc.post_bra->components());
  else if (doc.post_projector.has_value()) {
    // Emit an orthonormal basis of the projected subspace.
    Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver(doc.post_projector->matrix());
    io::json basis = io::json::array();
    for (int k = 0; k < solver.eigenvalues().size(); ++k)
      if (solver.eigenvalues()[k] > Scalar(0.5))
        basis.push_back(io::vector_to_json<Scalar>(solver.eigenvectors().col(k).eval()));
    root["post"]["projector_basis"] = std::move(basis);
  }
  if (doc.generalized.has_value()) {
    io::json terms = io::json::array();
    for (const auto& term : doc.generalized->terms()) {
      io::json t;
      t["coeff"] = io::complex_to_json<Scalar>(term.coeff);
      t["bra"] = io::vector_to_json<Scalar>(term.bra.components());
      t["ket"] = io::vector_to_json<Scalar>(term.ket.amplitudes());
      terms.push_back(std::move(t));
    }
    root["generalized"]["terms"] = std::move(terms);
  }
  if (doc.observable.has_value())
    root["observable"]["matrix"] = io::matrix_to_json<Scalar>(doc.observable->matrix());
  if (doc.device.has_value()) {
    root["device"]["device_dimension"] = doc.device->device_space().dimension();
    root["device"]["ready_index"] = doc.device->ready_index();
    root["device"]["outcome_labels"] = doc.device->outcome_labels();
    root["device"]["unitary"] = io::matrix_to_json<Scalar>(doc.device->unitary().matrix());
  }
  if (doc.coupling.has_value()) {
    root["coupling"]["lambda"] = static_cast<double>(doc.coupling->strength);
    root["coupling"]["delta"] = static_cast<double>(doc.coupling->pointer_width);
  }
  if (doc.trials.has_value()) root["trials"] = *doc.trials;
  if (doc.seed.has_value()) root["seed"] = *doc.seed;
  return root.dump(2);
}

}  // namespace tsvf
