#include "eoflab/state_file.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "eoflab/errors.hpp"

namespace eoflab {

namespace {

using nlohmann::json;

Cplx parse_entry(const json& v, const std::string& where) {
  if (v.is_number()) return Cplx(v.get<double>(), 0.0);
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return Cplx(v[0].get<double>(), v[1].get<double>());
  }
  throw ParseError(where + ": entries must be numbers or [re, im] pairs");
}

Mat parse_matrix(const json& rows, int dim, const std::string& where) {
  if (!rows.is_array() || static_cast<int>(rows.size()) != dim) {
    throw ParseError(where + ": expected " + std::to_string(dim) + " rows");
  }
  Mat m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != dim) {
      throw ParseError(where + ": row " + std::to_string(i) + " needs " +
                       std::to_string(dim) + " entries");
    }
    for (int j = 0; j < dim; ++j) {
      m(i, j) = parse_entry(row[static_cast<std::size_t>(j)],
                            where + "[" + std::to_string(i) + "][" +
                                std::to_string(j) + "]");
    }
  }
  return m;
}

DensityOperator validated_state(const Mat& m, const std::string& where) {
  double herm = la::hermiticity_error(m);
  if (herm > kHermTol) {
    throw ParseError(where + ": hermiticity violated, worst deviation " +
                     std::to_string(herm));
  }
  double tr = m.trace().real();
  if (std::abs(tr - 1.0) > kTraceTol) {
    throw ParseError(where + ": trace invariant violated, trace = " +
                     std::to_string(tr));
  }
  la::RVec ev = la::hermitian_eigenvalues(m);
  if (ev.size() && ev[0] < la::kEigFloor) {
    throw ParseError(where + ": positivity violated, lowest eigenvalue " +
                     std::to_string(ev[0]));
  }
  return DensityOperator(m);
}

}  // namespace

StateFile parse_state_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("state file must be a JSON object");
  if (!doc.contains("dims") || !doc["dims"].is_array() || doc["dims"].empty()) {
    throw ParseError("state file needs a nonempty dims array");
  }

  StateFile out;
  for (const json& d : doc["dims"]) {
    if (!d.is_number_integer() || d.get<int>() < 1) {
      throw ParseError("dims entries must be positive integers");
    }
    out.dims.push_back(d.get<int>());
  }
  int dim = out.total_dim();
  if (dim > kDefaultDimCap) {
    throw ParseError("total dimension " + std::to_string(dim) +
                     " exceeds cap " + std::to_string(kDefaultDimCap));
  }

  if (doc.contains("matrix")) {
    out.matrix = validated_state(parse_matrix(doc["matrix"], dim, "matrix"),
                                 "matrix");
  }

  if (doc.contains("kets")) {
    if (!doc["kets"].is_array()) throw ParseError("kets must be an array");
    int idx = 0;
    for (const json& kj : doc["kets"]) {
      std::string where = "kets[" + std::to_string(idx) + "]";
      if (!kj.is_array() || static_cast<int>(kj.size()) != dim) {
        throw ParseError(where + ": expected " + std::to_string(dim) +
                         " amplitudes");
      }
      Vec v(dim);
      for (int i = 0; i < dim; ++i) {
        v[i] = parse_entry(kj[static_cast<std::size_t>(i)],
                           where + "[" + std::to_string(i) + "]");
      }
      double n = v.norm();
      if (std::abs(n - 1.0) > kUnitNormTol) {
        throw ParseError(where + ": normalization violated, norm = " +
                         std::to_string(n));
      }
      out.kets.push_back(Ket(v));
      ++idx;
    }
  }

  if (doc.contains("ensemble")) {
    const json& ej = doc["ensemble"];
    if (!ej.is_object() || !ej.contains("probs") || !ej.contains("members")) {
      throw ParseError("ensemble block needs probs and members");
    }
    std::vector<double> probs;
    for (const json& p : ej["probs"]) {
      if (!p.is_number()) throw ParseError("ensemble probs must be numbers");
      probs.push_back(p.get<double>());
    }
    std::vector<DensityOperator> members;
    int idx = 0;
    for (const json& mj : ej["members"]) {
      std::string where = "ensemble.members[" + std::to_string(idx) + "]";
      members.push_back(validated_state(parse_matrix(mj, dim, where), where));
      ++idx;
    }
    try {
      out.ensemble = Ensemble::make(std::move(probs), std::move(members));
    } catch (const Error& e) {
      throw ParseError(std::string("ensemble: ") + e.what());
    }
  }

  if (!out.matrix && out.kets.empty() && !out.ensemble) {
    throw ParseError("state file carries no matrix, kets, or ensemble");
  }
  return out;
}

StateFile parse_state_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open state file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_state_text(buf.str());
}

}  // namespace eoflab
