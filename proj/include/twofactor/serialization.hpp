// Copyright 2026 The twofactor Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <iosfwd>
#include <set>
#include <string>

#include "json.hpp"
#include "twofactor/certifier.hpp"
#include "twofactor/coupling.hpp"
#include "twofactor/ergodicity.hpp"
#include "twofactor/model.hpp"
#include "twofactor/path.hpp"
#include "twofactor/quadrature.hpp"

namespace twofactor {

using Json = nlohmann::ordered_json;

/// Strict reader of one JSON object: every field must be read exactly once
/// through the typed accessors, and finish() rejects the rest. Errors carry
/// the dotted field path.
class ObjectReader {
 public:
  ObjectReader(const Json& object, std::string where);

  bool has(const char* key) const;
  void number(const char* key, double& out, bool required = false);
  void integer(const char* key, std::int64_t& out, bool required = false);
  void unsigned_integer(const char* key, std::uint64_t& out, bool required = false);
  void boolean(const char* key, bool& out, bool required = false);
  void string(const char* key, std::string& out, bool required = false);
  void numbers(const char* key, std::vector<double>& out, bool required = false);
  /// Returns the nested value and marks it read; nullptr if absent.
  const Json* child(const char* key, bool required = false);
  std::string path(const char* key) const;
  void finish() const;

 private:
  const Json* find(const char* key, bool required);

  const Json& object_;
  std::string where_;
  std::set<std::string> seen_;
};

Json to_json(const ModelSpec& spec);
/// Parses and validates a model object; ValidationError is reported as a
/// ConfigError naming every offending field.
ModelSpec model_from_json(const Json& j, const std::string& where = "model");

Json to_json(const PathConfig& cfg);
PathConfig path_config_from_json(const Json& j, const std::string& where = "path");

Json to_json(const GridSpec& grid);
GridSpec grid_from_json(const Json& j, const std::string& where = "grid");

Json to_json(const QuadratureConfig& quad);
QuadratureConfig quadrature_from_json(const Json& j, const std::string& where = "quadrature");

Json to_json(const DriftCertificate& cert);
Json to_json(const PointMargin& point);
Json to_json(const CouplingStats& stats);
Json to_json(const DecayReport& rep);
Json to_json(const WassersteinReport& rep);
Json to_json(const MomentReport& rep);
Json to_json(const MarginalReport& rep);
Json to_json(const ContractionReport& rep);
Json to_json(const OrderReport& rep);

/// Sidecar of a coupled path CSV: T_Y (null if none), orientation, step
/// counts and branch-occupancy fractions.
Json coupled_sidecar(const CoupledPath& path);

/// `t,mean_V,ci_lo,ci_hi,mean_psi,bound` (bound empty without a certificate).
void write_decay_csv(std::ostream& out, const DecayReport& rep);
/// `t,coupling_bound,coupling_stderr,w1_y,w1_x`.
void write_wasserstein_csv(std::ostream& out, const WassersteinReport& rep);

}  // namespace twofactor
