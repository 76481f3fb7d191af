#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "poolmech/dist.hpp"
#include "poolmech/majorization.hpp"
#include "poolmech/mechanism.hpp"
#include "poolmech/oracle.hpp"
#include "poolmech/solve.hpp"
#include "poolmech/solve_endo.hpp"
#include "poolmech/solve_exo.hpp"

namespace poolmech {

inline constexpr int kSchemaVersion = 1;

/// Malformed document; `path` names the offending field ("values.exponent").
class FormatError : public std::runtime_error {
 public:
  FormatError(std::string path, const std::string& message)
      : std::runtime_error(path.empty() ? message : path + ": " + message),
        path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

nlohmann::json to_json(const Dist& d);
Dist dist_from_json(const nlohmann::json& j, const std::string& path);

nlohmann::json to_json(const QuantilePartition& p);
QuantilePartition partition_from_json(const nlohmann::json& j,
                                      const std::string& path);

nlohmann::json to_json(const Mechanism& m);
Mechanism mechanism_from_json(const nlohmann::json& j);

nlohmann::json to_json(const VerifyReport& r);
nlohmann::json to_json(const SolveReport& r);
nlohmann::json to_json(const OracleResult& r, std::size_t n);
nlohmann::json to_json(const EtaThresholds& t);
nlohmann::json to_json(const DisclosureTest& t);

/// Columns t, F^-1, G^-1, Q^-1, R^-1 on a 1e-3 quantile grid; the quality
/// columns are empty without an exogenous quality distribution.
void write_trace_csv(std::ostream& os, const Mechanism& m, const Dist& f,
                     const Dist* q);
void write_recommendations_csv(std::ostream& os, const Mechanism& m, const Dist& f);
void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows);
void write_oracle_table_csv(std::ostream& os, const OracleResult& r);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double x);

}  // namespace poolmech
