#pragma once

#include <nlohmann/json.hpp>

#include "latinhib/channel1d.hpp"
#include "latinhib/kinetics.hpp"
#include "latinhib/patterning.hpp"
#include "latinhib/simulate.hpp"
#include "latinhib/sweep.hpp"

namespace latinhib {

/// Version stamped into every JSON document the tools write.
inline constexpr int schema_version = 1;

nlohmann::json to_json(const ParameterSet& p);
nlohmann::json to_json(const FixedPoint& fp);
nlohmann::json to_json(const FixedPointReport& r, const Classification& c);
nlohmann::json to_json(const SweepCell& c);
nlohmann::json to_json(const SweepGrid& g);
nlohmann::json to_json(const QuotientEigenReport& r);
nlohmann::json to_json(const Observables& o);
nlohmann::json to_json(const ComparisonReport& r);
nlohmann::json to_json(const IntegrationStats& s);

/// {"schema_version": N, "kind": kind} merged with `body`.
nlohmann::json envelope(const char* kind, nlohmann::json body);

}  // namespace latinhib
