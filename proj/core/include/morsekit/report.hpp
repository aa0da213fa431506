#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "morsekit/calculus.hpp"
#include "morsekit/chart.hpp"
#include "morsekit/morsifier.hpp"
#include "morsekit/options.hpp"
#include "morsekit/regions.hpp"
#include "morsekit/sard.hpp"
#include "morsekit/verification.hpp"

namespace morsekit {

/// Key order is insertion order so reports are byte-stable.
using Json = nlohmann::ordered_json;

Json to_json(const Vec& v);
Json to_json(const Mat& m);
Json to_json(const Tolerances& tol);
Json to_json(const CriticalPoint& cp);
Json to_json(const std::vector<CriticalPoint>& points);
Json to_json(const CoverAtlas& atlas);
Json to_json(const RegionDescriptor& region);
/// Regions, shrunken regions and cutoffs with their defining expressions.
Json to_json(const FineCover& cover);
Json to_json(const OpennessResult& result);
Json to_json(const PerturbationStep& step);
Json to_json(const MorsifyTrace& trace);
Json to_json(const SardEstimate& est);
Json to_json(const std::vector<SardRow>& table);
Json to_json(const OracleResult& oracle);
Json to_json(const AgreementReport& report);

/// Shortest round-trip decimal for a double ("inf", "-inf", "nan" for the
/// non-finite values).
std::string format_real(double v);

}  // namespace morsekit
