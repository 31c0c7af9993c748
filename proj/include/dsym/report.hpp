#pragma once

#include <optional>
#include <string>

#include "dsym/approx.hpp"
#include "dsym/carleson.hpp"
#include "dsym/classify.hpp"

namespace dsym {

inline constexpr const char* kToolName = "dsym";
inline constexpr const char* kToolVersion = "0.1.0";

/// Full machine-readable analysis result; round-trips through JSON and
/// rejects non-finite numerics on serialization.
struct AnalysisReport {
    std::string symbol_text;
    DirichletSymbol symbol;
    SymbolProfile profile;
    BoundaryScan scan;
    CompactnessVerdict verdict;
    std::optional<ExponentFit> carleson;
    std::optional<CompactnessIndex> regularity;
    std::uint64_t seed = 0;
};

std::string report_to_json(const AnalysisReport& rep);
void report_roundtrip_check(const std::string& json_text);  // throws on schema violations

std::string fit_to_csv(const ExponentFit& fit);
std::string witness_to_csv(const LatticeWitness& w);

}  // namespace dsym
