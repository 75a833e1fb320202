#pragma once

#include <iosfwd>
#include <string>

#include "gcdeig/experiment.hpp"
#include "gcdeig/spectra.hpp"

namespace gcdeig::spectra {

// JSON documents store every number as a decimal string so exact values
// survive unchanged. Output is deterministic: fixed key order, no timestamps.
std::string to_json(const BoundReport& r);
std::string to_json(const ConvergenceReport& r);
std::string to_json(const Spectrum& s);
std::string to_json(const DivergenceEvidence& e);

// One row per n: n,value,residual,error
void write_csv(std::ostream& os, const ConvergenceReport& r);
// key,value rows
void write_csv(std::ostream& os, const BoundReport& r);
// One row per prime: i,p,partial_sum
void write_csv(std::ostream& os, const DivergenceEvidence& e);

}  // namespace gcdeig::spectra
