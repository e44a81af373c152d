#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "vdo/csv.hpp"
#include "vdo/datasets.hpp"

namespace vdo {

// Column layout of the sulfur recovery unit dataset: five scaled process
// signals and two scaled tail-gas concentrations.
inline const std::vector<std::string> kSruSignals = {"x1", "x2", "x3", "x4", "x5"};
inline const std::vector<std::string> kSruColumns = {"x1", "x2", "x3", "x4",
                                                     "x5", "y1", "y2"};
inline const std::vector<int> kSruLags = {0, 5, 7, 9};

LagSpec sru_lag_spec();

// Historic operating point used for the open-loop control step, by signal
// then lag {0,5,7,9}; the x3 entry at lag 0 is the free control variable.
inline constexpr std::array<std::array<double, 4>, 5> kSruOperatingPoint = {{
    {0.627, 0.6215, 0.623, 0.622},
    {0.770, 0.769, 0.754, 0.769},
    {0.0, 0.174, 0.192, 0.198},  // x3 at lag 0 is the decision variable
    {0.376, 0.399, 0.415, 0.410},
    {0.513, 0.512, 0.511, 0.504},
}};

struct SruSeriesSpec {
    std::size_t n_rows = 10000;
    std::uint64_t seed = 11;
};

// Synthetic stand-in with the schema, size and scaling of the plant data:
// mean-reverting signal walks around the historic operating levels, and
// concentrations driven mainly by the secondary air flow so that the
// stoichiometric balance y1 - 2*y2 crosses zero inside the visited x3 range.
Table generate_sru_like_series(const SruSeriesSpec& spec);

}  // namespace vdo
