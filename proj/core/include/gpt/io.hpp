#pragma once

#include <string>

#include "gpt/instrument.hpp"
#include "gpt/models.hpp"
#include "gpt/space.hpp"
#include "gpt/thermo.hpp"

namespace gpt::io {

/// Wire format notes: numbers are written as decimal strings with up to 17
/// significant digits; readers also accept plain JSON numbers and exact
/// rational strings like "1/3". Matrices serialize entrywise as [re, im]
/// pairs. Parse failures raise std::invalid_argument.

std::string space_to_json(const StateSpace& space);
SpacePtr space_from_json(const std::string& text);

std::string instrument_to_json(const GenericInstrument& instr);
std::string instrument_to_json(const MPPInstrument& instr);
GenericInstrument instrument_from_json(const std::string& text, const SpacePtr& space);

std::string fixture_to_json(const OmegaBarFixture& fixture);

std::string cycle_report_to_json(const CycleReport& report);
std::string decomposition_set_to_json(const DecompositionSet& set);

/// "0.5", "5e-1", "1/3" (exact rational), or a JSON number literal.
double parse_number_text(const std::string& text);
std::string format_number(double value);

}  // namespace gpt::io
