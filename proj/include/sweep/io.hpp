#pragma once

#include "sweep/examples.hpp"

#include <json.hpp>
#include <ostream>
#include <string>

namespace sweep::io {

using Json = nlohmann::ordered_json;

/// %.17g formatting used by every CSV writer.
std::string number(double v);

/// Header t,x1..xn,u1..um,psi,xi.
void write_trajectory_csv(std::ostream& os, const Trajectory& tr);
/// Header t,p1..pn,xi,deta; deta on row i covers [t_i, t_{i+1}] (0 on the last row).
void write_adjoint_csv(std::ostream& os, const AdjointArc& arc);

Json to_json(const AssumptionReport& r);
Json to_json(const PenaltySchedule& s);
Json to_json(const FamilyReport& r);
Json to_json(const AdjointArc& arc);  // summary only
Json to_json(const MultiplierProfile& m);
Json to_json(const MPReport& r);
Json to_json(const examples::Example1Params& ep);
Json to_json(const examples::SwitchSearchResult& r);

/// Writes `text` to dir/name, creating dir. Throws Error on failure.
void write_file(const std::string& dir, const std::string& name, const std::string& text);

}  // namespace sweep::io
