#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "netrecon/adapt.hpp"
#include "netrecon/basis.hpp"
#include "netrecon/dynamics.hpp"
#include "netrecon/recovery.hpp"
#include "netrecon/signal.hpp"
#include "netrecon/solvers.hpp"

namespace netrecon {

using Json = nlohmann::ordered_json;

/// Header `t,x1,...,xN` (or `t,theta1,...` for phase channels), 17
/// significant digits.
void write_series_csv(std::ostream& out, const MultivariateSeries& series);
MultivariateSeries read_series_csv(std::istream& in);

/// `t,theta1..thetaN,dtheta1..dthetaN`; t counts from the untrimmed start.
void write_phase_csv(std::ostream& out, const PhaseData& ph);

/// Plain numeric matrix, one row per line.
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m);

Json to_json(const ColumnDescriptor& d);
Json descriptors_to_json(const std::vector<ColumnDescriptor>& ds);
Json to_json(const LassoFit& fit, const std::vector<ColumnDescriptor>& ds);
Json to_json(const RecoveryReport& report);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace netrecon
