#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "phibound/canonical.hpp"
#include "phibound/montecarlo.hpp"
#include "phibound/norms.hpp"
#include "phibound/orlicz.hpp"
#include "phibound/randomized.hpp"
#include "phibound/types.hpp"

namespace phib {

enum class ReportFormat { json, csv, table };

ReportFormat parse_report_format(std::string_view text);

// JSON keeps full round-trip precision; csv and table print 12 significant digits.
std::string emit_report(const BoundReport& r, ReportFormat format);
std::string emit_report(const NvSolution& r, ReportFormat format);
std::string emit_report(const NormEstimate& r, ReportFormat format);
std::string emit_report(const CheckReport& r, ReportFormat format);
std::string emit_report(const ValidationReport& r, ReportFormat format);
std::string emit_report(const RandomizedCampaign& r, ReportFormat format);
std::string emit_report(const MarkovCheck& r, ReportFormat format);
std::string emit_report(const CampaignResult& r, ReportFormat format);
std::string emit_report(const Calibration& r, ReportFormat format);

/// Flat name/value report for calculators that produce a handful of numbers.
using Scalars = std::vector<std::pair<std::string, double>>;
std::string emit_scalars(const Scalars& values, ReportFormat format);

BoundReport bound_report_from_json(std::string_view text);
CampaignResult campaign_result_from_json(std::string_view text);
RandomizedCampaign randomized_campaign_from_json(std::string_view text);

/// %.12g
std::string format12(double v);

}  // namespace phib
