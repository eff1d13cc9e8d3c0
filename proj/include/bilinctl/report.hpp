#pragma once

#include <string>

#include <json.hpp>

#include "bilinctl/analysis.hpp"
#include "bilinctl/foliation.hpp"
#include "bilinctl/reach.hpp"

namespace bilinctl {

/// Version string written into every report's environment stanza.
const char* version();

nlohmann::json to_json(const Vector& v);
nlohmann::json to_json(const ControlSchedule& schedule);
/// Summary without the per-cell hit list.
nlohmann::json to_json(const CoverageReport& report);
nlohmann::json to_json(const RankSearchResult& search);
nlohmann::json to_json(const AngularReport& angular);
nlohmann::json to_json(const Certificate& certificate);
nlohmann::json to_json(const Verdict& verdict);
nlohmann::json to_json(const ReachResult& reach);
nlohmann::json to_json(const PhiConstancy& phi);
/// Summary without the arc samples.
nlohmann::json to_json(const ArcFamily& family);

ControlSchedule schedule_from_json(const nlohmann::json& doc);

}  // namespace bilinctl
