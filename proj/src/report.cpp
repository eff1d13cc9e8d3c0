#include "bilinctl/report.hpp"

#include <map>

#include "bilinctl/errors.hpp"

#ifndef BILINCTL_VERSION
#define BILINCTL_VERSION "0.0.0"
#endif

namespace bilinctl {

using nlohmann::json;

const char* version() { return BILINCTL_VERSION; }

json to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out.push_back(v(i));
  }
  return out;
}

json to_json(const ControlSchedule& schedule) {
  json segments = json::array();
  for (const Segment& s : schedule.segments) {
    segments.push_back({{"index", s.index}, {"duration", s.duration}});
  }
  return {{"mode", schedule.mode == ScheduleMode::kAttainable ? "attainable" : "orbit"},
          {"segments", std::move(segments)}};
}

ControlSchedule schedule_from_json(const json& doc) {
  ControlSchedule schedule;
  const std::string mode = doc.value("mode", std::string("attainable"));
  if (mode == "attainable") {
    schedule.mode = ScheduleMode::kAttainable;
  } else if (mode == "orbit") {
    schedule.mode = ScheduleMode::kOrbit;
  } else {
    throw InvalidInput("unknown schedule mode '" + mode + "'");
  }
  for (const json& s : doc.at("segments")) {
    schedule.segments.push_back({s.at("index").get<int>(), s.at("duration").get<double>()});
  }
  return schedule;
}

json to_json(const CoverageReport& report) {
  return {{"n", report.n},
          {"angular_cells", report.grid.angular_cells},
          {"radial_bins", report.grid.radial_bins},
          {"r_min", report.grid.r_min},
          {"r_max", report.grid.r_max},
          {"antipodal_quotient", report.grid.antipodal_quotient},
          {"total_cells", report.total_cells},
          {"hit_cells", report.hit_cells},
          {"points", report.points},
          {"points_in_annulus", report.points_in_annulus},
          {"fraction", report.fraction}};
}

json to_json(const RankSearchResult& search) {
  return {{"min_sigma", search.min_sigma},
          {"sigma_max", search.sigma_max},
          {"argmin", to_json(search.argmin)},
          {"augmented", search.augmented},
          {"restart_minima", search.restart_minima},
          {"unconverged_restarts", search.unconverged_restarts}};
}

json to_json(const AngularReport& angular) {
  json out = {{"status", to_string(angular.status)},
              {"min_sigma", angular.min_sigma},
              {"sigma_max", angular.sigma_max}};
  if (angular.witness) {
    out["witness"] = to_json(*angular.witness);
    out["witness_rank"] = angular.witness_rank;
  }
  return out;
}

json to_json(const Certificate& certificate) {
  if (const auto* larc = std::get_if<LarcFailure>(&certificate)) {
    return {{"type", "LarcFailure"},
            {"x", to_json(larc->x)},
            {"dim", larc->dim},
            {"sigma_min", larc->sigma_min},
            {"sigma_max", larc->sigma_max}};
  }
  const auto& mono = std::get<MonotoneNormCertificate>(certificate);
  json eigen = json::array();
  for (const Vector& ev : mono.symmetric_eigenvalues) {
    eigen.push_back(to_json(ev));
  }
  return {{"type", "MonotoneNorm"},
          {"direction", to_string(mono.direction)},
          {"symmetric_eigenvalues", std::move(eigen)}};
}

json to_json(const Verdict& verdict) {
  json out;
  out["system"] = verdict.system;
  out["n"] = verdict.n;
  out["conclusion"] = to_string(verdict.conclusion);
  out["empirical"] = verdict.empirical;
  out["certificate"] = verdict.certificate ? to_json(*verdict.certificate) : json(nullptr);
  out["coverage"] = verdict.coverage ? to_json(*verdict.coverage) : json(nullptr);
  out["lie_dim"] = verdict.lie_dim;
  out["closure_converged"] = verdict.closure_converged;
  out["closure_depth"] = verdict.closure_depth;
  std::map<int, int> histogram;
  for (int d : verdict.orbit_dim_profile) {
    ++histogram[d];
  }
  json hist = json::object();
  for (const auto& [dim, count] : histogram) {
    hist[std::to_string(dim)] = count;
  }
  out["orbit_dim_profile"] = verdict.orbit_dim_profile;
  out["orbit_dim_histogram"] = std::move(hist);
  out["angular"] = to_json(verdict.angular);
  out["rank_search"] = verdict.rank_search ? to_json(*verdict.rank_search) : json(nullptr);
  out["discarded_samples"] = verdict.discarded_samples;
  out["diagnostics"] = verdict.diagnostics;
  return out;
}

json to_json(const ReachResult& reach) {
  return {{"hit", reach.hit},
          {"witness", reach.witness ? to_json(*reach.witness) : json(nullptr)},
          {"best_distance", reach.best_distance},
          {"schedules_tried", reach.schedules_tried}};
}

json to_json(const PhiConstancy& phi) {
  json rows = json::array();
  for (std::size_t k = 0; k < phi.values.size(); ++k) {
    rows.push_back({{"theta", to_json(phi.thetas[k])},
                    {"p_theta", to_json(phi.p_thetas[k])},
                    {"norm", phi.values[k]}});
  }
  return {{"mean", phi.mean},
          {"max_deviation", phi.max_deviation},
          {"constant", phi.constant},
          {"max_tangency_residual", phi.max_tangency_residual},
          {"max_leaf_drift", phi.max_leaf_drift},
          {"samples", std::move(rows)}};
}

json to_json(const ArcFamily& family) {
  return {{"arcs", family.arcs.size()},
          {"points_per_arc", family.arcs.empty() ? 0 : family.arcs.front().size()},
          {"phi_point", to_json(family.phi_point)},
          {"endpoint_mismatch", family.endpoint_mismatch},
          {"min_norm", family.min_norm},
          {"max_norm", family.max_norm},
          {"max_tangency_residual", family.max_tangency_residual},
          {"max_planarity_residual", family.max_planarity_residual},
          {"max_leaf_drift", family.max_leaf_drift},
          {"closed", family.closed}};
}

}  // namespace bilinctl
