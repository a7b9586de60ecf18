#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "excavsim/experiment.hpp"

namespace excavsim {

nlohmann::json to_json(const TrialResult& result);
nlohmann::json to_json(const ComparisonSummary& summary);

/// CSV with fixed columns t,id,x,y,theta.
std::string trajectories_csv(const TrialResult& result);
/// Decision events and contact onsets merged in time order:
/// t,robot,event,value,detail.
std::string events_csv(const TrialResult& result);
/// Mean and standard deviation of cumulative pellets per mode at every
/// sampling instant: t,<mode>_mean,<mode>_std,...
std::string pellets_timeseries_csv(const ComparisonSummary& summary);

/// Writes through a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// result.json, trajectories.csv and events.csv under `dir`.
void write_trial(const std::filesystem::path& dir, const TrialResult& result);

/// Every trial under <dir>/<mode>/seed_<seed>/, plus summary.json and
/// pellets_timeseries.csv.
void write_comparison(const std::filesystem::path& dir, const ComparisonSummary& summary);

}  // namespace excavsim
