#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "brachiation/monte_carlo.hpp"
#include "brachiation/simulation.hpp"

namespace brachiation {

/// Round-trip-exact decimal form of a double ("nan" for NaN).
std::string format_double(double value);

inline constexpr const char* kEpisodeHeader =
    "t,theta1,theta2,z_g,dtheta1,dtheta2,dz_g,y,ydot,y_d,yd_dot,u,u_raw,s,s_delta,k_d,"
    "p_hat_ks,p_hat_bs,p_hat_kszs,F_c,F_d,V";
inline constexpr const char* kEventsHeader = "t,event";
inline constexpr const char* kCableHeader = "t,node_index,x,z";
inline constexpr const char* kAggregateHeader = "controller,rms_u,rmse_y,rmse_ydot,successes,runs";
inline constexpr const char* kRunsHeader =
    "run,theta1_deg,theta2_deg,controller,rms_u,rmse_y,rmse_ydot,final_y_error,success";
inline constexpr const char* kSwingsHeader =
    "swing,t_start,t_end,pivot_x,rmse_y,rmse_ydot,rms_u,final_y_error,grab,distance,tip_speed,"
    "grab_x,grab_z";

void write_episode_csv(const std::filesystem::path& path, const std::vector<LogRow>& rows);
void write_events_csv(const std::filesystem::path& path, const std::vector<Event>& events);
void write_cable_csv(const std::filesystem::path& path, const std::vector<CableFrame>& frames);
void write_aggregate_csv(const std::filesystem::path& path,
                         const std::array<AggregateRow, 2>& rows);
void write_runs_csv(const std::filesystem::path& path, const std::vector<MonteCarloRun>& runs);
void write_swings_csv(const std::filesystem::path& path, const std::vector<SwingSummary>& swings);

/// Readers throw ParseError with the line number on schema violations.
std::vector<LogRow> read_episode_csv(const std::filesystem::path& path);
std::vector<Event> read_events_csv(const std::filesystem::path& path);
std::vector<CableFrame> read_cable_csv(const std::filesystem::path& path);
std::array<AggregateRow, 2> read_aggregate_csv(const std::filesystem::path& path);

/// Rows plus events, with pause rows flagged from the pause markers.
EpisodeLog read_episode(const std::filesystem::path& csv, const std::filesystem::path& events);

}  // namespace brachiation
