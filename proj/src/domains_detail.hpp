#pragma once

#include <functional>
#include <optional>
#include <set>

#include "tmpidan/domains.hpp"
#include "tmpidan/obstacles.hpp"

namespace tmpidan::detail {

ObstacleHeuristicParams heuristic_params(const RunContext& ctx);

const ArmModel* arm_holding(const WorkspaceSnapshot& ws, const std::string& robot,
                            const std::string& object);

Grounding trivial_grounding();

std::vector<Grounding> grasp_groundings(const RunContext& ctx, const std::string& object,
                                        std::vector<std::string> excludes, bool rearranges);

std::optional<Vec2> handover_point(const WorkspaceSnapshot& ws, const RobotModel& r,
                                   const ArmModel& from, const ArmModel& to);

bool point_clear_for_radius(const WorkspaceSnapshot& ws, const Vec2& p, double radius);

bool within_reach(const WorkspaceSnapshot& ws, const RobotModel& r, const ArmModel& a,
                  const Vec2& p);

}  // namespace tmpidan::detail
